//! Staged construction of a generic additive subgroup: each round realizes the
//! scheduled formulas at a larger field and extends the group by the low
//! triangle of every solution matrix. Also an independent verifier, ball
//! checks and density experiments.

use thiserror::Error;

use crate::formulas::FormulaError;
use crate::subgroups::SubspaceError;
use crate::tower::TowerError;

pub mod ball;
pub mod checks;
pub mod schedule;
pub mod state;
pub mod step;
pub mod verify;

pub use ball::{ball_check, density_experiment, AxiomInstance, DensityMode, DensityReport};
pub use checks::{congruence_solution, product_witness, ProductWitness};
pub use schedule::{ParamSource, Policy, Schedule, ScheduleEntry};
pub use state::{Budgets, ConstructionState, LogRecord, Mutation, Stage, StateRecord};
pub use step::{run, step, StepReport};
pub use verify::{check_structure, verify_axiom_instance, verify_state, InstanceReport, InstanceVerdict, VerifyReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenesisError {
    #[error("no stage {0}")]
    StageOutOfRange(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("schedule: {0}")]
    Schedule(String),
    #[error("bad mutation: {0}")]
    Mutation(String),
    #[error("corrupt state: {0}")]
    Corrupt(String),
    #[error("state JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}
