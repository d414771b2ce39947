//! Polynomial formulas over the tower: parsing, conjunctions, exhaustive
//! solving, bounded independent-witness search and the flatness decision.

use thiserror::Error;

use crate::subgroups::SubspaceError;
use crate::tower::TowerError;

pub mod flat;
pub mod parse;
pub mod poly;
pub mod qf;
pub mod solve;
pub mod theta;

pub use flat::{decide_fp_flat, is_fp_flat, FlatnessVerdict, LinearFactor, NotFlatReason};
pub use poly::{LevelPoly, Poly};
pub use qf::{FormulaSpec, QfConjunction};
pub use solve::solve;
pub use theta::{find_joint_independent_solutions, theta_search, SearchLimits, ThetaOutcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("formula has no literals")]
    NoLiterals,
    #[error("expected {want} values, got {got}")]
    Arity { want: usize, got: usize },
    #[error("search budget of {candidates} candidates exceeded")]
    BudgetExceeded { candidates: u64 },
    #[error("found only {found} of {wanted} jointly independent solutions within bounds")]
    NotEnoughSolutions { found: usize, wanted: usize },
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
}
