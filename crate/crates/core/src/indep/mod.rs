//! Ternary independence relations over finite closure structures: small
//! pregeometries, subspace skeletons with a distinguished subgroup, derived
//! relations (monotonisation and the star operation) and property checks.

use thiserror::Error;

use crate::subgroups::SubspaceError;

pub mod lemmas;
pub mod pregeo;
pub mod props;
pub mod relation;
pub mod sets;
pub mod skeleton;

pub use pregeo::{ClosureKind, PregeoSpec, Pregeometry};
pub use props::{check_property, CheckOptions, Property, PropertyReport, Violation};
pub use relation::{Evaluator, Relation, Structure};
pub use sets::Set;
pub use skeleton::{strong_core, weak_core, RuleClosure, Skeleton, SkeletonConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndepError {
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("no label {0}")]
    MissingLabel(String),
    #[error("no family {0}")]
    MissingFamily(String),
    #[error("unknown property {0}")]
    UnknownProperty(String),
    #[error("cannot parse relation {0}")]
    UnknownRelation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
}
