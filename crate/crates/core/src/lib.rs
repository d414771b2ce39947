//! Finite-stage generic additive subgroups of the algebraic closure of F_p.
//!
//! The crate covers exact arithmetic in a chain of finite fields, additive
//! subgroups as F_p-subspaces, polynomial formulas with bounded witness search
//! and a flatness decision, the staged construction of a generic subgroup with
//! an independent axiom checker, and a laboratory for ternary independence
//! relations over finite closure structures.

pub mod formulas;
pub mod fp;
pub mod genesis;
pub mod indep;
pub mod linalg;
pub mod subgroups;
pub mod tower;
pub mod upoly;

pub use subgroups::{Subspace, SubspaceError};
pub use tower::{FieldBudget, Tower, TowerConfig, TowerElement, TowerError};
