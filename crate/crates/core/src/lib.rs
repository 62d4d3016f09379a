//! Exact ranks, frozen variables and variable-type censuses of sparse random
//! symmetric matrices, together with the closed-form rank limit they are
//! checked against.

pub mod analytic;
pub mod error;
pub mod exactla;
pub mod field;
pub mod harness;
pub mod oracle;
pub mod perturb;
pub mod randgraph;
pub mod seed;

pub use error::{Error, Result};
pub use exactla::{FrozenMethod, IndexSet, Matrix, TypeProfile, VariableType};
pub use field::{FieldElement, FieldSpec};
