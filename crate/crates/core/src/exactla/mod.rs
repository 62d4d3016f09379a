//! Exact matrices: rank, kernel, frozen variables, relations and the
//! variable-type census.

mod elim;
mod frozen;
mod linalg;
mod matrix;
mod text;
mod types;

pub use elim::RowEchelon;
pub use frozen::{FrozenMethod, FrozenReport, RelationCaps, RelationMethod};
pub use matrix::{IndexSet, Matrix};
pub use types::{TypeProfile, VariableType};
