//! Exact integer linear algebra: Smith normal form, kernels, cokernels and
//! finitely generated abelian groups in invariant-factor normal form.

mod group;
pub(crate) mod json;
mod matrix;
mod snf;

use thiserror::Error;

pub use group::FgAbelianGroup;
pub use json::JsonInt;
pub use matrix::IntegerMatrix;
pub use snf::{
    cokernel, cokernel_with_projection, kernel_basis, smith_normal_form, subquotient, Cokernel,
    LatticeSpan, SnfResult,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("column {column} of the image does not lie in the submodule")]
    SubgroupViolation { column: usize },
    #[error("not in invariant-factor normal form: {0}")]
    NotNormalForm(String),
}
