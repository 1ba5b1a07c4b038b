//! Exact integer and rational linear algebra.
//!
//! Everything else in the crate is checked against these routines: Smith
//! normal forms give lattice types and cohomology, kernels give commutants.

mod integer;
pub mod json;
mod normal_form;
mod rational;

pub use integer::IntegerMatrix;
pub(crate) use integer::rational_vec;
pub use normal_form::{canonical_column_basis, hermite_normal_form, kernel_lattice, smith_normal_form, SnfDecomposition};
pub use rational::RationalMatrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("expected a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not unimodular")]
    NotUnimodular,
}
