//! Small dense complex linear algebra and Wirtinger finite differences.

mod banded;
mod eigen;
mod linsolve;
mod matrix;
mod wirtinger;

pub use banded::BandedSpd;
pub use eigen::{characteristic_polynomial, polynomial_roots, solve_eig, EigenDecomposition, CLUSTER_RTOL};
pub use linsolve::{determinant, invert, invert_with, Lu, DEFAULT_INVERT_EPS};
pub use matrix::{vec_max_diff, vec_norm, CMatrix};
pub use wirtinger::{wirtinger_fd, wirtinger_fd_along, FdConfig, FdOrder, WirtingerDerivative, DEFAULT_FD_STEP};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("{rows}x{cols} matrix cannot hold {len} entries")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular (|det| = {det:e})")]
    Singular { det: f64 },
    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("function undefined at a finite-difference stencil point")]
    EvaluationFailure,
    #[error("banded system is not positive definite at row {row}")]
    NotPositiveDefinite { row: usize },
}
