//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by grid construction, discrete operators and solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid parameters that cannot describe a usable mesh.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Stencil parameters outside the supported range.
    #[error("invalid stencil: {0}")]
    InvalidStencil(String),

    /// Operation queried at a node where it is not defined.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A stencil offset that leaves the grid at the queried node.
    #[error("offset ({p},{q}) leaves the grid at node ({i},{j})")]
    OutOfGrid { i: usize, j: usize, p: i32, q: i32 },

    /// Input data violating a contract (negative f, bad tolerance, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Linear solver stopped at the iteration cap before reaching tolerance.
    #[error("linear solver failed to converge: residual {residual:.3e} after {iterations} iterations")]
    LinearSolverFailure { residual: f64, iterations: usize },

    /// An iteration produced non-finite values.
    #[error("iteration diverged: {0}")]
    Divergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
