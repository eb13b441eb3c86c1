//! Finite-difference solvers for the two-dimensional Monge-Ampere equation
//! `det(D^2 u) = f` with Dirichlet data on a square, seeking the convex
//! (viscosity) solution.
//!
//! Three methods are provided:
//!
//! * **Method A** ([`methods::method_a_euler`], [`methods::method_a_newton`]):
//!   a monotone wide-stencil discretization of the convexified operator,
//!   solved by an explicit non-expansive sweep or a damped semi-smooth
//!   Newton iteration.
//! * **Method B** ([`methods::method_b_solve`]): a fixed-point iteration on
//!   the slack `g = lap u - 2 sqrt(f)` derived from the
//!   arithmetic-geometric mean identity, each sweep solving one Poisson
//!   problem.
//! * **Method C** ([`methods::method_c_solve`]): a damped monotone variant
//!   of the same idea whose error plateaus, with stagnation detection and
//!   best-iterate reporting.
//!
//! [`problems`] ships three standard test problems (smooth, C^1 cone,
//! boundary-singular hemisphere) and [`bench`] runs the error and timing
//! tables behind the `ma2d` binary.

pub mod bench;
pub mod error;
pub mod grid;
mod linalg;
pub mod methods;
pub mod operators;
pub mod poisson;
pub mod problems;

pub use error::{Error, Result};
pub use grid::{Direction, Grid2D, GridFunction, Rect, StencilDirections};
pub use methods::{
    estimate_dt, g_from_u, ma_residual, method_a_euler, method_a_newton, method_b_solve,
    method_b_step, method_c_solve, method_c_step, DtPolicy, MethodConfig, NewtonParams,
    SolveReport,
};
pub use operators::{
    central_hessian, discrete_determinant, eigen_bounds, lambda_max, lambda_min, laplacian5,
    second_difference, EigenPair, HessianCD,
};
pub use poisson::{poisson_residual, solve_poisson, solve_poisson_from, PoissonSystem};
pub use problems::{example1, example2, example3, linf_error, Problem};
