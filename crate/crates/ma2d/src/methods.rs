//! Solvers for the Dirichlet Monge-Ampere problem `det(D^2 u) = f`.
//!
//! Method A discretizes the convexified operator with wide-stencil
//! eigenvalue bounds and drives `lambda1 * lambda2 - f` to zero, either by
//! an explicit monotone fixed-point sweep (`method_a_euler`) or by a damped
//! semi-smooth Newton iteration (`method_a_newton`).
//!
//! Methods B and C exploit the arithmetic-geometric mean inequality
//! `trace >= 2 sqrt(det)`: the solution solves the Poisson problem
//! `lap u = 2 sqrt(f) + g` for an unknown nonnegative slack `g`, which both
//! methods iterate on. Method B applies the fixed-point map
//! `g <- sqrt(uxx^2 + uyy^2 + 2 uxy^2 + 2 f) - 2 sqrt(f)`; Method C adds a
//! damped correction `g <- g + alpha sqrt(|det - f|)` whose iterates grow
//! monotonically and plateau rather than converge, so it carries a
//! stagnation stop and returns its best iterate.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::{Direction, Grid2D, GridFunction, StencilDirections};
use crate::linalg::{bicgstab, SparseRows};
use crate::operators::{central_hessian, eigen_bounds, laplacian5};
use crate::poisson::{solve_poisson, solve_poisson_from, PoissonSystem};
use crate::problems::Problem;

pub const DEFAULT_STENCIL_WIDTH: usize = 2;
pub const DEFAULT_TOL: f64 = 1e-8;
/// Damping for the square-root correction. Small enough that the
/// plateau error on the benchmark problems stays flat in N.
pub const DEFAULT_ALPHA: f64 = 0.1;
pub const NEWTON_DEFAULT_CAP: usize = 50;
pub const FIXED_POINT_DEFAULT_CAP: usize = 5000;

/// Euler cap scales with the node count because the stable step size scales
/// with `h^2`.
pub fn euler_default_cap(n: usize) -> usize {
    10 * n * n
}

/// Step-size policy for the explicit iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    /// Recompute the stable step from the current iterate every sweep.
    Adaptive,
    /// Fixed user-chosen step.
    Fixed(f64),
}

/// Backtracking line-search parameters for the Newton solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonParams {
    pub initial_step: f64,
    pub backtrack: f64,
    pub min_step: f64,
}

impl Default for NewtonParams {
    fn default() -> Self {
        NewtonParams { initial_step: 1.0, backtrack: 0.5, min_step: 1e-6 }
    }
}

/// Shared solver configuration. Defaults reproduce the benchmark setup:
/// width-2 stencil, increment tolerance 1e-8, adaptive Euler steps.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig {
    pub stencil_width: usize,
    /// Outer tolerance on the solution (or `g`) increment in max norm.
    pub tol: f64,
    /// Outer iteration cap; `None` picks the per-method default.
    pub max_outer: Option<usize>,
    pub dt: DtPolicy,
    pub newton: NewtonParams,
    /// Damping factor of Method C, in (0, 1).
    pub alpha: f64,
    /// Constant initial slack `g`.
    pub g0: f64,
    /// Eigenvalue clamp of the convexified operator, >= 0.
    pub delta: f64,
    pub poisson_tol: f64,
    pub poisson_max_iters: usize,
}

impl Default for MethodConfig {
    fn default() -> Self {
        MethodConfig {
            stencil_width: DEFAULT_STENCIL_WIDTH,
            tol: DEFAULT_TOL,
            max_outer: None,
            dt: DtPolicy::Adaptive,
            newton: NewtonParams::default(),
            alpha: DEFAULT_ALPHA,
            g0: 0.0,
            delta: 0.0,
            poisson_tol: crate::poisson::DEFAULT_POISSON_TOL,
            poisson_max_iters: crate::poisson::DEFAULT_POISSON_MAX_ITERS,
        }
    }
}

impl MethodConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidData(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidData(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::InvalidData(format!("delta must be >= 0, got {}", self.delta)));
        }
        if !(self.g0 >= 0.0) {
            return Err(Error::InvalidData(format!("g0 must be >= 0, got {}", self.g0)));
        }
        if let DtPolicy::Fixed(v) = self.dt {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidData(format!("fixed dt must be positive, got {v}")));
            }
        }
        let nw = &self.newton;
        if !(nw.initial_step > 0.0 && nw.initial_step <= 1.0)
            || !(nw.backtrack > 0.0 && nw.backtrack < 1.0)
            || !(nw.min_step > 0.0)
        {
            return Err(Error::InvalidData("newton line-search parameters out of range".into()));
        }
        if !(self.poisson_tol > 0.0) {
            return Err(Error::InvalidData("poisson tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of one solver run.
///
/// `residual_history` records, per outer iteration, the scheme residual
/// `max |ma_residual|` for Method A and the determinant defect
/// `max |det(D^2 u) - f|` for Methods B and C. `increment_history` records
/// the max-norm update applied that iteration; both have length
/// `iterations`. `converged` implies the final increment is at most the
/// configured tolerance.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u: GridFunction,
    /// Final slack `g` (recovered as `lap u - 2 sqrt(f)` for Method A).
    pub g: GridFunction,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub increment_history: Vec<f64>,
    pub seconds: f64,
    pub converged: bool,
    /// Smallest wide-stencil eigenvalue bound of the final iterate.
    pub min_lambda1: f64,
    /// Smallest value of `lap u - 2 sqrt(f)` of the final iterate.
    pub min_gtilde: f64,
}

/// Convexified Monge-Ampere residual at interior nodes:
/// `max(l1,delta) * max(l2,delta) + min(l1,delta) - delta - f`.
/// Boundary entries are zero. Requires `f >= 0` at interior nodes.
pub fn ma_residual(
    u: &GridFunction,
    f: &GridFunction,
    stencil: &StencilDirections,
    delta: f64,
) -> Result<GridFunction> {
    if u.grid() != f.grid() {
        return Err(Error::InvalidData("u and f must live on the same grid".into()));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidData(format!("delta must be >= 0, got {delta}")));
    }
    check_density(f)?;
    let mut out = GridFunction::zeros(*u.grid());
    residual_pass(u, f, stencil, delta, &mut out);
    Ok(out)
}

fn check_density(f: &GridFunction) -> Result<()> {
    for (i, j) in f.grid().interior() {
        let v = f.get(i, j);
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidData(format!(
                "density must be finite and >= 0, got {v} at node ({i},{j})"
            )));
        }
    }
    Ok(())
}

/// One residual sweep. Returns `(max |residual|, max |lambda|)`.
fn residual_pass(
    u: &GridFunction,
    f: &GridFunction,
    stencil: &StencilDirections,
    delta: f64,
    out: &mut GridFunction,
) -> (f64, f64) {
    let mut res_norm: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    for (i, j) in u.grid().interior() {
        let e = eigen_bounds(u, (i, j), stencil);
        let r = clamped_residual(e.lambda_min, e.lambda_max, delta, f.get(i, j));
        out.set(i, j, r);
        res_norm = res_norm.max(r.abs());
        max_abs = max_abs.max(e.lambda_min.abs()).max(e.lambda_max.abs());
    }
    (res_norm, max_abs)
}

#[derive(Debug, Clone, Copy)]
struct ActivePair {
    lam1: f64,
    lam2: f64,
    v1: Direction,
    v2: Direction,
}

/// Residual sweep that also records the active directions for the Newton
/// linearization.
fn residual_pass_active(
    u: &GridFunction,
    f: &GridFunction,
    stencil: &StencilDirections,
    delta: f64,
    out: &mut GridFunction,
    actives: &mut Vec<ActivePair>,
) -> (f64, f64) {
    actives.clear();
    let mut res_norm: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    for (i, j) in u.grid().interior() {
        let e = eigen_bounds(u, (i, j), stencil);
        let r = clamped_residual(e.lambda_min, e.lambda_max, delta, f.get(i, j));
        out.set(i, j, r);
        actives.push(ActivePair { lam1: e.lambda_min, lam2: e.lambda_max, v1: e.argmin, v2: e.argmax });
        res_norm = res_norm.max(r.abs());
        max_abs = max_abs.max(e.lambda_min.abs()).max(e.lambda_max.abs());
    }
    (res_norm, max_abs)
}

#[inline]
fn clamped_residual(lam1: f64, lam2: f64, delta: f64, f: f64) -> f64 {
    lam1.max(delta) * lam2.max(delta) + lam1.min(delta) - delta - f
}

/// Slack recovered from a solution candidate: `laplacian5(u) - 2 sqrt(f)` at
/// interior nodes, zero on the boundary. Expects `f >= 0`.
pub fn g_from_u(u: &GridFunction, f: &GridFunction) -> GridFunction {
    debug_assert_eq!(u.grid(), f.grid());
    let mut g = GridFunction::zeros(*u.grid());
    for (i, j) in u.grid().interior() {
        debug_assert!(f.get(i, j) >= 0.0);
        g.set(i, j, laplacian5(u, (i, j)) - 2.0 * f.get(i, j).sqrt());
    }
    g
}

/// Stable explicit step for the monotone sweep:
/// `h^2 / (2 S (1 + max |lambda|))` with `S` the number of stencil pairs.
pub fn estimate_dt(u: &GridFunction, stencil: &StencilDirections) -> f64 {
    let mut max_abs: f64 = 0.0;
    for (i, j) in u.grid().interior() {
        let e = eigen_bounds(u, (i, j), stencil);
        max_abs = max_abs.max(e.lambda_min.abs()).max(e.lambda_max.abs());
    }
    dt_formula(u.grid().h(), stencil.len(), max_abs)
}

#[inline]
fn dt_formula(h: f64, pairs: usize, max_abs_lambda: f64) -> f64 {
    h * h / (2.0 * pairs as f64 * (1.0 + max_abs_lambda))
}

/// Problem data sampled on a grid: `f` at interior nodes, Dirichlet data at
/// boundary nodes, and `2 sqrt(f)` precomputed for the Poisson right-hand
/// sides.
struct Sampled {
    f: GridFunction,
    phi: GridFunction,
    two_sqrt_f: GridFunction,
}

fn sample_problem(problem: &Problem, grid: &Grid2D) -> Result<Sampled> {
    let b = grid.bounds();
    let d = problem.domain;
    let scale = d.width().abs().max(1.0);
    if (b.xmin - d.xmin).abs() > 1e-12 * scale
        || (b.ymin - d.ymin).abs() > 1e-12 * scale
        || (b.xmax - d.xmax).abs() > 1e-12 * scale
        || (b.ymax - d.ymax).abs() > 1e-12 * scale
    {
        return Err(Error::InvalidData(format!(
            "grid bounds {:?} do not match the domain {:?} of problem '{}'",
            b, d, problem.name
        )));
    }
    let f = GridFunction::from_fn_interior(*grid, |x, y| problem.f(x, y));
    check_density(&f)?;
    let phi = GridFunction::from_fn_boundary(*grid, |x, y| problem.phi(x, y));
    for (i, j) in grid.boundary() {
        if !phi.get(i, j).is_finite() {
            return Err(Error::InvalidData(format!(
                "boundary data is not finite at node ({i},{j})"
            )));
        }
    }
    let mut two_sqrt_f = GridFunction::zeros(*grid);
    for (i, j) in grid.interior() {
        two_sqrt_f.set(i, j, 2.0 * f.get(i, j).sqrt());
    }
    Ok(Sampled { f, phi, two_sqrt_f })
}

/// Poisson right-hand side `2 sqrt(f) + g` on interior nodes.
fn slack_rhs(s: &Sampled, g: &GridFunction) -> GridFunction {
    let grid = *s.f.grid();
    let mut rhs = GridFunction::zeros(grid);
    for (i, j) in grid.interior() {
        rhs.set(i, j, s.two_sqrt_f.get(i, j) + g.get(i, j));
    }
    rhs
}

fn poisson_for(s: &Sampled, g: &GridFunction, config: &MethodConfig) -> PoissonSystem {
    let mut sys = PoissonSystem::new(*s.f.grid(), slack_rhs(s, g), s.phi.clone());
    sys.tol = config.poisson_tol;
    sys.max_iters = config.poisson_max_iters;
    sys
}

fn diagnostics(
    u: &GridFunction,
    s: &Sampled,
    stencil: &StencilDirections,
) -> (GridFunction, f64, f64) {
    let g = g_from_u(u, &s.f);
    let min_gtilde = g.min_interior();
    let mut min_l1 = f64::INFINITY;
    for (i, j) in u.grid().interior() {
        min_l1 = min_l1.min(eigen_bounds(u, (i, j), stencil).lambda_min);
    }
    (g, min_l1, min_gtilde)
}

fn add_scaled_interior(u: &mut GridFunction, v: &GridFunction, scale: f64) {
    let grid = *u.grid();
    for (i, j) in grid.interior() {
        u.set(i, j, u.get(i, j) + scale * v.get(i, j));
    }
}

/// Explicit monotone iteration for the wide-stencil scheme:
/// `u <- u + dt * ma_residual(u)`. Raising `u` where the clamped determinant
/// falls short of `f` (and lowering it where it exceeds `f`) is the
/// orientation that makes the sweep non-decreasing in every neighbor value,
/// hence non-expansive for the estimated step.
pub fn method_a_euler(problem: &Problem, grid: &Grid2D, config: &MethodConfig) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();
    let stencil = StencilDirections::new(config.stencil_width)?;
    let s = sample_problem(problem, grid)?;
    let g_init = GridFunction::constant(*grid, config.g0);
    let mut u = solve_poisson(&poisson_for(&s, &g_init, config))?;

    let cap = config.max_outer.unwrap_or_else(|| euler_default_cap(grid.n()));
    let mut res = GridFunction::zeros(*grid);
    let mut residual_history = Vec::new();
    let mut increment_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..cap {
        let (res_norm, max_abs) = residual_pass(&u, &s.f, &stencil, config.delta, &mut res);
        if !res_norm.is_finite() {
            return Err(Error::Divergence(format!(
                "explicit sweep produced a non-finite residual after {iterations} iterations"
            )));
        }
        let dt = match config.dt {
            DtPolicy::Fixed(v) => v,
            DtPolicy::Adaptive => dt_formula(grid.h(), stencil.len(), max_abs),
        };
        add_scaled_interior(&mut u, &res, dt);
        iterations += 1;
        residual_history.push(res_norm);
        increment_history.push(dt * res_norm);
        // The increment test |u_next - u| <= tol * dt is the residual test
        // |ma_residual| <= tol, which is how it is implemented.
        if res_norm <= config.tol {
            converged = true;
            break;
        }
    }

    let (g, min_lambda1, min_gtilde) = diagnostics(&u, &s, &stencil);
    Ok(SolveReport {
        u,
        g,
        iterations,
        residual_history,
        increment_history,
        seconds: start.elapsed().as_secs_f64(),
        converged,
        min_lambda1,
        min_gtilde,
    })
}

/// Assembles the semi-smooth Newton linearization with the min/max
/// directions frozen. Row `k`: the product rule applied to
/// `max(l1,delta) * max(l2,delta) + min(l1,delta)` along the two active
/// directions; boundary endpoints are fixed and contribute nothing.
fn assemble_jacobian(
    grid: &Grid2D,
    actives: &[ActivePair],
    delta: f64,
) -> SparseRows {
    let n = grid.n();
    let m = n - 2;
    let h = grid.h();
    let mut jac = SparseRows::new(m * m);
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let k = (j - 1) * m + (i - 1);
            let a = actives[k];
            let c1 = if a.lam1 >= delta { a.lam2.max(delta) } else { 1.0 };
            let c2 = if a.lam2 >= delta { a.lam1.max(delta) } else { 0.0 };
            for (c, v) in [(c1, a.v1), (c2, a.v2)] {
                if c == 0.0 {
                    continue;
                }
                let w = c / v.len2(h);
                jac.push(k, k, -2.0 * w);
                for sign in [1i32, -1] {
                    let ii = i as i64 + (sign * v.p) as i64;
                    let jj = j as i64 + (sign * v.q) as i64;
                    // Admissible directions keep both endpoints on the grid.
                    let (ii, jj) = (ii as usize, jj as usize);
                    if grid.is_interior(ii, jj) {
                        jac.push(k, (jj - 1) * m + (ii - 1), w);
                    }
                }
            }
        }
    }
    jac
}

fn solve_newton_system(jac: &mut SparseRows, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = jac.n;
    let diag = jac.diagonal();
    let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let needs_reg = scale == 0.0 || diag.iter().any(|d| d.abs() < 1e-14 * scale);
    let b_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = 1e-8 * b_norm;
    let cap = 4 * n + 200;
    let mut du = vec![0.0; n];

    let attempt = |jac: &SparseRows, du: &mut Vec<f64>| {
        let diag = jac.diagonal();
        let inv: Vec<f64> = diag
            .iter()
            .map(|&d| if d.abs() < 1e-300 { 1.0 } else { 1.0 / d })
            .collect();
        bicgstab(jac, rhs, du, &inv, target, cap)
    };

    if !needs_reg {
        let out = attempt(jac, &mut du);
        if out.converged && du.iter().all(|v| v.is_finite()) {
            return Some(du);
        }
    }
    // Singular or stalled system: strengthen the diagonal once and retry.
    let eps = 1e-10 * if scale > 0.0 { scale } else { 1.0 };
    jac.shift_diagonal(-eps);
    let out = attempt(jac, &mut du);
    if out.converged && du.iter().all(|v| v.is_finite()) {
        Some(du)
    } else {
        None
    }
}

/// Damped semi-smooth Newton iteration on the wide-stencil residual, with
/// max-norm backtracking and a monotone-sweep fallback when the line search
/// stalls. Convergence is declared only on an (essentially) full Newton step
/// with increment at most the tolerance, so fallback crawling cannot report
/// success prematurely.
pub fn method_a_newton(problem: &Problem, grid: &Grid2D, config: &MethodConfig) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();
    let stencil = StencilDirections::new(config.stencil_width)?;
    let s = sample_problem(problem, grid)?;
    let g_init = GridFunction::constant(*grid, config.g0);
    let mut u = solve_poisson(&poisson_for(&s, &g_init, config))?;

    let n = grid.n();
    let m = n - 2;
    let cap = config.max_outer.unwrap_or(NEWTON_DEFAULT_CAP);
    let mut res = GridFunction::zeros(*grid);
    let mut trial = GridFunction::zeros(*grid);
    let mut trial_res = GridFunction::zeros(*grid);
    let mut actives: Vec<ActivePair> = Vec::with_capacity(m * m);
    let mut residual_history = Vec::new();
    let mut increment_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..cap {
        let (res_norm, max_abs) =
            residual_pass_active(&u, &s.f, &stencil, config.delta, &mut res, &mut actives);
        if !res_norm.is_finite() {
            return Err(Error::Divergence(format!(
                "newton iteration produced a non-finite residual after {iterations} iterations"
            )));
        }
        iterations += 1;
        residual_history.push(res_norm);

        let mut jac = assemble_jacobian(grid, &actives, config.delta);
        let mut rhs = vec![0.0; m * m];
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                rhs[(j - 1) * m + (i - 1)] = -res.get(i, j);
            }
        }
        let du = solve_newton_system(&mut jac, &rhs);

        let mut increment = None;
        if let Some(du) = du {
            let du_norm = du.iter().fold(0.0f64, |mx, v| mx.max(v.abs()));
            if du_norm <= config.tol {
                for j in 1..n - 1 {
                    for i in 1..n - 1 {
                        u.set(i, j, u.get(i, j) + du[(j - 1) * m + (i - 1)]);
                    }
                }
                increment = Some(du_norm);
                converged = true;
            } else {
                let mut step = config.newton.initial_step;
                while step >= config.newton.min_step {
                    trial.values_mut().copy_from_slice(u.values());
                    for j in 1..n - 1 {
                        for i in 1..n - 1 {
                            let k = (j - 1) * m + (i - 1);
                            trial.set(i, j, trial.get(i, j) + step * du[k]);
                        }
                    }
                    let (t_norm, _) =
                        residual_pass(&trial, &s.f, &stencil, config.delta, &mut trial_res);
                    if t_norm < res_norm {
                        std::mem::swap(&mut u, &mut trial);
                        let inc = step * du_norm;
                        increment = Some(inc);
                        if step >= 0.999 * config.newton.initial_step && inc <= config.tol {
                            converged = true;
                        }
                        break;
                    }
                    step *= config.newton.backtrack;
                }
            }
        }

        let inc = match increment {
            Some(v) => v,
            None => {
                // Line search stalled (kink in the semi-smooth residual) or
                // the linear solver gave nothing useful: take one monotone
                // sweep and resume. Never declares convergence.
                let dt = match config.dt {
                    DtPolicy::Fixed(v) => v,
                    DtPolicy::Adaptive => dt_formula(grid.h(), stencil.len(), max_abs),
                };
                add_scaled_interior(&mut u, &res, dt);
                dt * res_norm
            }
        };
        increment_history.push(inc);
        if converged {
            break;
        }
    }

    let (g, min_lambda1, min_gtilde) = diagnostics(&u, &s, &stencil);
    Ok(SolveReport {
        u,
        g,
        iterations,
        residual_history,
        increment_history,
        seconds: start.elapsed().as_secs_f64(),
        converged,
        min_lambda1,
        min_gtilde,
    })
}

/// One sweep of Method B's fixed-point map at interior nodes. Returns the
/// updated slack (clamped to stay nonnegative) and the determinant defect
/// `max |det - f|` of the supplied iterate.
fn b_map(u: &GridFunction, s: &Sampled, g_next: &mut GridFunction) -> f64 {
    let grid = *u.grid();
    let mut defect: f64 = 0.0;
    for (i, j) in grid.interior() {
        let hd = central_hessian(u, (i, j));
        let f = s.f.get(i, j);
        defect = defect.max((hd.uxx * hd.uyy - hd.uxy * hd.uxy - f).abs());
        let radicand = hd.uxx * hd.uxx + hd.uyy * hd.uyy + 2.0 * hd.uxy * hd.uxy + 2.0 * f;
        g_next.set(i, j, (radicand.sqrt() - s.two_sqrt_f.get(i, j)).max(0.0));
    }
    defect
}

/// One sweep of Method C's damped map. Returns the determinant defect.
fn c_map(u: &GridFunction, s: &Sampled, alpha: f64, g: &GridFunction, g_next: &mut GridFunction) -> f64 {
    let grid = *u.grid();
    let mut defect: f64 = 0.0;
    for (i, j) in grid.interior() {
        let d = crate::operators::discrete_determinant(u, (i, j)) - s.f.get(i, j);
        defect = defect.max(d.abs());
        g_next.set(i, j, g.get(i, j) + alpha * d.abs().sqrt());
    }
    defect
}

/// Single application of Method B's map to a slack iterate: solves the
/// Poisson problem for `g` and evaluates the updated slack. Returns
/// `(g_next, u_g)`.
pub fn method_b_step(g: &GridFunction, problem: &Problem) -> Result<(GridFunction, GridFunction)> {
    let config = MethodConfig::default();
    let grid = *g.grid();
    let s = sample_problem(problem, &grid)?;
    check_slack(g)?;
    let u = solve_poisson(&poisson_for(&s, g, &config))?;
    let mut g_next = GridFunction::zeros(grid);
    b_map(&u, &s, &mut g_next);
    Ok((g_next, u))
}

/// Single application of Method C's damped map. Returns `(g_next, u_g)`.
pub fn method_c_step(
    g: &GridFunction,
    problem: &Problem,
    alpha: f64,
) -> Result<(GridFunction, GridFunction)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidData(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let config = MethodConfig::default();
    let grid = *g.grid();
    let s = sample_problem(problem, &grid)?;
    check_slack(g)?;
    let u = solve_poisson(&poisson_for(&s, g, &config))?;
    let mut g_next = GridFunction::zeros(grid);
    c_map(&u, &s, alpha, g, &mut g_next);
    Ok((g_next, u))
}

fn check_slack(g: &GridFunction) -> Result<()> {
    for (i, j) in g.grid().interior() {
        let v = g.get(i, j);
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidData(format!(
                "slack must be finite and >= 0, got {v} at node ({i},{j})"
            )));
        }
    }
    Ok(())
}

/// Method B: iterate the arithmetic-geometric fixed-point map until the
/// slack increment drops below tolerance. The map needs enough regularity to
/// contract; when it instead blows up the run aborts at a growth threshold
/// and reports its best iterate, unconverged.
pub fn method_b_solve(problem: &Problem, grid: &Grid2D, config: &MethodConfig) -> Result<SolveReport> {
    fixed_point_solve(problem, grid, config, FixedPointKind::B)
}

/// Method C: monotone damped iteration on the slack. The increments
/// `alpha sqrt(|det - f|)` cannot vanish at the discrete level, so the
/// defect is monitored and the run stops (returning the best iterate) once
/// it stagnates for a patience window.
pub fn method_c_solve(problem: &Problem, grid: &Grid2D, config: &MethodConfig) -> Result<SolveReport> {
    fixed_point_solve(problem, grid, config, FixedPointKind::C)
}

#[derive(Clone, Copy, PartialEq)]
enum FixedPointKind {
    B,
    C,
}

const STAGNATION_PATIENCE: usize = 40;
const STAGNATION_IMPROVEMENT: f64 = 1e-3;

fn fixed_point_solve(
    problem: &Problem,
    grid: &Grid2D,
    config: &MethodConfig,
    kind: FixedPointKind,
) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();
    let stencil = StencilDirections::new(config.stencil_width)?;
    let s = sample_problem(problem, grid)?;

    let mut g = GridFunction::from_fn_interior(*grid, |_, _| config.g0);
    let mut u = solve_poisson(&poisson_for(&s, &g, config))?;
    let mut g_next = GridFunction::zeros(*grid);

    let cap = config.max_outer.unwrap_or(FIXED_POINT_DEFAULT_CAP);
    let blowup = 1e6 * (1.0 + config.g0);
    let mut residual_history = Vec::new();
    let mut increment_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    let mut best_defect = f64::INFINITY;
    let mut best: Option<(GridFunction, GridFunction)> = None;
    let mut since_best = 0usize;

    for _ in 0..cap {
        let defect = match kind {
            FixedPointKind::B => b_map(&u, &s, &mut g_next),
            FixedPointKind::C => c_map(&u, &s, config.alpha, &g, &mut g_next),
        };
        let inc = g_next.linf_diff(&g);
        iterations += 1;
        residual_history.push(defect);
        increment_history.push(inc);
        if !inc.is_finite() || !defect.is_finite() {
            return Err(Error::Divergence(format!(
                "fixed-point iteration produced non-finite values after {iterations} iterations"
            )));
        }

        if defect < best_defect * (1.0 - STAGNATION_IMPROVEMENT) {
            best_defect = defect;
            best = Some((u.clone(), g.clone()));
            since_best = 0;
        } else {
            since_best += 1;
        }

        std::mem::swap(&mut g, &mut g_next);

        if inc <= config.tol {
            converged = true;
            // Resolve once more so the reported u matches the final slack.
            u = solve_poisson_from(&poisson_for(&s, &g, config), &u)?;
            break;
        }
        if g.linf_interior() > blowup {
            break;
        }
        if kind == FixedPointKind::C && since_best >= STAGNATION_PATIENCE {
            break;
        }
        u = solve_poisson_from(&poisson_for(&s, &g, config), &u)?;
    }

    if !converged {
        // Cap, blowup or stagnation: hand back the best iterate seen.
        if let Some((bu, bg)) = best {
            u = bu;
            g = bg;
        }
    }

    let (_, min_lambda1, min_gtilde) = diagnostics(&u, &s, &stencil);
    Ok(SolveReport {
        u,
        g,
        iterations,
        residual_history,
        increment_history,
        seconds: start.elapsed().as_secs_f64(),
        converged,
        min_lambda1,
        min_gtilde,
    })
}
