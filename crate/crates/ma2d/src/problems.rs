//! Benchmark problems with known solutions.
//!
//! Each problem packages the source density `f`, the Dirichlet data `phi`
//! (the trace of the exact solution) and, when available, the exact solution
//! for error measurement. `f` is only ever sampled at interior nodes; the
//! singular problem's density blows up at a corner of the closed square but
//! stays finite inside.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Rect};

pub type ScalarField = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A Dirichlet problem `det(D^2 u) = f` on a square with `u = phi` on the
/// boundary.
pub struct Problem {
    pub name: String,
    pub domain: Rect,
    f: ScalarField,
    phi: ScalarField,
    exact: Option<ScalarField>,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        domain: Rect,
        f: ScalarField,
        phi: ScalarField,
        exact: Option<ScalarField>,
    ) -> Self {
        Problem { name: name.into(), domain, f, phi, exact }
    }

    pub fn f(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    pub fn phi(&self, x: f64, y: f64) -> f64 {
        (self.phi)(x, y)
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_at(&self, x: f64, y: f64) -> Option<f64> {
        self.exact.as_ref().map(|e| e(x, y))
    }
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("Problem")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("has_exact", &self.has_exact())
            .finish()
    }
}

/// Smooth radial exponential: `u = exp((x^2+y^2)/2)`,
/// `f = (1 + x^2 + y^2) exp(x^2+y^2)` on the unit square.
pub fn example1() -> Problem {
    let u = |x: f64, y: f64| (0.5 * (x * x + y * y)).exp();
    Problem::new(
        "smooth-exponential",
        Rect::unit(),
        Box::new(|x, y| (1.0 + x * x + y * y) * (x * x + y * y).exp()),
        Box::new(u),
        Some(Box::new(u)),
    )
}

/// C^1 degenerate cone: `u = ((r - 0.2)+)^2 / 2` with `r` the distance to
/// the center of the unit square; `f = (1 - 0.2/r)+` vanishes on a disc.
pub fn example2() -> Problem {
    let r = |x: f64, y: f64| ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt();
    let u = move |x: f64, y: f64| {
        let d = r(x, y) - 0.2;
        if d > 0.0 {
            0.5 * d * d
        } else {
            0.0
        }
    };
    Problem::new(
        "c1-cone",
        Rect::unit(),
        Box::new(move |x, y| {
            let rr = r(x, y);
            if rr <= 0.2 {
                0.0
            } else {
                1.0 - 0.2 / rr
            }
        }),
        Box::new(u),
        Some(Box::new(u)),
    )
}

/// Boundary-singular hemisphere: `u = -sqrt(2 - x^2 - y^2)`,
/// `f = 2 / (2 - x^2 - y^2)^2` on the unit square. The density is unbounded
/// at the corner (1, 1) but finite at every interior node.
pub fn example3() -> Problem {
    let u = |x: f64, y: f64| -(2.0 - x * x - y * y).max(0.0).sqrt();
    Problem::new(
        "boundary-singular-hemisphere",
        Rect::unit(),
        Box::new(|x, y| {
            let d = 2.0 - x * x - y * y;
            2.0 / (d * d)
        }),
        Box::new(u),
        Some(Box::new(u)),
    )
}

/// Max-norm error of `u` against the problem's exact solution over all nodes.
pub fn linf_error(u: &GridFunction, problem: &Problem) -> Result<f64> {
    if !problem.has_exact() {
        return Err(Error::NotApplicable(format!(
            "problem '{}' has no exact solution to compare against",
            problem.name
        )));
    }
    let grid = u.grid();
    let mut err: f64 = 0.0;
    for (i, j) in grid.nodes() {
        let (x, y) = grid.point(i, j);
        let e = problem.exact_at(x, y).expect("checked above");
        err = err.max((u.get(i, j) - e).abs());
    }
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use approx::assert_abs_diff_eq;

    /// det(D^2 u) of an analytic function by small central differences;
    /// independent of the grid operators.
    fn fd_determinant(u: impl Fn(f64, f64) -> f64, x: f64, y: f64) -> f64 {
        let h = 1e-5;
        let uxx = (u(x + h, y) - 2.0 * u(x, y) + u(x - h, y)) / (h * h);
        let uyy = (u(x, y + h) - 2.0 * u(x, y) + u(x, y - h)) / (h * h);
        let uxy =
            (u(x + h, y + h) + u(x - h, y - h) - u(x - h, y + h) - u(x + h, y - h)) / (4.0 * h * h);
        uxx * uyy - uxy * uxy
    }

    #[test]
    fn example1_values() {
        let p = example1();
        assert_abs_diff_eq!(p.f(0.0, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.phi(1.0, 1.0), std::f64::consts::E, epsilon = 1e-12);
        assert_abs_diff_eq!(p.exact_at(1.0, 1.0).unwrap(), std::f64::consts::E, epsilon = 1e-12);
    }

    #[test]
    fn example1_exact_solves_equation() {
        let p = example1();
        for (x, y) in [(0.3, 0.7), (0.1, 0.1), (0.9, 0.4), (0.5, 0.5)] {
            let det = fd_determinant(|a, b| p.exact_at(a, b).unwrap(), x, y);
            assert!((det - p.f(x, y)).abs() < 1e-4 * (1.0 + p.f(x, y)));
        }
    }

    #[test]
    fn example2_flat_inside_disc() {
        let p = example2();
        assert_eq!(p.f(0.5, 0.5), 0.0);
        assert_eq!(p.f(0.55, 0.5), 0.0);
        assert_eq!(p.exact_at(0.6, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(p.exact_at(0.5, 0.9).unwrap(), 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(p.f(0.9, 0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn example2_exact_solves_equation_off_the_disc() {
        let p = example2();
        for (x, y) in [(0.9, 0.5), (0.1, 0.2), (0.8, 0.85)] {
            let det = fd_determinant(|a, b| p.exact_at(a, b).unwrap(), x, y);
            assert!((det - p.f(x, y)).abs() < 1e-4, "at ({x},{y}): {det} vs {}", p.f(x, y));
        }
    }

    #[test]
    fn example3_values_and_corner() {
        let p = example3();
        assert_abs_diff_eq!(p.exact_at(0.0, 0.0).unwrap(), -(2.0f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(p.f(0.0, 0.0), 0.5, epsilon = 1e-15);
        // The trace stays finite right up to the singular corner.
        assert_eq!(p.phi(1.0, 1.0), 0.0);
    }

    #[test]
    fn example3_exact_solves_equation() {
        let p = example3();
        for (x, y) in [(0.2, 0.4), (0.7, 0.7), (0.95, 0.3)] {
            let det = fd_determinant(|a, b| p.exact_at(a, b).unwrap(), x, y);
            assert!((det - p.f(x, y)).abs() < 1e-3 * (1.0 + p.f(x, y)));
        }
    }

    #[test]
    fn example3_density_finite_at_interior_nodes() {
        for n in [31usize, 45, 63, 89, 127] {
            let p = example3();
            let g = Grid2D::new(p.domain, n).unwrap();
            for (i, j) in g.interior() {
                let (x, y) = g.point(i, j);
                let v = p.f(x, y);
                assert!(v.is_finite() && v >= 0.0, "f({x},{y}) = {v} at n = {n}");
            }
        }
    }

    #[test]
    fn linf_error_detects_point_defect() {
        let p = example1();
        let g = Grid2D::new(p.domain, 15).unwrap();
        let mut u = GridFunction::from_fn(g, |x, y| p.exact_at(x, y).unwrap());
        assert_abs_diff_eq!(linf_error(&u, &p).unwrap(), 0.0, epsilon = 1e-15);
        u.set(7, 7, u.get(7, 7) + 1e-3);
        assert_abs_diff_eq!(linf_error(&u, &p).unwrap(), 1e-3, epsilon = 1e-12);
    }

    #[test]
    fn linf_error_requires_exact_solution() {
        let p = Problem::new(
            "no-exact",
            Rect::unit(),
            Box::new(|_, _| 1.0),
            Box::new(|_, _| 0.0),
            None,
        );
        let g = Grid2D::new(p.domain, 9).unwrap();
        let u = GridFunction::zeros(g);
        assert!(matches!(linf_error(&u, &p), Err(Error::NotApplicable(_))));
    }
}
