//! Pointwise discrete differential operators.
//!
//! Two families live here. The wide-stencil operators (`second_difference`,
//! `lambda_min`, `lambda_max`) bound the Hessian eigenvalues by directional
//! second differences and are monotone in the neighbor values. The compact
//! central-difference operators (`central_hessian`, `discrete_determinant`,
//! `laplacian5`) are the classical 9-point Hessian and 5-point Laplacian used
//! by the Poisson-based iterations.

use crate::error::{Error, Result};
use crate::grid::{Direction, GridFunction, StencilDirections};

/// Centered second difference of `u` at `node` along direction `v`,
/// normalized by the squared physical length of the offset.
pub fn second_difference(u: &GridFunction, node: (usize, usize), v: Direction) -> Result<f64> {
    let (i, j) = node;
    let grid = u.grid();
    if !grid.pair_in(i, j, v) {
        return Err(Error::OutOfGrid { i, j, p: v.p, q: v.q });
    }
    Ok(second_difference_unchecked(u, i, j, v))
}

#[inline]
fn second_difference_unchecked(u: &GridFunction, i: usize, j: usize, v: Direction) -> f64 {
    let (ip, jp) = ((i as i64 + v.p as i64) as usize, (j as i64 + v.q as i64) as usize);
    let (im, jm) = ((i as i64 - v.p as i64) as usize, (j as i64 - v.q as i64) as usize);
    let num = u.get(ip, jp) - 2.0 * u.get(i, j) + u.get(im, jm);
    num / v.len2(u.grid().h())
}

/// Smallest and largest directional second difference at a node, with the
/// directions attaining them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub argmin: Direction,
    pub argmax: Direction,
}

/// Scans the admissible stencil directions at an interior node and returns
/// both eigenvalue bounds in one pass. Ties keep the first direction in
/// angle-sorted order.
pub fn eigen_bounds(u: &GridFunction, node: (usize, usize), stencil: &StencilDirections) -> EigenPair {
    let (i, j) = node;
    let grid = u.grid();
    debug_assert!(grid.is_interior(i, j), "eigen bounds need an interior node");
    let mut best: Option<EigenPair> = None;
    for &d in stencil.iter() {
        if !grid.pair_in(i, j, d) {
            continue;
        }
        let s = second_difference_unchecked(u, i, j, d);
        match best.as_mut() {
            None => {
                best = Some(EigenPair { lambda_min: s, lambda_max: s, argmin: d, argmax: d });
            }
            Some(b) => {
                if s < b.lambda_min {
                    b.lambda_min = s;
                    b.argmin = d;
                }
                if s > b.lambda_max {
                    b.lambda_max = s;
                    b.argmax = d;
                }
            }
        }
    }
    // Axis directions always fit at an interior node, so the scan is never empty.
    best.expect("interior node has admissible directions")
}

/// Discrete lower Hessian eigenvalue bound and its direction.
pub fn lambda_min(u: &GridFunction, node: (usize, usize), stencil: &StencilDirections) -> (f64, Direction) {
    let e = eigen_bounds(u, node, stencil);
    (e.lambda_min, e.argmin)
}

/// Discrete upper Hessian eigenvalue bound and its direction.
pub fn lambda_max(u: &GridFunction, node: (usize, usize), stencil: &StencilDirections) -> (f64, Direction) {
    let e = eigen_bounds(u, node, stencil);
    (e.lambda_max, e.argmax)
}

/// Central-difference Hessian entries at an interior node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianCD {
    pub uxx: f64,
    pub uyy: f64,
    pub uxy: f64,
}

/// Second-order central differences: `uxx`, `uyy` on the axis neighbors and
/// the cross derivative on the four diagonal neighbors over `4 h^2`.
pub fn central_hessian(u: &GridFunction, node: (usize, usize)) -> HessianCD {
    let (i, j) = node;
    debug_assert!(u.grid().is_interior(i, j), "central Hessian needs an interior node");
    let h2 = u.grid().h() * u.grid().h();
    let c = u.get(i, j);
    let uxx = (u.get(i + 1, j) - 2.0 * c + u.get(i - 1, j)) / h2;
    let uyy = (u.get(i, j + 1) - 2.0 * c + u.get(i, j - 1)) / h2;
    let uxy = (u.get(i + 1, j + 1) + u.get(i - 1, j - 1)
        - u.get(i - 1, j + 1)
        - u.get(i + 1, j - 1))
        / (4.0 * h2);
    HessianCD { uxx, uyy, uxy }
}

/// Determinant of the central-difference Hessian, `uxx*uyy - uxy^2`.
pub fn discrete_determinant(u: &GridFunction, node: (usize, usize)) -> f64 {
    let h = central_hessian(u, node);
    h.uxx * h.uyy - h.uxy * h.uxy
}

/// Classical 5-point Laplacian at an interior node.
pub fn laplacian5(u: &GridFunction, node: (usize, usize)) -> f64 {
    let (i, j) = node;
    debug_assert!(u.grid().is_interior(i, j), "5-point Laplacian needs an interior node");
    let h2 = u.grid().h() * u.grid().h();
    (u.get(i + 1, j) + u.get(i - 1, j) + u.get(i, j + 1) + u.get(i, j - 1) - 4.0 * u.get(i, j)) / h2
}
