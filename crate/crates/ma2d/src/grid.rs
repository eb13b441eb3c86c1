//! Uniform square grids, wide-stencil direction sets and nodal functions.
//!
//! A grid covers a closed square with an `n` by `n` lattice of nodes,
//! boundary included, so the spacing is `side / (n - 1)` and boundary nodes
//! carry Dirichlet data exactly. Stencil directions are integer offset
//! vectors `(p, q)` stored once per antipodal pair and sorted by angle;
//! every second-difference operator walks them in that order, which makes
//! min/max tie-breaking deterministic.

use crate::error::{Error, Result};

/// Axis-aligned rectangle, used as the solver domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Rect { xmin, ymin, xmax, ymax }
    }

    /// The unit square `[0, 1] x [0, 1]`.
    pub fn unit() -> Self {
        Rect::new(0.0, 0.0, 1.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }
}

/// Uniform `n` x `n` node grid over a square, boundary nodes included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    bounds: Rect,
    n: usize,
    h: f64,
}

impl Grid2D {
    /// Builds the grid. Requires `n >= 3` (at least one interior node) and a
    /// square domain with positive side.
    pub fn new(bounds: Rect, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGrid(format!(
                "need n >= 3 to have interior nodes, got n = {n}"
            )));
        }
        let w = bounds.width();
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidGrid(format!("side must be positive, got {w}")));
        }
        if (w - bounds.height()).abs() > 1e-12 * w {
            return Err(Error::InvalidGrid(format!(
                "domain must be square, got {} x {}",
                w,
                bounds.height()
            )));
        }
        let h = w / (n as f64 - 1.0);
        Ok(Grid2D { bounds, n, h })
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    /// Nodes per side.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Mesh spacing.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node_count(&self) -> usize {
        self.n * self.n
    }

    pub fn interior_count(&self) -> usize {
        (self.n - 2) * (self.n - 2)
    }

    /// Physical coordinates of node `(i, j)`. Endpoint nodes land exactly on
    /// the domain boundary.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        let d = (self.n - 1) as f64;
        (
            self.bounds.xmin + (i as f64 / d) * self.bounds.width(),
            self.bounds.ymin + (j as f64 / d) * self.bounds.height(),
        )
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        j * self.n + i
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    #[inline]
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        !self.is_boundary(i, j) && i < self.n && j < self.n
    }

    /// True when node `(i, j)` shifted by `(p, q)` stays on the grid.
    #[inline]
    pub fn offset_in(&self, i: usize, j: usize, p: i32, q: i32) -> bool {
        let ii = i as i64 + p as i64;
        let jj = j as i64 + q as i64;
        ii >= 0 && jj >= 0 && ii < self.n as i64 && jj < self.n as i64
    }

    /// True when both endpoints `(i, j) +- (p, q)` stay on the grid.
    #[inline]
    pub fn pair_in(&self, i: usize, j: usize, d: Direction) -> bool {
        self.offset_in(i, j, d.p, d.q) && self.offset_in(i, j, -d.p, -d.q)
    }

    /// Interior nodes in row-major order.
    pub fn interior(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (1..n - 1).flat_map(move |j| (1..n - 1).map(move |i| (i, j)))
    }

    /// All nodes in row-major order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |j| (0..n).map(move |i| (i, j)))
    }

    /// Boundary nodes (perimeter walk, row-major order of appearance).
    pub fn boundary(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes().filter(move |&(i, j)| self.is_boundary(i, j))
    }
}

/// One antipodal pair of lattice offsets, stored as the representative with
/// `p > 0`, or `p == 0 && q > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Direction {
    pub p: i32,
    pub q: i32,
}

impl Direction {
    pub fn new(p: i32, q: i32) -> Self {
        Direction { p, q }
    }

    /// Angle of the representative in `(-pi/2, pi/2]`.
    pub fn angle(&self) -> f64 {
        (self.q as f64).atan2(self.p as f64)
    }

    /// Squared length in cell units, `p^2 + q^2`.
    pub fn cell_len2(&self) -> f64 {
        (self.p * self.p + self.q * self.q) as f64
    }

    /// Squared physical length on a grid with spacing `h`.
    #[inline]
    pub fn len2(&self, h: f64) -> f64 {
        self.cell_len2() * h * h
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The set of stencil directions for a given width, one entry per antipodal
/// pair, sorted by angle.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilDirections {
    width: usize,
    dirs: Vec<Direction>,
}

impl StencilDirections {
    /// Enumerates coprime offsets `(p, q)` with `max(|p|, |q|) <= width`,
    /// keeping one representative per antipodal pair. Width 1 gives the 4
    /// axis/diagonal pairs, width 2 the 8 pairs of the 17-point stencil.
    pub fn new(width: usize) -> Result<Self> {
        if width < 1 {
            return Err(Error::InvalidStencil("width must be >= 1".into()));
        }
        if width > 64 {
            return Err(Error::InvalidStencil(format!(
                "width {width} is far past any useful resolution"
            )));
        }
        let w = width as i32;
        let mut dirs = Vec::new();
        for p in 0..=w {
            for q in -w..=w {
                let rep = p > 0 || (p == 0 && q > 0);
                if !rep {
                    continue;
                }
                if gcd(p as u32, q.unsigned_abs()) != 1 {
                    continue;
                }
                dirs.push(Direction::new(p, q));
            }
        }
        dirs.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
        Ok(StencilDirections { width, dirs })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of antipodal direction pairs.
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Direction> {
        self.dirs.iter()
    }

    pub fn dirs(&self) -> &[Direction] {
        &self.dirs
    }

    /// Worst angular distance from an arbitrary direction to the nearest
    /// stencil direction (antipodes included): half the largest angular gap.
    pub fn directional_resolution(&self) -> f64 {
        use std::f64::consts::PI;
        let mut angles: Vec<f64> = Vec::with_capacity(2 * self.dirs.len());
        for d in &self.dirs {
            let a = (d.q as f64).atan2(d.p as f64);
            angles.push(a);
            let opp = if a > 0.0 { a - PI } else { a + PI };
            angles.push(opp);
        }
        angles.sort_by(|a, b| a.total_cmp(b));
        let mut max_gap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
        for w in angles.windows(2) {
            max_gap = max_gap.max(w[1] - w[0]);
        }
        max_gap / 2.0
    }

    /// Directions whose both endpoints stay on the grid at an interior node.
    /// Boundary nodes have no admissible pairs and are rejected.
    pub fn admissible_at(&self, grid: &Grid2D, node: (usize, usize)) -> Result<StencilDirections> {
        let (i, j) = node;
        if !grid.is_interior(i, j) {
            return Err(Error::NotApplicable(format!(
                "node ({i},{j}) is not interior; stencil directions are defined at interior nodes"
            )));
        }
        let dirs = self
            .dirs
            .iter()
            .copied()
            .filter(|&d| grid.pair_in(i, j, d))
            .collect();
        Ok(StencilDirections { width: self.width, dirs })
    }
}

/// Nodal values of a scalar function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid2D,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid2D) -> Self {
        GridFunction { grid, values: vec![0.0; grid.node_count()] }
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        GridFunction { grid, values: vec![c; grid.node_count()] }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for (i, j) in grid.nodes() {
            let (x, y) = grid.point(i, j);
            values.push(f(x, y));
        }
        GridFunction { grid, values }
    }

    /// Samples `f` at interior nodes only; boundary entries are zero.
    pub fn from_fn_interior(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        for (i, j) in grid.interior() {
            let (x, y) = grid.point(i, j);
            out.set(i, j, f(x, y));
        }
        out
    }

    /// Samples `f` at boundary nodes only; interior entries are zero.
    pub fn from_fn_boundary(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        for (i, j) in grid.boundary() {
            let (x, y) = grid.point(i, j);
            out.set(i, j, f(x, y));
        }
        out
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.grid.index(i, j);
        self.values[idx] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `max |self - other|` over all nodes.
    pub fn linf_diff(&self, other: &GridFunction) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `max |self|` over all nodes.
    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Minimum over interior nodes.
    pub fn min_interior(&self) -> f64 {
        self.grid
            .interior()
            .map(|(i, j)| self.get(i, j))
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |self|` over interior nodes.
    pub fn linf_interior(&self) -> f64 {
        self.grid
            .interior()
            .map(|(i, j)| self.get(i, j).abs())
            .fold(0.0, f64::max)
    }
}
