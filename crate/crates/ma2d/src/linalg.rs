//! Internal Krylov kernels shared by the Poisson solver and the Newton
//! iteration. Everything here works on flat interior-node vectors.

/// Matrix action on a flat vector.
pub(crate) trait LinOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct KrylovOutcome {
    pub iterations: usize,
    pub residual_l2: f64,
    pub converged: bool,
}

/// Conjugate gradients for symmetric positive definite systems. Stops when
/// the 2-norm residual drops to `target` (absolute). `x` carries the initial
/// guess in and the solution out. The recurrence residual is refreshed
/// against the true residual periodically so long runs cannot drift.
pub(crate) fn conjugate_gradient(
    op: &impl LinOp,
    b: &[f64],
    x: &mut [f64],
    target: f64,
    max_iters: usize,
) -> KrylovOutcome {
    let n = op.dim();
    debug_assert_eq!(b.len(), n);
    debug_assert_eq!(x.len(), n);

    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    op.apply(x, &mut r);
    for k in 0..n {
        r[k] = b[k] - r[k];
    }
    let mut p = r.clone();
    let mut rr = dot(&r, &r);

    if rr.sqrt() <= target {
        return KrylovOutcome { iterations: 0, residual_l2: rr.sqrt(), converged: true };
    }

    // Refresh-to-refresh stall watch. Once rounding dominates, the true
    // residual stops shrinking no matter how many sweeps follow; two
    // consecutive refreshes without a 10% drop end the run early instead of
    // burning the whole iteration budget. The caller sees converged = false
    // and decides whether the reached level is acceptable.
    let mut last_refresh = f64::INFINITY;
    let mut flat_refreshes = 0u32;

    for it in 1..=max_iters {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            // Lost positive definiteness numerically; report what we have.
            return KrylovOutcome { iterations: it, residual_l2: rr.sqrt(), converged: false };
        }
        let alpha = rr / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
        }
        if it % 64 == 0 {
            op.apply(x, &mut r);
            for k in 0..n {
                r[k] = b[k] - r[k];
            }
            let tr = norm2(&r);
            if tr > target {
                if tr >= 0.9 * last_refresh {
                    flat_refreshes += 1;
                    if flat_refreshes >= 2 {
                        return KrylovOutcome { iterations: it, residual_l2: tr, converged: false };
                    }
                } else {
                    flat_refreshes = 0;
                }
                last_refresh = tr;
            }
        } else {
            for k in 0..n {
                r[k] -= alpha * ap[k];
            }
        }
        let rr_next = dot(&r, &r);
        if rr_next.sqrt() <= target {
            return KrylovOutcome { iterations: it, residual_l2: rr_next.sqrt(), converged: true };
        }
        let beta = rr_next / rr;
        rr = rr_next;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
    }
    KrylovOutcome { iterations: max_iters, residual_l2: rr.sqrt(), converged: false }
}

/// Sparse matrix stored row-wise as (column, value) pairs. Duplicate entries
/// in a row are allowed and sum on application.
#[derive(Debug, Clone)]
pub(crate) struct SparseRows {
    pub n: usize,
    pub rows: Vec<Vec<(u32, f64)>>,
}

impl SparseRows {
    pub fn new(n: usize) -> Self {
        SparseRows { n, rows: vec![Vec::new(); n] }
    }

    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        self.rows[row].push((col as u32, val));
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                if c as usize == r {
                    d[r] += v;
                }
            }
        }
        d
    }

    /// Adds `eps` times the identity in place.
    pub fn shift_diagonal(&mut self, eps: f64) {
        for r in 0..self.n {
            self.rows[r].push((r as u32, eps));
        }
    }
}

impl LinOp for SparseRows {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc = 0.0;
            for &(c, v) in row {
                acc += v * x[c as usize];
            }
            y[r] = acc;
        }
    }
}

/// BiCGSTAB with Jacobi preconditioning for the nonsymmetric Newton systems.
/// Starts from `x = 0`. Returns a non-converged outcome on breakdown instead
/// of erroring; the caller decides whether a partial step is still useful.
pub(crate) fn bicgstab(
    op: &impl LinOp,
    b: &[f64],
    x: &mut [f64],
    inv_diag: &[f64],
    target: f64,
    max_iters: usize,
) -> KrylovOutcome {
    let n = op.dim();
    x.iter_mut().for_each(|v| *v = 0.0);

    let mut r = b.to_vec();
    let r_hat = r.clone();
    let mut rho = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut t = vec![0.0; n];

    let mut res = norm2(&r);
    if res <= target {
        return KrylovOutcome { iterations: 0, residual_l2: res, converged: true };
    }
    let breakdown = 1e-300;

    for it in 1..=max_iters {
        let rho_next = dot(&r_hat, &r);
        if rho_next.abs() < breakdown || !rho_next.is_finite() {
            return KrylovOutcome { iterations: it, residual_l2: res, converged: false };
        }
        let beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        for k in 0..n {
            phat[k] = p[k] * inv_diag[k];
        }
        op.apply(&phat, &mut v);
        let rhv = dot(&r_hat, &v);
        if rhv.abs() < breakdown || !rhv.is_finite() {
            return KrylovOutcome { iterations: it, residual_l2: res, converged: false };
        }
        alpha = rho / rhv;
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        let sn = norm2(&s);
        if sn <= target {
            for k in 0..n {
                x[k] += alpha * phat[k];
            }
            return KrylovOutcome { iterations: it, residual_l2: sn, converged: true };
        }
        for k in 0..n {
            shat[k] = s[k] * inv_diag[k];
        }
        op.apply(&shat, &mut t);
        let tt = dot(&t, &t);
        if tt < breakdown || !tt.is_finite() {
            return KrylovOutcome { iterations: it, residual_l2: sn, converged: false };
        }
        omega = dot(&t, &s) / tt;
        if omega.abs() < breakdown {
            return KrylovOutcome { iterations: it, residual_l2: sn, converged: false };
        }
        for k in 0..n {
            x[k] += alpha * phat[k] + omega * shat[k];
            r[k] = s[k] - omega * t[k];
        }
        res = norm2(&r);
        if !res.is_finite() {
            return KrylovOutcome { iterations: it, residual_l2: f64::INFINITY, converged: false };
        }
        if res <= target {
            return KrylovOutcome { iterations: it, residual_l2: res, converged: true };
        }
    }
    KrylovOutcome { iterations: max_iters, residual_l2: res, converged: false }
}
