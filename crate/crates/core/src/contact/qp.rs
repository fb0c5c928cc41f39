//! Dense primal active-set solver for small strictly convex quadratic
//! programs with linear inequality constraints:
//!
//! ```text
//!     minimize    1/2 x' H x + g' x
//!     subject to  A x <= b
//! ```
//!
//! Problems here are tiny (<= 6 variables, ~11 constraints), so each working
//! set is solved exactly through a dense KKT factorization rather than with
//! iterative updates. Deterministic: ties break on the lowest constraint
//! index.

use nalgebra::{DMatrix, DVector};

pub const DEFAULT_MAX_ITER: usize = 200;
pub const KKT_TOL: f64 = 1e-10;
/// Tikhonov term on the dual block; keeps the KKT system solvable when the
/// working set picks up linearly dependent rows (e.g. both signs of a bound
/// that collapses to an equality at mu = 0).
const DUAL_REG: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Indices of constraints active at the solution.
    pub active: Vec<usize>,
}

/// Solves `min 1/2 x'Hx + g'x  s.t.  Ax <= b` from the feasible start `x0`.
///
/// `H` must be positive definite on the feasible set. Returns with
/// `converged = false` when the iteration budget runs out.
pub fn solve_qp(
    h: &DMatrix<f64>,
    g: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    x0: DVector<f64>,
    max_iter: usize,
) -> QpSolution {
    let n = g.len();
    let m = b.len();
    debug_assert_eq!(h.nrows(), n);
    debug_assert!(m == 0 || a.ncols() == n);
    let scale = 1.0 + h.amax() + g.amax();

    let mut x = x0;
    let mut working: Vec<usize> = Vec::new();

    for iter in 1..=max_iter {
        // Equality-constrained subproblem on the working set.
        let k = working.len();
        let mut kkt = DMatrix::<f64>::zeros(n + k, n + k);
        kkt.view_mut((0, 0), (n, n)).copy_from(h);
        for (row, &ci) in working.iter().enumerate() {
            for col in 0..n {
                kkt[(n + row, col)] = a[(ci, col)];
                kkt[(col, n + row)] = a[(ci, col)];
            }
            kkt[(n + row, n + row)] = -DUAL_REG;
        }
        let mut rhs = DVector::<f64>::zeros(n + k);
        for i in 0..n {
            rhs[i] = -g[i];
        }
        for (row, &ci) in working.iter().enumerate() {
            rhs[n + row] = b[ci];
        }
        let sol = match kkt.lu().solve(&rhs) {
            Some(s) => s,
            None => {
                // Singular despite regularization: drop the newest constraint.
                working.pop();
                continue;
            }
        };
        let target = sol.rows(0, n).into_owned();
        let lambda = sol.rows(n, k).into_owned();
        let step = &target - &x;

        if step.amax() <= KKT_TOL * scale {
            // At the working-set minimizer; check dual feasibility.
            let mut drop: Option<(usize, f64)> = None;
            for (row, &ci) in working.iter().enumerate() {
                if lambda[row] < -KKT_TOL * scale
                    && drop.is_none_or(|(_, worst)| lambda[row] < worst)
                {
                    drop = Some((ci, lambda[row]));
                }
            }
            match drop {
                None => {
                    return QpSolution {
                        x,
                        iterations: iter,
                        converged: true,
                        active: working,
                    };
                }
                Some((ci, _)) => {
                    working.retain(|&w| w != ci);
                }
            }
        } else {
            // Step toward the subproblem minimizer, stopping at the first
            // blocking constraint outside the working set.
            let mut limit = 1.0f64;
            let mut blocking: Option<usize> = None;
            for ci in 0..m {
                if working.contains(&ci) {
                    continue;
                }
                let rate: f64 = (0..n).map(|j| a[(ci, j)] * step[j]).sum();
                if rate <= 1e-13 * scale {
                    continue;
                }
                let slack: f64 = b[ci] - (0..n).map(|j| a[(ci, j)] * x[j]).sum::<f64>();
                let t = (slack.max(0.0)) / rate;
                if t < limit - 1e-15 {
                    limit = t;
                    blocking = Some(ci);
                }
            }
            x += step * limit;
            if let Some(ci) = blocking {
                working.push(ci);
            }
        }
    }

    QpSolution {
        x,
        iterations: max_iter,
        converged: false,
        active: working,
    }
}
