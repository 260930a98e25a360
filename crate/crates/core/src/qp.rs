//! Convex quadratic programs over the probability simplex.

use nalgebra::{DMatrix, DVector};

/// Minimizes `½ λᵀQλ + bᵀλ` over the probability simplex by Frank–Wolfe
/// with away steps and exact line search. `Q` must be positive semidefinite.
/// Returns the weights and the final duality gap.
pub(crate) fn simplex_qp(q: &DMatrix<f64>, b: &DVector<f64>, gap_tol: f64, max_iter: usize) -> (DVector<f64>, f64) {
    let n = b.len();
    let start = (0..n)
        .min_by(|&i, &j| (0.5 * q[(i, i)] + b[i]).total_cmp(&(0.5 * q[(j, j)] + b[j])))
        .unwrap_or(0);
    let mut lambda = DVector::zeros(n);
    lambda[start] = 1.0;
    let mut ql = q.column(start).into_owned();
    let mut gap = f64::INFINITY;
    for iter in 0..max_iter {
        if iter % 50 == 49 {
            ql = q * &lambda;
        }
        let grad = &ql + b;
        let gl = grad.dot(&lambda);
        let (s, gs) = (0..n)
            .map(|i| (i, grad[i]))
            .fold((0, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
        let (a, ga) = (0..n)
            .filter(|&i| lambda[i] > 0.0)
            .map(|i| (i, grad[i]))
            .fold((0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
        gap = gl - gs;
        if gap <= gap_tol {
            break;
        }
        let lql = ql.dot(&lambda);
        if gl - gs >= ga - gl || lambda[a] >= 1.0 {
            // d = e_s − λ
            let curv = q[(s, s)] - 2.0 * ql[s] + lql;
            let slope = gs - gl;
            let gamma = if curv > 0.0 { (-slope / curv).min(1.0) } else { 1.0 };
            lambda *= 1.0 - gamma;
            lambda[s] += gamma;
            ql = ql * (1.0 - gamma) + q.column(s) * gamma;
        } else {
            // d = λ − e_a
            let curv = lql - 2.0 * ql[a] + q[(a, a)];
            let slope = gl - ga;
            let max_gamma = lambda[a] / (1.0 - lambda[a]);
            let gamma = if curv > 0.0 {
                (-slope / curv).min(max_gamma)
            } else {
                max_gamma
            };
            lambda *= 1.0 + gamma;
            lambda[a] -= gamma;
            if gamma >= max_gamma {
                lambda[a] = 0.0;
            }
            ql = ql * (1.0 + gamma) - q.column(a) * gamma;
        }
    }
    (lambda, gap.max(0.0))
}
