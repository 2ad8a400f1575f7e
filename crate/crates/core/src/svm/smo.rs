//! Two-coefficient SMO for the binary soft-margin dual
//!
//! ```text
//! min  ½ αᵀQα − eᵀα    s.t.  0 ≤ α ≤ C,  yᵀα = 0,    Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! The working pair is the maximal violating pair: `i` maximizes `-y_t G_t`
//! over the coefficients that may still move up, `j` minimizes it over those
//! that may move down. Since `-y_t G_t = b - E_t` (with `E_t` the prediction
//! error), this is the first-order choice that maximizes `|E_i − E_j|` among
//! feasible pairs. Iteration stops once `m(α) − M(α) ≤ tol`, i.e. the KKT
//! conditions hold to within `tol`.

use super::kernel::KernelRows;
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BinarySolution {
    pub alpha: Vec<f64>,
    /// Decision function is `Σ α_i y_i K(x_i, x) + bias`.
    pub bias: f64,
    /// Gradient of the minimized dual objective at `alpha`.
    pub gradient: Vec<f64>,
    /// Final maximal KKT violation `m(α) − M(α)`.
    pub violation: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BinarySolution {
    /// Dual objective in maximization form, `Σ α − ½ αᵀQα`, recovered from the
    /// gradient: `αᵀQα = αᵀ(G + e)`.
    pub fn dual_objective(&self) -> f64 {
        let sum: f64 = self.alpha.iter().sum();
        let quad: f64 = self.alpha.iter().zip(&self.gradient).map(|(a, g)| a * (g + 1.0)).sum();
        sum - 0.5 * quad
    }

    /// Fitted decision value of every training sample.
    pub fn fitted(&self, y: &[i8]) -> Vec<f64> {
        self.gradient
            .iter()
            .zip(y)
            .map(|(&g, &yi)| f64::from(yi) * (g + 1.0) + self.bias)
            .collect()
    }
}

fn in_up(alpha: f64, y: i8, c: f64) -> bool {
    (y > 0 && alpha < c) || (y < 0 && alpha > 0.0)
}

fn in_low(alpha: f64, y: i8, c: f64) -> bool {
    (y > 0 && alpha > 0.0) || (y < 0 && alpha < c)
}

/// Returns `(i, m, j, M)` of the maximal violating pair.
fn violating_pair(alpha: &[f64], y: &[i8], grad: &[f64], c: f64) -> (Option<usize>, f64, Option<usize>, f64) {
    let (mut i, mut m) = (None, f64::NEG_INFINITY);
    let (mut j, mut big_m) = (None, f64::INFINITY);
    for t in 0..alpha.len() {
        let v = -f64::from(y[t]) * grad[t];
        if in_up(alpha[t], y[t], c) && v > m {
            m = v;
            i = Some(t);
        }
        if in_low(alpha[t], y[t], c) && v < big_m {
            big_m = v;
            j = Some(t);
        }
    }
    (i, m, j, big_m)
}

/// Solves one binary problem; labels must be ±1 with both signs present.
pub fn solve_binary(
    samples: &[Vec<f64>],
    y: &[i8],
    c: f64,
    gamma: f64,
    tol: f64,
    max_iterations: usize,
) -> Result<BinarySolution> {
    let n = samples.len();
    if n != y.len() {
        return Err(Error::LengthMismatch { left: n, right: y.len() });
    }
    if !y.iter().all(|&v| v == 1 || v == -1) {
        return Err(Error::InvalidParameter("binary labels must be +1 or -1".into()));
    }
    if !(y.contains(&1) && y.contains(&-1)) {
        return Err(Error::DegenerateGroundTruth(1));
    }
    let mut kernel = KernelRows::new(samples, gamma);
    let diag: Vec<f64> = (0..n).map(|i| kernel.row(i)[i]).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut violation = f64::INFINITY;

    while iterations < max_iterations {
        let (i, m, j, big_m) = violating_pair(&alpha, y, &grad, c);
        violation = m - big_m;
        let (Some(i), Some(j)) = (i, j) else {
            converged = true;
            violation = 0.0;
            break;
        };
        if violation <= tol {
            converged = true;
            break;
        }
        iterations += 1;

        let k_ij = kernel.row(i)[j];
        let quad = {
            let q = diag[i] + diag[j] - 2.0 * k_ij;
            if q > 0.0 { q } else { TAU }
        };
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }

        let d_i = (alpha[i] - old_i) * f64::from(y[i]);
        let d_j = (alpha[j] - old_j) * f64::from(y[j]);
        let row_i = kernel.row(i).to_vec();
        let row_j = kernel.row(j);
        for t in 0..n {
            grad[t] += f64::from(y[t]) * (row_i[t] * d_i + row_j[t] * d_j);
        }
    }
    if !converged {
        log::warn!("SMO stopped after {iterations} iterations with KKT violation {violation:.3e}");
    }

    Ok(BinarySolution {
        bias: bias(&alpha, y, &grad, c),
        alpha,
        gradient: grad,
        violation,
        iterations,
        converged,
    })
}

/// Average of `-y_i G_i` over free coefficients; midpoint of the feasible
/// interval when none is free.
fn bias(alpha: &[f64], y: &[i8], grad: &[f64], c: f64) -> f64 {
    let (mut upper, mut lower) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..alpha.len() {
        let yg = f64::from(y[t]) * grad[t];
        let at_upper = alpha[t] >= c;
        let at_lower = alpha[t] <= 0.0;
        if at_upper {
            if y[t] < 0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if at_lower {
            if y[t] > 0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 { sum_free / free as f64 } else { (upper + lower) / 2.0 };
    -rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svm::kernel::rbf_unchecked;

    fn check_dual_feasibility(sol: &BinarySolution, y: &[i8], c: f64) {
        assert!(sol.alpha.iter().all(|&a| (0.0..=c).contains(&a)));
        let balance: f64 = sol.alpha.iter().zip(y).map(|(a, &yi)| a * f64::from(yi)).sum();
        assert!(balance.abs() < 1e-9, "Σ α y = {balance}");
    }

    #[test]
    fn two_points_have_closed_form_solution() {
        // Dual for one point per class: α1 = α2 = a maximizing 2a − a²(1 − K).
        let x = vec![vec![0.0], vec![1.0]];
        let y = [1, -1];
        let gamma = 0.8;
        let k = (-gamma as f64).exp();
        let sol = solve_binary(&x, &y, 100.0, gamma, 1e-10, 10_000).unwrap();
        let a = 1.0 / (1.0 - k);
        assert!((sol.alpha[0] - a).abs() < 1e-9);
        assert!((sol.alpha[1] - a).abs() < 1e-9);
        assert_eq!(sol.bias, 0.0);
        assert!((sol.dual_objective() - a).abs() < 1e-9);
        check_dual_feasibility(&sol, &y, 100.0);
    }

    #[test]
    fn box_constraint_binds_for_small_c() {
        let x = vec![vec![0.0], vec![0.1], vec![0.05]];
        let y = [1, -1, 1];
        let sol = solve_binary(&x, &y, 0.5, 1.0, 1e-8, 10_000).unwrap();
        assert!(sol.converged);
        check_dual_feasibility(&sol, &y, 0.5);
        assert!(sol.alpha.iter().any(|&a| a == 0.5));
    }

    #[test]
    fn xor_points_are_separated() {
        let x = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        let y = [1, 1, -1, -1];
        let sol = solve_binary(&x, &y, 100.0, 1.0, 1e-6, 10_000).unwrap();
        assert!(sol.converged);
        for (f, &yi) in sol.fitted(&y).iter().zip(&y) {
            assert!(f * f64::from(yi) > 0.0);
        }
        // Fitted values agree with direct kernel expansion.
        for i in 0..4 {
            let direct: f64 = (0..4)
                .map(|j| sol.alpha[j] * f64::from(y[j]) * rbf_unchecked(&x[j], &x[i], 1.0))
                .sum::<f64>()
                + sol.bias;
            assert!((direct - sol.fitted(&y)[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn kkt_holds_at_convergence() {
        let mut rng = crate::rng::ShiftRng::new(17);
        let x: Vec<Vec<f64>> = (0..60).map(|_| vec![rng.uniform(), rng.uniform(), rng.uniform()]).collect();
        let y: Vec<i8> = x.iter().map(|p| if p[0] + 0.3 * rng.normal() > 0.5 { 1 } else { -1 }).collect();
        let c = 5.0;
        let tol = 1e-4;
        let sol = solve_binary(&x, &y, c, 2.0, tol, 100_000).unwrap();
        assert!(sol.converged);
        assert!(sol.violation <= tol);
        check_dual_feasibility(&sol, &y, c);
        // Complementary slackness on margins, up to tol.
        let f = sol.fitted(&y);
        for t in 0..x.len() {
            let margin = f64::from(y[t]) * f[t];
            if sol.alpha[t] == 0.0 {
                assert!(margin >= 1.0 - tol);
            } else if sol.alpha[t] == c {
                assert!(margin <= 1.0 + tol);
            } else {
                assert!((margin - 1.0).abs() <= tol);
            }
        }
    }

    #[test]
    fn rejects_bad_labels() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(solve_binary(&x, &[1, 1], 1.0, 1.0, 1e-3, 100).is_err());
        assert!(solve_binary(&x, &[1, 0], 1.0, 1.0, 1e-3, 100).is_err());
        assert!(solve_binary(&x, &[1], 1.0, 1.0, 1e-3, 100).is_err());
    }
}
