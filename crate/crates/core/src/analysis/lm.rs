//! Levenberg–Marquardt least squares with a central-difference Jacobian.

use super::AnalysisError;

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iterations: usize,
    pub initial_damping: f64,
    /// Relative Jacobian step, multiplied by each parameter's scale.
    pub jacobian_step: f64,
    /// Converged once the relative cost decrease of an accepted step falls
    /// below this.
    pub cost_tolerance: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            initial_damping: 1e-3,
            jacobian_step: 1e-6,
            cost_tolerance: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmResult {
    pub params: Vec<f64>,
    /// `‖r‖₂` at `params`.
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Minimizes `‖r(p)‖²`. `residuals(p, out)` fills `out` (length `m`).
/// `scales` sets the characteristic magnitude of each parameter; the
/// Jacobian step for parameter k is `jacobian_step · max(|p_k|, scales[k])`.
pub fn minimize<F>(mut residuals: F, p0: &[f64], scales: &[f64], m: usize, opts: LmOptions) -> Result<LmResult, AnalysisError>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = p0.len();
    if scales.len() != n || m < n || n == 0 {
        return Err(AnalysisError::InvalidInput(format!(
            "{n} parameters, {} scales, {m} residuals",
            scales.len()
        )));
    }
    let mut p = p0.to_vec();
    let mut r = vec![0.0; m];
    residuals(&p, &mut r);
    let mut cost = sum_sq(&r);
    if !cost.is_finite() {
        return Err(AnalysisError::FitDiverged("non-finite residual at the initial point".into()));
    }
    let mut lambda = opts.initial_damping;
    let mut jac = vec![0.0; m * n];
    let (mut rp, mut rm) = (vec![0.0; m], vec![0.0; m]);
    let mut trial = vec![0.0; m];

    for iter in 1..=opts.max_iterations {
        // Jacobian, column k stored as jac[i * n + k].
        for k in 0..n {
            let h = opts.jacobian_step * p[k].abs().max(scales[k]);
            let orig = p[k];
            p[k] = orig + h;
            residuals(&p, &mut rp);
            p[k] = orig - h;
            residuals(&p, &mut rm);
            p[k] = orig;
            for i in 0..m {
                jac[i * n + k] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let mut jtj = vec![0.0; n * n];
        let mut jtr = vec![0.0; n];
        for i in 0..m {
            let row = &jac[i * n..(i + 1) * n];
            for a in 0..n {
                jtr[a] += row[a] * r[i];
                for b in a..n {
                    jtj[a * n + b] += row[a] * row[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                jtj[a * n + b] = jtj[b * n + a];
            }
        }

        loop {
            let mut lhs = jtj.clone();
            for a in 0..n {
                let d = jtj[a * n + a];
                lhs[a * n + a] += lambda * if d > 0.0 { d } else { 1.0 };
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let step = solve_real(&mut lhs, rhs, n);
            if let Some(step) = step {
                let cand: Vec<f64> = p.iter().zip(&step).map(|(a, b)| a + b).collect();
                residuals(&cand, &mut trial);
                let new_cost = sum_sq(&trial);
                if new_cost.is_finite() && new_cost < cost {
                    let rel = (cost - new_cost) / cost.max(f64::MIN_POSITIVE);
                    p = cand;
                    std::mem::swap(&mut r, &mut trial);
                    cost = new_cost;
                    lambda = (lambda / 10.0).max(1e-15);
                    if rel < opts.cost_tolerance || cost == 0.0 {
                        return Ok(done(p, cost, iter));
                    }
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                // No descent direction left: a stationary point.
                return Ok(done(p, cost, iter));
            }
        }
    }
    Err(AnalysisError::FitDiverged(format!(
        "no convergence within {} iterations (cost {cost:e})",
        opts.max_iterations
    )))
}

fn done(params: Vec<f64>, cost: f64, iterations: usize) -> LmResult {
    LmResult {
        params,
        residual_norm: cost.sqrt(),
        iterations,
    }
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Gaussian elimination with partial pivoting on a dense row-major system.
fn solve_real(a: &mut [f64], mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-300 || !a[piv * n + col].is_finite() {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for i in col + 1..n {
            let f = a[i * n + col] / a[col * n + col];
            for k in col..n {
                a[i * n + k] -= f * a[col * n + k];
            }
            b[i] -= f * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    b.iter().all(|v| v.is_finite()).then_some(b)
}
