//! Levenberg-Marquardt for small dense least-squares problems, with a
//! backtracking gradient step when the damped normal equations cannot be
//! factored.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmConfig {
    pub max_iters: usize,
    /// Stop once `max |r_i|` falls to this level.
    pub residual_tol: f64,
    /// Stop once `‖h‖ ≤ step_tol (‖x‖ + step_tol)`.
    pub step_tol: f64,
    /// Stop once `‖Jᵀr‖∞` falls to this level.
    pub gradient_tol: f64,
    /// Stop when the cost has dropped by less than `stall_rtol` (relative)
    /// over the last `stall_window` iterations.
    pub stall_window: usize,
    pub stall_rtol: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig {
            max_iters: 500,
            residual_tol: 1e-15,
            step_tol: 1e-15,
            gradient_tol: 1e-20,
            stall_window: 20,
            stall_rtol: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Residual,
    Gradient,
    Step,
    Stagnation,
    MaxIters,
    InvalidStart,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    /// `½‖r‖²` at `x`.
    pub cost: f64,
    pub iterations: usize,
    pub reason: StopReason,
}

/// Minimises `½‖r(x)‖²`. `eval` returns the residuals and the Jacobian rows,
/// or `None` where `r` is undefined; such points are treated as infinitely
/// bad.
pub fn minimize<F>(eval: F, x0: &[f64], cfg: &LmConfig) -> LmOutcome
where
    F: Fn(&[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>)>,
{
    let m = x0.len();
    let Some((mut r, mut jac)) = eval(x0) else {
        return LmOutcome {
            x: x0.to_vec(),
            cost: f64::INFINITY,
            iterations: 0,
            reason: StopReason::InvalidStart,
        };
    };
    let mut x = DVector::from_column_slice(x0);
    let mut cost = half_norm_sq(&r);
    let mut mu = -1.0;
    let mut nu = 2.0;
    let mut it = 0;
    let mut history = std::collections::VecDeque::with_capacity(cfg.stall_window + 1);
    let reason = loop {
        if r.iter().fold(0.0f64, |a, v| a.max(v.abs())) <= cfg.residual_tol {
            break StopReason::Residual;
        }
        if it >= cfg.max_iters {
            break StopReason::MaxIters;
        }
        if cfg.stall_window > 0 {
            history.push_back(cost);
            if history.len() > cfg.stall_window {
                let old = history.pop_front().expect("non-empty");
                if old - cost <= cfg.stall_rtol * old {
                    break StopReason::Stagnation;
                }
            }
        }
        it += 1;
        let j = DMatrix::from_fn(r.len(), m, |i, k| jac[i][k]);
        let rv = DVector::from_column_slice(&r);
        let g = j.transpose() * &rv;
        if g.amax() <= cfg.gradient_tol {
            break StopReason::Gradient;
        }
        let jtj = j.transpose() * &j;
        if mu < 0.0 {
            mu = 1e-3 * (0..m).map(|k| jtj[(k, k)]).fold(0.0, f64::max).max(1e-12);
        }
        let mut damped = jtj.clone();
        for k in 0..m {
            damped[(k, k)] += mu;
        }
        let Some(chol) = damped.cholesky() else {
            match gradient_step(&eval, &x, &g, cost) {
                Some((nx, nr, nj, nc)) => {
                    x = nx;
                    r = nr;
                    jac = nj;
                    cost = nc;
                    mu *= nu;
                    nu *= 2.0;
                    continue;
                }
                None => break StopReason::Stagnation,
            }
        };
        let h = chol.solve(&(-&g));
        if h.norm() <= cfg.step_tol * (x.norm() + cfg.step_tol) {
            break StopReason::Step;
        }
        let candidate = &x + &h;
        let predicted = 0.5 * h.dot(&(mu * &h - &g));
        let trial = eval(candidate.as_slice());
        let new_cost = trial.as_ref().map_or(f64::INFINITY, |(nr, _)| half_norm_sq(nr));
        let rho = if predicted > 0.0 { (cost - new_cost) / predicted } else { -1.0 };
        if rho > 0.0 && new_cost.is_finite() {
            let (nr, nj) = trial.expect("finite cost");
            x = candidate;
            r = nr;
            jac = nj;
            cost = new_cost;
            mu *= (1.0f64 / 3.0).max(1.0 - (2.0 * rho - 1.0).powi(3));
            nu = 2.0;
        } else {
            mu *= nu;
            nu *= 2.0;
            if !mu.is_finite() || mu > 1e30 {
                break StopReason::Stagnation;
            }
        }
    };
    LmOutcome {
        x: x.as_slice().to_vec(),
        cost,
        iterations: it,
        reason,
    }
}

type Step = (DVector<f64>, Vec<f64>, Vec<Vec<f64>>, f64);

fn gradient_step<F>(eval: &F, x: &DVector<f64>, g: &DVector<f64>, cost: f64) -> Option<Step>
where
    F: Fn(&[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>)>,
{
    let gn = g.norm();
    if !(gn > 0.0) {
        return None;
    }
    let mut t = 1.0 / gn;
    for _ in 0..40 {
        let cand = x - t * g;
        if let Some((r, j)) = eval(cand.as_slice()) {
            let c = half_norm_sq(&r);
            // Armijo condition
            if c <= cost - 1e-4 * t * gn * gn {
                return Some((cand, r, j, c));
            }
        }
        t *= 0.5;
    }
    None
}

fn half_norm_sq(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}
