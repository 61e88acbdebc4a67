//! Orthant-wise limited-memory quasi-Newton minimization.
//!
//! Minimizes `s(x) + c1·‖x‖₁` given a callback for the smooth part
//! `s` and its gradient. With `c1 = 0` this reduces to plain LBFGS with
//! backtracking line search. The orthant projection produces exact zeros
//! in the solution, which is the point of using it for L1.

use std::collections::VecDeque;

use crate::error::{DeidError, Result};

#[derive(Debug, Clone)]
pub struct OwlQnOptions {
    pub c1: f64,
    /// Number of (s, y) pairs kept for the two-loop recursion.
    pub memory: usize,
    pub max_iterations: usize,
    /// Relative objective-change convergence threshold.
    pub tolerance: f64,
    pub armijo: f64,
    pub max_backtracks: u32,
}

impl Default for OwlQnOptions {
    fn default() -> Self {
        OwlQnOptions {
            c1: 0.0,
            memory: 10,
            max_iterations: 200,
            tolerance: 1e-6,
            armijo: 1e-4,
            max_backtracks: 40,
        }
    }
}

/// One accepted optimizer step.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub step: f64,
}

fn l1_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pseudo-gradient of `s(x) + c1·‖x‖₁`: the steepest-descent direction
/// of the non-smooth objective.
fn pseudo_gradient(x: &[f64], grad: &[f64], c1: f64) -> Vec<f64> {
    if c1 == 0.0 {
        return grad.to_vec();
    }
    x.iter()
        .zip(grad)
        .map(|(&xi, &gi)| {
            if xi > 0.0 {
                gi + c1
            } else if xi < 0.0 {
                gi - c1
            } else if gi + c1 < 0.0 {
                gi + c1
            } else if gi - c1 > 0.0 {
                gi - c1
            } else {
                0.0
            }
        })
        .collect()
}

/// Two-loop recursion: `d = -H·pg` with implicit LBFGS Hessian.
fn two_loop(history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>, pg: &[f64]) -> Vec<f64> {
    let mut q: Vec<f64> = pg.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let sy = dot(s, y);
        let yy = dot(y, y);
        if yy > 0.0 {
            let gamma = sy / yy;
            for qi in q.iter_mut() {
                *qi *= gamma;
            }
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    for qi in q.iter_mut() {
        *qi = -*qi;
    }
    q
}

/// Minimize; returns the solution and the per-iteration objective trace.
///
/// `smooth` evaluates the smooth part of the objective and its gradient.
pub fn minimize<F>(
    mut smooth: F,
    x0: Vec<f64>,
    opts: &OwlQnOptions,
) -> Result<(Vec<f64>, Vec<IterationRecord>)>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let c1 = opts.c1;
    let mut x = x0;
    let (mut sv, mut grad) = smooth(&x);
    let mut f = sv + c1 * l1_norm(&x);
    if !f.is_finite() {
        return Err(DeidError::data(format!(
            "non-finite objective at the initial point: {f}"
        )));
    }

    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut records = Vec::new();

    for iteration in 0..opts.max_iterations {
        let pg = pseudo_gradient(&x, &grad, c1);
        let pg_inf = pg.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if pg_inf < 1e-10 {
            break;
        }

        let mut d = two_loop(&history, &pg);
        if c1 > 0.0 {
            // the direction must stay in the orthant the pseudo-gradient
            // points into
            for (di, pgi) in d.iter_mut().zip(&pg) {
                if *di * *pgi >= 0.0 {
                    *di = 0.0;
                }
            }
        }
        let mut dir_deriv = dot(&pg, &d);
        if dir_deriv >= 0.0 {
            d = pg.iter().map(|g| -g).collect();
            dir_deriv = -dot(&pg, &pg);
            if dir_deriv >= 0.0 {
                break;
            }
        }

        // orthant to project onto during the line search
        let orthant: Vec<f64> = x
            .iter()
            .zip(&pg)
            .map(|(&xi, &pgi)| if xi != 0.0 { xi.signum() } else { -pgi.signum() })
            .collect();

        let d_norm = dot(&d, &d).sqrt();
        let mut step = if iteration == 0 && d_norm > 1.0 { 1.0 / d_norm } else { 1.0 };

        let mut accepted = false;
        for _ in 0..opts.max_backtracks {
            let mut x_new: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            if c1 > 0.0 {
                for (xi, oi) in x_new.iter_mut().zip(&orthant) {
                    if *xi * *oi <= 0.0 {
                        *xi = 0.0;
                    }
                }
            }
            let (sv_new, grad_new) = smooth(&x_new);
            let f_new = sv_new + c1 * l1_norm(&x_new);
            if !f_new.is_finite() {
                return Err(DeidError::data(format!(
                    "non-finite objective during line search (step {step})"
                )));
            }
            let delta: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let expected = dot(&pg, &delta);
            if f_new <= f + opts.armijo * expected && f_new <= f {
                let s = delta;
                let yv: Vec<f64> = grad_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &yv);
                if sy > 1e-10 {
                    if history.len() == opts.memory {
                        history.pop_front();
                    }
                    history.push_back((s, yv, 1.0 / sy));
                }
                let f_prev = f;
                x = x_new;
                sv = sv_new;
                grad = grad_new;
                f = f_new;
                records.push(IterationRecord {
                    iteration,
                    objective: f,
                    step,
                });
                accepted = true;
                let rel = (f_prev - f).abs() / f_prev.abs().max(1.0);
                if rel < opts.tolerance {
                    return Ok((x, records));
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break; // line search exhausted: no further progress possible
        }
    }
    let _ = sv;
    Ok((x, records))
}
