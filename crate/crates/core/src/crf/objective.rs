//! Conditional negative log-likelihood and its gradient.
//!
//! The training objective is `Σ NLL + c1·‖w‖₁ + c2·‖w‖₂²`. The gradient
//! returned here covers the smooth part only (`NLL + L2`); the L1 term is
//! handled by the orthant-wise optimizer and is never differentiated.

use super::inference::{forward_backward, path_score};
use super::model::CrfWeights;

/// One training sequence: indexed features and gold label indices.
#[derive(Debug, Clone)]
pub struct Instance {
    pub feats: Vec<Vec<u32>>,
    pub labels: Vec<usize>,
}

/// NLL of the batch plus its gradient (expected minus empirical feature
/// counts), without any regularization.
pub fn nll_and_grad_raw(weights: &CrfWeights, batch: &[Instance]) -> (f64, Vec<f64>) {
    let mut value = 0.0;
    let mut grad = vec![0.0f64; weights.len()];
    let n = weights.n_labels;

    for inst in batch {
        let big_t = inst.feats.len();
        debug_assert_eq!(big_t, inst.labels.len());
        if big_t == 0 {
            continue;
        }
        let m = forward_backward(weights, &inst.feats);
        value += m.log_partition - path_score(weights, &inst.feats, &inst.labels);

        // expected counts
        for (t, fs) in inst.feats.iter().enumerate() {
            for &f in fs {
                let base = weights.emit_index(f, 0);
                for y in 0..n {
                    grad[base + y] += m.unary[t][y];
                }
            }
        }
        for (t, pw) in m.pairwise.iter().enumerate() {
            let _ = t;
            for y in 0..n {
                for y2 in 0..n {
                    grad[weights.trans_index(y, y2)] += pw[y * n + y2];
                }
            }
        }
        for y in 0..n {
            grad[weights.begin_index(y)] += m.unary[0][y];
            grad[weights.end_index(y)] += m.unary[big_t - 1][y];
        }

        // empirical counts
        for (t, &y) in inst.labels.iter().enumerate() {
            for &f in &inst.feats[t] {
                grad[weights.emit_index(f, y)] -= 1.0;
            }
            if t > 0 {
                grad[weights.trans_index(inst.labels[t - 1], y)] -= 1.0;
            }
        }
        grad[weights.begin_index(inst.labels[0])] -= 1.0;
        grad[weights.end_index(inst.labels[big_t - 1])] -= 1.0;
    }
    (value, grad)
}

/// Full objective value (`Σ NLL + c1·‖w‖₁ + c2·‖w‖₂²`) and the gradient of
/// its smooth part (`NLL + L2` only).
pub fn nll_and_gradient(
    weights: &CrfWeights,
    batch: &[Instance],
    c1: f64,
    c2: f64,
) -> (f64, Vec<f64>) {
    let (nll, mut grad) = nll_and_grad_raw(weights, batch);
    let mut value = nll;
    if c2 != 0.0 {
        let mut sq = 0.0;
        for (g, &w) in grad.iter_mut().zip(&weights.w) {
            *g += 2.0 * c2 * w;
            sq += w * w;
        }
        value += c2 * sq;
    }
    if c1 != 0.0 {
        value += c1 * weights.w.iter().map(|w| w.abs()).sum::<f64>();
    }
    (value, grad)
}
