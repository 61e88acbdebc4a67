//! Linear-chain inference: forward-backward marginals and Viterbi
//! decoding, all in log space.
//!
//! A path through labels `y_1..y_T` scores
//! `begin(y_1) + Σ emit(t, y_t) + Σ trans(y_{t-1}, y_t) + end(y_T)`.

use super::model::CrfWeights;

pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Emission score table, `T × L` row-major.
pub fn emission_scores(weights: &CrfWeights, feats: &[Vec<u32>]) -> Vec<f64> {
    let n_labels = weights.n_labels;
    let mut scores = vec![0.0; feats.len() * n_labels];
    for (t, fs) in feats.iter().enumerate() {
        let row = &mut scores[t * n_labels..(t + 1) * n_labels];
        for &f in fs {
            let base = f as usize * n_labels;
            for (y, s) in row.iter_mut().enumerate() {
                *s += weights.w[base + y];
            }
        }
    }
    scores
}

/// Score of one specific path.
pub fn path_score(weights: &CrfWeights, feats: &[Vec<u32>], labels: &[usize]) -> f64 {
    assert_eq!(feats.len(), labels.len());
    if labels.is_empty() {
        return 0.0;
    }
    let mut s = weights.begin(labels[0]) + weights.end(labels[labels.len() - 1]);
    for (t, &y) in labels.iter().enumerate() {
        for &f in &feats[t] {
            s += weights.emit(f, y);
        }
        if t > 0 {
            s += weights.trans(labels[t - 1], y);
        }
    }
    s
}

/// Forward-backward results: log-partition, per-position label
/// distributions and pairwise transition marginals.
#[derive(Debug, Clone)]
pub struct Marginals {
    pub log_partition: f64,
    /// `unary[t][y] = P(y_t = y)`
    pub unary: Vec<Vec<f64>>,
    /// `pairwise[t][y * L + y2] = P(y_t = y, y_{t+1} = y2)`, length `T-1`
    pub pairwise: Vec<Vec<f64>>,
}

pub fn forward_backward(weights: &CrfWeights, feats: &[Vec<u32>]) -> Marginals {
    let big_t = feats.len();
    let n = weights.n_labels;
    if big_t == 0 {
        return Marginals {
            log_partition: 0.0,
            unary: vec![],
            pairwise: vec![],
        };
    }
    let emit = emission_scores(weights, feats);

    // forward
    let mut alpha = vec![0.0f64; big_t * n];
    for y in 0..n {
        alpha[y] = weights.begin(y) + emit[y];
    }
    let mut scratch = vec![0.0f64; n];
    for t in 1..big_t {
        for y in 0..n {
            for (y_prev, s) in scratch.iter_mut().enumerate() {
                *s = alpha[(t - 1) * n + y_prev] + weights.trans(y_prev, y);
            }
            alpha[t * n + y] = emit[t * n + y] + logsumexp(&scratch);
        }
    }
    for (y, s) in scratch.iter_mut().enumerate() {
        *s = alpha[(big_t - 1) * n + y] + weights.end(y);
    }
    let log_partition = logsumexp(&scratch);

    // backward
    let mut beta = vec![0.0f64; big_t * n];
    for y in 0..n {
        beta[(big_t - 1) * n + y] = weights.end(y);
    }
    for t in (0..big_t - 1).rev() {
        for y in 0..n {
            for (y_next, s) in scratch.iter_mut().enumerate() {
                *s = weights.trans(y, y_next) + emit[(t + 1) * n + y_next] + beta[(t + 1) * n + y_next];
            }
            beta[t * n + y] = logsumexp(&scratch);
        }
    }

    let unary: Vec<Vec<f64>> = (0..big_t)
        .map(|t| {
            (0..n)
                .map(|y| (alpha[t * n + y] + beta[t * n + y] - log_partition).exp())
                .collect()
        })
        .collect();

    let pairwise: Vec<Vec<f64>> = (0..big_t.saturating_sub(1))
        .map(|t| {
            let mut m = vec![0.0; n * n];
            for y in 0..n {
                for y2 in 0..n {
                    m[y * n + y2] = (alpha[t * n + y]
                        + weights.trans(y, y2)
                        + emit[(t + 1) * n + y2]
                        + beta[(t + 1) * n + y2]
                        - log_partition)
                        .exp();
                }
            }
            m
        })
        .collect();

    Marginals {
        log_partition,
        unary,
        pairwise,
    }
}

/// Highest-scoring label sequence. Ties break toward the lower label
/// index, so all-zero weights decode to label 0 everywhere.
pub fn viterbi(weights: &CrfWeights, feats: &[Vec<u32>]) -> Vec<usize> {
    let big_t = feats.len();
    let n = weights.n_labels;
    if big_t == 0 {
        return vec![];
    }
    let emit = emission_scores(weights, feats);

    let mut delta = vec![f64::NEG_INFINITY; big_t * n];
    let mut back = vec![0usize; big_t * n];
    for y in 0..n {
        delta[y] = weights.begin(y) + emit[y];
    }
    for t in 1..big_t {
        for y in 0..n {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for y_prev in 0..n {
                let s = delta[(t - 1) * n + y_prev] + weights.trans(y_prev, y);
                if s > best {
                    best = s;
                    arg = y_prev;
                }
            }
            delta[t * n + y] = best + emit[t * n + y];
            back[t * n + y] = arg;
        }
    }

    let mut best = f64::NEG_INFINITY;
    let mut last = 0;
    for y in 0..n {
        let s = delta[(big_t - 1) * n + y] + weights.end(y);
        if s > best {
            best = s;
            last = y;
        }
    }

    let mut path = vec![0usize; big_t];
    path[big_t - 1] = last;
    for t in (1..big_t).rev() {
        path[t - 1] = back[t * n + path[t]];
    }
    path
}
