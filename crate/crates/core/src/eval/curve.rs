//! Learning-curve protocol: for each training-set fraction, draw a fixed
//! number of random subsets and train/evaluate each a fixed number of
//! times; report the mean and a 95% confidence interval over all scores.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::sigtest::shuffle_seed;
use crate::error::{DeidError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub mean: f64,
    /// Half-width of the 95% confidence interval (t-distribution).
    pub ci95: f64,
    /// All raw scores, `samples × runs` of them.
    pub scores: Vec<f64>,
}

impl CurvePoint {
    fn from_scores(fraction: f64, scores: Vec<f64>) -> Self {
        let n = scores.len() as f64;
        let mean = scores.iter().sum::<f64>() / n;
        let ci95 = if scores.len() > 1 {
            let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
            let sd = var.sqrt();
            if sd > 0.0 {
                let t = StudentsT::new(0.0, 1.0, n - 1.0)
                    .expect("valid dof")
                    .inverse_cdf(0.975);
                t * sd / n.sqrt()
            } else {
                0.0
            }
        } else {
            0.0
        };
        CurvePoint { fraction, mean, ci95, scores }
    }
}

/// Run the curve protocol over a pool of training units (sentences).
///
/// `train_eval(subset, run_seed)` trains one model on the subset and
/// returns its test score. The subset preserves pool order; at fraction
/// 1.0 every sample is the whole pool, so variance comes from the runs
/// alone.
pub fn learning_curve<T: Clone, F>(
    pool: &[T],
    fractions: &[f64],
    samples: usize,
    runs: usize,
    seed: u64,
    mut train_eval: F,
) -> Result<Vec<CurvePoint>>
where
    F: FnMut(&[T], u64) -> Result<f64>,
{
    if pool.is_empty() {
        return Err(DeidError::data("learning curve needs a non-empty training pool"));
    }
    if samples == 0 || runs == 0 {
        return Err(DeidError::config("samples and runs must be positive"));
    }
    let mut points = Vec::with_capacity(fractions.len());
    for (fi, &fraction) in fractions.iter().enumerate() {
        if !(0.0..=1.0).contains(&fraction) || fraction <= 0.0 {
            return Err(DeidError::config(format!(
                "fraction must be in (0, 1], got {fraction}"
            )));
        }
        let k = (fraction * pool.len() as f64).floor() as usize;
        if k == 0 {
            return Err(DeidError::data(format!(
                "fraction {fraction} of {} units yields an empty subset",
                pool.len()
            )));
        }
        let mut scores = Vec::with_capacity(samples * runs);
        for sample in 0..samples {
            let sample_seed = shuffle_seed(seed, (fi * samples + sample) as u64);
            let mut indices: Vec<usize> = (0..pool.len()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
            indices.shuffle(&mut rng);
            indices.truncate(k);
            indices.sort_unstable();
            let subset: Vec<T> = indices.iter().map(|&i| pool[i].clone()).collect();
            for run in 0..runs {
                let run_seed = shuffle_seed(
                    seed ^ 0xC0FF_EE00,
                    ((fi * samples + sample) * runs + run) as u64,
                );
                scores.push(train_eval(&subset, run_seed)?);
            }
        }
        points.push(CurvePoint::from_scores(fraction, scores));
    }
    Ok(points)
}

/// Curve points as CSV: fraction, mean, ci95, then the raw run scores.
pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let n_scores = points.iter().map(|p| p.scores.len()).max().unwrap_or(0);
    let mut out = String::from("fraction,mean,ci95");
    for i in 0..n_scores {
        out.push_str(&format!(",score{}", i + 1));
    }
    out.push('\n');
    for p in points {
        out.push_str(&format!("{},{},{}", p.fraction, p.mean, p.ci95));
        for s in &p.scores {
            out.push_str(&format!(",{s}"));
        }
        out.push('\n');
    }
    out
}
