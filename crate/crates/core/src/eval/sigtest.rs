//! Two-sided approximate randomization test on micro F1.
//!
//! Per shuffle, each document's prediction pair is swapped with
//! probability ½; the statistic is the absolute micro-F1 difference.
//! The p-value uses +1 smoothing: `(hits + 1) / (n + 1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{doc_micro_counts, Score};
use crate::corpus::Document;
use crate::error::{DeidError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigTestResult {
    /// Micro F1 of system A minus system B.
    pub observed_delta: f64,
    pub p_value: f64,
    pub n_shuffles: usize,
    pub seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic per-shuffle seed; shuffles are independent and can run
/// in any order.
pub(crate) fn shuffle_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}

fn micro_f1(counts: impl Iterator<Item = (u64, u64, u64)>) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (a, b, c) in counts {
        tp += a;
        fp += b;
        fn_ += c;
    }
    Score::from_counts(tp, fp, fn_).f1
}

fn align_by_id<'a>(
    gold: &'a [Document],
    pred: &'a [Document],
    side: &str,
) -> Result<Vec<(&'a Document, &'a Document)>> {
    let by_id: std::collections::BTreeMap<&str, &Document> =
        pred.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    if by_id.len() != pred.len() {
        return Err(DeidError::data(format!("duplicate doc_ids in {side} predictions")));
    }
    let mut pairs = Vec::with_capacity(gold.len());
    for g in gold {
        let p = by_id.get(g.doc_id.as_str()).ok_or_else(|| {
            DeidError::data(format!("{side} predictions missing doc {:?}", g.doc_id))
        })?;
        pairs.push((g, *p));
    }
    Ok(pairs)
}

/// Approximate randomization over paired per-document predictions.
pub fn approx_rand_test(
    gold: &[Document],
    pred_a: &[Document],
    pred_b: &[Document],
    n: usize,
    seed: u64,
) -> Result<SigTestResult> {
    if gold.len() < 2 {
        return Err(DeidError::data(
            "randomization test needs at least 2 documents",
        ));
    }
    if n == 0 {
        return Err(DeidError::config("number of shuffles must be positive"));
    }

    // per-document pooled counts, ordered by doc_id for determinism
    let mut gold_sorted: Vec<&Document> = gold.iter().collect();
    gold_sorted.sort_by_key(|d| d.doc_id.as_str());
    let pairs_a = align_by_id(gold, pred_a, "system A")?;
    let pairs_b = align_by_id(gold, pred_b, "system B")?;
    let count_a: std::collections::BTreeMap<&str, (u64, u64, u64)> = pairs_a
        .iter()
        .map(|(g, p)| (g.doc_id.as_str(), doc_micro_counts(g, p)))
        .collect();
    let count_b: std::collections::BTreeMap<&str, (u64, u64, u64)> = pairs_b
        .iter()
        .map(|(g, p)| (g.doc_id.as_str(), doc_micro_counts(g, p)))
        .collect();
    let per_doc: Vec<((u64, u64, u64), (u64, u64, u64))> = gold_sorted
        .iter()
        .map(|g| (count_a[g.doc_id.as_str()], count_b[g.doc_id.as_str()]))
        .collect();

    let f1_a = micro_f1(per_doc.iter().map(|(a, _)| *a));
    let f1_b = micro_f1(per_doc.iter().map(|(_, b)| *b));
    let observed_delta = f1_a - f1_b;
    let observed_stat = observed_delta.abs();

    let mut hits = 0usize;
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed(seed, i as u64));
        let swapped: Vec<((u64, u64, u64), (u64, u64, u64))> = per_doc
            .iter()
            .map(|&(a, b)| if rng.gen_bool(0.5) { (b, a) } else { (a, b) })
            .collect();
        let stat = (micro_f1(swapped.iter().map(|(a, _)| *a))
            - micro_f1(swapped.iter().map(|(_, b)| *b)))
        .abs();
        if stat >= observed_stat - 1e-12 {
            hits += 1;
        }
    }

    Ok(SigTestResult {
        observed_delta,
        p_value: (hits + 1) as f64 / (n + 1) as f64,
        n_shuffles: n,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Annotation;

    fn doc(id: &str, text: &str, anns: &[(usize, usize, &str)]) -> Document {
        let mut d = Document::new(id, text);
        d.annotations = anns
            .iter()
            .map(|&(s, e, t)| Annotation::new(text, s, e, t).unwrap())
            .collect();
        d
    }

    fn perfect_corpus(n: usize) -> (Vec<Document>, Vec<Document>, Vec<Document>) {
        let gold: Vec<Document> = (0..n)
            .map(|i| doc(&format!("d{i}"), "Jan Jansen", &[(0, 10, "Name")]))
            .collect();
        let pred_perfect = gold.clone();
        let pred_empty: Vec<Document> = gold
            .iter()
            .map(|d| {
                let mut e = d.clone();
                e.annotations.clear();
                e
            })
            .collect();
        (gold, pred_perfect, pred_empty)
    }

    #[test]
    fn identical_systems_give_p_one() {
        let (gold, pred, _) = perfect_corpus(5);
        let r = approx_rand_test(&gold, &pred, &pred, 999, 1).unwrap();
        assert_eq!(r.observed_delta, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn perfect_vs_empty_is_significant() {
        let (gold, perfect, empty) = perfect_corpus(20);
        let r = approx_rand_test(&gold, &perfect, &empty, 9999, 7).unwrap();
        assert!(r.observed_delta > 0.99);
        assert!(r.p_value <= 0.01, "p = {}", r.p_value);
    }

    #[test]
    fn fixed_seed_reproduces_p_exactly() {
        let (gold, perfect, empty) = perfect_corpus(6);
        let a = approx_rand_test(&gold, &perfect, &empty, 999, 3).unwrap();
        let b = approx_rand_test(&gold, &perfect, &empty, 999, 3).unwrap();
        assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
    }

    #[test]
    fn p_value_respects_bounds() {
        let (gold, perfect, empty) = perfect_corpus(12);
        let r = approx_rand_test(&gold, &perfect, &empty, 99, 5).unwrap();
        assert!(r.p_value >= 1.0 / 100.0);
        assert!(r.p_value <= 1.0);
    }

    #[test]
    fn fewer_than_two_documents_is_an_error() {
        let (gold, perfect, empty) = perfect_corpus(1);
        assert!(approx_rand_test(&gold, &perfect, &empty, 99, 5).is_err());
    }

    #[test]
    fn null_p_values_are_roughly_uniform() {
        use rand::{Rng, SeedableRng};
        // two systems drawn from the same error distribution: the
        // p-values over repeated experiments should look uniform
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut ps = Vec::new();
        for _ in 0..40 {
            let text = "Jan Jansen woont in Kamerik";
            let gold: Vec<Document> = (0..12)
                .map(|i| doc(&format!("d{i}"), text, &[(0, 10, "Name"), (20, 27, "Address")]))
                .collect();
            let mut sample_pred = |rng: &mut ChaCha8Rng| -> Vec<Document> {
                gold.iter()
                    .map(|g| {
                        let mut p = g.clone();
                        p.annotations.retain(|_| rng.gen_bool(0.6));
                        p
                    })
                    .collect()
            };
            let a = sample_pred(&mut rng);
            let b = sample_pred(&mut rng);
            let r = approx_rand_test(&gold, &a, &b, 199, rng.gen()).unwrap();
            ps.push(r.p_value);
        }
        // Kolmogorov-Smirnov distance against U(0,1), desk-scale bound
        ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = ps.len() as f64;
        let ks = ps
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let ecdf_hi = (i as f64 + 1.0) / n;
                let ecdf_lo = i as f64 / n;
                (ecdf_hi - p).abs().max((p - ecdf_lo).abs())
            })
            .fold(0.0f64, f64::max);
        assert!(ks < 0.35, "KS distance {ks}, ps {ps:?}");
    }
}
