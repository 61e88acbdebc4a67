//! Seeded train/dev/test corpus splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Document;
use crate::error::{DeidError, Result};

/// A reproducible three-way partition of a corpus by document id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
    pub seed: u64,
    pub ratios: [f64; 3],
}

/// Randomly split a corpus into train/dev/test.
///
/// Sizes are floor-allocated from the ratios; the remainder is assigned
/// train-first. Deterministic for a fixed (corpus order, seed, ratios).
pub fn split_corpus(corpus: &[Document], ratios: [f64; 3], seed: u64) -> Result<Partition> {
    if corpus.is_empty() {
        return Err(DeidError::data("cannot split an empty corpus"));
    }
    if ratios.iter().any(|r| *r < 0.0) {
        return Err(DeidError::config("split ratios must be non-negative"));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(DeidError::config(format!(
            "split ratios must sum to 1 (got {sum})"
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for d in corpus {
        if !seen.insert(&d.doc_id) {
            return Err(DeidError::data(format!("duplicate doc_id {:?}", d.doc_id)));
        }
    }

    let n = corpus.len();
    let mut sizes = [0usize; 3];
    for (i, r) in ratios.iter().enumerate() {
        sizes[i] = (n as f64 * r).floor() as usize;
    }
    let mut remainder = n - sizes.iter().sum::<usize>();
    let mut i = 0;
    while remainder > 0 {
        sizes[i % 3] += 1;
        remainder -= 1;
        i += 1;
    }

    let mut ids: Vec<String> = corpus.iter().map(|d| d.doc_id.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);

    let train = ids[..sizes[0]].to_vec();
    let dev = ids[sizes[0]..sizes[0] + sizes[1]].to_vec();
    let test = ids[sizes[0] + sizes[1]..].to_vec();
    Ok(Partition {
        train,
        dev,
        test,
        seed,
        ratios,
    })
}

impl Partition {
    /// Select the documents named by `ids`, in partition order.
    pub fn select<'a>(&self, corpus: &'a [Document], ids: &[String]) -> Result<Vec<&'a Document>> {
        let by_id: std::collections::BTreeMap<&str, &Document> =
            corpus.iter().map(|d| (d.doc_id.as_str(), d)).collect();
        ids.iter()
            .map(|id| {
                by_id
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| DeidError::data(format!("partition references unknown doc_id {id:?}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(n: usize) -> Vec<Document> {
        (0..n)
            .map(|i| Document::new(format!("doc-{i:04}"), format!("tekst {i}")))
            .collect()
    }

    #[test]
    fn ten_docs_split_6_2_2() {
        let p = split_corpus(&corpus(10), [0.6, 0.2, 0.2], 42).unwrap();
        assert_eq!((p.train.len(), p.dev.len(), p.test.len()), (6, 2, 2));
    }

    #[test]
    fn twelve_sixty_docs_split_756_252_252() {
        let p = split_corpus(&corpus(1260), [0.6, 0.2, 0.2], 7).unwrap();
        assert_eq!((p.train.len(), p.dev.len(), p.test.len()), (756, 252, 252));
    }

    #[test]
    fn remainder_goes_train_first() {
        // 7 docs, 60/20/20: floors are 4/1/1, remainder 1 goes to train
        let p = split_corpus(&corpus(7), [0.6, 0.2, 0.2], 1).unwrap();
        assert_eq!((p.train.len(), p.dev.len(), p.test.len()), (5, 1, 1));
    }

    #[test]
    fn deterministic_and_exhaustive() {
        let docs = corpus(37);
        let a = split_corpus(&docs, [0.6, 0.2, 0.2], 123).unwrap();
        let b = split_corpus(&docs, [0.6, 0.2, 0.2], 123).unwrap();
        assert_eq!(a, b);

        let mut all: Vec<String> = a.train.iter().chain(&a.dev).chain(&a.test).cloned().collect();
        all.sort();
        let mut expect: Vec<String> = docs.iter().map(|d| d.doc_id.clone()).collect();
        expect.sort();
        assert_eq!(all, expect);

        let c = split_corpus(&docs, [0.6, 0.2, 0.2], 124).unwrap();
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(split_corpus(&[], [0.6, 0.2, 0.2], 1).is_err());
        assert!(split_corpus(&corpus(3), [0.5, 0.2, 0.2], 1).is_err());
        let mut dup = corpus(2);
        dup[1].doc_id = dup[0].doc_id.clone();
        assert!(split_corpus(&dup, [0.6, 0.2, 0.2], 1).is_err());
    }
}
