//! Entity-level evaluation: per-tag and micro-averaged precision,
//! recall and F1, plus inter-annotator agreement.
//!
//! A prediction is a true positive iff a gold annotation with the same
//! (document, start, end, tag) exists; each gold annotation is matched
//! at most once. Micro scores pool counts over all tags. Zero-division
//! conventions: precision is 0 without predictions, recall is 0 without
//! gold, F1 is 0 when P + R = 0.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, TagSet};
use crate::error::{DeidError, Result};

pub mod curve;
pub mod sigtest;

pub use curve::{learning_curve, CurvePoint};
pub use sigtest::{approx_rand_test, SigTestResult};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Score {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
        let recall = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Score { tp, fp, fn_, precision, recall, f1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagReport {
    pub tag: String,
    #[serde(flatten)]
    pub score: Score,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_tag: Vec<TagReport>,
    pub micro: Score,
    pub n_docs: usize,
    pub n_gold: u64,
}

impl EvalReport {
    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .per_tag
            .iter()
            .map(|t| t.tag.len())
            .chain(["micro".len()])
            .max()
            .unwrap_or(5)
            .max(5);
        out.push_str(&format!(
            "{:<width$}  {:>6} {:>6} {:>6}  {:>9} {:>9} {:>9}\n",
            "tag", "tp", "fp", "fn", "precision", "recall", "f1"
        ));
        for t in &self.per_tag {
            out.push_str(&format!(
                "{:<width$}  {:>6} {:>6} {:>6}  {:>9.3} {:>9.3} {:>9.3}\n",
                t.tag, t.score.tp, t.score.fp, t.score.fn_, t.score.precision, t.score.recall, t.score.f1
            ));
        }
        out.push_str(&format!(
            "{:<width$}  {:>6} {:>6} {:>6}  {:>9.3} {:>9.3} {:>9.3}\n",
            "micro",
            self.micro.tp,
            self.micro.fp,
            self.micro.fn_,
            self.micro.precision,
            self.micro.recall,
            self.micro.f1
        ));
        out
    }
}

type Entity<'a> = (&'a str, usize, usize, &'a str); // doc, start, end, tag

fn collect_entities<'a>(
    docs: &'a [Document],
    tagset: &TagSet,
    side: &str,
) -> Result<BTreeSet<Entity<'a>>> {
    let mut set = BTreeSet::new();
    for doc in docs {
        for a in &doc.annotations {
            if !tagset.contains(&a.tag) {
                return Err(DeidError::data(format!(
                    "{side} annotation in doc {:?} has tag {:?} not in tag set {:?}",
                    doc.doc_id,
                    a.tag,
                    tagset.name()
                )));
            }
            let key = (doc.doc_id.as_str(), a.start, a.end, a.tag.as_str());
            if !set.insert(key) {
                return Err(DeidError::data(format!(
                    "duplicate {side} annotation in doc {:?}: {}..{} {:?}",
                    doc.doc_id, a.start, a.end, a.tag
                )));
            }
        }
    }
    Ok(set)
}

fn check_same_docs(gold: &[Document], pred: &[Document]) -> Result<()> {
    let g: BTreeSet<&str> = gold.iter().map(|d| d.doc_id.as_str()).collect();
    let p: BTreeSet<&str> = pred.iter().map(|d| d.doc_id.as_str()).collect();
    if g != p {
        let missing: Vec<&&str> = g.symmetric_difference(&p).collect();
        return Err(DeidError::data(format!(
            "gold and predictions cover different documents: {missing:?}"
        )));
    }
    Ok(())
}

/// Entity-level precision/recall/F1 with exact offset and tag matching.
pub fn entity_prf(gold: &[Document], pred: &[Document], tagset: &TagSet) -> Result<EvalReport> {
    check_same_docs(gold, pred)?;
    let gold_set = collect_entities(gold, tagset, "gold")?;
    let pred_set = collect_entities(pred, tagset, "predicted")?;

    let mut per_tag: BTreeMap<&str, (u64, u64, u64)> = BTreeMap::new();
    for t in tagset.tags() {
        per_tag.insert(t.as_str(), (0, 0, 0));
    }
    for e in pred_set.iter() {
        let entry = per_tag.get_mut(e.3).expect("tag validated");
        if gold_set.contains(e) {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }
    for e in gold_set.iter() {
        if !pred_set.contains(e) {
            per_tag.get_mut(e.3).expect("tag validated").2 += 1;
        }
    }

    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    let mut reports = Vec::new();
    for t in tagset.tags() {
        let &(a, b, c) = per_tag.get(t.as_str()).unwrap();
        tp += a;
        fp += b;
        fn_ += c;
        reports.push(TagReport {
            tag: t.clone(),
            score: Score::from_counts(a, b, c),
        });
    }

    Ok(EvalReport {
        per_tag: reports,
        micro: Score::from_counts(tp, fp, fn_),
        n_docs: gold.len(),
        n_gold: gold_set.len() as u64,
    })
}

/// Inter-annotator agreement: entity-level F1 with annotator A as gold
/// and B as predictions.
pub fn agreement(a: &[Document], b: &[Document], tagset: &TagSet) -> Result<EvalReport> {
    entity_prf(a, b, tagset)
}

/// Pooled (tp, fp, fn) of one document pair; used by the randomization
/// test, which needs per-document counts.
pub(crate) fn doc_micro_counts(gold: &Document, pred: &Document) -> (u64, u64, u64) {
    let g: BTreeSet<(usize, usize, &str)> = gold
        .annotations
        .iter()
        .map(|a| (a.start, a.end, a.tag.as_str()))
        .collect();
    let p: BTreeSet<(usize, usize, &str)> = pred
        .annotations
        .iter()
        .map(|a| (a.start, a.end, a.tag.as_str()))
        .collect();
    let tp = g.intersection(&p).count() as u64;
    (tp, p.len() as u64 - tp, g.len() as u64 - tp)
}
