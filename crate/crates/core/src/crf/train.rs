//! Training (orthant-wise LBFGS with elastic net), random hyperparameter
//! search and the document-level tagging pipeline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{build_feature_index, extract_features, FeatureConfig, FeatureIndex, FeatureSet};
use super::inference::viterbi;
use super::model::{CrfModel, CrfWeights, LabelAlphabet, TrainMeta};
use super::objective::{nll_and_grad_raw, Instance};
use super::owlqn::{minimize, IterationRecord, OwlQnOptions};
use crate::corpus::{from_bio, repair_bio, to_bio, tokenize, AlignMode, Annotation, BioSequence, Document, TagSet, TokenAttrs};
use crate::error::{DeidError, Result};
use crate::eval::entity_prf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainOptions {
    pub max_iterations: usize,
    /// Relative objective-change stopping threshold.
    pub tolerance: f64,
    /// LBFGS memory.
    pub memory: usize,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            max_iterations: 200,
            tolerance: 1e-6,
            memory: 10,
            seed: 0,
        }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.memory == 0 {
            return Err(DeidError::config("max_iterations and memory must be positive"));
        }
        if self.tolerance <= 0.0 {
            return Err(DeidError::config("tolerance must be positive"));
        }
        Ok(())
    }
}

/// Feature-extracted, label-indexed training data.
#[derive(Debug)]
pub struct PreparedDataset {
    pub instances: Vec<Instance>,
    pub index: FeatureIndex,
    pub tagset: TagSet,
    pub labels: LabelAlphabet,
    pub feature_config: FeatureConfig,
}

/// Split a document's flat attribute column by its sentence lengths.
fn attrs_by_sentence(doc: &Document, sentence_lens: &[usize]) -> Result<Option<Vec<Vec<TokenAttrs>>>> {
    let Some(attrs) = &doc.attrs else {
        return Ok(None);
    };
    let total: usize = sentence_lens.iter().sum();
    if attrs.len() != total {
        return Err(DeidError::data(format!(
            "doc {}: attrs length {} does not match token count {total}",
            doc.doc_id,
            attrs.len()
        )));
    }
    let mut out = Vec::with_capacity(sentence_lens.len());
    let mut offset = 0;
    for &len in sentence_lens {
        out.push(attrs[offset..offset + len].to_vec());
        offset += len;
    }
    Ok(Some(out))
}

/// Tokenize, BIO-encode and feature-extract the documents, then build
/// the feature index and the indexed instances.
pub fn prepare_training_data(
    docs: &[&Document],
    tagset: &TagSet,
    feature_config: &FeatureConfig,
    mode: AlignMode,
) -> Result<PreparedDataset> {
    feature_config.validate()?;
    let labels = LabelAlphabet::from_tagset(tagset);

    let mut all_featsets: Vec<Vec<FeatureSet>> = Vec::new();
    let mut all_labels: Vec<Vec<usize>> = Vec::new();

    for doc in docs {
        doc.validate()?;
        let tdoc = tokenize(&doc.text);
        let sentence_lens: Vec<usize> = tdoc.sentences.iter().map(|s| s.len()).collect();
        let attrs = attrs_by_sentence(doc, &sentence_lens)?;
        let (seqs, _report) = to_bio(&tdoc, &doc.annotations, tagset, mode)?;
        for (si, (sent, seq)) in tdoc.sentences.iter().zip(&seqs).enumerate() {
            if sent.is_empty() {
                continue;
            }
            let surfaces: Vec<&str> = sent.iter().map(|t| t.surface.as_str()).collect();
            let sent_attrs = attrs.as_ref().map(|a| a[si].as_slice());
            all_featsets.push(extract_features(&surfaces, sent_attrs, feature_config)?);
            let ids = seq
                .labels
                .iter()
                .map(|l| {
                    labels.index_of(l).ok_or_else(|| {
                        DeidError::data(format!("label {l:?} outside the alphabet"))
                    })
                })
                .collect::<Result<Vec<usize>>>()?;
            all_labels.push(ids);
        }
    }

    if all_featsets.is_empty() {
        return Err(DeidError::data("training set contains no sentences"));
    }
    let index = build_feature_index(&all_featsets, feature_config.min_feature_count)?;
    let instances = all_featsets
        .iter()
        .zip(&all_labels)
        .map(|(fs, ls)| Instance {
            feats: fs.iter().map(|f| index.project(f)).collect(),
            labels: ls.clone(),
        })
        .collect();

    Ok(PreparedDataset {
        instances,
        index,
        tagset: tagset.clone(),
        labels,
        feature_config: feature_config.clone(),
    })
}

/// Train on prepared data. Deterministic given the data order and seed;
/// the objective is non-increasing over accepted optimizer steps.
pub fn train_prepared(
    data: &PreparedDataset,
    c1: f64,
    c2: f64,
    opts: &TrainOptions,
) -> Result<(CrfModel, Vec<IterationRecord>)> {
    opts.validate()?;
    if c1 < 0.0 || c2 < 0.0 {
        return Err(DeidError::config("regularization coefficients must be non-negative"));
    }
    let n_features = data.index.len();
    let n_labels = data.labels.len();
    let template = CrfWeights::zeros(n_features, n_labels);

    let owl = OwlQnOptions {
        c1,
        memory: opts.memory,
        max_iterations: opts.max_iterations,
        tolerance: opts.tolerance,
        ..OwlQnOptions::default()
    };
    let instances = &data.instances;
    let (w, trace) = minimize(
        |x: &[f64]| {
            let weights = CrfWeights {
                n_features,
                n_labels,
                w: x.to_vec(),
            };
            let (mut value, mut grad) = nll_and_grad_raw(&weights, instances);
            if c2 != 0.0 {
                let mut sq = 0.0;
                for (g, &wi) in grad.iter_mut().zip(x) {
                    *g += 2.0 * c2 * wi;
                    sq += wi * wi;
                }
                value += c2 * sq;
            }
            (value, grad)
        },
        template.w,
        &owl,
    )?;

    let weights = CrfWeights::from_vec(n_features, n_labels, w)?;
    if !weights.all_finite() {
        return Err(DeidError::data("training produced non-finite weights"));
    }
    let model = CrfModel {
        tagset: data.tagset.clone(),
        labels: data.labels.clone(),
        feature_index: data.index.clone(),
        feature_config: data.feature_config.clone(),
        weights,
        meta: TrainMeta {
            c1,
            c2,
            seed: opts.seed,
            iterations: trace.len(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    };
    Ok((model, trace))
}

/// Convenience wrapper: prepare (snap alignment) and train.
pub fn train(
    docs: &[&Document],
    tagset: &TagSet,
    feature_config: &FeatureConfig,
    c1: f64,
    c2: f64,
    opts: &TrainOptions,
) -> Result<CrfModel> {
    let data = prepare_training_data(docs, tagset, feature_config, AlignMode::Snap)?;
    Ok(train_prepared(&data, c1, c2, opts)?.0)
}

/// Tag one document: tokenize, extract features, decode, repair, and
/// turn the label runs back into annotations.
pub fn tag_crf(model: &CrfModel, doc: &Document) -> Result<Vec<Annotation>> {
    if model.labels.labels() != LabelAlphabet::from_tagset(&model.tagset).labels() {
        return Err(DeidError::data(
            "model label alphabet inconsistent with its tag set",
        ));
    }
    let tdoc = tokenize(&doc.text);
    let sentence_lens: Vec<usize> = tdoc.sentences.iter().map(|s| s.len()).collect();
    let attrs = attrs_by_sentence(doc, &sentence_lens)?;

    let mut seqs: Vec<BioSequence> = Vec::with_capacity(tdoc.sentences.len());
    for (si, sent) in tdoc.sentences.iter().enumerate() {
        let surfaces: Vec<&str> = sent.iter().map(|t| t.surface.as_str()).collect();
        let sent_attrs = attrs.as_ref().map(|a| a[si].as_slice());
        let featsets = extract_features(&surfaces, sent_attrs, &model.feature_config)?;
        let indexed: Vec<Vec<u32>> = featsets.iter().map(|f| model.feature_index.project(f)).collect();
        let path = viterbi(&model.weights, &indexed);
        let raw = BioSequence::new(path.iter().map(|&y| model.labels.label(y).to_string()).collect());
        seqs.push(repair_bio(&raw)?);
    }
    from_bio(&tdoc, &seqs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTrial {
    pub index: usize,
    pub c1: f64,
    pub c2: f64,
    pub dev_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_c1: f64,
    pub best_c2: f64,
    pub best_f1: f64,
    pub trials: Vec<SearchTrial>,
}

/// Random search over (c1, c2), sampled independently and log-uniformly
/// over `range`. The best trial maximizes dev micro entity F1; ties go
/// to the earlier trial.
#[allow(clippy::too_many_arguments)]
pub fn random_search(
    train_docs: &[&Document],
    dev_docs: &[&Document],
    tagset: &TagSet,
    feature_config: &FeatureConfig,
    opts: &TrainOptions,
    n_trials: usize,
    range: (f64, f64),
    seed: u64,
) -> Result<SearchResult> {
    if n_trials == 0 {
        return Err(DeidError::config("n_trials must be >= 1"));
    }
    if dev_docs.is_empty() {
        return Err(DeidError::data("random search needs a non-empty dev set"));
    }
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo) {
        return Err(DeidError::config(format!("invalid search range [{lo}, {hi}]")));
    }

    let data = prepare_training_data(train_docs, tagset, feature_config, AlignMode::Snap)?;
    let gold: Vec<Document> = dev_docs.iter().map(|d| (*d).clone()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (log_lo, log_hi) = (lo.log10(), hi.log10());
    let mut trials = Vec::with_capacity(n_trials);
    let mut best: Option<SearchTrial> = None;

    for index in 0..n_trials {
        let c1 = 10f64.powf(rng.gen_range(log_lo..=log_hi));
        let c2 = 10f64.powf(rng.gen_range(log_lo..=log_hi));
        let (model, _) = train_prepared(&data, c1, c2, opts)?;
        let mut pred = gold.clone();
        for d in pred.iter_mut() {
            d.annotations = tag_crf(&model, d)?;
        }
        let dev_f1 = entity_prf(&gold, &pred, tagset)?.micro.f1;
        let trial = SearchTrial { index, c1, c2, dev_f1 };
        if best.as_ref().is_none_or(|b| trial.dev_f1 > b.dev_f1) {
            best = Some(trial.clone());
        }
        trials.push(trial);
    }

    let best = best.expect("n_trials >= 1");
    Ok(SearchResult {
        best_c1: best.c1,
        best_c2: best.c2,
        best_f1: best.dev_f1,
        trials,
    })
}
