//! CRF model structure: label alphabet, weight layout, serialization.

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::features::{FeatureConfig, FeatureIndex};
use crate::corpus::TagSet;
use crate::error::{DeidError, Result};

/// Container format version.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// The BIO label alphabet: `O` first, then `B-t`, `I-t` in tag-set order.
/// Index 0 being `O` makes the all-zero-weights tie-break decode to a
/// fully outside sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelAlphabet {
    labels: Vec<String>,
}

impl LabelAlphabet {
    pub fn from_tagset(tagset: &TagSet) -> Self {
        let mut labels = vec!["O".to_string()];
        for t in tagset.tags() {
            labels.push(format!("B-{t}"));
            labels.push(format!("I-{t}"));
        }
        LabelAlphabet { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Flat weight vector with the layout
/// `[emission (F×L) | transition (L×L) | begin (L) | end (L)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfWeights {
    pub n_features: usize,
    pub n_labels: usize,
    pub w: Vec<f64>,
}

impl CrfWeights {
    pub fn zeros(n_features: usize, n_labels: usize) -> Self {
        CrfWeights {
            n_features,
            n_labels,
            w: vec![0.0; n_features * n_labels + n_labels * n_labels + 2 * n_labels],
        }
    }

    pub fn from_vec(n_features: usize, n_labels: usize, w: Vec<f64>) -> Result<Self> {
        let expect = n_features * n_labels + n_labels * n_labels + 2 * n_labels;
        if w.len() != expect {
            return Err(DeidError::data(format!(
                "weight vector length {} does not match dimensions ({expect} expected)",
                w.len()
            )));
        }
        Ok(CrfWeights { n_features, n_labels, w })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    #[inline]
    pub fn emit(&self, feature: u32, label: usize) -> f64 {
        self.w[feature as usize * self.n_labels + label]
    }

    #[inline]
    pub fn emit_index(&self, feature: u32, label: usize) -> usize {
        feature as usize * self.n_labels + label
    }

    #[inline]
    pub fn trans(&self, from: usize, to: usize) -> f64 {
        self.w[self.n_features * self.n_labels + from * self.n_labels + to]
    }

    #[inline]
    pub fn trans_index(&self, from: usize, to: usize) -> usize {
        self.n_features * self.n_labels + from * self.n_labels + to
    }

    #[inline]
    pub fn begin(&self, label: usize) -> f64 {
        self.w[self.n_features * self.n_labels + self.n_labels * self.n_labels + label]
    }

    #[inline]
    pub fn begin_index(&self, label: usize) -> usize {
        self.n_features * self.n_labels + self.n_labels * self.n_labels + label
    }

    #[inline]
    pub fn end(&self, label: usize) -> f64 {
        self.w[self.n_features * self.n_labels + self.n_labels * self.n_labels + self.n_labels + label]
    }

    #[inline]
    pub fn end_index(&self, label: usize) -> usize {
        self.n_features * self.n_labels + self.n_labels * self.n_labels + self.n_labels + label
    }

    pub fn all_finite(&self) -> bool {
        self.w.iter().all(|x| x.is_finite())
    }
}

/// Training metadata recorded in the model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub c1: f64,
    pub c2: f64,
    pub seed: u64,
    pub iterations: usize,
    pub version: String,
}

/// A trained linear-chain CRF.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    pub tagset: TagSet,
    pub labels: LabelAlphabet,
    pub feature_index: FeatureIndex,
    pub feature_config: FeatureConfig,
    pub weights: CrfWeights,
    pub meta: TrainMeta,
}

fn encode_f64s(xs: &[f64]) -> String {
    let mut bytes = Vec::with_capacity(xs.len() * 8);
    for x in xs {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    B64.encode(bytes)
}

fn decode_f64s(s: &str, location: &str) -> Result<Vec<f64>> {
    let bytes = B64
        .decode(s)
        .map_err(|e| DeidError::parse(location, format!("invalid base64: {e}")))?;
    if bytes.len() % 8 != 0 {
        return Err(DeidError::parse(location, "byte length not a multiple of 8"));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[derive(Serialize, Deserialize)]
struct TransitionsFile {
    matrix: String,
    begin: String,
    end: String,
}

/// On-disk model container.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    tagset: TagSet,
    feature_config: FeatureConfig,
    label_alphabet: Vec<String>,
    features: Vec<String>,
    /// Emission weights, base64 of little-endian f64, feature-major.
    weights: String,
    transitions: TransitionsFile,
    meta: TrainMeta,
}

impl CrfModel {
    pub fn to_json(&self) -> Result<String> {
        let n_feat = self.weights.n_features;
        let n_lab = self.weights.n_labels;
        let emission = &self.weights.w[..n_feat * n_lab];
        let trans = &self.weights.w[n_feat * n_lab..n_feat * n_lab + n_lab * n_lab];
        let begin_block =
            &self.weights.w[n_feat * n_lab + n_lab * n_lab..n_feat * n_lab + n_lab * n_lab + n_lab];
        let end_block = &self.weights.w[n_feat * n_lab + n_lab * n_lab + n_lab..];
        let file = ModelFile {
            version: MODEL_FORMAT_VERSION,
            tagset: self.tagset.clone(),
            feature_config: self.feature_config.clone(),
            label_alphabet: self.labels.labels().to_vec(),
            features: self.feature_index.features().to_vec(),
            weights: encode_f64s(emission),
            transitions: TransitionsFile {
                matrix: encode_f64s(trans),
                begin: encode_f64s(begin_block),
                end: encode_f64s(end_block),
            },
            meta: self.meta.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(content: &str, location: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(content)
            .map_err(|e| DeidError::parse(location, e.to_string()))?;
        if file.version != MODEL_FORMAT_VERSION {
            return Err(DeidError::parse(
                location,
                format!(
                    "unsupported model format version {} (expected {MODEL_FORMAT_VERSION})",
                    file.version
                ),
            ));
        }
        let labels = LabelAlphabet::from_tagset(&file.tagset);
        if labels.labels() != file.label_alphabet.as_slice() {
            return Err(DeidError::parse(
                location,
                "label alphabet does not match the tag set",
            ));
        }
        let n_lab = labels.len();
        let n_feat = file.features.len();

        let emission = decode_f64s(&file.weights, location)?;
        let trans = decode_f64s(&file.transitions.matrix, location)?;
        let begin_block = decode_f64s(&file.transitions.begin, location)?;
        let end_block = decode_f64s(&file.transitions.end, location)?;
        if emission.len() != n_feat * n_lab
            || trans.len() != n_lab * n_lab
            || begin_block.len() != n_lab
            || end_block.len() != n_lab
        {
            return Err(DeidError::parse(location, "weight block sizes inconsistent with dimensions"));
        }

        let mut w = Vec::with_capacity(emission.len() + trans.len() + 2 * n_lab);
        w.extend_from_slice(&emission);
        w.extend_from_slice(&trans);
        w.extend_from_slice(&begin_block);
        w.extend_from_slice(&end_block);
        let weights = CrfWeights::from_vec(n_feat, n_lab, w)?;
        if !weights.all_finite() {
            return Err(DeidError::parse(location, "model contains non-finite weights"));
        }

        let mut feature_index = FeatureIndex::from_features(file.features);
        feature_index.rebuild_lookup();

        Ok(CrfModel {
            tagset: file.tagset,
            labels,
            feature_index,
            feature_config: file.feature_config,
            weights,
            meta: file.meta,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let mut content = self.to_json()?;
        content.push('\n');
        std::fs::write(path, content)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| DeidError::parse(path.display().to_string(), e.to_string()))?;
        Self::from_json(&content, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_alphabet_order_is_o_then_bio_pairs() {
        let a = LabelAlphabet::from_tagset(&TagSet::nut16());
        assert_eq!(a.len(), 33);
        assert_eq!(a.label(0), "O");
        assert_eq!(a.label(1), "B-Name");
        assert_eq!(a.label(2), "I-Name");
        assert_eq!(a.index_of("I-Other"), Some(32));
    }

    #[test]
    fn weight_layout_indices_are_disjoint_and_total() {
        let w = CrfWeights::zeros(3, 2);
        assert_eq!(w.len(), 3 * 2 + 2 * 2 + 2 + 2);
        let mut seen = std::collections::BTreeSet::new();
        for f in 0..3u32 {
            for l in 0..2 {
                assert!(seen.insert(w.emit_index(f, l)));
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                assert!(seen.insert(w.trans_index(a, b)));
            }
        }
        for l in 0..2 {
            assert!(seen.insert(w.begin_index(l)));
            assert!(seen.insert(w.end_index(l)));
        }
        assert_eq!(seen.len(), w.len());
        assert_eq!(*seen.iter().next_back().unwrap(), w.len() - 1);
    }

    #[test]
    fn model_json_roundtrip_is_exact() {
        let tagset = TagSet::new("mini", vec!["Name".into()]).unwrap();
        let labels = LabelAlphabet::from_tagset(&tagset);
        let fi = FeatureIndex::from_features(vec!["w[0]=jan".into(), "cap".into()]);
        let mut weights = CrfWeights::zeros(2, labels.len());
        for (i, v) in weights.w.iter_mut().enumerate() {
            *v = (i as f64) * 0.125 - 0.8; // exactly representable steps
        }
        let model = CrfModel {
            tagset,
            labels,
            feature_index: fi,
            feature_config: FeatureConfig::default(),
            weights,
            meta: TrainMeta {
                c1: 0.5,
                c2: 0.1,
                seed: 7,
                iterations: 12,
                version: "0.1.0".into(),
            },
        };
        let json = model.to_json().unwrap();
        let back = CrfModel::from_json(&json, "test").unwrap();
        assert_eq!(back.weights.w, model.weights.w);
        assert_eq!(back.feature_index.get("cap"), Some(1));
        assert_eq!(back.meta, model.meta);
        // serialization is itself deterministic
        assert_eq!(json, back.to_json().unwrap());
    }

    #[test]
    fn corrupt_models_are_rejected() {
        assert!(CrfModel::from_json("{}", "t").is_err());
        let tagset = TagSet::new("mini", vec!["Name".into()]).unwrap();
        let labels = LabelAlphabet::from_tagset(&tagset);
        let model = CrfModel {
            tagset,
            labels: labels.clone(),
            feature_index: FeatureIndex::from_features(vec!["f".into()]),
            feature_config: FeatureConfig::default(),
            weights: CrfWeights::zeros(1, labels.len()),
            meta: TrainMeta { c1: 0.0, c2: 0.0, seed: 0, iterations: 0, version: "x".into() },
        };
        let json = model.to_json().unwrap();
        let tampered = json.replace("\"version\":1", "\"version\":99");
        assert!(CrfModel::from_json(&tampered, "t").is_err());
    }
}
