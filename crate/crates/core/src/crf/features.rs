//! Per-token feature extraction and the feature index.
//!
//! Features are binary indicator strings with canonical names:
//! `w[k]=`, `p[k]=`, n-grams joined with `|`, `wp[k]=`, `pre{n}`/`suf{n}`,
//! orthographic flags, `shape=`, sentence-level `slen=`/`endmark=`/`unbal=`,
//! and `ner=`. Word and POS windows use `BOS`/`BOS2`/`EOS`/`EOS2`
//! boundary sentinels.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::TokenAttrs;
use crate::error::{DeidError, Result};

/// Which feature groups to emit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureGroups {
    pub bow: bool,
    pub pos: bool,
    pub bow_pos: bool,
    pub sentence: bool,
    pub affixes: bool,
    pub orthographic: bool,
    pub shapes: bool,
    pub ner: bool,
}

impl Default for FeatureGroups {
    fn default() -> Self {
        FeatureGroups {
            bow: true,
            pos: true,
            bow_pos: true,
            sentence: true,
            affixes: true,
            orthographic: true,
            shapes: true,
            ner: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    /// Token window, symmetric around the current token.
    pub window: (i32, i32),
    /// Maximum prefix/suffix length.
    pub affix_max: usize,
    pub groups: FeatureGroups,
    /// Features observed fewer times than this are dropped from the index.
    pub min_feature_count: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            window: (-2, 2),
            affix_max: 5,
            groups: FeatureGroups::default(),
            min_feature_count: 1,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.window;
        if lo > 0 || hi < 0 || -lo != hi {
            return Err(DeidError::config(format!(
                "window must be symmetric around 0, got [{lo},{hi}]"
            )));
        }
        if self.affix_max < 1 {
            return Err(DeidError::config("affix_max must be >= 1"));
        }
        if self.min_feature_count < 1 {
            return Err(DeidError::config("min_feature_count must be >= 1"));
        }
        Ok(())
    }
}

/// The binary features of one token: sorted, duplicate-free strings.
pub type FeatureSet = Vec<String>;

fn window_word(tokens: &[String], i: i64, k: i64) -> String {
    let pos = i + k;
    if pos < 0 {
        let depth = -pos;
        if depth == 1 {
            "BOS".to_string()
        } else {
            format!("BOS{depth}")
        }
    } else if pos >= tokens.len() as i64 {
        let depth = pos - tokens.len() as i64 + 1;
        if depth == 1 {
            "EOS".to_string()
        } else {
            format!("EOS{depth}")
        }
    } else {
        tokens[pos as usize].clone()
    }
}

fn shape_of(token: &str) -> String {
    token
        .chars()
        .map(|c| {
            if c.is_uppercase() {
                'A'
            } else if c.is_lowercase() {
                'a'
            } else if c.is_numeric() {
                '#'
            } else {
                c
            }
        })
        .collect()
}

fn slen_bucket(n: usize) -> &'static str {
    match n {
        0..=5 => "<=5",
        6..=15 => "6-15",
        16..=40 => "16-40",
        _ => ">40",
    }
}

fn has_unbalanced_brackets(tokens: &[&str]) -> bool {
    let joined: String = tokens.concat();
    let count = |c: char| joined.chars().filter(|&x| x == c).count();
    count('(') != count(')')
        || count('[') != count(']')
        || count('{') != count('}')
        || count('"') % 2 != 0
}

/// Extract the feature sets of one sentence.
///
/// `attrs`, when present, must align 1:1 with the tokens. The POS,
/// BOW+POS and NER groups are silently skipped when the corresponding
/// attribute is absent.
pub fn extract_features(
    tokens: &[&str],
    attrs: Option<&[TokenAttrs]>,
    cfg: &FeatureConfig,
) -> Result<Vec<FeatureSet>> {
    cfg.validate()?;
    if let Some(a) = attrs {
        if a.len() != tokens.len() {
            return Err(DeidError::data(format!(
                "attrs length {} does not match token count {}",
                a.len(),
                tokens.len()
            )));
        }
    }

    let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let pos_tags: Option<Vec<Option<&str>>> =
        attrs.map(|a| a.iter().map(|t| t.pos.as_deref()).collect());
    let ner_tags: Option<Vec<Option<&str>>> =
        attrs.map(|a| a.iter().map(|t| t.ner.as_deref()).collect());

    let (lo, hi) = (cfg.window.0 as i64, cfg.window.1 as i64);
    let n = tokens.len();

    // sentence-level features are shared by every token
    let mut sentence_feats: Vec<String> = Vec::new();
    if cfg.groups.sentence {
        sentence_feats.push(format!("slen={}", slen_bucket(n)));
        let endmark = tokens.last().is_some_and(|t| matches!(*t, "." | "?" | "!"));
        sentence_feats.push(format!("endmark={endmark}"));
        sentence_feats.push(format!("unbal={}", has_unbalanced_brackets(tokens)));
    }

    let pos_at = |i: i64, k: i64| -> Option<String> {
        let tags = pos_tags.as_ref()?;
        let p = i + k;
        if p < 0 {
            let depth = -p;
            Some(if depth == 1 { "BOS".into() } else { format!("BOS{depth}") })
        } else if p >= n as i64 {
            let depth = p - n as i64 + 1;
            Some(if depth == 1 { "EOS".into() } else { format!("EOS{depth}") })
        } else {
            tags[p as usize].map(|s| s.to_string())
        }
    };

    let mut out = Vec::with_capacity(n);
    for i in 0..n as i64 {
        let mut fs: Vec<String> = Vec::new();

        if cfg.groups.bow {
            for k in lo..=hi {
                fs.push(format!("w[{k}]={}", window_word(&lower, i, k)));
            }
            for k in lo..hi {
                fs.push(format!(
                    "w[{k},{}]={}|{}",
                    k + 1,
                    window_word(&lower, i, k),
                    window_word(&lower, i, k + 1)
                ));
            }
            for k in lo..hi - 1 {
                fs.push(format!(
                    "w[{k},{},{}]={}|{}|{}",
                    k + 1,
                    k + 2,
                    window_word(&lower, i, k),
                    window_word(&lower, i, k + 1),
                    window_word(&lower, i, k + 2)
                ));
            }
        }

        if cfg.groups.pos && pos_tags.is_some() {
            let grab = |k: i64| pos_at(i, k);
            for k in lo..=hi {
                if let Some(p) = grab(k) {
                    fs.push(format!("p[{k}]={p}"));
                }
            }
            for k in lo..hi {
                if let (Some(a), Some(b)) = (grab(k), grab(k + 1)) {
                    fs.push(format!("p[{k},{}]={a}|{b}", k + 1));
                }
            }
            for k in lo..hi - 1 {
                if let (Some(a), Some(b), Some(c)) = (grab(k), grab(k + 1), grab(k + 2)) {
                    fs.push(format!("p[{k},{},{}]={a}|{b}|{c}", k + 1, k + 2));
                }
            }
        }

        if cfg.groups.bow_pos && pos_tags.is_some() {
            for k in -1..=1i64 {
                if k < lo || k > hi {
                    continue;
                }
                if let Some(p) = pos_at(i, k) {
                    fs.push(format!("wp[{k}]={}|{p}", window_word(&lower, i, k)));
                }
            }
        }

        fs.extend(sentence_feats.iter().cloned());

        let token = tokens[i as usize];
        let token_lower = &lower[i as usize];
        let chars: Vec<char> = token.chars().collect();

        if cfg.groups.affixes {
            let lchars: Vec<char> = token_lower.chars().collect();
            for len in 1..=cfg.affix_max.min(lchars.len()) {
                let pre: String = lchars[..len].iter().collect();
                let suf: String = lchars[lchars.len() - len..].iter().collect();
                fs.push(format!("pre{len}={pre}"));
                fs.push(format!("suf{len}={suf}"));
            }
        }

        if cfg.groups.orthographic {
            let has_alpha = chars.iter().any(|c| c.is_alphabetic());
            if has_alpha && chars.iter().filter(|c| c.is_alphabetic()).all(|c| c.is_uppercase()) {
                fs.push("allcaps".to_string());
            }
            if chars.first().is_some_and(|c| c.is_uppercase()) {
                fs.push("cap".to_string());
            }
            if chars.iter().skip(1).any(|c| c.is_uppercase()) {
                fs.push("capin".to_string());
            }
            if chars.iter().any(|c| c.is_numeric()) {
                fs.push("digit".to_string());
            }
            if chars.iter().any(|c| !c.is_alphanumeric()) {
                fs.push("punct".to_string());
            }
            if token.is_ascii() {
                fs.push("ascii".to_string());
            }
        }

        if cfg.groups.shapes {
            fs.push(format!("shape={}", shape_of(token)));
        }

        if cfg.groups.ner {
            if let Some(tags) = &ner_tags {
                if let Some(t) = tags[i as usize] {
                    fs.push(format!("ner={t}"));
                }
            }
        }

        fs.sort();
        fs.dedup();
        out.push(fs);
    }
    Ok(out)
}

/// Deterministic feature string → column index mapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureIndex {
    features: Vec<String>,
    #[serde(skip)]
    lookup: HashMap<String, u32>,
}

impl FeatureIndex {
    pub fn from_features(features: Vec<String>) -> Self {
        let lookup = features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i as u32))
            .collect();
        FeatureIndex { features, lookup }
    }

    /// Rebuild the lookup table (after deserialization).
    pub fn rebuild_lookup(&mut self) {
        self.lookup = self
            .features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i as u32))
            .collect();
    }

    pub fn get(&self, feature: &str) -> Option<u32> {
        self.lookup.get(feature).copied()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    /// Map a feature set to sorted column indices, dropping unknowns.
    pub fn project(&self, fs: &FeatureSet) -> Vec<u32> {
        let mut ids: Vec<u32> = fs.iter().filter_map(|f| self.get(f)).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Build the index over training feature sets. Features occurring fewer
/// than `min_count` times are dropped; ordering is by descending count,
/// then lexicographic.
pub fn build_feature_index(
    train: &[Vec<FeatureSet>],
    min_count: usize,
) -> Result<FeatureIndex> {
    if train.is_empty() {
        return Err(DeidError::data("cannot build a feature index from an empty training set"));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for sentence in train {
        for fs in sentence {
            for f in fs {
                *counts.entry(f.as_str()).or_insert(0) += 1;
            }
        }
    }
    let mut entries: Vec<(&str, u64)> = counts
        .into_iter()
        .filter(|(_, c)| *c as usize >= min_count)
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    Ok(FeatureIndex::from_features(
        entries.into_iter().map(|(f, _)| f.to_string()).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_matches_reference_example() {
        assert_eq!(shape_of("7534-Df"), "####-Aa");
        let feats = extract_features(&["7534-Df"], None, &FeatureConfig::default()).unwrap();
        assert!(feats[0].contains(&"shape=####-Aa".to_string()), "{:?}", feats[0]);
    }

    #[test]
    fn affixes_capped_at_token_length() {
        let feats = extract_features(&["Ja", "."], None, &FeatureConfig::default()).unwrap();
        let fs = &feats[0];
        assert!(fs.contains(&"pre1=j".to_string()));
        assert!(fs.contains(&"suf1=a".to_string()));
        assert!(fs.contains(&"pre2=ja".to_string()));
        assert!(fs.contains(&"suf2=ja".to_string()));
        assert!(!fs.iter().any(|f| f.starts_with("pre3=")), "{fs:?}");
    }

    #[test]
    fn window_sentinels_at_sentence_start() {
        let feats = extract_features(&["Jan", "belde"], None, &FeatureConfig::default()).unwrap();
        let fs = &feats[0];
        assert!(fs.contains(&"w[-1]=BOS".to_string()), "{fs:?}");
        assert!(fs.contains(&"w[-2]=BOS2".to_string()), "{fs:?}");
        assert!(fs.contains(&"w[1]=belde".to_string()));
        assert!(fs.contains(&"w[2]=EOS".to_string()));
        let fs1 = &feats[1];
        assert!(fs1.contains(&"w[1]=EOS".to_string()));
        assert!(fs1.contains(&"w[2]=EOS2".to_string()));
    }

    #[test]
    fn ngrams_join_with_pipe() {
        let feats = extract_features(&["jan", "jansen", "belde"], None, &FeatureConfig::default()).unwrap();
        let fs = &feats[1];
        assert!(fs.contains(&"w[-1,0]=jan|jansen".to_string()), "{fs:?}");
        assert!(fs.contains(&"w[-1,0,1]=jan|jansen|belde".to_string()));
    }

    #[test]
    fn pos_and_ner_groups_disabled_without_attrs() {
        let feats = extract_features(&["Jan"], None, &FeatureConfig::default()).unwrap();
        assert!(!feats[0].iter().any(|f| f.starts_with("p[") || f.starts_with("ner=")));

        let attrs = vec![TokenAttrs { pos: Some("PROPN".into()), ner: Some("PER".into()) }];
        let feats = extract_features(&["Jan"], Some(&attrs), &FeatureConfig::default()).unwrap();
        assert!(feats[0].contains(&"p[0]=PROPN".to_string()), "{:?}", feats[0]);
        assert!(feats[0].contains(&"ner=PER".to_string()));
        assert!(feats[0].contains(&"wp[0]=jan|PROPN".to_string()));
    }

    #[test]
    fn sentence_features_are_shared() {
        let feats = extract_features(&["Kort", "."], None, &FeatureConfig::default()).unwrap();
        for fs in &feats {
            assert!(fs.contains(&"slen=<=5".to_string()));
            assert!(fs.contains(&"endmark=true".to_string()));
            assert!(fs.contains(&"unbal=false".to_string()));
        }
        let feats = extract_features(&["(", "open"], None, &FeatureConfig::default()).unwrap();
        assert!(feats[0].contains(&"unbal=true".to_string()));
    }

    #[test]
    fn orthographic_flags() {
        let feats = extract_features(&["ALS", "McDonald", "x9", "patiënt"], None, &FeatureConfig::default()).unwrap();
        assert!(feats[0].contains(&"allcaps".to_string()));
        assert!(feats[1].contains(&"capin".to_string()));
        assert!(feats[1].contains(&"cap".to_string()));
        assert!(feats[2].contains(&"digit".to_string()));
        assert!(feats[2].contains(&"ascii".to_string()));
        assert!(!feats[3].contains(&"ascii".to_string()));
    }

    #[test]
    fn feature_sets_have_no_duplicates() {
        let feats = extract_features(&["aa", "aa", "aa"], None, &FeatureConfig::default()).unwrap();
        for fs in feats {
            let mut sorted = fs.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), fs.len());
            assert!(fs.iter().all(|f| !f.is_empty()));
        }
    }

    #[test]
    fn index_ordering_is_count_then_lexicographic() {
        let sentences = vec![
            vec![vec!["b".to_string(), "common".to_string()]],
            vec![vec!["a".to_string(), "common".to_string()]],
        ];
        let idx = build_feature_index(&sentences, 1).unwrap();
        assert_eq!(idx.features(), &["common", "a", "b"]);
        assert_eq!(idx.get("common"), Some(0));
    }

    #[test]
    fn min_count_drops_rare_features() {
        let sentences = vec![vec![
            vec!["rare".to_string(), "common".to_string()],
            vec!["common".to_string()],
        ]];
        let idx = build_feature_index(&sentences, 2).unwrap();
        assert_eq!(idx.get("rare"), None);
        assert_eq!(idx.get("common"), Some(0));
        assert!(build_feature_index(&[], 1).is_err());
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = FeatureConfig::default();
        cfg.window = (-2, 3);
        assert!(extract_features(&["x"], None, &cfg).is_err());
        let mut cfg = FeatureConfig::default();
        cfg.affix_max = 0;
        assert!(cfg.validate().is_err());
    }
}
