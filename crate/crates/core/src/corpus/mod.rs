//! Document model and corpus plumbing: tag sets, character-offset
//! annotations, tokenization, BIO encoding, standoff and JSONL I/O,
//! and corpus splitting.
//!
//! All offsets throughout the toolkit count Unicode scalar values, not
//! bytes. This matches the standoff convention and keeps annotations
//! stable across texts with diacritics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{DeidError, Result};

pub mod bio;
pub mod jsonl;
pub mod split;
pub mod standoff;
pub mod tokenize;

pub use bio::{from_bio, repair_bio, to_bio, AlignMode, AlignmentFailure, AlignmentReport};
pub use split::{split_corpus, Partition};
pub use tokenize::tokenize;

/// Number of Unicode scalar values in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Slice `s` by scalar-value offsets `[start, end)`.
pub fn char_slice(s: &str, start: usize, end: usize) -> String {
    s.chars().skip(start).take(end.saturating_sub(start)).collect()
}

/// An ordered set of PHI tag names.
///
/// The ordering is significant: it is used for tie-breaking in overlap
/// resolution, label-alphabet construction and report layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagSet {
    name: String,
    tags: Vec<String>,
}

/// The 16 built-in tags, in their canonical order.
pub const NUT16_TAGS: [&str; 16] = [
    "Name",
    "Initials",
    "Profession",
    "Internal Location",
    "Hospital",
    "Organization",
    "Care Institute",
    "Address",
    "Age",
    "Date",
    "Phone/Fax",
    "Email",
    "URL/IP",
    "SSN",
    "ID",
    "Other",
];

impl TagSet {
    pub fn new(name: impl Into<String>, tags: Vec<String>) -> Result<Self> {
        if tags.is_empty() {
            return Err(DeidError::config("tag set must not be empty"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &tags {
            if t.is_empty() {
                return Err(DeidError::config("tag names must be non-empty"));
            }
            if !seen.insert(t.clone()) {
                return Err(DeidError::config(format!("duplicate tag name: {t}")));
            }
        }
        Ok(TagSet { name: name.into(), tags })
    }

    /// The built-in 16-tag PHI scheme.
    pub fn nut16() -> Self {
        TagSet {
            name: "nut-16".to_string(),
            tags: NUT16_TAGS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }

    /// Position of `tag` in the canonical ordering.
    pub fn index_of(&self, tag: &str) -> Option<usize> {
        self.tags.iter().position(|t| t == tag)
    }
}

/// A PHI annotation over a document text.
///
/// `start` is inclusive, `end` exclusive, both in scalar values. The
/// surface is always the exact text slice at those offsets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Annotation {
    pub start: usize,
    pub end: usize,
    pub tag: String,
    pub surface: String,
}

impl Annotation {
    /// Build an annotation, deriving the surface from `text` and
    /// validating the offsets.
    pub fn new(text: &str, start: usize, end: usize, tag: impl Into<String>) -> Result<Self> {
        let n = char_len(text);
        if start >= end || end > n {
            return Err(DeidError::data(format!(
                "annotation offsets {start}..{end} out of bounds for text of length {n}"
            )));
        }
        Ok(Annotation {
            start,
            end,
            tag: tag.into(),
            surface: char_slice(text, start, end),
        })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn overlaps(&self, other: &Annotation) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// Optional per-token attribute columns (POS and NER tags supplied by an
/// external pipeline). Aligned 1:1 with the tokens of the document's
/// tokenization, in sentence order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenAttrs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ner: Option<String>,
}

/// A raw document: text, annotations and free-form metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
    /// Per-token attributes, when the producing pipeline supplies them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attrs: Option<Vec<TokenAttrs>>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            doc_id: doc_id.into(),
            text: text.into(),
            meta: BTreeMap::new(),
            annotations: Vec::new(),
            attrs: None,
        }
    }

    /// Sort annotations into canonical (start, end, tag) order.
    pub fn sort_annotations(&mut self) {
        self.annotations
            .sort_by(|a, b| (a.start, a.end, &a.tag).cmp(&(b.start, b.end, &b.tag)));
    }

    /// Check that every annotation's surface matches its text slice and
    /// offsets are in bounds.
    pub fn validate(&self) -> Result<()> {
        if self.doc_id.is_empty() {
            return Err(DeidError::data("doc_id must be non-empty"));
        }
        let n = char_len(&self.text);
        for a in &self.annotations {
            if a.start >= a.end || a.end > n {
                return Err(DeidError::data(format!(
                    "doc {}: annotation {}..{} out of bounds (text length {})",
                    self.doc_id, a.start, a.end, n
                )));
            }
            let slice = char_slice(&self.text, a.start, a.end);
            if slice != a.surface {
                return Err(DeidError::data(format!(
                    "doc {}: surface mismatch at {}..{}: expected {:?}, found {:?}",
                    self.doc_id, a.start, a.end, slice, a.surface
                )));
            }
        }
        Ok(())
    }
}

/// A token with exact character offsets back into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

/// Sentence/token segmentation of one text. Sentences partition the
/// token list; tokens are strictly increasing and non-overlapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDoc {
    pub text: String,
    pub sentences: Vec<Vec<Token>>,
}

impl TokenizedDoc {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.len()).sum()
    }

    pub fn iter_tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flatten()
    }
}

/// Per-sentence BIO label sequence, aligned 1:1 with the sentence's tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BioSequence {
    pub labels: Vec<String>,
}

impl BioSequence {
    pub fn new(labels: Vec<String>) -> Self {
        BioSequence { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nut16_has_sixteen_unique_tags() {
        let ts = TagSet::nut16();
        assert_eq!(ts.tags().len(), 16);
        assert!(ts.contains("Phone/Fax"));
        assert_eq!(ts.index_of("Name"), Some(0));
        assert_eq!(ts.index_of("Other"), Some(15));
    }

    #[test]
    fn tagset_rejects_duplicates_and_empty() {
        assert!(TagSet::new("x", vec![]).is_err());
        assert!(TagSet::new("x", vec!["A".into(), "A".into()]).is_err());
        assert!(TagSet::new("x", vec!["A".into(), "".into()]).is_err());
    }

    #[test]
    fn annotation_surface_is_derived_from_text() {
        let text = "Dhr. Jan Jansen belde.";
        let a = Annotation::new(text, 5, 15, "Name").unwrap();
        assert_eq!(a.surface, "Jan Jansen");
        assert!(Annotation::new(text, 5, 5, "Name").is_err());
        assert!(Annotation::new(text, 5, 999, "Name").is_err());
    }

    #[test]
    fn char_offsets_survive_diacritics() {
        let text = "De patiënt är hier";
        // scalar offsets, independent of UTF-8 byte widths
        assert_eq!(char_slice(text, 3, 10), "patiënt");
        let a = Annotation::new(text, 3, 10, "Other").unwrap();
        assert_eq!(a.surface, "patiënt");
    }

    #[test]
    fn document_validate_catches_surface_mismatch() {
        let mut d = Document::new("d1", "Jan Jansen");
        d.annotations.push(Annotation {
            start: 0,
            end: 3,
            tag: "Name".into(),
            surface: "JAN".into(),
        });
        assert!(d.validate().is_err());
    }
}
