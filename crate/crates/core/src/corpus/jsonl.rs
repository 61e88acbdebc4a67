//! Document JSONL: one JSON object per line,
//! `{"doc_id", "text", "meta": {...}, "annotations": [{"start","end","tag"}]}`.
//!
//! Surfaces are not stored; they are re-derived from the text on read.
//! An optional `"attrs"` array carries per-token POS/NER columns.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{char_len, char_slice, Annotation, Document, TokenAttrs};
use crate::error::{DeidError, Result};

#[derive(Serialize, Deserialize)]
struct JsonAnnotation {
    start: usize,
    end: usize,
    tag: String,
}

#[derive(Serialize, Deserialize)]
struct JsonDocument {
    doc_id: String,
    text: String,
    #[serde(default)]
    meta: BTreeMap<String, String>,
    #[serde(default)]
    annotations: Vec<JsonAnnotation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attrs: Option<Vec<TokenAttrs>>,
}

fn document_from_json(j: JsonDocument, location: &str) -> Result<Document> {
    if j.doc_id.is_empty() {
        return Err(DeidError::parse(location, "doc_id must be non-empty"));
    }
    let text_len = char_len(&j.text);
    let mut doc = Document::new(j.doc_id, j.text);
    doc.meta = j.meta;
    doc.attrs = j.attrs;
    for a in j.annotations {
        if a.start >= a.end || a.end > text_len {
            return Err(DeidError::parse(
                location,
                format!(
                    "doc {}: annotation {}..{} out of bounds (text length {})",
                    doc.doc_id, a.start, a.end, text_len
                ),
            ));
        }
        let surface = char_slice(&doc.text, a.start, a.end);
        doc.annotations.push(Annotation {
            start: a.start,
            end: a.end,
            tag: a.tag,
            surface,
        });
    }
    doc.sort_annotations();
    Ok(doc)
}

fn document_to_json(doc: &Document) -> JsonDocument {
    let mut sorted = doc.annotations.clone();
    sorted.sort_by(|a, b| (a.start, a.end, &a.tag).cmp(&(b.start, b.end, &b.tag)));
    JsonDocument {
        doc_id: doc.doc_id.clone(),
        text: doc.text.clone(),
        meta: doc.meta.clone(),
        annotations: sorted
            .into_iter()
            .map(|a| JsonAnnotation {
                start: a.start,
                end: a.end,
                tag: a.tag,
            })
            .collect(),
        attrs: doc.attrs.clone(),
    }
}

/// Parse documents from JSONL content. `source` names the input in errors.
pub fn parse_jsonl(content: &str, source: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let location = format!("{source} line {}", lineno + 1);
        let j: JsonDocument = serde_json::from_str(line)
            .map_err(|e| DeidError::parse(&location, e.to_string()))?;
        docs.push(document_from_json(j, &location)?);
    }
    Ok(docs)
}

pub fn to_jsonl(docs: &[Document]) -> Result<String> {
    let mut out = String::new();
    for d in docs {
        out.push_str(&serde_json::to_string(&document_to_json(d))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn read_jsonl(path: &Path) -> Result<Vec<Document>> {
    let file = File::open(path)
        .map_err(|e| DeidError::parse(path.display().to_string(), e.to_string()))?;
    let mut content = String::new();
    let mut reader = BufReader::new(file);
    std::io::Read::read_to_string(&mut reader, &mut content)?;
    parse_jsonl(&content, &path.display().to_string())
}

pub fn write_jsonl(docs: &[Document], path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    w.write_all(to_jsonl(docs)?.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Read newline-delimited JSON from any reader (used by `-` stdin inputs).
pub fn read_jsonl_from(reader: impl BufRead, source: &str) -> Result<Vec<Document>> {
    let mut content = String::new();
    let mut reader = reader;
    std::io::Read::read_to_string(&mut reader, &mut content)?;
    parse_jsonl(&content, source)
}
