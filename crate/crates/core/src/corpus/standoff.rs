//! Standoff annotation I/O: a UTF-8 text file plus a line-oriented `.ann`
//! file with records `T<n>\t<TAG> <start> <end>\t<surface>`.
//!
//! Offsets count Unicode scalar values. Tags containing `/` are written
//! with `/` replaced by `_` (`Phone_Fax`) and restored on read. Newlines
//! inside a surface are written as spaces; the text slice remains
//! authoritative.

use super::{char_len, char_slice, Annotation, Document};
use crate::error::{DeidError, Result};

fn encode_tag(tag: &str) -> String {
    tag.replace('/', "_")
}

fn decode_tag(tag: &str) -> String {
    tag.replace('_', "/")
}

fn normalize_surface(s: &str) -> String {
    s.replace('\n', " ")
}

/// Render a document as `(text, ann)` file contents.
pub fn write_standoff(doc: &Document) -> (String, String) {
    let mut sorted = doc.annotations.clone();
    sorted.sort_by(|a, b| (a.start, a.end, &a.tag).cmp(&(b.start, b.end, &b.tag)));
    let mut ann = String::new();
    for (i, a) in sorted.iter().enumerate() {
        ann.push_str(&format!(
            "T{}\t{} {} {}\t{}\n",
            i + 1,
            encode_tag(&a.tag),
            a.start,
            a.end,
            normalize_surface(&a.surface)
        ));
    }
    (doc.text.clone(), ann)
}

/// Parse `(text, ann)` file contents into a document.
///
/// Errors name the offending line number and annotation id.
pub fn read_standoff(doc_id: &str, text: &str, ann: &str) -> Result<Document> {
    let mut doc = Document::new(doc_id, text);
    let text_len = char_len(text);

    for (lineno, line) in ann.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let loc = format!("{doc_id}.ann line {lineno}");

        let mut fields = line.splitn(3, '\t');
        let id = fields.next().unwrap_or_default();
        let middle = fields
            .next()
            .ok_or_else(|| DeidError::parse(&loc, "expected 3 tab-separated fields"))?;
        let surface = fields
            .next()
            .ok_or_else(|| DeidError::parse(&loc, "expected 3 tab-separated fields"))?;

        if !id.starts_with('T') || id.len() < 2 {
            return Err(DeidError::parse(&loc, format!("invalid annotation id {id:?}")));
        }

        let parts: Vec<&str> = middle.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(DeidError::parse(
                &loc,
                format!("expected \"TAG start end\", found {middle:?}"),
            ));
        }
        let tag = decode_tag(parts[0]);
        let start: usize = parts[1]
            .parse()
            .map_err(|_| DeidError::parse(&loc, format!("invalid start offset {:?}", parts[1])))?;
        let end: usize = parts[2]
            .parse()
            .map_err(|_| DeidError::parse(&loc, format!("invalid end offset {:?}", parts[2])))?;

        if start >= end || end > text_len {
            return Err(DeidError::parse(
                &loc,
                format!("offsets {start}..{end} out of bounds (text length {text_len})"),
            ));
        }
        let slice = char_slice(text, start, end);
        if normalize_surface(&slice) != surface {
            return Err(DeidError::parse(
                &loc,
                format!("surface mismatch at {id}: file has {surface:?}, text slice is {slice:?}"),
            ));
        }
        doc.annotations.push(Annotation {
            start,
            end,
            tag,
            surface: slice,
        });
    }
    doc.sort_annotations();
    Ok(doc)
}
