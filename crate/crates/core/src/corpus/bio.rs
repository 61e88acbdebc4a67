//! BIO encoding, decoding and repair.

use serde::{Deserialize, Serialize};

use super::{char_slice, Annotation, BioSequence, TagSet, TokenizedDoc};
use crate::error::{DeidError, Result};

/// How annotation boundaries that disagree with token boundaries are
/// handled during BIO encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignMode {
    /// Drop any annotation whose boundary falls inside a token and
    /// record it in the report.
    Strict,
    /// Expand annotation boundaries outward to the enclosing token
    /// boundaries before labelling.
    Snap,
}

/// One annotation that could not be projected onto the token sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentFailure {
    pub annotation: Annotation,
    pub reason: String,
}

/// Record of annotations dropped during BIO encoding.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub failures: Vec<AlignmentFailure>,
}

impl AlignmentReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A parsed BIO label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Label<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
}

pub fn parse_label(s: &str) -> Result<Label<'_>> {
    if s == "O" {
        return Ok(Label::Outside);
    }
    if let Some(tag) = s.strip_prefix("B-") {
        if !tag.is_empty() {
            return Ok(Label::Begin(tag));
        }
    }
    if let Some(tag) = s.strip_prefix("I-") {
        if !tag.is_empty() {
            return Ok(Label::Inside(tag));
        }
    }
    Err(DeidError::data(format!("malformed BIO label: {s:?}")))
}

fn check_no_overlap(anns: &[Annotation]) -> Result<()> {
    let mut sorted: Vec<&Annotation> = anns.iter().collect();
    sorted.sort_by_key(|a| (a.start, a.end));
    for w in sorted.windows(2) {
        if w[0].overlaps(w[1]) {
            return Err(DeidError::data(format!(
                "overlapping annotations: {:?} {}..{} and {:?} {}..{} (resolve overlaps first)",
                w[0].tag, w[0].start, w[0].end, w[1].tag, w[1].start, w[1].end
            )));
        }
    }
    Ok(())
}

/// Project character-offset annotations onto the token grid as BIO labels.
///
/// An annotation spanning a sentence boundary yields a fresh `B-` run in
/// each sentence it touches. In snap mode two annotations can expand onto
/// the same token; the later one (in start order) is dropped and recorded.
pub fn to_bio(
    tdoc: &TokenizedDoc,
    anns: &[Annotation],
    tagset: &TagSet,
    mode: AlignMode,
) -> Result<(Vec<BioSequence>, AlignmentReport)> {
    for a in anns {
        if !tagset.contains(&a.tag) {
            return Err(DeidError::data(format!(
                "annotation tag {:?} not in tag set {:?}",
                a.tag,
                tagset.name()
            )));
        }
    }
    check_no_overlap(anns)?;

    // flat token table: (sentence, index-in-sentence, start, end)
    let mut flat: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (si, sent) in tdoc.sentences.iter().enumerate() {
        for (ti, tok) in sent.iter().enumerate() {
            flat.push((si, ti, tok.start, tok.end));
        }
    }

    let mut labels: Vec<Vec<String>> = tdoc
        .sentences
        .iter()
        .map(|s| vec!["O".to_string(); s.len()])
        .collect();
    let mut report = AlignmentReport::default();

    let mut sorted: Vec<&Annotation> = anns.iter().collect();
    sorted.sort_by(|a, b| (a.start, a.end, &a.tag).cmp(&(b.start, b.end, &b.tag)));

    'ann: for ann in sorted {
        let covered: Vec<&(usize, usize, usize, usize)> = match mode {
            AlignMode::Strict => {
                // a boundary strictly inside a token is a tokenization failure
                for &(_, _, ts, te) in &flat {
                    let start_inside = ts < ann.start && ann.start < te;
                    let end_inside = ts < ann.end && ann.end < te;
                    if start_inside || end_inside {
                        report.failures.push(AlignmentFailure {
                            annotation: ann.clone(),
                            reason: format!(
                                "boundary falls inside token {}..{}",
                                ts, te
                            ),
                        });
                        continue 'ann;
                    }
                }
                flat.iter()
                    .filter(|&&(_, _, ts, te)| ts >= ann.start && te <= ann.end)
                    .collect()
            }
            AlignMode::Snap => flat
                .iter()
                .filter(|&&(_, _, ts, te)| ts < ann.end && ann.start < te)
                .collect(),
        };

        if covered.is_empty() {
            report.failures.push(AlignmentFailure {
                annotation: ann.clone(),
                reason: "no tokens covered".to_string(),
            });
            continue;
        }
        if covered.iter().any(|&&(si, ti, _, _)| labels[si][ti] != "O") {
            report.failures.push(AlignmentFailure {
                annotation: ann.clone(),
                reason: "token already labelled by an earlier annotation after snapping".to_string(),
            });
            continue;
        }

        let mut prev_sentence = usize::MAX;
        for &&(si, ti, _, _) in &covered {
            let prefix = if si != prev_sentence { "B-" } else { "I-" };
            labels[si][ti] = format!("{prefix}{}", ann.tag);
            prev_sentence = si;
        }
    }

    Ok((labels.into_iter().map(BioSequence::new).collect(), report))
}

/// Decode BIO sequences back into annotations. Sequences must be valid
/// (repaired); an `I-` label without a matching predecessor is an error.
pub fn from_bio(tdoc: &TokenizedDoc, seqs: &[BioSequence]) -> Result<Vec<Annotation>> {
    if seqs.len() != tdoc.sentences.len() {
        return Err(DeidError::data(format!(
            "expected {} label sequences, got {}",
            tdoc.sentences.len(),
            seqs.len()
        )));
    }
    let mut anns = Vec::new();
    for (si, (sent, seq)) in tdoc.sentences.iter().zip(seqs).enumerate() {
        if sent.len() != seq.len() {
            return Err(DeidError::data(format!(
                "sentence {si}: {} tokens but {} labels",
                sent.len(),
                seq.len()
            )));
        }
        let mut run: Option<(usize, usize, &str)> = None; // (first, last, tag)
        for (ti, raw) in seq.labels.iter().enumerate() {
            match parse_label(raw)? {
                Label::Outside => {
                    if let Some((a, b, tag)) = run.take() {
                        anns.push(make_annotation(tdoc, sent[a].start, sent[b].end, tag));
                    }
                }
                Label::Begin(tag) => {
                    if let Some((a, b, prev)) = run.take() {
                        anns.push(make_annotation(tdoc, sent[a].start, sent[b].end, prev));
                    }
                    run = Some((ti, ti, tag));
                }
                Label::Inside(tag) => match run {
                    Some((_, ref mut b, prev)) if prev == tag => *b = ti,
                    _ => {
                        return Err(DeidError::data(format!(
                            "invalid transition to I-{tag} at sentence {si} position {ti} (repair first)"
                        )))
                    }
                },
            }
        }
        if let Some((a, b, tag)) = run {
            anns.push(make_annotation(tdoc, sent[a].start, sent[b].end, tag));
        }
    }
    Ok(anns)
}

fn make_annotation(tdoc: &TokenizedDoc, start: usize, end: usize, tag: &str) -> Annotation {
    Annotation {
        start,
        end,
        tag: tag.to_string(),
        surface: char_slice(&tdoc.text, start, end),
    }
}

/// Replace invalid `I-` labels with `B-` labels. `O` and `B-` labels are
/// never touched; the result always passes [`validate_bio`]. Idempotent.
pub fn repair_bio(seq: &BioSequence) -> Result<BioSequence> {
    let mut out = Vec::with_capacity(seq.labels.len());
    let mut prev_tag: Option<String> = None;
    for raw in &seq.labels {
        let fixed = match parse_label(raw)? {
            Label::Outside => {
                prev_tag = None;
                "O".to_string()
            }
            Label::Begin(tag) => {
                prev_tag = Some(tag.to_string());
                raw.clone()
            }
            Label::Inside(tag) => {
                let valid = prev_tag.as_deref() == Some(tag);
                prev_tag = Some(tag.to_string());
                if valid {
                    raw.clone()
                } else {
                    format!("B-{tag}")
                }
            }
        };
        out.push(fixed);
    }
    Ok(BioSequence::new(out))
}

/// True when no `I-t` is preceded by `O` or by a differently tagged label.
pub fn validate_bio(seq: &BioSequence) -> Result<bool> {
    let mut prev_tag: Option<String> = None;
    for raw in &seq.labels {
        match parse_label(raw)? {
            Label::Outside => prev_tag = None,
            Label::Begin(tag) => prev_tag = Some(tag.to_string()),
            Label::Inside(tag) => {
                if prev_tag.as_deref() != Some(tag) {
                    return Ok(false);
                }
                prev_tag = Some(tag.to_string());
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;

    fn seq(labels: &[&str]) -> BioSequence {
        BioSequence::new(labels.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn full_containment_yields_b_then_i() {
        let td = tokenize("Jan Jansen belde");
        let ann = Annotation::new(&td.text, 0, 10, "Name").unwrap();
        let (seqs, report) = to_bio(&td, &[ann], &TagSet::nut16(), AlignMode::Strict).unwrap();
        assert!(report.is_clean());
        assert_eq!(seqs[0].labels, vec!["B-Name", "I-Name", "O"]);
    }

    #[test]
    fn strict_mode_drops_mid_token_boundary() {
        // annotation on "2016" inside the unsplittable token "2016-U"
        let td = tokenize("code 2016-U");
        let ann = Annotation::new(&td.text, 5, 9, "Date").unwrap();
        let (seqs, report) = to_bio(&td, &[ann], &TagSet::nut16(), AlignMode::Strict).unwrap();
        assert_eq!(seqs[0].labels, vec!["O", "O"]);
        assert_eq!(report.failures.len(), 1);
    }

    #[test]
    fn snap_mode_expands_to_token_boundary() {
        let td = tokenize("code 2016-U");
        let ann = Annotation::new(&td.text, 5, 9, "Date").unwrap();
        let (seqs, report) = to_bio(&td, &[ann], &TagSet::nut16(), AlignMode::Snap).unwrap();
        assert!(report.is_clean());
        assert_eq!(seqs[0].labels, vec!["O", "B-Date"]);
    }

    #[test]
    fn slash_separated_years_tag_as_b_o_b_once_tokenized() {
        let td = tokenize("2016/2017");
        let a1 = Annotation::new(&td.text, 0, 4, "Date").unwrap();
        let a2 = Annotation::new(&td.text, 5, 9, "Date").unwrap();
        let (seqs, report) = to_bio(&td, &[a1, a2], &TagSet::nut16(), AlignMode::Strict).unwrap();
        assert!(report.is_clean());
        assert_eq!(seqs[0].labels, vec!["B-Date", "O", "B-Date"]);
    }

    #[test]
    fn overlapping_annotations_are_rejected() {
        let td = tokenize("Jan Jansen");
        let a1 = Annotation::new(&td.text, 0, 10, "Name").unwrap();
        let a2 = Annotation::new(&td.text, 4, 10, "Name").unwrap();
        assert!(to_bio(&td, &[a1, a2], &TagSet::nut16(), AlignMode::Strict).is_err());
    }

    #[test]
    fn unknown_tag_is_rejected() {
        let td = tokenize("Jan");
        let ann = Annotation::new(&td.text, 0, 3, "Bogus").unwrap();
        assert!(to_bio(&td, &[ann], &TagSet::nut16(), AlignMode::Strict).is_err());
    }

    #[test]
    fn from_bio_rebuilds_annotations() {
        let td = tokenize("Jan Jansen belde");
        let anns = from_bio(&td, &[seq(&["B-Name", "I-Name", "O"])]).unwrap();
        assert_eq!(anns.len(), 1);
        assert_eq!(anns[0].surface, "Jan Jansen");
        assert_eq!(anns[0].tag, "Name");

        let none = from_bio(&td, &[seq(&["O", "O", "O"])]).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn from_bio_rejects_unrepaired_sequences() {
        let td = tokenize("Jan Jansen belde");
        assert!(from_bio(&td, &[seq(&["O", "I-Name", "O"])]).is_err());
        assert!(from_bio(&td, &[seq(&["B-Name", "I-Date", "O"])]).is_err());
    }

    #[test]
    fn roundtrip_on_aligned_annotations() {
        let td = tokenize("Dhr. Jan Jansen belde 26-04-2017 om half drie");
        let anns = vec![
            Annotation::new(&td.text, 5, 15, "Name").unwrap(),
            Annotation::new(&td.text, 22, 32, "Date").unwrap(),
        ];
        let (seqs, report) = to_bio(&td, &anns, &TagSet::nut16(), AlignMode::Strict).unwrap();
        assert!(report.is_clean());
        let back = from_bio(&td, &seqs).unwrap();
        assert_eq!(back, anns);
    }

    #[test]
    fn repair_fixes_invalid_i_tags() {
        assert_eq!(repair_bio(&seq(&["O", "I-Name"])).unwrap().labels, vec!["O", "B-Name"]);
        assert_eq!(
            repair_bio(&seq(&["B-Name", "I-Name"])).unwrap().labels,
            vec!["B-Name", "I-Name"]
        );
        assert_eq!(
            repair_bio(&seq(&["I-Date", "I-Date"])).unwrap().labels,
            vec!["B-Date", "I-Date"]
        );
        assert_eq!(
            repair_bio(&seq(&["B-Name", "I-Date"])).unwrap().labels,
            vec!["B-Name", "B-Date"]
        );
    }

    #[test]
    fn repair_is_idempotent_and_validates() {
        let cases = vec![
            seq(&["O", "I-Name", "I-Name", "O", "I-Date"]),
            seq(&["I-Date", "I-Date", "B-Name", "I-Date"]),
        ];
        for s in cases {
            let once = repair_bio(&s).unwrap();
            let twice = repair_bio(&once).unwrap();
            assert_eq!(once, twice);
            assert!(validate_bio(&once).unwrap());
        }
    }
}
