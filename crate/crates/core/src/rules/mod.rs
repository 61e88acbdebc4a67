//! Unsupervised rule-based PHI tagger: lookup tables, decision rules and
//! fuzzy string matching, plus the tag-set reconciliation utilities used
//! when comparing against learned taggers.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{char_len, char_slice, Annotation, Document, TagSet};
use crate::error::{DeidError, Result};
use crate::nl;

mod matchers;

pub use matchers::FiredMatch;

/// A case-folded lookup list supporting multiword longest-match.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LookupList {
    /// Folded full entries, for membership tests.
    entries: BTreeSet<String>,
    /// Entries split into folded words, longest first.
    word_seqs: Vec<Vec<String>>,
    max_words: usize,
}

impl LookupList {
    pub fn from_entries<I: IntoIterator<Item = S>, S: AsRef<str>>(items: I) -> Self {
        let mut entries = BTreeSet::new();
        for it in items {
            let folded = it.as_ref().trim().to_lowercase();
            if !folded.is_empty() {
                entries.insert(folded);
            }
        }
        let mut word_seqs: Vec<Vec<String>> = entries
            .iter()
            .map(|e| e.split_whitespace().map(|w| w.to_string()).collect())
            .collect();
        word_seqs.sort_by(|a: &Vec<String>, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        let max_words = word_seqs.iter().map(|w| w.len()).max().unwrap_or(0);
        LookupList {
            entries,
            word_seqs,
            max_words,
        }
    }

    /// Parse a list file: UTF-8, one entry per line, `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| DeidError::parse(path.display().to_string(), e.to_string()))?;
        Ok(Self::parse(&content))
    }

    pub fn parse(content: &str) -> Self {
        Self::from_entries(content.lines().filter_map(|l| {
            let l = l.split('#').next().unwrap_or("").trim();
            (!l.is_empty()).then_some(l)
        }))
    }

    pub fn contains(&self, folded: &str) -> bool {
        self.entries.contains(folded)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn word_seqs(&self) -> &[Vec<String>] {
        &self.word_seqs
    }

    pub fn max_words(&self) -> usize {
        self.max_words
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.entries.iter()
    }
}

/// Per-category pattern toggles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatcherToggles {
    pub date: bool,
    pub phone_fax: bool,
    pub email: bool,
    pub url_ip: bool,
    pub ssn: bool,
    pub name: bool,
    pub initials: bool,
    pub age: bool,
    pub institution: bool,
    pub address: bool,
}

impl Default for MatcherToggles {
    fn default() -> Self {
        MatcherToggles {
            date: true,
            phone_fax: true,
            email: true,
            url_ip: true,
            ssn: true,
            name: true,
            initials: true,
            age: true,
            institution: true,
            address: true,
        }
    }
}

/// Configuration of the rule tagger: lookup lists, titles, fuzzy matching
/// budget and per-category toggles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleConfig {
    pub first_names: LookupList,
    pub surnames: LookupList,
    pub institutions: LookupList,
    pub locations: LookupList,
    pub titles: Vec<String>,
    pub fuzzy_max_edits: u8,
    pub toggles: MatcherToggles,
}

impl RuleConfig {
    /// Built-in configuration backed by the bundled Dutch lists.
    pub fn builtin_nl() -> Self {
        RuleConfig {
            first_names: LookupList::from_entries(nl::FIRST_NAMES),
            surnames: LookupList::from_entries(nl::SURNAMES),
            institutions: LookupList::from_entries(nl::INSTITUTIONS),
            locations: LookupList::from_entries(
                nl::CITIES.iter().chain(nl::STREETS.iter()).chain(nl::COUNTRIES.iter()),
            ),
            titles: nl::TITLES.iter().map(|s| s.to_string()).collect(),
            fuzzy_max_edits: 1,
            toggles: MatcherToggles::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fuzzy_max_edits > 2 {
            return Err(DeidError::config(
                "fuzzy_max_edits must be 0, 1 or 2".to_string(),
            ));
        }
        Ok(())
    }
}

/// Serialized form of [`RuleConfig`]: list file paths plus settings.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuleConfigFile {
    pub first_names: Option<String>,
    pub surnames: Option<String>,
    pub institutions: Option<String>,
    pub locations: Option<String>,
    pub titles: Option<Vec<String>>,
    pub fuzzy_max_edits: Option<u8>,
    pub toggles: Option<MatcherToggles>,
}

impl RuleConfigFile {
    /// Materialize the configuration, resolving relative list paths
    /// against `base`. Unset lists fall back to the built-ins.
    pub fn load(&self, base: &Path) -> Result<RuleConfig> {
        let mut cfg = RuleConfig::builtin_nl();
        let resolve = |p: &str| -> std::path::PathBuf {
            let pb = Path::new(p);
            if pb.is_absolute() {
                pb.to_path_buf()
            } else {
                base.join(pb)
            }
        };
        if let Some(p) = &self.first_names {
            cfg.first_names = LookupList::from_file(&resolve(p))?;
        }
        if let Some(p) = &self.surnames {
            cfg.surnames = LookupList::from_file(&resolve(p))?;
        }
        if let Some(p) = &self.institutions {
            cfg.institutions = LookupList::from_file(&resolve(p))?;
        }
        if let Some(p) = &self.locations {
            cfg.locations = LookupList::from_file(&resolve(p))?;
        }
        if let Some(t) = &self.titles {
            cfg.titles = t.clone();
        }
        if let Some(f) = self.fuzzy_max_edits {
            cfg.fuzzy_max_edits = f;
        }
        if let Some(t) = &self.toggles {
            cfg.toggles = t.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Category priority for overlap resolution: direct identifiers first.
fn tag_priority(tag: &str) -> u8 {
    match tag {
        "Name" => 0,
        "Date" => 1,
        "Address" => 2,
        "Phone/Fax" => 3,
        "Email" => 4,
        "URL/IP" => 5,
        "SSN" => 6,
        "ID" => 7,
        "Hospital" | "Organization" | "Care Institute" | "Internal Location" => 8,
        _ => 9,
    }
}

/// Resolve overlapping annotations: longer span wins, ties go to the
/// higher-priority category, remaining ties to the earlier start.
pub fn resolve_overlaps(anns: Vec<Annotation>) -> Vec<Annotation> {
    let mut ranked = anns;
    // longest first, then category priority, then earlier start
    ranked.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then(tag_priority(&a.tag).cmp(&tag_priority(&b.tag)))
            .then(a.start.cmp(&b.start))
            .then(a.end.cmp(&b.end))
            .then(a.tag.cmp(&b.tag))
    });
    let mut kept: Vec<Annotation> = Vec::new();
    for cand in ranked {
        if kept.iter().all(|k| !k.overlaps(&cand)) {
            kept.push(cand);
        }
    }
    kept.sort_by(|a, b| (a.start, a.end, &a.tag).cmp(&(b.start, b.end, &b.tag)));
    kept.dedup();
    kept
}

/// Strip configured titles from the front of Name/Initials annotations.
/// A span never grows; an annotation that is only a title is dropped.
pub fn strip_titles(anns: Vec<Annotation>, text: &str, titles: &[String]) -> Vec<Annotation> {
    let folded_titles: Vec<String> = titles.iter().map(|t| t.to_lowercase()).collect();
    let mut out = Vec::with_capacity(anns.len());
    'ann: for mut a in anns {
        if a.tag != "Name" && a.tag != "Initials" {
            out.push(a);
            continue;
        }
        loop {
            let surface_folded = a.surface.to_lowercase();
            let mut advanced = false;
            for t in &folded_titles {
                if t.is_empty() {
                    continue;
                }
                if surface_folded == *t {
                    continue 'ann; // title-only annotation: drop
                }
                if let Some(rest) = surface_folded.strip_prefix(t.as_str()) {
                    if rest.starts_with(char::is_whitespace) {
                        let skip = char_len(t)
                            + rest.chars().take_while(|c| c.is_whitespace()).count();
                        a.start += skip;
                        a.surface = char_slice(text, a.start, a.end);
                        advanced = true;
                        break;
                    }
                }
            }
            if !advanced {
                break;
            }
        }
        if a.start < a.end {
            out.push(a);
        }
    }
    out
}

/// A total source→target tag rename.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagMapping {
    pub map: BTreeMap<String, String>,
}

impl TagMapping {
    pub fn identity(tagset: &TagSet) -> Self {
        TagMapping {
            map: tagset.tags().iter().map(|t| (t.clone(), t.clone())).collect(),
        }
    }

    /// Fold the four specific location tags into a single `Named
    /// Location`, as needed when scoring taggers that do not
    /// distinguish them.
    pub fn named_location(tagset: &TagSet) -> Self {
        let mut m = Self::identity(tagset);
        for t in ["Hospital", "Care Institute", "Organization", "Internal Location"] {
            if tagset.contains(t) {
                m.map.insert(t.to_string(), "Named Location".to_string());
            }
        }
        m
    }
}

/// Rewrite annotation tags through `mapping`; spans are untouched.
/// An occurring tag missing from the mapping is an error.
pub fn map_tagset(anns: Vec<Annotation>, mapping: &TagMapping) -> Result<Vec<Annotation>> {
    anns.into_iter()
        .map(|mut a| match mapping.map.get(&a.tag) {
            Some(t) => {
                a.tag = t.clone();
                Ok(a)
            }
            None => Err(DeidError::data(format!(
                "tag mapping has no entry for occurring tag {:?}",
                a.tag
            ))),
        })
        .collect()
}

/// Run the rule tagger over one document.
///
/// Matches are produced per category, titles are stripped and overlaps
/// resolved; the result is a non-overlapping annotation set over the
/// built-in tag set.
pub fn tag_rules(doc: &Document, cfg: &RuleConfig) -> Result<Vec<Annotation>> {
    cfg.validate()?;
    let fired = matchers::run_matchers(&doc.text, cfg);
    let mut anns = Vec::with_capacity(fired.len());
    for m in fired {
        anns.push(Annotation::new(&doc.text, m.start, m.end, m.tag)?);
    }
    let anns = strip_titles(anns, &doc.text, &cfg.titles);
    Ok(resolve_overlaps(anns))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ann(text: &str, start: usize, end: usize, tag: &str) -> Annotation {
        Annotation::new(text, start, end, tag).unwrap()
    }

    #[test]
    fn fig1_phone_number_is_tagged() {
        let doc = Document::new("d", "Verrichting Telefonisch consult ANW (t: 06-7802651)");
        let anns = tag_rules(&doc, &RuleConfig::builtin_nl()).unwrap();
        let phone: Vec<_> = anns.iter().filter(|a| a.tag == "Phone/Fax").collect();
        assert_eq!(phone.len(), 1);
        assert_eq!(phone[0].surface, "06-7802651");
    }

    #[test]
    fn email_matches_full_address() {
        let doc = Document::new("d", "Mail naar jan.jansen@voorbeeld.nl voor vragen.");
        let anns = tag_rules(&doc, &RuleConfig::builtin_nl()).unwrap();
        let email: Vec<_> = anns.iter().filter(|a| a.tag == "Email").collect();
        assert_eq!(email.len(), 1);
        assert_eq!(email[0].surface, "jan.jansen@voorbeeld.nl");
    }

    #[test]
    fn nothing_fires_on_plain_text_with_empty_lists() {
        let mut cfg = RuleConfig::builtin_nl();
        cfg.first_names = LookupList::default();
        cfg.surnames = LookupList::default();
        cfg.institutions = LookupList::default();
        cfg.locations = LookupList::default();
        let doc = Document::new("d", "De patiënt heeft koorts.");
        let anns = tag_rules(&doc, &cfg).unwrap();
        assert!(anns.is_empty(), "{anns:?}");
    }

    #[test]
    fn resolve_prefers_longer_span() {
        let text = "26-04-2017";
        let kept = resolve_overlaps(vec![ann(text, 0, 10, "Date"), ann(text, 0, 4, "ID")]);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].tag, "Date");
    }

    #[test]
    fn resolve_breaks_ties_by_priority_then_start() {
        let text = "Jan Jansen";
        let kept = resolve_overlaps(vec![ann(text, 0, 3, "Initials"), ann(text, 0, 3, "Name")]);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].tag, "Name");

        // same length, same priority, overlapping: earlier start wins
        let text2 = "abcdef";
        let kept2 = resolve_overlaps(vec![ann(text2, 2, 5, "Date"), ann(text2, 1, 4, "Date")]);
        assert_eq!(kept2.len(), 1);
        assert_eq!(kept2[0].start, 1);
    }

    #[test]
    fn resolve_keeps_disjoint_spans() {
        let text = "Jan Jansen 26-04-2017";
        let kept = resolve_overlaps(vec![ann(text, 0, 10, "Name"), ann(text, 11, 21, "Date")]);
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn strip_titles_advances_past_title() {
        let text = "Dhr. Jan Jansen";
        let titles = vec!["Dhr.".to_string()];
        let out = strip_titles(vec![ann(text, 0, 15, "Name")], text, &titles);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].surface, "Jan Jansen");

        // no title: unchanged
        let text2 = "Jan Jansen";
        let out2 = strip_titles(vec![ann(text2, 0, 10, "Name")], text2, &titles);
        assert_eq!(out2[0].surface, "Jan Jansen");

        // title-only annotation is dropped
        let out3 = strip_titles(vec![ann(text, 0, 4, "Name")], text, &titles);
        assert!(out3.is_empty());
    }

    #[test]
    fn strip_titles_never_grows_spans() {
        let text = "Mw. Dr. Anna de Wit";
        let titles: Vec<String> = nl::TITLES.iter().map(|s| s.to_string()).collect();
        let input = ann(text, 0, 19, "Name");
        let out = strip_titles(vec![input.clone()], text, &titles);
        assert_eq!(out.len(), 1);
        assert!(out[0].start >= input.start && out[0].end == input.end);
        assert_eq!(out[0].surface, "Anna de Wit");
    }

    #[test]
    fn map_tagset_folds_locations() {
        let ts = TagSet::nut16();
        let text = "Sint Anna Ziekenhuis";
        let mapped = map_tagset(
            vec![ann(text, 0, 20, "Hospital")],
            &TagMapping::named_location(&ts),
        )
        .unwrap();
        assert_eq!(mapped[0].tag, "Named Location");

        let same = map_tagset(vec![ann(text, 0, 20, "Hospital")], &TagMapping::identity(&ts)).unwrap();
        assert_eq!(same[0].tag, "Hospital");
    }

    #[test]
    fn map_tagset_errors_on_missing_tag() {
        let mut mapping = TagMapping::default();
        mapping.map.insert("Name".into(), "Name".into());
        let text = "88";
        let err = map_tagset(vec![ann(text, 0, 2, "Age")], &mapping).unwrap_err();
        assert!(err.to_string().contains("Age"), "{err}");
    }

    #[test]
    fn tag_rules_output_never_overlaps() {
        let doc = Document::new(
            "d",
            "Dhr. Jan Jansen (BSN 111222333) belde 06-12345678 op 26-04-2017 vanuit Amsterdam.",
        );
        let anns = tag_rules(&doc, &RuleConfig::builtin_nl()).unwrap();
        for i in 0..anns.len() {
            for j in i + 1..anns.len() {
                assert!(!anns[i].overlaps(&anns[j]), "{:?} vs {:?}", anns[i], anns[j]);
            }
        }
        assert!(anns.iter().any(|a| a.tag == "Name" && a.surface == "Jan Jansen"));
    }

    #[test]
    fn lookup_list_parses_comments_and_blank_lines() {
        let l = LookupList::parse("# comment\nJan\n\nPiet # inline\n");
        assert_eq!(l.len(), 2);
        assert!(l.contains("jan"));
        assert!(l.contains("piet"));
    }
}
