//! Surrogate generation: replace every PHI annotation with a realistic
//! artificial value while preserving document continuity and format,
//! remapping all offsets.
//!
//! The plan is built in a single pass over the corpus (institution-style
//! tags are shuffled dataset-wide, everything else is drawn per
//! document) and applied per document afterwards. Leak freedom is
//! enforced per document: none of a document's original PHI strings
//! (length ≥ 3, case-folded) may survive in its own output text;
//! surrogates colliding with them are re-drawn.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{char_len, char_slice, Annotation, Document};
use crate::error::{DeidError, Result};
use crate::nl;
use crate::rules::LookupList;

pub mod dates;

pub use dates::{infer_date_format, shift_date, shift_date_string, DateShift, FormatPattern};

/// Tags whose surrogates come from shuffling observed values.
const SHUFFLED_TAGS: [&str; 4] = ["Hospital", "Care Institute", "Organization", "Internal Location"];

/// Tags replaced by character-class substitution.
const CHARCLASS_TAGS: [&str; 6] = ["Phone/Fax", "Email", "URL/IP", "SSN", "ID", "Initials"];

/// Tags that always go to the manual review queue.
const REVIEW_TAGS: [&str; 2] = ["Profession", "Other"];

const MAX_DRAWS: usize = 200;

/// Name and location pools used to draw surrogates.
#[derive(Debug, Clone, Default)]
pub struct SurrogateResources {
    pub given_names: Vec<String>,
    pub family_names: Vec<String>,
    pub cities: Vec<String>,
    pub streets: Vec<String>,
    pub countries: Vec<String>,
    pub institutions: Vec<String>,
}

fn read_list(path: &std::path::Path) -> Result<Vec<String>> {
    Ok(LookupList::from_file(path)?.iter().cloned().collect())
}

impl SurrogateResources {
    pub fn builtin_nl() -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        SurrogateResources {
            given_names: v(&nl::FIRST_NAMES),
            family_names: v(&nl::SURNAMES),
            cities: v(&nl::CITIES),
            streets: v(&nl::STREETS),
            countries: v(&nl::COUNTRIES),
            institutions: v(&nl::INSTITUTIONS),
        }
    }

    /// Load pools from a directory of line-oriented list files
    /// (`given_names.txt`, `family_names.txt`, `cities.txt`,
    /// `streets.txt`, `countries.txt`, `institutions.txt`). Missing
    /// files leave the pool empty; emptiness is checked when a pool is
    /// first needed.
    pub fn from_dir(dir: &std::path::Path) -> Result<Self> {
        let load = |name: &str| -> Result<Vec<String>> {
            let p = dir.join(name);
            if p.exists() {
                read_list(&p)
            } else {
                Ok(Vec::new())
            }
        };
        Ok(SurrogateResources {
            given_names: load("given_names.txt")?,
            family_names: load("family_names.txt")?,
            cities: load("cities.txt")?,
            streets: load("streets.txt")?,
            countries: load("countries.txt")?,
            institutions: load("institutions.txt")?,
        })
    }

    fn pool(&self, category: &str) -> Result<&[String]> {
        let pool: &[String] = match category {
            "given-name" => &self.given_names,
            "family-name" => &self.family_names,
            "city" => &self.cities,
            "street" => &self.streets,
            "country" => &self.countries,
            "institution" => &self.institutions,
            _ => &[],
        };
        if pool.is_empty() {
            return Err(DeidError::MissingResource(format!(
                "surrogate pool {category:?} is empty but needed"
            )));
        }
        Ok(pool)
    }
}

/// Replace digits, lowercase and uppercase letters with random characters
/// of the same class; everything else is preserved in place.
pub fn substitute_charclass(s: &str, rng: &mut ChaCha8Rng) -> String {
    s.chars()
        .map(|c| {
            if c.is_numeric() {
                char::from(b'0' + rng.gen_range(0..10u8))
            } else if c.is_uppercase() {
                char::from(b'A' + rng.gen_range(0..26u8))
            } else if c.is_lowercase() {
                char::from(b'a' + rng.gen_range(0..26u8))
            } else {
                c
            }
        })
        .collect()
}

/// Rewrite integers above 89 down to 89; surrounding words are kept.
pub fn cap_age(s: &str) -> Result<String> {
    let mut out = String::new();
    let mut digits = String::new();
    let mut saw_integer = false;
    for c in s.chars().chain(std::iter::once('\u{0}')) {
        if c.is_ascii_digit() {
            digits.push(c);
            continue;
        }
        if !digits.is_empty() {
            saw_integer = true;
            match digits.parse::<u64>() {
                Ok(v) if v > 89 => out.push_str("89"),
                _ => out.push_str(&digits),
            }
            digits.clear();
        }
        if c != '\u{0}' {
            out.push(c);
        }
    }
    if !saw_integer {
        return Err(DeidError::data(format!("age string contains no integer: {s:?}")));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub tag: String,
    pub surface: String,
    pub surrogate: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewItem {
    pub doc_id: String,
    pub start: usize,
    pub end: usize,
    pub tag: String,
    pub surface: String,
    pub placeholder: String,
}

/// Deterministic PHI → surrogate mapping for a whole corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogatePlan {
    pub seed: u64,
    pub doc_shifts: BTreeMap<String, DateShift>,
    /// Per document: (tag, surface) → surrogate, sorted.
    pub mappings: BTreeMap<String, Vec<MappingEntry>>,
    /// Per document: [old_start, old_end, new_start, new_end] per
    /// annotation, in start order.
    pub remap: BTreeMap<String, Vec<[usize; 4]>>,
    pub review: Vec<ReviewItem>,
}

fn folded_if_long(s: &str) -> Option<String> {
    (char_len(s) >= 3).then(|| s.to_lowercase())
}

fn placeholder_for(tag: &str) -> String {
    format!("[REVIEW:{tag}]")
}

/// Word/separator segmentation used for names and addresses.
fn split_segments(s: &str) -> Vec<(bool, String)> {
    let mut out: Vec<(bool, String)> = Vec::new();
    for c in s.chars() {
        let word = c.is_alphanumeric();
        match out.last_mut() {
            Some((w, buf)) if *w == word => buf.push(c),
            _ => out.push((word, c.to_string())),
        }
    }
    out
}

struct PlanBuilder<'a> {
    resources: &'a SurrogateResources,
    streets: LookupList,
    cities: LookupList,
    countries: LookupList,
    given_lookup: BTreeSet<String>,
    /// Dataset-wide value shuffle for institution-style tags.
    shuffles: BTreeMap<(String, String), String>,
    rng: ChaCha8Rng,
}

impl<'a> PlanBuilder<'a> {
    fn draw<'p>(&mut self, pool: &'p [String]) -> &'p String {
        &pool[self.rng.gen_range(0..pool.len())]
    }

    /// Draw from a pool until the value avoids the document's forbidden
    /// strings (case-folded).
    fn draw_avoiding(&mut self, pool: &[String], forbidden: &BTreeSet<String>, what: &str) -> Result<String> {
        for _ in 0..MAX_DRAWS {
            let cand = self.draw(pool).clone();
            if !forbidden.contains(&cand.to_lowercase()) {
                return Ok(cand);
            }
        }
        Err(DeidError::data(format!(
            "could not draw a leak-free surrogate for {what} after {MAX_DRAWS} attempts"
        )))
    }

    fn name_surrogate(&mut self, surface: &str, forbidden: &BTreeSet<String>) -> Result<String> {
        for _ in 0..MAX_DRAWS {
            let mut out = String::new();
            for (is_word, seg) in split_segments(surface) {
                if !is_word {
                    out.push_str(&seg);
                    continue;
                }
                if char_len(&seg) == 1 {
                    out.push_str(&substitute_charclass(&seg, &mut self.rng));
                } else if self.given_lookup.contains(&seg.to_lowercase()) {
                    out.push_str(self.draw(self.resources.pool("given-name")?));
                } else {
                    out.push_str(self.draw(self.resources.pool("family-name")?));
                }
            }
            let folded = out.to_lowercase();
            if !forbidden.contains(&folded) && folded != surface.to_lowercase() {
                return Ok(out);
            }
        }
        Err(DeidError::data(format!(
            "could not draw a leak-free name surrogate for {surface:?}"
        )))
    }

    /// Dictionary-driven address decomposition. Digit words get
    /// character-class substitution; any unmatched alphabetic word sends
    /// the instance to review.
    fn address_surrogate(&mut self, surface: &str, forbidden: &BTreeSet<String>) -> Result<Option<String>> {
        let segments = split_segments(surface);
        let words: Vec<(usize, String)> = segments
            .iter()
            .enumerate()
            .filter(|(_, (w, _))| *w)
            .map(|(i, (_, s))| (i, s.to_lowercase()))
            .collect();

        // longest dictionary match over word sequences
        let mut replacement_for_segment: BTreeMap<usize, Option<String>> = BTreeMap::new(); // first segment -> replacement; later segments of a run -> None
        let mut wi = 0;
        while wi < words.len() {
            if words[wi].1.chars().all(|c| c.is_ascii_digit()) {
                wi += 1;
                continue; // handled per segment below
            }
            let mut matched = 0usize;
            let mut source: Option<&'static str> = None;
            let dicts: [(&LookupList, &'static str); 3] = [
                (&self.streets, "street"),
                (&self.cities, "city"),
                (&self.countries, "country"),
            ];
            for len in (1..=4.min(words.len() - wi)).rev() {
                let joined = words[wi..wi + len]
                    .iter()
                    .map(|(_, w)| w.clone())
                    .collect::<Vec<_>>()
                    .join(" ");
                if let Some((_, name)) = dicts.iter().find(|(d, _)| d.contains(&joined)) {
                    matched = len;
                    source = Some(name);
                    break;
                }
            }
            if matched == 0 {
                if words[wi].1.chars().any(|c| c.is_ascii_digit()) {
                    wi += 1; // mixed alphanumeric (ZIP): charclass below
                    continue;
                }
                return Ok(None); // unmatched residue: review
            }
            let pool = self.resources.pool(source.unwrap())?;
            let rep = self.draw_avoiding(pool, forbidden, "address part")?;
            replacement_for_segment.insert(words[wi].0, Some(rep));
            for (seg_idx, _) in &words[wi + 1..wi + matched] {
                replacement_for_segment.insert(*seg_idx, None);
            }
            // separators inside a replaced run are dropped with it
            wi += matched;
        }

        let mut out = String::new();
        let mut drop_separator_before = false;
        for (i, (is_word, seg)) in segments.iter().enumerate() {
            if !is_word {
                if !drop_separator_before {
                    out.push_str(seg);
                }
                continue;
            }
            match replacement_for_segment.get(&i) {
                Some(Some(rep)) => {
                    out.push_str(rep);
                    drop_separator_before = false;
                }
                Some(None) => {
                    // swallowed by a multiword run; also swallow the
                    // separator that preceded it
                    drop_separator_before = false;
                    continue;
                }
                None => {
                    out.push_str(&substitute_charclass(seg, &mut self.rng));
                    drop_separator_before = false;
                }
            }
        }
        Ok(Some(out))
    }
}

fn build_shuffles(
    corpus: &[Document],
    resources: &SurrogateResources,
    rng: &mut ChaCha8Rng,
) -> BTreeMap<(String, String), String> {
    use rand::seq::SliceRandom;
    let mut out = BTreeMap::new();
    for tag in SHUFFLED_TAGS {
        let mut values: BTreeSet<String> = BTreeSet::new();
        for doc in corpus {
            for a in &doc.annotations {
                if a.tag == tag {
                    values.insert(a.surface.clone());
                }
            }
        }
        let values: Vec<String> = values.into_iter().collect();
        if values.is_empty() {
            continue;
        }
        if values.len() == 1 {
            // cannot derange a singleton; fall back to the institution
            // pool when one is configured
            let v = &values[0];
            let surrogate = if !resources.institutions.is_empty() {
                let mut cand = resources.institutions[rng.gen_range(0..resources.institutions.len())].clone();
                for _ in 0..MAX_DRAWS {
                    if cand.to_lowercase() != v.to_lowercase() {
                        break;
                    }
                    cand = resources.institutions[rng.gen_range(0..resources.institutions.len())].clone();
                }
                cand
            } else {
                v.clone()
            };
            out.insert((tag.to_string(), v.clone()), surrogate);
            continue;
        }
        let mut shuffled = values.clone();
        shuffled.shuffle(rng);
        // fix any remaining fixed points by cyclic swap
        for i in 0..shuffled.len() {
            if shuffled[i] == values[i] {
                let j = (i + 1) % shuffled.len();
                shuffled.swap(i, j);
            }
        }
        for (v, s) in values.iter().zip(&shuffled) {
            out.insert((tag.to_string(), v.clone()), s.clone());
        }
    }
    out
}

/// Build the corpus-wide surrogate plan. Deterministic for a fixed
/// (corpus, resources, seed).
pub fn make_plan(
    corpus: &[Document],
    resources: &SurrogateResources,
    seed: u64,
) -> Result<SurrogatePlan> {
    for doc in corpus {
        doc.validate()?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shuffles = build_shuffles(corpus, resources, &mut rng);

    let mut builder = PlanBuilder {
        resources,
        streets: LookupList::from_entries(resources.streets.iter()),
        cities: LookupList::from_entries(resources.cities.iter()),
        countries: LookupList::from_entries(resources.countries.iter()),
        given_lookup: resources.given_names.iter().map(|n| n.to_lowercase()).collect(),
        shuffles,
        rng,
    };

    let mut plan = SurrogatePlan {
        seed,
        doc_shifts: BTreeMap::new(),
        mappings: BTreeMap::new(),
        remap: BTreeMap::new(),
        review: Vec::new(),
    };

    for doc in corpus {
        let mut anns = doc.annotations.clone();
        anns.sort_by(|a, b| (a.start, a.end, &a.tag).cmp(&(b.start, b.end, &b.tag)));
        for w in anns.windows(2) {
            if w[0].overlaps(&w[1]) {
                return Err(DeidError::data(format!(
                    "doc {}: overlapping annotations cannot be replaced",
                    doc.doc_id
                )));
            }
        }

        let forbidden: BTreeSet<String> =
            anns.iter().filter_map(|a| folded_if_long(&a.surface)).collect();

        // date shift: resample until no shifted date string collides with
        // the document's own PHI strings
        let date_surfaces: Vec<&Annotation> = anns.iter().filter(|a| a.tag == "Date").collect();
        let mut shift = DateShift { years: 0, days: 0 };
        let mut shift_ok = false;
        'shift: for _ in 0..MAX_DRAWS {
            let cand = DateShift {
                years: builder.rng.gen_range(1..=5),
                days: builder.rng.gen_range(0..=364),
            };
            if cand.years == 0 && cand.days == 0 {
                continue;
            }
            for a in &date_surfaces {
                if let Ok(shifted) = shift_date_string(&a.surface, cand) {
                    if folded_if_long(&shifted).is_some_and(|f| forbidden.contains(&f)) {
                        continue 'shift;
                    }
                }
            }
            shift = cand;
            shift_ok = true;
            break;
        }
        if !shift_ok {
            return Err(DeidError::data(format!(
                "doc {}: no leak-free date shift found in {MAX_DRAWS} draws",
                doc.doc_id
            )));
        }
        plan.doc_shifts.insert(doc.doc_id.clone(), shift);

        let mut mapping: BTreeMap<(String, String), String> = BTreeMap::new();
        let mut remap: Vec<[usize; 4]> = Vec::with_capacity(anns.len());
        let mut delta: i64 = 0;

        for a in &anns {
            let key = (a.tag.clone(), a.surface.clone());
            let surrogate = if let Some(s) = mapping.get(&key) {
                s.clone()
            } else {
                let mut review_reason: Option<String> = None;
                let value: String = if REVIEW_TAGS.contains(&a.tag.as_str()) {
                    review_reason = Some("manual rewrite".into());
                    placeholder_for(&a.tag)
                } else if a.tag == "Date" {
                    match shift_date_string(&a.surface, shift) {
                        Ok(s) => s,
                        Err(_) => {
                            review_reason = Some("unparseable date".into());
                            placeholder_for(&a.tag)
                        }
                    }
                } else if a.tag == "Age" {
                    match cap_age(&a.surface) {
                        Ok(s) => s,
                        Err(_) => {
                            review_reason = Some("no integer found".into());
                            placeholder_for(&a.tag)
                        }
                    }
                } else if CHARCLASS_TAGS.contains(&a.tag.as_str()) {
                    let mut out = substitute_charclass(&a.surface, &mut builder.rng);
                    for _ in 0..MAX_DRAWS {
                        if !folded_if_long(&out).is_some_and(|f| forbidden.contains(&f)) {
                            break;
                        }
                        out = substitute_charclass(&a.surface, &mut builder.rng);
                    }
                    out
                } else if a.tag == "Name" {
                    builder.name_surrogate(&a.surface, &forbidden)?
                } else if SHUFFLED_TAGS.contains(&a.tag.as_str()) {
                    let shuffled = builder
                        .shuffles
                        .get(&key)
                        .cloned()
                        .expect("every observed value was shuffled");
                    if folded_if_long(&shuffled).is_some_and(|f| forbidden.contains(&f)) {
                        // dataset-wide shuffle collided with this
                        // document's own PHI: draw any other observed value
                        let pool: Vec<String> = builder
                            .shuffles
                            .iter()
                            .filter(|((t, _), _)| *t == a.tag)
                            .map(|(_, v)| v.clone())
                            .collect();
                        builder.draw_avoiding(&pool, &forbidden, &a.tag)?
                    } else {
                        shuffled
                    }
                } else if a.tag == "Address" {
                    match builder.address_surrogate(&a.surface, &forbidden)? {
                        Some(s) => s,
                        None => {
                            review_reason = Some("unmatched address residue".into());
                            placeholder_for(&a.tag)
                        }
                    }
                } else {
                    return Err(DeidError::data(format!(
                        "doc {}: no surrogate strategy for tag {:?}",
                        doc.doc_id, a.tag
                    )));
                };

                if review_reason.is_some() {
                    plan.review.push(ReviewItem {
                        doc_id: doc.doc_id.clone(),
                        start: a.start,
                        end: a.end,
                        tag: a.tag.clone(),
                        surface: a.surface.clone(),
                        placeholder: value.clone(),
                    });
                }
                mapping.insert(key.clone(), value.clone());
                value
            };

            let new_start = (a.start as i64 + delta) as usize;
            let new_end = new_start + char_len(&surrogate);
            remap.push([a.start, a.end, new_start, new_end]);
            delta += char_len(&surrogate) as i64 - a.len() as i64;
        }

        let entries: Vec<MappingEntry> = mapping
            .into_iter()
            .map(|((tag, surface), surrogate)| MappingEntry { tag, surface, surrogate })
            .collect();
        plan.mappings.insert(doc.doc_id.clone(), entries);
        plan.remap.insert(doc.doc_id.clone(), remap);
    }

    Ok(plan)
}

/// Apply the plan to one document: splice surrogates into the text and
/// remap every annotation offset. Text outside annotations is preserved
/// verbatim.
pub fn apply_plan(doc: &Document, plan: &SurrogatePlan) -> Result<Document> {
    let entries = plan.mappings.get(&doc.doc_id).ok_or_else(|| {
        DeidError::data(format!("plan has no mapping for doc {:?}", doc.doc_id))
    })?;
    let mapping: BTreeMap<(&str, &str), &str> = entries
        .iter()
        .map(|e| ((e.tag.as_str(), e.surface.as_str()), e.surrogate.as_str()))
        .collect();

    let mut anns = doc.annotations.clone();
    anns.sort_by(|a, b| (a.start, a.end, &a.tag).cmp(&(b.start, b.end, &b.tag)));
    for w in anns.windows(2) {
        if w[0].overlaps(&w[1]) {
            return Err(DeidError::data(format!(
                "doc {}: overlapping annotations cannot be replaced",
                doc.doc_id
            )));
        }
    }

    let mut text = String::new();
    let mut new_anns = Vec::with_capacity(anns.len());
    let mut cursor = 0usize; // in original chars
    let mut out_len = 0usize;

    for a in &anns {
        let surrogate = *mapping.get(&(a.tag.as_str(), a.surface.as_str())).ok_or_else(|| {
            DeidError::data(format!(
                "plan for doc {} misses annotation {}..{} {:?} ({:?})",
                doc.doc_id, a.start, a.end, a.tag, a.surface
            ))
        })?;
        let between = char_slice(&doc.text, cursor, a.start);
        out_len += char_len(&between);
        text.push_str(&between);

        let new_start = out_len;
        text.push_str(surrogate);
        out_len += char_len(surrogate);
        new_anns.push(Annotation {
            start: new_start,
            end: out_len,
            tag: a.tag.clone(),
            surface: surrogate.to_string(),
        });
        cursor = a.end;
    }
    let tail = char_slice(&doc.text, cursor, char_len(&doc.text));
    text.push_str(&tail);

    let mut out = Document::new(doc.doc_id.clone(), text);
    out.meta = doc.meta.clone();
    out.annotations = new_anns;
    // token attributes no longer align after replacement
    out.attrs = None;
    out.validate()?;

    if let Some(expected) = plan.remap.get(&doc.doc_id) {
        debug_assert_eq!(
            expected
                .iter()
                .map(|r| (r[2], r[3]))
                .collect::<Vec<_>>(),
            out.annotations.iter().map(|a| (a.start, a.end)).collect::<Vec<_>>()
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc_with(id: &str, text: &str, anns: &[(usize, usize, &str)]) -> Document {
        let mut d = Document::new(id, text);
        d.annotations = anns
            .iter()
            .map(|&(s, e, t)| Annotation::new(text, s, e, t).unwrap())
            .collect();
        d
    }

    #[test]
    fn charclass_preserves_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = substitute_charclass("06-7802651", &mut rng);
        assert_eq!(out.len(), 10);
        assert_eq!(out.chars().nth(2).unwrap(), '-');
        for (i, c) in out.chars().enumerate() {
            if i == 2 {
                continue;
            }
            assert!(c.is_ascii_digit(), "{out}");
        }

        let zip = substitute_charclass("1234AB", &mut rng);
        assert!(zip[..4].chars().all(|c| c.is_ascii_digit()), "{zip}");
        assert!(zip[4..].chars().all(|c| c.is_ascii_uppercase()), "{zip}");

        assert_eq!(substitute_charclass("", &mut rng), "");
    }

    #[test]
    fn age_capping() {
        assert_eq!(cap_age("93").unwrap(), "89");
        assert_eq!(cap_age("45").unwrap(), "45");
        assert_eq!(cap_age("89").unwrap(), "89");
        assert_eq!(cap_age("2 jaar en 4 maanden").unwrap(), "2 jaar en 4 maanden");
        assert_eq!(cap_age("101 jaar").unwrap(), "89 jaar");
        assert!(cap_age("geen leeftijd").is_err());
    }

    #[test]
    fn same_name_maps_to_same_surrogate_within_a_document() {
        let text = "Jan Jansen belde. Later belde Jan Jansen weer.";
        let doc = doc_with("d", text, &[(0, 10, "Name"), (30, 40, "Name")]);
        let plan = make_plan(&[doc.clone()], &SurrogateResources::builtin_nl(), 7).unwrap();
        let out = apply_plan(&doc, &plan).unwrap();
        assert_eq!(out.annotations.len(), 2);
        assert_eq!(out.annotations[0].surface, out.annotations[1].surface);
        assert_ne!(out.annotations[0].surface, "Jan Jansen");
    }

    #[test]
    fn institution_shuffle_is_a_derangement() {
        let texts: Vec<String> = (0..4).map(|i| format!("Instelling H{i} hier")).collect();
        let docs: Vec<Document> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| doc_with(&format!("d{i}"), t, &[(11, 13, "Hospital")]))
            .collect();
        let plan = make_plan(&docs, &SurrogateResources::builtin_nl(), 3).unwrap();
        for doc in &docs {
            let entries = &plan.mappings[&doc.doc_id];
            for e in entries {
                assert_ne!(e.surrogate, e.surface, "value mapped to itself");
            }
        }
    }

    #[test]
    fn plan_is_deterministic() {
        let doc = doc_with(
            "d",
            "Jan Jansen (06-7802651) op 26-04-2017 in Amsterdam",
            &[(0, 10, "Name"), (12, 22, "Phone/Fax"), (27, 37, "Date"), (41, 50, "Address")],
        );
        let r = SurrogateResources::builtin_nl();
        let a = make_plan(&[doc.clone()], &r, 42).unwrap();
        let b = make_plan(&[doc.clone()], &r, 42).unwrap();
        assert_eq!(a, b);
        let c = make_plan(&[doc], &r, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn offsets_shift_after_replacement() {
        let text = "AAAAAAAAAA x 2016 y";
        let doc = doc_with("d", text, &[(0, 10, "Name"), (13, 17, "Date")]);
        let plan = make_plan(&[doc.clone()], &SurrogateResources::builtin_nl(), 5).unwrap();
        let out = apply_plan(&doc, &plan).unwrap();
        out.validate().unwrap();
        let name_len = char_len(&out.annotations[0].surface);
        assert_eq!(out.annotations[1].start, name_len + 3);
        // non-PHI text preserved
        assert!(out.text.contains(" x "));
        assert!(out.text.ends_with(" y"));
    }

    #[test]
    fn document_without_annotations_is_unchanged() {
        let doc = doc_with("d", "De patiënt heeft koorts.", &[]);
        let plan = make_plan(&[doc.clone()], &SurrogateResources::builtin_nl(), 1).unwrap();
        let out = apply_plan(&doc, &plan).unwrap();
        assert_eq!(out.text, doc.text);
    }

    #[test]
    fn profession_and_other_go_to_review_with_placeholder() {
        let text = "werkt als stratenmaker bij de zaak";
        let doc = doc_with("d", text, &[(10, 22, "Profession")]);
        let plan = make_plan(&[doc.clone()], &SurrogateResources::builtin_nl(), 1).unwrap();
        assert_eq!(plan.review.len(), 1);
        assert_eq!(plan.review[0].placeholder, "[REVIEW:Profession]");
        let out = apply_plan(&doc, &plan).unwrap();
        assert!(out.text.contains("[REVIEW:Profession]"));
        assert!(!out.text.contains("stratenmaker"));
    }

    #[test]
    fn unparseable_date_goes_to_review() {
        let text = "gezien met koningsdag vorig jaar";
        let doc = doc_with("d", text, &[(11, 21, "Date")]);
        let plan = make_plan(&[doc.clone()], &SurrogateResources::builtin_nl(), 1).unwrap();
        assert_eq!(plan.review.len(), 1);
        assert_eq!(plan.review[0].tag, "Date");
    }

    #[test]
    fn date_deltas_are_preserved_within_a_document() {
        let text = "van 24-04-2017 tot 26-04-2017 en ook 28-02-2016";
        let doc = doc_with("d", text, &[(4, 14, "Date"), (19, 29, "Date"), (37, 47, "Date")]);
        let plan = make_plan(&[doc.clone()], &SurrogateResources::builtin_nl(), 9).unwrap();
        let out = apply_plan(&doc, &plan).unwrap();
        let parse = |s: &str| {
            let (_, p) = infer_date_format(s).unwrap();
            chrono::NaiveDate::from_ymd_opt(p.year.unwrap(), p.month.unwrap(), p.day.unwrap()).unwrap()
        };
        let orig: Vec<_> = doc.annotations.iter().map(|a| parse(&a.surface)).collect();
        let new: Vec<_> = out.annotations.iter().map(|a| parse(&a.surface)).collect();
        for i in 0..orig.len() {
            for j in i + 1..orig.len() {
                assert_eq!(
                    (orig[i] - orig[j]).num_days(),
                    (new[i] - new[j]).num_days(),
                    "pairwise delta changed"
                );
            }
        }
        // strictly into the future
        for (o, n) in orig.iter().zip(&new) {
            assert!(n > o);
        }
    }

    #[test]
    fn leak_freedom_on_a_small_corpus() {
        let r = SurrogateResources::builtin_nl();
        let docs = vec![
            doc_with(
                "a",
                "Jan Jansen belde 06-7802651 op 26-04-2017",
                &[(0, 10, "Name"), (17, 27, "Phone/Fax"), (31, 41, "Date")],
            ),
            doc_with(
                "b",
                "Mw. de Vries (BSN 111222333) uit Kamerik",
                &[(4, 12, "Name"), (18, 27, "SSN"), (33, 40, "Address")],
            ),
        ];
        let plan = make_plan(&docs, &r, 11).unwrap();
        for doc in &docs {
            let out = apply_plan(doc, &plan).unwrap();
            let folded = out.text.to_lowercase();
            for a in &doc.annotations {
                if let Some(f) = folded_if_long(&a.surface) {
                    assert!(!folded.contains(&f), "leak of {f:?} in {:?}", out.text);
                }
            }
        }
    }

    #[test]
    fn missing_mapping_is_an_error_listing_the_annotation() {
        let doc = doc_with("d", "Jan Jansen", &[(0, 10, "Name")]);
        let plan = make_plan(&[doc.clone()], &SurrogateResources::builtin_nl(), 1).unwrap();
        let other = doc_with("d", "Piet Pietersen", &[(0, 14, "Name")]);
        let err = apply_plan(&other, &plan).unwrap_err();
        assert!(err.to_string().contains("Name"), "{err}");
    }

    #[test]
    fn empty_pool_errors_name_the_category() {
        let mut r = SurrogateResources::builtin_nl();
        r.family_names.clear();
        let doc = doc_with("d", "Quirijnen hier", &[(0, 9, "Name")]);
        let err = make_plan(&[doc], &r, 1).unwrap_err();
        assert!(err.to_string().contains("family-name"), "{err}");
    }
}
