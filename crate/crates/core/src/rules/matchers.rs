//! Concrete category matchers for the rule tagger.
//!
//! Every fired match carries the name of the matcher that produced it,
//! kept for debugging and audit.

use std::sync::OnceLock;

use regex::Regex;

use crate::corpus::{tokenize, Token, TokenizedDoc};
use crate::nl;

use super::{LookupList, RuleConfig};

/// A candidate match before title stripping and overlap resolution.
/// Offsets are in Unicode scalar values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiredMatch {
    pub start: usize,
    pub end: usize,
    pub tag: &'static str,
    pub matcher: &'static str,
}

/// Byte→scalar offset translation for regex matches.
struct CharMap {
    byte_of_char: Vec<usize>,
}

impl CharMap {
    fn new(text: &str) -> Self {
        CharMap {
            byte_of_char: text.char_indices().map(|(b, _)| b).collect(),
        }
    }

    fn char_of_byte(&self, byte: usize) -> usize {
        match self.byte_of_char.binary_search(&byte) {
            Ok(i) => i,
            Err(i) => i, // end-of-text
        }
    }
}

fn regex(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("static regex must compile"))
}

fn prev_char(text: &str, byte: usize) -> Option<char> {
    text[..byte].chars().next_back()
}

fn next_char(text: &str, byte: usize) -> Option<char> {
    text[byte..].chars().next()
}

/// Run all enabled matchers over `text`.
pub(super) fn run_matchers(text: &str, cfg: &RuleConfig) -> Vec<FiredMatch> {
    let tdoc = tokenize(text);
    let cmap = CharMap::new(text);
    let mut out = Vec::new();

    if cfg.toggles.date {
        match_dates(text, &tdoc, &cmap, &mut out);
    }
    if cfg.toggles.phone_fax {
        match_phone(text, &cmap, &mut out);
    }
    if cfg.toggles.email {
        match_email(text, &cmap, &mut out);
    }
    if cfg.toggles.url_ip {
        match_url_ip(text, &cmap, &mut out);
    }
    if cfg.toggles.ssn {
        match_ssn(text, &cmap, &mut out);
    }
    if cfg.toggles.name || cfg.toggles.initials {
        match_names_and_initials(&tdoc, cfg, &mut out);
    }
    if cfg.toggles.age {
        match_age(text, &cmap, &mut out);
    }
    if cfg.toggles.institution {
        match_lookup(&tdoc, &cfg.institutions, "Care Institute", "institution-lookup", false, &mut out);
    }
    if cfg.toggles.address {
        match_lookup(&tdoc, &cfg.locations, "Address", "location-lookup", false, &mut out);
        match_zip(text, &cmap, &mut out);
    }
    out.sort_by_key(|m| (m.start, m.end, m.tag));
    out
}

// ---------------------------------------------------------------------
// dates
// ---------------------------------------------------------------------

fn match_dates(text: &str, tdoc: &TokenizedDoc, cmap: &CharMap, out: &mut Vec<FiredMatch>) {
    static NUMERIC: OnceLock<Regex> = OnceLock::new();
    let re = regex(&NUMERIC, r"\d{1,2}([\-/.])\d{1,2}([\-/.])(?:\d{4}|\d{2})");
    for caps in re.captures_iter(text) {
        let m = caps.get(0).unwrap();
        if caps[1] != caps[2] {
            continue;
        }
        if prev_char(text, m.start()).is_some_and(|c| c.is_ascii_digit())
            || next_char(text, m.end()).is_some_and(|c| c.is_ascii_digit())
        {
            continue;
        }
        out.push(FiredMatch {
            start: cmap.char_of_byte(m.start()),
            end: cmap.char_of_byte(m.end()),
            tag: "Date",
            matcher: "date-numeric",
        });
    }

    static DAY_MONTH: OnceLock<Regex> = OnceLock::new();
    let re = regex(
        &DAY_MONTH,
        r"(?i)\b\d{1,2}\s+(?:januari|februari|maart|april|mei|juni|juli|augustus|september|oktober|november|december|jan|feb|mrt|apr|jun|jul|aug|sept|sep|okt|nov|dec)\.?(\s+\d{4})?",
    );
    for m in re.find_iter(text) {
        let ends_with_dot = m.as_str().ends_with('.');
        if !ends_with_dot && next_char(text, m.end()).is_some_and(|c| c.is_alphanumeric()) {
            continue;
        }
        if prev_char(text, m.start()).is_some_and(|c| c.is_ascii_digit()) {
            continue;
        }
        out.push(FiredMatch {
            start: cmap.char_of_byte(m.start()),
            end: cmap.char_of_byte(m.end()),
            tag: "Date",
            matcher: "date-day-month",
        });
    }

    // standalone 19xx/20xx years, only next to a date-cue word
    static YEAR: OnceLock<Regex> = OnceLock::new();
    let re = regex(&YEAR, r"\b(?:19|20)\d{2}\b");
    for m in re.find_iter(text) {
        if prev_char(text, m.start()).is_some_and(|c| !c.is_whitespace()) {
            continue;
        }
        let before: String = text[..m.start()]
            .chars()
            .rev()
            .skip_while(|c| c.is_whitespace())
            .take_while(|c| c.is_alphanumeric())
            .collect();
        let cue: String = before.chars().rev().collect::<String>().to_lowercase();
        if !nl::DATE_CUES.contains(&cue.as_str()) {
            continue;
        }
        out.push(FiredMatch {
            start: cmap.char_of_byte(m.start()),
            end: cmap.char_of_byte(m.end()),
            tag: "Date",
            matcher: "date-cued-year",
        });
    }

    // weekday and season words; a capitalized match at sentence start is
    // skipped (too often a name there)
    static DAYWORD: OnceLock<Regex> = OnceLock::new();
    let words: Vec<&str> = nl::WEEKDAYS.iter().chain(nl::SEASONS.iter()).copied().collect();
    let pattern = format!(r"(?i)\b(?:{})\b", words.join("|"));
    let re = DAYWORD.get_or_init(|| Regex::new(&pattern).expect("static regex must compile"));
    let sentence_starts: std::collections::BTreeSet<usize> = tdoc
        .sentences
        .iter()
        .filter_map(|s| s.first().map(|t| t.start))
        .collect();
    for m in re.find_iter(text) {
        let start = cmap.char_of_byte(m.start());
        let capitalized = m.as_str().chars().next().is_some_and(|c| c.is_uppercase());
        if capitalized && sentence_starts.contains(&start) {
            continue;
        }
        out.push(FiredMatch {
            start,
            end: cmap.char_of_byte(m.end()),
            tag: "Date",
            matcher: "date-word",
        });
    }
}

// ---------------------------------------------------------------------
// phone, email, url/ip, ssn, zip
// ---------------------------------------------------------------------

fn match_phone(text: &str, cmap: &CharMap, out: &mut Vec<FiredMatch>) {
    static PHONE: OnceLock<Regex> = OnceLock::new();
    let re = regex(&PHONE, r"(?:\+31|0)[ \-]?\d(?:[ \-]?\d)*");
    for m in re.find_iter(text) {
        let s = m.as_str();
        if s.matches('-').count() > 1 {
            continue;
        }
        let valid = if let Some(rest) = s.strip_prefix("+31") {
            rest.chars().filter(char::is_ascii_digit).count() == 9
        } else {
            matches!(s.chars().filter(char::is_ascii_digit).count(), 9 | 10)
        };
        if !valid {
            continue;
        }
        if prev_char(text, m.start()).is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+')
            || next_char(text, m.end()).is_some_and(|c| c.is_ascii_digit())
        {
            continue;
        }
        out.push(FiredMatch {
            start: cmap.char_of_byte(m.start()),
            end: cmap.char_of_byte(m.end()),
            tag: "Phone/Fax",
            matcher: "phone",
        });
    }
}

fn match_email(text: &str, cmap: &CharMap, out: &mut Vec<FiredMatch>) {
    static EMAIL: OnceLock<Regex> = OnceLock::new();
    let re = regex(&EMAIL, r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9.\-]+\.[A-Za-z]{2,}");
    for m in re.find_iter(text) {
        if prev_char(text, m.start()).is_some_and(|c| c.is_alphanumeric() || c == '@' || c == '.')
            || next_char(text, m.end()).is_some_and(|c| c.is_alphanumeric())
        {
            continue;
        }
        out.push(FiredMatch {
            start: cmap.char_of_byte(m.start()),
            end: cmap.char_of_byte(m.end()),
            tag: "Email",
            matcher: "email",
        });
    }
}

fn match_url_ip(text: &str, cmap: &CharMap, out: &mut Vec<FiredMatch>) {
    static URL: OnceLock<Regex> = OnceLock::new();
    let re = regex(&URL, r"(?:(?:https?|ftp)://|www\.)[^\s]+");
    for m in re.find_iter(text) {
        let trimmed = m.as_str().trim_end_matches([')', '.', ',', ';', ':', '!', '?', '"', '\'']);
        if trimmed.is_empty() {
            continue;
        }
        let end_byte = m.start() + trimmed.len();
        out.push(FiredMatch {
            start: cmap.char_of_byte(m.start()),
            end: cmap.char_of_byte(end_byte),
            tag: "URL/IP",
            matcher: "url",
        });
    }

    static IP: OnceLock<Regex> = OnceLock::new();
    let re = regex(&IP, r"\d{1,3}(?:\.\d{1,3}){3}");
    for m in re.find_iter(text) {
        // reject only when the quad continues; a sentence period is fine
        let quad_continues_after = match next_char(text, m.end()) {
            Some(c) if c.is_ascii_digit() => true,
            Some('.') => text[m.end()..].chars().nth(1).is_some_and(|c| c.is_ascii_digit()),
            _ => false,
        };
        let quad_continues_before = match prev_char(text, m.start()) {
            Some(c) if c.is_ascii_digit() => true,
            Some('.') => text[..m.start()].chars().rev().nth(1).is_some_and(|c| c.is_ascii_digit()),
            _ => false,
        };
        if quad_continues_before || quad_continues_after {
            continue;
        }
        out.push(FiredMatch {
            start: cmap.char_of_byte(m.start()),
            end: cmap.char_of_byte(m.end()),
            tag: "URL/IP",
            matcher: "ip",
        });
    }
}

/// Dutch BSN "elfproef": weights 9..2 then -1, the weighted sum must be
/// divisible by 11.
fn elfproef(digits: &[u32]) -> bool {
    if digits.len() != 9 {
        return false;
    }
    let sum: i64 = digits
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let w: i64 = if i == 8 { -1 } else { 9 - i as i64 };
            w * d as i64
        })
        .sum();
    sum % 11 == 0
}

fn match_ssn(text: &str, cmap: &CharMap, out: &mut Vec<FiredMatch>) {
    static SSN: OnceLock<Regex> = OnceLock::new();
    let re = regex(&SSN, r"\d{9}");
    for m in re.find_iter(text) {
        if prev_char(text, m.start()).is_some_and(|c| c.is_ascii_digit())
            || next_char(text, m.end()).is_some_and(|c| c.is_ascii_digit())
        {
            continue;
        }
        let digits: Vec<u32> = m.as_str().chars().filter_map(|c| c.to_digit(10)).collect();
        if !elfproef(&digits) {
            continue;
        }
        out.push(FiredMatch {
            start: cmap.char_of_byte(m.start()),
            end: cmap.char_of_byte(m.end()),
            tag: "SSN",
            matcher: "ssn-elfproef",
        });
    }
}

fn match_zip(text: &str, cmap: &CharMap, out: &mut Vec<FiredMatch>) {
    static ZIP: OnceLock<Regex> = OnceLock::new();
    let re = regex(&ZIP, r"\d{4} ?[A-Z]{2}");
    for m in re.find_iter(text) {
        if prev_char(text, m.start()).is_some_and(|c| c.is_alphanumeric())
            || next_char(text, m.end()).is_some_and(|c| c.is_alphanumeric())
        {
            continue;
        }
        out.push(FiredMatch {
            start: cmap.char_of_byte(m.start()),
            end: cmap.char_of_byte(m.end()),
            tag: "Address",
            matcher: "zip",
        });
    }
}

// ---------------------------------------------------------------------
// ages
// ---------------------------------------------------------------------

fn match_age(text: &str, cmap: &CharMap, out: &mut Vec<FiredMatch>) {
    static AGE_BEFORE: OnceLock<Regex> = OnceLock::new();
    static AGE_AFTER: OnceLock<Regex> = OnceLock::new();

    // "88 jaar", "88 jr."
    let re = regex(&AGE_BEFORE, r"(?i)\b(\d{1,3})\s*(?:jaar|jr\.?)\b");
    for caps in re.captures_iter(text) {
        let g = caps.get(1).unwrap();
        let Ok(age) = g.as_str().parse::<u32>() else { continue };
        if age > 120 {
            continue;
        }
        if prev_char(text, g.start()).is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '/' || c == '.') {
            continue;
        }
        out.push(FiredMatch {
            start: cmap.char_of_byte(g.start()),
            end: cmap.char_of_byte(g.end()),
            tag: "Age",
            matcher: "age",
        });
    }

    // "leeftijd: 88", "leeftijd 88"
    let re = regex(&AGE_AFTER, r"(?i)\bleeftijd:?\s*(\d{1,3})\b");
    for caps in re.captures_iter(text) {
        let g = caps.get(1).unwrap();
        let Ok(age) = g.as_str().parse::<u32>() else { continue };
        if age > 120 {
            continue;
        }
        out.push(FiredMatch {
            start: cmap.char_of_byte(g.start()),
            end: cmap.char_of_byte(g.end()),
            tag: "Age",
            matcher: "age",
        });
    }
}

// ---------------------------------------------------------------------
// lookup-driven matchers (institutions, addresses)
// ---------------------------------------------------------------------

fn token_is_word(tok: &Token) -> bool {
    tok.surface.chars().next().is_some_and(|c| c.is_alphanumeric())
}

/// Longest-match lookup of list entries over token sequences.
/// `require_capital` additionally demands a capitalized final token.
fn match_lookup(
    tdoc: &TokenizedDoc,
    list: &LookupList,
    tag: &'static str,
    matcher: &'static str,
    require_capital: bool,
    out: &mut Vec<FiredMatch>,
) {
    if list.is_empty() {
        return;
    }
    let max = list.max_words();
    for sent in &tdoc.sentences {
        let mut i = 0;
        while i < sent.len() {
            if !token_is_word(&sent[i]) {
                i += 1;
                continue;
            }
            let mut matched_len = 0;
            let upper = max.min(sent.len() - i);
            for len in (1..=upper).rev() {
                let window = &sent[i..i + len];
                if !window.iter().all(token_is_word) {
                    continue;
                }
                if require_capital
                    && !window
                        .last()
                        .unwrap()
                        .surface
                        .chars()
                        .next()
                        .is_some_and(|c| c.is_uppercase())
                {
                    continue;
                }
                let joined = window
                    .iter()
                    .map(|t| t.surface.to_lowercase())
                    .collect::<Vec<_>>()
                    .join(" ");
                if list.contains(&joined) {
                    matched_len = len;
                    break;
                }
            }
            if matched_len > 0 {
                out.push(FiredMatch {
                    start: sent[i].start,
                    end: sent[i + matched_len - 1].end,
                    tag,
                    matcher,
                });
                i += matched_len;
            } else {
                i += 1;
            }
        }
    }
}

// ---------------------------------------------------------------------
// names and initials
// ---------------------------------------------------------------------

fn is_capitalized(tok: &Token) -> bool {
    tok.surface.chars().next().is_some_and(|c| c.is_uppercase())
}

fn is_single_capital(tok: &Token) -> bool {
    let mut cs = tok.surface.chars();
    matches!((cs.next(), cs.next()), (Some(c), None) if c.is_uppercase() && c.is_alphabetic())
}

/// Bounded Levenshtein distance; returns `None` when above `max`.
fn levenshtein_within(a: &str, b: &str, max: usize) -> Option<usize> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.len().abs_diff(b.len()) > max {
        return None;
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        let mut row_min = cur[0];
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1);
            row_min = row_min.min(cur[j + 1]);
        }
        if row_min > max {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    (prev[b.len()] <= max).then_some(prev[b.len()])
}

fn match_names_and_initials(tdoc: &TokenizedDoc, cfg: &RuleConfig, out: &mut Vec<FiredMatch>) {
    let title_bases: Vec<String> = cfg
        .titles
        .iter()
        .map(|t| t.trim_end_matches('.').to_lowercase())
        .collect();

    // marks per sentence: which tokens are part of a name, and which are titles
    let mut seen_words: Vec<String> = Vec::new();
    let mut sentence_marks: Vec<(Vec<bool>, Vec<bool>)> = Vec::new();

    for sent in &tdoc.sentences {
        let n = sent.len();
        let mut name_mark = vec![false; n];
        let mut title_mark = vec![false; n];

        // titles: "Dhr" followed by an adjacent "."
        for i in 0..n {
            let folded = sent[i].surface.to_lowercase();
            let dotted = i + 1 < n && sent[i + 1].surface == "." && sent[i + 1].start == sent[i].end;
            if title_bases.contains(&folded) && (dotted || cfg.titles.iter().any(|t| t.to_lowercase() == folded)) {
                title_mark[i] = true;
                if dotted {
                    title_mark[i + 1] = true;
                }
            }
        }

        // exact lookup, longest match first; multiword entries allow
        // lowercase particles but the final token must be capitalized
        let max = cfg.first_names.max_words().max(cfg.surnames.max_words()).max(1);
        let mut i = 0;
        while i < n {
            if !token_is_word(&sent[i]) || title_mark[i] {
                i += 1;
                continue;
            }
            let mut matched = 0;
            for len in (1..=max.min(n - i)).rev() {
                let window = &sent[i..i + len];
                if !window.iter().all(token_is_word) {
                    continue;
                }
                if !is_capitalized(window.last().unwrap()) {
                    continue;
                }
                if len == 1 && !is_capitalized(&window[0]) {
                    continue;
                }
                let joined = window
                    .iter()
                    .map(|t| t.surface.to_lowercase())
                    .collect::<Vec<_>>()
                    .join(" ");
                if cfg.first_names.contains(&joined) || cfg.surnames.contains(&joined) {
                    matched = len;
                    break;
                }
            }
            if matched > 0 {
                for m in name_mark.iter_mut().skip(i).take(matched) {
                    *m = true;
                }
                i += matched;
            } else {
                i += 1;
            }
        }

        // title promotion: up to 3 capitalized tokens after a title.
        // Initial pairs ("J.") are skipped, not promoted: the initials
        // matcher claims those.
        for i in 0..n {
            if !title_mark[i] || sent[i].surface == "." {
                continue;
            }
            let mut j = i + 1;
            if j < n && title_mark[j] && sent[j].surface == "." {
                j += 1;
            }
            let mut promoted = 0;
            while j < n && promoted < 3 {
                let initial_pair = is_single_capital(&sent[j])
                    && j + 1 < n
                    && sent[j + 1].surface == "."
                    && sent[j + 1].start == sent[j].end;
                if initial_pair {
                    j += 2;
                    continue;
                }
                if token_is_word(&sent[j]) && is_capitalized(&sent[j]) {
                    name_mark[j] = true;
                    promoted += 1;
                    j += 1;
                } else {
                    break;
                }
            }
        }

        for (i, tok) in sent.iter().enumerate() {
            if name_mark[i] && token_is_word(tok) {
                let folded = tok.surface.to_lowercase();
                if folded.chars().count() >= 3 && folded.chars().all(char::is_alphabetic) {
                    seen_words.push(folded);
                }
            }
        }
        sentence_marks.push((name_mark, title_mark));
    }

    // fuzzy pass: capitalized words close to a name already seen
    // verbatim in this document
    if cfg.fuzzy_max_edits > 0 {
        let max_edits = cfg.fuzzy_max_edits as usize;
        for (sent, (name_mark, title_mark)) in tdoc.sentences.iter().zip(sentence_marks.iter_mut()) {
            for (i, tok) in sent.iter().enumerate() {
                if name_mark[i] || title_mark[i] || !token_is_word(tok) || !is_capitalized(tok) {
                    continue;
                }
                let folded = tok.surface.to_lowercase();
                if folded.chars().count() < 4 || !folded.chars().all(char::is_alphabetic) {
                    continue;
                }
                let close = seen_words
                    .iter()
                    .any(|w| matches!(levenshtein_within(&folded, w, max_edits), Some(d) if d > 0));
                if close {
                    name_mark[i] = true;
                }
            }
        }
    }

    // emit name spans: maximal runs of adjacent marked tokens
    if cfg.toggles.name {
        for (sent, (name_mark, _)) in tdoc.sentences.iter().zip(&sentence_marks) {
            let mut i = 0;
            while i < sent.len() {
                if !name_mark[i] {
                    i += 1;
                    continue;
                }
                let mut j = i;
                while j + 1 < sent.len() && name_mark[j + 1] {
                    j += 1;
                }
                out.push(FiredMatch {
                    start: sent[i].start,
                    end: sent[j].end,
                    tag: "Name",
                    matcher: "name",
                });
                i = j + 1;
            }
        }
    }

    // initials: runs of 1-4 single capitals each followed by an adjacent
    // period, next to a name or title
    if cfg.toggles.initials {
        for (sent, (name_mark, title_mark)) in tdoc.sentences.iter().zip(&sentence_marks) {
            let n = sent.len();
            let mut i = 0;
            while i < n {
                let mut pairs = Vec::new();
                let mut k = i;
                while pairs.len() < 4
                    && k + 1 < n
                    && is_single_capital(&sent[k])
                    && sent[k + 1].surface == "."
                    && sent[k + 1].start == sent[k].end
                    && !name_mark[k]
                    && !title_mark[k]
                {
                    pairs.push(k);
                    // allow at most one space before the next initial
                    let next = k + 2;
                    if next < n && sent[next].start <= sent[k + 1].end + 1 {
                        k = next;
                    } else {
                        k = n;
                    }
                }
                if pairs.is_empty() {
                    i += 1;
                    continue;
                }
                let first = pairs[0];
                let last_dot = *pairs.last().unwrap() + 1;
                let before_ok =
                    first >= 1 && (name_mark[first - 1] || title_mark[first - 1]);
                let after_ok = last_dot + 1 < n && (name_mark[last_dot + 1] || title_mark[last_dot + 1]);
                if before_ok || after_ok {
                    out.push(FiredMatch {
                        start: sent[first].start,
                        end: sent[last_dot].end,
                        tag: "Initials",
                        matcher: "initials",
                    });
                }
                i = last_dot + 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin_matches(text: &str) -> Vec<FiredMatch> {
        run_matchers(text, &RuleConfig::builtin_nl())
    }

    fn has(ms: &[FiredMatch], tag: &str, surface_range: (usize, usize)) -> bool {
        ms.iter().any(|m| m.tag == tag && (m.start, m.end) == surface_range)
    }

    #[test]
    fn numeric_dates_fire() {
        let ms = builtin_matches("Datum verrichting 24-04-2017 Tijdstip 23:45");
        assert!(has(&ms, "Date", (18, 28)), "{ms:?}");
        // the time of day is not a date
        assert!(!ms.iter().any(|m| m.start == 38), "{ms:?}");
    }

    #[test]
    fn day_month_year_dates_fire() {
        let ms = builtin_matches("gepland op 12 nov. 2018 en 3 maart 2019");
        assert!(ms.iter().filter(|m| m.tag == "Date").count() >= 2, "{ms:?}");
    }

    #[test]
    fn cued_year_fires_but_bare_year_does_not() {
        let ms = builtin_matches("In 2015 verhuisd.");
        assert!(ms.iter().any(|m| m.tag == "Date" && m.matcher == "date-cued-year"), "{ms:?}");
        let ms2 = builtin_matches("Nummer 2015 is bezet.");
        assert!(!ms2.iter().any(|m| m.matcher == "date-cued-year"), "{ms2:?}");
    }

    #[test]
    fn weekday_skipped_at_capitalized_sentence_start() {
        let ms = builtin_matches("afspraak op maandag om tien uur");
        assert!(ms.iter().any(|m| m.tag == "Date" && m.matcher == "date-word"), "{ms:?}");
        let ms2 = builtin_matches("Winter is hier koud.");
        assert!(!ms2.iter().any(|m| m.matcher == "date-word"), "{ms2:?}");
    }

    #[test]
    fn phone_variants() {
        let ms = builtin_matches("bel 06-7802651 of +31 6 12345678");
        assert_eq!(ms.iter().filter(|m| m.tag == "Phone/Fax").count(), 2, "{ms:?}");
        // 8 digits: too short
        let ms2 = builtin_matches("code 06-780265");
        assert!(!ms2.iter().any(|m| m.tag == "Phone/Fax"), "{ms2:?}");
        // inside a longer digit run
        let ms3 = builtin_matches("nr 0612345678901");
        assert!(!ms3.iter().any(|m| m.tag == "Phone/Fax"), "{ms3:?}");
    }

    #[test]
    fn ssn_requires_elfproef() {
        // 111222333: 9+8+7+2*(6+5+4)+3*(3+2)-3 = 111222333 is valid
        let ms = builtin_matches("BSN 111222333");
        assert!(ms.iter().any(|m| m.tag == "SSN"), "{ms:?}");
        let ms2 = builtin_matches("BSN 111222334");
        assert!(!ms2.iter().any(|m| m.tag == "SSN"), "{ms2:?}");
    }

    #[test]
    fn elfproef_accepts_valid_rejects_invalid() {
        assert!(elfproef(&[1, 1, 1, 2, 2, 2, 3, 3, 3]));
        assert!(!elfproef(&[1, 1, 1, 2, 2, 2, 3, 3, 4]));
        assert!(!elfproef(&[1, 2, 3]));
    }

    #[test]
    fn zip_and_city_feed_address() {
        let ms = builtin_matches("Van Meeuwenstraat 2, 1234AB Kamerik");
        assert!(ms.iter().any(|m| m.tag == "Address" && m.matcher == "zip"), "{ms:?}");
        assert!(ms.iter().any(|m| m.tag == "Address" && m.matcher == "location-lookup"), "{ms:?}");
    }

    #[test]
    fn urls_and_ips_fire() {
        let ms = builtin_matches("zie www.voorbeeld.nl (of https://x.nl/pagina) en 192.168.1.10.");
        let urls: Vec<_> = ms.iter().filter(|m| m.tag == "URL/IP").collect();
        assert_eq!(urls.len(), 3, "{urls:?}");
    }

    #[test]
    fn names_from_lookup_merge_adjacent_tokens() {
        let ms = builtin_matches("Patiënt Jan Jansen belde.");
        assert!(ms.iter().any(|m| m.tag == "Name"), "{ms:?}");
        let name = ms.iter().find(|m| m.tag == "Name").unwrap();
        assert_eq!((name.start, name.end), (8, 18));
    }

    #[test]
    fn multiword_surname_with_particles() {
        let ms = builtin_matches("Mevrouw de Vries is aanwezig.");
        let name = ms.iter().find(|m| m.tag == "Name").unwrap();
        assert_eq!((name.start, name.end), (8, 16));
    }

    #[test]
    fn title_promotes_unknown_names() {
        let ms = builtin_matches("Dhr. Quirijnen belde vandaag.");
        assert!(ms.iter().any(|m| m.tag == "Name"), "{ms:?}");
    }

    #[test]
    fn fuzzy_matches_previously_seen_names_only() {
        // "Janssen" is one edit from "Jansen" seen earlier in the doc
        let cfg = RuleConfig::builtin_nl();
        let mut no_janssen = cfg.clone();
        no_janssen.surnames = LookupList::from_entries(["Jansen"]);
        no_janssen.first_names = LookupList::from_entries(["Jan"]);
        let ms = run_matchers("Jan Jansen belde. Later belde Janssen nogmaals.", &no_janssen);
        let names: Vec<_> = ms.iter().filter(|m| m.tag == "Name").collect();
        assert_eq!(names.len(), 2, "{names:?}");

        // without a prior sighting there is no fuzzy hit
        let ms2 = run_matchers("Later belde Janssen nogmaals.", &no_janssen);
        assert!(ms2.iter().filter(|m| m.tag == "Name").count() <= 1);
    }

    #[test]
    fn initials_next_to_name_or_title() {
        let ms = builtin_matches("Arts J.O. Besteman was aanwezig, Dhr. K. belde.");
        // Besteman is not in the surname list, but K. follows a title
        assert!(ms.iter().any(|m| m.tag == "Initials"), "{ms:?}");
    }

    #[test]
    fn ages_fire_next_to_cue_words() {
        let ms = builtin_matches("Patiënt is 88 jaar oud, leeftijd 89");
        assert_eq!(ms.iter().filter(|m| m.tag == "Age").count(), 2, "{ms:?}");
        let ms2 = builtin_matches("dosis 500 jaar"); // out of range
        assert!(!ms2.iter().any(|m| m.tag == "Age"), "{ms2:?}");
    }

    #[test]
    fn institutions_match_longest_entry() {
        let ms = builtin_matches("opgenomen in Sint Anna Ziekenhuis te Utrecht");
        let inst = ms.iter().find(|m| m.tag == "Care Institute").unwrap();
        assert_eq!((inst.start, inst.end), (13, 33));
    }

    #[test]
    fn every_match_names_its_matcher() {
        let ms = builtin_matches("Dhr. Jan Jansen (88 jaar) belde 06-12345678 op 26-04-2017 uit Amsterdam.");
        assert!(!ms.is_empty());
        assert!(ms.iter().all(|m| !m.matcher.is_empty()));
    }

    #[test]
    fn levenshtein_bounds() {
        assert_eq!(levenshtein_within("jansen", "janssen", 2), Some(1));
        assert_eq!(levenshtein_within("jansen", "jansen", 2), Some(0));
        assert_eq!(levenshtein_within("jansen", "pietersen", 2), None);
    }
}
