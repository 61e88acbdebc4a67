//! Deterministic rule tokenizer and sentence splitter.
//!
//! The rules, in order:
//!
//! * chunks are maximal non-whitespace runs;
//! * leading and trailing punctuation of a chunk is peeled off as
//!   single-character tokens;
//! * a chunk core containing a digit or `@` is "protected": `-`, `.`,
//!   `@` and `:` stay inside the token (dates, phone numbers, emails,
//!   times and codes survive as single tokens), all other punctuation
//!   splits — in particular `/` between digit runs, so `2016/2017`
//!   becomes three tokens;
//! * an unprotected core splits at every non-alphanumeric character.
//!
//! Sentences break after `.`, `?` or `!` followed by whitespace and a
//! capital or digit, and on blank lines. A period attached to a single
//! letter (an initial) or to a known title/month abbreviation does not
//! end a sentence; without this exception "Dhr. Jansen" and
//! "12 nov. 2018" would be torn apart.

use super::{Token, TokenizedDoc};

/// Abbreviations whose trailing period never ends a sentence.
/// Titles and month abbreviations, lowercase.
const ABBREVIATIONS: [&str; 22] = [
    "dhr", "mw", "mevr", "dr", "drs", "prof", "ing", "ir", "mr", "st", // titles
    "jan", "feb", "mrt", "apr", "jun", "jul", "aug", "sep", "sept", "okt", "nov", "dec",
];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Characters kept inside a protected (digit/`@`-bearing) core.
fn kept_in_protected(c: char) -> bool {
    matches!(c, '-' | '.' | '@' | ':')
}

/// Tokenize and sentence-split `text`. Pure and deterministic; empty
/// input yields zero sentences.
pub fn tokenize(text: &str) -> TokenizedDoc {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens: Vec<Token> = Vec::new();

    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let chunk_start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        tokenize_chunk(&chars, chunk_start, i, &mut tokens);
    }

    let sentences = split_sentences(&chars, tokens);
    TokenizedDoc { text: text.to_string(), sentences }
}

fn push_token(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    if start < end {
        out.push(Token {
            start,
            end,
            surface: chars[start..end].iter().collect(),
        });
    }
}

fn tokenize_chunk(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    let mut lo = start;
    let mut hi = end;

    // peel leading punctuation
    while lo < hi && !is_word_char(chars[lo]) {
        push_token(chars, lo, lo + 1, out);
        lo += 1;
    }
    // find trailing punctuation (emitted after the core)
    let mut trail = hi;
    while trail > lo && !is_word_char(chars[trail - 1]) {
        trail -= 1;
    }
    hi = trail;

    if lo < hi {
        let protected = chars[lo..hi].iter().any(|&c| c.is_ascii_digit() || c == '@');
        let mut run_start = lo;
        for k in lo..hi {
            let c = chars[k];
            let splits = !is_word_char(c) && !(protected && kept_in_protected(c));
            if splits {
                push_token(chars, run_start, k, out);
                push_token(chars, k, k + 1, out);
                run_start = k + 1;
            }
        }
        push_token(chars, run_start, hi, out);
    }

    for k in trail..end {
        push_token(chars, k, k + 1, out);
    }
}

/// True when the gap `[from, to)` between two tokens contains a blank line.
fn gap_has_blank_line(chars: &[char], from: usize, to: usize) -> bool {
    chars[from..to].iter().filter(|&&c| c == '\n').count() >= 2
}

fn is_sentence_end_mark(s: &str) -> bool {
    matches!(s, "." | "?" | "!")
}

fn split_sentences(chars: &[char], tokens: Vec<Token>) -> Vec<Vec<Token>> {
    let mut sentences = Vec::new();
    if tokens.is_empty() {
        return sentences;
    }

    let mut current: Vec<Token> = Vec::new();
    for idx in 0..tokens.len() {
        current.push(tokens[idx].clone());

        let last = idx + 1 == tokens.len();
        let boundary = if last {
            true
        } else {
            let cur = &tokens[idx];
            let next = &tokens[idx + 1];
            if gap_has_blank_line(chars, cur.end, next.start) {
                true
            } else if is_sentence_end_mark(&cur.surface) && next.start > cur.end {
                let next_first = chars[next.start];
                let capital_or_digit = next_first.is_uppercase() || next_first.is_ascii_digit();
                capital_or_digit && !(cur.surface == "." && is_abbreviation_before(&current))
            } else {
                false
            }
        };

        if boundary {
            sentences.push(std::mem::take(&mut current));
        }
    }
    sentences
}

/// True when the token immediately before a final "." token (no gap)
/// is a single letter or a known abbreviation.
fn is_abbreviation_before(current: &[Token]) -> bool {
    if current.len() < 2 {
        return false;
    }
    let dot = &current[current.len() - 1];
    let before = &current[current.len() - 2];
    if before.end != dot.start {
        return false;
    }
    let mut cs = before.surface.chars();
    let single_letter = match (cs.next(), cs.next()) {
        (Some(c), None) => c.is_alphabetic(),
        _ => false,
    };
    single_letter || ABBREVIATIONS.contains(&before.surface.to_lowercase().as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::char_slice;

    fn surfaces(td: &TokenizedDoc) -> Vec<Vec<&str>> {
        td.sentences
            .iter()
            .map(|s| s.iter().map(|t| t.surface.as_str()).collect())
            .collect()
    }

    fn flat(td: &TokenizedDoc) -> Vec<&str> {
        td.iter_tokens().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn splits_slash_between_digit_runs() {
        let td = tokenize("2016/2017");
        assert_eq!(flat(&td), vec!["2016", "/", "2017"]);
    }

    #[test]
    fn empty_text_has_no_sentences() {
        let td = tokenize("");
        assert_eq!(td.sentences.len(), 0);
        assert_eq!(td.token_count(), 0);
        let td = tokenize("   \n\n  ");
        assert_eq!(td.sentences.len(), 0);
    }

    #[test]
    fn title_period_does_not_split_sentence() {
        let td = tokenize("Dhr. Jansen belde.");
        assert_eq!(surfaces(&td), vec![vec!["Dhr", ".", "Jansen", "belde", "."]]);
        // oracle: every emitted surface equals the text slice at its offsets
        for t in td.iter_tokens() {
            assert_eq!(char_slice(&td.text, t.start, t.end), t.surface);
        }
    }

    #[test]
    fn dates_phones_emails_stay_single_tokens() {
        let td = tokenize("Gebeld op 26-04-2017 om 23:45 (t: 06-7802651) via jan.jansen@voorbeeld.nl.");
        let toks = flat(&td);
        assert!(toks.contains(&"26-04-2017"));
        assert!(toks.contains(&"23:45"));
        assert!(toks.contains(&"06-7802651"));
        assert!(toks.contains(&"jan.jansen@voorbeeld.nl"));
        assert!(toks.contains(&"("));
        assert!(toks.contains(&")"));
    }

    #[test]
    fn initials_do_not_break_sentences() {
        let td = tokenize("Arts J.O. Besteman was aanwezig.");
        assert_eq!(td.sentences.len(), 1);
        assert_eq!(
            flat(&td),
            vec!["Arts", "J", ".", "O", ".", "Besteman", "was", "aanwezig", "."]
        );
    }

    #[test]
    fn month_abbreviation_does_not_break_sentences() {
        let td = tokenize("Afspraak op 12 nov. 2018 bevestigd.");
        assert_eq!(td.sentences.len(), 1);
    }

    #[test]
    fn sentence_breaks_on_punctuation_and_blank_lines() {
        let td = tokenize("Patiënt belde. Familie is boos.\n\nS regel: rustig");
        assert_eq!(
            surfaces(&td),
            vec![
                vec!["Patiënt", "belde", "."],
                vec!["Familie", "is", "boos", "."],
                vec!["S", "regel", ":", "rustig"],
            ]
        );
    }

    #[test]
    fn unprotected_core_splits_on_punctuation() {
        let td = tokenize("Anna-Maria");
        assert_eq!(flat(&td), vec!["Anna", "-", "Maria"]);
    }

    #[test]
    fn tokens_are_strictly_increasing_and_in_bounds() {
        let text = "Mw. de Vries (88 jaar) woont in 's-Gravenhage sinds 12/03/99.";
        let td = tokenize(text);
        let mut prev_end = 0;
        for t in td.iter_tokens() {
            assert!(t.start >= prev_end);
            assert!(t.start < t.end);
            assert_eq!(char_slice(text, t.start, t.end), t.surface);
            prev_end = t.end;
        }
        assert!(prev_end <= char_slice(text, 0, usize::MAX).chars().count());
    }

    #[test]
    fn determinism() {
        let text = "Datum 26-04-2017 (patiënt nr. 64088)\n\nInstelling Duinendaal";
        assert_eq!(tokenize(text), tokenize(text));
    }
}
