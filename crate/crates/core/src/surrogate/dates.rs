//! Date format inference and shifting.
//!
//! A date string is parsed into a [`FormatPattern`] (e.g. "12 nov. 2018"
//! → `%d %b. %Y`) so the shifted date can be re-rendered in exactly the
//! same shape. Day/month ambiguity is resolved day-first (Dutch
//! convention); two-digit years pivot at 30 (00-29 → 2000s).
//!
//! Shifts are applied as a fixed day count (`years·365 + days`) so that
//! day differences between full dates in the same document are preserved
//! exactly; a pure calendar year-add would stretch across leap days.
//! Year-only dates shift by the year component alone.

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{DeidError, Result};
use crate::nl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateShift {
    pub years: u32,
    pub days: u32,
}

impl DateShift {
    pub fn total_days(&self) -> i64 {
        self.years as i64 * 365 + self.days as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DateComponent {
    /// `%d`, zero-padded to two digits when `padded`.
    Day { padded: bool },
    /// `%m`, zero-padded to two digits when `padded`.
    Month { padded: bool },
    /// `%b` (abbreviated) or `%B` (full) Dutch month name.
    MonthName { abbrev: bool, dotted: bool, capitalized: bool },
    /// `%y`
    Year2,
    /// `%Y`
    Year4,
    Literal(String),
}

/// The inferred shape of one date string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormatPattern {
    pub components: Vec<DateComponent>,
}

impl std::fmt::Display for FormatPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.components {
            match c {
                DateComponent::Day { .. } => write!(f, "%d")?,
                DateComponent::Month { .. } => write!(f, "%m")?,
                DateComponent::MonthName { abbrev, dotted, .. } => {
                    write!(f, "{}", if *abbrev { "%b" } else { "%B" })?;
                    if *dotted {
                        write!(f, ".")?;
                    }
                }
                DateComponent::Year2 => write!(f, "%y")?,
                DateComponent::Year4 => write!(f, "%Y")?,
                DateComponent::Literal(s) => write!(f, "{s}")?,
            }
        }
        Ok(())
    }
}

/// Date fields recovered while inferring a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateParts {
    pub day: Option<u32>,
    pub month: Option<u32>,
    pub year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Lexeme {
    Num(String),
    Word(String),
    Sep(String),
}

fn lex(s: &str) -> Vec<Lexeme> {
    let mut out: Vec<Lexeme> = Vec::new();
    for c in s.chars() {
        let kind = if c.is_ascii_digit() {
            0
        } else if c.is_alphabetic() {
            1
        } else {
            2
        };
        match (out.last_mut(), kind) {
            (Some(Lexeme::Num(ref mut b)), 0) => b.push(c),
            (Some(Lexeme::Word(ref mut b)), 1) => b.push(c),
            (Some(Lexeme::Sep(ref mut b)), 2) => b.push(c),
            _ => out.push(match kind {
                0 => Lexeme::Num(c.to_string()),
                1 => Lexeme::Word(c.to_string()),
                _ => Lexeme::Sep(c.to_string()),
            }),
        }
    }
    out
}

fn pivot_year2(v: u32) -> i32 {
    if v <= 29 {
        2000 + v as i32
    } else {
        1900 + v as i32
    }
}

fn unparseable(s: &str) -> DeidError {
    DeidError::data(format!("unparseable date: {s:?}"))
}

fn month_name_component(word: &str, next_is_dot: bool) -> Option<(DateComponent, u32)> {
    let m = nl::month_number(word)?;
    let abbrev = word.trim_end_matches('.').chars().count() <= 4
        && !nl::MONTHS_FULL.contains(&word.to_lowercase().as_str());
    let capitalized = word.chars().next().is_some_and(|c| c.is_uppercase());
    Some((
        DateComponent::MonthName { abbrev, dotted: next_is_dot, capitalized },
        m,
    ))
}

/// Infer the highest-priority pattern that exactly matches `s`.
///
/// Returns the pattern and the parsed fields. Strings that match no
/// pattern in the grammar are an error; callers route those to the
/// review queue.
pub fn infer_date_format(s: &str) -> Result<(FormatPattern, DateParts)> {
    let lx = lex(s.trim());

    let num = |i: usize| -> Option<&String> {
        match lx.get(i) {
            Some(Lexeme::Num(n)) => Some(n),
            _ => None,
        }
    };
    let sep = |i: usize| -> Option<&String> {
        match lx.get(i) {
            Some(Lexeme::Sep(x)) => Some(x),
            _ => None,
        }
    };
    let word = |i: usize| -> Option<&String> {
        match lx.get(i) {
            Some(Lexeme::Word(w)) => Some(w),
            _ => None,
        }
    };
    let day_component = |n: &str| -> Option<(DateComponent, u32)> {
        let v: u32 = n.parse().ok()?;
        (1..=31).contains(&v).then(|| (DateComponent::Day { padded: n.len() == 2 }, v))
    };
    let month_component = |n: &str| -> Option<(DateComponent, u32)> {
        let v: u32 = n.parse().ok()?;
        (1..=12).contains(&v).then(|| (DateComponent::Month { padded: n.len() == 2 }, v))
    };

    // numeric triple: d-m-Y, d-m-y or Y-m-d with a repeated separator
    if lx.len() == 5 {
        if let (Some(a), Some(s1), Some(b), Some(s2), Some(c)) =
            (num(0), sep(1), num(2), sep(3), num(4))
        {
            if s1 == s2 && matches!(s1.as_str(), "-" | "/" | ".") {
                let lit = DateComponent::Literal(s1.clone());
                if c.len() == 4 {
                    // day-first
                    if let (Some((dc, d)), Some((mc, m))) = (day_component(a), month_component(b)) {
                        let year: i32 = c.parse().map_err(|_| unparseable(s))?;
                        return Ok((
                            FormatPattern { components: vec![dc, lit.clone(), mc, lit, DateComponent::Year4] },
                            DateParts { day: Some(d), month: Some(m), year: Some(year) },
                        ));
                    }
                } else if a.len() == 4 && c.len() <= 2 {
                    // ISO year-first
                    if let (Some((mc, m)), Some((dc, d))) = (month_component(b), day_component(c)) {
                        let year: i32 = a.parse().map_err(|_| unparseable(s))?;
                        return Ok((
                            FormatPattern { components: vec![DateComponent::Year4, lit.clone(), mc, lit, dc] },
                            DateParts { day: Some(d), month: Some(m), year: Some(year) },
                        ));
                    }
                } else if c.len() == 2 {
                    if let (Some((dc, d)), Some((mc, m))) = (day_component(a), month_component(b)) {
                        let year = pivot_year2(c.parse().map_err(|_| unparseable(s))?);
                        return Ok((
                            FormatPattern { components: vec![dc, lit.clone(), mc, lit, DateComponent::Year2] },
                            DateParts { day: Some(d), month: Some(m), year: Some(year) },
                        ));
                    }
                }
            }
        }
    }

    // day + month name (+ optional year): "12 nov. 2018", "3 maart"
    if let (Some(a), Some(s1), Some(w)) = (num(0), sep(1), word(2)) {
        if s1 == " " {
            let mut i = 3;
            let mut dotted = false;
            if sep(3).map(|x| x.as_str()) == Some(".") {
                dotted = true;
                i = 4;
            }
            if let (Some((dc, d)), Some((mn, m))) = (day_component(a), month_name_component(w, dotted)) {
                match (sep(i), num(i + 1)) {
                    (Some(sp), Some(y)) if sp == " " && y.len() == 4 && lx.len() == i + 2 => {
                        let year: i32 = y.parse().map_err(|_| unparseable(s))?;
                        return Ok((
                            FormatPattern {
                                components: vec![dc, DateComponent::Literal(" ".into()), mn, DateComponent::Literal(" ".into()), DateComponent::Year4],
                            },
                            DateParts { day: Some(d), month: Some(m), year: Some(year) },
                        ));
                    }
                    _ if lx.len() == i => {
                        return Ok((
                            FormatPattern { components: vec![dc, DateComponent::Literal(" ".into()), mn] },
                            DateParts { day: Some(d), month: Some(m), year: None },
                        ));
                    }
                    _ => {}
                }
            }
        }
    }

    // month name (+ optional year): "november 2018", "nov. 2018", "mei"
    if let Some(w) = word(0) {
        let mut i = 1;
        let mut dotted = false;
        if sep(1).map(|x| x.as_str()) == Some(".") {
            dotted = true;
            i = 2;
        }
        if let Some((mn, m)) = month_name_component(w, dotted) {
            match (sep(i), num(i + 1)) {
                (Some(sp), Some(y)) if sp == " " && y.len() == 4 && lx.len() == i + 2 => {
                    let year: i32 = y.parse().map_err(|_| unparseable(s))?;
                    return Ok((
                        FormatPattern {
                            components: vec![mn, DateComponent::Literal(" ".into()), DateComponent::Year4],
                        },
                        DateParts { day: None, month: Some(m), year: Some(year) },
                    ));
                }
                _ if lx.len() == i => {
                    return Ok((
                        FormatPattern { components: vec![mn] },
                        DateParts { day: None, month: Some(m), year: None },
                    ));
                }
                _ => {}
            }
        }
    }

    // bare 4-digit year
    if lx.len() == 1 {
        if let Some(y) = num(0) {
            if y.len() == 4 {
                let year: i32 = y.parse().map_err(|_| unparseable(s))?;
                return Ok((
                    FormatPattern { components: vec![DateComponent::Year4] },
                    DateParts { day: None, month: None, year: Some(year) },
                ));
            }
        }
    }

    // day-month without year: "26-04", "26/4"
    if lx.len() == 3 {
        if let (Some(a), Some(s1), Some(b)) = (num(0), sep(1), num(2)) {
            if matches!(s1.as_str(), "-" | "/" | ".") {
                if let (Some((dc, d)), Some((mc, m))) = (day_component(a), month_component(b)) {
                    return Ok((
                        FormatPattern { components: vec![dc, DateComponent::Literal(s1.clone()), mc] },
                        DateParts { day: Some(d), month: Some(m), year: None },
                    ));
                }
            }
        }
    }

    Err(unparseable(s))
}

fn render(pattern: &FormatPattern, day: u32, month: u32, year: i32) -> String {
    let mut out = String::new();
    for c in &pattern.components {
        match c {
            DateComponent::Day { padded } => {
                if *padded {
                    out.push_str(&format!("{day:02}"));
                } else {
                    out.push_str(&day.to_string());
                }
            }
            DateComponent::Month { padded } => {
                if *padded {
                    out.push_str(&format!("{month:02}"));
                } else {
                    out.push_str(&month.to_string());
                }
            }
            DateComponent::MonthName { abbrev, dotted, capitalized } => {
                let name = if *abbrev {
                    nl::MONTHS_ABBREV[(month - 1) as usize]
                } else {
                    nl::MONTHS_FULL[(month - 1) as usize]
                };
                let name = if *capitalized {
                    let mut cs = name.chars();
                    match cs.next() {
                        Some(f) => f.to_uppercase().collect::<String>() + cs.as_str(),
                        None => String::new(),
                    }
                } else {
                    name.to_string()
                };
                out.push_str(&name);
                if *dotted {
                    out.push('.');
                }
            }
            DateComponent::Year2 => out.push_str(&format!("{:02}", year.rem_euclid(100))),
            DateComponent::Year4 => out.push_str(&year.to_string()),
            DateComponent::Literal(l) => out.push_str(l),
        }
    }
    out
}

/// Shift a date string and re-render it in its own pattern.
///
/// Full dates move by `shift.total_days()`; year-only dates move by the
/// year component alone; dates without a year are anchored in 2000 and
/// move by the day total (only the visible fields are re-rendered).
pub fn shift_date(s: &str, pattern: &FormatPattern, parts: DateParts, shift: DateShift) -> Result<String> {
    match (parts.day, parts.month, parts.year) {
        (Some(d), Some(m), Some(y)) => {
            let date = NaiveDate::from_ymd_opt(y, m, d)
                .ok_or_else(|| DeidError::data(format!("invalid calendar date: {s:?}")))?;
            let shifted = date + Duration::days(shift.total_days());
            Ok(render(pattern, shifted.day(), shifted.month(), shifted.year()))
        }
        (None, Some(m), Some(y)) => {
            let date = NaiveDate::from_ymd_opt(y, m, 1)
                .ok_or_else(|| DeidError::data(format!("invalid calendar date: {s:?}")))?;
            let shifted = date + Duration::days(shift.total_days());
            Ok(render(pattern, 1, shifted.month(), shifted.year()))
        }
        (Some(d), Some(m), None) => {
            let date = NaiveDate::from_ymd_opt(2000, m, d)
                .ok_or_else(|| DeidError::data(format!("invalid calendar date: {s:?}")))?;
            let shifted = date + Duration::days(shift.total_days());
            Ok(render(pattern, shifted.day(), shifted.month(), shifted.year()))
        }
        (None, Some(m), None) => {
            let date = NaiveDate::from_ymd_opt(2000, m, 1).expect("month validated");
            let shifted = date + Duration::days(shift.total_days());
            Ok(render(pattern, shifted.day(), shifted.month(), shifted.year()))
        }
        (None, None, Some(y)) => Ok(render(pattern, 1, 1, y + shift.years as i32)),
        _ => Err(unparseable(s)),
    }
}

/// Convenience: infer, then shift.
pub fn shift_date_string(s: &str, shift: DateShift) -> Result<String> {
    let (pattern, parts) = infer_date_format(s)?;
    shift_date(s, &pattern, parts, shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern_of(s: &str) -> String {
        infer_date_format(s).unwrap().0.to_string()
    }

    #[test]
    fn reference_pattern_examples() {
        assert_eq!(pattern_of("12 nov. 2018"), "%d %b. %Y");
        assert_eq!(pattern_of("2016"), "%Y");
        assert_eq!(pattern_of("26-04-2017"), "%d-%m-%Y");
        assert_eq!(pattern_of("15-02-19"), "%d-%m-%y");
        assert_eq!(pattern_of("november 2018"), "%B %Y");
        assert_eq!(pattern_of("3 maart"), "%d %B");
        assert_eq!(pattern_of("26/04"), "%d/%m");
        assert_eq!(pattern_of("2017-04-26"), "%Y-%m-%d");
    }

    #[test]
    fn grammar_enumeration_gives_unique_exact_match() {
        // oracle: every grammar production renders back to the input
        let cases = [
            "26-04-2017", "26/04/2017", "26.04.2017", "1-2-2017", "15-02-19",
            "12 nov. 2018", "12 november 2018", "3 maart", "november 2018",
            "nov. 2018", "2016", "26-04",
        ];
        for s in cases {
            let (pattern, parts) = infer_date_format(s).unwrap();
            let rendered = render(
                &pattern,
                parts.day.unwrap_or(1),
                parts.month.unwrap_or(1),
                parts.year.unwrap_or(2000),
            );
            assert_eq!(rendered, s, "pattern {pattern} does not round-trip {s:?}");
        }
    }

    #[test]
    fn day_first_resolution() {
        let (_, parts) = infer_date_format("04-05-2017").unwrap();
        assert_eq!(parts.day, Some(4));
        assert_eq!(parts.month, Some(5));
    }

    #[test]
    fn unparseable_strings_error() {
        for s in ["Zomer '02", "koningsdag", "13-13-2017", "99", "12:30", "2016/2017"] {
            assert!(infer_date_format(s).is_err(), "{s:?} should not parse");
        }
    }

    #[test]
    fn shift_preserves_gap_between_dates() {
        let shift = DateShift { years: 1, days: 3 };
        assert_eq!(shift_date_string("24-04-2017", shift).unwrap(), "27-04-2018");
        assert_eq!(shift_date_string("26-04-2017", shift).unwrap(), "29-04-2018");
    }

    #[test]
    fn year_only_shifts_by_years() {
        let shift = DateShift { years: 1, days: 3 };
        assert_eq!(shift_date_string("2016", shift).unwrap(), "2017");
    }

    #[test]
    fn leap_day_shift_is_calendar_valid() {
        let shift = DateShift { years: 1, days: 0 };
        assert_eq!(shift_date_string("29-02-2016", shift).unwrap(), "28-02-2017");
    }

    #[test]
    fn month_names_rerender_in_dutch_with_same_shape() {
        let shift = DateShift { years: 1, days: 3 };
        assert_eq!(shift_date_string("12 nov. 2018", shift).unwrap(), "15 nov. 2019");
        // capitalization preserved
        let out = shift_date_string("12 November 2018", shift).unwrap();
        assert!(out.ends_with("November 2019") || out.contains("November"), "{out}");
        let (p, _) = infer_date_format("12 November 2018").unwrap();
        assert_eq!(p.to_string(), "%d %B %Y");
    }

    #[test]
    fn two_digit_year_pivot() {
        let (_, p1) = infer_date_format("15-02-19").unwrap();
        assert_eq!(p1.year, Some(2019));
        let (_, p2) = infer_date_format("15-02-85").unwrap();
        assert_eq!(p2.year, Some(1985));
        let shifted = shift_date_string("15-02-19", DateShift { years: 2, days: 0 }).unwrap();
        assert_eq!(shifted, "14-02-21"); // 730 days from 2019-02-15
    }

    #[test]
    fn invalid_calendar_dates_error_at_shift_time() {
        let (pattern, parts) = infer_date_format("31-02-2017").unwrap();
        assert!(shift_date(
            "31-02-2017",
            &pattern,
            parts,
            DateShift { years: 1, days: 0 }
        )
        .is_err());
    }
}
