//! Transcript cleanup and tokenization.
//!
//! [`normalize`] runs the cleanup stages in a fixed order:
//!
//! 1. [`strip_tags`] removes bracketed speaker and information tags.
//! 2. [`substitute_specials`] spells out rare symbols (`%` becomes `percent`).
//! 3. [`number_to_words`] expands digit runs into English words.
//! 4. [`canonicalize_punct`] maps punctuation onto `, . ? !` and the apostrophe.
//! 5. The result is lowercased and split into [`Token`]s.
//!
//! The output only ever contains `a`-`z`, the apostrophe and the four marks.

pub mod numbers;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::token::{tokenize, NormalizedTranscript, Punct, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("number `{0}` exceeds the supported magnitude (at most 9 digits)")]
    NumberTooLarge(String),
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Removes non-nested `[...]` spans. An unmatched `[` is left alone.
pub fn strip_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('[') {
        match rest[open..].find(']') {
            Some(close) => {
                out.push_str(&rest[..open]);
                out.push(' ');
                rest = &rest[open + close + 1..];
            }
            None => break,
        }
    }
    out.push_str(rest);
    collapse_whitespace(&out)
}

fn special_form(c: char) -> Option<&'static str> {
    match c {
        'æ' | 'Æ' => Some("ae"),
        '²' => Some("square"),
        '°' => Some("degree"),
        '%' => Some("percent"),
        '*' => Some("times"),
        _ => None,
    }
}

/// Replaces rare symbols with their pronunciation, padded by single spaces.
pub fn substitute_specials(text: &str) -> String {
    if !text.chars().any(|c| special_form(c).is_some()) {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len() + 16);
    for c in text.chars() {
        match special_form(c) {
            Some(form) => {
                out.push(' ');
                out.push_str(form);
                out.push(' ');
            }
            None => out.push(c),
        }
    }
    collapse_whitespace(&out)
}

fn is_ordinal_suffix(s: &[char]) -> bool {
    let lower: String = s.iter().map(|c| c.to_ascii_lowercase()).collect();
    matches!(lower.as_str(), "st" | "nd" | "rd" | "th")
}

/// Expands every digit run into English words.
///
/// Handles thousands separators (`10,000`), a decimal part read digit by
/// digit after "point" (`3.14`), and ordinal suffixes (`21st`). Runs with more
/// than nine integer digits are rejected.
pub fn number_to_words(text: &str) -> Result<String, NormalizeError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + 16);
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_ascii_digit() {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let start = i;
        let mut integer = String::new();
        while i < chars.len() && chars[i].is_ascii_digit() {
            integer.push(chars[i]);
            i += 1;
        }
        // thousands separators: ",ddd" groups after a leading group of at most three digits
        if integer.len() <= 3 {
            while chars.get(i) == Some(&',')
                && i + 4 <= chars.len()
                && chars[i + 1..i + 4].iter().all(|c| c.is_ascii_digit())
                && !chars.get(i + 4).is_some_and(|c| c.is_ascii_digit())
            {
                integer.extend(&chars[i + 1..i + 4]);
                i += 4;
            }
        }
        let mut fraction = None;
        if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit()) {
            let mut frac = String::new();
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                frac.push(chars[i]);
                i += 1;
            }
            fraction = Some(frac);
        }
        let digits = integer.trim_start_matches('0');
        if digits.len() > 9 {
            let raw: String = chars[start..i].iter().collect();
            return Err(NormalizeError::NumberTooLarge(raw));
        }
        let value: u64 = if digits.is_empty() { 0 } else { digits.parse().expect("digit run") };
        let ordinal = fraction.is_none()
            && i + 2 <= chars.len()
            && is_ordinal_suffix(&chars[i..i + 2])
            && !chars.get(i + 2).is_some_and(|c| c.is_alphanumeric());
        let mut words = if ordinal {
            i += 2;
            numbers::ordinal(value)
        } else {
            numbers::cardinal(value)
        }
        .expect("value checked against nine digits");
        if let Some(frac) = fraction {
            words.push_str(" point ");
            words.push_str(&numbers::digits(&frac));
        }
        if out.chars().last().is_some_and(|c| c.is_alphanumeric() || c == '\'') {
            out.push(' ');
        }
        out.push_str(&words);
        if chars.get(i).is_some_and(|c| c.is_alphanumeric() || *c == '\'') {
            out.push(' ');
        }
    }
    Ok(out)
}

const ABBREVIATIONS: &[&str] = &[
    "approx", "dr", "etc", "fig", "inc", "jr", "ltd", "mr", "mrs", "ms", "mt", "prof", "sr", "st",
    "vs",
];

const CLITICS: &[&str] = &["s", "t", "re", "ve", "ll", "d", "m"];

fn is_clitic(s: &str) -> bool {
    CLITICS.contains(&s.to_ascii_lowercase().as_str())
}

/// Folds one character onto the reduced alphabet: ASCII letters, digits,
/// whitespace, the apostrophe and `, . ? !`. Anything else becomes a space.
fn fold_char(c: char, out: &mut String) {
    match c {
        '\u{2018}' | '\u{2019}' | '\u{02BC}' | '`' | '\'' => out.push('\''),
        ':' | ';' => out.push(','),
        '\u{2026}' | '\u{00B7}' => out.push('.'),
        'ß' => out.push_str("ss"),
        c if c.is_ascii_alphanumeric() || c.is_whitespace() => out.push(c),
        ',' | '.' | '?' | '!' => out.push(c),
        c if c.is_ascii() => out.push(' '),
        c => {
            let folded: String = c.nfkd().filter(|d| d.is_ascii_alphabetic()).collect();
            if folded.is_empty() {
                out.push(' ');
            } else {
                out.push_str(&folded);
            }
        }
    }
}

/// `U.S.`, `U.S`, `e.g.`: single letters separated by dots.
fn is_dotted_acronym(unit: &str) -> bool {
    let b = unit.as_bytes();
    if b.len() < 3 {
        return false;
    }
    b.iter().enumerate().all(|(i, c)| if i % 2 == 0 { c.is_ascii_alphabetic() } else { *c == b'.' })
}

fn strip_acronym_dots(unit: &str) -> String {
    let mut unit = unit;
    // ".etc" form
    if unit.len() > 1 && unit.starts_with('.') && unit[1..].starts_with(|c: char| c.is_ascii_alphabetic()) {
        unit = &unit[1..];
    }
    if is_dotted_acronym(unit) {
        return unit.replace('.', "");
    }
    let letters = unit.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(unit.len());
    if letters > 0
        && unit[letters..].starts_with('.')
        && ABBREVIATIONS.contains(&unit[..letters].to_ascii_lowercase().as_str())
    {
        return format!("{}{}", &unit[..letters], &unit[letters + 1..]);
    }
    unit.to_string()
}

/// Splits a word piece (no marks) at apostrophes that start a clitic, and
/// drops apostrophes that act as quotes.
fn split_apostrophes(piece: &str, out: &mut Vec<String>) {
    let mut parts = piece.split('\'');
    let mut current = parts.next().unwrap_or_default().to_string();
    // empty parts come from runs of apostrophes or a trailing one
    for part in parts.filter(|p| !p.is_empty()) {
        if is_clitic(part) {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            current.push('\'');
        } else if !current.is_empty() {
            current.push('\'');
        }
        current.push_str(part);
    }
    if !current.is_empty() {
        out.push(current);
    }
}

/// Reduces punctuation to `, . ? !` plus apostrophes and detaches the marks.
///
/// Colons and semicolons become commas; ellipses and interpuncts become
/// periods; dots inside acronyms and after common abbreviations are dropped;
/// contractions are split before the apostrophe (`didn't` -> `didn 't`); every
/// other symbol is removed.
pub fn canonicalize_punct(text: &str) -> String {
    let mut folded = String::with_capacity(text.len());
    for c in text.chars() {
        fold_char(c, &mut folded);
    }
    let mut pieces: Vec<String> = Vec::new();
    for unit in folded.split_whitespace() {
        let unit = strip_acronym_dots(unit);
        let mut word = String::new();
        let mut prev_mark = None;
        for c in unit.chars() {
            match Punct::from_char(c) {
                Some(p) => {
                    if !word.is_empty() {
                        split_apostrophes(&std::mem::take(&mut word), &mut pieces);
                    }
                    // an ellipsis is a single period
                    if !(p == Punct::Period && prev_mark == Some(Punct::Period)) {
                        pieces.push(p.as_str().to_string());
                    }
                    prev_mark = Some(p);
                }
                None => {
                    word.push(c);
                    prev_mark = None;
                }
            }
        }
        if !word.is_empty() {
            split_apostrophes(&word, &mut pieces);
        }
    }
    pieces.join(" ")
}

/// Full cleanup pipeline followed by tokenization.
pub fn normalize(text: &str) -> Result<NormalizedTranscript, NormalizeError> {
    let text = strip_tags(text);
    let text = substitute_specials(&text);
    let text = number_to_words(&text)?;
    let text = canonicalize_punct(&text);
    Ok(tokenize(&text.to_lowercase()))
}

/// Drops every punctuation token, keeping word order.
pub fn strip_punctuation(t: &NormalizedTranscript) -> NormalizedTranscript {
    t.tokens().iter().filter(|tok| tok.is_word()).cloned().collect()
}

/// Words only, as owned tokens. Used as the alignment unit.
pub fn word_tokens(t: &NormalizedTranscript) -> Vec<Token> {
    t.tokens().iter().filter(|tok| tok.is_word()).cloned().collect()
}
