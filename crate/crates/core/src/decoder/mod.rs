//! CTC decoding over the 33-symbol character set with shallow LM fusion.
//!
//! The decoder maximises `log p_ctc(c | x) + gamma * log p_lm(c)` where `c`
//! is a collapsed character string and the LM scores it as a sequence of
//! word-level tokens: words, plus each punctuation mark as its own token.

mod beam;
mod exhaustive;
pub mod lm;
mod posteriorgram;

use thiserror::Error;

use crate::parallel::{map_ordered, map_sequential};
use crate::token::NormalizedTranscript;

pub use beam::{beam_decode, ctc_prefix_beam_search, greedy_decode, Decoded};
pub use exhaustive::{collapsed_distribution, exhaustive_decode, DEFAULT_SEARCH_CAP};
pub use lm::{train_bigram, BigramLm, LmScorer, UniformLm};
pub use posteriorgram::Posteriorgram;

/// Number of output symbols.
pub const NUM_SYMBOLS: usize = 33;
pub const BLANK: usize = 0;
pub const SPACE: usize = 1;
pub const APOSTROPHE: usize = 2;
pub const COMMA: usize = 29;
pub const PERIOD: usize = 30;
pub const QUESTION: usize = 31;
pub const EXCLAMATION: usize = 32;

/// Probabilities at or below this are treated as impossible.
pub const MIN_PROB: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("symbol index {0} is outside the 33-symbol set")]
    SymbolOutOfRange(usize),
    #[error("posteriorgram line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("posteriorgram has width {0}, expected 33")]
    WrongWidth(usize),
    #[error("posteriorgram row {row} sums to {sum}, not 1")]
    RowSum { row: usize, sum: f64 },
    #[error("every hypothesis has zero probability")]
    Underflow,
    #[error("search space of {0} label sequences exceeds the cap of {1}")]
    SearchTooLarge(u128, u128),
    #[error("invalid decoder configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("cannot train a language model on an empty corpus")]
    EmptyCorpus,
}

/// Character for a non-blank symbol index.
pub fn symbol_char(index: usize) -> Result<Option<char>, DecodeError> {
    Ok(match index {
        BLANK => None,
        SPACE => Some(' '),
        APOSTROPHE => Some('\''),
        3..=28 => Some((b'a' + (index - 3) as u8) as char),
        COMMA => Some(','),
        PERIOD => Some('.'),
        QUESTION => Some('?'),
        EXCLAMATION => Some('!'),
        _ => return Err(DecodeError::SymbolOutOfRange(index)),
    })
}

/// Inverse of [`symbol_char`].
pub fn symbol_index(c: char) -> Option<usize> {
    match c {
        ' ' => Some(SPACE),
        '\'' => Some(APOSTROPHE),
        'a'..='z' => Some(3 + (c as usize - 'a' as usize)),
        ',' => Some(COMMA),
        '.' => Some(PERIOD),
        '?' => Some(QUESTION),
        '!' => Some(EXCLAMATION),
        _ => None,
    }
}

/// Merges adjacent repeats, drops blanks and maps the rest to characters.
pub fn collapse_ctc(labels: &[usize]) -> Result<String, DecodeError> {
    let mut out = String::new();
    let mut prev = None;
    for &l in labels {
        let c = symbol_char(l)?;
        if prev != Some(l) {
            if let Some(c) = c {
                out.push(c);
            }
        }
        prev = Some(l);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecodeConfig {
    pub beam_width: usize,
    /// LM weight.
    pub gamma: f64,
    /// Final scores this close to the best are ties, resolved by the
    /// lexicographically smallest string.
    pub tie_epsilon: f64,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig { beam_width: 64, gamma: 0.5, tie_epsilon: 1e-12 }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.beam_width == 0 {
            return Err(DecodeError::InvalidConfig("beam width must be at least 1"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(DecodeError::InvalidConfig("gamma must be a nonnegative number"));
        }
        Ok(())
    }
}

/// `acoustic + gamma * lm`, with `gamma == 0` ignoring the LM entirely.
pub(crate) fn fused(acoustic: f64, lm: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        acoustic
    } else {
        acoustic + gamma * lm
    }
}

/// Picks the best `(score, text)`; scores within `eps` of the maximum tie
/// and the smallest string wins.
pub(crate) fn select_best<'a, I>(candidates: I, eps: f64) -> Option<(f64, &'a str)>
where
    I: IntoIterator<Item = (f64, &'a str)> + Clone,
{
    let max = candidates.clone().into_iter().map(|(s, _)| s).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return None;
    }
    candidates
        .into_iter()
        .filter(|(s, _)| *s >= max - eps)
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(_, t)| (max, t))
}

/// Beam-decodes each posteriorgram (in parallel when enabled), keeping input order.
pub fn decode_batch<L: LmScorer>(
    posts: &[Posteriorgram],
    lm: &L,
    cfg: &DecodeConfig,
) -> Vec<Result<NormalizedTranscript, DecodeError>> {
    map_ordered(posts, |p| ctc_prefix_beam_search(p, lm, cfg))
}

/// [`decode_batch`] on the calling thread only.
pub fn decode_batch_sequential<L: LmScorer>(
    posts: &[Posteriorgram],
    lm: &L,
    cfg: &DecodeConfig,
) -> Vec<Result<NormalizedTranscript, DecodeError>> {
    map_sequential(posts, |p| ctc_prefix_beam_search(p, lm, cfg))
}
