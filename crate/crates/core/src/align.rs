//! Transcript matching and affine-gap global alignment.
//!
//! Online transcripts are matched to corpus transcripts with a Levenshtein
//! similarity ratio, then aligned word by word so that punctuation can be
//! carried over onto the corpus word stream.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

use crate::normalize::{strip_punctuation, word_tokens};
use crate::parallel::map_ordered;
use crate::token::{NormalizedTranscript, Token};

/// Candidates at or below this similarity are discarded.
pub const DEFAULT_THRESHOLD: f64 = 0.6;

/// Minimum fraction of reference words that must be matched exactly by the
/// word alignment before punctuation is transferred.
pub const MIN_MATCH_FRACTION: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlignError {
    #[error("reference transcript has no words")]
    EmptyReference,
    #[error("alignment matched only {matched} of {total} reference words")]
    Unusable { matched: usize, total: usize },
    #[error("invalid score scheme: {0}")]
    InvalidScheme(&'static str),
}

/// Pairwise alignment scores.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreScheme {
    pub match_score: f64,
    pub mismatch_score: f64,
    /// Charged for the first column of a gap run.
    pub gap_open: f64,
    /// Charged for every further column of the same run.
    pub gap_extend: f64,
}

impl Default for ScoreScheme {
    fn default() -> Self {
        ScoreScheme { match_score: 1.0, mismatch_score: -1.0, gap_open: -5.0, gap_extend: -0.01 }
    }
}

impl ScoreScheme {
    /// Checks `gap_open < mismatch < 0 < match` and `gap_extend < 0`.
    pub fn new(match_score: f64, mismatch_score: f64, gap_open: f64, gap_extend: f64) -> Result<Self, AlignError> {
        let s = ScoreScheme { match_score, mismatch_score, gap_open, gap_extend };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), AlignError> {
        if !(self.match_score > 0.0) {
            return Err(AlignError::InvalidScheme("match score must be positive"));
        }
        if !(self.mismatch_score < 0.0) {
            return Err(AlignError::InvalidScheme("mismatch score must be negative"));
        }
        if !(self.gap_open < self.mismatch_score) {
            return Err(AlignError::InvalidScheme("gap open must be below the mismatch score"));
        }
        if !(self.gap_extend < 0.0) {
            return Err(AlignError::InvalidScheme("gap extension must be negative"));
        }
        Ok(())
    }
}

/// One 64-row block step of the bit-vector edit distance recurrence.
/// `pv`/`mv` hold the vertical +1/-1 deltas, `eq` the match mask of the
/// current column and `h_in` the horizontal delta entering the block's top.
/// Returns the delta leaving the row marked by `last`.
#[inline]
fn advance_block(pv: &mut u64, mv: &mut u64, eq: u64, h_in: i8, last: u64) -> i8 {
    let h_neg = u64::from(h_in < 0);
    let xv = eq | *mv;
    let eq = eq | h_neg;
    let xh = (((eq & *pv).wrapping_add(*pv)) ^ *pv) | eq;
    let mut ph = *mv | !(xh | *pv);
    let mut mh = *pv & xh;
    let h_out = if ph & last != 0 {
        1
    } else if mh & last != 0 {
        -1
    } else {
        0
    };
    ph = (ph << 1) | u64::from(h_in > 0);
    mh = (mh << 1) | h_neg;
    *pv = mh | !(xv | ph);
    *mv = ph & xv;
    h_out
}

/// Minimal number of insertions, deletions and substitutions turning `a` into `b`.
///
/// Bit-parallel over 64-token blocks of the shorter sequence, so long
/// character sequences stay cheap.
pub fn levenshtein<T: Eq + Hash>(a: &[T], b: &[T]) -> usize {
    let (pattern, text) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if pattern.is_empty() {
        return text.len();
    }
    let blocks = pattern.len().div_ceil(64);
    let mut ids: HashMap<&T, usize> = HashMap::new();
    let mut peq: Vec<u64> = Vec::new();
    for (i, x) in pattern.iter().enumerate() {
        let next = ids.len();
        let id = *ids.entry(x).or_insert(next);
        if id == next {
            peq.resize(peq.len() + blocks, 0);
        }
        peq[id * blocks + i / 64] |= 1 << (i % 64);
    }
    let last_bit = 1u64 << ((pattern.len() - 1) % 64);
    let mut pv = vec![u64::MAX; blocks];
    let mut mv = vec![0u64; blocks];
    let mut score = pattern.len() as isize;
    for y in text {
        let row = ids.get(y).map(|&id| &peq[id * blocks..(id + 1) * blocks]);
        let mut h: i8 = 1;
        for k in 0..blocks {
            let eq = row.map_or(0, |r| r[k]);
            let last = if k + 1 == blocks { last_bit } else { 1 << 63 };
            h = advance_block(&mut pv[k], &mut mv[k], eq, h, last);
        }
        score += h as isize;
    }
    score as usize
}

/// `1 - distance / len(stm)` over words only, clamped to `[0, 1]`.
pub fn similarity_ratio(online: &NormalizedTranscript, stm: &NormalizedTranscript) -> Result<f64, AlignError> {
    let online = strip_punctuation(online);
    let stm = strip_punctuation(stm);
    if stm.is_empty() {
        return Err(AlignError::EmptyReference);
    }
    let d = levenshtein(online.tokens(), stm.tokens());
    Ok((1.0 - d as f64 / stm.len() as f64).max(0.0))
}

/// Index of the most similar candidate if its ratio exceeds `threshold`.
///
/// Equal ratios resolve to the lowest index.
pub fn select_best_transcript(
    candidates: &[NormalizedTranscript],
    stm: &NormalizedTranscript,
    threshold: f64,
) -> Result<Option<usize>, AlignError> {
    if candidates.is_empty() {
        return Ok(None);
    }
    if stm.word_count() == 0 {
        return Err(AlignError::EmptyReference);
    }
    let ratios = map_ordered(candidates, |c| similarity_ratio(c, stm));
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in ratios.into_iter().enumerate() {
        let r = r?;
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((i, r));
        }
    }
    Ok(best.filter(|(_, r)| *r > threshold).map(|(i, _)| i))
}

/// One alignment column; `None` is a gap. Indices point into the aligned sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlignedPair {
    pub left: Option<usize>,
    pub right: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Alignment {
    pub columns: Vec<AlignedPair>,
    pub score: f64,
}

impl Alignment {
    /// Number of maximal gap runs on either side.
    pub fn gap_runs(&self) -> usize {
        let mut runs = 0;
        let mut prev = AlignedPair { left: Some(0), right: Some(0) };
        for col in &self.columns {
            if col.left.is_none() && prev.left.is_some() {
                runs += 1;
            }
            if col.right.is_none() && prev.right.is_some() {
                runs += 1;
            }
            prev = *col;
        }
        runs
    }

    /// Columns pairing two equal items.
    pub fn matches<T: PartialEq>(&self, a: &[T], b: &[T]) -> usize {
        self.columns
            .iter()
            .filter(|c| matches!((c.left, c.right), (Some(i), Some(j)) if a[i] == b[j]))
            .count()
    }

    /// Two display rows with `-` for gaps, for character alignments.
    pub fn render_chars(&self, a: &[char], b: &[char]) -> (String, String) {
        let top = self.columns.iter().map(|c| c.left.map_or('-', |i| a[i])).collect();
        let bottom = self.columns.iter().map(|c| c.right.map_or('-', |j| b[j])).collect();
        (top, bottom)
    }
}

const STATE_MATCH: u8 = 0;
const STATE_GAP_RIGHT: u8 = 1;
const STATE_GAP_LEFT: u8 = 2;

/// Picks the best of three candidates; earlier entries win ties.
#[inline]
fn best3(m: f64, x: f64, y: f64) -> (f64, u8) {
    let mut best = (m, STATE_MATCH);
    if x > best.0 {
        best = (x, STATE_GAP_RIGHT);
    }
    if y > best.0 {
        best = (y, STATE_GAP_LEFT);
    }
    best
}

/// Maximal-score global alignment under affine gap scoring.
///
/// Three-state recurrence: a column pairing two items, a column consuming
/// `a` against a gap ("gap in right"), or one consuming `b` against a gap
/// ("gap in left"). Entering a gap state costs `gap_open`, staying in it costs
/// `gap_extend`. Equal-score predecessors resolve in the order pair,
/// gap-in-right, gap-in-left, which makes the backtrace deterministic.
pub fn global_align<T: PartialEq>(a: &[T], b: &[T], scheme: &ScoreScheme) -> Alignment {
    let (n, m) = (a.len(), b.len());
    let neg = f64::NEG_INFINITY;
    let width = m + 1;
    // per cell: predecessor of the pair state in bits 0-1, gap-in-right in 2-3, gap-in-left in 4-5
    let mut trace = vec![0u8; (n + 1) * width];

    let mut prev_m = vec![neg; width];
    let mut prev_x = vec![neg; width];
    let mut prev_y = vec![neg; width];
    let mut cur_m = vec![neg; width];
    let mut cur_x = vec![neg; width];
    let mut cur_y = vec![neg; width];

    prev_m[0] = 0.0;
    for j in 1..=m {
        let (v, from) = best3(
            prev_m[j - 1] + scheme.gap_open,
            prev_x[j - 1] + scheme.gap_open,
            prev_y[j - 1] + scheme.gap_extend,
        );
        prev_y[j] = v;
        trace[j] = from << 4;
    }

    for i in 1..=n {
        cur_m[0] = neg;
        cur_y[0] = neg;
        let (v, from) = best3(
            prev_m[0] + scheme.gap_open,
            prev_x[0] + scheme.gap_extend,
            prev_y[0] + scheme.gap_open,
        );
        cur_x[0] = v;
        trace[i * width] = from << 2;
        for j in 1..=m {
            let s = if a[i - 1] == b[j - 1] { scheme.match_score } else { scheme.mismatch_score };
            let (vm, fm) = best3(prev_m[j - 1], prev_x[j - 1], prev_y[j - 1]);
            let (vx, fx) = best3(
                prev_m[j] + scheme.gap_open,
                prev_x[j] + scheme.gap_extend,
                prev_y[j] + scheme.gap_open,
            );
            let (vy, fy) = best3(
                cur_m[j - 1] + scheme.gap_open,
                cur_x[j - 1] + scheme.gap_open,
                cur_y[j - 1] + scheme.gap_extend,
            );
            cur_m[j] = vm + s;
            cur_x[j] = vx;
            cur_y[j] = vy;
            trace[i * width + j] = fm | (fx << 2) | (fy << 4);
        }
        std::mem::swap(&mut prev_m, &mut cur_m);
        std::mem::swap(&mut prev_x, &mut cur_x);
        std::mem::swap(&mut prev_y, &mut cur_y);
    }

    if n == 0 && m == 0 {
        return Alignment { columns: Vec::new(), score: 0.0 };
    }
    let (score, mut state) = best3(prev_m[m], prev_x[m], prev_y[m]);

    let mut columns = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let cell = trace[i * width + j];
        match state {
            STATE_MATCH => {
                columns.push(AlignedPair { left: Some(i - 1), right: Some(j - 1) });
                state = cell & 3;
                i -= 1;
                j -= 1;
            }
            STATE_GAP_RIGHT => {
                columns.push(AlignedPair { left: Some(i - 1), right: None });
                state = (cell >> 2) & 3;
                i -= 1;
            }
            _ => {
                columns.push(AlignedPair { left: None, right: Some(j - 1) });
                state = (cell >> 4) & 3;
                j -= 1;
            }
        }
    }
    columns.reverse();
    Alignment { columns, score }
}

/// Character-level alignment, mostly for inspecting how gaps fall.
pub fn global_align_chars(a: &str, b: &str, scheme: &ScoreScheme) -> (Alignment, Vec<char>, Vec<char>) {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let al = global_align(&a, &b, scheme);
    (al, a, b)
}

/// Copies punctuation from `punctuated` onto the word stream of `stm_words`.
///
/// The two word streams are globally aligned; each mark is re-attached after
/// the reference word paired with the online word that precedes it. Marks
/// before the first online word, or after an online word aligned to a gap,
/// are dropped. The output's words are exactly the words of `stm_words`.
pub fn transfer_punctuation(
    punctuated: &NormalizedTranscript,
    stm_words: &NormalizedTranscript,
    scheme: &ScoreScheme,
) -> Result<NormalizedTranscript, AlignError> {
    let reference = word_tokens(stm_words);
    if reference.is_empty() {
        return Err(AlignError::EmptyReference);
    }
    let mut online: Vec<Token> = Vec::new();
    let mut trailing: Vec<Vec<Token>> = Vec::new();
    for tok in punctuated.tokens() {
        match tok {
            Token::Word(_) => {
                online.push(tok.clone());
                trailing.push(Vec::new());
            }
            Token::Punct(_) => {
                if let Some(marks) = trailing.last_mut() {
                    marks.push(tok.clone());
                }
            }
        }
    }

    let alignment = global_align(&online, &reference, scheme);
    let matched = alignment.matches(&online, &reference);
    if (matched as f64) < MIN_MATCH_FRACTION * reference.len() as f64 {
        return Err(AlignError::Unusable { matched, total: reference.len() });
    }

    let mut marks_after: Vec<Option<usize>> = vec![None; reference.len()];
    for col in &alignment.columns {
        if let (Some(i), Some(j)) = (col.left, col.right) {
            marks_after[j] = Some(i);
        }
    }
    let mut out = NormalizedTranscript::new();
    for (j, word) in reference.into_iter().enumerate() {
        out.push(word);
        if let Some(i) = marks_after[j] {
            for mark in &trailing[i] {
                out.push(mark.clone());
            }
        }
    }
    Ok(out)
}
