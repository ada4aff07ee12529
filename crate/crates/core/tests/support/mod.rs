//! Brute-force reference implementations and random instance generators
//! shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use puncteval::align::ScoreScheme;
use puncteval::decoder::{symbol_char, Posteriorgram, NUM_SYMBOLS};
use puncteval::token::{Punct, Token};
use rand::Rng;

pub const WORD: u32 = 1000;
pub const SLOT: u32 = 999;

/// Cheapest cost and the slot-edit counts reached at that cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlevOracle {
    pub cost: u32,
    pub min_slot_edits: usize,
    pub max_slot_edits: usize,
    /// `(insertions, deletions)` of slots over the cheapest paths with the most slot edits.
    pub indels: BTreeSet<(usize, usize)>,
}

struct Walk<'a, F: Fn(&Token) -> bool> {
    r: &'a [Token],
    h: &'a [Token],
    slot: F,
    cross: bool,
    transpose: bool,
    /// Every `(cost, slot edits, slot insertions, slot deletions)` reached.
    seen: BTreeSet<(u32, usize, usize, usize)>,
}

impl<F: Fn(&Token) -> bool> Walk<'_, F> {
    fn record(&mut self, cost: u32, slots: usize, ins: usize, del: usize) {
        self.seen.insert((cost, slots, ins, del));
    }

    /// Visits every edit script from `(i, j)` to the end.
    fn go(&mut self, i: usize, j: usize, cost: u32, slots: usize, ins: usize, del: usize) {
        let (r, h) = (self.r, self.h);
        if i == r.len() && j == h.len() {
            self.record(cost, slots, ins, del);
            return;
        }
        if i < r.len() {
            let s = (self.slot)(&r[i]);
            self.go(i + 1, j, cost + if s { SLOT } else { WORD }, slots + s as usize, ins, del + s as usize);
        }
        if j < h.len() {
            let s = (self.slot)(&h[j]);
            self.go(i, j + 1, cost + if s { SLOT } else { WORD }, slots + s as usize, ins + s as usize, del);
        }
        if i < r.len() && j < h.len() {
            let (a, b) = (&r[i], &h[j]);
            let (sa, sb) = ((self.slot)(a), (self.slot)(b));
            let step = if a == b {
                Some((0, 0))
            } else if sa && sb {
                Some((SLOT, 1))
            } else if !sa && !sb {
                Some((WORD, 0))
            } else if self.cross {
                Some((SLOT, 1))
            } else {
                None
            };
            if let Some((c, s)) = step {
                self.go(i + 1, j + 1, cost + c, slots + s, ins, del);
            }
        }
        if self.transpose && i + 1 < r.len() && j + 1 < h.len() && r[i] != r[i + 1] {
            if let Some((c, s)) = self.swap_cost(&r[i], &r[i + 1], &h[j], &h[j + 1]) {
                self.go(i + 2, j + 2, cost + c, slots + s, ins, del);
            }
        }
    }

    /// Reference `(a, b)` becomes `(b, a)`, then must read `(c, d)`.
    fn swap_cost(&self, a: &Token, b: &Token, c: &Token, d: &Token) -> Option<(u32, usize)> {
        let (sa, sb) = ((self.slot)(a), (self.slot)(b));
        match (sa, sb) {
            (true, true) => (c == b && d == a).then_some((SLOT, 1)),
            (false, false) => (c == b && d == a).then_some((WORD, 0)),
            // slot b moves left past word a; a may turn into any non-slot d
            (false, true) => (c == b && !(self.slot)(d)).then(|| (SLOT + if d == a { 0 } else { WORD }, 1)),
            // slot a moves right past word b; b may turn into any non-slot c
            (true, false) => (d == a && !(self.slot)(c)).then(|| (SLOT + if c == b { 0 } else { WORD }, 1)),
        }
    }
}

/// Exhaustive search over every edit script. Exponential; keep inputs short.
pub fn dlev_oracle(
    reference: &[Token],
    hypothesis: &[Token],
    slot: impl Fn(&Token) -> bool,
    cross_class: bool,
    transpositions: bool,
) -> DlevOracle {
    let mut w = Walk { r: reference, h: hypothesis, slot, cross: cross_class, transpose: transpositions, seen: BTreeSet::new() };
    w.go(0, 0, 0, 0, 0, 0);
    let cost = w.seen.iter().map(|e| e.0).min().expect("the delete-all, insert-all script always exists");
    let cheapest: Vec<_> = w.seen.iter().filter(|e| e.0 == cost).collect();
    let min_slot_edits = cheapest.iter().map(|e| e.1).min().unwrap_or(0);
    let max_slot_edits = cheapest.iter().map(|e| e.1).max().unwrap_or(0);
    let indels = cheapest.iter().filter(|e| e.1 == max_slot_edits).map(|e| (e.2, e.3)).collect();
    DlevOracle { cost, min_slot_edits, max_slot_edits, indels }
}

/// Best score over every global alignment, scoring each maximal gap run
/// as `gap_open + (len - 1) * gap_extend`.
pub fn affine_oracle<T: PartialEq>(a: &[T], b: &[T], s: &ScoreScheme) -> f64 {
    #[derive(Clone, Copy, PartialEq)]
    enum Last {
        Pair,
        GapInB,
        GapInA,
    }
    fn go<T: PartialEq>(a: &[T], b: &[T], s: &ScoreScheme, i: usize, j: usize, last: Last, score: f64, best: &mut f64) {
        if i == a.len() && j == b.len() {
            *best = best.max(score);
            return;
        }
        if i < a.len() && j < b.len() {
            let m = if a[i] == b[j] { s.match_score } else { s.mismatch_score };
            go(a, b, s, i + 1, j + 1, Last::Pair, score + m, best);
        }
        if i < a.len() {
            let g = if last == Last::GapInB { s.gap_extend } else { s.gap_open };
            go(a, b, s, i + 1, j, Last::GapInB, score + g, best);
        }
        if j < b.len() {
            let g = if last == Last::GapInA { s.gap_extend } else { s.gap_open };
            go(a, b, s, i, j + 1, Last::GapInA, score + g, best);
        }
    }
    let mut best = f64::NEG_INFINITY;
    go(a, b, s, 0, 0, Last::Pair, 0.0, &mut best);
    best
}

/// Collapsed-string probabilities by recursion over every frame labelling.
pub fn ctc_oracle(post: &Posteriorgram) -> HashMap<String, f64> {
    fn go(post: &Posteriorgram, t: usize, prev: Option<usize>, text: &mut String, p: f64, out: &mut HashMap<String, f64>) {
        if t == post.frames() {
            *out.entry(text.clone()).or_insert(0.0) += p;
            return;
        }
        for s in 0..NUM_SYMBOLS {
            let q = post.prob(t, s);
            if q == 0.0 {
                continue;
            }
            let emitted = match symbol_char(s).unwrap() {
                Some(c) if prev != Some(s) => {
                    text.push(c);
                    true
                }
                _ => false,
            };
            go(post, t + 1, Some(s), text, p * q, out);
            if emitted {
                text.pop();
            }
        }
    }
    let mut out = HashMap::new();
    go(post, 0, None, &mut String::new(), 1.0, &mut out);
    out
}

const WORDS: [&str; 4] = ["a", "b", "c", "d"];

/// Mixed word/punctuation sequence of length `0..=max_len`.
pub fn random_tokens<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Token> {
    let n = rng.random_range(0..=max_len);
    (0..n)
        .map(|_| {
            if rng.random_bool(0.45) {
                Token::Punct(Punct::ALL[rng.random_range(0..Punct::ALL.len())])
            } else {
                Token::word(WORDS[rng.random_range(0..WORDS.len())])
            }
        })
        .collect()
}

/// Posteriorgram with `frames` rows whose mass is spread over `active` symbols.
pub fn random_posteriorgram<R: Rng>(rng: &mut R, frames: usize, active: &[usize]) -> Posteriorgram {
    let rows = (0..frames)
        .map(|_| {
            let mut row = vec![0.0; NUM_SYMBOLS];
            let weights: Vec<f64> = active.iter().map(|_| rng.random_range(0.01..1.0)).collect();
            let total: f64 = weights.iter().sum();
            for (&s, w) in active.iter().zip(&weights) {
                row[s] = w / total;
            }
            row
        })
        .collect();
    Posteriorgram::new(rows).unwrap()
}
