use std::cmp::Ordering;
use std::collections::HashMap;

use super::lm::LmState;
use super::{fused, select_best, symbol_char, DecodeConfig, DecodeError, LmScorer, Posteriorgram};
use super::{BLANK, MIN_PROB, NUM_SYMBOLS};
use crate::token::{tokenize, NormalizedTranscript};

/// Best string found by a decoder with its fused log score.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub text: String,
    pub score: f64,
}

impl Decoded {
    pub fn transcript(&self) -> NormalizedTranscript {
        tokenize(&self.text)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[derive(Clone)]
struct Entry {
    /// Log mass of paths ending in blank.
    pb: f64,
    /// Log mass of paths ending in the last label.
    pnb: f64,
    lm: LmState,
}

impl Entry {
    fn total(&self) -> f64 {
        log_add(self.pb, self.pnb)
    }
}

fn render(prefix: &[u8]) -> String {
    prefix.iter().filter_map(|&s| symbol_char(s as usize).ok().flatten()).collect()
}

fn extend<'m, L: LmScorer>(
    next: &'m mut HashMap<Vec<u8>, Entry>,
    prefix: &[u8],
    parent: &LmState,
    symbol: u8,
    lm: &L,
    gamma: f64,
) -> &'m mut Entry {
    let mut key = prefix.to_vec();
    key.push(symbol);
    next.entry(key).or_insert_with(|| {
        // the LM is never consulted when it carries no weight
        let state = if gamma == 0.0 {
            parent.clone()
        } else {
            parent.push(symbol_char(symbol as usize).ok().flatten().unwrap_or(' '), lm)
        };
        Entry { pb: f64::NEG_INFINITY, pnb: f64::NEG_INFINITY, lm: state }
    })
}

/// CTC prefix beam search with the LM applied as each token completes.
pub fn beam_decode<L: LmScorer>(post: &Posteriorgram, lm: &L, cfg: &DecodeConfig) -> Result<Decoded, DecodeError> {
    cfg.validate()?;
    let mut beam: Vec<(Vec<u8>, Entry)> =
        vec![(Vec::new(), Entry { pb: 0.0, pnb: f64::NEG_INFINITY, lm: LmState::default() })];
    let mut log_row = [0.0f64; NUM_SYMBOLS];
    for t in 0..post.frames() {
        for (s, lp) in log_row.iter_mut().enumerate() {
            let p = post.prob(t, s);
            *lp = if p > MIN_PROB { p.ln() } else { f64::NEG_INFINITY };
        }
        let mut next: HashMap<Vec<u8>, Entry> = HashMap::with_capacity(beam.len() * 4);
        for (prefix, e) in &beam {
            let total = e.total();
            let last = prefix.last().map(|&s| s as usize);
            if log_row[BLANK] > f64::NEG_INFINITY {
                let n = next.entry(prefix.clone()).or_insert_with(|| Entry {
                    pb: f64::NEG_INFINITY,
                    pnb: f64::NEG_INFINITY,
                    lm: e.lm.clone(),
                });
                n.pb = log_add(n.pb, total + log_row[BLANK]);
            }
            for s in 1..NUM_SYMBOLS {
                let lp = log_row[s];
                if lp == f64::NEG_INFINITY {
                    continue;
                }
                if last == Some(s) {
                    let n = next.entry(prefix.clone()).or_insert_with(|| Entry {
                        pb: f64::NEG_INFINITY,
                        pnb: f64::NEG_INFINITY,
                        lm: e.lm.clone(),
                    });
                    n.pnb = log_add(n.pnb, e.pnb + lp);
                    let n = extend(&mut next, prefix, &e.lm, s as u8, lm, cfg.gamma);
                    n.pnb = log_add(n.pnb, e.pb + lp);
                } else {
                    let n = extend(&mut next, prefix, &e.lm, s as u8, lm, cfg.gamma);
                    n.pnb = log_add(n.pnb, total + lp);
                }
            }
        }
        let mut ranked: Vec<(f64, String, Vec<u8>, Entry)> = next
            .into_iter()
            // rank as if the prefix ended here, unfinished word included
            .map(|(p, e)| (fused(e.total(), e.lm.final_score(lm), cfg.gamma), render(&p), p, e))
            .filter(|(s, ..)| *s > f64::NEG_INFINITY)
            .collect();
        if ranked.is_empty() {
            return Err(DecodeError::Underflow);
        }
        ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then_with(|| a.1.cmp(&b.1)));
        ranked.truncate(cfg.beam_width);
        beam = ranked.into_iter().map(|(_, _, p, e)| (p, e)).collect();
    }
    let finals: Vec<(f64, String)> = beam
        .iter()
        .map(|(p, e)| (fused(e.total(), e.lm.final_score(lm), cfg.gamma), render(p)))
        .collect();
    let (score, text) = select_best(finals.iter().map(|(s, t)| (*s, t.as_str())), cfg.tie_epsilon)
        .ok_or(DecodeError::Underflow)?;
    Ok(Decoded { text: text.to_string(), score })
}

/// [`beam_decode`], returned as normalized tokens.
pub fn ctc_prefix_beam_search<L: LmScorer>(
    post: &Posteriorgram,
    lm: &L,
    cfg: &DecodeConfig,
) -> Result<NormalizedTranscript, DecodeError> {
    beam_decode(post, lm, cfg).map(|d| d.transcript())
}

/// Most likely symbol per frame, collapsed. Ties go to the lower index.
pub fn greedy_decode(post: &Posteriorgram) -> NormalizedTranscript {
    let labels: Vec<usize> = (0..post.frames())
        .map(|t| {
            let row = post.row(t);
            (0..NUM_SYMBOLS).fold(0, |best, s| if row[s] > row[best] { s } else { best })
        })
        .collect();
    tokenize(&super::collapse_ctc(&labels).unwrap_or_default())
}
