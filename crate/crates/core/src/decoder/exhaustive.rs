//! Brute-force decoding by enumerating every frame labelling. Exponential in
//! the number of frames; meant for checking the beam search on short inputs.

use std::collections::HashMap;

use super::beam::Decoded;
use super::lm::score_text;
use super::{collapse_ctc, fused, select_best, DecodeError, LmScorer, Posteriorgram};

pub const DEFAULT_SEARCH_CAP: u128 = 2_000_000;

/// Probability of every collapsed string, summed over the labellings that
/// produce it. Only symbols active somewhere in the input are enumerated.
pub fn collapsed_distribution(post: &Posteriorgram, cap: u128) -> Result<HashMap<String, f64>, DecodeError> {
    let active = post.active_symbols();
    let frames = post.frames();
    let size = (active.len() as u128).checked_pow(frames as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(DecodeError::SearchTooLarge(size, cap));
    }
    let mut dist: HashMap<String, f64> = HashMap::new();
    let mut digits = vec![0usize; frames];
    let mut labels = vec![0usize; frames];
    loop {
        let mut p = 1.0;
        for (t, &d) in digits.iter().enumerate() {
            labels[t] = active[d];
            p *= post.prob(t, active[d]);
        }
        if p > 0.0 {
            *dist.entry(collapse_ctc(&labels)?).or_insert(0.0) += p;
        }
        // odometer increment
        let mut t = 0;
        while t < frames {
            digits[t] += 1;
            if digits[t] < active.len() {
                break;
            }
            digits[t] = 0;
            t += 1;
        }
        if t == frames {
            break;
        }
    }
    Ok(dist)
}

/// Exact maximiser of `ln p_ctc(c) + gamma * ln p_lm(c)`, with the same tie
/// rule as the beam search.
pub fn exhaustive_decode<L: LmScorer>(
    post: &Posteriorgram,
    lm: &L,
    gamma: f64,
    tie_epsilon: f64,
    cap: u128,
) -> Result<Decoded, DecodeError> {
    let dist = collapsed_distribution(post, cap)?;
    let scored: Vec<(f64, &str)> = dist
        .iter()
        .map(|(text, p)| (fused(p.ln(), score_text(text, lm), gamma), text.as_str()))
        .collect();
    let (score, text) = select_best(scored.iter().copied(), tie_epsilon).ok_or(DecodeError::Underflow)?;
    Ok(Decoded { text: text.to_string(), score })
}
