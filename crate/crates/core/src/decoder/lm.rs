//! Word-level language models over normalized tokens.

use std::collections::HashMap;
use std::sync::Arc;

use super::DecodeError;
use crate::token::NormalizedTranscript;

pub const UNK: &str = "<unk>";

/// Natural-log probability of `next` after `history` (oldest first).
pub trait LmScorer: Send + Sync {
    fn log_prob(&self, history: &[String], next: &str) -> f64;
}

impl<L: LmScorer + ?Sized> LmScorer for &L {
    fn log_prob(&self, history: &[String], next: &str) -> f64 {
        (**self).log_prob(history, next)
    }
}

impl<L: LmScorer + ?Sized> LmScorer for Box<L> {
    fn log_prob(&self, history: &[String], next: &str) -> f64 {
        (**self).log_prob(history, next)
    }
}

/// Every token gets `1 / vocab_size`. With a single-entry vocabulary the LM
/// contributes nothing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformLm {
    log_p: f64,
}

impl UniformLm {
    pub fn new(vocab_size: usize) -> Self {
        UniformLm { log_p: -(vocab_size.max(1) as f64).ln() }
    }
}

impl LmScorer for UniformLm {
    fn log_prob(&self, _history: &[String], _next: &str) -> f64 {
        self.log_p
    }
}

/// Add-one smoothed bigram model. The sentence start is its own context;
/// unseen contexts back off to the add-one unigram.
#[derive(Clone, Debug)]
pub struct BigramLm {
    ids: HashMap<String, usize>,
    unigram: Vec<u64>,
    /// Indexed by context id; the last slot is the sentence start.
    context_totals: Vec<u64>,
    bigrams: HashMap<(usize, usize), u64>,
    tokens: u64,
}

impl BigramLm {
    /// Vocabulary size, counting `<unk>`.
    pub fn vocab_size(&self) -> usize {
        self.ids.len()
    }

    fn id(&self, token: &str) -> usize {
        self.ids.get(token).copied().unwrap_or(self.ids[UNK])
    }

    fn start(&self) -> usize {
        self.ids.len()
    }
}

impl LmScorer for BigramLm {
    fn log_prob(&self, history: &[String], next: &str) -> f64 {
        let v = self.vocab_size() as f64;
        let w = self.id(next);
        let ctx = history.last().map_or(self.start(), |h| self.id(h));
        let total = self.context_totals[ctx];
        if total == 0 {
            return ((self.unigram[w] + 1) as f64 / (self.tokens as f64 + v)).ln();
        }
        let pair = self.bigrams.get(&(ctx, w)).copied().unwrap_or(0);
        ((pair + 1) as f64 / (total as f64 + v)).ln()
    }
}

/// Counts tokens of each transcript, each starting a fresh sentence.
pub fn train_bigram(corpus: &[NormalizedTranscript]) -> Result<BigramLm, DecodeError> {
    if corpus.iter().all(NormalizedTranscript::is_empty) {
        return Err(DecodeError::EmptyCorpus);
    }
    let mut ids: HashMap<String, usize> = HashMap::new();
    ids.insert(UNK.to_string(), 0);
    let mut seqs = Vec::with_capacity(corpus.len());
    for t in corpus {
        let seq: Vec<usize> = t
            .tokens()
            .iter()
            .map(|tok| {
                let n = ids.len();
                *ids.entry(tok.surface().to_string()).or_insert(n)
            })
            .collect();
        seqs.push(seq);
    }
    let start = ids.len();
    let mut unigram = vec![0u64; ids.len()];
    let mut context_totals = vec![0u64; ids.len() + 1];
    let mut bigrams = HashMap::new();
    let mut tokens = 0;
    for seq in &seqs {
        let mut prev = start;
        for &w in seq {
            unigram[w] += 1;
            context_totals[prev] += 1;
            *bigrams.entry((prev, w)).or_insert(0) += 1;
            tokens += 1;
            prev = w;
        }
    }
    Ok(BigramLm { ids, unigram, context_totals, bigrams, tokens })
}

fn is_mark(c: char) -> bool {
    matches!(c, ',' | '.' | '?' | '!')
}

/// LM score of a character prefix, scored token by token as words complete.
#[derive(Clone, Debug, Default)]
pub(crate) struct LmState {
    history: Arc<Vec<String>>,
    partial: String,
    /// Sum over completed tokens.
    pub score: f64,
}

impl LmState {
    fn complete<L: LmScorer>(&mut self, token: String, lm: &L) {
        self.score += lm.log_prob(&self.history, &token);
        Arc::make_mut(&mut self.history).push(token);
    }

    pub fn push<L: LmScorer>(&self, c: char, lm: &L) -> LmState {
        let mut next = self.clone();
        if c == ' ' || is_mark(c) {
            if !next.partial.is_empty() {
                let word = std::mem::take(&mut next.partial);
                next.complete(word, lm);
            }
            if is_mark(c) {
                next.complete(c.to_string(), lm);
            }
        } else {
            next.partial.push(c);
        }
        next
    }

    /// Score with any unfinished word completed.
    pub fn final_score<L: LmScorer>(&self, lm: &L) -> f64 {
        if self.partial.is_empty() {
            self.score
        } else {
            self.score + lm.log_prob(&self.history, &self.partial)
        }
    }
}

/// LM log probability of a decoded character string.
pub fn score_text<L: LmScorer>(text: &str, lm: &L) -> f64 {
    let mut state = LmState::default();
    for c in text.chars() {
        state = state.push(c, lm);
    }
    state.final_score(lm)
}
