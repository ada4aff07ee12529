//! Word, character and punctuation error metrics.

pub mod dlev;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::align::levenshtein;
use crate::normalize::strip_punctuation;
use crate::parallel::{map_ordered, map_sequential};
use crate::token::{NormalizedTranscript, Punct};

pub use dlev::{edit_path, CostModel, EditOp, EditPath, PunctCounts, SlotClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no segments to aggregate")]
    EmptyCorpus,
    #[error("generic slot error rate has no notion of swaps (got {0})")]
    SwapsInGenericSer(usize),
}

/// Denominator of the slot error rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SerDenominator {
    /// Number of slot tokens in the reference.
    #[default]
    ReferenceCount,
    /// `C + S + D` read off the edit path.
    CorrectSubDel,
}

impl SerDenominator {
    fn value(self, c: &PunctCounts) -> usize {
        match self {
            SerDenominator::ReferenceCount => c.ref_total,
            SerDenominator::CorrectSubDel => c.correct + c.substitutions + c.deletions,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoringOptions {
    pub denominator: SerDenominator,
    /// Count punctuation tokens as words in WER.
    pub wer_includes_punct: bool,
    /// Marks that get their own slot error rate.
    pub per_punct: Vec<Punct>,
}

impl Default for ScoringOptions {
    fn default() -> Self {
        ScoringOptions {
            denominator: SerDenominator::ReferenceCount,
            wer_includes_punct: false,
            per_punct: vec![Punct::Question, Punct::Period, Punct::Comma],
        }
    }
}

fn rate(errors: usize, denominator: usize) -> f64 {
    errors as f64 / denominator.max(1) as f64
}

fn word_errors(reference: &NormalizedTranscript, hypothesis: &NormalizedTranscript, with_punct: bool) -> (usize, usize) {
    if with_punct {
        (levenshtein(reference.tokens(), hypothesis.tokens()), reference.len())
    } else {
        let r = strip_punctuation(reference);
        let h = strip_punctuation(hypothesis);
        (levenshtein(r.tokens(), h.tokens()), r.len())
    }
}

fn char_errors(reference: &NormalizedTranscript, hypothesis: &NormalizedTranscript) -> (usize, usize) {
    let r: Vec<char> = strip_punctuation(reference).to_string().chars().collect();
    let h: Vec<char> = strip_punctuation(hypothesis).to_string().chars().collect();
    (levenshtein(&r, &h), r.len())
}

/// Word error rate in percent, punctuation excluded.
pub fn wer(reference: &NormalizedTranscript, hypothesis: &NormalizedTranscript) -> f64 {
    let (e, n) = word_errors(reference, hypothesis, false);
    100.0 * rate(e, n)
}

/// Word error rate in percent with punctuation tokens counted as words.
pub fn wer_with_punct(reference: &NormalizedTranscript, hypothesis: &NormalizedTranscript) -> f64 {
    let (e, n) = word_errors(reference, hypothesis, true);
    100.0 * rate(e, n)
}

/// Character error rate in percent over the space-joined word streams.
pub fn cer(reference: &NormalizedTranscript, hypothesis: &NormalizedTranscript) -> f64 {
    let (e, n) = char_errors(reference, hypothesis);
    100.0 * rate(e, n)
}

/// Precision, recall and F-score of the slot tokens.
///
/// Precision divides by the hypothesis slot count and recall by the
/// reference slot count; empty denominators give 0.
pub fn precision_recall_f(counts: &PunctCounts) -> (f64, f64, f64) {
    let ratio = |c: usize, d: usize| if d == 0 { 0.0 } else { c as f64 / d as f64 };
    let p = ratio(counts.correct, counts.hyp_total);
    let r = ratio(counts.correct, counts.ref_total);
    let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    (p, r, f)
}

/// `(I + D + S) / (C + S + D)` for perfectly aligned transcripts.
pub fn generic_ser(counts: &PunctCounts) -> Result<f64, MetricsError> {
    if counts.swaps > 0 {
        return Err(MetricsError::SwapsInGenericSer(counts.swaps));
    }
    let errors = counts.insertions + counts.deletions + counts.substitutions;
    Ok(rate(errors, SerDenominator::CorrectSubDel.value(counts)))
}

/// Edit path with every punctuation mark as a slot.
pub fn dlev_edit_path(reference: &NormalizedTranscript, hypothesis: &NormalizedTranscript) -> EditPath {
    edit_path(reference.tokens(), hypothesis.tokens(), &CostModel::dlev())
}

/// Slot error rate from counts; a zero denominator counts as 1.
pub fn ser_from_counts(counts: &PunctCounts, denominator: SerDenominator) -> f64 {
    rate(counts.errors(), denominator.value(counts))
}

/// Damerau-Levenshtein slot error rate over all punctuation.
pub fn dlev_ser(reference: &NormalizedTranscript, hypothesis: &NormalizedTranscript) -> f64 {
    ser_from_counts(&dlev_edit_path(reference, hypothesis).counts, SerDenominator::ReferenceCount)
}

/// Slot error rate of a single mark, every other token forming the second class.
pub fn punct_specific_dlev_ser(reference: &NormalizedTranscript, hypothesis: &NormalizedTranscript, target: Punct) -> f64 {
    let path = edit_path(reference.tokens(), hypothesis.tokens(), &CostModel::punct_specific(target));
    ser_from_counts(&path.counts, SerDenominator::ReferenceCount)
}

/// Raw tallies for one reference/hypothesis pair.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SegmentScore {
    pub word_errors: usize,
    pub ref_words: usize,
    pub char_errors: usize,
    pub ref_chars: usize,
    pub counts: PunctCounts,
    pub per_punct: BTreeMap<Punct, PunctCounts>,
}

pub fn score_segment(
    reference: &NormalizedTranscript,
    hypothesis: &NormalizedTranscript,
    opts: &ScoringOptions,
) -> SegmentScore {
    let (word_errors, ref_words) = word_errors(reference, hypothesis, opts.wer_includes_punct);
    let (char_errors, ref_chars) = char_errors(reference, hypothesis);
    // the overall pass and each per-mark pass are independent
    let models: Vec<CostModel> = std::iter::once(CostModel::dlev())
        .chain(opts.per_punct.iter().map(|&p| CostModel::punct_specific(p)))
        .collect();
    let all = map_ordered(&models, |m| edit_path(reference.tokens(), hypothesis.tokens(), m).counts);
    let counts = all[0];
    let per_punct = opts.per_punct.iter().copied().zip(all[1..].iter().copied()).collect();
    SegmentScore { word_errors, ref_words, char_errors, ref_chars, counts, per_punct }
}

/// Corpus- or segment-level summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub segments: usize,
    pub wer: f64,
    pub cer: f64,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub dlev_ser: f64,
    pub per_punct_ser: BTreeMap<Punct, f64>,
    pub counts: PunctCounts,
    pub denominator: SerDenominator,
}

impl MetricsReport {
    /// Flat `key value` pairs in a fixed order.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("segments".to_string(), self.segments.to_string()),
            ("wer".to_string(), format!("{:.3}", self.wer)),
            ("cer".to_string(), format!("{:.3}", self.cer)),
            ("dlev_ser".to_string(), format!("{:.3}", self.dlev_ser)),
        ];
        for (p, v) in &self.per_punct_ser {
            kv.push((format!("dlev_ser_{}", p.name()), format!("{v:.3}")));
        }
        kv.extend([
            ("precision".to_string(), format!("{:.3}", self.precision)),
            ("recall".to_string(), format!("{:.3}", self.recall)),
            ("f".to_string(), format!("{:.3}", self.f)),
            ("correct".to_string(), self.counts.correct.to_string()),
            ("insertions".to_string(), self.counts.insertions.to_string()),
            ("deletions".to_string(), self.counts.deletions.to_string()),
            ("substitutions".to_string(), self.counts.substitutions.to_string()),
            ("swaps".to_string(), self.counts.swaps.to_string()),
            ("ref_punct".to_string(), self.counts.ref_total.to_string()),
            ("hyp_punct".to_string(), self.counts.hyp_total.to_string()),
        ]);
        kv
    }
}

/// Micro-averages the segment tallies: summed errors over summed denominators,
/// each corpus-level denominator floored at 1.
pub fn aggregate(segments: &[SegmentScore], denominator: SerDenominator) -> Result<MetricsReport, MetricsError> {
    if segments.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let mut counts = PunctCounts::default();
    let mut per_punct: BTreeMap<Punct, PunctCounts> = BTreeMap::new();
    let (mut we, mut rw, mut ce, mut rc) = (0, 0, 0, 0);
    for s in segments {
        we += s.word_errors;
        rw += s.ref_words;
        ce += s.char_errors;
        rc += s.ref_chars;
        counts.add(&s.counts);
        for (p, c) in &s.per_punct {
            per_punct.entry(*p).or_default().add(c);
        }
    }
    let (precision, recall, f) = precision_recall_f(&counts);
    Ok(MetricsReport {
        segments: segments.len(),
        wer: 100.0 * rate(we, rw),
        cer: 100.0 * rate(ce, rc),
        precision,
        recall,
        f,
        dlev_ser: ser_from_counts(&counts, denominator),
        per_punct_ser: per_punct.iter().map(|(p, c)| (*p, ser_from_counts(c, denominator))).collect(),
        counts,
        denominator,
    })
}

pub type TranscriptPair = (NormalizedTranscript, NormalizedTranscript);

/// Scores every pair (in parallel when enabled) and aggregates.
pub fn score_corpus(pairs: &[TranscriptPair], opts: &ScoringOptions) -> Result<(Vec<SegmentScore>, MetricsReport), MetricsError> {
    let segs = map_ordered(pairs, |(r, h)| score_segment(r, h, opts));
    let report = aggregate(&segs, opts.denominator)?;
    Ok((segs, report))
}

/// [`score_corpus`] on the calling thread only.
pub fn score_corpus_sequential(
    pairs: &[TranscriptPair],
    opts: &ScoringOptions,
) -> Result<(Vec<SegmentScore>, MetricsReport), MetricsError> {
    let segs = map_sequential(pairs, |(r, h)| score_segment(r, h, opts));
    let report = aggregate(&segs, opts.denominator)?;
    Ok((segs, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::tokenize;

    fn t(s: &str) -> NormalizedTranscript {
        tokenize(s)
    }

    fn counts(c: usize, i: usize, d: usize, s: usize, w: usize) -> PunctCounts {
        PunctCounts { correct: c, insertions: i, deletions: d, substitutions: s, swaps: w, ref_total: 0, hyp_total: 0 }
    }

    #[test]
    fn word_error_rate() {
        assert_eq!(wer(&t("a b c"), &t("a b c")), 0.0);
        assert_eq!(wer(&t("a b c d"), &t("a x c d")), 25.0);
        assert_eq!(wer(&t("a b"), &t("")), 100.0);
        assert_eq!(wer(&t(""), &t("a")), 100.0);
        assert_eq!(wer(&t("a , b ."), &t("a b")), 0.0);
        assert_eq!(wer_with_punct(&t("a , b ."), &t("a b")), 50.0);
    }

    #[test]
    fn char_error_rate() {
        assert_eq!(cer(&t("a b"), &t("a b")), 0.0);
        assert!((cer(&t("abc"), &t("abd")) - 33.333).abs() < 0.01);
        assert_eq!(cer(&t("ab"), &t("ab c")), 100.0);
    }

    #[test]
    fn prf() {
        let perfect = PunctCounts { correct: 3, ref_total: 3, hyp_total: 3, ..Default::default() };
        assert_eq!(precision_recall_f(&perfect), (1.0, 1.0, 1.0));
        let none = PunctCounts { correct: 0, ref_total: 2, hyp_total: 3, ..Default::default() };
        assert_eq!(precision_recall_f(&none), (0.0, 0.0, 0.0));
        let half = PunctCounts { correct: 2, ref_total: 2, hyp_total: 4, ..Default::default() };
        let (p, r, f) = precision_recall_f(&half);
        assert_eq!((p, r), (0.5, 1.0));
        assert!((f - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn generic() {
        assert_eq!(generic_ser(&counts(2, 1, 1, 1, 0)).unwrap(), 0.75);
        assert_eq!(generic_ser(&counts(5, 0, 0, 0, 0)).unwrap(), 0.0);
        assert_eq!(generic_ser(&counts(0, 0, 2, 0, 0)).unwrap(), 1.0);
        assert_eq!(generic_ser(&counts(0, 2, 0, 0, 0)).unwrap(), 2.0);
        assert!(generic_ser(&counts(1, 0, 0, 0, 1)).is_err());
    }

    #[test]
    fn dlev_rates() {
        assert_eq!(dlev_ser(&t("a b c"), &t("a , b . c")), 2.0);
        assert_eq!(dlev_ser(&t("a , b"), &t("a , b")), 0.0);
        assert_eq!(dlev_ser(&t("w1 w2 , w4"), &t("w1 . w4")), 1.0);
        assert_eq!(dlev_ser(&t("w1 ."), &t(". w2")), 1.0);
    }

    #[test]
    fn per_mark_rates() {
        assert_eq!(punct_specific_dlev_ser(&t("a ?"), &t("a ."), Punct::Question), 1.0);
        assert_eq!(punct_specific_dlev_ser(&t("a , b"), &t("a , b"), Punct::Comma), 0.0);
        assert_eq!(punct_specific_dlev_ser(&t("a b"), &t("a ? b"), Punct::Question), 1.0);
        assert_eq!(punct_specific_dlev_ser(&t("a , b ."), &t("a . b ."), Punct::Question), 0.0);
    }

    fn seg(errors: usize, ref_total: usize) -> SegmentScore {
        SegmentScore {
            counts: PunctCounts { insertions: errors, ref_total, correct: ref_total, ..Default::default() },
            ..Default::default()
        }
    }

    #[test]
    fn aggregation() {
        assert_eq!(aggregate(&[], SerDenominator::ReferenceCount), Err(MetricsError::EmptyCorpus));
        let r = aggregate(&[seg(1, 2), seg(0, 2)], SerDenominator::ReferenceCount).unwrap();
        assert_eq!(r.dlev_ser, 0.25);
        let r = aggregate(&[seg(2, 0), seg(0, 4)], SerDenominator::ReferenceCount).unwrap();
        assert_eq!(r.dlev_ser, 0.5);
        let r = aggregate(&[seg(2, 0)], SerDenominator::ReferenceCount).unwrap();
        assert_eq!(r.dlev_ser, 2.0);
    }

    #[test]
    fn single_segment_report_matches_direct_metrics() {
        let (r, h) = (t("so , we went home . then ?"), t("so we want home , then"));
        let opts = ScoringOptions::default();
        let (_, report) = score_corpus(&[(r.clone(), h.clone())], &opts).unwrap();
        assert_eq!(report.wer, wer(&r, &h));
        assert_eq!(report.cer, cer(&r, &h));
        assert_eq!(report.dlev_ser, dlev_ser(&r, &h));
        for p in [Punct::Question, Punct::Period, Punct::Comma] {
            assert_eq!(report.per_punct_ser[&p], punct_specific_dlev_ser(&r, &h, p));
        }
    }

    #[test]
    fn alternative_denominator() {
        // a swapped reference mark is outside C + S + D
        let (r, h) = (t("a . b c"), t("a b . c"));
        let path = dlev_edit_path(&r, &h);
        assert_eq!(path.counts.swaps, 1);
        assert_eq!(ser_from_counts(&path.counts, SerDenominator::ReferenceCount), 1.0);
        assert_eq!(ser_from_counts(&path.counts, SerDenominator::CorrectSubDel), 1.0);
        let (r, h) = (t("a . b c ,"), t("a b . c ,"));
        let path = dlev_edit_path(&r, &h);
        assert_eq!(ser_from_counts(&path.counts, SerDenominator::ReferenceCount), 0.5);
        assert_eq!(ser_from_counts(&path.counts, SerDenominator::CorrectSubDel), 1.0);
    }
}
