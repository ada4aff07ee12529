//! Selection of encyclopedia paragraphs as language-model training text.

use crate::normalize::{normalize, NormalizeError};
use crate::token::{NormalizedTranscript, Token};

pub const MIN_WORDS: usize = 20;
pub const MIN_TERMINALS: usize = 2;
/// A paragraph survives only with a run of more than this many adjacent clean sentences.
pub const MAX_SHORT_RUN: usize = 2;

const UNK: &str = "<unk>";

/// Body paragraphs of one article.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WikiDocument {
    pub paragraphs: Vec<String>,
}

impl WikiDocument {
    /// Reads blank-line separated paragraphs. Lines inside a paragraph are
    /// joined with spaces; `== Heading ==` lines are dropped.
    pub fn from_text(text: &str) -> Self {
        let mut paragraphs = Vec::new();
        let mut current: Vec<&str> = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() {
                if !current.is_empty() {
                    paragraphs.push(current.join(" "));
                    current.clear();
                }
            } else if !(line.starts_with('=') && line.ends_with('=')) {
                current.push(line);
            }
        }
        if !current.is_empty() {
            paragraphs.push(current.join(" "));
        }
        WikiDocument { paragraphs }
    }

    pub fn to_text(&self) -> String {
        let mut out = self.paragraphs.join("\n\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Splits on `.`, `!` or `?` followed by whitespace or the end of the text.
/// A trailing fragment without a mark is its own sentence.
pub fn split_sentences(paragraph: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut iter = paragraph.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        let at_boundary = match iter.peek() {
            None => true,
            Some((_, next)) => next.is_whitespace(),
        };
        if is_terminal(c) && at_boundary {
            let end = i + c.len_utf8();
            let s = paragraph[start..end].trim();
            if !s.is_empty() {
                out.push(s);
            }
            start = end;
        }
    }
    let tail = paragraph[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

fn word_count(p: &str) -> usize {
    p.split_whitespace().filter(|w| w.chars().any(char::is_alphanumeric)).count()
}

fn terminal_count(p: &str) -> usize {
    split_sentences(p).iter().filter(|s| s.ends_with(is_terminal)).count()
}

fn long_enough(p: &str) -> bool {
    terminal_count(p) >= MIN_TERMINALS && word_count(p) >= MIN_WORDS
}

/// Letters, digits, whitespace, apostrophes, `, . ? !` and the literal `<unk>`.
pub fn is_clean_sentence(s: &str) -> bool {
    s.replace(UNK, " ")
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c.is_whitespace() || matches!(c, '\'' | ',' | '.' | '?' | '!'))
}

fn filter_paragraph(p: &str) -> Option<String> {
    if !long_enough(p) {
        return None;
    }
    let sentences = split_sentences(p);
    let clean: Vec<bool> = sentences.iter().map(|s| is_clean_sentence(s)).collect();
    let mut kept = Vec::new();
    let mut run_start = 0;
    for i in 0..=sentences.len() {
        if i < sentences.len() && clean[i] {
            continue;
        }
        if i - run_start > MAX_SHORT_RUN {
            kept.extend_from_slice(&sentences[run_start..i]);
        }
        run_start = i + 1;
    }
    let joined = kept.join(" ");
    long_enough(&joined).then_some(joined)
}

/// Keeps paragraphs with enough words and full stops, drops sentences with
/// symbols outside the plain alphabet, then drops paragraphs without a run
/// of at least three adjacent surviving sentences. Idempotent.
pub fn filter_wiki(doc: &WikiDocument) -> WikiDocument {
    WikiDocument { paragraphs: doc.paragraphs.iter().filter_map(|p| filter_paragraph(p)).collect() }
}

/// Normalizes text around each `<unk>`, which is kept as a token of its own.
fn normalize_keeping_unk(p: &str) -> Result<NormalizedTranscript, NormalizeError> {
    let mut out = NormalizedTranscript::new();
    for (i, piece) in p.split(UNK).enumerate() {
        if i > 0 {
            out.push(Token::word(UNK));
        }
        for tok in normalize(piece)?.into_tokens() {
            out.push(tok);
        }
    }
    Ok(out)
}

/// Filters, then runs transcript normalization over the surviving paragraphs.
pub fn prepare_lm_text(doc: &WikiDocument) -> Result<Vec<NormalizedTranscript>, NormalizeError> {
    filter_wiki(doc).paragraphs.iter().map(|p| normalize_keeping_unk(p)).collect()
}
