//! Classified transcript tokens.

use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the four punctuation marks carried through the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Punct {
    Comma,
    Period,
    Question,
    Exclamation,
}

impl Punct {
    pub const ALL: [Punct; 4] = [Punct::Comma, Punct::Period, Punct::Question, Punct::Exclamation];

    pub fn from_char(c: char) -> Option<Punct> {
        match c {
            ',' => Some(Punct::Comma),
            '.' => Some(Punct::Period),
            '?' => Some(Punct::Question),
            '!' => Some(Punct::Exclamation),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Punct::Comma => ',',
            Punct::Period => '.',
            Punct::Question => '?',
            Punct::Exclamation => '!',
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Punct::Comma => ",",
            Punct::Period => ".",
            Punct::Question => "?",
            Punct::Exclamation => "!",
        }
    }

    /// Lowercase English name, used for report keys and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            Punct::Comma => "comma",
            Punct::Period => "period",
            Punct::Question => "question",
            Punct::Exclamation => "exclamation",
        }
    }

    pub fn from_name(name: &str) -> Option<Punct> {
        match name.trim().to_ascii_lowercase().as_str() {
            "comma" | "," => Some(Punct::Comma),
            "period" | "." => Some(Punct::Period),
            "question" | "?" => Some(Punct::Question),
            "exclamation" | "!" => Some(Punct::Exclamation),
            _ => None,
        }
    }
}

/// Token class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Comma,
    Period,
    Question,
    Exclamation,
}

impl From<Punct> for TokenKind {
    fn from(p: Punct) -> Self {
        match p {
            Punct::Comma => TokenKind::Comma,
            Punct::Period => TokenKind::Period,
            Punct::Question => TokenKind::Question,
            Punct::Exclamation => TokenKind::Exclamation,
        }
    }
}

/// A word or a punctuation mark.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Word(String),
    Punct(Punct),
}

impl Token {
    pub fn word(s: impl Into<String>) -> Token {
        Token::Word(s.into())
    }

    pub fn kind(&self) -> TokenKind {
        match self {
            Token::Word(_) => TokenKind::Word,
            Token::Punct(p) => (*p).into(),
        }
    }

    pub fn surface(&self) -> &str {
        match self {
            Token::Word(w) => w,
            Token::Punct(p) => p.as_str(),
        }
    }

    pub fn is_punct(&self) -> bool {
        matches!(self, Token::Punct(_))
    }

    pub fn is_word(&self) -> bool {
        matches!(self, Token::Word(_))
    }

    pub fn punct(&self) -> Option<Punct> {
        match self {
            Token::Punct(p) => Some(*p),
            Token::Word(_) => None,
        }
    }

    /// Classify one whitespace-free unit.
    pub fn classify(unit: &str) -> Token {
        let mut chars = unit.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => match Punct::from_char(c) {
                Some(p) => Token::Punct(p),
                None => Token::Word(unit.to_string()),
            },
            _ => Token::Word(unit.to_string()),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.surface())
    }
}

/// An ordered token sequence with no two adjacent identical punctuation marks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NormalizedTranscript {
    tokens: Vec<Token>,
}

impl NormalizedTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a transcript, collapsing runs of the same punctuation mark.
    pub fn from_tokens<I: IntoIterator<Item = Token>>(tokens: I) -> Self {
        let mut t = Self::new();
        for tok in tokens {
            t.push(tok);
        }
        t
    }

    pub fn push(&mut self, tok: Token) {
        if let (Token::Punct(p), Some(Token::Punct(last))) = (&tok, self.tokens.last()) {
            if p == last {
                return;
            }
        }
        self.tokens.push(tok);
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().filter_map(|t| match t {
            Token::Word(w) => Some(w.as_str()),
            Token::Punct(_) => None,
        })
    }

    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_word()).count()
    }

    pub fn punct_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_punct()).count()
    }

    /// Renders with punctuation attached to the preceding word, e.g. `hello, world.`
    pub fn to_attached_string(&self) -> String {
        let mut out = String::new();
        for tok in &self.tokens {
            match tok {
                Token::Punct(p) if !out.is_empty() => out.push(p.as_char()),
                _ => {
                    if !out.is_empty() {
                        out.push(' ');
                    }
                    out.push_str(tok.surface());
                }
            }
        }
        out
    }
}

impl fmt::Display for NormalizedTranscript {
    /// Space-separated tokens; the line format for normalized text files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tok) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(tok.surface())?;
        }
        Ok(())
    }
}

impl FromIterator<Token> for NormalizedTranscript {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        Self::from_tokens(iter)
    }
}

/// Splits already-clean text into tokens without any other cleanup.
///
/// Punctuation marks glued to the edges of a unit (`segment.`) are split off,
/// so both the spaced and the attached renderings tokenize the same way.
pub fn tokenize(text: &str) -> NormalizedTranscript {
    let mut out = NormalizedTranscript::new();
    for unit in text.split_whitespace() {
        let mut word = String::new();
        for c in unit.chars() {
            match Punct::from_char(c) {
                Some(p) => {
                    if !word.is_empty() {
                        out.push(Token::Word(std::mem::take(&mut word)));
                    }
                    out.push(Token::Punct(p));
                }
                None => word.push(c),
            }
        }
        if !word.is_empty() {
            out.push(Token::Word(word));
        }
    }
    out
}
