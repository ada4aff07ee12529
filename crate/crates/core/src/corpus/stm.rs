//! Segmented transcript files: one `[start] [end] text` segment per line.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StmError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StmSegment {
    /// Seconds.
    pub start: f64,
    /// Seconds.
    pub end: f64,
    pub text: String,
}

fn malformed(line: usize, reason: impl Into<String>) -> StmError {
    StmError::Malformed { line, reason: reason.into() }
}

/// Leading fields (file, channel, speaker) that may precede the times.
const MAX_LEADING_FIELDS: usize = 3;

fn parse_time(field: &str, line: usize) -> Result<f64, StmError> {
    let inner = field
        .strip_prefix('[')
        .and_then(|f| f.strip_suffix(']'))
        .ok_or_else(|| malformed(line, format!("expected `[seconds]`, found `{field}`")))?;
    let t: f64 = inner
        .trim()
        .parse()
        .map_err(|_| malformed(line, format!("`{inner}` is not a number")))?;
    if !t.is_finite() || t < 0.0 {
        return Err(malformed(line, format!("time `{inner}` must be a nonnegative number")));
    }
    Ok(t)
}

/// Splits off the next whitespace-delimited field, returning it and the rest.
fn next_field(s: &str) -> Option<(&str, &str)> {
    let s = s.trim_start();
    if s.is_empty() {
        return None;
    }
    let end = s.find(char::is_whitespace).unwrap_or(s.len());
    Some((&s[..end], &s[end..]))
}

fn parse_line(raw: &str, line: usize) -> Result<StmSegment, StmError> {
    let mut rest = raw;
    let mut skipped = 0;
    let start_field = loop {
        let (field, tail) = next_field(rest).ok_or_else(|| malformed(line, "missing start time"))?;
        rest = tail;
        if field.starts_with('[') {
            break field;
        }
        skipped += 1;
        if skipped > MAX_LEADING_FIELDS {
            return Err(malformed(line, "expected `[start] [end] text`"));
        }
    };
    let start = parse_time(start_field, line)?;
    let (end_field, tail) = next_field(rest).ok_or_else(|| malformed(line, "missing end time"))?;
    let end = parse_time(end_field, line)?;
    if start >= end {
        return Err(malformed(line, format!("start {start} is not before end {end}")));
    }
    Ok(StmSegment { start, end, text: tail.trim().to_string() })
}

/// Parses every nonblank line; errors carry 1-based line numbers.
pub fn parse_stm(content: &str) -> Result<Vec<StmSegment>, StmError> {
    content
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}

/// One line per segment, times with two decimals.
pub fn write_stm(segments: &[StmSegment]) -> String {
    let mut out = String::new();
    for s in segments {
        out.push_str(&format!("[{:.2}] [{:.2}]", s.start, s.end));
        if !s.text.is_empty() {
            out.push(' ');
            out.push_str(&s.text);
        }
        out.push('\n');
    }
    out
}
