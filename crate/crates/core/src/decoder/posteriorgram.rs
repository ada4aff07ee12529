use super::{DecodeError, MIN_PROB, NUM_SYMBOLS};

/// Rows further than this from summing to one are rejected.
const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Per-frame distributions over the 33 symbols, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Posteriorgram {
    probs: Vec<f64>,
}

impl Posteriorgram {
    /// Validates each row and rescales it to sum to exactly one.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, DecodeError> {
        let mut probs = Vec::with_capacity(rows.len() * NUM_SYMBOLS);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != NUM_SYMBOLS {
                return Err(DecodeError::WrongWidth(row.len()));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(DecodeError::Format { line: r + 1, reason: "probabilities must be finite and nonnegative".into() });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(DecodeError::RowSum { row: r, sum });
            }
            probs.extend(row.iter().map(|p| p / sum));
        }
        Ok(Posteriorgram { probs })
    }

    pub fn frames(&self) -> usize {
        self.probs.len() / NUM_SYMBOLS
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.probs[t * NUM_SYMBOLS..(t + 1) * NUM_SYMBOLS]
    }

    pub fn prob(&self, t: usize, symbol: usize) -> f64 {
        self.probs[t * NUM_SYMBOLS + symbol]
    }

    /// Symbols with nonnegligible probability in at least one frame, ascending.
    pub fn active_symbols(&self) -> Vec<usize> {
        (0..NUM_SYMBOLS).filter(|&s| (0..self.frames()).any(|t| self.prob(t, s) > MIN_PROB)).collect()
    }

    /// Parses one or more `T 33` blocks. Blank lines and `#` comments are ignored.
    pub fn parse_many(text: &str) -> Result<Vec<Posteriorgram>, DecodeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut out = Vec::new();
        while let Some((line, header)) = lines.next() {
            let fields: Vec<&str> = header.split_whitespace().collect();
            let [t, width] = fields[..] else {
                return Err(DecodeError::Format { line, reason: format!("expected header `T 33`, found `{header}`") });
            };
            let parse_count = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| DecodeError::Format { line, reason: format!("`{s}` is not a count") })
            };
            let (t, width) = (parse_count(t)?, parse_count(width)?);
            if width != NUM_SYMBOLS {
                return Err(DecodeError::WrongWidth(width));
            }
            let mut rows = Vec::with_capacity(t);
            for _ in 0..t {
                let (line, row) = lines
                    .next()
                    .ok_or(DecodeError::Format { line, reason: format!("expected {t} rows") })?;
                let values = row
                    .split_whitespace()
                    .map(|v| v.parse::<f64>())
                    .collect::<Result<Vec<f64>, _>>()
                    .map_err(|e| DecodeError::Format { line, reason: e.to_string() })?;
                if values.len() != NUM_SYMBOLS {
                    return Err(DecodeError::Format { line, reason: format!("expected 33 values, found {}", values.len()) });
                }
                rows.push(values);
            }
            out.push(Posteriorgram::new(rows).map_err(|e| match e {
                DecodeError::Format { line: r, reason } => DecodeError::Format { line: line + r, reason },
                other => other,
            })?);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.frames(), NUM_SYMBOLS);
        for t in 0..self.frames() {
            let row: Vec<String> = self.row(t).iter().map(|p| format!("{p:e}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}
