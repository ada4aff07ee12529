//! Command-line front end.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::align::{select_best_transcript, similarity_ratio, transfer_punctuation, ScoreScheme, DEFAULT_THRESHOLD};
use crate::corpus::{filter_wiki, parse_stm, prepare_lm_text, write_stm, StmSegment, WikiDocument};
use crate::decoder::{decode_batch, greedy_decode, train_bigram, DecodeConfig, LmScorer, Posteriorgram, UniformLm};
use crate::metrics::{aggregate, score_corpus, MetricsReport, ScoringOptions, SerDenominator};
use crate::normalize::{normalize, strip_punctuation};
use crate::token::{tokenize, NormalizedTranscript, Punct, Token};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Pairing(String),
    #[error("{0}")]
    Rejected(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Invalid(_) => 2,
            CliError::Pairing(_) => 3,
            CliError::Rejected(_) => 4,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "puncteval", version, about = "Punctuation-aware transcript evaluation and decoding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize each input line into space-separated tokens.
    Normalize(IoArgs),
    /// Pick the candidate transcript most similar to an stm file.
    Match {
        stm: PathBuf,
        /// One candidate transcript per line.
        candidates: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Copy punctuation from an online transcript onto stm segments.
    Punctuate {
        online: PathBuf,
        stm: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Score hypothesis segments against reference segments.
    Score(ScoreArgs),
    /// Keep well-formed paragraphs of an encyclopedia dump.
    FilterWiki {
        #[command(flatten)]
        io: IoArgs,
        /// Emit normalized LM training lines instead of filtered text.
        #[arg(long)]
        lm_text: bool,
    },
    /// Decode posteriorgrams into transcripts.
    Decode {
        posteriorgram: PathBuf,
        /// `uniform`, or a text file with one training transcript per line.
        #[arg(long, default_value = "uniform")]
        lm: String,
        #[arg(long, default_value_t = DecodeConfig::default().gamma)]
        gamma: f64,
        #[arg(long, default_value_t = DecodeConfig::default().beam_width)]
        beam: usize,
        /// Per-frame argmax instead of beam search.
        #[arg(long)]
        greedy: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Defaults to standard input.
    pub input: Option<PathBuf>,
    /// Defaults to standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    #[arg(long, default_value_t = ScoreScheme::default().gap_open, allow_hyphen_values = true)]
    pub gap_open: f64,
    #[arg(long, default_value_t = ScoreScheme::default().gap_extend, allow_hyphen_values = true)]
    pub gap_extend: f64,
}

impl SchemeArgs {
    fn scheme(&self) -> Result<ScoreScheme, CliError> {
        let d = ScoreScheme::default();
        ScoreScheme::new(d.match_score, d.mismatch_score, self.gap_open, self.gap_extend).map_err(invalid)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Denominator {
    /// Reference punctuation count.
    Reference,
    /// Correct + substituted + deleted marks.
    CorrectSubDel,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// One segment per line, or an `.stm` file.
    pub reference: PathBuf,
    pub hypothesis: PathBuf,
    /// Pair segments by position when the counts differ; missing ones are empty.
    #[arg(long)]
    pub pair_by_index: bool,
    /// Run full normalization instead of treating lines as pre-normalized.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Marks scored separately, by name or symbol: question,period,exclamation.
    #[arg(long, value_delimiter = ',', default_value = "question,period,comma")]
    pub per_punct: Vec<String>,
    #[arg(long, value_enum, default_value_t = Denominator::Reference)]
    pub denominator: Denominator,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) => read_file(p),
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
            Ok(s)
        }
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => io::stdout()
            .lock()
            .write_all(content.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn check_threshold(t: f64) -> Result<(), CliError> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("threshold {t} must lie strictly between 0 and 1")))
    }
}

fn normalize_text(text: &str) -> Result<NormalizedTranscript, CliError> {
    normalize(text).map_err(invalid)
}

fn is_stm(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("stm"))
}

/// Segment texts of a plain or `.stm` file.
fn read_segments(path: &Path) -> Result<Vec<String>, CliError> {
    let content = read_file(path)?;
    if is_stm(path) {
        let segs = parse_stm(&content).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        Ok(segs.into_iter().map(|s| s.text).collect())
    } else {
        Ok(content.lines().map(str::to_string).collect())
    }
}

fn stm_words(segments: &[StmSegment]) -> Result<Vec<NormalizedTranscript>, CliError> {
    segments.iter().map(|s| normalize_text(&s.text).map(|t| strip_punctuation(&t))).collect()
}

pub fn cmd_normalize(args: &IoArgs) -> Result<(), CliError> {
    let input = read_input(args.input.as_deref())?;
    let mut out = String::new();
    for line in input.lines() {
        out.push_str(&normalize_text(line)?.to_string());
        out.push('\n');
    }
    write_output(args.output.as_deref(), &out)
}

pub fn cmd_match(stm: &Path, candidates: &Path, threshold: f64) -> Result<String, CliError> {
    check_threshold(threshold)?;
    let segments = parse_stm(&read_file(stm)?).map_err(invalid)?;
    let words: NormalizedTranscript = stm_words(&segments)?.into_iter().flat_map(|t| t.into_tokens()).collect();
    let cands = read_file(candidates)?
        .lines()
        .map(normalize_text)
        .collect::<Result<Vec<_>, _>>()?;
    let best = select_best_transcript(&cands, &words, threshold).map_err(invalid)?;
    match best {
        Some(i) => {
            let ratio = similarity_ratio(&cands[i], &words).map_err(invalid)?;
            Ok(format!("line={} ratio={ratio:.3}\n", i + 1))
        }
        None => Err(CliError::Rejected(format!("no candidate is more than {threshold} similar to the stm"))),
    }
}

/// Splits a punctuated word stream back into segments holding `counts[i]` words each.
/// Marks stay with the segment of the word they follow.
fn split_by_word_counts(tokens: &[Token], counts: &[usize]) -> Vec<NormalizedTranscript> {
    let mut out = vec![NormalizedTranscript::new(); counts.len()];
    let mut seg = 0;
    let mut taken = 0;
    for tok in tokens {
        if tok.is_word() {
            while seg < counts.len() && taken == counts[seg] {
                seg += 1;
                taken = 0;
            }
            taken += 1;
        }
        if let Some(s) = out.get_mut(seg.min(counts.len().saturating_sub(1))) {
            s.push(tok.clone());
        }
    }
    out
}

pub fn cmd_punctuate(online: &Path, stm: &Path, threshold: f64, scheme: &ScoreScheme) -> Result<String, CliError> {
    check_threshold(threshold)?;
    let online = normalize_text(&read_file(online)?)?;
    let segments = parse_stm(&read_file(stm)?).map_err(invalid)?;
    let per_segment = stm_words(&segments)?;
    let counts: Vec<usize> = per_segment.iter().map(NormalizedTranscript::word_count).collect();
    let words: NormalizedTranscript = per_segment.into_iter().flat_map(|t| t.into_tokens()).collect();
    if words.is_empty() {
        return Err(CliError::Rejected("the stm has no words".into()));
    }
    let ratio = similarity_ratio(&online, &words).map_err(invalid)?;
    if ratio <= threshold {
        return Err(CliError::Rejected(format!("similarity {ratio:.3} does not exceed {threshold}")));
    }
    let punctuated = transfer_punctuation(&online, &words, scheme).map_err(|e| CliError::Rejected(e.to_string()))?;
    let texts = split_by_word_counts(punctuated.tokens(), &counts);
    let out: Vec<StmSegment> = segments
        .iter()
        .zip(texts)
        .map(|(s, t)| StmSegment { start: s.start, end: s.end, text: t.to_attached_string() })
        .collect();
    Ok(write_stm(&out))
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema: u32,
    segments: &'a [MetricsReport],
    aggregate: &'a MetricsReport,
}

pub fn cmd_score(args: &ScoreArgs) -> Result<String, CliError> {
    let mut refs = read_segments(&args.reference)?;
    let mut hyps = read_segments(&args.hypothesis)?;
    if refs.len() != hyps.len() {
        if !args.pair_by_index {
            return Err(CliError::Pairing(format!(
                "{} reference segments but {} hypothesis segments; use --pair-by-index to pair by position",
                refs.len(),
                hyps.len()
            )));
        }
        let n = refs.len().max(hyps.len());
        refs.resize(n, String::new());
        hyps.resize(n, String::new());
    }
    let prepare = |s: &String| if args.normalize { normalize_text(s) } else { Ok(tokenize(s)) };
    let pairs = refs
        .iter()
        .zip(&hyps)
        .map(|(r, h)| Ok((prepare(r)?, prepare(h)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let per_punct = args
        .per_punct
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| Punct::from_name(s).ok_or_else(|| CliError::Invalid(format!("unknown punctuation mark `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let denominator = match args.denominator {
        Denominator::Reference => SerDenominator::ReferenceCount,
        Denominator::CorrectSubDel => SerDenominator::CorrectSubDel,
    };
    let opts = ScoringOptions { denominator, per_punct, ..ScoringOptions::default() };
    let (segs, report) = score_corpus(&pairs, &opts).map_err(invalid)?;
    let per_segment = segs
        .iter()
        .map(|s| aggregate(std::slice::from_ref(s), denominator))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    match args.format {
        Format::Json => {
            let json = JsonReport { schema: SCHEMA_VERSION, segments: &per_segment, aggregate: &report };
            let mut s = serde_json::to_string_pretty(&json).map_err(invalid)?;
            s.push('\n');
            Ok(s)
        }
        Format::Text => {
            let mut s = String::new();
            for (i, r) in per_segment.iter().enumerate() {
                let fields: Vec<String> = r
                    .key_values()
                    .into_iter()
                    .filter(|(k, _)| k != "segments")
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                s.push_str(&format!("segment={} {}\n", i + 1, fields.join(" ")));
            }
            for (k, v) in report.key_values() {
                s.push_str(&format!("{k}={v}\n"));
            }
            Ok(s)
        }
    }
}

pub fn cmd_filter_wiki(input: &str, lm_text: bool) -> Result<String, CliError> {
    let doc = WikiDocument::from_text(input);
    if !lm_text {
        return Ok(filter_wiki(&doc).to_text());
    }
    let mut out = String::new();
    for t in prepare_lm_text(&doc).map_err(invalid)? {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    Ok(out)
}

fn load_lm(spec: &str) -> Result<Box<dyn LmScorer>, CliError> {
    if spec == "uniform" {
        return Ok(Box::new(UniformLm::new(1)));
    }
    let corpus = read_file(Path::new(spec))?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(normalize_text)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Box::new(train_bigram(&corpus).map_err(invalid)?))
}

pub fn cmd_decode(path: &Path, lm: &str, cfg: &DecodeConfig, greedy: bool) -> Result<String, CliError> {
    cfg.validate().map_err(invalid)?;
    let posts = Posteriorgram::parse_many(&read_file(path)?)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let lines: Vec<NormalizedTranscript> = if greedy {
        posts.iter().map(greedy_decode).collect()
    } else {
        let lm = load_lm(lm)?;
        decode_batch(&posts, &lm, cfg).into_iter().collect::<Result<_, _>>().map_err(invalid)?
    };
    Ok(lines.iter().map(|t| format!("{t}\n")).collect())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Normalize(io) => cmd_normalize(io),
        Command::Match { stm, candidates, threshold } => write_output(None, &cmd_match(stm, candidates, *threshold)?),
        Command::Punctuate { online, stm, output, threshold, scheme } => {
            let out = cmd_punctuate(online, stm, *threshold, &scheme.scheme()?)?;
            write_output(output.as_deref(), &out)
        }
        Command::Score(args) => write_output(args.output.as_deref(), &cmd_score(args)?),
        Command::FilterWiki { io, lm_text } => {
            let out = cmd_filter_wiki(&read_input(io.input.as_deref())?, *lm_text)?;
            write_output(io.output.as_deref(), &out)
        }
        Command::Decode { posteriorgram, lm, gamma, beam, greedy, output } => {
            let cfg = DecodeConfig { beam_width: *beam, gamma: *gamma, ..DecodeConfig::default() };
            write_output(output.as_deref(), &cmd_decode(posteriorgram, lm, &cfg, *greedy)?)
        }
    }
}
