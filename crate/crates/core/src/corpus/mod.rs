//! Corpus files: segmented transcripts and language-model text.

pub mod stm;
pub mod wiki;

pub use stm::{parse_stm, write_stm, StmError, StmSegment};
pub use wiki::{filter_wiki, prepare_lm_text, WikiDocument};
