//! Tokens, transcript corpora, edit alignment, word error rate and a
//! synthetic recognizer-noise generator.

mod align;
mod file;
mod noise;
pub mod synth;
mod token;

pub use align::{align, wer, AlignedPair, EditOp, OpCounts, WerReport};
pub use file::{load_corpus, parse_corpus, write_corpus};
pub use noise::{corrupt, corrupt_corpus, recognizer_profile, NoiseProfile, RECOGNIZER_WORDS};
pub use token::{join, normalize, tokenize, Channel, Speaker, Token, Utterance};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("word error rate is undefined: {0}")]
    UndefinedRate(String),
    #[error("corpus line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid noise profile: {0}")]
    InvalidProfile(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// The thirteen recognizer/reference pairs from the sample dialogue.
pub const RECOGNIZER_SAMPLE: &str = include_str!("../../data/recognizer_sample.txt");

pub fn sample_pairs() -> Vec<AlignedPair> {
    parse_corpus(RECOGNIZER_SAMPLE).expect("bundled corpus parses")
}

/// The post-corrector output reported alongside each bundled pair, in the
/// same order as [`sample_pairs`].
pub fn sample_corrected() -> Vec<Vec<Token>> {
    RECOGNIZER_SAMPLE
        .lines()
        .filter_map(|l| l.strip_prefix("# HYP':"))
        .map(tokenize)
        .collect()
}
