//! Statistical post-correction of recognizer output: a channel model of
//! recognizer confusions, a back-off bigram language model, and a Viterbi
//! beam decoder that recovers the most likely spoken word sequence.

mod channel;
mod decode;
mod eval;
mod file;
pub mod fixture;
mod lm;

pub use channel::{ChannelConfig, ChannelModel, Emission};
pub use decode::{
    correct, exhaustive_correct, Correction, PostCorrector, EXHAUSTIVE_MAX_LEN,
    EXHAUSTIVE_MAX_VOCAB,
};
pub use eval::{eval_curve, eval_postcorrection, CurvePoint, EvalSettings};
pub use file::{load_channel, load_lm, read_channel, read_lm, write_channel, write_lm};
pub use lm::{BigramLm, BOS, EOS, UNK};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot train on an empty corpus")]
    EmptyCorpus,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("input too large for exhaustive search: {0}")]
    Refused(String),
    #[error("train and test sets overlap at index {0}")]
    Overlap(usize),
    #[error("model file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
