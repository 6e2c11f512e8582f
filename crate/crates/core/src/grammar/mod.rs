//! Bottom-up chart parsing into speech acts.
//!
//! [`parse_chart`] builds every constituent the grammar licenses over every
//! span; [`extract_acts`] picks the cheapest left-to-right covering by act
//! constituents, skipping what it cannot account for.

mod acts;
mod chart;
mod frame;
mod rules;

use std::path::PathBuf;

use thiserror::Error;

pub use acts::{brute_force_acts, confidence, extract_acts, ActSequence, SpeechAct};
pub use chart::{parse_chart, Constituent};
pub use frame::{Frame, Value};
pub use rules::{
    ActType, Category, Constraint, Directive, Grammar, Item, LexEntry, LhsSem, Rule, ACT_SYN,
    UNKNOWN_SYN,
};

use crate::corpus::Token;

#[derive(Debug, Error)]
#[error("grammar line {line}: {message}")]
pub struct GrammarError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// The grammar shipped with the crate.
pub const FIXTURE_GRAMMAR: &str = include_str!("../../data/grammar.grm");

impl Grammar {
    pub fn fixture() -> Grammar {
        Grammar::parse(FIXTURE_GRAMMAR).expect("bundled grammar is well formed")
    }

    pub fn load(path: impl Into<PathBuf>) -> Result<Grammar, LoadError> {
        let path = path.into();
        let text = std::fs::read_to_string(&path).map_err(|source| LoadError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(Grammar::parse(&text)?)
    }

    /// Chart parse plus act extraction.
    pub fn interpret(&self, tokens: &[Token]) -> ActSequence {
        extract_acts(&parse_chart(tokens, self), tokens)
    }
}
