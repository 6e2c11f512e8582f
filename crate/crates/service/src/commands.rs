//! The command-line tools, as functions returning their output text.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::json;
use trains_core::corpus::{
    corrupt_corpus, join, load_corpus, recognizer_profile, tokenize, write_corpus, Channel, Token, Utterance,
};
use trains_core::grammar::Grammar;
use trains_core::session::{replay as run_replay, Resources, Transcript};
use trains_core::speechpp::{
    eval_curve as run_curve, write_channel, write_lm, BigramLm, ChannelConfig, ChannelModel, EvalSettings,
    PostCorrector,
};

use crate::config::resolve_scenario;
use crate::ServiceError;

pub fn train_lm(corpus: &Path, discount: f64) -> Result<String, ServiceError> {
    let pairs = load_corpus(corpus)?;
    let refs: Vec<Utterance> = pairs
        .iter()
        .map(|p| Utterance::user(p.reference.clone(), Channel::Speech))
        .collect();
    Ok(write_lm(&BigramLm::train(&refs, discount)?))
}

pub fn train_channel(corpus: &Path, config: ChannelConfig) -> Result<String, ServiceError> {
    let pairs = load_corpus(corpus)?;
    Ok(write_channel(&ChannelModel::train(&pairs, config)?))
}

/// One corrected line per input line.
pub fn correct(corrector: &PostCorrector, lines: &[String]) -> Result<String, ServiceError> {
    let mut out = String::new();
    for line in lines {
        let c = corrector.correct(&tokenize(line))?;
        out.push_str(&join(&c.tokens));
        out.push('\n');
    }
    Ok(out)
}

/// One JSON act analysis per input line.
pub fn parse(grammar: &Grammar, lines: &[String]) -> String {
    let mut out = String::new();
    for line in lines {
        let seq = grammar.interpret(&tokenize(line));
        out.push_str(&json!({ "input": line, "analysis": seq }).to_string());
        out.push('\n');
    }
    out
}

pub struct ReplayOptions<'a> {
    pub scenario: &'a str,
    pub transcript: &'a Path,
    pub channel: Channel,
    pub seed: u64,
    /// Include the full turn log in the output.
    pub turn_log: bool,
}

pub fn replay(resources: &Resources, opts: &ReplayOptions) -> Result<String, ServiceError> {
    let scenario = resolve_scenario(opts.scenario)?;
    let transcript = Transcript::load(opts.transcript)?;
    let (report, session) = run_replay(&scenario, &transcript, opts.channel, opts.seed, resources)?;
    let mut body = json!({
        "scenario": scenario.name,
        "seed": opts.seed,
        "report": report,
        "solution": report.solution_hours.to_string(),
        "final_snapshot": session.snapshot_hash(),
    });
    if opts.turn_log {
        body["turns"] = json!(session.turn_log());
    }
    Ok(serde_json::to_string_pretty(&body).expect("replay output serializes"))
}

/// Corrupts `utterances` with a recognizer-like profile over their own
/// vocabulary and returns the REF/HYP corpus.
pub fn corrupt(utterances: &[Vec<Token>], target_wer: f64, seed: u64) -> Result<String, ServiceError> {
    if !(0.0..1.0).contains(&target_wer) {
        return Err(ServiceError::Config(format!("target WER {target_wer} outside [0, 1)")));
    }
    let vocab: Vec<Token> = utterances
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let profile = recognizer_profile(&vocab, &[], &[], target_wer, seed);
    profile.validate()?;
    let utts: Vec<Utterance> = utterances
        .iter()
        .map(|t| Utterance::user(t.clone(), Channel::Speech))
        .collect();
    Ok(write_corpus(&corrupt_corpus(&utts, &profile)))
}

/// CSV of the averaged learning curve.
pub fn eval_curve(
    corpus: &Path,
    holdout: f64,
    fractions: &[f64],
    resamples: usize,
    seed: u64,
    settings: &EvalSettings,
) -> Result<String, ServiceError> {
    let pairs = load_corpus(corpus)?;
    let points = run_curve(&pairs, holdout, fractions, resamples, seed, settings)?;
    let mut out = String::from("fraction,baseline_wer,corrected_wer\n");
    for p in points {
        out.push_str(&format!("{},{:.6},{:.6}\n", p.fraction, p.baseline_wer, p.corrected_wer));
    }
    Ok(out)
}
