//! Viterbi beam decoding of observed tokens into intended source words, plus
//! an exhaustive enumerator used as its oracle.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::lm::{BOS, EOS};
use super::{BigramLm, ChannelModel, ModelError};
use crate::corpus::Token;

pub const EXHAUSTIVE_MAX_VOCAB: usize = 10;
pub const EXHAUSTIVE_MAX_LEN: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub tokens: Vec<Token>,
    /// Channel log-probability plus language-model log-probability.
    pub log_score: f64,
}

/// Higher score wins; equal scores go to the lexicographically smaller
/// sequence.
fn better(score: f64, seq: &[Token], than_score: f64, than_seq: &[Token]) -> bool {
    match score.partial_cmp(&than_score) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => seq < than_seq,
    }
}

#[derive(Debug, Clone)]
struct Hyp {
    score: f64,
    words: Vec<Token>,
}

/// Every way a source word can begin at `pos`: (source, observed tokens
/// consumed, channel log-probability).
fn expansions(cm: &ChannelModel, observed: &[Token], pos: usize) -> Vec<(Token, usize, f64)> {
    let mut out = Vec::new();
    let o = &observed[pos];
    for s in cm.candidates_one(o) {
        if let Some(lp) = cm.log_prob_one(&s, o) {
            out.push((s, 1, lp));
        }
    }
    if pos + 1 < observed.len() {
        let o2 = &observed[pos + 1];
        for s in cm.candidates_two(o, o2) {
            if let Some(lp) = cm.log_prob_two(&s, o, o2) {
                out.push((s, 2, lp));
            }
        }
    }
    out
}

/// Finds the source sequence maximizing P(observed | source) · P(source).
/// `beam_width` bounds the number of hypotheses kept at each position;
/// `usize::MAX` disables pruning.
///
/// A single pruned pass can lose to a narrower one, because a wider beam
/// admits states that crowd out the eventual winner. The result is therefore
/// the best over passes of every width up to `beam_width`, which makes the
/// score non-decreasing in the width. Once the width reaches the most states
/// any position can hold, one unpruned pass is exact and is used instead.
pub fn correct(
    cm: &ChannelModel,
    lm: &BigramLm,
    observed: &[Token],
    beam_width: usize,
) -> Result<Correction, ModelError> {
    if beam_width == 0 {
        return Err(ModelError::InvalidParameter(
            "beam width must be at least 1".into(),
        ));
    }
    if observed.is_empty() {
        return Ok(Correction {
            tokens: Vec::new(),
            log_score: 0.0,
        });
    }
    let widest = max_states(cm, observed);
    if beam_width >= widest {
        return beam_pass(cm, lm, observed, usize::MAX);
    }
    let mut best = beam_pass(cm, lm, observed, 1)?;
    for k in 2..=beam_width {
        let c = beam_pass(cm, lm, observed, k)?;
        if better(c.log_score, &c.tokens, best.log_score, &best.tokens) {
            best = c;
        }
    }
    Ok(best)
}

/// Upper bound on the distinct states that can end at any position.
fn max_states(cm: &ChannelModel, observed: &[Token]) -> usize {
    (0..observed.len())
        .map(|j| {
            let one = cm.candidates_one(&observed[j]).len();
            let two = if j > 0 {
                cm.candidates_two(&observed[j - 1], &observed[j]).len()
            } else {
                0
            };
            one + two
        })
        .max()
        .unwrap_or(0)
        .max(1)
}

fn beam_pass(
    cm: &ChannelModel,
    lm: &BigramLm,
    observed: &[Token],
    beam_width: usize,
) -> Result<Correction, ModelError> {
    let n = observed.len();

    // chart[j]: hypotheses that have consumed j observed tokens, keyed by
    // their last source word.
    let mut chart: Vec<BTreeMap<Token, Hyp>> = vec![BTreeMap::new(); n + 1];
    let mut start = true;
    for j in 0..n {
        let states: Vec<(Option<Token>, Hyp)> = if start {
            start = false;
            vec![(
                None,
                Hyp {
                    score: 0.0,
                    words: Vec::new(),
                },
            )]
        } else {
            prune(std::mem::take(&mut chart[j]), beam_width)
                .into_iter()
                .map(|(k, h)| (Some(k), h))
                .collect()
        };
        if states.is_empty() {
            continue;
        }
        let options = expansions(cm, observed, j);
        for (last, hyp) in &states {
            let history = last.as_ref().map_or(BOS, |t| t.as_str());
            for (s, width, chan) in &options {
                let score = hyp.score + chan + lm.log_prob(history, s.as_str());
                let mut words = hyp.words.clone();
                words.push(s.clone());
                let slot = &mut chart[j + width];
                let keep = slot
                    .get(s)
                    .is_none_or(|old| better(score, &words, old.score, &old.words));
                if keep {
                    slot.insert(s.clone(), Hyp { score, words });
                }
            }
        }
    }

    let mut best: Option<Hyp> = None;
    for (last, hyp) in prune(std::mem::take(&mut chart[n]), beam_width) {
        let score = hyp.score + lm.log_prob(last.as_str(), EOS);
        let wins = match &best {
            None => true,
            Some(b) => better(score, &hyp.words, b.score, &b.words),
        };
        if wins {
            best = Some(Hyp {
                score,
                words: hyp.words,
            });
        }
    }
    let best = best.ok_or_else(|| {
        ModelError::InvalidParameter("channel model admits no source for this input".into())
    })?;
    Ok(Correction {
        tokens: best.words,
        log_score: best.score,
    })
}

fn prune(states: BTreeMap<Token, Hyp>, beam_width: usize) -> Vec<(Token, Hyp)> {
    let mut v: Vec<(Token, Hyp)> = states.into_iter().collect();
    if v.len() > beam_width {
        v.sort_by(|a, b| {
            if better(a.1.score, &a.1.words, b.1.score, &b.1.words) {
                Ordering::Less
            } else if better(b.1.score, &b.1.words, a.1.score, &a.1.words) {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        });
        v.truncate(beam_width);
    }
    v
}

/// Exact argmax by enumerating every source sequence over the channel's
/// source words and the observed words, under every 1- or 2-token
/// segmentation of the input.
pub fn exhaustive_correct(
    cm: &ChannelModel,
    lm: &BigramLm,
    observed: &[Token],
) -> Result<Correction, ModelError> {
    let vocab: BTreeSet<Token> = cm
        .sources()
        .cloned()
        .chain(observed.iter().cloned())
        .collect();
    if vocab.len() > EXHAUSTIVE_MAX_VOCAB {
        return Err(ModelError::Refused(format!(
            "{} candidate words (limit {EXHAUSTIVE_MAX_VOCAB})",
            vocab.len()
        )));
    }
    if observed.len() > EXHAUSTIVE_MAX_LEN {
        return Err(ModelError::Refused(format!(
            "{} observed tokens (limit {EXHAUSTIVE_MAX_LEN})",
            observed.len()
        )));
    }
    if observed.is_empty() {
        return Ok(Correction {
            tokens: Vec::new(),
            log_score: 0.0,
        });
    }
    let vocab: Vec<Token> = vocab.into_iter().collect();
    let mut best: Option<(f64, Vec<Token>)> = None;
    let mut words = Vec::new();
    enumerate(cm, lm, observed, &vocab, 0, 0.0, &mut words, &mut best);
    let (log_score, tokens) = best.ok_or_else(|| {
        ModelError::InvalidParameter("channel model admits no source for this input".into())
    })?;
    Ok(Correction { tokens, log_score })
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    cm: &ChannelModel,
    lm: &BigramLm,
    observed: &[Token],
    vocab: &[Token],
    pos: usize,
    score: f64,
    words: &mut Vec<Token>,
    best: &mut Option<(f64, Vec<Token>)>,
) {
    let history = words.last().map_or(BOS, |t| t.as_str()).to_string();
    if pos == observed.len() {
        let total = score + lm.log_prob(&history, EOS);
        let wins = match best {
            None => true,
            Some((s, w)) => better(total, words, *s, w),
        };
        if wins {
            *best = Some((total, words.clone()));
        }
        return;
    }
    for s in vocab {
        if let Some(chan) = cm.log_prob_one(s, &observed[pos]) {
            words.push(s.clone());
            let next = score + chan + lm.log_prob(&history, s.as_str());
            enumerate(cm, lm, observed, vocab, pos + 1, next, words, best);
            words.pop();
        }
        if pos + 1 < observed.len() {
            if let Some(chan) = cm.log_prob_two(s, &observed[pos], &observed[pos + 1]) {
                words.push(s.clone());
                let next = score + chan + lm.log_prob(&history, s.as_str());
                enumerate(cm, lm, observed, vocab, pos + 2, next, words, best);
                words.pop();
            }
        }
    }
}

/// A trained language model and channel model ready to correct input.
#[derive(Debug, Clone)]
pub struct PostCorrector {
    pub lm: BigramLm,
    pub channel: ChannelModel,
    pub beam_width: usize,
}

impl PostCorrector {
    pub fn correct(&self, observed: &[Token]) -> Result<Correction, ModelError> {
        correct(&self.channel, &self.lm, observed, self.beam_width)
    }
}
