//! Synthetic recognizer noise: a seeded corrupter standing in for a real
//! speech recognizer when building desk-scale corpora.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{align, AlignedPair, CorpusError, Token, Utterance};

const DIST_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile {
    /// Per-word output distribution. Entries may (and usually do) include the
    /// word itself; words absent from the table pass through unchanged.
    #[serde(default)]
    pub substitutions: BTreeMap<Token, BTreeMap<Token, f64>>,
    /// Explicit two-fragment realizations. Words without an entry split into
    /// halves of their spelling.
    #[serde(default)]
    pub splits: BTreeMap<Token, (Token, Token)>,
    #[serde(default)]
    pub split_rate: f64,
    #[serde(default)]
    pub delete_rate: f64,
    #[serde(default)]
    pub insert_rate: f64,
    /// Words the recognizer hallucinates on insertion.
    #[serde(default)]
    pub insertions: Vec<Token>,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseProfile {
    /// A profile that leaves every utterance untouched.
    pub fn clean(seed: u64) -> Self {
        NoiseProfile {
            substitutions: BTreeMap::new(),
            splits: BTreeMap::new(),
            split_rate: 0.0,
            delete_rate: 0.0,
            insert_rate: 0.0,
            insertions: Vec::new(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |msg: String| Err(CorpusError::InvalidProfile(msg));
        for (name, rate) in [
            ("split_rate", self.split_rate),
            ("delete_rate", self.delete_rate),
            ("insert_rate", self.insert_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("{name} = {rate} is outside [0, 1]"));
            }
        }
        if self.split_rate + self.delete_rate > 1.0 {
            return bad("split_rate + delete_rate exceeds 1".into());
        }
        if self.insert_rate > 0.0 && self.insertions.is_empty() {
            return bad("insert_rate > 0 but no insertion words given".into());
        }
        for (word, dist) in &self.substitutions {
            if dist.is_empty() {
                return bad(format!("empty substitution distribution for {word}"));
            }
            if let Some((o, p)) = dist.iter().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
                return bad(format!("P({o}|{word}) = {p} is not a probability"));
            }
            let total: f64 = dist.values().sum();
            if (total - 1.0).abs() > DIST_TOLERANCE {
                return bad(format!("distribution for {word} sums to {total}"));
            }
        }
        Ok(())
    }

    fn fragments(&self, word: &Token) -> Option<(Token, Token)> {
        if let Some(pair) = self.splits.get(word) {
            return Some(pair.clone());
        }
        let chars: Vec<char> = word.as_str().chars().collect();
        if chars.len() < 4 {
            return None;
        }
        let mid = chars.len() / 2;
        let head: String = chars[..mid].iter().collect();
        let tail: String = chars[mid..].iter().collect();
        Some((Token::new(&head)?, Token::new(&tail)?))
    }

    fn corrupt_tokens(&self, tokens: &[Token], rng: &mut ChaCha8Rng) -> Vec<Token> {
        let mut out = Vec::with_capacity(tokens.len() + 2);
        for word in tokens {
            let r: f64 = rng.random();
            let pick: f64 = rng.random();
            let insert: f64 = rng.random();
            let split = if r >= self.delete_rate && r < self.delete_rate + self.split_rate {
                self.fragments(word)
            } else {
                None
            };
            if r < self.delete_rate {
                // dropped
            } else if let Some((a, b)) = split {
                out.push(a);
                out.push(b);
            } else if let Some(dist) = self.substitutions.get(word) {
                out.push(sample(dist, pick).unwrap_or(word).clone());
            } else {
                out.push(word.clone());
            }
            if insert < self.insert_rate {
                let idx = rng.random_range(0..self.insertions.len());
                out.push(self.insertions[idx].clone());
            }
        }
        out
    }
}

fn sample(dist: &BTreeMap<Token, f64>, u: f64) -> Option<&Token> {
    let mut acc = 0.0;
    let mut last = None;
    for (tok, p) in dist {
        acc += p;
        last = Some(tok);
        if u < acc {
            return Some(tok);
        }
    }
    last
}

/// Corrupts one utterance. Deterministic for a fixed utterance and profile.
pub fn corrupt(u: &Utterance, profile: &NoiseProfile) -> Utterance {
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    Utterance {
        tokens: profile.corrupt_tokens(&u.tokens, &mut rng),
        speaker: u.speaker,
        channel: u.channel,
    }
}

/// Corrupts a corpus with one random stream, returning aligned REF/HYP pairs.
pub fn corrupt_corpus(utterances: &[Utterance], profile: &NoiseProfile) -> Vec<AlignedPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    utterances
        .iter()
        .map(|u| {
            let hyp = profile.corrupt_tokens(&u.tokens, &mut rng);
            align(&u.tokens, &hyp)
        })
        .collect()
}

/// Words a recognizer trained on an unrelated domain tends to produce.
pub const RECOGNIZER_WORDS: &[&str] = &[
    "SEE", "CONTAIN", "ADD", "STATE", "JET", "IT", "UP", "ME", "A", "COULD", "CAN", "ANY", "DO",
    "D_S_X", "S_X", "B_X", "P_M", "O_O'S", "I'D", "I_NEED", "AN", "ON", "OF", "FOR", "ARE", "OUR",
    "HAVE", "FARE", "FLY", "FLIGHT", "TICKET", "SEAT", "CLASS", "DAY", "TIME", "NINE", "TEN",
    "EIGHT", "ONE", "BUS", "WHAT", "WANT", "SHOW", "FARES", "PLANE", "DENVER", "DALLAS", "OAKLAND",
    "MEAL", "LATE", "AIR", "NONSTOP", "LIST", "FIRST", "EARLY", "LEAVE", "ARRIVE", "COST", "CHEAP",
    "SEND", "IS", "GREAT", "DEAR", "TOO", "INSTEAD", "HI", "OH",
];

const FILLERS: &[&str] = &["UH", "UM", "A", "THE", "UP", "ME", "AN", "OF", "OH"];

/// Builds a profile whose error character resembles recognizer output on
/// this domain: the given confusions (typically taken from a small hand-
/// aligned corpus) are kept as heavy entries, every vocabulary word gets a
/// couple of random confusions with recognizer vocabulary, and split, delete
/// and insert rates make up the rest of `target_wer`.
pub fn recognizer_profile(
    vocabulary: &[Token],
    seeded_confusions: &[(Token, Token)],
    seeded_splits: &[(Token, (Token, Token))],
    target_wer: f64,
    seed: u64,
) -> NoiseProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_c0ffee);
    let delete_rate = 0.02;
    let insert_rate = 0.02;
    let split_rate = 0.03;
    let garble: Vec<Token> = RECOGNIZER_WORDS
        .iter()
        .filter_map(|w| Token::new(w))
        .collect();

    let mut substitutions = BTreeMap::new();
    for word in vocabulary {
        let mut weights: BTreeMap<Token, f64> = BTreeMap::new();
        for (src, obs) in seeded_confusions {
            if src == word && obs != word {
                *weights.entry(obs.clone()).or_default() += 2.0;
            }
        }
        for _ in 0..2 {
            let g = &garble[rng.random_range(0..garble.len())];
            if g != word {
                *weights.entry(g.clone()).or_default() += rng.random_range(0.5..1.5);
            }
        }
        let total: f64 = weights.values().sum();
        if total <= 0.0 {
            continue;
        }
        // a split costs two errors, but only words with fragments can split
        let splits_here =
            seeded_splits.iter().any(|(w, _)| w == word) || word.as_str().chars().count() >= 4;
        let split_here = if splits_here { split_rate } else { 0.0 };
        let sub_rate = ((target_wer - delete_rate - insert_rate - 2.0 * split_here)
            / (1.0 - delete_rate - split_here))
            .max(0.0);
        let mass = (sub_rate * rng.random_range(0.6..1.4)).min(0.9);
        let mut dist: BTreeMap<Token, f64> = weights
            .into_iter()
            .map(|(o, w)| (o, mass * w / total))
            .collect();
        dist.insert(word.clone(), 1.0 - mass);
        // absorb rounding so the distribution sums to one exactly enough
        let drift = 1.0 - dist.values().sum::<f64>();
        *dist.get_mut(word).unwrap() += drift;
        substitutions.insert(word.clone(), dist);
    }

    NoiseProfile {
        substitutions,
        splits: seeded_splits.iter().cloned().collect(),
        split_rate,
        delete_rate,
        insert_rate,
        insertions: FILLERS.iter().filter_map(|w| Token::new(w)).collect(),
        seed,
    }
}
