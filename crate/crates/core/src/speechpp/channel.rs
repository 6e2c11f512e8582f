//! Recognizer channel model: P(observed | spoken) per word, with a 1→2
//! fertility extension for words the recognizer breaks into two tokens.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::corpus::{AlignedPair, Token};

/// What a single spoken word turned into.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Emission {
    One(Token),
    Two(Token, Token),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Added to the count of every emission observed for a source word.
    pub smoothing: f64,
    /// Probability mass always reserved for a word surviving unchanged.
    pub self_floor: f64,
    /// Log-probability charged when an untrained word passes through.
    pub unk_penalty: f64,
    /// Run the secondary realignment that recognizes 1→2 emissions.
    pub fertility: bool,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            smoothing: 0.1,
            self_floor: 0.01,
            unk_penalty: (1e-4f64).ln(),
            fertility: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub(crate) config: ChannelConfig,
    pub(crate) table: BTreeMap<Token, BTreeMap<Emission, f64>>,
    reverse_one: HashMap<Token, Vec<Token>>,
    reverse_two: HashMap<(Token, Token), Vec<Token>>,
}

impl ChannelModel {
    /// A model that has seen nothing: every word passes through at the
    /// unknown-word penalty.
    pub fn empty(config: ChannelConfig) -> Self {
        Self::from_table(config, BTreeMap::new())
    }

    pub(crate) fn from_table(
        config: ChannelConfig,
        table: BTreeMap<Token, BTreeMap<Emission, f64>>,
    ) -> Self {
        let mut reverse_one: HashMap<Token, Vec<Token>> = HashMap::new();
        let mut reverse_two: HashMap<(Token, Token), Vec<Token>> = HashMap::new();
        for (src, emissions) in &table {
            for e in emissions.keys() {
                match e {
                    Emission::One(o) => reverse_one.entry(o.clone()).or_default().push(src.clone()),
                    Emission::Two(a, b) => reverse_two
                        .entry((a.clone(), b.clone()))
                        .or_default()
                        .push(src.clone()),
                }
            }
        }
        ChannelModel {
            config,
            table,
            reverse_one,
            reverse_two,
        }
    }

    /// Tabulates confusions from aligned pairs. With `config.fertility` each
    /// pair is realigned allowing one reference word to cover two adjacent
    /// hypothesis words.
    pub fn train(pairs: &[AlignedPair], config: ChannelConfig) -> Result<Self, ModelError> {
        if config.smoothing < 0.0 || !config.smoothing.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "smoothing {} must be a finite non-negative number",
                config.smoothing
            )));
        }
        if !(0.0..1.0).contains(&config.self_floor) {
            return Err(ModelError::InvalidParameter(format!(
                "self floor {} must lie in [0, 1)",
                config.self_floor
            )));
        }
        if !(config.unk_penalty < 0.0 && config.unk_penalty.is_finite()) {
            return Err(ModelError::InvalidParameter(
                "unknown-word penalty must be a finite negative log-probability".into(),
            ));
        }

        let mut counts: BTreeMap<Token, BTreeMap<Emission, f64>> = BTreeMap::new();
        for pair in pairs {
            let links = if config.fertility {
                fertility_links(&pair.reference, &pair.hypothesis)
            } else {
                plain_links(pair)
            };
            for (src, e) in links {
                *counts.entry(src).or_default().entry(e).or_default() += 1.0;
            }
        }

        let floor = config.self_floor;
        let mut table = BTreeMap::new();
        for (src, emissions) in counts {
            let total: f64 =
                emissions.values().sum::<f64>() + config.smoothing * emissions.len() as f64;
            let mut dist: BTreeMap<Emission, f64> = emissions
                .into_iter()
                .map(|(e, c)| (e, (1.0 - floor) * (c + config.smoothing) / total))
                .collect();
            *dist.entry(Emission::One(src.clone())).or_default() += floor;
            table.insert(src, dist);
        }
        Ok(Self::from_table(config, table))
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    pub fn is_trained(&self, source: &Token) -> bool {
        self.table.contains_key(source)
    }

    pub fn sources(&self) -> impl Iterator<Item = &Token> {
        self.table.keys()
    }

    pub fn emissions(&self, source: &Token) -> Option<&BTreeMap<Emission, f64>> {
        self.table.get(source)
    }

    /// P(emission | source) for a one-token emission, or `None` if the
    /// model rules it out.
    pub fn log_prob_one(&self, source: &Token, observed: &Token) -> Option<f64> {
        match self.table.get(source) {
            Some(dist) => dist.get(&Emission::One(observed.clone())).map(|p| p.ln()),
            None if source == observed => Some(self.config.unk_penalty),
            None => None,
        }
    }

    pub fn log_prob_two(&self, source: &Token, first: &Token, second: &Token) -> Option<f64> {
        self.table
            .get(source)?
            .get(&Emission::Two(first.clone(), second.clone()))
            .map(|p| p.ln())
    }

    /// Source words that could have produced `observed` on its own. An
    /// untrained observed word is always its own candidate.
    pub fn candidates_one(&self, observed: &Token) -> Vec<Token> {
        let mut out = self.reverse_one.get(observed).cloned().unwrap_or_default();
        if !self.table.contains_key(observed) {
            out.push(observed.clone());
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn candidates_two(&self, first: &Token, second: &Token) -> Vec<Token> {
        let mut out = self
            .reverse_two
            .get(&(first.clone(), second.clone()))
            .cloned()
            .unwrap_or_default();
        out.sort();
        out
    }

    /// Total outgoing probability for a trained source word.
    pub fn outgoing_mass(&self, source: &Token) -> Option<f64> {
        self.table.get(source).map(|d| d.values().sum())
    }
}

fn plain_links(pair: &AlignedPair) -> Vec<(Token, Emission)> {
    use crate::corpus::EditOp;
    pair.ops
        .iter()
        .filter_map(|op| match op {
            EditOp::Match { token } => Some((token.clone(), Emission::One(token.clone()))),
            EditOp::Sub {
                reference,
                hypothesis,
            } => Some((reference.clone(), Emission::One(hypothesis.clone()))),
            _ => None,
        })
        .collect()
}

const SPLIT_COST: f64 = 1.5;

/// Realignment with an extra move covering two hypothesis words from one
/// reference word at cost 1.5, cheaper than the SUB+INS it replaces but
/// dearer than MATCH+INS. Backtrace prefers MATCH, SPLIT, SUB, DEL, INS.
pub(crate) fn fertility_links(reference: &[Token], hypothesis: &[Token]) -> Vec<(Token, Emission)> {
    let n = reference.len();
    let m = hypothesis.len();
    let w = m + 1;
    let mut cost = vec![0.0f64; (n + 1) * w];
    for i in 0..=n {
        cost[i * w] = i as f64;
    }
    for j in 0..=m {
        cost[j] = j as f64;
    }
    for i in 1..=n {
        for j in 1..=m {
            let same = reference[i - 1] == hypothesis[j - 1];
            let mut best = cost[(i - 1) * w + j - 1] + if same { 0.0 } else { 1.0 };
            best = best.min(cost[(i - 1) * w + j] + 1.0);
            best = best.min(cost[i * w + j - 1] + 1.0);
            if j >= 2 {
                best = best.min(cost[(i - 1) * w + j - 2] + SPLIT_COST);
            }
            cost[i * w + j] = best;
        }
    }

    let eq = |a: f64, b: f64| (a - b).abs() < 1e-9;
    let mut links = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = cost[i * w + j];
        if i > 0 && j > 0 {
            let diag = cost[(i - 1) * w + j - 1];
            if reference[i - 1] == hypothesis[j - 1] && eq(diag, here) {
                links.push((
                    reference[i - 1].clone(),
                    Emission::One(hypothesis[j - 1].clone()),
                ));
                i -= 1;
                j -= 1;
                continue;
            }
            if j >= 2 && eq(cost[(i - 1) * w + j - 2] + SPLIT_COST, here) {
                links.push((
                    reference[i - 1].clone(),
                    Emission::Two(hypothesis[j - 2].clone(), hypothesis[j - 1].clone()),
                ));
                i -= 1;
                j -= 2;
                continue;
            }
            if reference[i - 1] != hypothesis[j - 1] && eq(diag + 1.0, here) {
                links.push((
                    reference[i - 1].clone(),
                    Emission::One(hypothesis[j - 1].clone()),
                ));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && eq(cost[(i - 1) * w + j] + 1.0, here) {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    links.reverse();
    links
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{align, sample_pairs, tokenize};

    fn tok(s: &str) -> Token {
        Token::new(s).unwrap()
    }

    #[test]
    fn identical_pairs_concentrate_on_the_diagonal() {
        let pairs: Vec<AlignedPair> = ["GO VIA BUFFALO", "GO TO DETROIT"]
            .iter()
            .map(|s| align(&tokenize(s), &tokenize(s)))
            .collect();
        let cm = ChannelModel::train(&pairs, ChannelConfig::default()).unwrap();
        for w in ["GO", "VIA", "BUFFALO", "TO", "DETROIT"] {
            let p = cm.log_prob_one(&tok(w), &tok(w)).unwrap().exp();
            assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_confusions_are_tabulated() {
        let cm = ChannelModel::train(&sample_pairs(), ChannelConfig::default()).unwrap();
        assert!(cm.log_prob_one(&tok("VIA"), &tok("B_X")).is_some());
        assert!(cm.log_prob_one(&tok("AND"), &tok("AT")).is_some());
        assert!(cm
            .log_prob_two(&tok("DETROIT"), &tok("TO"), &tok("TRY"))
            .is_some());
        for src in cm.sources() {
            let mass = cm.outgoing_mass(src).unwrap();
            assert!((mass - 1.0).abs() < 1e-9, "{src}: {mass}");
        }
    }

    #[test]
    fn plain_model_has_no_fertility() {
        let cfg = ChannelConfig {
            fertility: false,
            ..ChannelConfig::default()
        };
        let cm = ChannelModel::train(&sample_pairs(), cfg).unwrap();
        assert!(cm
            .log_prob_two(&tok("DETROIT"), &tok("TO"), &tok("TRY"))
            .is_none());
        let detroit = cm.emissions(&tok("DETROIT")).unwrap();
        assert!(detroit.keys().all(|e| matches!(e, Emission::One(_))));
        assert!(detroit.len() > 1);
    }

    #[test]
    fn fertility_realignment_covers_split_word() {
        let links = fertility_links(
            &tokenize("LET'S GO VIA DETROIT"),
            &tokenize("LET'S GO P_M TO TRY"),
        );
        assert_eq!(links.len(), 4);
        assert_eq!(links[2], (tok("VIA"), Emission::One(tok("P_M"))));
        assert_eq!(
            links[3],
            (tok("DETROIT"), Emission::Two(tok("TO"), tok("TRY")))
        );
    }

    #[test]
    fn untrained_words_pass_through_at_penalty() {
        let cm = ChannelModel::empty(ChannelConfig::default());
        let p = cm.log_prob_one(&tok("P_M"), &tok("P_M")).unwrap();
        assert_eq!(p, ChannelConfig::default().unk_penalty);
        assert!(cm.log_prob_one(&tok("VIA"), &tok("P_M")).is_none());
        assert_eq!(cm.candidates_one(&tok("P_M")), vec![tok("P_M")]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad = ChannelConfig {
            smoothing: -1.0,
            ..ChannelConfig::default()
        };
        assert!(ChannelModel::train(&[], bad).is_err());
        let bad = ChannelConfig {
            self_floor: 1.0,
            ..ChannelConfig::default()
        };
        assert!(ChannelModel::train(&[], bad).is_err());
    }
}
