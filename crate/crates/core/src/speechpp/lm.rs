//! Word-bigram language model with absolute discounting and Katz-style
//! back-off to a discounted unigram distribution.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ModelError;
use crate::corpus::Utterance;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

#[derive(Debug, Clone, PartialEq)]
pub struct BigramLm {
    pub(crate) discount: f64,
    /// P(w) for every predicted word (including `</s>`).
    pub(crate) unigram: BTreeMap<String, f64>,
    /// Mass the unigram level reserves for unseen words.
    pub(crate) unk: f64,
    /// Back-off normalizer for every history seen in training.
    pub(crate) backoff: BTreeMap<String, f64>,
    /// Discounted P(w | h) for seen bigrams.
    pub(crate) bigram: HashMap<String, BTreeMap<String, f64>>,
}

impl BigramLm {
    /// Tabulates counts with boundary markers around every utterance.
    pub fn train(corpus: &[Utterance], discount: f64) -> Result<Self, ModelError> {
        if corpus.is_empty() {
            return Err(ModelError::EmptyCorpus);
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(ModelError::InvalidParameter(format!(
                "discount {discount} must lie in (0, 1)"
            )));
        }
        let mut unigram_counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut bigram_counts: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for u in corpus {
            let mut prev = BOS.to_string();
            let words = u
                .tokens
                .iter()
                .map(|t| t.as_str().to_string())
                .chain(std::iter::once(EOS.to_string()));
            for w in words {
                *unigram_counts.entry(w.clone()).or_default() += 1;
                *bigram_counts
                    .entry(prev)
                    .or_default()
                    .entry(w.clone())
                    .or_default() += 1;
                prev = w;
            }
        }

        let total: u64 = unigram_counts.values().sum();
        let n = total as f64;
        let unigram: BTreeMap<String, f64> = unigram_counts
            .iter()
            .map(|(w, &c)| (w.clone(), (c as f64 - discount) / n))
            .collect();
        let unk = discount * unigram_counts.len() as f64 / n;

        let mut backoff = BTreeMap::new();
        let mut bigram = HashMap::new();
        for (h, followers) in &bigram_counts {
            let history_total: u64 = followers.values().sum();
            let ht = history_total as f64;
            let probs: BTreeMap<String, f64> = followers
                .iter()
                .map(|(w, &c)| (w.clone(), (c as f64 - discount) / ht))
                .collect();
            let left_over = discount * followers.len() as f64 / ht;
            let seen_unigram: f64 = followers.keys().map(|w| unigram[w]).sum();
            backoff.insert(h.clone(), left_over / (1.0 - seen_unigram));
            bigram.insert(h.clone(), probs);
        }

        Ok(BigramLm {
            discount,
            unigram,
            unk,
            backoff,
            bigram,
        })
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// True when `w` is a predicted word of the model (not mapped to UNK).
    pub fn knows(&self, w: &str) -> bool {
        self.unigram.contains_key(w)
    }

    fn unigram_prob(&self, w: &str) -> f64 {
        self.unigram.get(w).copied().unwrap_or(self.unk)
    }

    /// P(w | h). Out-of-vocabulary words receive the UNK probability.
    pub fn prob(&self, history: &str, w: &str) -> f64 {
        if let Some(followers) = self.bigram.get(history) {
            if let Some(&p) = followers.get(w) {
                return p;
            }
        }
        let alpha = self.backoff.get(history).copied().unwrap_or(1.0);
        alpha * self.unigram_prob(w)
    }

    pub fn log_prob(&self, history: &str, w: &str) -> f64 {
        self.prob(history, w).ln()
    }

    /// Predicted vocabulary plus the UNK marker; the support of P(· | h).
    pub fn vocabulary(&self) -> Vec<String> {
        let mut v: Vec<String> = self.unigram.keys().cloned().collect();
        v.push(UNK.to_string());
        v
    }

    /// Histories that carry their own back-off weight.
    pub fn histories(&self) -> BTreeSet<String> {
        self.backoff.keys().cloned().collect()
    }

    /// Σ_w P(w | h) over the vocabulary and UNK.
    pub fn total_mass(&self, history: &str) -> f64 {
        let words: f64 = self.unigram.keys().map(|w| self.prob(history, w)).sum();
        let alpha = self.backoff.get(history).copied().unwrap_or(1.0);
        words + alpha * self.unk
    }

    /// Log-probability of a whole sentence including both boundaries.
    pub fn sentence_log_prob(&self, words: &[&str]) -> f64 {
        let mut prev = BOS;
        let mut score = 0.0;
        for w in words {
            score += self.log_prob(prev, w);
            prev = w;
        }
        score + self.log_prob(prev, EOS)
    }
}
