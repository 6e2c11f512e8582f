//! Measures how post-correction changes word error rate as the amount of
//! training data grows.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{correct, BigramLm, ChannelConfig, ChannelModel, ModelError};
use crate::corpus::{align, wer, AlignedPair, Channel, Utterance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    pub discount: f64,
    pub channel: ChannelConfig,
    pub beam_width: usize,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            discount: 0.5,
            channel: ChannelConfig::default(),
            beam_width: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub baseline_wer: f64,
    pub corrected_wer: f64,
}

/// For every fraction `f`, trains on the first `round(f · (|train| + |test|))`
/// training pairs, so `f` is the share of the whole split used for training,
/// and reports raw and corrected WER on the test pairs.
pub fn eval_postcorrection(
    pairs: &[AlignedPair],
    train: &[usize],
    test: &[usize],
    fractions: &[f64],
    settings: &EvalSettings,
) -> Result<Vec<CurvePoint>, ModelError> {
    let train_set: BTreeSet<usize> = train.iter().copied().collect();
    if let Some(&i) = test.iter().find(|i| train_set.contains(i)) {
        return Err(ModelError::Overlap(i));
    }
    if let Some(&i) = train.iter().chain(test).find(|&&i| i >= pairs.len()) {
        return Err(ModelError::InvalidParameter(format!(
            "index {i} outside a corpus of {} pairs",
            pairs.len()
        )));
    }
    if test.is_empty() {
        return Err(ModelError::InvalidParameter("test set is empty".into()));
    }
    let test_pairs: Vec<&AlignedPair> = test.iter().map(|&i| &pairs[i]).collect();
    let baseline = wer(&test_pairs.iter().map(|p| (*p).clone()).collect::<Vec<_>>())
        .map_err(|e| ModelError::InvalidParameter(e.to_string()))?
        .rate;

    let mut out = Vec::with_capacity(fractions.len());
    for &f in fractions {
        if !(0.0..=1.0).contains(&f) {
            return Err(ModelError::InvalidParameter(format!(
                "training fraction {f} outside [0, 1]"
            )));
        }
        let k = (f * (train.len() + test.len()) as f64).round() as usize;
        if k > train.len() {
            return Err(ModelError::InvalidParameter(format!(
                "fraction {f} needs {k} training pairs but only {} are available",
                train.len()
            )));
        }
        let used: Vec<AlignedPair> = train[..k].iter().map(|&i| pairs[i].clone()).collect();
        let corrected = if used.is_empty() {
            baseline
        } else {
            let refs: Vec<Utterance> = used
                .iter()
                .map(|p| Utterance::user(p.reference.clone(), Channel::Speech))
                .collect();
            let lm = BigramLm::train(&refs, settings.discount)?;
            let cm = ChannelModel::train(&used, settings.channel)?;
            let mut fixed = Vec::with_capacity(test_pairs.len());
            for p in &test_pairs {
                let c = correct(&cm, &lm, &p.hypothesis, settings.beam_width)?;
                fixed.push(align(&p.reference, &c.tokens));
            }
            wer(&fixed)
                .map_err(|e| ModelError::InvalidParameter(e.to_string()))?
                .rate
        };
        out.push(CurvePoint {
            fraction: f,
            baseline_wer: baseline,
            corrected_wer: corrected,
        });
    }
    Ok(out)
}

/// Averages [`eval_postcorrection`] over `resamples` random partitions that
/// hold out `holdout` of the corpus for testing. Fractions may not exceed
/// `1 - holdout`.
pub fn eval_curve(
    pairs: &[AlignedPair],
    holdout: f64,
    fractions: &[f64],
    resamples: usize,
    seed: u64,
    settings: &EvalSettings,
) -> Result<Vec<CurvePoint>, ModelError> {
    if resamples == 0 {
        return Err(ModelError::InvalidParameter(
            "need at least one resample".into(),
        ));
    }
    if !(holdout > 0.0 && holdout < 1.0) {
        return Err(ModelError::InvalidParameter(format!(
            "holdout {holdout} must lie in (0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = vec![(0.0, 0.0); fractions.len()];
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    for _ in 0..resamples {
        idx.shuffle(&mut rng);
        let n_test = ((holdout * pairs.len() as f64).round() as usize).max(1);
        let (test, train) = idx.split_at(n_test.min(pairs.len()));
        let points = eval_postcorrection(pairs, train, test, fractions, settings)?;
        for (s, p) in sums.iter_mut().zip(&points) {
            s.0 += p.baseline_wer;
            s.1 += p.corrected_wer;
        }
    }
    let r = resamples as f64;
    Ok(fractions
        .iter()
        .zip(sums)
        .map(|(&fraction, (b, c))| CurvePoint {
            fraction,
            baseline_wer: b / r,
            corrected_wer: c / r,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{sample_pairs, corrupt_corpus, recognizer_profile, synth};

    fn synthetic(n: usize, seed: u64) -> Vec<AlignedPair> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let utts = synth::domain_utterances(n, &mut rng);
        let profile = recognizer_profile(&synth::domain_vocabulary(), &[], &[], 0.3, seed);
        corrupt_corpus(&utts, &profile)
    }

    #[test]
    fn overlapping_splits_are_rejected() {
        let pairs = sample_pairs();
        let err = eval_postcorrection(&pairs, &[0, 1, 2], &[2, 3], &[0.25], &EvalSettings::default());
        assert!(matches!(err, Err(ModelError::Overlap(2))));
    }

    #[test]
    fn zero_training_leaves_wer_unchanged() {
        let pairs = sample_pairs();
        let train: Vec<usize> = (0..9).collect();
        let test: Vec<usize> = (9..13).collect();
        let pts = eval_postcorrection(&pairs, &train, &test, &[0.0], &EvalSettings::default()).unwrap();
        assert_eq!(pts[0].baseline_wer, pts[0].corrected_wer);
    }

    #[test]
    fn fraction_beyond_the_training_share_is_rejected() {
        let pairs = sample_pairs();
        let train: Vec<usize> = (0..9).collect();
        let test: Vec<usize> = (9..13).collect();
        assert!(eval_postcorrection(&pairs, &train, &test, &[0.75], &EvalSettings::default()).is_err());
    }

    #[test]
    fn correction_helps_on_a_small_synthetic_corpus() {
        let pairs = synthetic(300, 3);
        let pts = eval_curve(&pairs, 0.25, &[0.25, 0.75], 2, 9, &EvalSettings::default()).unwrap();
        assert!(pts[1].corrected_wer < pts[1].baseline_wer);
        assert!(pts[1].corrected_wer <= pts[0].corrected_wer);
    }
}
