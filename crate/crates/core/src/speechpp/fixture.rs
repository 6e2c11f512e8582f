//! The bundled training corpus for the post-corrector: synthetic in-domain
//! utterances passed through a recognizer-like noise profile seeded with the
//! sample-dialogue confusions, followed by the sample-dialogue pairs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::channel::fertility_links;
use super::{BigramLm, ChannelConfig, ChannelModel, Emission, ModelError, PostCorrector};
use crate::corpus::{
    align, sample_corrected, sample_pairs, corrupt_corpus, recognizer_profile, synth,
    AlignedPair, Channel, EditOp, Token, Utterance,
};

pub const FIXTURE_SEED: u64 = 1995;
pub const FIXTURE_UTTERANCES: usize = 2000;
pub const FIXTURE_WER: f64 = 0.30;

/// Word confusions and 1→2 splits found in the sample-dialogue pairs. The
/// reported corrector output also reveals confusions its own training data
/// held (it rewrote AT as VIA, so VIA was heard as AT); those are included.
pub fn sample_confusions() -> (Vec<(Token, Token)>, Vec<(Token, (Token, Token))>) {
    let mut subs = Vec::new();
    let mut splits = Vec::new();
    for (pair, corrected) in sample_pairs().iter().zip(sample_corrected()) {
        for op in align(&corrected, &pair.hypothesis).ops {
            if let EditOp::Sub {
                reference,
                hypothesis,
            } = op
            {
                subs.push((reference, hypothesis));
            }
        }
        for (src, e) in fertility_links(&pair.reference, &pair.hypothesis) {
            match e {
                Emission::One(o) if o != src => subs.push((src, o)),
                Emission::Two(a, b) => splits.push((src, (a, b))),
                _ => {}
            }
        }
        for op in &pair.ops {
            if let EditOp::Sub {
                reference,
                hypothesis,
            } = op
            {
                subs.push((reference.clone(), hypothesis.clone()));
            }
        }
    }
    subs.sort();
    subs.dedup();
    splits.sort();
    splits.dedup();
    (subs, splits)
}

pub fn fixture_corpus() -> Vec<AlignedPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);
    let utterances = synth::domain_utterances(FIXTURE_UTTERANCES, &mut rng);
    let (subs, splits) = sample_confusions();
    let profile = recognizer_profile(
        &synth::domain_vocabulary(),
        &subs,
        &splits,
        FIXTURE_WER,
        FIXTURE_SEED,
    );
    let mut pairs = corrupt_corpus(&utterances, &profile);
    pairs.extend(sample_pairs());
    pairs
}

pub fn train_corrector(
    pairs: &[AlignedPair],
    discount: f64,
    channel: ChannelConfig,
    beam_width: usize,
) -> Result<PostCorrector, ModelError> {
    let refs: Vec<Utterance> = pairs
        .iter()
        .map(|p| Utterance::user(p.reference.clone(), Channel::Speech))
        .collect();
    Ok(PostCorrector {
        lm: BigramLm::train(&refs, discount)?,
        channel: ChannelModel::train(pairs, channel)?,
        beam_width,
    })
}

/// Post-corrector trained on [`fixture_corpus`] with default settings.
pub fn fixture_corrector() -> PostCorrector {
    train_corrector(&fixture_corpus(), 0.5, ChannelConfig::default(), 16)
        .expect("fixture corpus trains")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{tokenize, wer};

    #[test]
    fn fixture_corpus_is_recognizer_grade() {
        let pairs = fixture_corpus();
        assert_eq!(pairs.len(), FIXTURE_UTTERANCES + 13);
        let rate = wer(&pairs).unwrap().rate;
        assert!((0.27..=0.33).contains(&rate), "{rate}");
    }

    #[test]
    fn sample_confusions_include_the_split_and_the_via_errors() {
        let (subs, splits) = sample_confusions();
        let t = |s: &str| Token::new(s).unwrap();
        assert!(subs.contains(&(t("VIA"), t("B_X"))));
        assert!(subs.contains(&(t("VIA"), t("AT"))));
        assert!(subs.contains(&(t("AND"), t("AT"))));
        assert!(splits.contains(&(t("DETROIT"), (t("TO"), t("TRY")))));
    }

    #[test]
    fn fixture_corrector_restores_detroit() {
        let c = fixture_corrector();
        let out = c.correct(&tokenize("LET'S GO P_M TO TRY")).unwrap();
        assert!(out.tokens.contains(&Token::new("DETROIT").unwrap()));
    }
}
