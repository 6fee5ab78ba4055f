use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use hashbrown::HashMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::SequenceContext;
use crate::label::LabelTag;
use crate::pair::TaggedPair;
use crate::validate::validate;

pub type LabelWeights = [f64; 6];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct TrainingMeta {
    pub epochs: u32,
    pub seed: u64,
    pub record_count: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: u32,
    pub seed: u64,
    pub shuffle: bool,
    /// Probability that an entity word type of a training record is replaced
    /// by a placeholder, so the model also learns to tag words it has never
    /// seen from context alone.
    pub entity_dropout: f64,
    /// The same for all other word types.
    pub word_dropout: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 5,
            seed: 0,
            shuffle: true,
            entity_dropout: 0.25,
            word_dropout: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TrainError {
    #[error("no training records")]
    EmptyTrainingSet,
    #[error("epochs must be at least 1")]
    ZeroEpochs,
    #[error("training record {0} has an invalid label sequence")]
    InvalidRecord(usize),
}

/// Sparse linear model over feature keys, one weight per label.
///
/// Prediction reads only the averaged weights; the raw weights are kept so a
/// saved model carries the full training state.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TaggerModel {
    weights: HashMap<String, LabelWeights>,
    averaged: HashMap<String, LabelWeights>,
    meta: TrainingMeta,
}

impl TaggerModel {
    /// A model with no weights; it labels everything `C`.
    pub fn untrained() -> Self {
        TaggerModel::default()
    }

    pub fn from_parts<I>(entries: I, meta: TrainingMeta) -> Self
    where
        I: IntoIterator<Item = (String, LabelWeights, LabelWeights)>,
    {
        let mut weights = HashMap::new();
        let mut averaged = HashMap::new();
        for (key, raw, avg) in entries {
            weights.insert(key.clone(), raw);
            averaged.insert(key, avg);
        }
        TaggerModel {
            weights,
            averaged,
            meta,
        }
    }

    pub fn labels(&self) -> [LabelTag; 6] {
        LabelTag::ALL
    }

    pub fn meta(&self) -> TrainingMeta {
        self.meta
    }

    pub fn feature_count(&self) -> usize {
        self.averaged.len()
    }

    /// `(key, raw, averaged)` sorted by key.
    pub fn entries(&self) -> Vec<(&str, LabelWeights, LabelWeights)> {
        let mut out: Vec<_> = self
            .averaged
            .iter()
            .map(|(k, avg)| {
                let raw = self.weights.get(k).copied().unwrap_or_default();
                (k.as_str(), raw, *avg)
            })
            .collect();
        out.sort_unstable_by(|a, b| a.0.cmp(b.0));
        out
    }

    fn score(&self, features: &[String]) -> LabelWeights {
        let mut scores = [0.0; 6];
        for f in features {
            if let Some(w) = self.averaged.get(f) {
                for (s, x) in scores.iter_mut().zip(w) {
                    *s += x;
                }
            }
        }
        scores
    }

    /// Greedy left-to-right labeling with the model's own earlier predictions
    /// as history. The result may violate the validator.
    pub fn predict<T: AsRef<str>>(&self, tokens: &[T], boundary: usize) -> Vec<LabelTag> {
        let ctx = SequenceContext::new(tokens, boundary);
        let mut history = Vec::with_capacity(tokens.len());
        for position in 0..tokens.len() {
            let feats = ctx.features(position, &history);
            history.push(argmax(&self.score(&feats)));
        }
        history
    }
}

/// First maximum wins, so ties resolve in `C, D, R1, R2, S1, S2` order.
fn argmax(scores: &LabelWeights) -> LabelTag {
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    LabelTag::ALL[best]
}

#[derive(Default)]
struct Accumulator {
    raw: LabelWeights,
    total: LabelWeights,
    stamp: [u64; 6],
}

impl Accumulator {
    fn bump(&mut self, label: usize, delta: f64, now: u64) {
        self.total[label] += (now - self.stamp[label]) as f64 * self.raw[label];
        self.stamp[label] = now;
        self.raw[label] += delta;
    }

    fn averaged(&self, now: u64) -> LabelWeights {
        core::array::from_fn(|l| {
            let total = self.total[l] + (now - self.stamp[l]) as f64 * self.raw[l];
            if now == 0 {
                0.0
            } else {
                total / now as f64
            }
        })
    }
}

/// Averaged perceptron training with gold label history (teacher forcing).
///
/// Because the history is gold, every position's features are fixed for the
/// whole run; they are extracted once and interned.
/// Replace some word types with `<unk{n}>`: entity words at `entity_rate`,
/// all others at `other_rate`. All occurrences of a type share one
/// placeholder so request/correction overlap is preserved.
fn mask_words(
    words: &[&str],
    labels: &[LabelTag],
    entity_rate: f64,
    other_rate: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<String> {
    let mut out: Vec<String> = words.iter().map(|w| String::from(*w)).collect();
    if entity_rate <= 0.0 && other_rate <= 0.0 {
        return out;
    }
    let mut decided: Vec<(&str, Option<String>)> = Vec::new();
    let mut masked = 0;
    for w in words {
        if decided.iter().any(|(d, _)| d == w) {
            continue;
        }
        // a type counts as entity only if it never occurs as C or D, so
        // function words inside entities ("shelf above the sink") are not
        let entity = words
            .iter()
            .zip(labels)
            .filter(|(v, _)| *v == w)
            .all(|(_, l)| *l != LabelTag::C && *l != LabelTag::D);
        let rate = if entity { entity_rate } else { other_rate };
        let mask = (rate > 0.0 && rng.gen_bool(rate.min(1.0))).then(|| {
            masked += 1;
            format!("<unk{}>", masked - 1)
        });
        decided.push((w, mask));
    }
    for w in out.iter_mut() {
        if let Some((_, Some(m))) = decided.iter().find(|(d, _)| *d == w.as_str()) {
            *w = m.clone();
        }
    }
    out
}

pub fn train<'a, I>(pairs: I, config: &TrainConfig) -> Result<TaggerModel, TrainError>
where
    I: IntoIterator<Item = &'a TaggedPair>,
{
    if config.epochs == 0 {
        return Err(TrainError::ZeroEpochs);
    }
    let mut interner: HashMap<String, u32> = HashMap::new();
    let mut keys: Vec<String> = Vec::new();
    let mut sequences: Vec<Vec<(Vec<u32>, usize)>> = Vec::new();
    let mut mask_rng = ChaCha8Rng::seed_from_u64(config.seed);
    mask_rng.set_stream(1);
    for (i, pair) in pairs.into_iter().enumerate() {
        if !validate(pair).ok() {
            return Err(TrainError::InvalidRecord(i));
        }
        let labels = pair.labels();
        let words = mask_words(
            &pair.words(),
            labels,
            config.entity_dropout,
            config.word_dropout,
            &mut mask_rng,
        );
        let ctx = SequenceContext::new(&words, pair.boundary());
        let mut seq = Vec::with_capacity(labels.len());
        for position in 0..labels.len() {
            let ids = ctx
                .features(position, &labels[..position])
                .into_iter()
                .map(|k| match interner.get(&k) {
                    Some(&id) => id,
                    None => {
                        let id = keys.len() as u32;
                        interner.insert(k.clone(), id);
                        keys.push(k);
                        id
                    }
                })
                .collect();
            seq.push((ids, labels[position].ordinal()));
        }
        sequences.push(seq);
    }
    if sequences.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    drop(interner);

    let mut acc: Vec<Accumulator> = (0..keys.len()).map(|_| Accumulator::default()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..sequences.len()).collect();
    let mut now: u64 = 0;
    for _ in 0..config.epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        for &s in &order {
            for (ids, gold) in &sequences[s] {
                let mut scores = [0.0; 6];
                for &id in ids {
                    for (sc, w) in scores.iter_mut().zip(&acc[id as usize].raw) {
                        *sc += w;
                    }
                }
                // a tie with the gold label counts as a mistake, so a
                // position stops updating only once gold wins outright
                let rival = (0..6)
                    .filter(|l| l != gold)
                    .fold(None, |best: Option<usize>, l| match best {
                        Some(b) if scores[b] >= scores[l] => Some(b),
                        _ => Some(l),
                    })
                    .expect("six labels");
                now += 1;
                if scores[rival] >= scores[*gold] {
                    for &id in ids {
                        let a = &mut acc[id as usize];
                        a.bump(*gold, 1.0, now);
                        a.bump(rival, -1.0, now);
                    }
                }
            }
        }
    }

    let meta = TrainingMeta {
        epochs: config.epochs,
        seed: config.seed,
        record_count: sequences.len() as u64,
    };
    let entries = keys.into_iter().zip(acc).filter_map(|(k, a)| {
        let avg = a.averaged(now);
        let touched = a.raw.iter().chain(&avg).any(|&w| w != 0.0);
        touched.then_some((k, a.raw, avg))
    });
    Ok(TaggerModel::from_parts(entries, meta))
}
