use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::treebank::TaggedSentence;
use super::PosTag;

const N_TAGS: usize = PosTag::ALL.len();
const MAGIC: &[u8; 4] = b"CGPT";
const VERSION: u16 = 1;
const START: &str = "-START-";
const START2: &str = "-START2-";

type Weights = [f64; N_TAGS];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainingMeta {
    pub epochs: u32,
    pub seed: u64,
}

/// Greedy averaged-perceptron tagger.
///
/// The stored weights are the Collins-averaged weights; prediction never
/// sees the raw final weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronModel {
    weights: HashMap<String, Weights>,
    meta: TrainingMeta,
}

/// Both weight vectors from one training run.
#[derive(Debug, Clone)]
pub struct TrainedPair {
    pub averaged: PerceptronModel,
    pub final_weights: PerceptronModel,
}

fn features(words: &[String], i: usize, prev: &str, prev2: &str) -> Vec<String> {
    let raw = &words[i];
    let word = raw.to_lowercase();
    let chars: Vec<char> = word.chars().collect();
    let mut f = Vec::with_capacity(20);
    f.push("bias".to_string());
    f.push(format!("w={word}"));
    for n in 1..=3.min(chars.len()) {
        f.push(format!("p{n}={}", chars[..n].iter().collect::<String>()));
        f.push(format!("s{n}={}", chars[chars.len() - n..].iter().collect::<String>()));
    }
    f.push(format!("t-1={prev}"));
    f.push(format!("t-2={prev2} {prev}"));
    let before = if i > 0 { words[i - 1].to_lowercase() } else { START.to_string() };
    let after = words.get(i + 1).map_or_else(|| "-END-".to_string(), |w| w.to_lowercase());
    f.push(format!("w-1={before}"));
    f.push(format!("w+1={after}"));
    if raw.chars().any(|c| c.is_ascii_digit()) {
        f.push("shape:digit".to_string());
    }
    if raw.contains('-') {
        f.push("shape:hyphen".to_string());
    }
    if raw.chars().next().is_some_and(char::is_uppercase) {
        f.push("shape:cap".to_string());
    }
    f
}

fn argmax(scores: &Weights) -> PosTag {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    PosTag::ALL[best]
}

fn score(weights: &HashMap<String, Weights>, feats: &[String]) -> Weights {
    let mut scores = [0.0; N_TAGS];
    for f in feats {
        if let Some(w) = weights.get(f) {
            for (s, w) in scores.iter_mut().zip(w) {
                *s += w;
            }
        }
    }
    scores
}

fn decode(weights: &HashMap<String, Weights>, tokens: &[String]) -> Vec<PosTag> {
    let mut prev = START.to_string();
    let mut prev2 = START2.to_string();
    let mut out = Vec::with_capacity(tokens.len());
    for i in 0..tokens.len() {
        let feats = features(tokens, i, &prev, &prev2);
        let tag = argmax(&score(weights, &feats));
        prev2 = std::mem::replace(&mut prev, tag.as_str().to_string());
        out.push(tag);
    }
    out
}

struct Trainer {
    weights: HashMap<String, Weights>,
    totals: HashMap<String, Weights>,
    stamps: HashMap<String, [u64; N_TAGS]>,
    instances: u64,
}

impl Trainer {
    fn new() -> Self {
        Trainer {
            weights: HashMap::new(),
            totals: HashMap::new(),
            stamps: HashMap::new(),
            instances: 0,
        }
    }

    fn bump(&mut self, feat: &str, tag: usize, delta: f64) {
        let w = self.weights.entry(feat.to_string()).or_insert([0.0; N_TAGS]);
        let total = self.totals.entry(feat.to_string()).or_insert([0.0; N_TAGS]);
        let stamp = self.stamps.entry(feat.to_string()).or_insert([0; N_TAGS]);
        total[tag] += (self.instances - stamp[tag]) as f64 * w[tag];
        stamp[tag] = self.instances;
        w[tag] += delta;
    }

    /// The running average covers the weights as they stand after each
    /// instance, so `instances` advances after the update.
    fn update(&mut self, truth: PosTag, guess: PosTag, feats: &[String]) {
        if truth != guess {
            for f in feats {
                self.bump(f, truth.index(), 1.0);
                self.bump(f, guess.index(), -1.0);
            }
        }
        self.instances += 1;
    }

    fn averaged(&self) -> HashMap<String, Weights> {
        let n = self.instances.max(1) as f64;
        let mut out = HashMap::with_capacity(self.weights.len());
        for (feat, w) in &self.weights {
            let total = &self.totals[feat];
            let stamp = &self.stamps[feat];
            let mut avg = [0.0; N_TAGS];
            for t in 0..N_TAGS {
                let sum = total[t] + (self.instances - stamp[t]) as f64 * w[t];
                avg[t] = sum / n;
            }
            if avg.iter().any(|&v| v != 0.0) {
                out.insert(feat.clone(), avg);
            }
        }
        out
    }
}

/// Trains a tagger and returns both the averaged and the final weights.
///
/// Sentence order is reshuffled every epoch with a ChaCha generator seeded
/// from `seed`, so the result depends only on `(corpus, epochs, seed)`.
pub fn train_pair(corpus: &[TaggedSentence], epochs: u32, seed: u64) -> Result<TrainedPair> {
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("tagged corpus is empty".into()));
    }
    for (i, s) in corpus.iter().enumerate() {
        if s.tokens.len() != s.tags.len() {
            return Err(Error::InvalidArgument(format!("sentence {i}: token and tag counts differ")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut trainer = Trainer::new();
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let sentence = &corpus[idx];
            let mut prev = START.to_string();
            let mut prev2 = START2.to_string();
            for (i, &truth) in sentence.tags.iter().enumerate() {
                let feats = features(&sentence.tokens, i, &prev, &prev2);
                let guess = argmax(&score(&trainer.weights, &feats));
                trainer.update(truth, guess, &feats);
                prev2 = std::mem::replace(&mut prev, guess.as_str().to_string());
            }
        }
    }
    let meta = TrainingMeta { epochs, seed };
    let mut final_weights = trainer.weights.clone();
    final_weights.retain(|_, w| w.iter().any(|&v| v != 0.0));
    Ok(TrainedPair {
        averaged: PerceptronModel {
            weights: trainer.averaged(),
            meta,
        },
        final_weights: PerceptronModel {
            weights: final_weights,
            meta,
        },
    })
}

/// Trains a tagger; see [`train_pair`].
pub fn train(corpus: &[TaggedSentence], epochs: u32, seed: u64) -> Result<PerceptronModel> {
    train_pair(corpus, epochs, seed).map(|pair| pair.averaged)
}

impl PerceptronModel {
    pub fn meta(&self) -> TrainingMeta {
        self.meta
    }

    pub fn feature_count(&self) -> usize {
        self.weights.len()
    }

    /// Greedy left-to-right tagging. Output length always equals input length.
    pub fn tag<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<PosTag> {
        let tokens: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
        decode(&self.weights, &tokens)
    }

    /// Token accuracy against gold tags.
    pub fn accuracy(&self, sentences: &[TaggedSentence]) -> f64 {
        let mut correct = 0usize;
        let mut total = 0usize;
        for s in sentences {
            let predicted = decode(&self.weights, &s.tokens);
            correct += predicted.iter().zip(&s.tags).filter(|(p, g)| p == g).count();
            total += s.tags.len();
        }
        if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        }
    }

    /// Binary model file: `CGPT`, version, training metadata, then the
    /// feature table sorted by feature string. All integers little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut feats: Vec<(&String, &Weights)> = self.weights.iter().collect();
        feats.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.meta.epochs.to_le_bytes());
        out.extend_from_slice(&self.meta.seed.to_le_bytes());
        out.extend_from_slice(&(N_TAGS as u16).to_le_bytes());
        out.extend_from_slice(&(feats.len() as u64).to_le_bytes());
        for (name, weights) in feats {
            out.extend_from_slice(&(name.len() as u32).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            for w in weights {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::ModelFormat("bad magic".into()));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::ModelFormat(format!("unsupported version {version}")));
        }
        let epochs = r.u32()?;
        let seed = r.u64()?;
        let n_tags = r.u16()? as usize;
        if n_tags != N_TAGS {
            return Err(Error::ModelFormat(format!("expected {N_TAGS} tags, found {n_tags}")));
        }
        let n = r.u64()? as usize;
        let mut weights = HashMap::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let len = r.u32()? as usize;
            let name = std::str::from_utf8(r.take(len)?)
                .map_err(|_| Error::ModelFormat("feature name is not UTF-8".into()))?
                .to_string();
            let mut w = [0.0; N_TAGS];
            for slot in &mut w {
                *slot = f64::from_le_bytes(r.take(8)?.try_into().unwrap());
            }
            weights.insert(name, w);
        }
        if r.pos != bytes.len() {
            return Err(Error::ModelFormat("trailing bytes".into()));
        }
        Ok(PerceptronModel {
            weights,
            meta: TrainingMeta { epochs, seed },
        })
    }
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::ModelFormat("truncated".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagger::bundled_treebank;
    use proptest::prelude::*;

    fn sentence(pairs: &[(&str, PosTag)]) -> TaggedSentence {
        TaggedSentence {
            tokens: pairs.iter().map(|(t, _)| t.to_string()).collect(),
            tags: pairs.iter().map(|(_, g)| *g).collect(),
        }
    }

    #[test]
    fn memorizes_single_sentence() {
        use PosTag::*;
        let s = sentence(&[("the", Det), ("big", Adj), ("dog", Noun), ("runs", Verb), ("home", Adv), (".", Punct)]);
        let model = train(std::slice::from_ref(&s), 1, 0).unwrap();
        assert_eq!(model.tag(&s.tokens), s.tags);
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert!(train(&[], 5, 13).is_err());
    }

    #[test]
    fn empty_input_tags_to_empty() {
        let model = train(&bundled_treebank().train[..20], 1, 1).unwrap();
        assert!(model.tag::<&str>(&[]).is_empty());
    }

    #[test]
    fn serialization_round_trip_and_determinism() {
        let tb = bundled_treebank();
        let a = train(&tb.train[..100], 2, 7).unwrap();
        let b = train(&tb.train[..100], 2, 7).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
        let back = PerceptronModel::from_bytes(&a.to_bytes()).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.meta(), TrainingMeta { epochs: 2, seed: 7 });
    }

    #[test]
    fn corrupt_model_files_are_rejected() {
        let model = train(&bundled_treebank().train[..10], 1, 1).unwrap();
        let bytes = model.to_bytes();
        assert!(PerceptronModel::from_bytes(&bytes[..bytes.len() - 3]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(PerceptronModel::from_bytes(&bad).is_err());
    }

    #[test]
    fn ties_break_by_enumeration_order() {
        let empty = PerceptronModel {
            weights: HashMap::new(),
            meta: TrainingMeta { epochs: 0, seed: 0 },
        };
        assert_eq!(empty.tag(&["zzz", "qqq"]), [PosTag::Noun, PosTag::Noun]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn output_length_matches_input(tokens in proptest::collection::vec("[a-zA-Z0-9'-]{1,10}", 0..20)) {
            static MODEL: std::sync::OnceLock<PerceptronModel> = std::sync::OnceLock::new();
            let model = MODEL.get_or_init(|| train(&bundled_treebank().train, 2, 13).unwrap());
            prop_assert_eq!(model.tag(&tokens).len(), tokens.len());
        }
    }
}
