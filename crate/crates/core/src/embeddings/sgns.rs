//! Skip-gram with negative sampling.
//!
//! The reference trainer is single-threaded and fully determined by the
//! corpus order and the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::model::{CorpusProvenance, EmbeddingModel};
use super::vocab::Vocabulary;

/// Exponent applied to unigram counts for the negative-sampling distribution.
pub const NEGATIVE_POWER: f64 = 0.75;
/// Floor of the linearly decayed learning rate, relative to the initial one.
const MIN_LR_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgnsParams {
    pub dim: usize,
    /// Maximum distance between center and context words.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Initial learning rate, decayed linearly to near zero.
    pub learning_rate: f64,
    pub min_count: u64,
    pub seed: u64,
}

impl Default for SgnsParams {
    fn default() -> Self {
        SgnsParams {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 5,
            seed: 1,
        }
    }
}

/// `sigmoid(score)` and `ln sigmoid(±score)`, sharing one exponential.
fn sigmoid_terms(score: f64, positive: bool) -> (f64, f64) {
    let e = (-score.abs()).exp();
    let l = e.ln_1p();
    let sig = if score >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
    let margin = if positive { score } else { -score };
    (sig, if margin >= 0.0 { -l } else { margin - l })
}

/// Dot product with eight independent partial sums so it vectorizes.
fn dot(a: &[f32], b: &[f32]) -> f64 {
    let mut acc = [0f32; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f32 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for i in 0..8 {
            acc[i] += x[i] * y[i];
        }
    }
    (acc.iter().sum::<f32>() + tail) as f64
}

/// Stateful trainer; one call to [`SgnsTrainer::train_epoch`] per pass.
pub struct SgnsTrainer {
    params: SgnsParams,
    vocab: Vocabulary,
    sentences: Vec<Vec<u32>>,
    input: Vec<f32>,
    output: Vec<f32>,
    noise: Option<WeightedAliasIndex<f64>>,
    rng: ChaCha8Rng,
    words_done: u64,
    words_per_epoch: u64,
    epochs_done: usize,
    provenance: CorpusProvenance,
}

impl SgnsTrainer {
    /// Prepare training over `corpus` (one token sequence per tweet).
    pub fn new<S: AsRef<str>>(corpus: &[Vec<S>], params: SgnsParams) -> Result<SgnsTrainer> {
        if params.dim == 0 || params.window == 0 {
            return Err(Error::Config("dim and window must be positive".into()));
        }
        if !(params.learning_rate > 0.0 && params.learning_rate.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        let vocab = Vocabulary::build(corpus.iter().map(Vec::as_slice), params.min_count);
        if vocab.is_empty() {
            return Err(Error::Config(format!(
                "no token occurs at least {} times; vocabulary is empty",
                params.min_count
            )));
        }
        let sentences: Vec<Vec<u32>> = corpus
            .iter()
            .map(|s| s.iter().filter_map(|t| vocab.get(t.as_ref())).collect::<Vec<u32>>())
            .filter(|s| !s.is_empty())
            .collect();
        let words_per_epoch = sentences.iter().map(|s| s.len() as u64).sum();
        let weights: Vec<f64> = vocab.iter().map(|(_, c)| (c as f64).powf(NEGATIVE_POWER)).collect();
        let noise = if params.negatives > 0 {
            Some(WeightedAliasIndex::new(weights).map_err(|e| Error::Config(format!("noise distribution: {e}")))?)
        } else {
            None
        };
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let d = params.dim;
        let scale = 0.5 / d as f32;
        let input = (0..vocab.len() * d)
            .map(|_| (rng.random::<f32>() - 0.5) * 2.0 * scale)
            .collect();
        let output = vec![0.0; vocab.len() * d];
        Ok(SgnsTrainer {
            params,
            vocab,
            sentences,
            input,
            output,
            noise,
            rng,
            words_done: 0,
            words_per_epoch,
            epochs_done: 0,
            provenance: CorpusProvenance {
                tweets: corpus.len() as u64,
                tokens: corpus.iter().map(|s| s.len() as u64).sum(),
                time_range: None,
            },
        })
    }

    pub fn with_provenance(mut self, provenance: CorpusProvenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn epochs_done(&self) -> usize {
        self.epochs_done
    }

    fn learning_rate(&self) -> f64 {
        let total = (self.params.epochs.max(1) as u64 * self.words_per_epoch).max(1) as f64;
        let frac = 1.0 - self.words_done as f64 / total;
        self.params.learning_rate * frac.max(MIN_LR_FRACTION)
    }

    /// One pass over the corpus; returns the mean negative-sampling loss per
    /// (center, context) pair.
    pub fn train_epoch(&mut self) -> f64 {
        let d = self.params.dim;
        let mut grad = vec![0f32; d];
        let mut loss_sum = 0.0;
        let mut pairs = 0u64;
        let sentences = std::mem::take(&mut self.sentences);
        for sentence in &sentences {
            for (pos, &center) in sentence.iter().enumerate() {
                let lr = self.learning_rate();
                let reach = self.rng.random_range(1..=self.params.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(sentence.len() - 1);
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    loss_sum += self.update_pair(center, sentence[ctx_pos], lr, &mut grad);
                    pairs += 1;
                }
                self.words_done += 1;
            }
        }
        self.sentences = sentences;
        self.epochs_done += 1;
        if pairs == 0 {
            0.0
        } else {
            loss_sum / pairs as f64
        }
    }

    fn update_pair(&mut self, center: u32, context: u32, lr: f64, grad: &mut [f32]) -> f64 {
        let d = self.params.dim;
        grad.iter_mut().for_each(|g| *g = 0.0);
        let c = center as usize * d;
        let input = &mut self.input[c..c + d];
        let mut loss = 0.0;
        for k in 0..=self.params.negatives {
            let (target, positive) = if k == 0 {
                (context, true)
            } else {
                let noise = self.noise.as_ref().expect("negatives > 0 implies a noise table");
                let t = noise.sample(&mut self.rng) as u32;
                if t == context {
                    continue;
                }
                (t, false)
            };
            let o = target as usize * d;
            let output = &mut self.output[o..o + d];
            let score = dot(input, output);
            let (sig, log_sig) = sigmoid_terms(score, positive);
            loss -= log_sig;
            let label = if positive { 1.0 } else { 0.0 };
            let g = ((label - sig) * lr) as f32;
            for ((gr, out), inp) in grad.iter_mut().zip(output.iter_mut()).zip(input.iter()) {
                *gr += g * *out;
                *out += g * *inp;
            }
        }
        input.iter_mut().zip(grad.iter()).for_each(|(i, g)| *i += g);
        loss
    }

    /// Run the remaining configured epochs; returns the loss of each.
    pub fn train(&mut self) -> Vec<f64> {
        (self.epochs_done..self.params.epochs)
            .map(|_| self.train_epoch())
            .collect()
    }

    pub fn into_model(self) -> EmbeddingModel {
        EmbeddingModel::new(self.vocab, self.params.dim, self.input, self.params, self.provenance)
            .expect("trainer keeps vectors finite and shaped")
    }

    /// Current input vectors as a model, leaving the trainer usable.
    pub fn snapshot(&self) -> EmbeddingModel {
        EmbeddingModel::new(
            self.vocab.clone(),
            self.params.dim,
            self.input.clone(),
            self.params,
            self.provenance,
        )
        .expect("trainer keeps vectors finite and shaped")
    }
}

/// Train skip-gram embeddings over `corpus` for `params.epochs` passes.
pub fn train_sgns<S: AsRef<str>>(corpus: &[Vec<S>], params: SgnsParams) -> Result<EmbeddingModel> {
    let mut trainer = SgnsTrainer::new(corpus, params)?;
    trainer.train();
    Ok(trainer.into_model())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_terms_are_stable() {
        let naive = |x: f64| 1.0 / (1.0 + (-x).exp());
        assert!((sigmoid_terms(0.0, true).1 - 0.5f64.ln()).abs() < 1e-15);
        assert!(sigmoid_terms(-800.0, true).1.is_finite());
        assert!(sigmoid_terms(800.0, false).1.is_finite());
        for x in [-3.0, -0.5, 0.7, 4.0] {
            let (sig, pos) = sigmoid_terms(x, true);
            assert!((sig - naive(x)).abs() < 1e-15);
            assert!((pos - naive(x).ln()).abs() < 1e-12);
            assert!((sigmoid_terms(x, false).1 - naive(-x).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_vocabulary_is_a_config_error() {
        let corpus = vec![vec!["a", "b"]];
        let p = SgnsParams {
            min_count: 5,
            ..SgnsParams::default()
        };
        assert!(matches!(SgnsTrainer::new(&corpus, p), Err(Error::Config(_))));
    }
}
