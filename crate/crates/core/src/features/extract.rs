use std::ops::Range;

use crate::corpus::{Timeline, Tweet};
use crate::embeddings::{tokenize, ClassModels, EmbeddingModel};
use crate::error::{Error, Result};
use crate::features::social::social_features;
use crate::features::vector::{concat_features, Block, FeatureSet, FeatureVector, Schema};
use crate::features::window::{cutoff, window_start, WindowSpec};
use crate::Label;

/// Embedding models available to the extractor.
#[derive(Debug, Clone, Copy, Default)]
pub struct FeatureModels<'a> {
    pub w2v: Option<&'a EmbeddingModel>,
    pub classes: Option<&'a ClassModels>,
}

impl<'a> FeatureModels<'a> {
    fn w2v(&self) -> Result<&'a EmbeddingModel> {
        self.w2v
            .ok_or_else(|| Error::Config("feature set needs the single word2vec model".into()))
    }

    fn classes(&self) -> Result<&'a ClassModels> {
        self.classes
            .ok_or_else(|| Error::Config("feature set needs the three class models".into()))
    }
}

pub fn social_feature_vector(slice: &[Tweet]) -> Result<FeatureVector> {
    if slice.is_empty() {
        return Err(Error::Precondition("social features need a non-empty slice".into()));
    }
    FeatureVector::new(social_features(slice).to_vec(), Schema::new(vec![Block::Social]))
}

pub fn w2v_features(slice: &[Tweet], model: &EmbeddingModel) -> Result<FeatureVector> {
    let values = model.embed_timeline(slice)?;
    FeatureVector::new(values, Schema::new(vec![Block::W2v { dim: model.dim() }]))
}

/// Concatenation of the timeline embeddings under the real, commemoration
/// and fake models, in that order.
pub fn multiw2v_features(slice: &[Tweet], models: &ClassModels) -> Result<FeatureVector> {
    let mut values = Vec::with_capacity(Label::COUNT * models.dim());
    for label in Label::ALL {
        values.extend(models.get(label).embed_timeline(slice)?);
    }
    FeatureVector::new(values, Schema::new(vec![Block::MultiW2v { dim: models.dim() }]))
}

pub fn extract_features(set: FeatureSet, slice: &[Tweet], models: FeatureModels<'_>) -> Result<FeatureVector> {
    let mut parts = Vec::with_capacity(2);
    if set.uses_social() {
        parts.push(social_feature_vector(slice)?);
    }
    if set.uses_w2v() {
        parts.push(w2v_features(slice, models.w2v()?)?);
    }
    if set.uses_multiw2v() {
        parts.push(multiw2v_features(slice, models.classes()?)?);
    }
    Ok(concat_features(parts))
}

/// Per-tweet embeddings of one timeline under one model.
#[derive(Debug, Clone)]
struct TweetRows {
    dim: usize,
    data: Vec<f64>,
    known: Vec<bool>,
}

impl TweetRows {
    fn compute(model: &EmbeddingModel, tokens: &[Vec<String>]) -> TweetRows {
        let dim = model.dim();
        let mut data = vec![0.0; dim * tokens.len()];
        let known = tokens
            .iter()
            .zip(data.chunks_exact_mut(dim))
            .map(|(toks, row)| model.embed_tokens_into(toks, row))
            .collect();
        TweetRows { dim, data, known }
    }

    /// Same summation order as `EmbeddingModel::embed_timeline`, so results
    /// are bit-identical to the direct computation.
    fn mean_into(&self, range: Range<usize>, out: &mut Vec<f64>) {
        let n = range.len();
        let base = out.len();
        out.resize(base + self.dim, 0.0);
        let acc = &mut out[base..];
        for i in range {
            if self.known[i] {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                acc.iter_mut().zip(row).for_each(|(a, b)| *a += b);
            }
        }
        let inv = 1.0 / n as f64;
        acc.iter_mut().for_each(|v| *v *= inv);
    }
}

/// Extracts features of one timeline at many observation points, embedding
/// each tweet only once.
#[derive(Debug)]
pub struct TimelineFeaturizer<'a> {
    timeline: &'a Timeline,
    horizon: i64,
    w2v: Option<TweetRows>,
    classes: Option<Vec<TweetRows>>,
}

impl<'a> TimelineFeaturizer<'a> {
    pub fn new(timeline: &'a Timeline, models: FeatureModels<'_>) -> TimelineFeaturizer<'a> {
        Self::with_horizon(timeline, models, i64::MAX)
    }

    /// Embed only the tweets visible `horizon` seconds after the first one;
    /// later observation points are rejected.
    pub fn with_horizon(timeline: &'a Timeline, models: FeatureModels<'_>, horizon: i64) -> TimelineFeaturizer<'a> {
        let visible = cutoff(timeline, horizon);
        let tokens: Vec<Vec<String>> = if models.w2v.is_some() || models.classes.is_some() {
            visible.iter().map(|t| tokenize(&t.text)).collect()
        } else {
            Vec::new()
        };
        TimelineFeaturizer {
            timeline,
            horizon,
            w2v: models.w2v.map(|m| TweetRows::compute(m, &tokens)),
            classes: models.classes.map(|c| {
                Label::ALL
                    .iter()
                    .map(|l| TweetRows::compute(c.get(*l), &tokens))
                    .collect()
            }),
        }
    }

    /// Index range of the tweets observed under `spec`.
    pub fn slice_range(&self, spec: WindowSpec) -> Range<usize> {
        let visible = cutoff(self.timeline, spec.elapsed);
        window_start(visible, self.timeline.t0(), spec)..visible.len()
    }

    pub fn features(&self, set: FeatureSet, spec: WindowSpec) -> Result<FeatureVector> {
        if spec.elapsed > self.horizon {
            return Err(Error::Precondition(format!(
                "observation at {} s lies beyond the featurizer horizon of {} s",
                spec.elapsed, self.horizon
            )));
        }
        let range = self.slice_range(spec);
        let slice = &self.timeline.tweets()[range.clone()];
        let mut values = Vec::new();
        let mut blocks = Vec::with_capacity(2);
        if set.uses_social() {
            values.extend(social_features(slice));
            blocks.push(Block::Social);
        }
        if set.uses_w2v() {
            let rows = self
                .w2v
                .as_ref()
                .ok_or_else(|| Error::Config("feature set needs the single word2vec model".into()))?;
            rows.mean_into(range.clone(), &mut values);
            blocks.push(Block::W2v { dim: rows.dim });
        }
        if set.uses_multiw2v() {
            let rows = self
                .classes
                .as_ref()
                .ok_or_else(|| Error::Config("feature set needs the three class models".into()))?;
            for r in rows {
                r.mean_into(range.clone(), &mut values);
            }
            blocks.push(Block::MultiW2v { dim: rows[0].dim });
        }
        FeatureVector::new(values, Schema::new(blocks))
    }
}
