use crate::corpus::{Timeline, Tweet};
use crate::error::{Error, Result};
use crate::Label;

use super::model::{CorpusProvenance, EmbeddingModel};
use super::sgns::{SgnsParams, SgnsTrainer};
use super::tokenize::tokenize;

/// One embedding model per label, all of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassModels {
    models: [EmbeddingModel; Label::COUNT],
}

impl ClassModels {
    /// Models in label order (real, commemoration, fake).
    pub fn new(models: [EmbeddingModel; Label::COUNT]) -> Result<ClassModels> {
        let d = models[0].dim();
        if models.iter().any(|m| m.dim() != d) {
            return Err(Error::Config(format!(
                "class models disagree on dimension: {:?}",
                models.iter().map(EmbeddingModel::dim).collect::<Vec<_>>()
            )));
        }
        Ok(ClassModels { models })
    }

    pub fn dim(&self) -> usize {
        self.models[0].dim()
    }

    pub fn get(&self, label: Label) -> &EmbeddingModel {
        &self.models[label.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, &EmbeddingModel)> {
        Label::ALL.into_iter().zip(self.models.iter())
    }
}

/// Tokenized training text: every tweet of the given timelines, ordered by
/// (timestamp, id) so the result does not depend on timeline order.
pub fn training_corpus<'a>(timelines: impl IntoIterator<Item = &'a Timeline>) -> (Vec<Vec<String>>, CorpusProvenance) {
    let mut tweets: Vec<&Tweet> = timelines.into_iter().flat_map(|t| t.tweets()).collect();
    tweets.sort_by_key(|t| t.order_key());
    tweets.dedup_by_key(|t| t.id);
    let corpus: Vec<Vec<String>> = tweets.iter().map(|t| tokenize(&t.text)).collect();
    let tokens = corpus.iter().map(|s| s.len() as u64).sum();
    let provenance = CorpusProvenance::from_tweets(tweets.iter().copied(), tokens);
    (corpus, provenance)
}

/// Train one model on all given timelines.
pub fn train_single_model<'a>(
    timelines: impl IntoIterator<Item = &'a Timeline>,
    params: SgnsParams,
) -> Result<EmbeddingModel> {
    let (corpus, provenance) = training_corpus(timelines);
    let mut trainer = SgnsTrainer::new(&corpus, params)?.with_provenance(provenance);
    trainer.train();
    Ok(trainer.into_model())
}

/// Train a separate model on the tweets of each class.
pub fn train_class_models<'a>(
    labeled: impl IntoIterator<Item = (&'a Timeline, Label)>,
    params: SgnsParams,
) -> Result<ClassModels> {
    let mut per_class: [Vec<&Timeline>; Label::COUNT] = Default::default();
    for (timeline, label) in labeled {
        per_class[label.index()].push(timeline);
    }
    let mut models = Vec::with_capacity(Label::COUNT);
    for label in Label::ALL {
        let timelines = &per_class[label.index()];
        if timelines.is_empty() {
            return Err(Error::Config(format!("no training timelines for class {label}")));
        }
        let model = train_single_model(timelines.iter().copied(), params)
            .map_err(|e| Error::Config(format!("class {label}: {e}")))?;
        models.push(model);
    }
    let models: [EmbeddingModel; Label::COUNT] = models.try_into().expect("three models");
    ClassModels::new(models)
}
