//! Word embeddings: tokenization, skip-gram training with negative
//! sampling, per-class models and averaged tweet/timeline embeddings.

mod class_models;
mod model;
mod sgns;
mod tokenize;
mod vocab;

pub use class_models::{train_class_models, train_single_model, training_corpus, ClassModels};
pub use model::{CorpusProvenance, EmbeddingModel};
pub use sgns::{train_sgns, SgnsParams, SgnsTrainer, NEGATIVE_POWER};
pub use tokenize::{tokenize, NUM_TOKEN, URL_TOKEN, USER_TOKEN};
pub use vocab::Vocabulary;
