//! Early detection of death hoaxes in social-media streams.
//!
//! The crate covers the whole toolchain: tweet ingestion and keyword
//! filtering ([`corpus`]), linking to knowledge-base people ([`kb`]),
//! building and labelling report instances ([`reports`], [`annotation`]),
//! per-class word embeddings ([`embeddings`]), feature extraction with time
//! cutoffs and sliding windows ([`features`]), a softmax classifier
//! ([`classifier`]) and the evaluation protocol ([`eval`]). [`pipeline`]
//! wires the stages together with on-disk artifacts.

pub mod annotation;
pub mod classifier;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod features;
pub mod kb;
mod label;
pub mod pipeline;
pub mod reports;

pub use error::{Error, Result};
pub use label::Label;
