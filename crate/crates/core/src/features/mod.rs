//! Feature extraction from a timeline observed up to some elapsed time.

mod extract;
mod matrix;
mod social;
mod vector;
mod window;

pub use extract::{
    extract_features, multiw2v_features, social_feature_vector, w2v_features, FeatureModels, TimelineFeaturizer,
};
pub use matrix::{read_feature_matrix, write_feature_matrix, FeatureRow};
pub use social::{follow_ratio, social_features, SOCIAL_DIM, SOCIAL_FEATURE_NAMES};
pub use vector::{concat_features, Block, FeatureSet, FeatureVector, Schema};
pub use window::{cutoff, window, window_start, WindowSpec};
