//! Stage runner with on-disk artifacts.
//!
//! Each stage reads the artifacts of earlier stages, writes its own through
//! temporary files renamed into place, and records a manifest with the
//! seed, the configuration hash and SHA-256 hashes of its inputs and
//! outputs. A stage whose inputs are missing fails with an error naming
//! the stage that produces them.

mod artifact;
mod config;
mod stages;

pub use artifact::{hash_path, write_atomic, write_bytes_atomic, Manifest};
pub use config::{apply_override, AnnotateConfig, Paths, PipelineConfig, ReportsConfig};
pub use stages::{
    cell_name, class_model_file, evaluate_store, labeled_instances, load_models, read_labels, write_results, Pipeline,
    Stage, RESULTS_TEXT, RESULTS_TSV, SINGLE_MODEL_FILE,
};
