//! Three-class logistic regression.

mod io;
mod logreg;
mod standardize;

pub use io::{read_model, read_model_text, write_model, write_model_text};
pub use logreg::{
    argmax, gradient, minimize, softmax, train, train_instances, LogRegModel, Objective, Parameters, TrainParams,
    TrainReport,
};
pub use standardize::Standardizer;
