//! Year-based evaluation over a grid of feature sets, time buckets and
//! window fractions.

mod grid;
mod metrics;
mod report;
mod run;
mod split;

pub use grid::{CellKey, ExperimentGrid, DEFAULT_BUCKETS, DEFAULT_FOLDS, DEFAULT_FRACTIONS};
pub use metrics::{macro_f1, per_class_f1, Confusion, Scores};
pub use report::{emit_report, results_from_tsv, results_to_text, results_to_tsv, Report};
pub use run::{
    check_leakage, featurize_cells, models_for, plan_grid, run_grid, score_cell, CellResult, GridPlan, Instance,
    ResultTable,
};
pub use split::{kfold_split, split_by_year, tenfold_split, training_subset};
