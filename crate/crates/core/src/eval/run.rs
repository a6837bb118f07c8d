use chrono::{Datelike, NaiveDate};
use log::info;
use serde::{Deserialize, Serialize};

use crate::classifier::train;
use crate::corpus::Timeline;
use crate::embeddings::CorpusProvenance;
use crate::error::{Error, Result};
use crate::eval::grid::{CellKey, ExperimentGrid};
use crate::eval::metrics::Scores;
use crate::eval::split::{kfold_split, training_subset};
use crate::features::{FeatureModels, FeatureSet, Schema, TimelineFeaturizer, WindowSpec};
use crate::Label;

/// A labelled report ready for featurization.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub report_id: String,
    pub label: Label,
    pub first_day: NaiveDate,
    pub timeline: Timeline,
}

impl Instance {
    pub fn year(&self) -> i32 {
        self.first_day.year()
    }
}

/// Scores of one cell: one entry per test fold and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub key: CellKey,
    pub folds: Vec<Scores>,
    pub mean: Scores,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub cells: Vec<CellResult>,
}

impl ResultTable {
    pub fn get(&self, key: &CellKey) -> Option<&CellResult> {
        self.cells.iter().find(|c| &c.key == key)
    }

    /// Mean macro-F1 of a cell.
    pub fn macro_f1(&self, set: FeatureSet, bucket: u32, fraction: f64) -> Option<f64> {
        self.get(&CellKey {
            feature_set: set,
            bucket_minutes: bucket,
            fraction,
        })
        .map(|c| c.mean.macro_f1)
    }
}

/// A model's training data must end before the test year starts, and every
/// training instance must predate it while test instances fall inside it.
pub fn check_leakage(
    test_year: i32,
    models: &[(&str, &CorpusProvenance)],
    train: &[Instance],
    test: &[Instance],
) -> Result<()> {
    let test_start = NaiveDate::from_ymd_opt(test_year, 1, 1)
        .ok_or_else(|| Error::Config(format!("invalid test year {test_year}")))?
        .and_hms_opt(0, 0, 0)
        .expect("midnight")
        .and_utc()
        .timestamp();
    for (name, prov) in models {
        match prov.time_range {
            Some((_, last)) if last < test_start => {}
            Some((_, last)) => {
                return Err(Error::Leakage(format!(
                    "embedding model {name} saw a tweet at {last}, inside test year {test_year}"
                )))
            }
            None => {
                return Err(Error::Leakage(format!(
                    "embedding model {name} has no corpus time range; cannot rule out test-year tweets"
                )))
            }
        }
    }
    if let Some(bad) = train.iter().find(|i| i.year() >= test_year) {
        return Err(Error::Leakage(format!(
            "training instance {} is dated {}",
            bad.report_id, bad.first_day
        )));
    }
    if let Some(bad) = train.iter().find(|i| i.timeline.last_timestamp() >= test_start) {
        return Err(Error::Leakage(format!(
            "training instance {} has a test-year tweet",
            bad.report_id
        )));
    }
    if let Some(bad) = test.iter().find(|i| i.year() != test_year) {
        return Err(Error::Leakage(format!(
            "test instance {} is dated {}",
            bad.report_id, bad.first_day
        )));
    }
    Ok(())
}

fn embedding_models<'a>(models: &FeatureModels<'a>) -> Vec<(String, &'a CorpusProvenance)> {
    let mut out = Vec::new();
    if let Some(m) = models.w2v {
        out.push(("w2v".to_string(), &m.provenance));
    }
    if let Some(c) = models.classes {
        for (label, m) in c.iter() {
            out.push((format!("multiw2v/{label}"), &m.provenance));
        }
    }
    out
}

/// Feature rows of every instance for each of `cells`, which must share
/// one time bucket no later than `horizon` seconds.
pub fn featurize_cells(
    instances: &[Instance],
    cells: &[CellKey],
    models: FeatureModels<'_>,
    horizon: i64,
) -> Result<Vec<(Schema, Vec<Vec<f64>>)>> {
    let mut out = vec![(Schema::default(), Vec::with_capacity(instances.len())); cells.len()];
    for inst in instances {
        let f = TimelineFeaturizer::with_horizon(&inst.timeline, models, horizon);
        for (cell, (schema, rows)) in cells.iter().zip(out.iter_mut()) {
            let spec = WindowSpec::new(cell.elapsed_seconds(), cell.fraction)?;
            let v = f.features(cell.feature_set, spec)?;
            if rows.is_empty() {
                *schema = v.schema().clone();
            }
            rows.push(v.into_values());
        }
    }
    Ok(out)
}

/// Checked inputs of a grid run.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPlan {
    pub cells: Vec<CellKey>,
    /// Test-set indices of each fold.
    pub folds: Vec<Vec<usize>>,
    pub test_year: i32,
}

impl GridPlan {
    /// Cells of one time bucket, in grid order.
    pub fn bucket_cells(&self, bucket: u32) -> Vec<CellKey> {
        self.cells
            .iter()
            .filter(|c| c.bucket_minutes == bucket)
            .copied()
            .collect()
    }
}

/// Validate the grid, check that the needed models are present, run the
/// leakage guard and draw the test folds.
pub fn plan_grid(
    grid: &ExperimentGrid,
    train_set: &[Instance],
    test_set: &[Instance],
    models: FeatureModels<'_>,
) -> Result<GridPlan> {
    grid.validate()?;
    let cells = grid.cells();
    if cells.iter().any(|c| c.feature_set.uses_w2v()) && models.w2v.is_none() {
        return Err(Error::Config(
            "grid requests w2v features but no single model was given".into(),
        ));
    }
    if cells.iter().any(|c| c.feature_set.uses_multiw2v()) && models.classes.is_none() {
        return Err(Error::Config(
            "grid requests multiw2v features but no class models were given".into(),
        ));
    }
    let test_year = grid
        .test_year
        .or_else(|| test_set.iter().map(Instance::year).max())
        .ok_or_else(|| Error::Config("empty test set".into()))?;
    let named = embedding_models(&models);
    let named: Vec<(&str, &CorpusProvenance)> = named.iter().map(|(n, p)| (n.as_str(), *p)).collect();
    check_leakage(test_year, &named, train_set, test_set)?;
    let folds = kfold_split(test_set.len(), grid.folds, grid.seed)?;
    Ok(GridPlan {
        cells,
        folds,
        test_year,
    })
}

/// Only the models the given cells use.
pub fn models_for<'a>(cells: &[CellKey], models: FeatureModels<'a>) -> FeatureModels<'a> {
    FeatureModels {
        w2v: models.w2v.filter(|_| cells.iter().any(|c| c.feature_set.uses_w2v())),
        classes: models
            .classes
            .filter(|_| cells.iter().any(|c| c.feature_set.uses_multiw2v())),
    }
}

/// Score predictions for the whole test set fold by fold.
pub fn score_cell(key: CellKey, folds: &[Vec<usize>], gold: &[Label], pred: &[Label]) -> Result<CellResult> {
    if gold.len() != pred.len() {
        return Err(Error::Validation(format!(
            "{} gold labels but {} predictions",
            gold.len(),
            pred.len()
        )));
    }
    let fold_scores: Vec<Scores> = folds
        .iter()
        .map(|fold| {
            let g: Vec<Label> = fold.iter().map(|&i| gold[i]).collect();
            let p: Vec<Label> = fold.iter().map(|&i| pred[i]).collect();
            Scores::compute(&g, &p)
        })
        .collect::<Result<_>>()?;
    let mean = Scores::mean(&fold_scores);
    Ok(CellResult {
        key,
        folds: fold_scores,
        mean,
    })
}

/// Evaluate every grid cell: train on the whole training split, then score
/// each test fold. Cells are processed one time bucket at a time.
pub fn run_grid(
    grid: &ExperimentGrid,
    train_set: &[Instance],
    test_set: &[Instance],
    models: FeatureModels<'_>,
) -> Result<ResultTable> {
    let subset: Vec<Instance>;
    let train_set = if grid.train_fraction < 1.0 {
        let keep = training_subset(train_set.len(), grid.train_fraction, grid.seed)?;
        subset = keep.into_iter().map(|i| train_set[i].clone()).collect();
        info!(
            "fitting classifiers on {} of {} training reports",
            subset.len(),
            train_set.len()
        );
        &subset[..]
    } else {
        train_set
    };
    let plan = plan_grid(grid, train_set, test_set, models)?;
    let train_labels: Vec<Label> = train_set.iter().map(|i| i.label).collect();
    let test_labels: Vec<Label> = test_set.iter().map(|i| i.label).collect();
    let mut results = Vec::with_capacity(plan.cells.len());

    for &bucket in &grid.buckets {
        let bucket_cells = plan.bucket_cells(bucket);
        if bucket_cells.is_empty() {
            continue;
        }
        let needed = models_for(&bucket_cells, models);
        let horizon = i64::from(bucket) * 60;
        let train_x = featurize_cells(train_set, &bucket_cells, needed, horizon)?;
        let test_x = featurize_cells(test_set, &bucket_cells, needed, horizon)?;
        for ((key, (schema, tx)), (_, ex)) in bucket_cells.iter().zip(train_x).zip(test_x) {
            let (model, report) = train(&schema, &tx, &train_labels, &grid.classifier)?;
            let pred: Vec<Label> = ex.iter().map(|x| model.predict_values(x)).collect::<Result<_>>()?;
            let cell = score_cell(*key, &plan.folds, &test_labels, &pred)?;
            info!(
                "{key}: macro-F1 {:.3} ({} epochs, converged {})",
                cell.mean.macro_f1,
                report.epochs(),
                report.converged
            );
            results.push(cell);
        }
    }
    results.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(ResultTable { cells: results })
}
