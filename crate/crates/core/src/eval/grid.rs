use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classifier::TrainParams;
use crate::error::{Error, Result};
use crate::features::FeatureSet;

pub const DEFAULT_BUCKETS: [u32; 9] = [0, 5, 10, 15, 30, 60, 120, 180, 300];
pub const DEFAULT_FRACTIONS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 1.0];
pub const DEFAULT_FOLDS: usize = 10;

/// One evaluated configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    pub feature_set: FeatureSet,
    pub bucket_minutes: u32,
    pub fraction: f64,
}

impl CellKey {
    pub fn elapsed_seconds(&self) -> i64 {
        i64::from(self.bucket_minutes) * 60
    }
}

impl Eq for CellKey {}

impl Ord for CellKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.feature_set
            .cmp(&other.feature_set)
            .then(self.bucket_minutes.cmp(&other.bucket_minutes))
            .then(self.fraction.total_cmp(&other.fraction))
    }
}

impl PartialOrd for CellKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} @ {} min, p={}",
            self.feature_set, self.bucket_minutes, self.fraction
        )
    }
}

/// Feature sets, time buckets and window fractions to evaluate. Fractions
/// below 1 apply only to `window_feature_sets`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentGrid {
    pub feature_sets: Vec<FeatureSet>,
    pub buckets: Vec<u32>,
    pub fractions: Vec<f64>,
    pub window_feature_sets: Vec<FeatureSet>,
    pub folds: usize,
    pub seed: u64,
    pub test_year: Option<i32>,
    /// Share of the training set the classifiers are fitted on; embeddings
    /// always use all of it.
    pub train_fraction: f64,
    pub classifier: TrainParams,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        ExperimentGrid {
            feature_sets: FeatureSet::ALL.to_vec(),
            buckets: DEFAULT_BUCKETS.to_vec(),
            fractions: DEFAULT_FRACTIONS.to_vec(),
            window_feature_sets: vec![FeatureSet::SocialMultiW2v],
            folds: DEFAULT_FOLDS,
            seed: 1,
            test_year: None,
            train_fraction: 1.0,
            classifier: TrainParams::default(),
        }
    }
}

fn list<T>(value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("{key}: cannot parse {value:?}: {e}")))
}

impl ExperimentGrid {
    /// Parse `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<ExperimentGrid> {
        let mut grid = ExperimentGrid::default();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(i + 1, format!("expected key = value, got {line:?}")));
            };
            let (key, value) = (key.trim(), value.trim());
            if seen.insert(key.to_string(), i + 1).is_some() {
                return Err(Error::parse(i + 1, format!("duplicate key {key:?}")));
            }
            grid.set(key, value).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        grid.validate()?;
        Ok(grid)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "feature_sets" => self.feature_sets = list(value, str::parse)?,
            "window_feature_sets" => self.window_feature_sets = list(value, str::parse)?,
            "buckets" => self.buckets = list(value, |v| num(key, v))?,
            "fractions" => self.fractions = list(value, |v| num(key, v))?,
            "folds" => self.folds = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "test_year" => self.test_year = Some(num(key, value)?),
            "train_fraction" => self.train_fraction = num(key, value)?,
            "l2" => self.classifier.l2 = Some(num(key, value)?),
            "tolerance" => self.classifier.tolerance = num(key, value)?,
            "max_epochs" => self.classifier.max_epochs = num(key, value)?,
            "standardize" => self.classifier.standardize = num(key, value)?,
            "class_weights" => self.classifier.class_weights = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown grid key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.feature_sets.is_empty() || self.buckets.is_empty() || self.fractions.is_empty() {
            return Err(Error::Config("grid needs feature sets, buckets and fractions".into()));
        }
        if self.buckets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("buckets must be strictly increasing".into()));
        }
        if self.fractions.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
            return Err(Error::Config("fractions must lie in (0, 1]".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(Error::Config("train_fraction must lie in (0, 1]".into()));
        }
        if self.folds < 2 {
            return Err(Error::Config("at least two folds are needed".into()));
        }
        Ok(())
    }

    /// All cells in key order.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut cells = Vec::new();
        for &feature_set in &self.feature_sets {
            for &bucket_minutes in &self.buckets {
                for &fraction in &self.fractions {
                    if fraction == 1.0 || self.window_feature_sets.contains(&feature_set) {
                        cells.push(CellKey {
                            feature_set,
                            bucket_minutes,
                            fraction,
                        });
                    }
                }
            }
        }
        cells.sort();
        cells.dedup();
        cells
    }
}
