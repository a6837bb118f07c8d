use serde::{Deserialize, Serialize};

use crate::classifier::standardize::Standardizer;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, Schema};
use crate::Label;

const K: usize = Label::COUNT;

/// Weights (`K x dim`, row-major by class) and biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub biases: [f64; K],
}

impl Parameters {
    pub fn zeros(dim: usize) -> Parameters {
        Parameters {
            dim,
            weights: vec![0.0; K * dim],
            biases: [0.0; K],
        }
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.weights[k * self.dim..(k + 1) * self.dim]
    }

    pub fn scores(&self, x: &[f64]) -> [f64; K] {
        let mut s = self.biases;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += self.row(k).iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        s
    }

    pub fn weight_norm_sq(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// Largest absolute value over weights and biases.
    pub fn max_abs(&self) -> f64 {
        self.weights.iter().chain(&self.biases).fold(0.0, |m, v| m.max(v.abs()))
    }

    fn norm_sq(&self) -> f64 {
        self.weight_norm_sq() + self.biases.iter().map(|b| b * b).sum::<f64>()
    }

    /// `self + alpha * other`
    fn added(&self, alpha: f64, other: &Parameters) -> Parameters {
        let mut out = self.clone();
        out.weights
            .iter_mut()
            .zip(&other.weights)
            .for_each(|(w, g)| *w += alpha * g);
        out.biases
            .iter_mut()
            .zip(&other.biases)
            .for_each(|(b, g)| *b += alpha * g);
        out
    }

    fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.biases).all(|v| v.is_finite())
    }
}

pub fn softmax(scores: [f64; K]) -> [f64; K] {
    let m = scores.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut e = scores.map(|s| (s - m).exp());
    let z: f64 = e.iter().sum();
    e.iter_mut().for_each(|v| *v /= z);
    e
}

fn log_sum_exp(scores: &[f64; K]) -> f64 {
    let m = scores.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln()
}

/// First class with the highest probability.
pub fn argmax(probs: &[f64; K]) -> Label {
    let mut best = 0;
    for k in 1..K {
        if probs[k] > probs[best] {
            best = k;
        }
    }
    Label::from_index(best).expect("class index in range")
}

/// Regularized mean cross-entropy over a dense row-major design matrix.
#[derive(Debug, Clone)]
pub struct Objective<'a> {
    rows: &'a [f64],
    dim: usize,
    labels: &'a [Label],
    weights: Option<Vec<f64>>,
    l2: f64,
}

impl<'a> Objective<'a> {
    pub fn new(rows: &'a [f64], dim: usize, labels: &'a [Label], l2: f64) -> Objective<'a> {
        assert_eq!(rows.len(), dim * labels.len(), "design matrix shape");
        assert!(!labels.is_empty(), "objective needs at least one instance");
        Objective {
            rows,
            dim,
            labels,
            weights: None,
            l2,
        }
    }

    /// Weight each instance by `n / (K * n_class)`.
    pub fn with_class_weights(mut self) -> Self {
        let mut counts = [0usize; K];
        self.labels.iter().for_each(|l| counts[l.index()] += 1);
        let n = self.labels.len() as f64;
        self.weights = Some(
            self.labels
                .iter()
                .map(|l| n / (K as f64 * counts[l.index()] as f64))
                .collect(),
        );
        self
    }

    fn instance(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    fn total_weight(&self) -> f64 {
        self.weights
            .as_ref()
            .map_or(self.labels.len() as f64, |w| w.iter().sum())
    }

    pub fn loss(&self, p: &Parameters) -> f64 {
        let mut total = 0.0;
        for (i, y) in self.labels.iter().enumerate() {
            let s = p.scores(self.instance(i));
            total += self.weight(i) * (log_sum_exp(&s) - s[y.index()]);
        }
        total / self.total_weight() + 0.5 * self.l2 * p.weight_norm_sq()
    }

    pub fn loss_and_gradient(&self, p: &Parameters) -> (f64, Parameters) {
        let mut g = Parameters::zeros(self.dim);
        let mut total = 0.0;
        let norm = 1.0 / self.total_weight();
        for (i, y) in self.labels.iter().enumerate() {
            let x = self.instance(i);
            let s = p.scores(x);
            let w = self.weight(i);
            total += w * (log_sum_exp(&s) - s[y.index()]);
            let mut d = softmax(s);
            d[y.index()] -= 1.0;
            for (k, dk) in d.iter().enumerate() {
                let c = w * norm * dk;
                g.biases[k] += c;
                g.weights[k * self.dim..(k + 1) * self.dim]
                    .iter_mut()
                    .zip(x)
                    .for_each(|(gw, v)| *gw += c * v);
            }
        }
        g.weights
            .iter_mut()
            .zip(&p.weights)
            .for_each(|(gw, w)| *gw += self.l2 * w);
        (total * norm + 0.5 * self.l2 * p.weight_norm_sq(), g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainParams {
    /// L2 strength; `None` means `1 / N`.
    pub l2: Option<f64>,
    pub tolerance: f64,
    pub max_epochs: usize,
    pub standardize: bool,
    pub class_weights: bool,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            l2: None,
            tolerance: 1e-6,
            max_epochs: 1000,
            standardize: true,
            class_weights: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Loss at the start and after each accepted step.
    pub losses: Vec<f64>,
    pub converged: bool,
    pub gradient_max_norm: f64,
}

impl TrainReport {
    pub fn epochs(&self) -> usize {
        self.losses.len() - 1
    }
}

/// Full-batch gradient descent with a backtracking (Armijo) step, so the
/// loss never increases between epochs.
pub fn minimize(objective: &Objective<'_>, tolerance: f64, max_epochs: usize) -> (Parameters, TrainReport) {
    let mut theta = Parameters::zeros(objective.dim);
    let (mut loss, mut grad) = objective.loss_and_gradient(&theta);
    let mut losses = vec![loss];
    let mut step = 1.0;
    let mut converged = false;
    for _ in 0..max_epochs {
        if grad.max_abs() < tolerance {
            converged = true;
            break;
        }
        let g2 = grad.norm_sq();
        let accepted = loop {
            let cand = theta.added(-step, &grad);
            let (l, g) = objective.loss_and_gradient(&cand);
            if l.is_finite() && l <= loss - 1e-4 * step * g2 {
                break Some((cand, l, g));
            }
            step *= 0.5;
            if step < 1e-16 {
                break None;
            }
        };
        let Some((cand, l, g)) = accepted else {
            break;
        };
        theta = cand;
        loss = l;
        grad = g;
        losses.push(loss);
        step = (step * 2.0).min(1e6);
    }
    if grad.max_abs() < tolerance {
        converged = true;
    }
    let gradient_max_norm = grad.max_abs();
    (
        theta,
        TrainReport {
            losses,
            converged,
            gradient_max_norm,
        },
    )
}

/// Trained three-class logistic regression with its input transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    schema: Schema,
    standardizer: Option<Standardizer>,
    params: Parameters,
    l2: f64,
}

impl LogRegModel {
    pub fn new(schema: Schema, standardizer: Option<Standardizer>, params: Parameters, l2: f64) -> Result<LogRegModel> {
        let dim = schema.len();
        if params.dim != dim || params.weights.len() != K * dim {
            return Err(Error::SchemaMismatch {
                expected: format!("{dim} features"),
                actual: format!("{} weights per class", params.dim),
            });
        }
        if let Some(s) = &standardizer {
            if s.dim() != dim {
                return Err(Error::SchemaMismatch {
                    expected: format!("{dim} features"),
                    actual: format!("standardizer over {}", s.dim()),
                });
            }
        }
        if !params.is_finite() || !(l2 >= 0.0 && l2.is_finite()) {
            return Err(Error::Validation("model parameters must be finite".into()));
        }
        Ok(LogRegModel {
            schema,
            standardizer,
            params,
            l2,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn standardizer(&self) -> Option<&Standardizer> {
        self.standardizer.as_ref()
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    fn transform(&self, x: &[f64]) -> Vec<f64> {
        match &self.standardizer {
            Some(s) => s.apply(x),
            None => x.to_vec(),
        }
    }

    /// Class probabilities for raw feature values laid out as the model schema.
    pub fn predict_proba_values(&self, x: &[f64]) -> Result<[f64; K]> {
        if x.len() != self.schema.len() {
            return Err(Error::SchemaMismatch {
                expected: format!("{} features", self.schema.len()),
                actual: format!("{} features", x.len()),
            });
        }
        Ok(softmax(self.params.scores(&self.transform(x))))
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> Result<[f64; K]> {
        self.check_schema(x)?;
        self.predict_proba_values(x.values())
    }

    pub fn predict_values(&self, x: &[f64]) -> Result<Label> {
        Ok(argmax(&self.predict_proba_values(x)?))
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<Label> {
        Ok(argmax(&self.predict_proba(x)?))
    }

    fn check_schema(&self, x: &FeatureVector) -> Result<()> {
        if x.schema() != &self.schema {
            return Err(Error::SchemaMismatch {
                expected: self.schema.names().len().to_string() + " features of the training schema",
                actual: x.schema().names().len().to_string() + " features of another schema",
            });
        }
        Ok(())
    }
}

/// Train on raw rows laid out as `schema`.
pub fn train<R: AsRef<[f64]>>(
    schema: &Schema,
    rows: &[R],
    labels: &[Label],
    params: &TrainParams,
) -> Result<(LogRegModel, TrainReport)> {
    if rows.len() != labels.len() {
        return Err(Error::Precondition(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    for label in Label::ALL {
        if !labels.contains(&label) {
            return Err(Error::Config(format!("no training instances of class {label}")));
        }
    }
    let dim = schema.len();
    if let Some(i) = rows.iter().position(|r| r.as_ref().len() != dim) {
        return Err(Error::SchemaMismatch {
            expected: format!("{dim} features"),
            actual: format!("{} features in row {i}", rows[i].as_ref().len()),
        });
    }
    let standardizer = params.standardize.then(|| Standardizer::fit(rows, dim));
    let mut flat = Vec::with_capacity(rows.len() * dim);
    let mut buf = Vec::with_capacity(dim);
    for r in rows {
        match &standardizer {
            Some(s) => {
                s.apply_into(r.as_ref(), &mut buf);
                flat.extend_from_slice(&buf);
            }
            None => flat.extend_from_slice(r.as_ref()),
        }
    }
    let l2 = params.l2.unwrap_or(1.0 / rows.len() as f64);
    if !(l2 >= 0.0 && l2.is_finite()) {
        return Err(Error::Config(format!("invalid L2 strength {l2}")));
    }
    let mut objective = Objective::new(&flat, dim, labels, l2);
    if params.class_weights {
        objective = objective.with_class_weights();
    }
    let (theta, report) = minimize(&objective, params.tolerance, params.max_epochs);
    Ok((LogRegModel::new(schema.clone(), standardizer, theta, l2)?, report))
}

/// Train on labelled feature vectors that share one schema.
pub fn train_instances(
    instances: &[(FeatureVector, Label)],
    params: &TrainParams,
) -> Result<(LogRegModel, TrainReport)> {
    let Some((first, _)) = instances.first() else {
        return Err(Error::Config("no training instances".into()));
    };
    let schema = first.schema().clone();
    if instances.iter().any(|(x, _)| x.schema() != &schema) {
        return Err(Error::SchemaMismatch {
            expected: "one schema across training instances".into(),
            actual: "mixed schemas".into(),
        });
    }
    let rows: Vec<&[f64]> = instances.iter().map(|(x, _)| x.values()).collect();
    let labels: Vec<Label> = instances.iter().map(|(_, y)| *y).collect();
    train(&schema, &rows, &labels, params)
}

/// Gradient of the model's regularized loss on `batch`, in the model's
/// standardized input space.
pub fn gradient(model: &LogRegModel, batch: &[(FeatureVector, Label)]) -> Result<Parameters> {
    if batch.is_empty() {
        return Err(Error::Precondition("gradient needs a non-empty batch".into()));
    }
    let mut flat = Vec::with_capacity(batch.len() * model.schema.len());
    for (x, _) in batch {
        model.check_schema(x)?;
        flat.extend(model.transform(x.values()));
    }
    let labels: Vec<Label> = batch.iter().map(|(_, y)| *y).collect();
    let objective = Objective::new(&flat, model.schema.len(), &labels, model.l2);
    Ok(objective.loss_and_gradient(&model.params).1)
}
