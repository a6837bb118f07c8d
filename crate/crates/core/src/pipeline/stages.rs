use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};

use crate::annotation::{read_log, replay, AnnotationRecord, AnnotationService, LOG_FILE};
use crate::classifier::{read_model, train, write_model};
use crate::corpus::synth::generate_synthetic_corpus;
use crate::corpus::{keep_uppercase_rip, read_tweets, write_tweets, Tweet, TweetId};
use crate::embeddings::{train_class_models, train_single_model, ClassModels, EmbeddingModel};
use crate::error::{Error, IoContext, Result};
use crate::eval::{
    emit_report, featurize_cells, kfold_split, models_for, plan_grid, run_grid, score_cell, split_by_year,
    training_subset, CellKey, ExperimentGrid, Instance, ResultTable,
};
use crate::features::{read_feature_matrix, write_feature_matrix, FeatureModels, FeatureRow};
use crate::kb::{read_person_entries, NameIndex, PersonEntry, PersonId};
use crate::reports::{write_store, ReportBuilder, ReportStore};
use crate::Label;

use super::artifact::{hash_path, write_atomic, write_bytes_atomic, Manifest};
use super::config::PipelineConfig;

pub const SINGLE_MODEL_FILE: &str = "w2v.bin";
pub const RESULTS_TSV: &str = "results.tsv";
pub const RESULTS_TEXT: &str = "tables.txt";

pub fn class_model_file(label: Label) -> String {
    format!("multiw2v-{label}.bin")
}

/// Directory name of one grid cell's artifacts.
pub fn cell_name(key: &CellKey) -> String {
    format!("{}_{}m_p{}", key.feature_set, key.bucket_minutes, key.fraction)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Synth,
    Ingest,
    Link,
    BuildReports,
    AnnotateServe,
    AnnotateImport,
    TrainEmbeddings,
    Featurize,
    Train,
    Evaluate,
}

impl Stage {
    pub const ALL: [Stage; 10] = [
        Stage::Synth,
        Stage::Ingest,
        Stage::Link,
        Stage::BuildReports,
        Stage::AnnotateServe,
        Stage::AnnotateImport,
        Stage::TrainEmbeddings,
        Stage::Featurize,
        Stage::Train,
        Stage::Evaluate,
    ];

    /// Stages that produce artifacts without human input, in order.
    pub const BATCH: [Stage; 9] = [
        Stage::Synth,
        Stage::Ingest,
        Stage::Link,
        Stage::BuildReports,
        Stage::AnnotateImport,
        Stage::TrainEmbeddings,
        Stage::Featurize,
        Stage::Train,
        Stage::Evaluate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Ingest => "ingest",
            Stage::Link => "link",
            Stage::BuildReports => "build-reports",
            Stage::AnnotateServe => "annotate-serve",
            Stage::AnnotateImport => "annotate-import",
            Stage::TrainEmbeddings => "train-embeddings",
            Stage::Featurize => "featurize",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage {s:?}")))
    }
}

/// A configuration bound to the directory its relative paths start from.
#[derive(Debug, Clone)]
pub struct Pipeline {
    /// The configuration with paths resolved against `base`.
    pub config: PipelineConfig,
    pub base: PathBuf,
    /// Hash of the configuration as written, before path resolution.
    pub config_hash: String,
}

/// Inputs and outputs gathered while a stage runs.
struct Run<'p> {
    pipeline: &'p Pipeline,
    stage: Stage,
    inputs: BTreeMap<String, String>,
    outputs: Vec<PathBuf>,
    stats: BTreeMap<String, u64>,
}

impl Run<'_> {
    /// Record an input, failing with the stage that produces it when absent.
    fn input(&mut self, path: &Path, producer: Stage) -> Result<()> {
        if !path.exists() {
            return Err(Error::MissingStage {
                stage: producer.name().to_string(),
                path: path.to_path_buf(),
            });
        }
        let hash = hash_path(path)?;
        self.pipeline.check_recorded(path, &hash, producer);
        self.inputs.insert(self.pipeline.relative(path), hash);
        Ok(())
    }

    fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    fn stat(&mut self, key: &str, value: usize) {
        self.stats.insert(key.to_string(), value as u64);
    }

    fn finish(self) -> Result<Manifest> {
        let mut outputs = BTreeMap::new();
        for p in &self.outputs {
            outputs.insert(self.pipeline.relative(p), hash_path(p)?);
        }
        let manifest = Manifest {
            stage: self.stage.name().to_string(),
            seed: self.pipeline.config.seed,
            config_hash: self.pipeline.config_hash.clone(),
            inputs: self.inputs,
            outputs,
            stats: self.stats,
        };
        manifest.write(&self.pipeline.manifest_path(self.stage))?;
        Ok(manifest)
    }
}

impl Pipeline {
    pub fn new(config: PipelineConfig, base: impl Into<PathBuf>) -> Pipeline {
        let base = base.into();
        let paths = config.paths.resolve(&base);
        let config_hash = config.hash();
        Pipeline {
            config: PipelineConfig { paths, ..config },
            base,
            config_hash,
        }
    }

    /// Load a configuration file; relative paths start at its directory.
    pub fn from_file(path: &Path, overrides: &[String]) -> Result<Pipeline> {
        let config = PipelineConfig::load(path, overrides)?;
        let base = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        Ok(Pipeline::new(config, base))
    }

    fn relative(&self, path: &Path) -> String {
        path.strip_prefix(&self.base)
            .unwrap_or(path)
            .to_string_lossy()
            .into_owned()
    }

    pub fn manifest_path(&self, stage: Stage) -> PathBuf {
        self.config.paths.manifests.join(format!("{stage}.json"))
    }

    /// Warn when an input differs from what its producing stage recorded.
    fn check_recorded(&self, path: &Path, hash: &str, producer: Stage) {
        let Ok(m) = Manifest::read(&self.manifest_path(producer)) else {
            return;
        };
        if let Some(recorded) = m.outputs.get(&self.relative(path)) {
            if recorded != hash {
                warn!("{} changed since stage `{producer}` wrote it", path.display());
            }
        }
    }

    fn begin(&self, stage: Stage) -> Run<'_> {
        info!("stage {stage}");
        Run {
            pipeline: self,
            stage,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            stats: BTreeMap::new(),
        }
    }

    /// Run one stage and write its manifest. Serving annotations is
    /// interactive and handled by the annotation server instead.
    pub fn run(&self, stage: Stage) -> Result<Manifest> {
        match stage {
            Stage::Synth => self.synth(),
            Stage::Ingest => self.ingest(),
            Stage::Link => self.link(),
            Stage::BuildReports => self.build_reports(),
            Stage::AnnotateServe => Err(Error::Config(
                "annotate-serve runs the annotation server; it has no batch form".into(),
            )),
            Stage::AnnotateImport => self.annotate_import(),
            Stage::TrainEmbeddings => self.train_embeddings(),
            Stage::Featurize => self.featurize(),
            Stage::Train => self.train(),
            Stage::Evaluate => self.evaluate(),
        }
    }

    fn synth(&self) -> Result<Manifest> {
        let mut run = self.begin(Stage::Synth);
        let paths = &self.config.paths;
        let corpus = generate_synthetic_corpus(&self.config.synth, self.config.seed)?;
        write_atomic(&paths.tweets, |w| corpus.write_tweets(w).at(&paths.tweets))?;
        write_atomic(&paths.kb, |w| corpus.write_kb(w).at(&paths.kb))?;
        write_atomic(&paths.labels, |w| corpus.write_labels(w).at(&paths.labels))?;
        run.stat("reports", corpus.reports.len());
        run.stat("people", corpus.people.len());
        run.stat("noise_tweets", corpus.noise.len());
        for p in [&paths.tweets, &paths.kb, &paths.labels] {
            run.output(p);
        }
        run.finish()
    }

    fn ingest(&self) -> Result<Manifest> {
        let mut run = self.begin(Stage::Ingest);
        let paths = &self.config.paths;
        run.input(&paths.tweets, Stage::Synth)?;
        let read = read_tweets(open(&paths.tweets)?)?;
        for e in read.errors.iter().take(5) {
            warn!("{}: {e}", paths.tweets.display());
        }
        let total = read.tweets.len();
        let kept: Vec<&Tweet> = read.tweets.iter().filter(|t| keep_uppercase_rip(&t.text)).collect();
        write_atomic(&paths.corpus, |w| {
            write_tweets(w, kept.iter().copied()).at(&paths.corpus)
        })?;
        run.stat("read", total);
        run.stat("malformed", read.errors.len());
        run.stat("kept", kept.len());
        run.output(&paths.corpus);
        run.finish()
    }

    fn read_kb(&self) -> Result<Vec<PersonEntry>> {
        let path = &self.config.paths.kb;
        let read = read_person_entries(open(path)?)?;
        for e in read.errors.iter().take(5) {
            warn!("{}: {e}", path.display());
        }
        Ok(read.entries)
    }

    fn read_corpus(&self) -> Result<Vec<Tweet>> {
        let path = &self.config.paths.corpus;
        let read = read_tweets(open(path)?)?;
        if let Some(e) = read.errors.into_iter().next() {
            return Err(Error::Format(format!("{}: {e}", path.display())));
        }
        Ok(read.tweets)
    }

    fn link(&self) -> Result<Manifest> {
        let mut run = self.begin(Stage::Link);
        let paths = &self.config.paths;
        run.input(&paths.corpus, Stage::Ingest)?;
        run.input(&paths.kb, Stage::Synth)?;
        let people = self.read_kb()?;
        let index = NameIndex::build(&people);
        let tweets = self.read_corpus()?;
        let mut pairs = 0;
        write_atomic(&paths.mentions, |w| {
            for t in &tweets {
                for person in index.match_mentions(&t.text) {
                    writeln!(w, "{}\t{person}", t.id).at(&paths.mentions)?;
                    pairs += 1;
                }
            }
            Ok(())
        })?;
        run.stat("tweets", tweets.len());
        run.stat("people", people.len());
        run.stat("pairs", pairs);
        run.output(&paths.mentions);
        run.finish()
    }

    fn build_reports(&self) -> Result<Manifest> {
        let mut run = self.begin(Stage::BuildReports);
        let paths = &self.config.paths;
        run.input(&paths.corpus, Stage::Ingest)?;
        run.input(&paths.mentions, Stage::Link)?;
        run.input(&paths.kb, Stage::Synth)?;
        let people: HashMap<PersonId, PersonEntry> = self.read_kb()?.into_iter().map(|p| (p.id.clone(), p)).collect();
        let tweets: HashMap<TweetId, Tweet> = self.read_corpus()?.into_iter().map(|t| (t.id, t)).collect();
        let mentions = read_mentions(&paths.mentions)?;
        let mut matches = Vec::with_capacity(mentions.len());
        for (line, (tweet_id, person)) in mentions.iter().enumerate() {
            let tweet = tweets
                .get(tweet_id)
                .ok_or_else(|| Error::parse(line + 1, format!("tweet {tweet_id} is not in the corpus")))?;
            matches.push((tweet, person));
        }
        let builder = ReportBuilder {
            threshold: self.config.reports.threshold,
            ..ReportBuilder::default()
        };
        let (reports, summary) = builder.build(matches, &people);
        write_store(&paths.store, &reports, &people, &summary)?;
        run.stat("reports", summary.reports);
        run.stat("retained_tweets", summary.retained_tweets);
        run.output(&paths.store.join(crate::reports::REPORTS_DIR));
        run.finish()
    }

    /// Record sidecar labels as annotations for reports that have none yet.
    fn annotate_import(&self) -> Result<Manifest> {
        let mut run = self.begin(Stage::AnnotateImport);
        let paths = &self.config.paths;
        run.input(&paths.store.join(crate::reports::REPORTS_DIR), Stage::BuildReports)?;
        run.input(&paths.labels, Stage::Synth)?;
        let labels = read_labels(&paths.labels)?;
        let service = AnnotationService::open(&paths.store)?;
        let current = replay(&service.log_entries());
        let (mut imported, mut unknown) = (0, 0);
        for (report_id, label) in &labels {
            let Some(meta) = service.store().meta(report_id) else {
                unknown += 1;
                continue;
            };
            if current.contains_key(report_id) {
                continue;
            }
            let person = meta
                .resolved_person_id
                .clone()
                .or_else(|| meta.candidates.first().map(|c| c.id.clone()))
                .ok_or_else(|| Error::Validation(format!("report {report_id} has no candidate")))?;
            service.submit_annotation(AnnotationRecord {
                report_id: report_id.clone(),
                resolved_person_id: person,
                label: *label,
                annotator: self.config.annotate.annotator.clone(),
                annotated_at: meta.first_timestamp,
            })?;
            imported += 1;
        }
        if unknown > 0 {
            warn!("{unknown} labelled reports are not in the store");
        }
        run.stat("imported", imported);
        run.stat("unknown", unknown);
        run.stat("annotated", service.counts().annotated);
        run.output(&paths.store.join(LOG_FILE));
        run.finish()
    }

    fn split(&self) -> Result<(Vec<Instance>, Vec<Instance>)> {
        let instances = labeled_instances(&self.config.paths.store)?;
        let (train, test, _) = split_by_year(instances, Instance::year, self.config.grid.test_year)?;
        Ok((train, test))
    }

    fn train_embeddings(&self) -> Result<Manifest> {
        let mut run = self.begin(Stage::TrainEmbeddings);
        let paths = &self.config.paths;
        run.input(&paths.store.join(LOG_FILE), Stage::AnnotateImport)?;
        let (train, _) = self.split()?;
        let params = self.config.sgns();
        let single = train_single_model(train.iter().map(|i| &i.timeline), params)?;
        let classes = train_class_models(train.iter().map(|i| (&i.timeline, i.label)), params)?;
        let path = paths.models.join(SINGLE_MODEL_FILE);
        write_atomic(&path, |w| single.write_binary(w).at(&path))?;
        run.output(&path);
        for (label, model) in classes.iter() {
            let path = paths.models.join(class_model_file(label));
            write_atomic(&path, |w| model.write_binary(w).at(&path))?;
            run.output(&path);
        }
        run.stat("train_reports", train.len());
        run.stat("vocabulary", single.vocab().len());
        run.finish()
    }

    fn featurize(&self) -> Result<Manifest> {
        let mut run = self.begin(Stage::Featurize);
        let paths = &self.config.paths;
        let grid = self.config.grid();
        run.input(&paths.store.join(LOG_FILE), Stage::AnnotateImport)?;
        let (single, classes) = load_models(&paths.models, &grid, |p| run.input(p, Stage::TrainEmbeddings))?;
        let models = FeatureModels {
            w2v: single.as_ref(),
            classes: classes.as_ref(),
        };
        let (train, test) = self.split()?;
        let plan = plan_grid(&grid, &train, &test, models)?;
        for &bucket in &grid.buckets {
            let cells = plan.bucket_cells(bucket);
            if cells.is_empty() {
                continue;
            }
            let needed = models_for(&cells, models);
            let horizon = i64::from(bucket) * 60;
            for (part, set) in [("train", &train), ("test", &test)] {
                let matrices = featurize_cells(set, &cells, needed, horizon)?;
                for (key, (schema, values)) in cells.iter().zip(matrices) {
                    let path = paths.features.join(cell_name(key)).join(format!("{part}.tsv"));
                    let rows = set.iter().zip(values).map(|(inst, values)| FeatureRow {
                        report_id: inst.report_id.clone(),
                        label: inst.label,
                        elapsed: key.elapsed_seconds(),
                        fraction: key.fraction,
                        values,
                    });
                    let rows: Vec<FeatureRow> = rows.collect();
                    write_atomic(&path, |w| write_feature_matrix(w, &schema.names(), &rows))?;
                }
            }
        }
        run.stat("cells", plan.cells.len());
        run.stat("train_reports", train.len());
        run.stat("test_reports", test.len());
        run.output(&paths.features);
        run.finish()
    }

    fn train(&self) -> Result<Manifest> {
        let mut run = self.begin(Stage::Train);
        let paths = &self.config.paths;
        let grid = self.config.grid();
        let dim = self.config.embeddings.dim;
        let mut unconverged = 0;
        for key in grid.cells() {
            let path = paths.features.join(cell_name(&key)).join("train.tsv");
            run.input(&path, Stage::Featurize)?;
            let (names, rows) = read_feature_matrix(open(&path)?)?;
            let schema = key.feature_set.schema(dim);
            if schema.names() != names {
                return Err(Error::SchemaMismatch {
                    expected: format!("{} columns for {}", schema.len(), key.feature_set),
                    actual: format!("{} columns in {}", names.len(), path.display()),
                });
            }
            let keep = training_subset(rows.len(), grid.train_fraction, grid.seed)?;
            let labels: Vec<Label> = keep.iter().map(|&i| rows[i].label).collect();
            let values: Vec<&[f64]> = keep.iter().map(|&i| rows[i].values.as_slice()).collect();
            let (model, report) = train(&schema, &values, &labels, &grid.classifier)?;
            if !report.converged {
                unconverged += 1;
            }
            let out = paths.classifiers.join(format!("{}.bin", cell_name(&key)));
            write_atomic(&out, |w| write_model(&model, w).at(&out))?;
            run.output(&out);
        }
        run.stat("cells", grid.cells().len());
        run.stat("unconverged", unconverged);
        run.finish()
    }

    fn evaluate(&self) -> Result<Manifest> {
        let mut run = self.begin(Stage::Evaluate);
        let paths = &self.config.paths;
        let grid = self.config.grid();
        let mut cells = Vec::new();
        let mut folds: Option<Vec<Vec<usize>>> = None;
        for key in grid.cells() {
            let model_path = paths.classifiers.join(format!("{}.bin", cell_name(&key)));
            run.input(&model_path, Stage::Train)?;
            let test_path = paths.features.join(cell_name(&key)).join("test.tsv");
            run.input(&test_path, Stage::Featurize)?;
            let model = read_model(open(&model_path)?)?;
            let (_, rows) = read_feature_matrix(open(&test_path)?)?;
            let gold: Vec<Label> = rows.iter().map(|r| r.label).collect();
            let pred: Vec<Label> = rows
                .iter()
                .map(|r| model.predict_values(&r.values))
                .collect::<Result<_>>()?;
            let folds = match &folds {
                Some(f) => f,
                None => folds.insert(kfold_split(rows.len(), grid.folds, grid.seed)?),
            };
            cells.push(score_cell(key, folds, &gold, &pred)?);
        }
        cells.sort_by(|a, b| a.key.cmp(&b.key));
        let table = ResultTable { cells };
        run.stat("cells", table.cells.len());
        for p in write_results(&paths.results, &table)? {
            run.output(&p);
        }
        run.finish()
    }
}

/// Write `results.tsv` and `tables.txt` into `dir`.
pub fn write_results(dir: &Path, table: &ResultTable) -> Result<[PathBuf; 2]> {
    let report = emit_report(table);
    let tsv = dir.join(RESULTS_TSV);
    let text = dir.join(RESULTS_TEXT);
    write_bytes_atomic(&tsv, report.tsv.as_bytes())?;
    write_bytes_atomic(&text, report.text.as_bytes())?;
    Ok([tsv, text])
}

/// Run the whole grid in memory from a report store and trained models.
pub fn evaluate_store(grid: &ExperimentGrid, store: &Path, models: &Path) -> Result<ResultTable> {
    let (single, classes) = load_models(models, grid, |p| {
        if p.exists() {
            Ok(())
        } else {
            Err(Error::MissingStage {
                stage: Stage::TrainEmbeddings.name().into(),
                path: p.to_path_buf(),
            })
        }
    })?;
    let instances = labeled_instances(store)?;
    let (train, test, _) = split_by_year(instances, Instance::year, grid.test_year)?;
    run_grid(
        grid,
        &train,
        &test,
        FeatureModels {
            w2v: single.as_ref(),
            classes: classes.as_ref(),
        },
    )
}

fn open(path: &Path) -> Result<BufReader<fs::File>> {
    Ok(BufReader::new(fs::File::open(path).at(path)?))
}

fn read_model_file(path: &Path) -> Result<EmbeddingModel> {
    EmbeddingModel::read_binary(open(path)?)
}

/// Load the embedding models the grid needs; `check` sees each path first.
pub fn load_models(
    dir: &Path,
    grid: &ExperimentGrid,
    mut check: impl FnMut(&Path) -> Result<()>,
) -> Result<(Option<EmbeddingModel>, Option<ClassModels>)> {
    let cells = grid.cells();
    let single = if cells.iter().any(|c| c.feature_set.uses_w2v()) {
        let path = dir.join(SINGLE_MODEL_FILE);
        check(&path)?;
        Some(read_model_file(&path)?)
    } else {
        None
    };
    let classes = if cells.iter().any(|c| c.feature_set.uses_multiw2v()) {
        let mut models = Vec::with_capacity(Label::COUNT);
        for label in Label::ALL {
            let path = dir.join(class_model_file(label));
            check(&path)?;
            models.push(read_model_file(&path)?);
        }
        Some(ClassModels::new(models.try_into().expect("three models"))?)
    } else {
        None
    };
    Ok((single, classes))
}

/// Annotated reports of a store as instances, ordered by first day then id.
pub fn labeled_instances(store_dir: &Path) -> Result<Vec<Instance>> {
    let store = ReportStore::open(store_dir)?;
    let log_path = store_dir.join(LOG_FILE);
    let entries = if log_path.exists() {
        read_log(&log_path)?
    } else {
        Vec::new()
    };
    let current = replay(&entries);
    let mut out = Vec::new();
    for meta in store.metas() {
        if let Some(ann) = current.get(&meta.report_id) {
            out.push(Instance {
                report_id: meta.report_id.clone(),
                label: ann.label,
                first_day: meta.first_day(),
                timeline: store.timeline(&meta.report_id)?,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::MissingStage {
            stage: Stage::AnnotateImport.name().into(),
            path: log_path,
        });
    }
    out.sort_by(|a, b| (a.first_day, &a.report_id).cmp(&(b.first_day, &b.report_id)));
    Ok(out)
}

fn tsv_lines(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.at(path)?;
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 1, line.split('\t').map(str::to_string).collect()));
    }
    Ok(out)
}

fn read_mentions(path: &Path) -> Result<Vec<(TweetId, PersonId)>> {
    tsv_lines(path)?
        .into_iter()
        .map(|(line, f)| match &f[..] {
            [tweet, person] => {
                let id = tweet
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad tweet id {tweet:?}")))?;
                Ok((id, person.clone()))
            }
            _ => Err(Error::parse(line, "expected tweet_id<TAB>person_id")),
        })
        .collect()
}

/// Read a `report_id<TAB>label` sidecar file.
pub fn read_labels(path: &Path) -> Result<BTreeMap<String, Label>> {
    let mut out = BTreeMap::new();
    for (line, f) in tsv_lines(path)? {
        let [id, label] = &f[..] else {
            return Err(Error::parse(line, "expected report_id<TAB>label"));
        };
        let label: Label = label.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?;
        if out.insert(id.clone(), label).is_some() {
            return Err(Error::parse(line, format!("duplicate report {id}")));
        }
    }
    Ok(out)
}
