use std::fs;
use std::path::Path;

use ripwire::eval::results_from_tsv;
use ripwire::pipeline::{
    evaluate_store, Manifest, Pipeline, PipelineConfig, Stage, RESULTS_TEXT, RESULTS_TSV, SINGLE_MODEL_FILE,
};
use ripwire::Error;

const SMALL: &str = r#"
seed = 5

[synth]
reports = 150
noise_tweets = 400
minor_people = 20
idle_people = 20
users = 20000

[embeddings]
dim = 16
epochs = 2

[grid]
feature_sets = ["social", "w2v", "multiw2v", "social+multiw2v"]
buckets = [0, 15]
fractions = [0.5, 1.0]
"#;

fn small_pipeline(dir: &Path) -> Pipeline {
    small_pipeline_with(dir, &[])
}

fn small_pipeline_with(dir: &Path, overrides: &[String]) -> Pipeline {
    let config_path = dir.join("ripwire.toml");
    fs::write(&config_path, SMALL).unwrap();
    Pipeline::from_file(&config_path, overrides).unwrap()
}

fn run_all(p: &Pipeline) -> Vec<Manifest> {
    Stage::BATCH.iter().map(|s| p.run(*s).unwrap()).collect()
}

#[test]
fn stages_name_their_missing_upstream() {
    let dir = tempfile::tempdir().unwrap();
    let p = small_pipeline(dir.path());
    let expect = |stage: Stage, upstream: &str| match p.run(stage) {
        Err(Error::MissingStage { stage, .. }) => assert_eq!(stage, upstream),
        other => panic!("{stage}: expected a missing-stage error, got {other:?}"),
    };
    expect(Stage::Ingest, "synth");
    expect(Stage::Link, "ingest");
    expect(Stage::Train, "featurize");
    expect(Stage::Evaluate, "train");
    p.run(Stage::Synth).unwrap();
    p.run(Stage::Ingest).unwrap();
    p.run(Stage::Link).unwrap();
    p.run(Stage::BuildReports).unwrap();
    expect(Stage::TrainEmbeddings, "annotate-import");
    p.run(Stage::AnnotateImport).unwrap();
    expect(Stage::Featurize, "train-embeddings");
    assert!(matches!(p.run(Stage::AnnotateServe), Err(Error::Config(_))));
}

#[test]
fn full_run_is_deterministic_and_matches_the_in_memory_grid() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (pa, pb) = (small_pipeline(a.path()), small_pipeline(b.path()));
    let ma = run_all(&pa);
    let mb = run_all(&pb);
    assert_eq!(ma, mb);

    let results = |p: &Pipeline| {
        (
            fs::read(p.config.paths.results.join(RESULTS_TSV)).unwrap(),
            fs::read(p.config.paths.results.join(RESULTS_TEXT)).unwrap(),
        )
    };
    assert_eq!(results(&pa), results(&pb));

    // every report of the synthetic corpus is rebuilt and labelled
    let stats = |stage: &str, key: &str| ma.iter().find(|m| m.stage == stage).unwrap().stats[key];
    assert_eq!(stats("build-reports", "reports"), 150);
    assert_eq!(stats("annotate-import", "annotated"), 150);
    assert_eq!(stats("annotate-import", "unknown"), 0);

    let tsv = String::from_utf8(results(&pa).0).unwrap();
    let on_disk = results_from_tsv(&tsv).unwrap();
    let grid = pa.config.grid();
    let direct = evaluate_store(&grid, &pa.config.paths.store, &pa.config.paths.models).unwrap();
    assert_eq!(on_disk.cells.len(), 4 * 2 + 2);
    assert_eq!(on_disk, direct);

    // rerunning a stage rewrites the same bytes
    let model = pa.config.paths.models.join(SINGLE_MODEL_FILE);
    let before = fs::read(&model).unwrap();
    pa.run(Stage::TrainEmbeddings).unwrap();
    assert_eq!(fs::read(&model).unwrap(), before);
}

#[test]
fn overrides_change_the_config_hash() {
    let base = PipelineConfig::from_toml(SMALL, &[]).unwrap();
    let other = PipelineConfig::from_toml(SMALL, &["synth.reports=151".into()]).unwrap();
    assert_ne!(base.hash(), other.hash());
    assert_eq!(other.synth.reports, 151);
}

#[test]
fn classifiers_can_be_fitted_on_part_of_the_training_set() {
    let dir = tempfile::tempdir().unwrap();
    let p = small_pipeline_with(dir.path(), &["grid.train_fraction=0.5".into()]);
    run_all(&p);
    let on_disk = results_from_tsv(&fs::read_to_string(p.config.paths.results.join(RESULTS_TSV)).unwrap()).unwrap();
    let direct = evaluate_store(&p.config.grid(), &p.config.paths.store, &p.config.paths.models).unwrap();
    assert_eq!(on_disk, direct);
    assert!(matches!(
        PipelineConfig::from_toml(SMALL, &["grid.train_fraction=1.5".into()]),
        Err(Error::Config(_))
    ));
}
