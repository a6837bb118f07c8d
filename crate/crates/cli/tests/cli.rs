use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ripwire(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ripwire"))
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .unwrap()
}

const CONFIG: &str = r#"
seed = 3
[synth]
reports = 60
noise_tweets = 100
minor_people = 5
idle_people = 5
users = 5000
"#;

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), CONFIG).unwrap();

    assert_eq!(ripwire(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(ripwire(dir.path(), &["--help"]).status.code(), Some(0));
    let bad = ripwire(
        dir.path(),
        &["synth", "--config", "c.toml", "--override", "synth.colour=1"],
    );
    assert_eq!(bad.status.code(), Some(1));

    let missing = ripwire(dir.path(), &["link", "--config", "c.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&missing.stderr);
    assert!(stderr.contains("run stage `ingest` first"), "{stderr}");

    let ok = ripwire(
        dir.path(),
        &["synth", "--config", "c.toml", "--override", "synth.reports=40"],
    );
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let labels = fs::read_to_string(dir.path().join("data/labels.tsv")).unwrap();
    assert_eq!(labels.lines().count(), 40);
    assert!(dir.path().join("work/manifests/synth.json").exists());

    assert_eq!(ripwire(dir.path(), &["ingest", "-c", "c.toml"]).status.code(), Some(0));
    fs::write(dir.path().join("data/kb.jsonl"), "{not json\n").unwrap();
    // malformed knowledge-base lines are skipped, so linking still succeeds
    assert_eq!(ripwire(dir.path(), &["link", "-c", "c.toml"]).status.code(), Some(0));

    let grid_missing = ripwire(
        dir.path(),
        &[
            "evaluate", "--grid", "g.conf", "--store", "s", "--models", "m", "--out", "o",
        ],
    );
    assert_eq!(grid_missing.status.code(), Some(2));
}
