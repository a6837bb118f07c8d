use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::synth::SynthSpec;
use crate::embeddings::SgnsParams;
use crate::error::{Error, IoContext, Result};
use crate::eval::ExperimentGrid;
use crate::reports::DEFAULT_MENTION_THRESHOLD;

/// Artifact locations. Relative paths are resolved against the directory
/// holding the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Raw tweet records.
    pub tweets: PathBuf,
    pub kb: PathBuf,
    /// Sidecar `report_id<TAB>label` file.
    pub labels: PathBuf,
    /// Tweets that passed the upper-case `RIP` filter.
    pub corpus: PathBuf,
    /// `tweet_id<TAB>person_id` pairs.
    pub mentions: PathBuf,
    pub store: PathBuf,
    pub models: PathBuf,
    pub features: PathBuf,
    pub classifiers: PathBuf,
    pub results: PathBuf,
    pub manifests: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            tweets: "data/tweets.jsonl".into(),
            kb: "data/kb.jsonl".into(),
            labels: "data/labels.tsv".into(),
            corpus: "work/corpus.jsonl".into(),
            mentions: "work/mentions.tsv".into(),
            store: "work/store".into(),
            models: "work/models".into(),
            features: "work/features".into(),
            classifiers: "work/classifiers".into(),
            results: "results".into(),
            manifests: "work/manifests".into(),
        }
    }
}

impl Paths {
    pub fn resolve(&self, base: &Path) -> Paths {
        let r = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
        Paths {
            tweets: r(&self.tweets),
            kb: r(&self.kb),
            labels: r(&self.labels),
            corpus: r(&self.corpus),
            mentions: r(&self.mentions),
            store: r(&self.store),
            models: r(&self.models),
            features: r(&self.features),
            classifiers: r(&self.classifiers),
            results: r(&self.results),
            manifests: r(&self.manifests),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportsConfig {
    /// Minimum tweets about one person on one day.
    pub threshold: usize,
}

impl Default for ReportsConfig {
    fn default() -> Self {
        ReportsConfig {
            threshold: DEFAULT_MENTION_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnotateConfig {
    pub port: u16,
    /// Name recorded with imported labels.
    pub annotator: String,
}

impl Default for AnnotateConfig {
    fn default() -> Self {
        AnnotateConfig {
            port: 8080,
            annotator: "import".into(),
        }
    }
}

/// Everything a pipeline run depends on besides its input files.
///
/// `seed` drives generation, embedding training and fold assignment; the
/// seed fields inside `embeddings` and `grid` are replaced by it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: Paths,
    pub reports: ReportsConfig,
    pub synth: SynthSpec,
    pub embeddings: SgnsParams,
    pub grid: ExperimentGrid,
    pub annotate: AnnotateConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 1,
            paths: Paths::default(),
            reports: ReportsConfig::default(),
            synth: SynthSpec::default(),
            embeddings: SgnsParams::default(),
            grid: ExperimentGrid::default(),
            annotate: AnnotateConfig::default(),
        }
    }
}

/// Parse an override value as TOML, falling back to a bare string.
fn override_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Set the dotted `key` in `table`, creating intermediate tables.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override key {key:?} is malformed")));
    }
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override {key:?}: {p:?} is not a table")))?;
    }
    cur.insert(last.to_string(), override_value(raw.trim()));
    Ok(())
}

impl PipelineConfig {
    /// Parse TOML text and apply `key=value` overrides.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<PipelineConfig> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let config: PipelineConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).at(path)?;
        PipelineConfig::from_toml(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reports.threshold == 0 {
            return Err(Error::Config("report threshold must be positive".into()));
        }
        self.synth.validate()?;
        self.grid().validate()
    }

    pub fn sgns(&self) -> SgnsParams {
        SgnsParams {
            seed: self.seed,
            ..self.embeddings
        }
    }

    pub fn grid(&self) -> ExperimentGrid {
        ExperimentGrid {
            seed: self.seed,
            ..self.grid.clone()
        }
    }

    /// SHA-256 of the canonical JSON form, in hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex(&Sha256::digest(json))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_the_default() {
        assert_eq!(PipelineConfig::from_toml("", &[]).unwrap(), PipelineConfig::default());
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let text = "seed = 3\n[synth]\nreports = 900\n";
        let c = PipelineConfig::from_toml(
            text,
            &[
                "synth.reports=300".into(),
                "embeddings.dim = 20".into(),
                "paths.store=elsewhere".into(),
                "grid.buckets=[0, 15]".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.synth.reports, 300);
        assert_eq!(c.embeddings.dim, 20);
        assert_eq!(c.paths.store, PathBuf::from("elsewhere"));
        assert_eq!(c.grid.buckets, vec![0, 15]);
        assert_eq!(c.sgns().seed, 3);
        assert_eq!(c.grid().seed, 3);
    }

    #[test]
    fn bad_input_is_a_config_error() {
        assert!(matches!(
            PipelineConfig::from_toml("colour = 1", &[]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            PipelineConfig::from_toml("", &["seed".into()]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            PipelineConfig::from_toml("seed = 1", &["seed.x=2".into()]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn hash_tracks_content() {
        let a = PipelineConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 2;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
