//! On-disk report store: `reports/<report_id>/meta` (JSON) and
//! `reports/<report_id>/timeline` (tweet records, one per line).

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{read_tweets, write_tweets, Timeline};
use crate::error::{Error, IoContext, Result};
use crate::kb::{PersonEntry, PersonId};
use crate::Label;

use super::build::{BuildSummary, DeathReport};

pub const REPORTS_DIR: &str = "reports";
pub const META_FILE: &str = "meta";
pub const TIMELINE_FILE: &str = "timeline";
pub const SUMMARY_FILE: &str = "summary.json";

/// Everything about a report except its tweets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub report_id: String,
    pub day_span: (NaiveDate, NaiveDate),
    pub candidates: Vec<PersonEntry>,
    pub suggested_label: Option<Label>,
    /// Labels are recorded in the annotation log; these stay empty unless the
    /// store was written from already-labelled reports.
    pub label: Option<Label>,
    pub resolved_person_id: Option<PersonId>,
    pub tweet_count: usize,
    pub first_timestamp: i64,
}

impl ReportMeta {
    pub fn first_day(&self) -> NaiveDate {
        self.day_span.0
    }

    pub fn has_candidate(&self, id: &str) -> bool {
        self.candidates.iter().any(|c| c.id == id)
    }
}

fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).at(dir)?;
    serde_json::to_writer_pretty(&mut tmp, value).map_err(|e| Error::io(path.display().to_string(), e.into()))?;
    tmp.persist(path)
        .map_err(|e| Error::io(path.display().to_string(), e.error))?;
    Ok(())
}

/// Write `reports` into `root`, replacing any previous report set but
/// leaving other files (the annotation log) alone.
pub fn write_store(
    root: &Path,
    reports: &[DeathReport],
    people: &HashMap<PersonId, PersonEntry>,
    summary: &BuildSummary,
) -> Result<()> {
    fs::create_dir_all(root).at(root)?;
    let staging = tempfile::Builder::new().prefix(".reports-").tempdir_in(root).at(root)?;
    for r in reports {
        let dir = staging.path().join(&r.report_id);
        fs::create_dir(&dir).at(&dir)?;
        let candidates = r
            .candidate_person_ids
            .iter()
            .map(|id| {
                people
                    .get(id)
                    .cloned()
                    .ok_or_else(|| Error::NotFound(format!("person {id} missing from knowledge base")))
            })
            .collect::<Result<Vec<_>>>()?;
        let meta = ReportMeta {
            report_id: r.report_id.clone(),
            day_span: r.day_span,
            candidates,
            suggested_label: r.suggested_label,
            label: r.label,
            resolved_person_id: r.resolved_person_id.clone(),
            tweet_count: r.timeline.len(),
            first_timestamp: r.timeline.t0(),
        };
        let meta_path = dir.join(META_FILE);
        fs::write(&meta_path, serde_json::to_vec_pretty(&meta).expect("meta serializes")).at(&meta_path)?;
        let tl_path = dir.join(TIMELINE_FILE);
        let f = fs::File::create(&tl_path).at(&tl_path)?;
        write_tweets(BufWriter::new(f), r.timeline.tweets()).at(&tl_path)?;
    }
    let target = root.join(REPORTS_DIR);
    if target.exists() {
        fs::remove_dir_all(&target).at(&target)?;
    }
    let staged = staging.keep();
    fs::rename(&staged, &target).at(&target)?;
    write_json_atomic(&root.join(SUMMARY_FILE), summary)
}

/// Read access to a report store.
#[derive(Debug, Clone)]
pub struct ReportStore {
    root: PathBuf,
    metas: BTreeMap<String, ReportMeta>,
}

impl ReportStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<ReportStore> {
        let root = root.into();
        let dir = root.join(REPORTS_DIR);
        let mut metas = BTreeMap::new();
        if dir.exists() {
            for entry in fs::read_dir(&dir).at(&dir)? {
                let entry = entry.at(&dir)?;
                if !entry.file_type().at(&dir)?.is_dir() {
                    continue;
                }
                let path = entry.path().join(META_FILE);
                let bytes = fs::read(&path).at(&path)?;
                let meta: ReportMeta =
                    serde_json::from_slice(&bytes).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
                metas.insert(meta.report_id.clone(), meta);
            }
        } else if !root.exists() {
            return Err(Error::NotFound(format!("report store {}", root.display())));
        }
        Ok(ReportStore { root, metas })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.metas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metas.is_empty()
    }

    pub fn meta(&self, report_id: &str) -> Option<&ReportMeta> {
        self.metas.get(report_id)
    }

    /// Reports in id order.
    pub fn metas(&self) -> impl Iterator<Item = &ReportMeta> {
        self.metas.values()
    }

    pub fn timeline(&self, report_id: &str) -> Result<Timeline> {
        if !self.metas.contains_key(report_id) {
            return Err(Error::NotFound(format!("report {report_id}")));
        }
        let path = self.root.join(REPORTS_DIR).join(report_id).join(TIMELINE_FILE);
        let f = fs::File::open(&path).at(&path)?;
        let read = read_tweets(BufReader::new(f))?;
        if let Some(e) = read.errors.into_iter().next() {
            return Err(Error::Format(format!("{}: {e}", path.display())));
        }
        Timeline::new(read.tweets)
    }

    pub fn summary(&self) -> Result<Option<BuildSummary>> {
        let path = self.root.join(SUMMARY_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let bytes = fs::read(&path).at(&path)?;
        serde_json::from_slice(&bytes)
            .map(Some)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::corpus::Tweet;
    use crate::kb::KbDate;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let person = PersonEntry {
            id: "8023".into(),
            name: "Nelson Mandela".into(),
            aliases: vec!["Madiba".into()],
            birth: KbDate::parse("1918-07-18", 11).unwrap(),
            death: Some(KbDate::parse("2013-12-05", 11).unwrap()),
            description: "x".into(),
        };
        let people = HashMap::from([(person.id.clone(), person.clone())]);
        let day: NaiveDate = "2013-12-05".parse().unwrap();
        let report = DeathReport {
            report_id: "2013-12-05_8023".into(),
            candidate_person_ids: BTreeSet::from(["8023".to_string()]),
            day_span: (day, day),
            timeline: Timeline::new(vec![
                Tweet::new(2, 1_386_201_700, "RIP Madiba"),
                Tweet::new(1, 1_386_201_600, "RIP Nelson Mandela"),
            ])
            .unwrap(),
            suggested_label: Some(Label::Real),
            label: None,
            resolved_person_id: None,
        };
        write_store(dir.path(), &[report.clone()], &people, &BuildSummary::default()).unwrap();
        // rewriting replaces the set
        write_store(dir.path(), &[report.clone()], &people, &BuildSummary::default()).unwrap();
        let store = ReportStore::open(dir.path()).unwrap();
        assert_eq!(store.len(), 1);
        let meta = store.meta("2013-12-05_8023").unwrap();
        assert_eq!(meta.candidates, vec![person]);
        assert_eq!(meta.tweet_count, 2);
        assert_eq!(store.timeline("2013-12-05_8023").unwrap(), report.timeline);
        assert!(matches!(store.timeline("nope"), Err(Error::NotFound(_))));
        assert!(dir.path().join("reports/2013-12-05_8023/meta").is_file());
        assert!(dir.path().join("reports/2013-12-05_8023/timeline").is_file());
    }
}
