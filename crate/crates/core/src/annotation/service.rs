use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::Tweet;
use crate::error::{Error, Result};
use crate::kb::{KbDate, PersonEntry};
use crate::reports::{ReportMeta, ReportStore};
use crate::Label;

use super::log::{replay, AnnotationLog, AnnotationRecord, LogEntry, LogEvent};

pub const LOG_FILE: &str = "annotations.jsonl";
pub const REPORT_PAGE_SIZE: usize = 50;
pub const TWEET_PAGE_SIZE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatusFilter {
    Pending,
    Annotated,
    #[default]
    All,
}

impl std::str::FromStr for StatusFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "" | "all" => Ok(StatusFilter::All),
            "pending" => Ok(StatusFilter::Pending),
            "annotated" => Ok(StatusFilter::Annotated),
            other => Err(Error::Validation(format!("unknown status {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateView {
    pub id: String,
    pub name: String,
    pub description: String,
    /// Death date, or `"alive"` when the knowledge base records none.
    pub death: String,
}

impl From<&PersonEntry> for CandidateView {
    fn from(p: &PersonEntry) -> Self {
        CandidateView {
            id: p.id.clone(),
            name: p.name.clone(),
            description: p.description.clone(),
            death: p.death.as_ref().map_or_else(|| "alive".to_string(), KbDate::to_string),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub report_id: String,
    pub first_day: NaiveDate,
    pub last_day: NaiveDate,
    pub tweet_count: usize,
    pub candidates: Vec<CandidateView>,
    pub suggested_label: Option<Label>,
    pub annotation: Option<AnnotationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page<T> {
    pub items: Vec<T>,
    /// 0-based.
    pub page: usize,
    pub page_size: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportView {
    #[serde(flatten)]
    pub summary: ReportSummary,
    pub tweets: Page<Tweet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ack {
    pub report_id: String,
    pub seq: u64,
    /// An earlier annotation of the same report was superseded.
    pub replaced: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub total: usize,
    pub pending: usize,
    pub annotated: usize,
}

/// Annotation workflow over a report store. Reads run concurrently; writes
/// are serialized through the log.
#[derive(Debug)]
pub struct AnnotationService {
    store: ReportStore,
    /// Report ids ordered by (first day, id).
    order: Vec<String>,
    state: RwLock<State>,
}

#[derive(Debug)]
struct State {
    log: AnnotationLog,
    current: BTreeMap<String, AnnotationRecord>,
}

impl AnnotationService {
    pub fn open(store_dir: impl AsRef<Path>) -> Result<AnnotationService> {
        let store = ReportStore::open(store_dir.as_ref())?;
        let log = AnnotationLog::open(store_dir.as_ref().join(LOG_FILE))?;
        let current = replay(log.entries());
        let mut order: Vec<&ReportMeta> = store.metas().collect();
        order.sort_by(|a, b| (a.first_day(), &a.report_id).cmp(&(b.first_day(), &b.report_id)));
        let order = order.into_iter().map(|m| m.report_id.clone()).collect();
        Ok(AnnotationService {
            store,
            order,
            state: RwLock::new(State { log, current }),
        })
    }

    pub fn store(&self) -> &ReportStore {
        &self.store
    }

    pub fn log_path(&self) -> PathBuf {
        self.read().log.path().to_path_buf()
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, State> {
        self.state.read().unwrap_or_else(|p| p.into_inner())
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, State> {
        self.state.write().unwrap_or_else(|p| p.into_inner())
    }

    pub fn counts(&self) -> Counts {
        let state = self.read();
        let annotated = self.order.iter().filter(|id| state.current.contains_key(*id)).count();
        Counts {
            total: self.order.len(),
            pending: self.order.len() - annotated,
            annotated,
        }
    }

    fn summary(&self, meta: &ReportMeta, state: &State) -> ReportSummary {
        ReportSummary {
            report_id: meta.report_id.clone(),
            first_day: meta.day_span.0,
            last_day: meta.day_span.1,
            tweet_count: meta.tweet_count,
            candidates: meta.candidates.iter().map(CandidateView::from).collect(),
            suggested_label: meta.suggested_label,
            annotation: state.current.get(&meta.report_id).cloned(),
        }
    }

    /// Report summaries matching `status`, `REPORT_PAGE_SIZE` per page,
    /// ordered by first day then report id.
    pub fn list_reports(&self, status: StatusFilter, page: usize) -> Page<ReportSummary> {
        let state = self.read();
        let matching: Vec<&String> = self
            .order
            .iter()
            .filter(|id| match status {
                StatusFilter::All => true,
                StatusFilter::Pending => !state.current.contains_key(*id),
                StatusFilter::Annotated => state.current.contains_key(*id),
            })
            .collect();
        let items = matching
            .iter()
            .skip(page.saturating_mul(REPORT_PAGE_SIZE))
            .take(REPORT_PAGE_SIZE)
            .map(|id| self.summary(self.store.meta(id).expect("ordered ids exist"), &state))
            .collect();
        Page {
            items,
            page,
            page_size: REPORT_PAGE_SIZE,
            total: matching.len(),
        }
    }

    pub fn get_report(&self, report_id: &str, tweet_page: usize) -> Result<ReportView> {
        let meta = self
            .store
            .meta(report_id)
            .ok_or_else(|| Error::NotFound(format!("report {report_id}")))?;
        let timeline = self.store.timeline(report_id)?;
        let summary = self.summary(meta, &self.read());
        let tweets = timeline
            .tweets()
            .iter()
            .skip(tweet_page.saturating_mul(TWEET_PAGE_SIZE))
            .take(TWEET_PAGE_SIZE)
            .cloned()
            .collect();
        Ok(ReportView {
            summary,
            tweets: Page {
                items: tweets,
                page: tweet_page,
                page_size: TWEET_PAGE_SIZE,
                total: timeline.len(),
            },
        })
    }

    fn validate(&self, record: &AnnotationRecord) -> Result<()> {
        let meta = self
            .store
            .meta(&record.report_id)
            .ok_or_else(|| Error::NotFound(format!("report {}", record.report_id)))?;
        if !meta.has_candidate(&record.resolved_person_id) {
            return Err(Error::Validation(format!(
                "person {} is not a candidate of report {}",
                record.resolved_person_id, record.report_id
            )));
        }
        if record.annotator.trim().is_empty() {
            return Err(Error::Validation("annotator name is empty".into()));
        }
        Ok(())
    }

    /// Persist an annotation; a later submission for the same report
    /// supersedes earlier ones, which remain in the log.
    pub fn submit_annotation(&self, record: AnnotationRecord) -> Result<Ack> {
        self.validate(&record)?;
        let mut state = self.write();
        let report_id = record.report_id.clone();
        let seq = state.log.append(LogEvent::Annotate(record.clone()))?.seq;
        let replaced = state.current.insert(report_id.clone(), record).is_some();
        Ok(Ack {
            report_id,
            seq,
            replaced,
        })
    }

    pub fn skip(&self, report_id: &str, annotator: &str, at: i64) -> Result<Ack> {
        self.event(LogEvent::Skip {
            report_id: report_id.to_string(),
            annotator: annotator.to_string(),
            at,
        })
    }

    pub fn retract(&self, report_id: &str, annotator: &str, at: i64) -> Result<Ack> {
        self.event(LogEvent::Retract {
            report_id: report_id.to_string(),
            annotator: annotator.to_string(),
            at,
        })
    }

    fn event(&self, event: LogEvent) -> Result<Ack> {
        let report_id = event.report_id().to_string();
        if self.store.meta(&report_id).is_none() {
            return Err(Error::NotFound(format!("report {report_id}")));
        }
        let retract = matches!(event, LogEvent::Retract { .. });
        let mut state = self.write();
        let seq = state.log.append(event)?.seq;
        let replaced = retract && state.current.remove(&report_id).is_some();
        Ok(Ack {
            report_id,
            seq,
            replaced,
        })
    }

    pub fn log_entries(&self) -> Vec<LogEntry> {
        self.read().log.entries().to_vec()
    }

    pub fn export_labels(&self) -> String {
        let entries = self.log_entries();
        export_labels(self.store.metas(), &entries)
    }
}

/// Labelled dataset as tab-separated text: one row per annotated report in
/// (first day, report id) order, then a per-class summary block.
pub fn export_labels<'a>(metas: impl IntoIterator<Item = &'a ReportMeta>, log: &[LogEntry]) -> String {
    let current = replay(log);
    let mut rows: Vec<(&ReportMeta, &AnnotationRecord)> = metas
        .into_iter()
        .filter_map(|m| current.get(&m.report_id).map(|a| (m, a)))
        .collect();
    rows.sort_by(|a, b| (a.0.first_day(), &a.0.report_id).cmp(&(b.0.first_day(), &b.0.report_id)));

    let mut out = String::from("report_id\tperson_id\tlabel\tfirst_day\ttweet_count\n");
    let mut instances = [0usize; Label::COUNT];
    let mut tweets = [0usize; Label::COUNT];
    for (meta, ann) in &rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            meta.report_id,
            ann.resolved_person_id,
            ann.label,
            meta.first_day(),
            meta.tweet_count
        );
        instances[ann.label.index()] += 1;
        tweets[ann.label.index()] += meta.tweet_count;
    }
    out.push_str("\n# summary\nveracity\tinstances\ttweets\n");
    for label in Label::ALL {
        let _ = writeln!(out, "{label}\t{}\t{}", instances[label.index()], tweets[label.index()]);
    }
    let _ = writeln!(
        out,
        "total\t{}\t{}",
        instances.iter().sum::<usize>(),
        tweets.iter().sum::<usize>()
    );
    out
}

/// One exported row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportRow {
    pub report_id: String,
    pub person_id: String,
    pub label: Label,
    pub first_day: NaiveDate,
    pub tweet_count: usize,
}

/// Parse the rows of an exported dataset, ignoring the summary block.
pub fn parse_export(text: &str) -> Result<Vec<ExportRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() || line.starts_with('#') {
            break;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(Error::parse(i + 1, "expected 5 tab-separated fields"));
        }
        rows.push(ExportRow {
            report_id: f[0].to_string(),
            person_id: f[1].to_string(),
            label: f[2].parse().map_err(|e: Error| Error::parse(i + 1, e.to_string()))?,
            first_day: f[3].parse().map_err(|_| Error::parse(i + 1, "bad first_day"))?,
            tweet_count: f[4].parse().map_err(|_| Error::parse(i + 1, "bad tweet_count"))?,
        });
    }
    Ok(rows)
}
