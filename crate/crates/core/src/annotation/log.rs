use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, IoContext, Result};
use crate::kb::PersonId;
use crate::Label;

/// An annotator's decision about one report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub report_id: String,
    pub resolved_person_id: PersonId,
    pub label: Label,
    pub annotator: String,
    /// Seconds since the epoch.
    pub annotated_at: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum LogEvent {
    Annotate(AnnotationRecord),
    /// The annotator looked at the report and left it pending.
    Skip {
        report_id: String,
        annotator: String,
        at: i64,
    },
    /// Withdraw the current annotation; the report becomes pending again.
    Retract {
        report_id: String,
        annotator: String,
        at: i64,
    },
}

impl LogEvent {
    pub fn report_id(&self) -> &str {
        match self {
            LogEvent::Annotate(r) => &r.report_id,
            LogEvent::Skip { report_id, .. } | LogEvent::Retract { report_id, .. } => report_id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: u64,
    #[serde(flatten)]
    pub event: LogEvent,
}

/// Current annotation per report after replaying `entries` in order.
pub fn replay<'a>(entries: impl IntoIterator<Item = &'a LogEntry>) -> BTreeMap<String, AnnotationRecord> {
    let mut current = BTreeMap::new();
    for entry in entries {
        match &entry.event {
            LogEvent::Annotate(r) => {
                current.insert(r.report_id.clone(), r.clone());
            }
            LogEvent::Retract { report_id, .. } => {
                current.remove(report_id);
            }
            LogEvent::Skip { .. } => {}
        }
    }
    current
}

/// Append-only JSON-lines log. Each append is flushed and synced before it
/// is acknowledged.
#[derive(Debug)]
pub struct AnnotationLog {
    path: PathBuf,
    file: File,
    entries: Vec<LogEntry>,
}

impl AnnotationLog {
    pub fn open(path: impl Into<PathBuf>) -> Result<AnnotationLog> {
        let path = path.into();
        let entries = if path.exists() {
            let entries = read_log(&path)?;
            drop_torn_tail(&path)?;
            entries
        } else {
            Vec::new()
        };
        let file = OpenOptions::new().create(true).append(true).open(&path).at(&path)?;
        Ok(AnnotationLog { path, file, entries })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn append(&mut self, event: LogEvent) -> Result<&LogEntry> {
        let seq = self.entries.last().map_or(1, |e| e.seq + 1);
        let entry = LogEntry { seq, event };
        let mut line = serde_json::to_vec(&entry).expect("log entry serializes");
        line.push(b'\n');
        self.file.write_all(&line).at(&self.path)?;
        self.file.sync_data().at(&self.path)?;
        self.entries.push(entry);
        Ok(self.entries.last().expect("just pushed"))
    }
}

fn drop_torn_tail(path: &Path) -> Result<()> {
    let bytes = std::fs::read(path).at(path)?;
    let keep = bytes.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
    if keep < bytes.len() {
        let f = OpenOptions::new().write(true).open(path).at(path)?;
        f.set_len(keep as u64).at(path)?;
    }
    Ok(())
}

/// Read a log file. A torn final line (no trailing newline) from an
/// interrupted append is ignored; any other bad line is an error.
pub fn read_log(path: &Path) -> Result<Vec<LogEntry>> {
    let f = File::open(path).at(path)?;
    let mut reader = BufReader::new(f);
    let mut entries = Vec::new();
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if reader.read_line(&mut buf).at(path)? == 0 {
            break;
        }
        line_no += 1;
        let complete = buf.ends_with('\n');
        if buf.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<LogEntry>(buf.trim_end()) {
            Ok(e) => entries.push(e),
            Err(_) if !complete => {
                log::warn!("{}: ignoring torn final line {line_no}", path.display());
            }
            Err(e) => return Err(Error::parse(line_no, format!("{}: {e}", path.display()))),
        }
    }
    Ok(entries)
}
