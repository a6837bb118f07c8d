//! Human annotation of death reports: entity resolution plus a three-way
//! label, recorded in an append-only log next to the report store.

mod log;
mod service;

pub use log::{read_log, replay, AnnotationLog, AnnotationRecord, LogEntry, LogEvent};
pub use service::{
    export_labels, parse_export, Ack, AnnotationService, CandidateView, Counts, ExportRow, Page, ReportSummary,
    ReportView, StatusFilter, LOG_FILE, REPORT_PAGE_SIZE, TWEET_PAGE_SIZE,
};
