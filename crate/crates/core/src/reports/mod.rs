//! Death-report instances: daily aggregation of matched mentions,
//! thresholding, merging of consecutive days and label suggestion.

mod build;
mod store;

pub use build::{
    aggregate_daily_mentions, coalesce_ambiguous, merge_consecutive_days, report_id, suggest_label,
    suggestion_from_statuses, threshold_filter, BuildSummary, DailyMentions, DayBoundary, DeathReport, ReportBuilder,
    DEFAULT_MENTION_THRESHOLD,
};
pub use store::{write_store, ReportMeta, ReportStore, META_FILE, REPORTS_DIR, TIMELINE_FILE};
