use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::corpus::{Timeline, Tweet, TweetId};
use crate::kb::{vital_status, PersonEntry, PersonId, VitalStatus};
use crate::Label;

/// Minimum daily mentions for a (person, day) cell to count as a report day.
pub const DEFAULT_MENTION_THRESHOLD: usize = 50;

/// How tweet timestamps map to calendar days.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayBoundary {
    /// Offset added to UTC timestamps before taking the date.
    pub utc_offset_seconds: i64,
}

impl DayBoundary {
    pub fn day_of(&self, timestamp: i64) -> NaiveDate {
        DateTime::from_timestamp(timestamp + self.utc_offset_seconds, 0)
            .expect("timestamp within chrono range")
            .date_naive()
    }
}

/// Tweets mentioning each person, bucketed by calendar day.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DailyMentions {
    cells: BTreeMap<(PersonId, NaiveDate), BTreeMap<TweetId, Tweet>>,
}

impl DailyMentions {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, person: &str, day: NaiveDate) -> Option<&BTreeMap<TweetId, Tweet>> {
        self.cells.get(&(person.to_string(), day))
    }

    pub fn cells(&self) -> impl Iterator<Item = (&PersonId, NaiveDate, &BTreeMap<TweetId, Tweet>)> {
        self.cells.iter().map(|((p, d), t)| (p, *d, t))
    }

    pub fn insert(&mut self, person: PersonId, day: NaiveDate, tweet: Tweet) {
        self.cells.entry((person, day)).or_default().insert(tweet.id, tweet);
    }

    pub fn tweet_total(&self) -> usize {
        self.cells.values().map(BTreeMap::len).sum()
    }
}

pub fn aggregate_daily_mentions<'a>(
    matches: impl IntoIterator<Item = (&'a Tweet, &'a PersonId)>,
    boundary: DayBoundary,
) -> DailyMentions {
    let mut daily = DailyMentions::default();
    for (tweet, person) in matches {
        daily.insert(person.clone(), boundary.day_of(tweet.timestamp), tweet.clone());
    }
    daily
}

/// Keep the cells with at least `threshold` tweets.
pub fn threshold_filter(daily: DailyMentions, threshold: usize) -> DailyMentions {
    DailyMentions {
        cells: daily
            .cells
            .into_iter()
            .filter(|(_, tweets)| !tweets.is_empty() && tweets.len() >= threshold)
            .collect(),
    }
}

/// One person (or set of indistinguishable namesakes) reported dead over a
/// contiguous run of days.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeathReport {
    pub report_id: String,
    pub candidate_person_ids: BTreeSet<PersonId>,
    /// Inclusive.
    pub day_span: (NaiveDate, NaiveDate),
    pub timeline: Timeline,
    pub suggested_label: Option<Label>,
    pub label: Option<Label>,
    pub resolved_person_id: Option<PersonId>,
}

impl DeathReport {
    pub fn first_day(&self) -> NaiveDate {
        self.day_span.0
    }
}

/// Stable identifier of a report: its first day and smallest candidate id.
pub fn report_id(first_day: NaiveDate, candidates: &BTreeSet<PersonId>) -> String {
    let lead = candidates.iter().next().map(String::as_str).unwrap_or("none");
    format!("{first_day}_{lead}")
}

/// Turn per-person runs of consecutive days into reports. A day with no
/// surviving cell ends a run.
pub fn merge_consecutive_days(daily: &DailyMentions) -> Vec<DeathReport> {
    let mut by_person: BTreeMap<&PersonId, Vec<(NaiveDate, &BTreeMap<TweetId, Tweet>)>> = BTreeMap::new();
    for ((person, day), tweets) in &daily.cells {
        by_person.entry(person).or_default().push((*day, tweets));
    }

    let mut reports = Vec::new();
    for (person, days) in by_person {
        // BTreeMap order already sorts days within a person
        let mut run: Vec<(NaiveDate, &BTreeMap<TweetId, Tweet>)> = Vec::new();
        let flush = |run: &mut Vec<(NaiveDate, &BTreeMap<TweetId, Tweet>)>, reports: &mut Vec<DeathReport>| {
            if run.is_empty() {
                return;
            }
            let tweets: Vec<Tweet> = run.iter().flat_map(|(_, t)| t.values().cloned()).collect();
            let candidates = BTreeSet::from([person.clone()]);
            let span = (run[0].0, run[run.len() - 1].0);
            reports.push(DeathReport {
                report_id: report_id(span.0, &candidates),
                candidate_person_ids: candidates,
                day_span: span,
                timeline: Timeline::new(tweets).expect("threshold cells are non-empty"),
                suggested_label: None,
                label: None,
                resolved_person_id: None,
            });
            run.clear();
        };
        for (day, tweets) in days {
            if let Some((last, _)) = run.last() {
                if last.succ_opt() != Some(day) {
                    flush(&mut run, &mut reports);
                }
            }
            run.push((day, tweets));
        }
        flush(&mut run, &mut reports);
    }
    reports
}

/// Combine reports of namesakes that cover exactly the same tweets over the
/// same days into one report with several candidates.
pub fn coalesce_ambiguous(reports: Vec<DeathReport>) -> Vec<DeathReport> {
    let mut groups: BTreeMap<((NaiveDate, NaiveDate), Vec<TweetId>), DeathReport> = BTreeMap::new();
    for report in reports {
        let key = (
            report.day_span,
            report.timeline.tweets().iter().map(|t| t.id).collect::<Vec<_>>(),
        );
        match groups.get_mut(&key) {
            Some(existing) => existing.candidate_person_ids.extend(report.candidate_person_ids),
            None => {
                groups.insert(key, report);
            }
        }
    }
    let mut out: Vec<DeathReport> = groups
        .into_values()
        .map(|mut r| {
            r.report_id = report_id(r.day_span.0, &r.candidate_person_ids);
            r
        })
        .collect();
    out.sort_by(|a, b| (a.day_span.0, &a.report_id).cmp(&(b.day_span.0, &b.report_id)));
    out
}

/// Label proposed to the annotator from the candidates' death dates on the
/// report's first day; `None` when the candidates disagree.
pub fn suggest_label(report: &DeathReport, people: &HashMap<PersonId, PersonEntry>) -> Option<Label> {
    let statuses: Vec<VitalStatus> = report
        .candidate_person_ids
        .iter()
        .map(|id| {
            people
                .get(id)
                .map_or(VitalStatus::AliveOrUnknown, |p| vital_status(p, report.first_day()))
        })
        .collect();
    suggestion_from_statuses(&statuses)
}

pub fn suggestion_from_statuses(statuses: &[VitalStatus]) -> Option<Label> {
    if statuses.is_empty() {
        return None;
    }
    if statuses.contains(&VitalStatus::DiesOn) {
        Some(Label::Real)
    } else if statuses.iter().all(|s| *s == VitalStatus::DeadBefore) {
        Some(Label::Commemoration)
    } else if statuses.iter().all(|s| *s == VitalStatus::AliveOrUnknown) {
        Some(Label::Fake)
    } else {
        None
    }
}

/// Counts gathered while building reports.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildSummary {
    /// (tweet, person) pairs produced by matching.
    pub matched_pairs: usize,
    /// Distinct tweets with at least one match.
    pub matched_tweets: usize,
    /// Distinct tweets that ended up in some report.
    pub retained_tweets: usize,
    pub reports: usize,
    pub people: usize,
}

#[derive(Debug, Clone)]
pub struct ReportBuilder {
    pub threshold: usize,
    pub boundary: DayBoundary,
}

impl Default for ReportBuilder {
    fn default() -> Self {
        ReportBuilder {
            threshold: DEFAULT_MENTION_THRESHOLD,
            boundary: DayBoundary::default(),
        }
    }
}

impl ReportBuilder {
    /// aggregate, threshold, merge, coalesce namesakes, suggest labels
    pub fn build<'a>(
        &self,
        matches: impl IntoIterator<Item = (&'a Tweet, &'a PersonId)>,
        people: &HashMap<PersonId, PersonEntry>,
    ) -> (Vec<DeathReport>, BuildSummary) {
        let mut matched_pairs = 0;
        let mut matched_ids = BTreeSet::new();
        let counted = matches.into_iter().inspect(|(t, _)| {
            matched_pairs += 1;
            matched_ids.insert(t.id);
        });
        let daily = aggregate_daily_mentions(counted, self.boundary);
        let kept = threshold_filter(daily, self.threshold);
        let mut reports = coalesce_ambiguous(merge_consecutive_days(&kept));
        for r in &mut reports {
            r.suggested_label = suggest_label(r, people);
        }
        let retained: BTreeSet<TweetId> = reports
            .iter()
            .flat_map(|r| r.timeline.tweets().iter().map(|t| t.id))
            .collect();
        let people_count = reports
            .iter()
            .flat_map(|r| r.candidate_person_ids.iter())
            .collect::<BTreeSet<_>>()
            .len();
        let summary = BuildSummary {
            matched_pairs,
            matched_tweets: matched_ids.len(),
            retained_tweets: retained.len(),
            reports: reports.len(),
            people: people_count,
        };
        (reports, summary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::KbDate;

    const DAY: i64 = 86_400;
    // 2013-12-05T00:00:00Z
    const D0: i64 = 1_386_201_600;

    fn tweet(id: TweetId, ts: i64) -> Tweet {
        Tweet::new(id, ts, "RIP x")
    }

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn daily_with(counts: &[(&str, i64, usize)]) -> DailyMentions {
        let mut daily = DailyMentions::default();
        let mut id = 0;
        for &(person, day, n) in counts {
            for i in 0..n {
                id += 1;
                daily.insert(
                    person.into(),
                    DayBoundary::default().day_of(D0 + day * DAY),
                    tweet(id, D0 + day * DAY + i as i64),
                );
            }
        }
        daily
    }

    #[test]
    fn grouping_by_person_and_day() {
        let tweets = [tweet(1, D0 + 10), tweet(2, D0 + 20), tweet(3, D0 + 30)];
        let p: PersonId = "8023".into();
        let daily = aggregate_daily_mentions(tweets.iter().map(|t| (t, &p)), DayBoundary::default());
        assert_eq!(daily.len(), 1);
        assert_eq!(daily.get("8023", date("2013-12-05")).unwrap().len(), 3);
    }

    #[test]
    fn ambiguous_tweet_under_both_people() {
        let t = tweet(1, D0);
        let (a, b): (PersonId, PersonId) = ("1".into(), "2".into());
        let daily = aggregate_daily_mentions([(&t, &a), (&t, &b)], DayBoundary::default());
        assert_eq!(daily.len(), 2);
        assert_eq!(daily.tweet_total(), 2);
    }

    #[test]
    fn utc_midnight_splits_days() {
        let (a, b) = (tweet(1, D0 - 60), tweet(2, D0 + 60));
        let p: PersonId = "1".into();
        let daily = aggregate_daily_mentions([(&a, &p), (&b, &p)], DayBoundary::default());
        assert!(daily.get("1", date("2013-12-04")).is_some());
        assert!(daily.get("1", date("2013-12-05")).is_some());
        // with a +2h offset both land on the 5th
        let shifted = aggregate_daily_mentions(
            [(&a, &p), (&b, &p)],
            DayBoundary {
                utc_offset_seconds: 7200,
            },
        );
        assert_eq!(shifted.len(), 1);
    }

    #[test]
    fn threshold_boundaries() {
        let daily = daily_with(&[("a", 0, 50), ("b", 0, 49), ("c", 0, 51)]);
        let kept = threshold_filter(daily, 50);
        let people: Vec<_> = kept.cells().map(|(p, _, _)| p.clone()).collect();
        assert_eq!(people, vec!["a", "c"]);
        assert!(threshold_filter(DailyMentions::default(), 0).is_empty());
    }

    #[test]
    fn runs_split_on_gaps() {
        let daily = daily_with(&[("a", 0, 1), ("a", 1, 1), ("b", 0, 1), ("b", 2, 1), ("c", 5, 2)]);
        let reports = merge_consecutive_days(&daily);
        let spans: Vec<_> = reports
            .iter()
            .map(|r| {
                (
                    r.candidate_person_ids.iter().next().unwrap().clone(),
                    r.day_span,
                    r.timeline.len(),
                )
            })
            .collect();
        let d = |k: i64| date("2013-12-05") + chrono::Duration::days(k);
        assert_eq!(
            spans,
            vec![
                ("a".into(), (d(0), d(1)), 2),
                ("b".into(), (d(0), d(0)), 1),
                ("b".into(), (d(2), d(2)), 1),
                ("c".into(), (d(5), d(5)), 2),
            ]
        );
    }

    #[test]
    fn namesakes_coalesce() {
        let t: Vec<Tweet> = (0..3).map(|i| tweet(i, D0 + i as i64)).collect();
        let (a, b): (PersonId, PersonId) = ("7".into(), "3".into());
        let pairs: Vec<(&Tweet, &PersonId)> = t.iter().flat_map(|x| [(x, &a), (x, &b)]).collect();
        let daily = aggregate_daily_mentions(pairs, DayBoundary::default());
        let reports = coalesce_ambiguous(merge_consecutive_days(&daily));
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].candidate_person_ids.len(), 2);
        assert_eq!(reports[0].report_id, "2013-12-05_3");
    }

    fn person(id: &str, death: Option<&str>) -> PersonEntry {
        PersonEntry {
            id: id.into(),
            name: id.into(),
            aliases: vec![],
            birth: KbDate::parse("1950-01-01", 11).unwrap(),
            death: death.map(|d| KbDate::parse(d, 11).unwrap()),
            description: String::new(),
        }
    }

    fn report_for(candidates: &[&str]) -> DeathReport {
        let c: BTreeSet<PersonId> = candidates.iter().map(|s| s.to_string()).collect();
        DeathReport {
            report_id: report_id(date("2013-12-05"), &c),
            candidate_person_ids: c,
            day_span: (date("2013-12-05"), date("2013-12-05")),
            timeline: Timeline::new(vec![tweet(1, D0)]).unwrap(),
            suggested_label: None,
            label: None,
            resolved_person_id: None,
        }
    }

    #[test]
    fn suggestions() {
        let people: HashMap<PersonId, PersonEntry> = [
            person("mandela", Some("2013-12-05")),
            person("bieber", None),
            person("elvis", Some("1977-08-16")),
        ]
        .into_iter()
        .map(|p| (p.id.clone(), p))
        .collect();
        assert_eq!(suggest_label(&report_for(&["mandela"]), &people), Some(Label::Real));
        assert_eq!(suggest_label(&report_for(&["bieber"]), &people), Some(Label::Fake));
        assert_eq!(
            suggest_label(&report_for(&["elvis"]), &people),
            Some(Label::Commemoration)
        );
        assert_eq!(suggest_label(&report_for(&["elvis", "bieber"]), &people), None);
        assert_eq!(
            suggest_label(&report_for(&["elvis", "mandela"]), &people),
            Some(Label::Real)
        );
    }

    /// Every combination of up to three candidate statuses against the rule table.
    #[test]
    fn suggestion_rule_enumeration() {
        use VitalStatus::*;
        let all = [AliveOrUnknown, DiesOn, DeadBefore];
        let mut combos: Vec<Vec<VitalStatus>> = vec![];
        for n in 1..=3 {
            let mut idx = vec![0usize; n];
            loop {
                combos.push(idx.iter().map(|&i| all[i]).collect());
                let mut k = 0;
                while k < n {
                    idx[k] += 1;
                    if idx[k] < 3 {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
        }
        assert_eq!(combos.len(), 3 + 9 + 27);
        for c in combos {
            let dies = c.iter().filter(|s| **s == DiesOn).count();
            let dead = c.iter().filter(|s| **s == DeadBefore).count();
            let alive = c.iter().filter(|s| **s == AliveOrUnknown).count();
            let want = if dies > 0 {
                Some(Label::Real)
            } else if dead == c.len() {
                Some(Label::Commemoration)
            } else if alive == c.len() {
                Some(Label::Fake)
            } else {
                None
            };
            assert_eq!(suggestion_from_statuses(&c), want, "{c:?}");
        }
    }
}
