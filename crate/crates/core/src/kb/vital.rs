use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::entry::PersonEntry;

/// Days of slack when matching a tweet day against a day-precision death
/// date; absorbs the offset between UTC tweet days and local death dates.
pub const DIES_ON_TOLERANCE_DAYS: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VitalStatus {
    AliveOrUnknown,
    DiesOn,
    DeadBefore,
}

/// Whether `person` is alive, dies, or was already dead on `day`.
///
/// Dates coarser than a day are compared as intervals: a day inside the
/// interval is `DiesOn`, a day after it `DeadBefore`.
pub fn vital_status(person: &PersonEntry, day: NaiveDate) -> VitalStatus {
    let Some(death) = person.death else {
        return VitalStatus::AliveOrUnknown;
    };
    let Ok((start, end)) = death.interval() else {
        return VitalStatus::AliveOrUnknown;
    };
    let tol = chrono::Duration::days(DIES_ON_TOLERANCE_DAYS);
    let (start, end) = if death.precision == super::entry::PRECISION_DAY {
        (start - tol, end + tol)
    } else {
        (start, end)
    };
    if day < start {
        VitalStatus::AliveOrUnknown
    } else if day <= end {
        VitalStatus::DiesOn
    } else {
        VitalStatus::DeadBefore
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::entry::KbDate;

    fn with_death(death: Option<KbDate>) -> PersonEntry {
        PersonEntry {
            id: "8023".into(),
            name: "Nelson Mandela".into(),
            aliases: vec![],
            birth: KbDate::parse("1918-07-18", 11).unwrap(),
            death,
            description: String::new(),
        }
    }

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn mandela_and_alive() {
        let m = with_death(Some(KbDate::parse("2013-12-05", 11).unwrap()));
        assert_eq!(vital_status(&m, d("2013-12-05")), VitalStatus::DiesOn);
        assert_eq!(vital_status(&m, d("2014-12-05")), VitalStatus::DeadBefore);
        let alive = with_death(None);
        assert_eq!(vital_status(&alive, d("2014-01-01")), VitalStatus::AliveOrUnknown);
    }

    /// Hand-built table of (death, precision, day, expected).
    #[test]
    fn date_comparison_table() {
        use VitalStatus::*;
        let table: &[(&str, u8, &str, VitalStatus)] = &[
            ("2013-12-05", 11, "2013-12-03", AliveOrUnknown),
            ("2013-12-05", 11, "2013-12-04", DiesOn),
            ("2013-12-05", 11, "2013-12-05", DiesOn),
            ("2013-12-05", 11, "2013-12-06", DiesOn),
            ("2013-12-05", 11, "2013-12-07", DeadBefore),
            ("2013-12-05", 11, "2014-12-05", DeadBefore),
            ("2013-12-05", 11, "2012-12-05", AliveOrUnknown),
            ("2013-12-05", 11, "1918-07-18", AliveOrUnknown),
            ("2013-12-31", 11, "2014-01-01", DiesOn),
            ("2013-12-31", 11, "2014-01-02", DeadBefore),
            ("2014-01-01", 11, "2013-12-31", DiesOn),
            ("2014-01-01", 11, "2013-12-30", AliveOrUnknown),
            ("2012-02-29", 11, "2012-03-01", DiesOn),
            ("2012-02-29", 11, "2012-03-02", DeadBefore),
            ("2012-02-29", 11, "2012-02-27", AliveOrUnknown),
            ("2013-12-00", 10, "2013-11-30", AliveOrUnknown),
            ("2013-12-00", 10, "2013-12-01", DiesOn),
            ("2013-12-00", 10, "2013-12-31", DiesOn),
            ("2013-12-00", 10, "2014-01-01", DeadBefore),
            ("2012-02-00", 10, "2012-02-29", DiesOn),
            ("2012-02-00", 10, "2012-03-01", DeadBefore),
            ("2013-00-00", 9, "2012-12-31", AliveOrUnknown),
            ("2013-00-00", 9, "2013-01-01", DiesOn),
            ("2013-00-00", 9, "2013-12-31", DiesOn),
            ("2013-00-00", 9, "2014-01-01", DeadBefore),
            ("1995-00-00", 8, "1999-12-31", DiesOn),
            ("1995-00-00", 8, "2000-01-01", DeadBefore),
            ("1995-00-00", 8, "1989-12-31", AliveOrUnknown),
            ("1850-00-00", 7, "2013-01-01", DeadBefore),
            ("1850-00-00", 7, "1800-01-01", DiesOn),
        ];
        assert_eq!(table.len(), 30);
        for &(death, prec, day, want) in table {
            let p = with_death(Some(KbDate::parse(death, prec).unwrap()));
            assert_eq!(vital_status(&p, d(day)), want, "{death}/{prec} on {day}");
        }
    }

    #[test]
    fn monotone_once_dead() {
        let p = with_death(Some(KbDate::parse("2013-12-05", 11).unwrap()));
        let mut day = d("2013-11-01");
        let mut dead = false;
        for _ in 0..120 {
            let s = vital_status(&p, day);
            if dead {
                assert_eq!(s, VitalStatus::DeadBefore);
            }
            dead |= s == VitalStatus::DeadBefore;
            day = day.succ_opt().unwrap();
        }
        assert!(dead);
    }
}
