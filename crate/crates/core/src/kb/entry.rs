use std::fmt;
use std::io::BufRead;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type PersonId = String;

/// Day-level precision code.
pub const PRECISION_DAY: u8 = 11;
pub const PRECISION_MONTH: u8 = 10;
pub const PRECISION_YEAR: u8 = 9;

/// A knowledge-base date: year/month/day plus a precision code (0-11).
///
/// Components finer than the precision may be zero, as in the dump format
/// (`1850-00-00` with precision 9).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KbDate {
    pub year: i32,
    pub month: u8,
    pub day: u8,
    pub precision: u8,
}

impl KbDate {
    pub fn from_ymd(date: NaiveDate) -> KbDate {
        KbDate {
            year: date.year(),
            month: date.month() as u8,
            day: date.day() as u8,
            precision: PRECISION_DAY,
        }
    }

    pub fn parse(text: &str, precision: u8) -> Result<KbDate, String> {
        if precision > PRECISION_DAY {
            return Err(format!("precision {precision} out of range 0-11"));
        }
        let (negative, body) = match text.as_bytes().first() {
            Some(b'-') => (true, &text[1..]),
            Some(b'+') => (false, &text[1..]),
            _ => (false, text),
        };
        let mut parts = body.splitn(3, '-');
        let mut next = |what: &str| -> Result<i64, String> {
            parts
                .next()
                .ok_or_else(|| format!("date {text:?} lacks a {what}"))?
                .parse::<i64>()
                .map_err(|_| format!("date {text:?} has a non-numeric {what}"))
        };
        let year = next("year")?;
        let month = next("month")?;
        let day = next("day")?;
        let year =
            i32::try_from(if negative { -year } else { year }).map_err(|_| format!("year out of range in {text:?}"))?;
        if !(0..=12).contains(&month) || !(0..=31).contains(&day) {
            return Err(format!("invalid month/day in {text:?}"));
        }
        let date = KbDate {
            year,
            month: month as u8,
            day: day as u8,
            precision,
        };
        date.interval()?;
        Ok(date)
    }

    /// Inclusive calendar interval covered by this date at its precision.
    pub fn interval(&self) -> Result<(NaiveDate, NaiveDate), String> {
        let bad = || format!("invalid date {self}");
        match self.precision {
            PRECISION_DAY => {
                let d = NaiveDate::from_ymd_opt(self.year, self.month.into(), self.day.into()).ok_or_else(bad)?;
                Ok((d, d))
            }
            PRECISION_MONTH => {
                let start = NaiveDate::from_ymd_opt(self.year, self.month.into(), 1).ok_or_else(bad)?;
                let end = start
                    .checked_add_months(chrono::Months::new(1))
                    .and_then(|d| d.pred_opt())
                    .ok_or_else(bad)?;
                Ok((start, end))
            }
            p => {
                // precision 9 is a year, 8 a decade, 7 a century and so on
                let span = 10i64.pow(u32::from(PRECISION_YEAR - p));
                let first = i64::from(self.year).div_euclid(span) * span;
                let last = first + span - 1;
                let clamp = |y: i64| y.clamp(i64::from(NaiveDate::MIN.year()), i64::from(NaiveDate::MAX.year())) as i32;
                let start = NaiveDate::from_ymd_opt(clamp(first), 1, 1).unwrap_or(NaiveDate::MIN);
                let end = NaiveDate::from_ymd_opt(clamp(last), 12, 31).unwrap_or(NaiveDate::MAX);
                Ok((start, end))
            }
        }
    }
}

impl fmt::Display for KbDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.year < 0 {
            write!(f, "-{:04}-{:02}-{:02}", -i64::from(self.year), self.month, self.day)
        } else {
            write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
        }
    }
}

/// A person record from the knowledge base.
///
/// Serializes to the dump schema; deserializing a record without a birth
/// date fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEntry", into = "RawEntry")]
pub struct PersonEntry {
    pub id: PersonId,
    pub name: String,
    pub aliases: Vec<String>,
    pub birth: KbDate,
    pub death: Option<KbDate>,
    pub description: String,
}

impl PersonEntry {
    /// Name followed by aliases.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.name.as_str()).chain(self.aliases.iter().map(String::as_str))
    }
}

#[derive(Clone, Serialize, Deserialize)]
struct RawDate {
    date: Value,
    #[serde(default)]
    precision: Option<u8>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawEntry {
    id: Value,
    #[serde(default)]
    name: String,
    #[serde(default)]
    birth: Option<RawDate>,
    #[serde(default)]
    death: Option<RawDate>,
    #[serde(default)]
    description: String,
    #[serde(default)]
    aliases: Vec<String>,
}

fn raw_date(raw: &RawDate) -> Result<Option<KbDate>, String> {
    let text = match &raw.date {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Null => return Ok(None),
        other => return Err(format!("unexpected date value {other}")),
    };
    // "0" is how the dump marks a person with no recorded death
    if text.trim().is_empty() || text.trim() == "0" {
        return Ok(None);
    }
    KbDate::parse(text.trim(), raw.precision.unwrap_or(PRECISION_DAY)).map(Some)
}

fn convert(raw: RawEntry) -> Result<Option<PersonEntry>, String> {
    let id = match raw.id {
        Value::String(s) if !s.is_empty() => s,
        Value::Number(n) => n.to_string(),
        other => return Err(format!("invalid id {other}")),
    };
    let Some(birth) = raw.birth.as_ref().map(raw_date).transpose()?.flatten() else {
        return Ok(None);
    };
    let death = raw.death.as_ref().map(raw_date).transpose()?.flatten();
    if let Some(d) = death {
        if d.precision == PRECISION_DAY && birth.precision == PRECISION_DAY {
            if d.interval()?.0 < birth.interval()?.0 {
                return Err(format!("person {id} dies before being born"));
            }
        }
    }
    Ok(Some(PersonEntry {
        id,
        name: raw.name,
        aliases: raw.aliases,
        birth,
        death,
        description: raw.description,
    }))
}

impl TryFrom<RawEntry> for PersonEntry {
    type Error = String;

    fn try_from(raw: RawEntry) -> Result<Self, String> {
        convert(raw)?.ok_or_else(|| "person entry without birth date".to_string())
    }
}

impl From<PersonEntry> for RawEntry {
    fn from(entry: PersonEntry) -> RawEntry {
        let date = |d: &KbDate| RawDate {
            date: Value::String(d.to_string()),
            precision: Some(d.precision),
        };
        RawEntry {
            id: Value::String(entry.id),
            name: entry.name,
            birth: Some(date(&entry.birth)),
            death: entry.death.as_ref().map(date),
            description: entry.description,
            aliases: entry.aliases,
        }
    }
}

/// Parse one dump record. Records without a birth date are not people and
/// yield `Ok(None)`.
pub fn parse_person_entry(record: &str, line_no: usize) -> Result<Option<PersonEntry>> {
    let raw: RawEntry = serde_json::from_str(record.trim_end()).map_err(|e| Error::parse(line_no, e.to_string()))?;
    convert(raw).map_err(|m| Error::parse(line_no, m))
}

pub fn serialize_person_entry(entry: &PersonEntry) -> String {
    serde_json::to_string(entry).expect("entry serialization is infallible")
}

#[derive(Debug, Default)]
pub struct KbReadReport {
    pub entries: Vec<PersonEntry>,
    /// Records skipped because they carry no birth date.
    pub non_person: usize,
    pub errors: Vec<Error>,
}

pub fn read_person_entries<R: BufRead>(reader: R) -> Result<KbReadReport> {
    let mut out = KbReadReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading kb line {}", i + 1), e))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_person_entry(&line, i + 1) {
            Ok(Some(e)) => out.entries.push(e),
            Ok(None) => out.non_person += 1,
            Err(e) => out.errors.push(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MANDELA: &str = r#"{"id":"8023","name":"Nelson Mandela","birth":{"date":"1918-07-18","precision":11},"death":{"date":"2013-12-05","precision":11},"description":"former President of South Africa, anti-apartheid activist","aliases":["Nelson Rolihlahla Mandela","Mandela","Madiba"]}"#;

    #[test]
    fn parses_mandela() {
        let e = parse_person_entry(MANDELA, 1).unwrap().unwrap();
        assert_eq!(e.id, "8023");
        assert_eq!(e.name, "Nelson Mandela");
        let death = e.death.unwrap();
        assert_eq!((death.year, death.month, death.day, death.precision), (2013, 12, 5, 11));
        assert!(e.aliases.iter().any(|a| a == "Madiba"));
        assert_eq!(parse_person_entry(&serialize_person_entry(&e), 1).unwrap().unwrap(), e);
    }

    #[test]
    fn no_birth_is_not_a_person() {
        let rec = r#"{"id":"1","name":"Rock band","description":"band","aliases":[]}"#;
        assert_eq!(parse_person_entry(rec, 1).unwrap(), None);
    }

    #[test]
    fn death_zero_means_alive() {
        let rec = r#"{"id":"34086","name":"Justin Bieber","birth":{"date":"1994-03-01","precision":11},"death":{"date":"0","precision":0},"description":"Canadian singer","aliases":[]}"#;
        let e = parse_person_entry(rec, 1).unwrap().unwrap();
        assert_eq!(e.death, None);
        let rec = r#"{"id":"34086","name":"J","birth":{"date":"1994-03-01","precision":11},"death":{"date":0}}"#;
        assert_eq!(parse_person_entry(rec, 1).unwrap().unwrap().death, None);
    }

    #[test]
    fn malformed_records() {
        for bad in [
            "{",
            r#"{"id":"1","birth":{"date":"1990-13-01","precision":11}}"#,
            r#"{"id":"1","birth":{"date":"1990-02-30","precision":11}}"#,
            r#"{"id":"1","birth":{"date":"abc","precision":11}}"#,
            r#"{"id":"1","birth":{"date":"1990-01-01","precision":12}}"#,
            r#"{"id":"1","birth":{"date":"1990-01-01","precision":11},"death":{"date":"1980-01-01","precision":11}}"#,
            r#"{"id":null,"birth":{"date":"1990-01-01","precision":11}}"#,
        ] {
            assert!(
                matches!(parse_person_entry(bad, 4), Err(Error::Parse { line: 4, .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn coarse_precision_intervals() {
        let y = KbDate::parse("1850-00-00", 9).unwrap();
        let (a, b) = y.interval().unwrap();
        assert_eq!(
            (a.to_string(), b.to_string()),
            ("1850-01-01".into(), "1850-12-31".into())
        );
        let m = KbDate::parse("2012-02-00", 10).unwrap();
        assert_eq!(m.interval().unwrap().1.to_string(), "2012-02-29");
        let c = KbDate::parse("1456-00-00", 7).unwrap();
        let (a, b) = c.interval().unwrap();
        assert_eq!((a.year(), b.year()), (1400, 1499));
        let neg = KbDate::parse("-0044-03-15", 11).unwrap();
        assert_eq!(neg.year, -44);
        assert_eq!(neg.to_string(), "-0044-03-15");
    }
}
