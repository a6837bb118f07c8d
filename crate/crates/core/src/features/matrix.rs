use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Label;

const KEY_COLUMNS: [&str; 4] = ["report_id", "label", "elapsed", "fraction"];

/// One row of a feature matrix: a report observed at one time and window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub report_id: String,
    pub label: Label,
    pub elapsed: i64,
    pub fraction: f64,
    pub values: Vec<f64>,
}

pub fn write_feature_matrix<'a, W: Write>(
    mut w: W,
    names: &[String],
    rows: impl IntoIterator<Item = &'a FeatureRow>,
) -> Result<()> {
    let io = |e| Error::io("writing feature matrix", e);
    let header: Vec<&str> = KEY_COLUMNS
        .iter()
        .copied()
        .chain(names.iter().map(String::as_str))
        .collect();
    writeln!(w, "{}", header.join("\t")).map_err(io)?;
    for row in rows {
        if row.values.len() != names.len() {
            return Err(Error::SchemaMismatch {
                expected: format!("{} features", names.len()),
                actual: format!("{} features in row {}", row.values.len(), row.report_id),
            });
        }
        write!(w, "{}\t{}\t{}\t{}", row.report_id, row.label, row.elapsed, row.fraction).map_err(io)?;
        for v in &row.values {
            write!(w, "\t{v}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Read a matrix written by [`write_feature_matrix`], returning the feature
/// names and rows.
pub fn read_feature_matrix<R: BufRead>(r: R) -> Result<(Vec<String>, Vec<FeatureRow>)> {
    let mut lines = r.lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| Error::io("reading feature matrix", e))?,
        None => return Err(Error::parse(1, "missing header")),
    };
    let cols: Vec<&str> = header.split('\t').collect();
    if cols.len() < KEY_COLUMNS.len() || cols[..KEY_COLUMNS.len()] != KEY_COLUMNS {
        return Err(Error::parse(1, format!("unexpected header {header:?}")));
    }
    let names: Vec<String> = cols[KEY_COLUMNS.len()..].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line.map_err(|e| Error::io("reading feature matrix", e))?;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != cols.len() {
            return Err(Error::parse(
                line_no,
                format!("expected {} columns, found {}", cols.len(), f.len()),
            ));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::parse(line_no, format!("{s:?}: {e}")))
        };
        rows.push(FeatureRow {
            report_id: f[0].to_string(),
            label: f[1].parse().map_err(|e: Error| Error::parse(line_no, e.to_string()))?,
            elapsed: f[2]
                .parse()
                .map_err(|e| Error::parse(line_no, format!("{:?}: {e}", f[2])))?,
            fraction: num(f[3])?,
            values: f[4..].iter().map(|s| num(s)).collect::<Result<_>>()?,
        });
    }
    Ok((names, rows))
}
