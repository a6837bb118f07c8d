use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::eval::grid::CellKey;
use crate::eval::metrics::Scores;
use crate::eval::run::{CellResult, ResultTable};
use crate::features::FeatureSet;
use crate::Label;

const TSV_HEADER: &str = "feature_set\tbucket_minutes\tfraction\tfold\tf1_real\tf1_commemoration\tf1_fake\tmacro_f1";
const MEAN_FOLD: &str = "mean";

/// Machine-readable results: one row per fold plus a `mean` row per cell.
pub fn results_to_tsv(table: &ResultTable) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for cell in &table.cells {
        let k = &cell.key;
        let rows = cell.folds.iter().enumerate().map(|(i, s)| (i.to_string(), s));
        for (fold, s) in rows.chain(std::iter::once((MEAN_FOLD.to_string(), &cell.mean))) {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                k.feature_set,
                k.bucket_minutes,
                k.fraction,
                fold,
                s.per_class[0],
                s.per_class[1],
                s.per_class[2],
                s.macro_f1
            );
        }
    }
    out
}

pub fn results_from_tsv(text: &str) -> Result<ResultTable> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TSV_HEADER => {}
        _ => return Err(Error::parse(1, "missing results header")),
    }
    let mut cells: Vec<CellResult> = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 8 {
            return Err(Error::parse(line_no, format!("expected 8 columns, found {}", f.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::parse(line_no, format!("{s:?}: {e}")))
        };
        let key = CellKey {
            feature_set: f[0].parse().map_err(|e: Error| Error::parse(line_no, e.to_string()))?,
            bucket_minutes: f[1]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad bucket {:?}", f[1])))?,
            fraction: num(f[2])?,
        };
        let scores = Scores {
            per_class: [num(f[4])?, num(f[5])?, num(f[6])?],
            macro_f1: num(f[7])?,
        };
        if cells.last().is_none_or(|c| c.key != key) {
            cells.push(CellResult {
                key,
                folds: Vec::new(),
                mean: Scores {
                    per_class: [0.0; 3],
                    macro_f1: 0.0,
                },
            });
        }
        let cell = cells.last_mut().expect("pushed above");
        if f[3] == MEAN_FOLD {
            cell.mean = scores;
        } else {
            let fold: usize = f[3]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad fold {:?}", f[3])))?;
            if fold != cell.folds.len() {
                return Err(Error::parse(line_no, format!("fold {fold} out of order")));
            }
            cell.folds.push(scores);
        }
    }
    Ok(ResultTable { cells })
}

fn fmt_score(v: f64) -> String {
    format!("{v:.3}")
}

/// Rows of labelled values over bucket columns; every column maximum
/// (compared as printed) is marked with `*`.
fn render(title: &str, row_header: &str, buckets: &[u32], rows: &[(String, BTreeMap<u32, f64>)]) -> String {
    let mut best: BTreeMap<u32, String> = BTreeMap::new();
    for b in buckets {
        let top = rows
            .iter()
            .filter_map(|(_, vals)| vals.get(b))
            .map(|v| fmt_score(*v))
            .max_by(|x, y| {
                x.parse::<f64>()
                    .unwrap_or(0.0)
                    .total_cmp(&y.parse::<f64>().unwrap_or(0.0))
            });
        if let Some(t) = top {
            best.insert(*b, t);
        }
    }
    let label_width = rows
        .iter()
        .map(|(l, _)| l.len())
        .chain([row_header.len()])
        .max()
        .unwrap_or(0);
    let mut out = format!("{title}\n{row_header:<label_width$}");
    for b in buckets {
        let _ = write!(out, " {:>7}", format!("{b}m"));
    }
    out.push('\n');
    for (label, vals) in rows {
        let _ = write!(out, "{label:<label_width$}");
        for b in buckets {
            let cell = match vals.get(b) {
                Some(v) => {
                    let s = fmt_score(*v);
                    if best.get(b) == Some(&s) {
                        format!("{s}*")
                    } else {
                        s
                    }
                }
                None => "-".to_string(),
            };
            let _ = write!(out, " {cell:>7}");
        }
        out.push('\n');
    }
    out
}

/// Aligned text tables: macro-F1 by feature set, per-class F1 by feature
/// set, and macro-F1 by window fraction.
pub fn results_to_text(table: &ResultTable) -> String {
    let buckets: Vec<u32> = table
        .cells
        .iter()
        .map(|c| c.key.bucket_minutes)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let full: Vec<&CellResult> = table.cells.iter().filter(|c| c.key.fraction == 1.0).collect();
    let sets: Vec<FeatureSet> = full
        .iter()
        .map(|c| c.key.feature_set)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let by_set = |value: &dyn Fn(&Scores) -> f64| -> Vec<(String, BTreeMap<u32, f64>)> {
        sets.iter()
            .map(|s| {
                let vals = full
                    .iter()
                    .filter(|c| c.key.feature_set == *s)
                    .map(|c| (c.key.bucket_minutes, value(&c.mean)))
                    .collect();
                (s.to_string(), vals)
            })
            .collect()
    };

    let mut out = render(
        "Macro-averaged F1 (full window)",
        "features",
        &buckets,
        &by_set(&|s| s.macro_f1),
    );
    for label in Label::ALL {
        out.push('\n');
        let title = format!("F1 for {label} (full window)");
        out.push_str(&render(
            &title,
            "features",
            &buckets,
            &by_set(&|s| s.per_class[label.index()]),
        ));
    }

    let windowed: BTreeSet<FeatureSet> = table
        .cells
        .iter()
        .filter(|c| c.key.fraction < 1.0)
        .map(|c| c.key.feature_set)
        .collect();
    for set in windowed {
        let mut rows: BTreeMap<u64, (String, BTreeMap<u32, f64>)> = BTreeMap::new();
        for c in table.cells.iter().filter(|c| c.key.feature_set == set) {
            rows.entry(c.key.fraction.to_bits())
                .or_insert_with(|| (format!("p={}", c.key.fraction), BTreeMap::new()))
                .1
                .insert(c.key.bucket_minutes, c.mean.macro_f1);
        }
        out.push('\n');
        let rows: Vec<_> = rows.into_values().collect();
        out.push_str(&render(
            &format!("Macro-averaged F1 by window fraction ({set})"),
            "window",
            &buckets,
            &rows,
        ));
    }
    out
}

/// TSV and text renderings of a result table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub tsv: String,
    pub text: String,
}

pub fn emit_report(table: &ResultTable) -> Report {
    Report {
        tsv: results_to_tsv(table),
        text: results_to_text(table),
    }
}
