use std::io::{BufRead, Read, Write};

use crate::classifier::logreg::{LogRegModel, Parameters};
use crate::classifier::standardize::Standardizer;
use crate::error::{Error, Result};
use crate::features::Schema;
use crate::Label;

const MAGIC: &[u8; 8] = b"RWLOGREG";
const VERSION: u32 = 1;
const TEXT_HEADER: &str = "ripwire-logreg 1";

fn put_f64s<W: Write>(w: &mut W, values: &[f64]) -> std::io::Result<()> {
    values.iter().try_for_each(|v| w.write_all(&v.to_le_bytes()))
}

/// Versioned binary: magic, version, class count, dimension, L2 strength,
/// JSON schema descriptor, optional standardization vectors, weights, biases.
pub fn write_model<W: Write>(model: &LogRegModel, mut w: W) -> std::io::Result<()> {
    let schema = serde_json::to_vec(model.schema()).map_err(std::io::Error::other)?;
    let p = model.params();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(Label::COUNT as u32).to_le_bytes())?;
    w.write_all(&(p.dim as u64).to_le_bytes())?;
    w.write_all(&model.l2().to_le_bytes())?;
    w.write_all(&(schema.len() as u32).to_le_bytes())?;
    w.write_all(&schema)?;
    match model.standardizer() {
        Some(s) => {
            w.write_all(&[1])?;
            put_f64s(&mut w, s.mean())?;
            put_f64s(&mut w, s.std())?;
        }
        None => w.write_all(&[0])?,
    }
    put_f64s(&mut w, &p.weights)?;
    put_f64s(&mut w, &p.biases)?;
    w.flush()
}

struct Reader<R>(R);

impl<R: Read> Reader<R> {
    fn bytes(&mut self, n: usize) -> Result<Vec<u8>> {
        let mut buf = vec![0u8; n];
        self.0
            .read_exact(&mut buf)
            .map_err(|e| Error::Format(format!("truncated classifier model: {e}")))?;
        Ok(buf)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.bytes(N)?.try_into().expect("length checked"))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.array().map(f64::from_le_bytes)).collect()
    }
}

pub fn read_model<R: Read>(r: R) -> Result<LogRegModel> {
    let mut r = Reader(r);
    if &r.array::<8>()? != MAGIC {
        return Err(Error::Format("bad magic; not a classifier model".into()));
    }
    let version = u32::from_le_bytes(r.array()?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported classifier model version {version}")));
    }
    let classes = u32::from_le_bytes(r.array()?) as usize;
    if classes != Label::COUNT {
        return Err(Error::Format(format!(
            "model has {classes} classes, expected {}",
            Label::COUNT
        )));
    }
    let dim = u64::from_le_bytes(r.array()?) as usize;
    let l2 = f64::from_le_bytes(r.array()?);
    let schema_len = u32::from_le_bytes(r.array()?) as usize;
    let schema: Schema = serde_json::from_slice(&r.bytes(schema_len)?)
        .map_err(|e| Error::Format(format!("bad schema descriptor: {e}")))?;
    let standardizer = match r.array::<1>()?[0] {
        0 => None,
        1 => {
            let mean = r.f64s(dim)?;
            Some(Standardizer::from_parts(mean, r.f64s(dim)?))
        }
        f => return Err(Error::Format(format!("bad standardizer flag {f}"))),
    };
    let weights = r.f64s(classes * dim)?;
    let b = r.f64s(classes)?;
    let params = Parameters {
        dim,
        weights,
        biases: [b[0], b[1], b[2]],
    };
    LogRegModel::new(schema, standardizer, params, l2)
}

fn write_row<W: Write>(w: &mut W, key: &str, values: &[f64]) -> std::io::Result<()> {
    write!(w, "{key}")?;
    for v in values {
        write!(w, " {v}")?;
    }
    writeln!(w)
}

/// Line-oriented export holding the same information as the binary file.
pub fn write_model_text<W: Write>(model: &LogRegModel, mut w: W) -> std::io::Result<()> {
    let p = model.params();
    writeln!(w, "{TEXT_HEADER}")?;
    writeln!(
        w,
        "schema {}",
        serde_json::to_string(model.schema()).map_err(std::io::Error::other)?
    )?;
    writeln!(w, "l2 {}", model.l2())?;
    if let Some(s) = model.standardizer() {
        write_row(&mut w, "mean", s.mean())?;
        write_row(&mut w, "std", s.std())?;
    }
    write_row(&mut w, "bias", &p.biases)?;
    for label in Label::ALL {
        write_row(&mut w, &format!("weights.{label}"), p.row(label.index()))?;
    }
    w.flush()
}

pub fn read_model_text<R: BufRead>(r: R) -> Result<LogRegModel> {
    let mut schema = None;
    let mut l2 = None;
    let (mut mean, mut std, mut bias) = (None, None, None);
    let mut rows: [Option<Vec<f64>>; Label::COUNT] = Default::default();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io("reading classifier text model", e))?;
        let line_no = i + 1;
        if line_no == 1 {
            if line != TEXT_HEADER {
                return Err(Error::parse(1, format!("expected {TEXT_HEADER:?}")));
            }
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line.as_str(), ""));
        if key == "schema" {
            schema = Some(serde_json::from_str::<Schema>(rest).map_err(|e| Error::parse(line_no, e.to_string()))?);
            continue;
        }
        let values: Vec<f64> = rest
            .split_whitespace()
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::parse(line_no, format!("bad number {s:?}")))
            })
            .collect::<Result<_>>()?;
        match key {
            "l2" => l2 = values.first().copied(),
            "mean" => mean = Some(values),
            "std" => std = Some(values),
            "bias" => bias = Some(values),
            _ => match key.strip_prefix("weights.").map(str::parse::<Label>) {
                Some(Ok(label)) => rows[label.index()] = Some(values),
                _ => return Err(Error::parse(line_no, format!("unknown key {key:?}"))),
            },
        }
    }
    let missing = |what: &str| Error::Format(format!("text model lacks {what}"));
    let schema = schema.ok_or_else(|| missing("schema"))?;
    let bias = bias
        .filter(|b| b.len() == Label::COUNT)
        .ok_or_else(|| missing("three biases"))?;
    let mut weights = Vec::new();
    for row in rows {
        weights.extend(row.ok_or_else(|| missing("a weight row"))?);
    }
    let standardizer = match (mean, std) {
        (Some(m), Some(s)) => Some(Standardizer::from_parts(m, s)),
        (None, None) => None,
        _ => return Err(missing("both mean and std")),
    };
    let params = Parameters {
        dim: schema.len(),
        weights,
        biases: [bias[0], bias[1], bias[2]],
    };
    LogRegModel::new(schema, standardizer, params, l2.ok_or_else(|| missing("l2"))?)
}
