use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::Tweet;
use crate::error::{Error, Result};

use super::sgns::SgnsParams;
use super::tokenize::tokenize;
use super::vocab::Vocabulary;

const MAGIC: &[u8; 8] = b"RWEMBED\0";
const VERSION: u32 = 1;

/// What a model was trained on; checked by the leakage guard.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusProvenance {
    pub tweets: u64,
    pub tokens: u64,
    /// Timestamp range of the training tweets, if known.
    pub time_range: Option<(i64, i64)>,
}

impl CorpusProvenance {
    pub fn from_tweets<'a>(tweets: impl IntoIterator<Item = &'a Tweet>, tokens: u64) -> Self {
        let mut n = 0;
        let mut range: Option<(i64, i64)> = None;
        for t in tweets {
            n += 1;
            range = Some(match range {
                None => (t.timestamp, t.timestamp),
                Some((lo, hi)) => (lo.min(t.timestamp), hi.max(t.timestamp)),
            });
        }
        CorpusProvenance {
            tweets: n,
            tokens,
            time_range: range,
        }
    }
}

/// Dense word vectors with their vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    vocab: Vocabulary,
    dim: usize,
    /// Row-major `vocab.len() x dim`.
    vectors: Vec<f32>,
    pub params: SgnsParams,
    pub provenance: CorpusProvenance,
}

impl EmbeddingModel {
    pub fn new(
        vocab: Vocabulary,
        dim: usize,
        vectors: Vec<f32>,
        params: SgnsParams,
        provenance: CorpusProvenance,
    ) -> Result<EmbeddingModel> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        if vectors.len() != vocab.len() * dim {
            return Err(Error::Format(format!(
                "{} values for {} tokens of dimension {dim}",
                vectors.len(),
                vocab.len()
            )));
        }
        if vectors.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite embedding value".into()));
        }
        Ok(EmbeddingModel {
            vocab,
            dim,
            vectors,
            params,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn row(&self, idx: u32) -> &[f32] {
        let start = idx as usize * self.dim;
        &self.vectors[start..start + self.dim]
    }

    pub fn vector(&self, token: &str) -> Option<&[f32]> {
        self.vocab.get(token).map(|i| self.row(i))
    }

    pub fn vectors(&self) -> &[f32] {
        &self.vectors
    }

    /// Multiply every vector by `c`.
    pub fn scaled(&self, c: f32) -> EmbeddingModel {
        let mut m = self.clone();
        m.vectors.iter_mut().for_each(|v| *v *= c);
        m
    }

    /// Mean of the in-vocabulary token vectors, accumulated into `out`
    /// (which must hold `dim` values). Returns false, leaving `out` zero,
    /// when no token is known.
    pub fn embed_tokens_into<S: AsRef<str>>(&self, tokens: &[S], out: &mut [f64]) -> bool {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut n = 0usize;
        for tok in tokens {
            if let Some(i) = self.vocab.get(tok.as_ref()) {
                for (o, v) in out.iter_mut().zip(self.row(i)) {
                    *o += f64::from(*v);
                }
                n += 1;
            }
        }
        if n == 0 {
            return false;
        }
        let inv = 1.0 / n as f64;
        out.iter_mut().for_each(|v| *v *= inv);
        true
    }

    pub fn embed_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.embed_tokens_into(tokens, &mut out);
        out
    }

    /// Average of the tweet's in-vocabulary word vectors; zero when every
    /// word is out of vocabulary.
    pub fn embed_tweet(&self, tweet: &Tweet) -> Vec<f64> {
        self.embed_tokens(&tokenize(&tweet.text))
    }

    /// Average of the tweet vectors (all-OOV tweets count as zero vectors).
    pub fn embed_timeline(&self, tweets: &[Tweet]) -> Result<Vec<f64>> {
        if tweets.is_empty() {
            return Err(Error::Precondition("cannot embed an empty timeline".into()));
        }
        let mut acc = vec![0.0; self.dim];
        let mut buf = vec![0.0; self.dim];
        for t in tweets {
            if self.embed_tokens_into(&tokenize(&t.text), &mut buf) {
                acc.iter_mut().zip(&buf).for_each(|(a, b)| *a += b);
            }
        }
        let inv = 1.0 / tweets.len() as f64;
        acc.iter_mut().for_each(|v| *v *= inv);
        Ok(acc)
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let p = &self.params;
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.vocab.len() as u64).to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(p.window as u32).to_le_bytes())?;
        w.write_all(&(p.negatives as u32).to_le_bytes())?;
        w.write_all(&(p.epochs as u32).to_le_bytes())?;
        w.write_all(&p.learning_rate.to_le_bytes())?;
        w.write_all(&p.min_count.to_le_bytes())?;
        w.write_all(&p.seed.to_le_bytes())?;
        let prov = &self.provenance;
        w.write_all(&prov.tweets.to_le_bytes())?;
        w.write_all(&prov.tokens.to_le_bytes())?;
        match prov.time_range {
            Some((lo, hi)) => {
                w.write_all(&[1])?;
                w.write_all(&lo.to_le_bytes())?;
                w.write_all(&hi.to_le_bytes())?;
            }
            None => w.write_all(&[0; 17])?,
        }
        for (tok, count) in self.vocab.iter() {
            w.write_all(&(tok.len() as u32).to_le_bytes())?;
            w.write_all(tok.as_bytes())?;
            w.write_all(&count.to_le_bytes())?;
        }
        for v in &self.vectors {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<EmbeddingModel> {
        let mut magic = [0u8; 8];
        read_exact(&mut r, &mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic; not an embedding model".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported embedding model version {version}")));
        }
        let v = read_u64(&mut r)? as usize;
        let dim = read_u32(&mut r)? as usize;
        let params = SgnsParams {
            dim,
            window: read_u32(&mut r)? as usize,
            negatives: read_u32(&mut r)? as usize,
            epochs: read_u32(&mut r)? as usize,
            learning_rate: f64::from_le_bytes(read_array(&mut r)?),
            min_count: read_u64(&mut r)?,
            seed: read_u64(&mut r)?,
        };
        let tweets = read_u64(&mut r)?;
        let tokens = read_u64(&mut r)?;
        let flag: [u8; 1] = read_array(&mut r)?;
        let lo = i64::from_le_bytes(read_array(&mut r)?);
        let hi = i64::from_le_bytes(read_array(&mut r)?);
        let provenance = CorpusProvenance {
            tweets,
            tokens,
            time_range: (flag[0] == 1).then_some((lo, hi)),
        };
        let mut pairs = Vec::with_capacity(v);
        for _ in 0..v {
            let len = read_u32(&mut r)? as usize;
            let mut bytes = vec![0u8; len];
            read_exact(&mut r, &mut bytes)?;
            let tok = String::from_utf8(bytes).map_err(|_| Error::Format("token is not UTF-8".into()))?;
            pairs.push((tok, read_u64(&mut r)?));
        }
        let mut vectors = Vec::with_capacity(v * dim);
        for _ in 0..v * dim {
            vectors.push(f32::from_le_bytes(read_array(&mut r)?));
        }
        let vocab = Vocabulary::from_counts(pairs, params.min_count);
        if vocab.len() != v {
            return Err(Error::Format("duplicate token in vocabulary table".into()));
        }
        EmbeddingModel::new(vocab, dim, vectors, params, provenance)
    }

    /// Plain-text interchange: a `V d` header, then one token and its `d`
    /// values per line.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.vocab.len(), self.dim)?;
        for i in 0..self.vocab.len() as u32 {
            write!(w, "{}", self.vocab.token(i))?;
            for v in self.row(i) {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    }

    /// Read the text format. Counts are not part of it and come back as 0.
    pub fn read_text<R: BufRead>(r: R) -> Result<EmbeddingModel> {
        let mut lines = r.lines().enumerate();
        let header = match lines.next() {
            Some((_, l)) => l.map_err(|e| Error::io("reading embedding header", e))?,
            None => return Err(Error::Format("empty embedding file".into())),
        };
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::parse(1, "bad header")))
            .collect::<Result<_>>()?;
        let [v, dim] = dims[..] else {
            return Err(Error::parse(1, "header must be `V d`"));
        };
        let mut pairs = Vec::with_capacity(v);
        let mut vectors = Vec::with_capacity(v * dim);
        for (i, line) in lines {
            let line = line.map_err(|e| Error::io("reading embedding file", e))?;
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            let tok = parts.next().unwrap_or_default().to_string();
            let values: Vec<f32> = parts
                .map(|s| s.parse().map_err(|_| Error::parse(i + 1, format!("bad value {s:?}"))))
                .collect::<Result<_>>()?;
            if values.len() != dim {
                return Err(Error::parse(
                    i + 1,
                    format!("expected {dim} values, got {}", values.len()),
                ));
            }
            pairs.push((tok, 0));
            vectors.extend(values);
        }
        if pairs.len() != v {
            return Err(Error::Format(format!(
                "header announces {v} tokens, found {}",
                pairs.len()
            )));
        }
        let params = SgnsParams {
            dim,
            min_count: 0,
            ..SgnsParams::default()
        };
        EmbeddingModel::new(
            Vocabulary::from_counts(pairs, 0),
            dim,
            vectors,
            params,
            CorpusProvenance::default(),
        )
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|e| Error::Format(format!("truncated embedding model: {e}")))
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    read_exact(r, &mut buf)?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    read_array(r).map(u32::from_le_bytes)
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    read_array(r).map(u64::from_le_bytes)
}
