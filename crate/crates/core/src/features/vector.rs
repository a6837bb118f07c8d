use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::social::{SOCIAL_DIM, SOCIAL_FEATURE_NAMES};
use crate::Label;

/// One named segment of a feature layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Block {
    Social,
    W2v { dim: usize },
    MultiW2v { dim: usize },
}

impl Block {
    pub fn len(&self) -> usize {
        match *self {
            Block::Social => SOCIAL_DIM,
            Block::W2v { dim } => dim,
            Block::MultiW2v { dim } => Label::COUNT * dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push_names(&self, out: &mut Vec<String>) {
        match *self {
            Block::Social => out.extend(SOCIAL_FEATURE_NAMES.iter().map(|s| s.to_string())),
            Block::W2v { dim } => out.extend((0..dim).map(|i| format!("w2v_{i}"))),
            Block::MultiW2v { dim } => {
                for label in Label::ALL {
                    out.extend((0..dim).map(|i| format!("multiw2v_{label}_{i}")));
                }
            }
        }
    }
}

/// Named layout of a feature vector.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schema {
    blocks: Vec<Block>,
}

impl Schema {
    pub fn new(blocks: Vec<Block>) -> Schema {
        Schema { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(Block::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.len());
        for b in &self.blocks {
            b.push_names(&mut out);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
    schema: Schema,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, schema: Schema) -> Result<FeatureVector> {
        if values.len() != schema.len() {
            return Err(Error::SchemaMismatch {
                expected: format!("{} values", schema.len()),
                actual: format!("{} values", values.len()),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("feature {i} is not finite: {}", values[i])));
        }
        Ok(FeatureVector { values, schema })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Concatenate vectors and their schemas in order.
pub fn concat_features<I>(parts: I) -> FeatureVector
where
    I: IntoIterator<Item = FeatureVector>,
{
    let mut values = Vec::new();
    let mut blocks = Vec::new();
    for p in parts {
        values.extend(p.values);
        blocks.extend(p.schema.blocks);
    }
    FeatureVector {
        values,
        schema: Schema { blocks },
    }
}

/// The five feature sets under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureSet {
    #[serde(rename = "social")]
    Social,
    #[serde(rename = "w2v")]
    W2v,
    #[serde(rename = "multiw2v")]
    MultiW2v,
    #[serde(rename = "social+w2v")]
    SocialW2v,
    #[serde(rename = "social+multiw2v")]
    SocialMultiW2v,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 5] = [
        FeatureSet::Social,
        FeatureSet::W2v,
        FeatureSet::MultiW2v,
        FeatureSet::SocialW2v,
        FeatureSet::SocialMultiW2v,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Social => "social",
            FeatureSet::W2v => "w2v",
            FeatureSet::MultiW2v => "multiw2v",
            FeatureSet::SocialW2v => "social+w2v",
            FeatureSet::SocialMultiW2v => "social+multiw2v",
        }
    }

    pub fn uses_social(self) -> bool {
        matches!(
            self,
            FeatureSet::Social | FeatureSet::SocialW2v | FeatureSet::SocialMultiW2v
        )
    }

    pub fn uses_w2v(self) -> bool {
        matches!(self, FeatureSet::W2v | FeatureSet::SocialW2v)
    }

    pub fn uses_multiw2v(self) -> bool {
        matches!(self, FeatureSet::MultiW2v | FeatureSet::SocialMultiW2v)
    }

    pub fn schema(self, dim: usize) -> Schema {
        let mut blocks = Vec::new();
        if self.uses_social() {
            blocks.push(Block::Social);
        }
        if self.uses_w2v() {
            blocks.push(Block::W2v { dim });
        }
        if self.uses_multiw2v() {
            blocks.push(Block::MultiW2v { dim });
        }
        Schema::new(blocks)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<FeatureSet> {
        let s = s.trim();
        FeatureSet::ALL
            .into_iter()
            .find(|f| f.as_str() == s || (s == "s+m" && *f == FeatureSet::SocialMultiW2v))
            .ok_or_else(|| Error::Validation(format!("unknown feature set {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(values: Vec<f64>, block: Block) -> FeatureVector {
        FeatureVector::new(values, Schema::new(vec![block])).unwrap()
    }

    #[test]
    fn concat_lengths() {
        let social = fv(vec![0.0; 16], Block::Social);
        let w2v = fv(vec![0.5; 100], Block::W2v { dim: 100 });
        let multi = fv(vec![0.5; 300], Block::MultiW2v { dim: 100 });
        assert_eq!(concat_features([social.clone(), w2v]).len(), 116);
        let sm = concat_features([social, multi]);
        assert_eq!(sm.len(), 316);
        assert_eq!(sm.schema(), &FeatureSet::SocialMultiW2v.schema(100));
        assert_eq!(sm.schema().names().len(), 316);
        assert_eq!(sm.schema().names()[16], "multiw2v_real_0");
        assert_eq!(sm.schema().names()[315], "multiw2v_fake_99");
    }

    #[test]
    fn concat_is_associative() {
        let a = fv(vec![1.0; 16], Block::Social);
        let b = fv(vec![2.0, 3.0], Block::W2v { dim: 2 });
        let c = fv(vec![4.0; 6], Block::MultiW2v { dim: 2 });
        let left = concat_features([concat_features([a.clone(), b.clone()]), c.clone()]);
        assert_eq!(left, concat_features([a, b, c]));
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(FeatureVector::new(vec![0.0; 3], Schema::new(vec![Block::Social])).is_err());
        assert!(FeatureVector::new(vec![f64::NAN], Schema::new(vec![Block::W2v { dim: 1 }])).is_err());
    }

    #[test]
    fn feature_set_names_round_trip() {
        for f in FeatureSet::ALL {
            assert_eq!(f.as_str().parse::<FeatureSet>().unwrap(), f);
        }
        assert!("bag-of-words".parse::<FeatureSet>().is_err());
    }
}
