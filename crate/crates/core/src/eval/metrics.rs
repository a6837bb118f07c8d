use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Label;

const K: usize = Label::COUNT;

/// Counts indexed `[gold][predicted]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion(pub [[u64; K]; K]);

impl Confusion {
    pub fn from_pairs(gold: &[Label], pred: &[Label]) -> Result<Confusion> {
        if gold.len() != pred.len() {
            return Err(Error::Precondition(format!(
                "{} gold labels but {} predictions",
                gold.len(),
                pred.len()
            )));
        }
        let mut m = [[0u64; K]; K];
        for (g, p) in gold.iter().zip(pred) {
            m[g.index()][p.index()] += 1;
        }
        Ok(Confusion(m))
    }

    /// F1 of one class; 0 when precision or recall is undefined.
    pub fn f1(&self, label: Label) -> f64 {
        let (num, den) = self.f1_ratio(label);
        num as f64 / den as f64
    }

    /// Mean F1 over the classes, rounded once from the exact rational value.
    pub fn macro_f1(&self) -> f64 {
        let ratios = Label::ALL.map(|l| self.f1_ratio(l));
        let exact = ratios.iter().try_fold((0u128, 1u128), |(n, d), &(a, b)| {
            let (a, b) = (u128::from(a), u128::from(b));
            let num = n.checked_mul(b)?.checked_add(a.checked_mul(d)?)?;
            let den = d.checked_mul(b)?;
            let g = gcd(num, den);
            Some((num / g, den / g))
        });
        const EXACT: u128 = 1 << f64::MANTISSA_DIGITS;
        match exact.and_then(|(n, d)| Some((n, d.checked_mul(K as u128)?))) {
            Some((n, d)) if n <= EXACT && d <= EXACT => n as f64 / d as f64,
            _ => ratios.iter().map(|&(n, d)| n as f64 / d as f64).sum::<f64>() / K as f64,
        }
    }

    /// F1 as `2tp / (gold + pred)`, or `0 / 1` when undefined.
    fn f1_ratio(&self, label: Label) -> (u64, u64) {
        let k = label.index();
        let tp = self.0[k][k];
        let gold: u64 = self.0[k].iter().sum();
        let pred: u64 = self.0.iter().map(|row| row[k]).sum();
        if gold == 0 || pred == 0 || tp == 0 {
            return (0, 1);
        }
        (2 * tp, gold + pred)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Per-class F1 and their unweighted mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub per_class: [f64; K],
    pub macro_f1: f64,
}

impl Scores {
    pub fn compute(gold: &[Label], pred: &[Label]) -> Result<Scores> {
        let c = Confusion::from_pairs(gold, pred)?;
        Ok(Scores {
            per_class: Label::ALL.map(|l| c.f1(l)),
            macro_f1: c.macro_f1(),
        })
    }

    /// Element-wise mean of several scores.
    pub fn mean(scores: &[Scores]) -> Scores {
        let n = scores.len().max(1) as f64;
        let mut per_class = [0.0; K];
        let mut macro_f1 = 0.0;
        for s in scores {
            per_class.iter_mut().zip(&s.per_class).for_each(|(a, b)| *a += b);
            macro_f1 += s.macro_f1;
        }
        Scores {
            per_class: per_class.map(|v| v / n),
            macro_f1: macro_f1 / n,
        }
    }
}

pub fn per_class_f1(gold: &[Label], pred: &[Label]) -> Result<[f64; K]> {
    Ok(Scores::compute(gold, pred)?.per_class)
}

pub fn macro_f1(gold: &[Label], pred: &[Label]) -> Result<f64> {
    Ok(Scores::compute(gold, pred)?.macro_f1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::*;

    #[test]
    fn seven_ninths_is_exact() {
        let g = [Real, Real, Commemoration, Fake];
        let p = [Real, Commemoration, Commemoration, Fake];
        assert_eq!(macro_f1(&g, &p).unwrap(), 7.0 / 9.0);
    }

    #[test]
    fn perfect_is_one() {
        let g = [Real, Commemoration, Fake, Real];
        assert_eq!(macro_f1(&g, &g).unwrap(), 1.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(macro_f1(&[Real], &[]).is_err());
    }

    #[test]
    fn absent_class_scores_zero() {
        let g = [Real, Real];
        let f = per_class_f1(&g, &g).unwrap();
        assert_eq!(f, [1.0, 0.0, 0.0]);
    }
}
