use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Items before `test_year` go to training, items in it to testing. Without
/// an explicit year the latest year present is the test year. Items after
/// the test year are dropped.
pub fn split_by_year<T>(
    items: Vec<T>,
    year_of: impl Fn(&T) -> i32,
    test_year: Option<i32>,
) -> Result<(Vec<T>, Vec<T>, i32)> {
    let test_year = match test_year.or_else(|| items.iter().map(&year_of).max()) {
        Some(y) => y,
        None => return Err(Error::Config("no instances to split".into())),
    };
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for item in items {
        let y = year_of(&item);
        if y < test_year {
            train.push(item);
        } else if y == test_year {
            test.push(item);
        }
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::Config(format!(
            "year split around {test_year} leaves {} training and {} test instances",
            train.len(),
            test.len()
        )));
    }
    Ok((train, test, test_year))
}

/// Partition `0..n` into `k` random folds whose sizes differ by at most one.
/// Each fold is sorted.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 || n < k {
        return Err(Error::Precondition(format!(
            "cannot split {n} instances into {k} folds"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f >= k - extra);
        let mut fold = idx[start..start + len].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += len;
    }
    Ok(folds)
}

/// Sorted indices of a random `fraction` of `0..n`, at least one when `n > 0`.
pub fn training_subset(n: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!("training fraction {fraction} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    idx.truncate(((n as f64 * fraction).ceil() as usize).clamp(n.min(1), n));
    idx.sort_unstable();
    Ok(idx)
}

pub fn tenfold_split(n: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    kfold_split(n, 10, seed)
}
