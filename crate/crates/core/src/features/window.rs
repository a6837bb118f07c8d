use serde::{Deserialize, Serialize};

use crate::corpus::{Timeline, Tweet};
use crate::error::{Error, Result};

/// Observation point `elapsed` seconds after the first tweet, using the
/// trailing `fraction` of the elapsed time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub elapsed: i64,
    pub fraction: f64,
}

impl WindowSpec {
    pub fn new(elapsed: i64, fraction: f64) -> Result<WindowSpec> {
        if elapsed < 0 {
            return Err(Error::Precondition(format!("elapsed time {elapsed} is negative")));
        }
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Precondition(format!(
                "window fraction {fraction} outside (0, 1]"
            )));
        }
        Ok(WindowSpec { elapsed, fraction })
    }

    pub fn full(elapsed: i64) -> Result<WindowSpec> {
        Self::new(elapsed, 1.0)
    }
}

/// Tweets visible `elapsed` seconds after the first one. At zero elapsed
/// time only the first tweet is visible.
pub fn cutoff(timeline: &Timeline, elapsed: i64) -> &[Tweet] {
    let tweets = timeline.tweets();
    if elapsed <= 0 {
        return &tweets[..1];
    }
    let limit = timeline.t0().saturating_add(elapsed);
    let n = tweets.partition_point(|t| t.timestamp <= limit);
    &tweets[..n]
}

/// Index of the first tweet of the sliding window within
/// `cutoff(timeline, spec.elapsed)`.
pub fn window_start(visible: &[Tweet], t0: i64, spec: WindowSpec) -> usize {
    if spec.elapsed == 0 || spec.fraction >= 1.0 {
        return 0;
    }
    let now = t0 + spec.elapsed;
    let start = now as f64 - spec.elapsed as f64 * spec.fraction;
    let k = visible.partition_point(|t| (t.timestamp as f64) < start);
    // an empty window falls back to the most recent tweet
    k.min(visible.len() - 1)
}

/// Tweets of the sliding window `[now - elapsed * fraction, now]` where
/// `now = t0 + elapsed`.
pub fn window(timeline: &Timeline, spec: WindowSpec) -> &[Tweet] {
    let visible = cutoff(timeline, spec.elapsed);
    &visible[window_start(visible, timeline.t0(), spec)..]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn timeline(offsets: &[i64]) -> Timeline {
        let base = 1_400_000_000;
        Timeline::new(
            offsets
                .iter()
                .enumerate()
                .map(|(i, o)| Tweet::new(i as u64, base + o, "RIP"))
                .collect(),
        )
        .unwrap()
    }

    fn ids(s: &[Tweet]) -> Vec<u64> {
        s.iter().map(|t| t.id).collect()
    }

    #[test]
    fn cutoff_examples() {
        let tl = timeline(&[0, 0, 30, 600, 601, 5000]);
        assert_eq!(ids(cutoff(&tl, 0)), vec![0]);
        assert_eq!(ids(cutoff(&tl, 600)), vec![0, 1, 2, 3]);
        assert_eq!(cutoff(&tl, 10_000).len(), 6);
    }

    #[test]
    fn window_examples() {
        // one tweet per minute for 90 minutes
        let offsets: Vec<i64> = (0..90).map(|m| m * 60).collect();
        let tl = timeline(&offsets);
        let half = window(&tl, WindowSpec::new(3600, 0.5).unwrap());
        assert_eq!(half.first().unwrap().timestamp - tl.t0(), 1800);
        assert_eq!(half.last().unwrap().timestamp - tl.t0(), 3600);
        assert_eq!(half.len(), 31);
        let full = window(&tl, WindowSpec::full(3600).unwrap());
        assert_eq!(full, cutoff(&tl, 3600));
        for p in [0.1, 0.25, 0.5, 0.75, 1.0] {
            assert_eq!(ids(window(&tl, WindowSpec::new(0, p).unwrap())), vec![0]);
        }
    }

    #[test]
    fn empty_window_falls_back_to_latest() {
        let tl = timeline(&[0, 10, 20]);
        let w = window(&tl, WindowSpec::new(3000, 0.1).unwrap());
        assert_eq!(ids(w), vec![2]);
    }

    #[test]
    fn spec_validation() {
        assert!(WindowSpec::new(-1, 0.5).is_err());
        assert!(WindowSpec::new(10, 0.0).is_err());
        assert!(WindowSpec::new(10, 1.5).is_err());
        assert!(WindowSpec::new(10, f64::NAN).is_err());
    }
}
