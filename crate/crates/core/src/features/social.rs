//! The sixteen social features of a tweet slice.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::{Tweet, UserId};

pub const SOCIAL_DIM: usize = 16;

/// Feature names in output order.
pub const SOCIAL_FEATURE_NAMES: [&str; SOCIAL_DIM] = [
    "user_ratio",
    "retweeting_user_ratio",
    "tweet_length",
    "retweets_per_tweet",
    "reply_ratio",
    "tweeting_rate",
    "link_ratio",
    "question_ratio",
    "exclamation_ratio",
    "picture_ratio",
    "tokens_per_tweet",
    "hashtags_per_tweet",
    "mentions_per_tweet",
    "language_count",
    "follow_ratio_users",
    "follow_ratio_retweeting_users",
];

/// `log10(following) / log10(followers)`. When either count is at most 1
/// both logs use `x + 1`, and the denominator is floored at `log10(2)` so
/// accounts without followers stay finite.
pub fn follow_ratio(following: u64, followers: u64) -> f64 {
    if following <= 1 || followers <= 1 {
        let num = (following as f64 + 1.0).log10();
        let den = (followers as f64 + 1.0).log10().max(2f64.log10());
        num / den
    } else {
        (following as f64).log10() / (followers as f64).log10()
    }
}

fn mean_follow_ratio<'a>(users: impl Iterator<Item = &'a Tweet>) -> f64 {
    let (sum, n) = users.fold((0.0, 0usize), |(s, n), t| {
        (s + follow_ratio(t.following, t.followers), n + 1)
    });
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Compute the social features of a non-empty slice. The result does not
/// depend on the order of the tweets. A user's follower counts are taken
/// from their latest tweet in the slice.
pub fn social_features(slice: &[Tweet]) -> [f64; SOCIAL_DIM] {
    assert!(!slice.is_empty(), "social features need at least one tweet");
    let n = slice.len() as f64;

    let mut latest: BTreeMap<UserId, &Tweet> = BTreeMap::new();
    let mut retweeters: BTreeSet<UserId> = BTreeSet::new();
    let mut hashtags: BTreeSet<&str> = BTreeSet::new();
    let mut mentions: BTreeSet<UserId> = BTreeSet::new();
    let mut languages: BTreeSet<&str> = BTreeSet::new();
    let (mut chars, mut retweets, mut replies, mut links) = (0u64, 0u64, 0u64, 0u64);
    let (mut questions, mut exclamations, mut pictures, mut tokens) = (0u64, 0u64, 0u64, 0u64);
    let (mut first, mut last) = (i64::MAX, i64::MIN);

    for t in slice {
        latest
            .entry(t.user_id)
            .and_modify(|cur| {
                if t.order_key() > cur.order_key() {
                    *cur = t;
                }
            })
            .or_insert(t);
        if t.is_retweet {
            retweeters.insert(t.user_id);
        }
        hashtags.extend(t.hashtags.iter().map(String::as_str));
        mentions.extend(t.mentions.iter().copied());
        languages.insert(t.language.as_str());
        chars += t.text.chars().count() as u64;
        retweets += t.retweet_count;
        replies += u64::from(t.is_reply);
        links += t.link_count;
        questions += t.text.matches('?').count() as u64;
        exclamations += t.text.matches('!').count() as u64;
        pictures += t.picture_count;
        tokens += t.text.split_whitespace().count() as u64;
        first = first.min(t.timestamp);
        last = last.max(t.timestamp);
    }

    let duration = (last - first).max(1) as f64;
    [
        latest.len() as f64 / n,
        retweeters.len() as f64 / n,
        chars as f64 / n,
        retweets as f64 / n,
        replies as f64 / n,
        n / duration,
        links as f64 / n,
        questions as f64 / n,
        exclamations as f64 / n,
        pictures as f64 / n,
        tokens as f64 / n,
        hashtags.len() as f64 / n,
        mentions.len() as f64 / n,
        languages.len() as f64,
        mean_follow_ratio(latest.values().copied()),
        mean_follow_ratio(latest.iter().filter(|(u, _)| retweeters.contains(u)).map(|(_, t)| *t)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn follow_ratio_examples() {
        assert!((follow_ratio(1000, 100) - 1.5).abs() < 1e-15);
        assert!((follow_ratio(0, 0)).abs() < 1e-15);
        assert!((follow_ratio(1, 0) - 1.0).abs() < 1e-15);
        assert!(follow_ratio(5000, 1).is_finite());
    }

    #[test]
    fn user_ratio_distinct_users() {
        let mut a = Tweet::new(1, 100, "RIP a");
        a.user_id = 1;
        let mut b = Tweet::new(2, 200, "RIP b");
        b.user_id = 2;
        assert_eq!(social_features(&[a.clone(), b])[0], 1.0);
        let mut c = a.clone();
        c.id = 3;
        assert_eq!(social_features(&[a, c])[0], 0.5);
    }

    #[test]
    fn single_tweet_rate_is_one() {
        let f = social_features(&[Tweet::new(1, 100, "RIP")]);
        assert_eq!(f[5], 1.0);
        assert!(f.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}
