use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type TweetId = u64;
pub type UserId = u64;

/// Language code used when a record carries none.
pub const UNDETERMINED_LANGUAGE: &str = "und";

fn undetermined() -> String {
    UNDETERMINED_LANGUAGE.to_string()
}

/// One social-media post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: TweetId,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    pub text: String,
    #[serde(default)]
    pub user_id: UserId,
    #[serde(default)]
    pub followers: u64,
    #[serde(default)]
    pub following: u64,
    #[serde(default)]
    pub is_retweet: bool,
    #[serde(default)]
    pub retweet_count: u64,
    #[serde(default)]
    pub is_reply: bool,
    #[serde(default)]
    pub hashtags: BTreeSet<String>,
    #[serde(default)]
    pub mentions: BTreeSet<UserId>,
    #[serde(default)]
    pub link_count: u64,
    #[serde(default)]
    pub picture_count: u64,
    #[serde(default = "undetermined")]
    pub language: String,
}

impl Tweet {
    /// A tweet with only the required fields set.
    pub fn new(id: TweetId, timestamp: i64, text: impl Into<String>) -> Tweet {
        Tweet {
            id,
            timestamp,
            text: text.into(),
            user_id: 0,
            followers: 0,
            following: 0,
            is_retweet: false,
            retweet_count: 0,
            is_reply: false,
            hashtags: BTreeSet::new(),
            mentions: BTreeSet::new(),
            link_count: 0,
            picture_count: 0,
            language: undetermined(),
        }
    }

    /// Sort key giving a total order over a corpus.
    pub fn order_key(&self) -> (i64, TweetId) {
        (self.timestamp, self.id)
    }
}

/// Parse one newline-delimited JSON record. `line_no` is only used for error reporting.
pub fn parse_tweet_record(line: &str, line_no: usize) -> Result<Tweet> {
    let tweet: Tweet = serde_json::from_str(line.trim_end()).map_err(|e| Error::parse(line_no, e.to_string()))?;
    if tweet.timestamp <= 0 {
        return Err(Error::parse(
            line_no,
            format!("timestamp must be positive, got {}", tweet.timestamp),
        ));
    }
    if tweet.language.is_empty() {
        return Err(Error::parse(line_no, "empty language code"));
    }
    Ok(tweet)
}

pub fn serialize_tweet(tweet: &Tweet) -> String {
    serde_json::to_string(tweet).expect("tweet serialization is infallible")
}

/// Outcome of reading a corpus file: good records plus the recoverable failures.
#[derive(Debug, Default)]
pub struct ReadReport {
    pub tweets: Vec<Tweet>,
    pub errors: Vec<Error>,
}

/// Read every record from `reader`, collecting malformed lines instead of aborting.
/// Blank lines are skipped.
pub fn read_tweets<R: BufRead>(reader: R) -> Result<ReadReport> {
    let mut out = ReadReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading line {}", i + 1), e))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_tweet_record(&line, i + 1) {
            Ok(t) => out.tweets.push(t),
            Err(e) => out.errors.push(e),
        }
    }
    Ok(out)
}

pub fn write_tweets<'a, W: Write>(mut writer: W, tweets: impl IntoIterator<Item = &'a Tweet>) -> std::io::Result<()> {
    for t in tweets {
        writer.write_all(serialize_tweet(t).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

/// Tweets of one report, ascending by `(timestamp, id)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeline {
    tweets: Vec<Tweet>,
}

impl Timeline {
    pub fn new(mut tweets: Vec<Tweet>) -> Result<Timeline> {
        if tweets.is_empty() {
            return Err(Error::Precondition("a timeline needs at least one tweet".into()));
        }
        tweets.sort_by_key(Tweet::order_key);
        Ok(Timeline { tweets })
    }

    /// Timestamp of the first tweet.
    pub fn t0(&self) -> i64 {
        self.tweets[0].timestamp
    }

    pub fn last_timestamp(&self) -> i64 {
        self.tweets[self.tweets.len() - 1].timestamp
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_tweets(self) -> Vec<Tweet> {
        self.tweets
    }
}
