//! Tweet records: ingestion, keyword filtering and synthetic corpora.

mod rip;
pub mod synth;
mod tweet;

pub use rip::{keep_uppercase_rip, rip_token_ends};
pub use tweet::{
    parse_tweet_record, read_tweets, serialize_tweet, write_tweets, ReadReport, Timeline, Tweet, TweetId, UserId,
    UNDETERMINED_LANGUAGE,
};
