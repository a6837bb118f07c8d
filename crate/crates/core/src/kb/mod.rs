//! Knowledge-base person entries, name index and mention matching.

mod entry;
mod index;
mod normalize;
mod vital;

pub use entry::{
    parse_person_entry, read_person_entries, serialize_person_entry, KbDate, KbReadReport, PersonEntry, PersonId,
    PRECISION_DAY, PRECISION_MONTH, PRECISION_YEAR,
};
pub use index::NameIndex;
pub use normalize::Normalizer;
pub use vital::{vital_status, VitalStatus, DIES_ON_TOLERANCE_DAYS};

use crate::corpus::Tweet;

/// People mentioned right after a `RIP` token in the tweet text.
pub fn match_mentions(tweet: &Tweet, index: &NameIndex) -> std::collections::BTreeSet<PersonId> {
    index.match_mentions(&tweet.text)
}
