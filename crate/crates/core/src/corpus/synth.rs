//! Deterministic synthetic death-report corpora.
//!
//! Every report is one person mentioned at least 50 times after an
//! upper-case `RIP` within a single UTC day. Tweets draw on a shared Zipfian
//! background plus two kinds of class vocabulary:
//!
//! * cue words, which co-occur with each other and are mixed across classes
//!   according to a per-report purity;
//! * sense words, at most one per tweet amid class-independent context. Each
//!   sense word is about as frequent over the whole corpus as any other, so
//!   only models trained per class can tell the vocabularies apart.
//!
//! The first tweets of a report carry the clearest signal. The knowledge base
//! is written so that each person's vital status agrees with their report's
//! label.

use std::collections::{BTreeSet, HashSet};
use std::io::Write;

use chrono::{Datelike, Duration, NaiveDate};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal, Zipf};
use serde::{Deserialize, Serialize};

use crate::corpus::tweet::{serialize_tweet, Timeline, Tweet};
use crate::error::{Error, Result};
use crate::kb::{serialize_person_entry, KbDate, PersonEntry, PersonId};
use crate::reports::report_id;
use crate::Label;

const DAY_SECONDS: i64 = 86_400;
const SYLLABLES: [&str; 48] = [
    "ba", "be", "bi", "bo", "da", "de", "di", "do", "ka", "ke", "ki", "ko", "la", "le", "li", "lo", "ma", "me", "mi",
    "mo", "na", "ne", "ni", "no", "pa", "pe", "pi", "po", "ra", "re", "ri", "ro", "sa", "se", "si", "so", "ta", "te",
    "ti", "to", "va", "ve", "vi", "vo", "za", "ze", "zi", "zo",
];
const FIRST_NAMES: usize = 300;
const LAST_NAMES: usize = 600;
const HASHTAGS: [&str; 5] = ["rip", "restinpeace", "riplegend", "gonetoosoon", "news"];
const FOREIGN_LANGUAGES: [&str; 4] = ["es", "pt", "fr", "id"];
const OCCUPATIONS: [&str; 8] = [
    "singer",
    "actor",
    "footballer",
    "politician",
    "writer",
    "boxer",
    "comedian",
    "director",
];

/// Per-class generation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassProfile {
    /// Size of the class's cue vocabulary.
    pub cue_words: usize,
    /// Share of body tokens drawn from cue vocabularies in the first tweet.
    pub early_cue_rate: f64,
    /// Share of cue tokens once the opening burst has passed.
    pub late_cue_rate: f64,
    /// Size of the class's sense vocabulary.
    pub sense_words: usize,
    /// Probability that the first tweet carries a sense word.
    pub early_sense_rate: f64,
    /// The same probability once the opening burst has passed.
    pub late_sense_rate: f64,
    /// Inclusive range of tweets per report.
    pub tweets: (usize, usize),
    /// Inclusive range of minutes between the first and last tweet.
    pub span_minutes: (u32, u32),
    /// Arrival offsets are `span * u^burst`; above 1 front-loads the report.
    pub burst: f64,
    pub retweet: f64,
    pub reply: f64,
    pub link: f64,
    pub picture: f64,
    pub question: f64,
    pub exclamation: f64,
    pub hashtag: f64,
    pub mention: f64,
    pub foreign_language: f64,
    /// Mean and standard deviation of log10 follower counts.
    pub followers_log10: (f64, f64),
    pub following_log10: (f64, f64),
}

impl Default for ClassProfile {
    fn default() -> Self {
        ClassProfile {
            cue_words: 40,
            early_cue_rate: 0.5,
            late_cue_rate: 0.2,
            sense_words: 100,
            early_sense_rate: 0.6,
            late_sense_rate: 0.3,
            tweets: (52, 120),
            span_minutes: (240, 720),
            burst: 1.5,
            retweet: 0.4,
            reply: 0.1,
            link: 0.2,
            picture: 0.1,
            question: 0.1,
            exclamation: 0.2,
            hashtag: 0.2,
            mention: 0.15,
            foreign_language: 0.1,
            followers_log10: (2.5, 0.8),
            following_log10: (2.4, 0.5),
        }
    }
}

/// Parameters of a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub reports: usize,
    /// Relative frequency of real, commemoration and fake reports.
    pub class_ratio: [f64; 3],
    pub years: Vec<i32>,
    pub background_words: usize,
    pub background_zipf: f64,
    pub tokens_per_tweet: (usize, usize),
    /// Beta parameters of the per-report share of cue tokens that come from
    /// the report's own class.
    pub purity: (f64, f64),
    /// Probability that a sense word comes from another class.
    pub sense_leak: f64,
    /// Tweets over which cue and sense rates decay from early to late.
    pub decay_tweets: f64,
    /// Concentration of the per-report Beta draw around each class's
    /// behaviour probabilities; lower values make reports more varied.
    pub report_concentration: f64,
    /// Standard deviation of the per-report shift in log10 follower and
    /// following counts.
    pub report_audience_sd: f64,
    /// Tweets that must not become reports: lower-case `rip`, unknown
    /// names, and known people mentioned below the daily threshold.
    pub noise_tweets: usize,
    /// Known people mentioned on some day, but fewer than 50 times.
    pub minor_people: usize,
    /// Known people never mentioned.
    pub idle_people: usize,
    pub users: u64,
    pub real: ClassProfile,
    pub commemoration: ClassProfile,
    pub fake: ClassProfile,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            reports: 4007,
            class_ratio: [2301.0, 1092.0, 614.0],
            years: vec![2012, 2013, 2014],
            background_words: 3000,
            background_zipf: 1.05,
            tokens_per_tweet: (3, 9),
            purity: (4.0, 2.0),
            sense_leak: 0.02,
            decay_tweets: 10.0,
            report_concentration: 10.0,
            report_audience_sd: 0.4,
            noise_tweets: 5000,
            minor_people: 200,
            idle_people: 500,
            users: 500_000,
            real: ClassProfile {
                sense_words: 230,
                tweets: (55, 150),
                span_minutes: (180, 600),
                burst: 2.2,
                retweet: 0.5,
                link: 0.35,
                picture: 0.15,
                question: 0.05,
                exclamation: 0.15,
                hashtag: 0.15,
                followers_log10: (2.9, 0.9),
                ..ClassProfile::default()
            },
            commemoration: ClassProfile {
                sense_words: 110,
                tweets: (52, 110),
                span_minutes: (480, 900),
                burst: 1.1,
                retweet: 0.3,
                link: 0.15,
                picture: 0.25,
                question: 0.03,
                exclamation: 0.25,
                hashtag: 0.45,
                followers_log10: (2.4, 0.7),
                ..ClassProfile::default()
            },
            fake: ClassProfile {
                sense_words: 62,
                tweets: (52, 120),
                span_minutes: (300, 800),
                burst: 1.6,
                retweet: 0.55,
                link: 0.2,
                picture: 0.05,
                question: 0.25,
                exclamation: 0.3,
                hashtag: 0.2,
                followers_log10: (2.2, 0.8),
                ..ClassProfile::default()
            },
        }
    }
}

impl SynthSpec {
    pub fn profile(&self, label: Label) -> &ClassProfile {
        match label {
            Label::Real => &self.real,
            Label::Commemoration => &self.commemoration,
            Label::Fake => &self.fake,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for label in Label::ALL {
            let p = self.profile(label);
            if p.sense_words == 0 || p.cue_words == 0 {
                return Err(Error::Config(format!("class {label} has an empty vocabulary")));
            }
            if p.tweets.0 < 50 || p.tweets.0 > p.tweets.1 {
                return Err(Error::Config(format!(
                    "class {label}: tweet range must start at 50 or more"
                )));
            }
            if p.span_minutes.0 == 0 || p.span_minutes.0 > p.span_minutes.1 || p.span_minutes.1 > 1200 {
                return Err(Error::Config(format!(
                    "class {label}: span must lie in 1..=1200 minutes"
                )));
            }
            let rates = [
                p.early_cue_rate,
                p.late_cue_rate,
                p.early_sense_rate,
                p.late_sense_rate,
                p.retweet,
                p.reply,
                p.link,
                p.picture,
            ];
            let more = [p.question, p.exclamation, p.hashtag, p.mention, p.foreign_language];
            if rates.iter().chain(&more).any(|r| !(0.0..=1.0).contains(r)) {
                return Err(Error::Config(format!(
                    "class {label}: probabilities must lie in [0, 1]"
                )));
            }
            if !(p.burst > 0.0) {
                return Err(Error::Config(format!("class {label}: burst must be positive")));
            }
        }
        if self.background_words == 0 {
            return Err(Error::Config("background vocabulary is empty".into()));
        }
        if self.years.is_empty() {
            return Err(Error::Config("no years to place reports in".into()));
        }
        if self.class_ratio.iter().any(|w| !(*w >= 0.0)) || self.class_ratio.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Config(
                "class ratio must be non-negative with a positive sum".into(),
            ));
        }
        if self.tokens_per_tweet.0 > self.tokens_per_tweet.1
            || !(self.purity.0 > 0.0 && self.purity.1 > 0.0)
            || !(0.0..=1.0).contains(&self.sense_leak)
            || !(self.report_concentration > 0.0)
            || !(self.report_audience_sd >= 0.0)
        {
            return Err(Error::Config("invalid token range, purity or leak parameters".into()));
        }
        if self.users == 0 {
            return Err(Error::Config("user pool is empty".into()));
        }
        Ok(())
    }
}

/// Split `total` in proportion to `weights`, handing leftovers to the
/// largest fractional parts (earlier classes win ties).
pub fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        (quotas[b] - quotas[b].floor())
            .total_cmp(&(quotas[a] - quotas[a].floor()))
            .then(a.cmp(&b))
    });
    let short = total - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

/// One generated report with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthReport {
    pub report_id: String,
    pub person_id: PersonId,
    pub label: Label,
    pub first_day: NaiveDate,
    pub timeline: Timeline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub reports: Vec<SynthReport>,
    pub people: Vec<PersonEntry>,
    /// Tweets that should not survive into any report.
    pub noise: Vec<Tweet>,
}

impl SynthCorpus {
    pub fn labeled(&self) -> impl Iterator<Item = (&Timeline, Label)> {
        self.reports.iter().map(|r| (&r.timeline, r.label))
    }

    /// Every tweet, ordered by timestamp then id.
    pub fn all_tweets(&self) -> Vec<&Tweet> {
        let mut all: Vec<&Tweet> = self
            .reports
            .iter()
            .flat_map(|r| r.timeline.tweets())
            .chain(&self.noise)
            .collect();
        all.sort_by_key(|t| t.order_key());
        all
    }

    pub fn write_tweets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for t in self.all_tweets() {
            writeln!(w, "{}", serialize_tweet(t))?;
        }
        w.flush()
    }

    pub fn write_kb<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for p in &self.people {
            writeln!(w, "{}", serialize_person_entry(p))?;
        }
        w.flush()
    }

    /// Sidecar `report_id<TAB>label` file.
    pub fn write_labels<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.reports {
            writeln!(w, "{}\t{}", r.report_id, r.label)?;
        }
        w.flush()
    }
}

fn day_start(day: NaiveDate) -> i64 {
    day.and_hms_opt(0, 0, 0).expect("midnight").and_utc().timestamp()
}

struct Lexicon {
    first_names: Vec<String>,
    last_names: Vec<String>,
    background: Vec<String>,
    cues: [Vec<String>; 3],
    senses: [Vec<String>; 3],
}

/// Per-tweet vocabulary rates.
#[derive(Clone, Copy)]
struct Rates {
    cue: f64,
    sense: f64,
    own_share: f64,
}

struct Generator<'a> {
    spec: &'a SynthSpec,
    rng: ChaCha8Rng,
    used_words: HashSet<String>,
    used_names: HashSet<String>,
    next_tweet: u64,
}

impl Generator<'_> {
    fn pseudo_word(&mut self, min_syllables: usize, max_syllables: usize) -> String {
        loop {
            let n = self.rng.random_range(min_syllables..=max_syllables);
            let w: String = (0..n)
                .map(|_| *SYLLABLES.choose(&mut self.rng).expect("non-empty"))
                .collect();
            if w != "rip" && self.used_words.insert(w.clone()) {
                return w;
            }
        }
    }

    fn words(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.pseudo_word(2, 4)).collect()
    }

    /// A full name not used before, combining shared first and last names.
    fn person_name(&mut self, lex: &Lexicon) -> String {
        loop {
            let first = lex.first_names.choose(&mut self.rng).expect("non-empty");
            let last = lex.last_names.choose(&mut self.rng).expect("non-empty");
            let name = format!("{first} {last}");
            if self.used_names.insert(name.clone()) {
                return name;
            }
        }
    }

    fn random_day(&mut self, year: i32) -> NaiveDate {
        let start = NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year");
        let len = if NaiveDate::from_ymd_opt(year, 2, 29).is_some() {
            366
        } else {
            365
        };
        start + Duration::days(self.rng.random_range(0..len))
    }

    fn person(&mut self, id: PersonId, name: String, death: Option<NaiveDate>, latest: i32) -> PersonEntry {
        let birth_year = self.rng.random_range(1925..=(latest - 20).max(1926));
        let birth = NaiveDate::from_ymd_opt(birth_year, self.rng.random_range(1..=12), self.rng.random_range(1..=28))
            .expect("valid day");
        PersonEntry {
            id,
            name,
            aliases: Vec::new(),
            birth: KbDate::from_ymd(birth),
            death: death.map(KbDate::from_ymd),
            description: format!("synthetic {}", OCCUPATIONS.choose(&mut self.rng).expect("non-empty")),
        }
    }

    fn log_count(&mut self, (mean, sd): (f64, f64)) -> u64 {
        let v = Normal::new(mean, sd.max(1e-9))
            .expect("finite normal")
            .sample(&mut self.rng);
        10f64.powf(v.clamp(0.0, 7.5)).floor() as u64
    }

    fn background_word<'w>(&mut self, lex: &'w Lexicon, zipf: &Zipf<f64>) -> &'w str {
        let rank = zipf.sample(&mut self.rng) as usize;
        &lex.background[rank.clamp(1, lex.background.len()) - 1]
    }

    fn other_class(&mut self, label: Label) -> Label {
        let others: Vec<Label> = Label::ALL.into_iter().filter(|l| *l != label).collect();
        *others.choose(&mut self.rng).expect("two other classes")
    }

    /// Body tokens of one tweet. A tweet with a sense word carries no cues.
    fn body(&mut self, lex: &Lexicon, zipf: &Zipf<f64>, label: Label, rates: Rates) -> Vec<String> {
        let (lo, hi) = self.spec.tokens_per_tweet;
        let n = self.rng.random_range(lo..=hi);
        if n > 0 && self.rng.random_bool(rates.sense) {
            let class = if self.rng.random_bool(self.spec.sense_leak) {
                self.other_class(label)
            } else {
                label
            };
            let mut body: Vec<String> = (1..n).map(|_| self.background_word(lex, zipf).to_string()).collect();
            let word = lex.senses[class.index()]
                .choose(&mut self.rng)
                .expect("validated non-empty");
            let at = self.rng.random_range(0..=body.len());
            body.insert(at, word.clone());
            return body;
        }
        (0..n)
            .map(|_| {
                if self.rng.random_bool(rates.cue) {
                    let class = if self.rng.random_bool(rates.own_share) {
                        label
                    } else {
                        self.other_class(label)
                    };
                    lex.cues[class.index()]
                        .choose(&mut self.rng)
                        .expect("validated non-empty")
                        .clone()
                } else {
                    self.background_word(lex, zipf).to_string()
                }
            })
            .collect()
    }

    fn handle(&mut self) -> (u64, String) {
        let id = self.rng.random_range(1..=self.spec.users);
        (id, format!("@user{id}"))
    }

    fn tweet(&mut self, timestamp: i64, name: &str, body: Vec<String>, profile: &ClassProfile) -> Tweet {
        let id = self.next_tweet;
        self.next_tweet += 1;
        let (user_id, _) = self.handle();
        let mut t = Tweet::new(id, timestamp, String::new());
        t.user_id = user_id;
        t.followers = self.log_count(profile.followers_log10);
        t.following = self.log_count(profile.following_log10);
        let mut text = String::new();
        if self.rng.random_bool(profile.retweet) {
            t.is_retweet = true;
            let (uid, h) = self.handle();
            t.mentions.insert(uid);
            text.push_str(&format!("RT {h}: "));
        }
        if self.rng.random_bool(profile.reply) {
            t.is_reply = true;
            let (uid, h) = self.handle();
            t.mentions.insert(uid);
            text.push_str(&format!("{h} "));
        }
        text.push_str("RIP ");
        text.push_str(name);
        for w in &body {
            text.push(' ');
            text.push_str(w);
        }
        if self.rng.random_bool(profile.mention) {
            let (uid, h) = self.handle();
            t.mentions.insert(uid);
            text.push_str(&format!(" {h}"));
        }
        if self.rng.random_bool(profile.hashtag) {
            let tag = *HASHTAGS.choose(&mut self.rng).expect("non-empty");
            text.push_str(&format!(" #{tag}"));
            t.hashtags.insert(tag.to_string());
        }
        if self.rng.random_bool(profile.link) {
            text.push_str(&format!(" http://t.co/{:08x}", self.rng.random::<u32>()));
            t.link_count = 1;
        }
        if self.rng.random_bool(profile.picture) {
            t.picture_count = 1;
        }
        if self.rng.random_bool(profile.question) {
            text.push_str(" ?");
        }
        if self.rng.random_bool(profile.exclamation) {
            text.push_str(if self.rng.random_bool(0.3) { " !!" } else { " !" });
        }
        if t.is_retweet {
            t.retweet_count = self.rng.random_range(1..=50);
        }
        t.language = if self.rng.random_bool(profile.foreign_language) {
            FOREIGN_LANGUAGES.choose(&mut self.rng).expect("non-empty").to_string()
        } else {
            "en".to_string()
        };
        t.text = text;
        t
    }

    /// Behaviour of one report, drawn around its class profile.
    fn report_profile(&mut self, class: &ClassProfile) -> ClassProfile {
        let k = self.spec.report_concentration;
        let mut p = class.clone();
        for v in [
            &mut p.retweet,
            &mut p.reply,
            &mut p.link,
            &mut p.picture,
            &mut p.question,
            &mut p.exclamation,
            &mut p.hashtag,
            &mut p.mention,
            &mut p.foreign_language,
        ] {
            let m = v.clamp(1e-3, 1.0 - 1e-3);
            *v = Beta::new(m * k, (1.0 - m) * k)
                .expect("positive parameters")
                .sample(&mut self.rng);
        }
        let shift = Normal::new(0.0, self.spec.report_audience_sd.max(1e-12)).expect("finite normal");
        p.followers_log10.0 += shift.sample(&mut self.rng);
        p.following_log10.0 += shift.sample(&mut self.rng);
        p
    }

    fn report(
        &mut self,
        lex: &Lexicon,
        zipf: &Zipf<f64>,
        label: Label,
        person: &PersonEntry,
        day: NaiveDate,
    ) -> Result<SynthReport> {
        let spec = self.spec;
        let profile = &self.report_profile(spec.profile(label));
        let n = self.rng.random_range(profile.tweets.0..=profile.tweets.1);
        let span = i64::from(self.rng.random_range(profile.span_minutes.0..=profile.span_minutes.1)) * 60;
        let latest_start = (DAY_SECONDS - span - 60).max(0);
        let t0 = day_start(day) + self.rng.random_range(0..=latest_start);
        let own_share = Beta::new(spec.purity.0, spec.purity.1)
            .expect("validated")
            .sample(&mut self.rng);
        let mut offsets: Vec<i64> = (1..n)
            .map(|_| (span as f64 * self.rng.random::<f64>().powf(profile.burst)).round() as i64)
            .collect();
        offsets.push(0);
        offsets.sort_unstable();
        let mut tweets = Vec::with_capacity(n);
        for (k, off) in offsets.into_iter().enumerate() {
            let decay = (-(k as f64) / spec.decay_tweets.max(1e-9)).exp();
            let mix = |early: f64, late: f64| (late + (early - late) * decay).clamp(0.0, 1.0);
            let rates = Rates {
                cue: mix(profile.early_cue_rate, profile.late_cue_rate),
                sense: mix(profile.early_sense_rate, profile.late_sense_rate),
                own_share,
            };
            let body = self.body(lex, zipf, label, rates);
            tweets.push(self.tweet(t0 + off, &person.name, body, profile));
        }
        let candidates = BTreeSet::from([person.id.clone()]);
        Ok(SynthReport {
            report_id: report_id(day, &candidates),
            person_id: person.id.clone(),
            label,
            first_day: day,
            timeline: Timeline::new(tweets)?,
        })
    }
}

/// Generate a corpus. The output is a pure function of `spec` and `seed`.
pub fn generate_synthetic_corpus(spec: &SynthSpec, seed: u64) -> Result<SynthCorpus> {
    spec.validate()?;
    let mut g = Generator {
        spec,
        rng: ChaCha8Rng::seed_from_u64(seed),
        used_words: HashSet::new(),
        used_names: HashSet::new(),
        next_tweet: 1,
    };
    let capitalized = |w: String| w[..1].to_ascii_uppercase() + &w[1..];
    let lex = Lexicon {
        first_names: g.words(FIRST_NAMES).into_iter().map(capitalized).collect(),
        last_names: g.words(LAST_NAMES).into_iter().map(capitalized).collect(),
        background: g.words(spec.background_words),
        cues: [
            g.words(spec.real.cue_words),
            g.words(spec.commemoration.cue_words),
            g.words(spec.fake.cue_words),
        ],
        senses: [
            g.words(spec.real.sense_words),
            g.words(spec.commemoration.sense_words),
            g.words(spec.fake.sense_words),
        ],
    };
    let zipf = Zipf::new(spec.background_words as f64, spec.background_zipf)
        .map_err(|e| Error::Config(format!("background distribution: {e}")))?;

    let counts = apportion(spec.reports, &spec.class_ratio);
    let mut labels: Vec<Label> = Label::ALL
        .iter()
        .zip(&counts)
        .flat_map(|(l, &c)| std::iter::repeat_n(*l, c))
        .collect();
    labels.shuffle(&mut g.rng);

    let latest_year = *spec.years.iter().max().expect("validated");
    let mut people = Vec::new();
    let mut reports = Vec::with_capacity(labels.len());
    for (i, label) in labels.into_iter().enumerate() {
        let year = *spec.years.choose(&mut g.rng).expect("validated");
        let day = g.random_day(year);
        let death = match label {
            Label::Real => Some(day),
            Label::Commemoration => {
                let back = g.rng.random_range(1..=30);
                let y = day.year() - back;
                Some(NaiveDate::from_ymd_opt(y, day.month(), day.day().min(28)).expect("valid day"))
            }
            Label::Fake => None,
        };
        let name = g.person_name(&lex);
        let person = g.person(
            format!("Q{}", i + 1),
            name,
            death,
            death.map_or(latest_year, |d| d.year()),
        );
        let report = g.report(&lex, &zipf, label, &person, day)?;
        people.push(person);
        reports.push(report);
    }

    // known people mentioned, but never 50 times on one day
    let mut minor = Vec::new();
    for i in 0..spec.minor_people {
        let name = g.person_name(&lex);
        minor.push(g.person(format!("M{}", i + 1), name, None, latest_year));
    }
    for i in 0..spec.idle_people {
        let name = g.person_name(&lex);
        let death = g.rng.random_bool(0.3).then(|| g.random_day(spec.years[0] - 5));
        people.push(g.person(format!("I{}", i + 1), name, death, latest_year));
    }

    let mut noise = Vec::with_capacity(spec.noise_tweets);
    let quiet = ClassProfile::default();
    let mut minor_left: Vec<(usize, NaiveDate, i64)> = minor
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let y = *spec.years.choose(&mut g.rng).expect("validated");
            let day = g.random_day(y);
            (i, day, g.rng.random_range(1..50))
        })
        .collect();
    while noise.len() < spec.noise_tweets {
        let kind = g.rng.random_range(0..3);
        let y = *spec.years.choose(&mut g.rng).expect("validated");
        let day = g.random_day(y);
        let ts = day_start(day) + g.rng.random_range(0..DAY_SECONDS);
        let body = g.body(
            &lex,
            &zipf,
            Label::Real,
            Rates {
                cue: 0.0,
                sense: 0.0,
                own_share: 1.0,
            },
        );
        match kind {
            0 => {
                let mut t = g.tweet(ts, "", body, &quiet);
                t.text = t.text.replace("RIP ", "rip my ");
                noise.push(t);
            }
            1 => {
                let stranger = g.person_name(&lex);
                noise.push(g.tweet(ts, &stranger, body, &quiet));
            }
            _ => {
                let Some(slot) = minor_left.iter_mut().find(|m| m.2 > 0) else {
                    continue;
                };
                slot.2 -= 1;
                let (i, mday) = (slot.0, slot.1);
                let ts = day_start(mday) + g.rng.random_range(0..DAY_SECONDS);
                let name = minor[i].name.clone();
                noise.push(g.tweet(ts, &name, body, &quiet));
            }
        }
    }
    people.extend(minor);
    Ok(SynthCorpus { reports, people, noise })
}
