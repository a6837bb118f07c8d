use std::collections::{BTreeMap, HashMap};

use chrono::Datelike;

use ripwire::corpus::synth::{generate_synthetic_corpus, SynthSpec};
use ripwire::corpus::{keep_uppercase_rip, Timeline};
use ripwire::embeddings::tokenize;
use ripwire::eval::{macro_f1, split_by_year};
use ripwire::kb::{NameIndex, PersonEntry, PersonId};
use ripwire::reports::ReportBuilder;
use ripwire::{Error, Label};

fn small() -> SynthSpec {
    SynthSpec {
        reports: 400,
        noise_tweets: 500,
        minor_people: 20,
        idle_people: 20,
        users: 50_000,
        ..SynthSpec::default()
    }
}

fn bytes(spec: &SynthSpec, seed: u64) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
    let c = generate_synthetic_corpus(spec, seed).unwrap();
    let (mut t, mut k, mut l) = (Vec::new(), Vec::new(), Vec::new());
    c.write_tweets(&mut t).unwrap();
    c.write_kb(&mut k).unwrap();
    c.write_labels(&mut l).unwrap();
    (t, k, l)
}

#[test]
fn generation_is_a_pure_function_of_spec_and_seed() {
    let spec = small();
    assert_eq!(bytes(&spec, 9), bytes(&spec, 9));
    assert_ne!(bytes(&spec, 9).0, bytes(&spec, 10).0);
}

#[test]
fn default_class_counts() {
    let c = generate_synthetic_corpus(&SynthSpec::default(), 1).unwrap();
    let mut counts = BTreeMap::new();
    for r in &c.reports {
        *counts.entry(r.label).or_insert(0) += 1;
    }
    assert_eq!(counts[&Label::Real], 2301);
    assert_eq!(counts[&Label::Commemoration], 1092);
    assert_eq!(counts[&Label::Fake], 614);
}

#[test]
fn empty_class_vocabulary_is_a_config_error() {
    let mut spec = small();
    spec.fake.cue_words = 0;
    assert!(matches!(generate_synthetic_corpus(&spec, 1), Err(Error::Config(_))));
    let mut spec = small();
    spec.real.sense_words = 0;
    assert!(matches!(generate_synthetic_corpus(&spec, 1), Err(Error::Config(_))));
}

/// Filtering, linking and report building over the generated tweets yield
/// exactly the generated reports.
#[test]
fn report_pipeline_recovers_ground_truth() {
    let corpus = generate_synthetic_corpus(&SynthSpec::default(), 2).unwrap();
    let kept: Vec<_> = corpus
        .all_tweets()
        .into_iter()
        .filter(|t| keep_uppercase_rip(&t.text))
        .collect();
    let index = NameIndex::build(&corpus.people);
    let matches: Vec<(&ripwire::corpus::Tweet, PersonId)> = kept
        .iter()
        .flat_map(|t| index.match_mentions(&t.text).into_iter().map(move |p| (*t, p)))
        .collect();
    let people: HashMap<PersonId, PersonEntry> = corpus.people.iter().map(|p| (p.id.clone(), p.clone())).collect();
    let (reports, _) = ReportBuilder::default().build(matches.iter().map(|(t, p)| (*t, p)), &people);

    assert_eq!(reports.len(), corpus.reports.len());
    let truth: HashMap<&str, _> = corpus.reports.iter().map(|r| (r.report_id.as_str(), r)).collect();
    let mut built_totals = [0usize; Label::COUNT];
    let mut true_totals = [0usize; Label::COUNT];
    for r in &reports {
        let t = truth
            .get(r.report_id.as_str())
            .unwrap_or_else(|| panic!("unexpected report {}", r.report_id));
        assert_eq!(r.timeline, t.timeline, "{}", r.report_id);
        assert_eq!(r.candidate_person_ids.iter().collect::<Vec<_>>(), vec![&t.person_id]);
        built_totals[t.label.index()] += r.timeline.len();
    }
    for r in &corpus.reports {
        true_totals[r.label.index()] += r.timeline.len();
    }
    assert_eq!(built_totals, true_totals);
}

/// Multinomial unigram Naive Bayes with add-one smoothing over all tokens of
/// a timeline.
struct NaiveBayes {
    log_prior: [f64; Label::COUNT],
    log_prob: Vec<HashMap<String, f64>>,
    unseen: [f64; Label::COUNT],
}

impl NaiveBayes {
    fn fit<'a>(data: impl Iterator<Item = (&'a Timeline, Label)>) -> NaiveBayes {
        let mut docs = [0usize; Label::COUNT];
        let mut counts: Vec<HashMap<String, f64>> = vec![HashMap::new(); Label::COUNT];
        for (tl, label) in data {
            docs[label.index()] += 1;
            for t in tl.tweets() {
                for tok in tokenize(&t.text) {
                    *counts[label.index()].entry(tok).or_default() += 1.0;
                }
            }
        }
        let vocab: std::collections::HashSet<&String> = counts.iter().flat_map(|c| c.keys()).collect();
        let v = vocab.len() as f64;
        let n: usize = docs.iter().sum();
        let mut log_prob = Vec::new();
        let mut unseen = [0.0; Label::COUNT];
        for (k, c) in counts.iter().enumerate() {
            let total: f64 = c.values().sum();
            unseen[k] = (1.0 / (total + v)).ln();
            log_prob.push(
                c.iter()
                    .map(|(w, x)| (w.clone(), ((x + 1.0) / (total + v)).ln()))
                    .collect(),
            );
        }
        NaiveBayes {
            log_prior: docs.map(|d| (d as f64 / n as f64).ln()),
            log_prob,
            unseen,
        }
    }

    fn predict(&self, tl: &Timeline) -> Label {
        let mut score = self.log_prior;
        for t in tl.tweets() {
            for tok in tokenize(&t.text) {
                for (k, s) in score.iter_mut().enumerate() {
                    *s += self.log_prob[k].get(&tok).copied().unwrap_or(self.unseen[k]);
                }
            }
        }
        let best = (0..Label::COUNT)
            .max_by(|&a, &b| score[a].total_cmp(&score[b]))
            .unwrap();
        Label::from_index(best).unwrap()
    }
}

#[test]
fn unigram_oracle_learns_disjoint_vocabularies() {
    let mut spec = SynthSpec {
        reports: 1000,
        purity: (1000.0, 0.01),
        sense_leak: 0.0,
        ..small()
    };
    for profile in [&mut spec.real, &mut spec.commemoration, &mut spec.fake] {
        profile.early_cue_rate = 0.8;
        profile.late_cue_rate = 0.8;
    }
    let corpus = generate_synthetic_corpus(&spec, 4).unwrap();
    let (train, test, _) = split_by_year(corpus.reports, |r| r.first_day.year(), None).unwrap();
    let nb = NaiveBayes::fit(train.iter().map(|r| (&r.timeline, r.label)));
    let gold: Vec<Label> = test.iter().map(|r| r.label).collect();
    let pred: Vec<Label> = test.iter().map(|r| nb.predict(&r.timeline)).collect();
    let f1 = macro_f1(&gold, &pred).unwrap();
    assert!(f1 >= 0.95, "macro-F1 {f1}");
}
