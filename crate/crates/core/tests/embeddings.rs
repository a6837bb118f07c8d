use ripwire::corpus::{Timeline, Tweet};
use ripwire::embeddings::{
    tokenize, train_class_models, train_sgns, training_corpus, EmbeddingModel, SgnsParams, SgnsTrainer,
};
use ripwire::Label;

fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| f64::from(x * y)).sum();
    let na: f64 = a.iter().map(|x| f64::from(x * x)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| f64::from(x * x)).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// `alpha` and `beta` share every context; `gamma` never meets them.
fn cooccurrence_corpus() -> Vec<Vec<String>> {
    let mut corpus = Vec::new();
    for i in 0..400 {
        let ctx_a = ["sun", "sky", "warm", "bright"];
        let ctx_c = ["rock", "deep", "cold", "stone"];
        let head = if i % 2 == 0 { "alpha" } else { "beta" };
        let a = ctx_a[i % 4];
        let b = ctx_a[(i / 4) % 4];
        corpus.push(vec![a.to_string(), head.to_string(), b.to_string()]);
        let c = ctx_c[i % 4];
        let d = ctx_c[(i / 4) % 4];
        corpus.push(vec![c.to_string(), "gamma".to_string(), d.to_string()]);
    }
    corpus
}

fn params(dim: usize, epochs: usize) -> SgnsParams {
    SgnsParams {
        dim,
        epochs,
        min_count: 1,
        seed: 11,
        ..SgnsParams::default()
    }
}

#[test]
fn shared_contexts_give_similar_vectors() {
    let m = train_sgns(&cooccurrence_corpus(), params(16, 10)).unwrap();
    let (a, b, c) = (
        m.vector("alpha").unwrap(),
        m.vector("beta").unwrap(),
        m.vector("gamma").unwrap(),
    );
    assert!(
        cosine(a, b) > cosine(a, c),
        "cos(a,b)={} cos(a,c)={}",
        cosine(a, b),
        cosine(a, c)
    );
}

#[test]
fn zero_epochs_returns_initialization() {
    let corpus = cooccurrence_corpus();
    let trainer = SgnsTrainer::new(&corpus, params(8, 0)).unwrap();
    let before = trainer.snapshot();
    let after = train_sgns(&corpus, params(8, 0)).unwrap();
    assert_eq!(before.vectors(), after.vectors());
    let bound = 0.5 / 8.0;
    assert!(after.vectors().iter().all(|v| v.abs() <= bound));
}

#[test]
fn loss_does_not_increase_early() {
    let corpus = cooccurrence_corpus();
    let mut trainer = SgnsTrainer::new(&corpus, params(16, 3)).unwrap();
    let losses = trainer.train();
    assert_eq!(losses.len(), 3);
    assert!(losses.windows(2).all(|w| w[1] <= w[0]), "{losses:?}");
}

#[test]
fn training_is_deterministic() {
    let corpus = cooccurrence_corpus();
    let a = train_sgns(&corpus, params(12, 2)).unwrap();
    let b = train_sgns(&corpus, params(12, 2)).unwrap();
    assert_eq!(a.vectors(), b.vectors());
    let c = train_sgns(
        &corpus,
        SgnsParams {
            seed: 12,
            ..params(12, 2)
        },
    )
    .unwrap();
    assert_ne!(a.vectors(), c.vectors());
}

fn model() -> EmbeddingModel {
    train_sgns(&cooccurrence_corpus(), params(6, 1)).unwrap()
}

#[test]
fn binary_round_trip() {
    let m = model();
    let mut buf = Vec::new();
    m.write_binary(&mut buf).unwrap();
    assert_eq!(EmbeddingModel::read_binary(&buf[..]).unwrap(), m);
    assert!(EmbeddingModel::read_binary(&buf[..buf.len() - 1]).is_err());
}

#[test]
fn text_round_trip_keeps_vectors() {
    let m = model();
    let mut buf = Vec::new();
    m.write_text(&mut buf).unwrap();
    let back = EmbeddingModel::read_text(&buf[..]).unwrap();
    assert_eq!(back.vectors(), m.vectors());
    for (tok, _) in m.vocab().iter() {
        assert_eq!(back.vector(tok), m.vector(tok));
    }
}

fn timeline(base: i64, texts: &[&str]) -> Timeline {
    Timeline::new(
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Tweet::new(base as u64 * 100 + i as u64, base + i as i64, *t))
            .collect(),
    )
    .unwrap()
}

/// Mean over tweets of the mean in-vocabulary token vector.
fn oracle(m: &EmbeddingModel, tweets: &[Tweet]) -> Vec<f64> {
    let mut acc = vec![0.0; m.dim()];
    for t in tweets {
        let vecs: Vec<&[f32]> = tokenize(&t.text).iter().filter_map(|w| m.vector(w)).collect();
        if vecs.is_empty() {
            continue;
        }
        for v in &vecs {
            for (a, x) in acc.iter_mut().zip(v.iter()) {
                *a += f64::from(*x) / vecs.len() as f64 / tweets.len() as f64;
            }
        }
    }
    acc
}

#[test]
fn timeline_embedding_matches_oracle() {
    let m = model();
    let tl = timeline(
        1000,
        &[
            "RIP alpha sun",
            "gamma rock gamma",
            "nothing known here",
            "beta BRIGHT sky sky",
        ],
    );
    let got = m.embed_timeline(tl.tweets()).unwrap();
    for (g, o) in got.iter().zip(oracle(&m, tl.tweets())) {
        assert!((g - o).abs() < 1e-12);
    }
    let single = m.embed_timeline(&tl.tweets()[..1]).unwrap();
    assert_eq!(single, m.embed_tweet(&tl.tweets()[0]));
    assert!(m.embed_timeline(&[]).is_err());
}

#[test]
fn timeline_embedding_is_linear_in_vectors_and_order_free() {
    let m = model();
    let tl = timeline(1000, &["alpha sun", "gamma rock", "beta sky warm"]);
    let base = m.embed_timeline(tl.tweets()).unwrap();
    let scaled = m.scaled(2.0).embed_timeline(tl.tweets()).unwrap();
    for (b, s) in base.iter().zip(&scaled) {
        assert!((2.0 * b - s).abs() < 1e-9);
    }
    let mut rev: Vec<Tweet> = tl.tweets().to_vec();
    rev.reverse();
    for (b, r) in base.iter().zip(m.embed_timeline(&rev).unwrap()) {
        assert!((b - r).abs() < 1e-12);
    }
}

#[test]
fn class_models_ignore_timeline_order() {
    let tls: Vec<(Timeline, Label)> = Label::ALL
        .iter()
        .enumerate()
        .flat_map(|(k, l)| {
            (0..3).map(move |j| {
                let words = ["alpha sun sky", "gamma rock cold", "beta warm bright"];
                let base = 10_000 * (k as i64 + 1) + 100 * j as i64;
                (timeline(base, &[words[k], words[(k + j) % 3], words[k]]), *l)
            })
        })
        .collect();
    let p = SgnsParams {
        min_count: 1,
        dim: 8,
        epochs: 2,
        ..SgnsParams::default()
    };
    let a = train_class_models(tls.iter().map(|(t, l)| (t, *l)), p).unwrap();
    let b = train_class_models(tls.iter().rev().map(|(t, l)| (t, *l)), p).unwrap();
    assert_eq!(a, b);
    let (_, prov) = training_corpus(tls.iter().map(|(t, _)| t));
    assert_eq!(prov.tweets, 27);
}
