#![allow(dead_code)]

use std::path::PathBuf;

use dimabsa_core::metrics::va_distance;
use dimabsa_core::{CategoryLabel, CategoryScheme, Record, SentimentTuple, Subtask, TextSpan, VaScore};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_dimabsa"))
}

const WORDS: &[&str] = &[
    "food", "staff", "service", "soup", "pizza", "screen", "battery", "room", "view", "bar", "price", "good",
    "slow", "always friendly", "not great", "très bon", "미소", "駅近", "бик яхшы", "\"quoted\"", "a, b", "x]y",
    "it's", "back\\slash", "(paren)",
];

/// A VA value with at most two decimals.
pub fn va_component(rng: &mut ChaCha8Rng) -> f64 {
    f64::from(rng.gen_range(100u32..=900)) / 100.0
}

pub fn va(rng: &mut ChaCha8Rng) -> VaScore {
    VaScore::new(va_component(rng), va_component(rng)).unwrap()
}

pub fn word(rng: &mut ChaCha8Rng) -> &'static str {
    WORDS.choose(rng).unwrap()
}

pub fn category(rng: &mut ChaCha8Rng) -> CategoryLabel {
    let labels = CategoryScheme::restaurant().labels();
    labels.choose(rng).unwrap().clone()
}

pub fn subtask(rng: &mut ChaCha8Rng) -> Subtask {
    *Subtask::ALL.choose(rng).unwrap()
}

pub fn tuple(rng: &mut ChaCha8Rng, subtask: Subtask) -> SentimentTuple {
    let aspect = TextSpan::new(word(rng)).unwrap();
    let va = va(rng);
    match subtask {
        Subtask::DimAsr => SentimentTuple::pair(aspect, va),
        Subtask::DimAste => SentimentTuple::triplet(aspect, TextSpan::new(word(rng)).unwrap(), va),
        Subtask::DimAsqp => SentimentTuple::quad(aspect, category(rng), TextSpan::new(word(rng)).unwrap(), va),
    }
}

pub fn tuples(rng: &mut ChaCha8Rng, subtask: Subtask, max: usize) -> Vec<SentimentTuple> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| tuple(rng, subtask)).collect()
}

/// A sentence containing every span of its tuples.
pub fn record(rng: &mut ChaCha8Rng, id: String, subtask: Subtask) -> Record {
    let tuples = tuples(rng, subtask, 5);
    let mut words: Vec<&str> = Vec::new();
    for t in &tuples {
        words.push(t.aspect().as_str());
        if let Some(o) = t.opinion() {
            words.push(o.as_str());
        }
    }
    words.push(word(rng));
    let text = words.join(" ");
    let lang = ["eng", "zho", "rus"].choose(rng).unwrap();
    Record::new(id, text, *lang, "restaurant", subtask, tuples).unwrap()
}

pub fn corpus(rng: &mut ChaCha8Rng, max: usize) -> Vec<Record> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|i| {
        let st = subtask(rng);
        record(rng, format!("r{i}"), st)
    }).collect()
}

/// Maximum total cTP over every injective pairing of same-key tuples,
/// enumerated separately for each key.
pub fn brute_force_ctp(preds: &[SentimentTuple], golds: &[SentimentTuple]) -> f64 {
    fn go(preds: &[SentimentTuple], golds: &[SentimentTuple], used: &mut Vec<bool>) -> f64 {
        let Some((p, rest)) = preds.split_first() else { return 0.0 };
        let mut best = go(rest, golds, used);
        for (j, g) in golds.iter().enumerate() {
            if !used[j] && p.key() == g.key() {
                used[j] = true;
                let v = 1.0 - va_distance(&p.va(), &g.va()) + go(rest, golds, used);
                used[j] = false;
                if v > best {
                    best = v;
                }
            }
        }
        best
    }
    let mut keys: Vec<_> = preds.iter().map(SentimentTuple::key).collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|k| {
            let p: Vec<_> = preds.iter().filter(|t| t.key() == *k).cloned().collect();
            let g: Vec<_> = golds.iter().filter(|t| t.key() == *k).cloned().collect();
            go(&p, &g, &mut vec![false; g.len()])
        })
        .sum()
}
