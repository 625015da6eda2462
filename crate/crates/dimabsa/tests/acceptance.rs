//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{brute_force_ctp, fixture, rng, va_component};
use dimabsa::batch::run_batch;
use dimabsa::cli::{parse_responses, ResponseLine};
use dimabsa::io;
use dimabsa_core::agreement::{
    aggregate_bundle, tuple_agreement_f1, va_agreement_rmse, AnnotatorSet, Rating, RatingBundle, SdKind,
};
use dimabsa_core::analysis::{bucket_stats, polarity_of, to_categorical, Polarity};
use dimabsa_core::matching::match_tuples;
use dimabsa_core::metrics::{score_extraction, score_regression, va_distance, ScoreReport};
use dimabsa_core::output::{format_as_model_output, format_va_output, parse_model_output};
use dimabsa_core::prompt::{build_prompt, queries_for, PromptStyle, PromptTemplate, ReplayClient};
use dimabsa_core::validate::{validate_raw, validate_raw_with};
use dimabsa_core::{
    CategoricalKey, CategoryScheme, KeyLevel, PredictionRecord, Record, SentimentTuple, Subtask, TextSpan,
    VaScore, ViolationCode,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn va(s: &str) -> VaScore {
    s.parse().unwrap()
}

fn span(s: &str) -> TextSpan {
    TextSpan::new(s).unwrap()
}

struct Suite {
    failed: usize,
    total: usize,
}

impl Suite {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Outcome) {
        self.total += 1;
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        match result {
            Ok(detail) => println!("PASS  {name}: {detail} ({ms:.1} ms)"),
            Err(detail) => {
                self.failed += 1;
                println!("FAIL  {name}: {detail} ({ms:.1} ms)");
            }
        }
    }
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let gold = io::load_corpus(&fixture("worked_gold.jsonl"), Some(Subtask::DimAste)).map_err(err)?;
    let preds = io::load_predictions(&fixture("worked_pred.jsonl"), Subtask::DimAste).map_err(err)?;
    let r = score_extraction(Subtask::DimAste, &preds, &gold).map_err(err)?;
    let elapsed = start.elapsed();
    ensure(r.n_pred == 4 && r.n_gold == 3, || format!("counts {}/{}", r.n_pred, r.n_gold))?;
    ensure(r.total_ctp == 1.375, || format!("total cTP {}", r.total_ctp))?;
    ensure(close(r.c_recall, 0.458, 1e-3) && close(r.c_recall, 1.375 / 3.0, 1e-12), || format!("cR {}", r.c_recall))?;
    ensure(close(r.c_precision, 0.344, 1e-3) && close(r.c_precision, 0.34375, 1e-12), || {
        format!("cP {}", r.c_precision)
    })?;
    ensure(close(r.c_f1, 0.393, 1e-3) && close(r.c_f1, 0.39285714285714285, 1e-12), || format!("cF1 {}", r.c_f1))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "total_cTP={} cP={:.5} cR={:.5} cF1={:.5} in {:?}",
        r.total_ctp, r.c_precision, r.c_recall, r.c_f1, elapsed
    ))
}

fn distance_anchors() -> Outcome {
    let cases = [("8#8", "7#7", 0.125), ("7.5#7.5", "3.5#3.5", 0.5), ("1#1", "9#9", 1.0)];
    for (p, g, want) in cases {
        let d = va_distance(&va(p), &va(g));
        ensure(d == want, || format!("dist({p}, {g}) = {d:e}, want {want}"))?;
    }
    Ok("0.125, 0.5, 1.0 bit-exact".into())
}

/// A sentence made of a few key classes (each with up to six predictions and
/// six gold tuples) plus unmatched noise.
fn matching_case(rng: &mut ChaCha8Rng) -> (Vec<SentimentTuple>, Vec<SentimentTuple>) {
    let subtask = common::subtask(rng);
    let coarse = rng.gen_bool(0.5);
    let draw_va = |rng: &mut ChaCha8Rng| {
        if coarse {
            let x = f64::from(rng.gen_range(5u8..=7));
            VaScore::new(x, x).unwrap()
        } else {
            common::va(rng)
        }
    };
    let (mut preds, mut golds) = (Vec::new(), Vec::new());
    for c in 0..rng.gen_range(1..=3) {
        let base = common::tuple(rng, subtask);
        let base = SentimentTuple::from_parts(
            span(&format!("class{c}")),
            base.category().cloned(),
            base.opinion().cloned(),
            base.va(),
        )
        .unwrap();
        for _ in 0..rng.gen_range(0..=6) {
            preds.push(base.with_va(draw_va(rng)));
        }
        for _ in 0..rng.gen_range(0..=6) {
            golds.push(base.with_va(draw_va(rng)));
        }
    }
    for n in 0..rng.gen_range(0..=2) {
        let t = common::tuple(rng, subtask);
        let noise = SentimentTuple::from_parts(span(&format!("noise{n}")), t.category().cloned(), t.opinion().cloned(), t.va())
            .unwrap();
        if rng.gen_bool(0.5) {
            preds.push(noise);
        } else {
            golds.push(noise);
        }
    }
    preds.shuffle(rng);
    golds.shuffle(rng);
    (preds, golds)
}

fn matching_oracle() -> Outcome {
    let mut rng = rng(0x6d61_7463);
    let mut tied = 0;
    for case in 0..1000 {
        let (preds, golds) = matching_case(&mut rng);
        let m = match_tuples(&preds, &golds).map_err(err)?;
        let want = brute_force_ctp(&preds, &golds);
        ensure(close(m.total_ctp(), want, 1e-12), || {
            format!("case {case}: assignment {} vs brute force {want}", m.total_ctp())
        })?;
        for a in &m.assignments {
            ensure(preds[a.pred].key() == golds[a.gold].key(), || format!("case {case}: cross-key match"))?;
        }
        tied += usize::from(m.tied);
    }
    Ok(format!("1000 sentences agree to 1e-12 ({tied} with tied optima)"))
}

fn perturb(rng: &mut ChaCha8Rng, t: &SentimentTuple) -> SentimentTuple {
    t.with_va(VaScore::new(va_component(rng), va_component(rng)).unwrap())
}

/// Gold corpus and predictions derived from it. With `exact` every copied
/// tuple keeps its gold VA.
fn metric_case(rng: &mut ChaCha8Rng, exact: bool) -> (Subtask, Vec<Record>, Vec<PredictionRecord>) {
    let subtask = if rng.gen_bool(0.5) { Subtask::DimAste } else { Subtask::DimAsqp };
    let n = rng.gen_range(1..=8);
    let gold: Vec<Record> = (0..n).map(|i| common::record(rng, format!("g{i}"), subtask)).collect();
    let mut preds = Vec::new();
    for r in &gold {
        if rng.gen_bool(0.1) {
            continue;
        }
        let mut tuples = Vec::new();
        for t in r.tuples() {
            match rng.gen_range(0..4) {
                0 => {}
                1 if !exact => tuples.push(perturb(rng, t)),
                _ => tuples.push(t.clone()),
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            tuples.push(common::tuple(rng, subtask));
        }
        preds.push(PredictionRecord::new(r.id(), tuples));
    }
    if rng.gen_bool(0.2) {
        preds.push(PredictionRecord::new("unknown", vec![common::tuple(rng, subtask)]));
    }
    (subtask, gold, preds)
}

fn all_matched_exact(gold: &[Record], preds: &[PredictionRecord]) -> bool {
    preds.iter().all(|p| match gold.iter().find(|g| g.id() == p.id) {
        Some(g) => match_tuples(&p.tuples, g.tuples()).unwrap().assignments.iter().all(|a| a.distance == 0.0),
        None => true,
    })
}

fn same_metrics(a: &ScoreReport, b: &ScoreReport) -> bool {
    a.n_gold == b.n_gold
        && a.n_pred == b.n_pred
        && a.classic_tp == b.classic_tp
        && close(a.total_ctp, b.total_ctp, 1e-12)
        && close(a.c_precision, b.c_precision, 1e-12)
        && close(a.c_recall, b.c_recall, 1e-12)
        && close(a.c_f1, b.c_f1, 1e-12)
        && a.classic_f1 == b.classic_f1
}

fn metric_order() -> Outcome {
    let mut rng = rng(0x6f72_6465);
    let (mut equal, mut strict) = (0, 0);
    for case in 0..1000 {
        let exact = case % 3 == 0;
        let (subtask, gold, preds) = metric_case(&mut rng, exact);
        let r = score_extraction(subtask, &preds, &gold).map_err(err)?;
        ensure(r.c_f1 <= r.classic_f1 + 1e-12, || format!("case {case}: cF1 {} > F1 {}", r.c_f1, r.classic_f1))?;
        if all_matched_exact(&gold, &preds) {
            ensure(close(r.c_f1, r.classic_f1, 1e-12), || format!("case {case}: exact VA but cF1 {} != F1 {}", r.c_f1, r.classic_f1))?;
            equal += 1;
        } else {
            ensure(r.c_f1 < r.classic_f1, || format!("case {case}: inexact VA but cF1 == F1 = {}", r.c_f1))?;
            strict += 1;
        }
        let mut g2: Vec<Record> = gold
            .iter()
            .map(|g| {
                let mut t = g.tuples().to_vec();
                t.shuffle(&mut rng);
                Record::new(g.id(), g.text(), g.lang(), g.domain(), g.subtask(), t).unwrap()
            })
            .collect();
        g2.shuffle(&mut rng);
        let mut p2 = preds.clone();
        for p in &mut p2 {
            p.tuples.shuffle(&mut rng);
        }
        p2.shuffle(&mut rng);
        let r2 = score_extraction(subtask, &p2, &g2).map_err(err)?;
        ensure(same_metrics(&r, &r2), || format!("case {case}: permutation changed the metrics"))?;
    }
    Ok(format!("1000 corpora: {equal} with equality, {strict} strictly below; permutation-invariant"))
}

fn rmse() -> Outcome {
    let mut rng = rng(0x726d_7365);
    let gold: Vec<Record> = (0..50).map(|i| common::record(&mut rng, format!("a{i}"), Subtask::DimAsr)).collect();
    let echo: Vec<_> = gold.iter().map(PredictionRecord::echo).collect();
    let r = score_regression(&echo, &gold).map_err(err)?;
    ensure(r.rmse_va == Some(0.0) && r.rmse_valence == Some(0.0) && r.rmse_arousal == Some(0.0), || {
        format!("echo rmse {:?} {:?} {:?}", r.rmse_va, r.rmse_valence, r.rmse_arousal)
    })?;
    let g = Record::new("x", "The food was good", "eng", "restaurant", Subtask::DimAsr, vec![SentimentTuple::pair(
        span("food"),
        va("5#5"),
    )])
    .unwrap();
    let p = PredictionRecord::new("x", vec![SentimentTuple::pair(span("food"), va("6#6"))]);
    let r = score_regression(&[p], &[g]).map_err(err)?;
    let joint = r.rmse_va.ok_or("joint RMSE missing")?;
    ensure(close(joint, std::f64::consts::SQRT_2, 1e-9), || format!("single pair {joint}"))?;
    ensure(r.rmse_valence == Some(1.0) && r.rmse_arousal == Some(1.0), || {
        format!("per-dimension {:?} {:?}", r.rmse_valence, r.rmse_arousal)
    })?;
    Ok(format!("echo = 0, single pair = {joint:.12}, per-dimension (1, 1)"))
}

/// Outlier filter and mean over ratings in hundredths, in exact integer
/// arithmetic: keep x when 4 (n x - s)^2 <= 9 (n q - s^2).
fn oracle_aggregate(cents: &[i64]) -> (f64, usize) {
    let n = cents.len() as i128;
    let s: i128 = cents.iter().map(|&x| x as i128).sum();
    let q: i128 = cents.iter().map(|&x| (x as i128) * (x as i128)).sum();
    let kept: Vec<i128> =
        cents.iter().map(|&x| x as i128).filter(|&x| 4 * (n * x - s).pow(2) <= 9 * (n * q - s * s)).collect();
    let sum: i128 = kept.iter().sum();
    (sum as f64 / (100 * kept.len()) as f64, kept.len())
}

fn aggregation() -> Outcome {
    let mut rng = rng(0x6167_6772);
    let key = CategoricalKey::new(&span("food"), None, None);
    let mut discarded = 0;
    for case in 0..1000 {
        let integer = rng.gen_bool(0.5);
        let draw = |rng: &mut ChaCha8Rng| -> i64 {
            if integer {
                100 * rng.gen_range(1..=9)
            } else {
                rng.gen_range(100..=900)
            }
        };
        let v: Vec<i64> = (0..5).map(|_| draw(&mut rng)).collect();
        let a: Vec<i64> = (0..5).map(|_| draw(&mut rng)).collect();
        let ratings = (0..5)
            .map(|i| Rating {
                annotator: format!("ann{i}"),
                va: VaScore::new(v[i] as f64 / 100.0, a[i] as f64 / 100.0).unwrap(),
            })
            .collect();
        let bundle = RatingBundle::new(format!("b{case}"), key.clone(), ratings).map_err(err)?;
        let got = aggregate_bundle(&bundle, SdKind::Population);
        let (want_v, kept_v) = oracle_aggregate(&v);
        let (want_a, kept_a) = oracle_aggregate(&a);
        ensure(got.kept_valence == kept_v && got.kept_arousal == kept_a, || {
            format!("case {case}: kept {}/{} vs oracle {kept_v}/{kept_a} for {v:?} {a:?}", got.kept_valence, got.kept_arousal)
        })?;
        ensure(close(got.va.valence(), want_v, 1e-12) && close(got.va.arousal(), want_a, 1e-12), || {
            format!("case {case}: {} vs oracle {want_v}#{want_a}", got.va)
        })?;
        discarded += 10 - kept_v - kept_a;
    }
    let ratings = [7.0, 7.0, 7.0, 7.0, 1.0]
        .iter()
        .enumerate()
        .map(|(i, &x)| Rating { annotator: format!("ann{i}"), va: VaScore::new(x, 5.0).unwrap() })
        .collect();
    let got = aggregate_bundle(&RatingBundle::new("fixed", key, ratings).map_err(err)?, SdKind::Population);
    ensure(got.va.to_string() == "7.00#5.00" && got.kept_valence == 4, || {
        format!("[7,7,7,7,1] gave {} keeping {}", got.va, got.kept_valence)
    })?;
    Ok(format!("1000 bundles match the exact oracle ({discarded} ratings discarded); [7,7,7,7,1] -> 7.00"))
}

fn agreement() -> Outcome {
    let key = CategoricalKey::new(&span("food"), None, None);
    let ratings = [6.0, 7.0, 7.0, 8.0, 7.0]
        .iter()
        .enumerate()
        .map(|(i, &x)| Rating { annotator: format!("ann{i}"), va: VaScore::new(x, 5.0).unwrap() })
        .collect();
    let (v, a) = va_agreement_rmse(&[RatingBundle::new("r", key, ratings).map_err(err)?]).map_err(err)?;
    ensure(close(v, 0.4, 1e-9) && a == 0.0, || format!("[6,7,7,8,7] gave ({v}, {a})"))?;

    let mut rng = rng(0x6167_7265);
    let mut bundles = Vec::new();
    let mut records = BTreeMap::new();
    for i in 0..40 {
        let t = common::tuple(&mut rng, Subtask::DimAsqp);
        let shared = common::va(&mut rng);
        let ratings = (0..5).map(|j| Rating { annotator: format!("ann{j}"), va: shared }).collect();
        bundles.push(RatingBundle::new(format!("s{i}"), t.key(), ratings).map_err(err)?);
        let keys: Vec<_> = common::tuples(&mut rng, Subtask::DimAsqp, 4).iter().map(SentimentTuple::key).collect();
        records.insert(format!("s{i}"), keys);
    }
    let (v, a) = va_agreement_rmse(&bundles).map_err(err)?;
    ensure(v == 0.0 && a == 0.0, || format!("identical ratings gave ({v}, {a})"))?;
    let set = AnnotatorSet::new(vec![("x".into(), records.clone()), ("y".into(), records)]).map_err(err)?;
    for level in KeyLevel::ALL {
        let f1 = tuple_agreement_f1(&set, level).map_err(err)?;
        ensure(f1 == 1.0, || format!("identical annotations at {level:?} gave F1 {f1}"))?;
    }
    Ok(format!("[6,7,7,8,7] valence RMSE = {v:.1}; identical annotators give (0, 0) and F1 = 1.0", v = 0.4))
}

fn conversion() -> Outcome {
    let boundary = [("5.50#5", Polarity::Neutral), ("5.51#5", Polarity::Positive), ("4.49#5", Polarity::Negative)];
    for (s, want) in boundary {
        let got = polarity_of(&va(s));
        ensure(got == want, || format!("{s} -> {got:?}, want {want:?}"))?;
    }
    let records = io::load_corpus(&fixture("conversion_30.jsonl"), None).map_err(err)?;
    let stats = bucket_stats(&records);
    let converted = to_categorical(&records);
    let mut oracle: BTreeMap<&str, (usize, i64, i64)> = BTreeMap::new();
    let mut total = 0;
    for t in records.iter().flat_map(Record::tuples) {
        let v = (t.va().valence() * 100.0).round() as i64;
        let a = (t.va().arousal() * 100.0).round() as i64;
        let label = if v > 550 {
            "positive"
        } else if v < 450 {
            "negative"
        } else {
            "neutral"
        };
        let e = oracle.entry(label).or_default();
        e.0 += 1;
        e.1 += v;
        e.2 += a;
        total += 1;
    }
    ensure(total == 30, || format!("fixture has {total} tuples"))?;
    let n_converted: usize = converted.iter().map(|r| r.tuples.len()).sum();
    ensure(n_converted == 30, || format!("conversion kept {n_converted} tuples"))?;
    let mut summary = Vec::new();
    for b in &stats {
        let (count, sv, sa) = oracle.get(b.polarity.as_str()).copied().unwrap_or_default();
        ensure(b.count == count, || format!("{}: count {} vs {count}", b.polarity, b.count))?;
        ensure(b.percent == 100.0 * count as f64 / 30.0, || format!("{}: percent {}", b.polarity, b.percent))?;
        let mean = |s: i64| (count > 0).then(|| s as f64 / (100 * count) as f64);
        ensure(b.mean_valence == mean(sv) && b.mean_arousal == mean(sa), || {
            format!("{}: means {:?}/{:?} vs {:?}/{:?}", b.polarity, b.mean_valence, b.mean_arousal, mean(sv), mean(sa))
        })?;
        summary.push(format!("{}={}", b.polarity, b.count));
    }
    Ok(format!("boundaries hold; 30-tuple buckets {} match the oracle exactly", summary.join(" ")))
}

fn round_trips() -> Outcome {
    let mut rng = rng(0x726f_756e);
    let dir = tempfile::tempdir().map_err(err)?;
    let path = dir.path().join("corpus.jsonl");
    let mut records = 0;
    for case in 0..1000 {
        let corpus = common::corpus(&mut rng, 6);
        io::write_corpus(&corpus, &path).map_err(err)?;
        let back = io::load_corpus(&path, None).map_err(err)?;
        ensure(back == corpus, || format!("corpus {case} changed on write/load"))?;
        records += corpus.len();
    }
    let mut tuples = 0;
    for case in 0..1000 {
        let subtask = Subtask::ALL[case % 3];
        let list = common::tuples(&mut rng, subtask, 6);
        let text = format_as_model_output(&list, subtask).map_err(err)?;
        let parsed = parse_model_output(&text, subtask, None);
        ensure(parsed.is_clean() && parsed.tuples == list, || format!("tuple list {case} changed: {text}"))?;
        tuples += list.len();
    }
    Ok(format!("1000 corpora ({records} records) and 1000 tuple lists ({tuples} tuples, all arities) round-trip"))
}

fn validation() -> Outcome {
    let raw = io::load_raw_corpus(&fixture("one_of_each_violation.jsonl")).map_err(err)?;
    let mut codes: Vec<_> = validate_raw(&raw, Some(&CategoryScheme::restaurant()), None).iter().map(|v| v.code).collect();
    codes.sort();
    let mut want = ViolationCode::ALL.to_vec();
    want.sort();
    ensure(codes == want, || format!("got {codes:?}"))?;
    let clean = io::load_raw_corpus(&fixture("data_examples.jsonl")).map_err(err)?;
    let schemes: BTreeMap<&str, CategoryScheme> = CategoryScheme::BUILTIN
        .iter()
        .map(|&d| (d, CategoryScheme::builtin(d).unwrap()))
        .collect();
    let found = validate_raw_with(&clean, |r| schemes.get(r.domain.as_str()), None);
    ensure(found.is_empty(), || format!("clean examples produced {found:?}"))?;
    Ok(format!("{} codes, one each; {} clean examples validate with none", want.len(), clean.len()))
}

fn scheme_sizes() -> Outcome {
    let want = [("restaurant", 6, 5), ("laptop", 22, 9), ("hotel", 7, 8)];
    let mut out = Vec::new();
    for (name, e, a) in want {
        let s = CategoryScheme::builtin(name).ok_or("missing scheme")?;
        ensure(s.entities.len() == e && s.attributes.len() == a && s.len() == e * a, || {
            format!("{name}: {}x{}", s.entities.len(), s.attributes.len())
        })?;
        out.push(format!("{name} {e}x{a}"));
    }
    Ok(out.join(", "))
}

fn mock_client_loop() -> Outcome {
    let corpus = io::load_corpus(&fixture("data_examples.jsonl"), None).map_err(err)?;
    let mut summary = Vec::new();
    for subtask in Subtask::ALL {
        let gold: Vec<Record> = corpus.iter().filter(|r| r.subtask() == subtask).cloned().collect();
        let mut prompts = Vec::new();
        let mut lines = Vec::new();
        let mut client = ReplayClient::new();
        for r in &gold {
            let mut template = PromptTemplate::new(subtask, PromptStyle::FewShot, 0);
            if let Some(s) = CategoryScheme::builtin(r.domain()) {
                template = template.with_scheme(s);
            }
            for (i, q) in queries_for(r).into_iter().enumerate() {
                let prompt = build_prompt(&template, &[], &q).map_err(err)?;
                let answer = match subtask {
                    Subtask::DimAsr => format_va_output(&r.tuples()[i].va()),
                    _ => format_as_model_output(r.tuples(), subtask).map_err(err)?,
                };
                client.insert(prompt.clone(), answer);
                prompts.push(prompt);
                lines.push(ResponseLine { id: q.id, aspect: q.aspect, response: String::new() });
            }
        }
        for (line, item) in lines.iter_mut().zip(run_batch(&client, &prompts, 4)) {
            line.response = item.response.ok_or_else(|| item.error.unwrap_or_default())?;
        }
        let (preds, failures) = parse_responses(&lines, subtask);
        ensure(failures.is_empty(), || format!("{subtask}: {failures:?}"))?;
        let r = match subtask {
            Subtask::DimAsr => score_regression(&preds, &gold),
            _ => score_extraction(subtask, &preds, &gold),
        }
        .map_err(err)?;
        ensure(r.c_f1 == 1.0, || format!("{subtask}: cF1 {}", r.c_f1))?;
        if subtask == Subtask::DimAsr {
            ensure(r.rmse_va == Some(0.0), || format!("RMSE {:?}", r.rmse_va))?;
        }
        summary.push(format!("{subtask} cF1=1.0 over {} prompts", prompts.len()));
    }
    Ok(summary.join("; "))
}

fn main() {
    let mut suite = Suite { failed: 0, total: 0 };
    suite.check("worked cF1 example", worked_example);
    suite.check("distance anchors", distance_anchors);
    suite.check("matching oracle", matching_oracle);
    suite.check("metric order properties", metric_order);
    suite.check("rmse", rmse);
    suite.check("aggregation oracle", aggregation);
    suite.check("agreement", agreement);
    suite.check("polarity conversion", conversion);
    suite.check("round trips", round_trips);
    suite.check("validation fixtures", validation);
    suite.check("category scheme sizes", scheme_sizes);
    suite.check("mock client end-to-end", mock_client_loop);
    println!("{} of {} criteria passed", suite.total - suite.failed, suite.total);
    if suite.failed > 0 {
        std::process::exit(1);
    }
}
