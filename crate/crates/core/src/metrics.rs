//! VA error metrics and the continuous-F1 family.
//!
//! * [`va_distance`]: Euclidean distance in the VA square divided by its
//!   diagonal `sqrt(128)`, so it lies in `[0, 1]`.
//! * continuous true positive: `1 - distance` for a prediction paired with a
//!   gold tuple of identical categorical key, `0` otherwise.
//! * cPrecision / cRecall: total cTP over the number of predicted / gold
//!   tuples, micro-aggregated over the corpus; cF1 is their harmonic mean.
//! * [`rmse_va`]: one joint RMSE over both dimensions.
//!
//! Zero denominators yield 0, except when both the prediction and gold sides
//! are empty, which scores 1.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::matching::match_tuples;
use crate::model::{normalize_text, CategoricalKey, PredictionRecord, Record, SentimentTuple, Subtask};
use crate::va::VaScore;
use crate::{Error, Result};

/// Squared diagonal of the `[1, 9]²` VA square.
pub const D_MAX_SQUARED: f64 = 128.0;

/// Normalized Euclidean distance between two VA scores, in `[0, 1]`.
pub fn va_distance(p: &VaScore, g: &VaScore) -> f64 {
    let dv = p.valence() - g.valence();
    let da = p.arousal() - g.arousal();
    // sqrt(x / 128) rather than sqrt(x) / sqrt(128): exact for the common
    // quarter-point grid, e.g. sqrt(2 / 128) == 0.125
    libm::sqrt((dv * dv + da * da) / D_MAX_SQUARED)
}

/// Continuous true positive of a prediction under a match.
pub fn ctp(m: &crate::matching::MatchResult, pred_index: usize) -> f64 {
    m.ctp(pred_index)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrfScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfScores {
    /// Precision/recall/F1 from a (possibly fractional) true-positive mass.
    pub fn from_counts(tp: f64, n_pred: usize, n_gold: usize) -> Self {
        if n_pred == 0 && n_gold == 0 {
            return Self { precision: 1.0, recall: 1.0, f1: 1.0 };
        }
        let precision = if n_pred == 0 { 0.0 } else { tp / n_pred as f64 };
        let recall = if n_gold == 0 { 0.0 } else { tp / n_gold as f64 };
        Self { precision, recall, f1: harmonic_mean(precision, recall) }
    }
}

fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Number of keys shared by two multisets.
pub(crate) fn multiset_overlap<'a>(
    a: impl IntoIterator<Item = &'a CategoricalKey>,
    b: impl IntoIterator<Item = &'a CategoricalKey>,
) -> usize {
    let mut counts: BTreeMap<&CategoricalKey, (usize, usize)> = BTreeMap::new();
    for k in a {
        counts.entry(k).or_default().0 += 1;
    }
    for k in b {
        counts.entry(k).or_default().1 += 1;
    }
    counts.values().map(|&(x, y)| x.min(y)).sum()
}

/// Classic multiset precision/recall/F1 on categorical keys, VA ignored.
///
/// `b` plays the role of the prediction and `a` of the reference.
pub fn f1_tuples(a: &[SentimentTuple], b: &[SentimentTuple]) -> Result<PrfScores> {
    if let Some(first) = a.iter().chain(b).next() {
        let expected = first.arity();
        if let Some(t) = a.iter().chain(b).find(|t| t.arity() != expected) {
            return Err(Error::ArityMismatch { expected, found: t.arity() });
        }
    }
    let ka: Vec<_> = a.iter().map(SentimentTuple::key).collect();
    let kb: Vec<_> = b.iter().map(SentimentTuple::key).collect();
    let common = multiset_overlap(&ka, &kb);
    Ok(PrfScores::from_counts(common as f64, kb.len(), ka.len()))
}

/// Joint RMSE over valence and arousal:
/// `sqrt(Σ[(Vp − Vg)² + (Ap − Ag)²] / N)`.
pub fn rmse_va(pairs: &[(VaScore, VaScore)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("rmse_va"));
    }
    let sum: f64 = pairs
        .iter()
        .map(|(p, g)| {
            let dv = p.valence() - g.valence();
            let da = p.arousal() - g.arousal();
            dv * dv + da * da
        })
        .sum();
    Ok(libm::sqrt(sum / pairs.len() as f64))
}

/// Separate RMSE for valence and for arousal.
pub fn rmse_per_dimension(pairs: &[(VaScore, VaScore)]) -> Result<(f64, f64)> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("rmse_per_dimension"));
    }
    let n = pairs.len() as f64;
    let (sv, sa) = pairs.iter().fold((0.0, 0.0), |(sv, sa), (p, g)| {
        let dv = p.valence() - g.valence();
        let da = p.arousal() - g.arousal();
        (sv + dv * dv, sa + da * da)
    });
    Ok((libm::sqrt(sv / n), libm::sqrt(sa / n)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordScore {
    pub id: String,
    pub n_gold: usize,
    pub n_pred: usize,
    /// Predictions rejected for invalid fields (counted in `n_pred`).
    pub n_rejected: usize,
    pub total_ctp: f64,
    pub classic_tp: usize,
    /// The optimal pairing for this sentence is not unique.
    pub tied: bool,
    /// The id occurs in the gold corpus.
    pub in_gold: bool,
}

/// Corpus-level scores with per-sentence diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub subtask: Subtask,
    pub n_gold: usize,
    pub n_pred: usize,
    pub total_ctp: f64,
    pub c_precision: f64,
    pub c_recall: f64,
    pub c_f1: f64,
    pub classic_tp: usize,
    pub classic_precision: f64,
    pub classic_recall: f64,
    pub classic_f1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse_va: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse_valence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse_arousal: Option<f64>,
    /// Sorted by id.
    pub per_record: Vec<RecordScore>,
}

impl ScoreReport {
    fn from_records(subtask: Subtask, per_record: Vec<RecordScore>) -> Self {
        let n_gold = per_record.iter().map(|r| r.n_gold).sum();
        let n_pred = per_record.iter().map(|r| r.n_pred).sum();
        let total_ctp = per_record.iter().map(|r| r.total_ctp).sum();
        let classic_tp = per_record.iter().map(|r| r.classic_tp).sum();
        let c = PrfScores::from_counts(total_ctp, n_pred, n_gold);
        let k = PrfScores::from_counts(classic_tp as f64, n_pred, n_gold);
        Self {
            subtask,
            n_gold,
            n_pred,
            total_ctp,
            c_precision: c.precision,
            c_recall: c.recall,
            c_f1: c.f1,
            classic_tp,
            classic_precision: k.precision,
            classic_recall: k.recall,
            classic_f1: k.f1,
            rmse_va: None,
            rmse_valence: None,
            rmse_arousal: None,
            per_record,
        }
    }

    /// Ids of sentences whose optimal pairing was not unique.
    pub fn tied_records(&self) -> impl Iterator<Item = &str> {
        self.per_record.iter().filter(|r| r.tied).map(|r| r.id.as_str())
    }
}

fn index_golds(subtask: Subtask, golds: &[Record]) -> Result<BTreeMap<&str, &Record>> {
    let mut by_id = BTreeMap::new();
    for g in golds {
        if g.subtask() != subtask {
            return Err(Error::SubtaskMismatch { id: g.id().into(), expected: subtask, found: g.subtask() });
        }
        if by_id.insert(g.id(), g).is_some() {
            return Err(Error::DuplicateId(g.id().into()));
        }
    }
    Ok(by_id)
}

fn index_preds(subtask: Subtask, preds: &[PredictionRecord]) -> Result<BTreeMap<&str, &PredictionRecord>> {
    let expected = subtask.arity();
    let mut by_id = BTreeMap::new();
    for p in preds {
        if let Some(t) = p.tuples.iter().find(|t| t.arity() != expected) {
            return Err(Error::ArityMismatch { expected, found: t.arity() });
        }
        if by_id.insert(p.id.as_str(), p).is_some() {
            return Err(Error::DuplicatePredictionId(p.id.clone()));
        }
    }
    Ok(by_id)
}

/// Scores triplet or quadruplet extraction with cP/cR/cF1 and classic P/R/F1.
///
/// Predictions for ids missing from the gold corpus are pure false positives;
/// gold ids without predictions only add to the recall denominator.
pub fn score_extraction(subtask: Subtask, preds: &[PredictionRecord], golds: &[Record]) -> Result<ScoreReport> {
    let gold_by_id = index_golds(subtask, golds)?;
    let pred_by_id = index_preds(subtask, preds)?;
    let mut ids: Vec<&str> = gold_by_id.keys().chain(pred_by_id.keys()).copied().collect();
    ids.sort_unstable();
    ids.dedup();

    let mut per_record = Vec::with_capacity(ids.len());
    for id in ids {
        let gold = gold_by_id.get(id).map_or(&[][..], |g| g.tuples());
        let pred = pred_by_id.get(id);
        let pred_tuples = pred.map_or(&[][..], |p| p.tuples.as_slice());
        let m = match_tuples(pred_tuples, gold)?;
        per_record.push(RecordScore {
            id: id.into(),
            n_gold: gold.len(),
            n_pred: pred.map_or(0, |p| p.n_predicted()),
            n_rejected: pred.map_or(0, |p| p.rejected.len()),
            total_ctp: m.total_ctp(),
            classic_tp: m.classic_tp(),
            tied: m.tied,
            in_gold: gold_by_id.contains_key(id),
        });
    }
    Ok(ScoreReport::from_records(subtask, per_record))
}

/// Scores DimASR: every gold `(id, aspect)` needs exactly one predicted VA.
///
/// Repeated aspects within a sentence are aligned by position. Missing,
/// surplus and rejected predictions are reported together as
/// [`Error::Misaligned`].
pub fn score_regression(preds: &[PredictionRecord], golds: &[Record]) -> Result<ScoreReport> {
    let subtask = Subtask::DimAsr;
    let gold_by_id = index_golds(subtask, golds)?;
    let pred_by_id = index_preds(subtask, preds)?;

    let mut problems = Vec::new();
    for (id, p) in &pred_by_id {
        if !gold_by_id.contains_key(id) {
            problems.push(format!("unexpected prediction id {id:?}"));
        }
        for v in &p.rejected {
            problems.push(format!("invalid prediction for {id:?}: {}", v.detail));
        }
    }

    let mut pairs = Vec::new();
    let mut per_record = Vec::with_capacity(gold_by_id.len());
    for (id, gold) in &gold_by_id {
        let mut predicted: BTreeMap<String, Vec<VaScore>> = BTreeMap::new();
        if let Some(p) = pred_by_id.get(id) {
            for t in &p.tuples {
                predicted.entry(t.aspect().normalized()).or_default().push(t.va());
            }
        }
        let mut used: BTreeMap<String, usize> = BTreeMap::new();
        let mut record_pairs = Vec::new();
        for t in gold.tuples() {
            let aspect = normalize_text(t.aspect().as_str());
            let k = used.entry(aspect.clone()).or_default();
            match predicted.get(&aspect).and_then(|v| v.get(*k)) {
                Some(va) => record_pairs.push((*va, t.va())),
                None => problems.push(format!("missing prediction for ({id:?}, {aspect:?}) #{}", *k + 1)),
            }
            *k += 1;
        }
        for (aspect, vas) in &predicted {
            let n_used = used.get(aspect).copied().unwrap_or(0);
            if vas.len() > n_used {
                problems.push(format!("{} surplus prediction(s) for ({id:?}, {aspect:?})", vas.len() - n_used));
            }
        }
        per_record.push(RecordScore {
            id: (*id).into(),
            n_gold: gold.tuples().len(),
            n_pred: record_pairs.len(),
            n_rejected: 0,
            total_ctp: record_pairs.iter().map(|(p, g)| 1.0 - va_distance(p, g)).sum(),
            classic_tp: record_pairs.len(),
            tied: false,
            in_gold: true,
        });
        pairs.extend(record_pairs);
    }
    if !problems.is_empty() {
        return Err(Error::Misaligned(problems));
    }

    let mut report = ScoreReport::from_records(subtask, per_record);
    if !pairs.is_empty() {
        let (v, a) = rmse_per_dimension(&pairs)?;
        report.rmse_va = Some(rmse_va(&pairs)?);
        report.rmse_valence = Some(v);
        report.rmse_arousal = Some(a);
    }
    Ok(report)
}
