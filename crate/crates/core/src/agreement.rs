//! Gold construction from several annotators and agreement statistics.
//!
//! Categorical tuples are adjudicated first; VA ratings from the annotators
//! are then averaged after dropping ratings farther than 1.5 standard
//! deviations from the mean.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::metrics::{multiset_overlap, PrfScores};
use crate::model::{CategoricalKey, KeyLevel};
use crate::va::{VaScore, VA_MAX, VA_MIN};
use crate::{Error, Result};

/// Ratings a tuple is expected to receive.
pub const EXPECTED_RATINGS: usize = 5;

/// Multiplier of the standard deviation in the outlier rule.
pub const OUTLIER_SD_FACTOR: f64 = 1.5;

/// Standard deviation estimator used by the outlier rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdKind {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n - 1` (0 for a single value).
    Sample,
}

/// Arithmetic mean, computed around the first value so that equal inputs
/// give that value exactly. NaN for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    let Some(&x0) = values.first() else {
        return f64::NAN;
    };
    x0 + values.iter().map(|x| x - x0).sum::<f64>() / values.len() as f64
}

pub fn std_dev(values: &[f64], kind: SdKind) -> f64 {
    let n = values.len();
    let denom = match kind {
        SdKind::Population => n,
        SdKind::Sample => n.saturating_sub(1),
    };
    if denom == 0 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|x| (x - m) * (x - m)).sum();
    libm::sqrt(ss / denom as f64)
}

/// Keeps values within `1.5 σ` of the mean, bound inclusive, in input order.
pub fn filter_outliers(values: &[f64], kind: SdKind) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let m = mean(values);
    let bound = OUTLIER_SD_FACTOR * std_dev(values, kind);
    values.iter().copied().filter(|x| libm::fabs(x - m) <= bound).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub annotator: String,
    pub va: VaScore,
}

/// All VA ratings given to one tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatingBundle {
    record_id: String,
    key: CategoricalKey,
    ratings: Vec<Rating>,
}

impl RatingBundle {
    /// Requires at least one rating and distinct annotator ids.
    pub fn new(record_id: impl Into<String>, key: CategoricalKey, ratings: Vec<Rating>) -> Result<Self> {
        if ratings.is_empty() {
            return Err(Error::EmptyInput("rating bundle"));
        }
        let mut seen = BTreeSet::new();
        for r in &ratings {
            if !seen.insert(r.annotator.as_str()) {
                return Err(Error::DuplicateAnnotator(r.annotator.clone()));
            }
        }
        Ok(Self { record_id: record_id.into(), key, ratings })
    }

    pub fn record_id(&self) -> &str {
        &self.record_id
    }

    pub fn key(&self) -> &CategoricalKey {
        &self.key
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    fn valences(&self) -> Vec<f64> {
        self.ratings.iter().map(|r| r.va.valence()).collect()
    }

    fn arousals(&self) -> Vec<f64> {
        self.ratings.iter().map(|r| r.va.arousal()).collect()
    }

    fn roster(&self) -> BTreeSet<&str> {
        self.ratings.iter().map(|r| r.annotator.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateOutcome {
    pub va: VaScore,
    pub n_ratings: usize,
    pub kept_valence: usize,
    pub kept_arousal: usize,
    /// Fewer than [`EXPECTED_RATINGS`] ratings were available.
    pub under_rated: bool,
}

/// Filters each dimension independently, then averages what is left.
pub fn aggregate_bundle(bundle: &RatingBundle, kind: SdKind) -> AggregateOutcome {
    let v = filter_outliers(&bundle.valences(), kind);
    let a = filter_outliers(&bundle.arousals(), kind);
    let clamp = |x: f64| x.clamp(VA_MIN, VA_MAX);
    let va = VaScore::new(clamp(mean(&v)), clamp(mean(&a))).expect("mean of in-range ratings is in range");
    AggregateOutcome {
        va,
        n_ratings: bundle.ratings.len(),
        kept_valence: v.len(),
        kept_arousal: a.len(),
        under_rated: bundle.ratings.len() < EXPECTED_RATINGS,
    }
}

/// Gold VA of a bundle using the population standard deviation.
pub fn aggregate_va(bundle: &RatingBundle) -> VaScore {
    aggregate_bundle(bundle, SdKind::Population).va
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Adjudication {
    pub accepted: Vec<CategoricalKey>,
    pub discarded: Vec<CategoricalKey>,
}

/// Resolves the tuples of one sentence annotated by two annotators.
///
/// Keys both annotators produced are accepted. A key only one of them
/// produced is accepted when the third annotator also has it, and discarded
/// otherwise. Keys only the third annotator has are ignored. Both outputs are
/// sorted and duplicate-free.
pub fn adjudicate(
    ann1: &[CategoricalKey],
    ann2: &[CategoricalKey],
    ann3: Option<&[CategoricalKey]>,
) -> Result<Adjudication> {
    let a: BTreeSet<_> = ann1.iter().collect();
    let b: BTreeSet<_> = ann2.iter().collect();
    let disputed: Vec<_> = a.symmetric_difference(&b).copied().collect();
    let mut accepted: BTreeSet<&CategoricalKey> = a.intersection(&b).copied().collect();
    let mut discarded = Vec::new();
    if !disputed.is_empty() {
        let third: BTreeSet<_> = ann3.ok_or(Error::AdjudicationRequired(disputed.len()))?.iter().collect();
        for k in disputed {
            if third.contains(k) {
                accepted.insert(k);
            } else {
                discarded.push(k.clone());
            }
        }
    }
    discarded.sort();
    Ok(Adjudication { accepted: accepted.into_iter().cloned().collect(), discarded })
}

/// Tuple annotations of several annotators over one set of sentences.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatorSet {
    annotators: Vec<(String, BTreeMap<String, Vec<CategoricalKey>>)>,
}

impl AnnotatorSet {
    /// Every annotator must cover the same record ids.
    pub fn new(annotators: Vec<(String, BTreeMap<String, Vec<CategoricalKey>>)>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for (name, _) in &annotators {
            if !names.insert(name.as_str()) {
                return Err(Error::DuplicateAnnotator(name.clone()));
            }
        }
        if let Some((_, first)) = annotators.first() {
            if annotators.iter().any(|(_, recs)| !recs.keys().eq(first.keys())) {
                return Err(Error::CoverageMismatch);
            }
        }
        Ok(Self { annotators })
    }

    pub fn len(&self) -> usize {
        self.annotators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annotators.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.annotators.iter().map(|(n, _)| n.as_str())
    }

    pub fn records(&self, annotator: usize) -> &BTreeMap<String, Vec<CategoricalKey>> {
        &self.annotators[annotator].1
    }
}

/// Pooled F1 between two annotators, the second taken as the prediction.
///
/// Keys are projected to `level` before comparison and counted per sentence
/// as multisets. F1 is symmetric in the two annotators.
pub fn tuple_agreement(set: &AnnotatorSet, level: KeyLevel) -> Result<PrfScores> {
    if set.len() != 2 {
        return Err(Error::AnnotatorCount(set.len()));
    }
    let (reference, other) = (set.records(0), set.records(1));
    let (mut common, mut n_ref, mut n_other) = (0, 0, 0);
    for (id, keys) in reference {
        let a: Vec<_> = keys.iter().map(|k| k.project(level)).collect();
        let b: Vec<_> = other[id].iter().map(|k| k.project(level)).collect();
        common += multiset_overlap(&a, &b);
        n_ref += a.len();
        n_other += b.len();
    }
    Ok(PrfScores::from_counts(common as f64, n_other, n_ref))
}

pub fn tuple_agreement_f1(set: &AnnotatorSet, level: KeyLevel) -> Result<f64> {
    tuple_agreement(set, level).map(|s| s.f1)
}

/// Mean over annotators of each annotator's RMSE against the per-item mean
/// of all annotators, for valence and arousal separately.
///
/// The reference mean is taken over every rating, without outlier removal.
pub fn va_agreement_rmse(bundles: &[RatingBundle]) -> Result<(f64, f64)> {
    let first = bundles.first().ok_or(Error::EmptyInput("va_agreement_rmse"))?;
    let roster = first.roster();
    if bundles.iter().any(|b| b.roster() != roster) {
        return Err(Error::RosterMismatch);
    }
    let mut sq: BTreeMap<&str, (f64, f64)> = roster.iter().map(|&a| (a, (0.0, 0.0))).collect();
    for b in bundles {
        let mv = mean(&b.valences());
        let ma = mean(&b.arousals());
        for r in &b.ratings {
            let e = sq.get_mut(r.annotator.as_str()).expect("roster checked");
            e.0 += (r.va.valence() - mv) * (r.va.valence() - mv);
            e.1 += (r.va.arousal() - ma) * (r.va.arousal() - ma);
        }
    }
    let n = bundles.len() as f64;
    let k = sq.len() as f64;
    let (v, a) = sq
        .values()
        .fold((0.0, 0.0), |(v, a), (sv, sa)| (v + libm::sqrt(sv / n), a + libm::sqrt(sa / n)));
    Ok((v / k, a / k))
}
