//! Polarity conversion and corpus distribution summaries.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{CategoryLabel, Record, Subtask};
use crate::va::{VaScore, VA_MAX, VA_MIN};
use crate::{Error, Result};

/// Valence above this is positive.
pub const POSITIVE_ABOVE: f64 = 5.5;
/// Valence below this is negative.
pub const NEGATIVE_BELOW: f64 = 4.5;

/// Default histogram bin width.
pub const DEFAULT_BIN_WIDTH: f64 = 0.5;

/// Top-k values reported for category coverage.
pub const COVERAGE_KS: [usize; 2] = [5, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Neutral,
    Negative,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Positive, Polarity::Neutral, Polarity::Negative];

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Neutral => "neutral",
            Polarity::Negative => "negative",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Polarity from valence alone; both bounds of the neutral band are inclusive.
pub fn polarity_of(va: &VaScore) -> Polarity {
    let v = va.valence();
    if v > POSITIVE_ABOVE {
        Polarity::Positive
    } else if v < NEGATIVE_BELOW {
        Polarity::Negative
    } else {
        Polarity::Neutral
    }
}

/// A tuple labelled with a polarity; the source VA is kept for auditing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarTuple {
    pub aspect: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<CategoryLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opinion: Option<String>,
    pub polarity: Polarity,
    pub va: VaScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarRecord {
    pub id: String,
    pub text: String,
    pub lang: String,
    pub domain: String,
    pub subtask: Subtask,
    pub tuples: Vec<PolarTuple>,
}

pub fn to_categorical(records: &[Record]) -> Vec<PolarRecord> {
    records
        .iter()
        .map(|r| PolarRecord {
            id: r.id().into(),
            text: r.text().into(),
            lang: r.lang().into(),
            domain: r.domain().into(),
            subtask: r.subtask(),
            tuples: r
                .tuples()
                .iter()
                .map(|t| PolarTuple {
                    aspect: t.aspect().as_str().into(),
                    category: t.category().cloned(),
                    opinion: t.opinion().map(|o| o.as_str().into()),
                    polarity: polarity_of(&t.va()),
                    va: t.va(),
                })
                .collect(),
        })
        .collect()
}

/// Per-polarity summary of the two-decimal VA values; means and population SDs
/// are absent for empty buckets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketStats {
    pub polarity: Polarity,
    pub count: usize,
    pub percent: f64,
    pub mean_valence: Option<f64>,
    pub sd_valence: Option<f64>,
    pub mean_arousal: Option<f64>,
    pub sd_arousal: Option<f64>,
}

/// One row per polarity, in [`Polarity::ALL`] order.
pub fn bucket_stats(records: &[Record]) -> Vec<BucketStats> {
    let mut buckets: BTreeMap<Polarity, (GridStats, GridStats)> = BTreeMap::new();
    let mut total = 0usize;
    for t in records.iter().flat_map(Record::tuples) {
        let e = buckets.entry(polarity_of(&t.va())).or_default();
        e.0.push(t.va().valence());
        e.1.push(t.va().arousal());
        total += 1;
    }
    Polarity::ALL
        .iter()
        .map(|&p| {
            let (v, a) = buckets.remove(&p).unwrap_or_default();
            BucketStats {
                polarity: p,
                count: v.n as usize,
                percent: percent(v.n as usize, total),
                mean_valence: v.mean(),
                sd_valence: v.population_sd(),
                mean_arousal: a.mean(),
                sd_arousal: a.population_sd(),
            }
        })
        .collect()
}

/// Sums over values taken on the two-decimal VA grid, in integer hundredths,
/// so means and SDs are correctly rounded.
#[derive(Debug, Clone, Copy, Default)]
struct GridStats {
    n: i64,
    sum: i64,
    sum_sq: i128,
}

impl GridStats {
    fn push(&mut self, x: f64) {
        let c = libm::round(x * 100.0) as i64;
        self.n += 1;
        self.sum += c;
        self.sum_sq += i128::from(c) * i128::from(c);
    }

    fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum as f64 / (100 * self.n) as f64)
    }

    fn population_sd(&self) -> Option<f64> {
        (self.n > 0).then(|| {
            let n = i128::from(self.n);
            let s = i128::from(self.sum);
            libm::sqrt((n * self.sum_sq - s * s) as f64) / (100 * self.n) as f64
        })
    }
}

fn percent(part: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * part as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryCount {
    pub label: CategoryLabel,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coverage {
    pub k: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategorySection {
    pub total: usize,
    /// By count descending, then label.
    pub categories: Vec<CategoryCount>,
    pub topk_coverage: Vec<Coverage>,
}

impl CategorySection {
    /// Share of instances covered by the `k` most frequent categories.
    pub fn coverage(&self, k: usize) -> f64 {
        let covered = self.categories.iter().take(k).map(|c| c.count).sum();
        percent(covered, self.total)
    }
}

/// Category frequencies of a quadruplet corpus.
pub fn category_distribution(records: &[Record]) -> Result<CategorySection> {
    if records.iter().any(|r| r.subtask() != Subtask::DimAsqp) {
        return Err(Error::NotQuadCorpus);
    }
    let mut counts: BTreeMap<&CategoryLabel, usize> = BTreeMap::new();
    let mut total = 0;
    for c in records.iter().flat_map(Record::tuples).filter_map(|t| t.category()) {
        *counts.entry(c).or_default() += 1;
        total += 1;
    }
    let mut categories: Vec<_> = counts
        .into_iter()
        .map(|(label, count)| CategoryCount { label: label.clone(), count, percent: percent(count, total) })
        .collect();
    categories.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
    let mut section = CategorySection { total, categories, topk_coverage: Vec::new() };
    section.topk_coverage = COVERAGE_KS.iter().map(|&k| Coverage { k, percent: section.coverage(k) }).collect();
    Ok(section)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValenceBinMean {
    pub bin: usize,
    pub valence: f64,
    pub count: usize,
    pub mean_arousal: f64,
}

/// Joint VA histogram over bins centred on `1, 1 + w, …, 9`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VaSection {
    pub bin_width: f64,
    pub n_bins: usize,
    pub total: usize,
    /// `counts[valence_bin][arousal_bin]`.
    pub counts: Vec<Vec<usize>>,
    /// Occupied valence bins only.
    pub arousal_by_valence: Vec<ValenceBinMean>,
}

impl VaSection {
    /// Centre of a bin.
    pub fn center(&self, bin: usize) -> f64 {
        VA_MIN + bin as f64 * self.bin_width
    }

    pub fn bin_of(&self, x: f64) -> usize {
        let i = libm::floor((x - VA_MIN) / self.bin_width + 0.5) as usize;
        i.min(self.n_bins - 1)
    }

    /// Occupied cells as `(valence_bin, arousal_bin, count)`.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.counts.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().filter(|(_, &c)| c > 0).map(move |(j, &c)| (i, j, c))
        })
    }
}

/// Number of bins for a width that divides `[1, 9]` evenly.
pub fn bin_count(bin_width: f64) -> Result<usize> {
    let span = VA_MAX - VA_MIN;
    if !(bin_width.is_finite() && bin_width > 0.0 && bin_width <= span) {
        return Err(Error::InvalidBinWidth(bin_width));
    }
    let steps = span / bin_width;
    let rounded = libm::round(steps);
    if libm::fabs(steps - rounded) > 1e-9 {
        return Err(Error::InvalidBinWidth(bin_width));
    }
    Ok(rounded as usize + 1)
}

pub fn va_distribution(records: &[Record], bin_width: f64) -> Result<VaSection> {
    let n_bins = bin_count(bin_width)?;
    let mut section =
        VaSection { bin_width, n_bins, total: 0, counts: vec![vec![0; n_bins]; n_bins], arousal_by_valence: Vec::new() };
    let mut arousal = vec![GridStats::default(); n_bins];
    for t in records.iter().flat_map(Record::tuples) {
        let (v, a) = (t.va().valence(), t.va().arousal());
        let (i, j) = (section.bin_of(v), section.bin_of(a));
        section.counts[i][j] += 1;
        section.total += 1;
        arousal[i].push(a);
    }
    section.arousal_by_valence = arousal
        .iter()
        .enumerate()
        .filter_map(|(bin, g)| {
            let mean_arousal = g.mean()?;
            Some(ValenceBinMean { bin, valence: section.center(bin), count: g.n as usize, mean_arousal })
        })
        .collect();
    Ok(section)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionReport {
    /// Present for quadruplet corpora.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub categories: Option<CategorySection>,
    pub va: VaSection,
    pub buckets: Vec<BucketStats>,
}

pub fn distribution_report(records: &[Record], bin_width: f64) -> Result<DistributionReport> {
    let quad = !records.is_empty() && records.iter().all(|r| r.subtask() == Subtask::DimAsqp);
    Ok(DistributionReport {
        categories: if quad { Some(category_distribution(records)?) } else { None },
        va: va_distribution(records, bin_width)?,
        buckets: bucket_stats(records),
    })
}
