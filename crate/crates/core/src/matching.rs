//! Per-sentence alignment of predicted tuples to gold tuples.
//!
//! Only tuples with equal [`CategoricalKey`]s may be paired. Within each key
//! class the pairing maximizes the summed continuous true positive, which is
//! the same as minimizing the summed normalized VA distance over a
//! maximum-cardinality matching. Ties go to the lexicographically smallest
//! `(pred_index, gold_index)` pairing.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::Serialize;

use crate::assignment::{lexicographic_assignment, CostMatrix};
use crate::metrics::va_distance;
use crate::model::{CategoricalKey, SentimentTuple};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Assignment {
    pub pred: usize,
    pub gold: usize,
    /// Normalized VA distance in `[0, 1]`.
    pub distance: f64,
}

impl Assignment {
    pub fn ctp(&self) -> f64 {
        1.0 - self.distance
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MatchResult {
    /// Sorted by prediction index.
    pub assignments: Vec<Assignment>,
    pub unmatched_pred: Vec<usize>,
    pub unmatched_gold: Vec<usize>,
    /// Another pairing with the same total exists.
    pub tied: bool,
}

impl MatchResult {
    /// Continuous true positive of one prediction; 0 when unmatched.
    pub fn ctp(&self, pred_index: usize) -> f64 {
        self.assignments
            .iter()
            .find(|a| a.pred == pred_index)
            .map_or(0.0, Assignment::ctp)
    }

    pub fn total_ctp(&self) -> f64 {
        self.assignments.iter().map(Assignment::ctp).sum()
    }

    /// Categorical true positives: assigned pairs regardless of VA.
    pub fn classic_tp(&self) -> usize {
        self.assignments.len()
    }
}

/// Matches predictions to golds of one sentence.
///
/// All tuples must share one arity.
pub fn match_tuples(preds: &[SentimentTuple], golds: &[SentimentTuple]) -> Result<MatchResult> {
    if let Some(first) = preds.iter().chain(golds).next() {
        let expected = first.arity();
        if let Some(t) = preds.iter().chain(golds).find(|t| t.arity() != expected) {
            return Err(Error::ArityMismatch { expected, found: t.arity() });
        }
    }

    let mut classes: BTreeMap<CategoricalKey, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, p) in preds.iter().enumerate() {
        classes.entry(p.key()).or_default().0.push(i);
    }
    for (j, g) in golds.iter().enumerate() {
        classes.entry(g.key()).or_default().1.push(j);
    }

    let mut result = MatchResult::default();
    let mut pred_matched = alloc::vec![false; preds.len()];
    let mut gold_matched = alloc::vec![false; golds.len()];
    for (p_idx, g_idx) in classes.values() {
        if p_idx.is_empty() || g_idx.is_empty() {
            continue;
        }
        let cost = CostMatrix::from_fn(p_idx.len(), g_idx.len(), |r, c| {
            va_distance(&preds[p_idx[r]].va(), &golds[g_idx[c]].va())
        });
        let lex = lexicographic_assignment(&cost);
        result.tied |= lex.tied;
        for (r, c) in lex.row_to_col.iter().enumerate() {
            if let Some(c) = *c {
                let (pred, gold) = (p_idx[r], g_idx[c]);
                pred_matched[pred] = true;
                gold_matched[gold] = true;
                result.assignments.push(Assignment { pred, gold, distance: cost.get(r, c) });
            }
        }
    }
    result.assignments.sort_by_key(|a| a.pred);
    result.unmatched_pred = (0..preds.len()).filter(|&i| !pred_matched[i]).collect();
    result.unmatched_gold = (0..golds.len()).filter(|&j| !gold_matched[j]).collect();
    Ok(result)
}
