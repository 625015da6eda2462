use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{Arity, Subtask};
use crate::va::VaError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Va(#[from] VaError),
    #[error("{0} must not be empty")]
    EmptyField(&'static str),
    #[error("invalid aspect category {0:?}: expected ENTITY#ATTRIBUTE")]
    InvalidCategory(String),
    #[error("arity mismatch: expected {expected:?} tuples, found {found:?}")]
    ArityMismatch { expected: Arity, found: Arity },
    #[error("record {id:?} is labelled {found} but {expected} was expected")]
    SubtaskMismatch { id: String, expected: Subtask, found: Subtask },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("duplicate prediction id {0:?}")]
    DuplicatePredictionId(String),
    #[error("regression predictions do not align with gold: {}", .0.join("; "))]
    Misaligned(Vec<String>),
    #[error("{0} requires a non-empty input")]
    EmptyInput(&'static str),
    #[error("bin width {0} does not split [1, 9] into a whole number of bins")]
    InvalidBinWidth(f64),
    #[error("category distribution requires a quadruplet corpus")]
    NotQuadCorpus,
    #[error("annotators disagree on {0} tuple(s) but no adjudicator annotations were given")]
    AdjudicationRequired(usize),
    #[error("annotators do not cover the same records")]
    CoverageMismatch,
    #[error("tuple agreement needs exactly two annotators, got {0}")]
    AnnotatorCount(usize),
    #[error("annotator {0:?} appears more than once in a rating bundle")]
    DuplicateAnnotator(String),
    #[error("rating bundles do not share one annotator roster")]
    RosterMismatch,
    #[error("a category scheme is required for quadruplet prompts")]
    MissingScheme,
    #[error("prompt query does not fit the {0} template")]
    QueryMismatch(Subtask),
}
