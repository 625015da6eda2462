//! Corpus validation and the line-level record schema.
//!
//! [`RawRecord`] and [`RawTuple`] mirror one corpus line with every field as
//! text, so that problems can be reported as [`Violation`]s instead of
//! aborting at the first bad value. Typed [`Record`]s are built from them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{normalize_text, CategoryLabel, Record, SentimentTuple, Subtask, TextSpan};
use crate::scheme::CategoryScheme;
use crate::va::{parse_va_string, VaError, VaScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    SpanNotSubstring,
    UnknownCategory,
    VaOutOfRange,
    MalformedVa,
    ArityMismatch,
    DuplicateTuple,
    DuplicateId,
    EmptyField,
}

impl ViolationCode {
    pub const ALL: [ViolationCode; 8] = [
        ViolationCode::SpanNotSubstring,
        ViolationCode::UnknownCategory,
        ViolationCode::VaOutOfRange,
        ViolationCode::MalformedVa,
        ViolationCode::ArityMismatch,
        ViolationCode::DuplicateTuple,
        ViolationCode::DuplicateId,
        ViolationCode::EmptyField,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::SpanNotSubstring => "SPAN_NOT_SUBSTRING",
            ViolationCode::UnknownCategory => "UNKNOWN_CATEGORY",
            ViolationCode::VaOutOfRange => "VA_OUT_OF_RANGE",
            ViolationCode::MalformedVa => "MALFORMED_VA",
            ViolationCode::ArityMismatch => "ARITY_MISMATCH",
            ViolationCode::DuplicateTuple => "DUPLICATE_TUPLE",
            ViolationCode::DuplicateId => "DUPLICATE_ID",
            ViolationCode::EmptyField => "EMPTY_FIELD",
        }
    }

    /// Duplicate tuples are allowed (multiset semantics) and only reported.
    pub fn is_warning(self) -> bool {
        self == ViolationCode::DuplicateTuple
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub record_id: String,
    pub code: ViolationCode,
    pub detail: String,
}

impl Violation {
    pub fn new(record_id: impl Into<String>, code: ViolationCode, detail: impl Into<String>) -> Self {
        Self { record_id: record_id.into(), code, detail: detail.into() }
    }

    pub(crate) fn from_va_error(record_id: &str, err: &VaError) -> Self {
        let code = match err {
            VaError::Malformed(_) => ViolationCode::MalformedVa,
            VaError::OutOfRange { .. } => ViolationCode::VaOutOfRange,
        };
        Self::new(record_id, code, err.to_string())
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.code, self.record_id, self.detail)
    }
}

/// One tuple as it appears in a corpus or prediction line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTuple {
    pub aspect: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opinion: Option<String>,
    pub va: String,
}

/// One corpus line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub text: String,
    pub lang: String,
    pub domain: String,
    pub subtask: Subtask,
    pub tuples: Vec<RawTuple>,
}

/// One prediction line: a corpus line without text, language and domain.
///
/// `rejected` lists predicted tuples already known to be invalid, as written
/// by the response parser.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPrediction {
    pub id: String,
    pub tuples: Vec<RawTuple>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rejected: Vec<Violation>,
}

impl RawTuple {
    pub fn from_tuple(t: &SentimentTuple) -> Self {
        Self {
            aspect: t.aspect().as_str().to_string(),
            category: t.category().map(ToString::to_string),
            opinion: t.opinion().map(|o| o.as_str().to_string()),
            va: t.va().to_string(),
        }
    }

    /// Converts to a typed tuple, collecting every problem found.
    pub fn to_tuple(&self, record_id: &str) -> Result<SentimentTuple, Vec<Violation>> {
        let mut violations = Vec::new();
        let mut span = |field: &str, value: &str| match TextSpan::new(value) {
            Ok(s) => Some(s),
            Err(_) => {
                violations.push(Violation::new(record_id, ViolationCode::EmptyField, format!("{field} is empty")));
                None
            }
        };
        let aspect = span("aspect", &self.aspect);
        let opinion = self.opinion.as_deref().map(|o| span("opinion", o));
        let category = self.category.as_deref().map(|c| {
            if c.trim().is_empty() {
                violations.push(Violation::new(record_id, ViolationCode::EmptyField, "category is empty"));
                return None;
            }
            match CategoryLabel::parse(c) {
                Ok(label) => Some(label),
                Err(e) => {
                    violations.push(Violation::new(record_id, ViolationCode::UnknownCategory, e.to_string()));
                    None
                }
            }
        });
        if category.is_some() && opinion.is_none() {
            violations.push(Violation::new(
                record_id,
                ViolationCode::ArityMismatch,
                "tuple has a category but no opinion",
            ));
        }
        let va = if self.va.trim().is_empty() {
            violations.push(Violation::new(record_id, ViolationCode::EmptyField, "va is empty"));
            None
        } else {
            parse_va_string(&self.va)
                .map_err(|e| violations.push(Violation::from_va_error(record_id, &e)))
                .ok()
        };
        if !violations.is_empty() {
            return Err(violations);
        }
        let (Some(aspect), Some(va)) = (aspect, va) else {
            unreachable!("missing fields are always reported as violations")
        };
        SentimentTuple::from_parts(aspect, category.flatten(), opinion.flatten(), va)
            .map_err(|e| alloc::vec![Violation::new(record_id, ViolationCode::ArityMismatch, e.to_string())])
    }
}

impl RawRecord {
    pub fn from_record(r: &Record) -> Self {
        Self {
            id: r.id().to_string(),
            text: r.text().to_string(),
            lang: r.lang().to_string(),
            domain: r.domain().to_string(),
            subtask: r.subtask(),
            tuples: r.tuples().iter().map(RawTuple::from_tuple).collect(),
        }
    }

    /// Converts the line into a [`Record`].
    ///
    /// Only per-line problems are detected here: empty fields, bad VA strings,
    /// unparseable categories and arity mismatches. A record labelled with a
    /// different subtask than `expected` is an arity mismatch.
    pub fn to_record(&self, expected: Option<Subtask>) -> Result<Record, Vec<Violation>> {
        let (tuples, mut violations) = self.convert_tuples(expected);
        if self.id.trim().is_empty() {
            violations.insert(0, Violation::new(&self.id, ViolationCode::EmptyField, "id is empty"));
        }
        if !violations.is_empty() {
            return Err(violations);
        }
        Record::new(&self.id, &self.text, &self.lang, &self.domain, self.subtask, tuples)
            .map_err(|e| alloc::vec![Violation::new(&self.id, ViolationCode::ArityMismatch, e.to_string())])
    }

    fn convert_tuples(&self, expected: Option<Subtask>) -> (Vec<SentimentTuple>, Vec<Violation>) {
        let mut violations = Vec::new();
        if let Some(expected) = expected.filter(|e| *e != self.subtask) {
            violations.push(Violation::new(
                &self.id,
                ViolationCode::ArityMismatch,
                format!("record is labelled {} but {} was expected", self.subtask, expected),
            ));
        }
        let arity = self.subtask.arity();
        let mut tuples = Vec::with_capacity(self.tuples.len());
        for (i, raw) in self.tuples.iter().enumerate() {
            match raw.to_tuple(&self.id) {
                Ok(t) if t.arity() != arity => violations.push(Violation::new(
                    &self.id,
                    ViolationCode::ArityMismatch,
                    format!("tuple {i} is a {:?} but {} needs {:?}", t.arity(), self.subtask, arity),
                )),
                Ok(t) => tuples.push(t),
                Err(v) => violations.extend(v),
            }
        }
        (tuples, violations)
    }
}

fn check_record(
    id: &str,
    text: &str,
    tuples: &[SentimentTuple],
    scheme: Option<&CategoryScheme>,
    out: &mut Vec<Violation>,
) {
    let sentence = normalize_text(text);
    for t in tuples {
        let spans = core::iter::once(("aspect", t.aspect())).chain(t.opinion().map(|o| ("opinion", o)));
        for (field, span) in spans {
            if !sentence.contains(span.normalized().as_str()) {
                out.push(Violation::new(
                    id,
                    ViolationCode::SpanNotSubstring,
                    format!("{field} {:?} does not occur in the sentence", span.as_str()),
                ));
            }
        }
        if let (Some(scheme), Some(label)) = (scheme, t.category()) {
            if !scheme.contains(label) {
                out.push(Violation::new(
                    id,
                    ViolationCode::UnknownCategory,
                    format!("{label} is not in the {} scheme", scheme.domain),
                ));
            }
        }
    }
    let mut seen: BTreeMap<(crate::CategoricalKey, String), usize> = BTreeMap::new();
    for t in tuples {
        let count = seen.entry((t.key(), t.va().to_string())).or_default();
        *count += 1;
        if *count == 2 {
            out.push(Violation::new(
                id,
                ViolationCode::DuplicateTuple,
                format!("tuple ({}, {}) occurs more than once", t.aspect(), t.va()),
            ));
        }
    }
}

fn check_duplicate_ids<'a>(ids: impl Iterator<Item = &'a str>, out: &mut Vec<Violation>) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for id in ids {
        *counts.entry(id).or_default() += 1;
    }
    for (id, n) in counts.into_iter().filter(|(_, n)| *n > 1) {
        for _ in 1..n {
            out.push(Violation::new(id, ViolationCode::DuplicateId, format!("id occurs {n} times")));
        }
    }
}

/// Semantic checks on loaded records: spans must occur in the sentence,
/// categories must belong to `scheme` (when given), ids must be unique, and
/// repeated identical tuples are flagged as warnings.
///
/// Every violation is returned; the list is empty iff the corpus is clean.
pub fn validate(records: &[Record], scheme: Option<&CategoryScheme>) -> Vec<Violation> {
    let mut out = Vec::new();
    for r in records {
        check_record(r.id(), r.text(), r.tuples(), scheme, &mut out);
    }
    check_duplicate_ids(records.iter().map(Record::id), &mut out);
    out
}

/// Full validation of raw corpus lines, including the per-line problems that
/// keep a line from becoming a [`Record`].
pub fn validate_raw(
    records: &[RawRecord],
    scheme: Option<&CategoryScheme>,
    expected: Option<Subtask>,
) -> Vec<Violation> {
    validate_raw_with(records, |_| scheme, expected)
}

/// [`validate_raw`] with the category scheme chosen per record, for corpora
/// that mix domains.
pub fn validate_raw_with<'s>(
    records: &[RawRecord],
    scheme_for: impl Fn(&RawRecord) -> Option<&'s CategoryScheme>,
    expected: Option<Subtask>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for r in records {
        if r.id.trim().is_empty() {
            out.push(Violation::new(&r.id, ViolationCode::EmptyField, "id is empty"));
        }
        let (tuples, violations) = r.convert_tuples(expected);
        out.extend(violations);
        check_record(&r.id, &r.text, &tuples, scheme_for(r), &mut out);
    }
    check_duplicate_ids(records.iter().map(|r| r.id.as_str()), &mut out);
    out
}

/// Converts a prediction line, rejecting tuples with invalid fields.
///
/// Rejected tuples are kept as violations on the returned record so they
/// still count as predictions. A tuple whose arity differs from `subtask` is
/// an error for the whole line.
pub fn prediction_from_raw(raw: &RawPrediction, subtask: Subtask) -> Result<crate::PredictionRecord, Violation> {
    let mut record = crate::PredictionRecord::new(&raw.id, Vec::new());
    record.rejected.clone_from(&raw.rejected);
    let arity = subtask.arity();
    for (i, t) in raw.tuples.iter().enumerate() {
        let shape = match (&t.category, &t.opinion) {
            (Some(_), _) => crate::Arity::Quad,
            (None, Some(_)) => crate::Arity::Triplet,
            (None, None) => crate::Arity::Pair,
        };
        if shape != arity {
            return Err(Violation::new(
                &raw.id,
                ViolationCode::ArityMismatch,
                format!("prediction tuple {i} is a {shape:?} but {subtask} needs {arity:?}"),
            ));
        }
        match t.to_tuple(&raw.id) {
            Ok(tuple) => record.tuples.push(tuple),
            Err(mut v) => record.rejected.push(v.remove(0)),
        }
    }
    Ok(record)
}

impl RawPrediction {
    pub fn from_prediction(p: &crate::PredictionRecord) -> Self {
        Self {
            id: p.id.clone(),
            tuples: p.tuples.iter().map(RawTuple::from_tuple).collect(),
            rejected: p.rejected.clone(),
        }
    }
}

/// Parses a VA string into a score or the violation it amounts to.
pub fn check_va(record_id: &str, s: &str) -> Result<VaScore, Violation> {
    parse_va_string(s).map_err(|e| Violation::from_va_error(record_id, &e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn raw_quad(aspect: &str, category: &str, opinion: &str, va: &str) -> RawTuple {
        RawTuple {
            aspect: aspect.into(),
            category: Some(category.into()),
            opinion: Some(opinion.into()),
            va: va.into(),
        }
    }

    fn raw_record(id: &str, text: &str, subtask: Subtask, tuples: Vec<RawTuple>) -> RawRecord {
        RawRecord { id: id.into(), text: text.into(), lang: "eng".into(), domain: "restaurant".into(), subtask, tuples }
    }

    fn codes(v: &[Violation]) -> Vec<ViolationCode> {
        v.iter().map(|v| v.code).collect()
    }

    #[test]
    fn substring_rule() {
        let ok = raw_record(
            "1",
            "The food was excellent",
            Subtask::DimAsr,
            vec![RawTuple { aspect: "food".into(), category: None, opinion: None, va: "8.00#8.12".into() }],
        );
        assert!(validate_raw(&[ok.clone()], None, None).is_empty());
        let mut bad = ok;
        bad.tuples[0].aspect = "foods".into();
        assert_eq!(codes(&validate_raw(&[bad], None, None)), vec![ViolationCode::SpanNotSubstring]);
    }

    #[test]
    fn unknown_category_under_scheme() {
        let r = raw_record(
            "2",
            "The food was tasty",
            Subtask::DimAsqp,
            vec![raw_quad("food", "FOOD#TASTE", "tasty", "7#6")],
        );
        let scheme = CategoryScheme::restaurant();
        assert_eq!(codes(&validate_raw(&[r.clone()], Some(&scheme), None)), vec![ViolationCode::UnknownCategory]);
        assert!(validate_raw(&[r], None, None).is_empty());
    }

    #[test]
    fn duplicates_are_warnings() {
        let t = raw_quad("sodas", "DRINKS#QUALITY", "flat", "2.40#6.80");
        let r = raw_record("3", "Their sodas are flat", Subtask::DimAsqp, vec![t.clone(), t]);
        let v = validate_raw(&[r.clone()], None, None);
        assert_eq!(codes(&v), vec![ViolationCode::DuplicateTuple]);
        assert!(v[0].code.is_warning());
        assert!(r.to_record(None).is_ok());
    }

    #[test]
    fn duplicate_ids_are_reported_per_extra_occurrence() {
        let r = raw_record("x", "a", Subtask::DimAsr, vec![]);
        let v = validate_raw(&[r.clone(), r.clone(), r], None, None);
        assert_eq!(codes(&v), vec![ViolationCode::DuplicateId, ViolationCode::DuplicateId]);
    }

    #[test]
    fn raw_conversion_collects_problems() {
        let r = raw_record(
            "4",
            "The staff",
            Subtask::DimAsqp,
            vec![raw_quad("", "SERVICE#GENERAL", "x", "12#5"), raw_quad("staff", "SERVICE", "x", "5#5")],
        );
        let errs = r.to_record(None).unwrap_err();
        assert_eq!(
            codes(&errs),
            vec![ViolationCode::EmptyField, ViolationCode::VaOutOfRange, ViolationCode::UnknownCategory]
        );
    }

    #[test]
    fn subtask_mismatch_is_arity_mismatch() {
        let r = raw_record("5", "a", Subtask::DimAsr, vec![]);
        let errs = r.to_record(Some(Subtask::DimAsqp)).unwrap_err();
        assert_eq!(codes(&errs), vec![ViolationCode::ArityMismatch]);
        let tuple_shape = raw_record(
            "6",
            "The food",
            Subtask::DimAste,
            vec![RawTuple { aspect: "food".into(), category: None, opinion: None, va: "5#5".into() }],
        );
        assert_eq!(codes(&tuple_shape.to_record(None).unwrap_err()), vec![ViolationCode::ArityMismatch]);
    }

    #[test]
    fn predictions_keep_rejected_tuples() {
        let raw = RawPrediction {
            id: "p".into(),
            tuples: vec![
                RawTuple { aspect: "staff".into(), category: None, opinion: Some("good".into()), va: "12.0#5.0".into() },
                RawTuple { aspect: "food".into(), category: None, opinion: Some("good".into()), va: "8#8".into() },
            ],
            rejected: vec![],
        };
        let p = prediction_from_raw(&raw, Subtask::DimAste).unwrap();
        assert_eq!(p.tuples.len(), 1);
        assert_eq!(p.n_predicted(), 2);
        assert_eq!(p.rejected[0].code, ViolationCode::VaOutOfRange);
        assert!(prediction_from_raw(&raw, Subtask::DimAsqp).is_err());
    }
}
