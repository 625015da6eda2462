//! Line-delimited JSON files.
//!
//! Every reader skips blank lines and reports structural errors with their
//! 1-based line number. Every writer replaces its target atomically.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use dimabsa_core::agreement::{Rating, RatingBundle};
use dimabsa_core::validate::{check_va, prediction_from_raw, RawPrediction, RawRecord};
use dimabsa_core::{
    CategoricalKey, CategoryLabel, CategoryScheme, PredictionRecord, Record, Subtask, TextSpan, Violation,
    ViolationCode,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming a directory of `<name>.json` category schemes.
pub const SCHEME_DIR_ENV: &str = "DIMABSA_SCHEME_DIR";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses one value per non-blank line, keeping line numbers.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(line)
            .map_err(|e| Error::Syntax { path: path.to_path_buf(), line: i + 1, msg: e.to_string() })?;
        out.push((i + 1, value));
    }
    Ok(out)
}

pub fn to_jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(&item).map_err(|e| Error::Internal(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn load_raw_corpus(path: &Path) -> Result<Vec<RawRecord>> {
    Ok(read_jsonl(path)?.into_iter().map(|(_, r)| r).collect())
}

pub(crate) fn duplicate_ids<'a>(ids: impl Iterator<Item = &'a str>, what: &str) -> Vec<Violation> {
    let mut seen = HashSet::new();
    ids.filter(|id| !seen.insert(*id))
        .map(|id| Violation::new(id, ViolationCode::DuplicateId, format!("{what} id occurs more than once")))
        .collect()
}

/// Loads a corpus in file order.
///
/// Fails on malformed lines, on fields that do not form valid tuples (wrong
/// arity for `expected` or for the record's own subtask, bad VA, empty spans)
/// and on repeated ids. Semantic checks are left to
/// [`dimabsa_core::validate::validate`].
pub fn load_corpus(path: &Path, expected: Option<Subtask>) -> Result<Vec<Record>> {
    let raw = load_raw_corpus(path)?;
    let mut records = Vec::with_capacity(raw.len());
    let mut violations = Vec::new();
    for r in &raw {
        match r.to_record(expected) {
            Ok(rec) => records.push(rec),
            Err(v) => violations.extend(v),
        }
    }
    violations.extend(duplicate_ids(raw.iter().map(|r| r.id.as_str()), "record"));
    if violations.is_empty() {
        Ok(records)
    } else {
        Err(Error::Invalid(violations))
    }
}

pub fn write_corpus(records: &[Record], path: &Path) -> Result<()> {
    write_atomic(path, to_jsonl(records.iter().map(RawRecord::from_record))?.as_bytes())
}

/// Loads predictions for `subtask`.
///
/// Tuples with invalid fields are kept as rejected predictions. Lines whose
/// tuples have the wrong arity and repeated ids are errors.
pub fn load_predictions(path: &Path, subtask: Subtask) -> Result<Vec<PredictionRecord>> {
    let raw: Vec<RawPrediction> = read_jsonl(path)?.into_iter().map(|(_, r)| r).collect();
    let mut preds = Vec::with_capacity(raw.len());
    let mut violations = Vec::new();
    for r in &raw {
        match prediction_from_raw(r, subtask) {
            Ok(p) => preds.push(p),
            Err(v) => violations.push(v),
        }
    }
    violations.extend(duplicate_ids(raw.iter().map(|r| r.id.as_str()), "prediction"));
    if violations.is_empty() {
        Ok(preds)
    } else {
        Err(Error::Invalid(violations))
    }
}

pub fn write_predictions(preds: &[PredictionRecord], path: &Path) -> Result<()> {
    write_atomic(path, to_jsonl(preds.iter().map(RawPrediction::from_prediction))?.as_bytes())
}

/// Categorical part of a tuple as written in ratings and annotation files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawKey {
    pub aspect: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opinion: Option<String>,
}

impl RawKey {
    pub fn from_key(k: &CategoricalKey) -> Self {
        Self { aspect: k.aspect.clone(), category: k.category.as_ref().map(|c| c.to_string()), opinion: k.opinion.clone() }
    }

    pub fn to_key(&self, record_id: &str) -> std::result::Result<CategoricalKey, Violation> {
        let empty = |field: &str| Violation::new(record_id, ViolationCode::EmptyField, format!("{field} is empty"));
        let aspect = TextSpan::new(self.aspect.as_str()).map_err(|_| empty("aspect"))?;
        let opinion = match &self.opinion {
            Some(o) => Some(TextSpan::new(o.as_str()).map_err(|_| empty("opinion"))?),
            None => None,
        };
        let category = match &self.category {
            Some(c) => Some(CategoryLabel::parse(c).map_err(|e| {
                Violation::new(record_id, ViolationCode::UnknownCategory, e.to_string())
            })?),
            None => None,
        };
        Ok(CategoricalKey::new(&aspect, category.as_ref(), opinion.as_ref()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRating {
    pub annotator: String,
    pub va: String,
}

/// One rated tuple: its key and every annotator's VA.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingLine {
    pub id: String,
    #[serde(flatten)]
    pub key: RawKey,
    pub ratings: Vec<RawRating>,
}

pub fn load_ratings(path: &Path) -> Result<Vec<RatingBundle>> {
    let mut bundles = Vec::new();
    let mut violations = Vec::new();
    for (_, line) in read_jsonl::<RatingLine>(path)? {
        let key = match line.key.to_key(&line.id) {
            Ok(k) => k,
            Err(v) => {
                violations.push(v);
                continue;
            }
        };
        let mut ratings = Vec::with_capacity(line.ratings.len());
        for r in &line.ratings {
            match check_va(&line.id, &r.va) {
                Ok(va) => ratings.push(Rating { annotator: r.annotator.clone(), va }),
                Err(v) => violations.push(v),
            }
        }
        if ratings.len() == line.ratings.len() {
            bundles.push(RatingBundle::new(line.id, key, ratings)?);
        }
    }
    if violations.is_empty() {
        Ok(bundles)
    } else {
        Err(Error::Invalid(violations))
    }
}

/// One annotator's tuples for one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationLine {
    pub annotator: String,
    pub id: String,
    pub tuples: Vec<RawKey>,
}

/// Annotations grouped per annotator, annotators in order of first appearance.
pub type Annotations = Vec<(String, BTreeMap<String, Vec<CategoricalKey>>)>;

pub fn load_annotations(path: &Path) -> Result<Annotations> {
    let mut out: Annotations = Vec::new();
    let mut violations = Vec::new();
    for (_, line) in read_jsonl::<AnnotationLine>(path)? {
        let keys: Vec<_> = line
            .tuples
            .iter()
            .filter_map(|t| t.to_key(&line.id).map_err(|v| violations.push(v)).ok())
            .collect();
        let slot = match out.iter().position(|(name, _)| *name == line.annotator) {
            Some(i) => i,
            None => {
                out.push((line.annotator.clone(), BTreeMap::new()));
                out.len() - 1
            }
        };
        if out[slot].1.insert(line.id.clone(), keys).is_some() {
            violations.push(Violation::new(
                &line.id,
                ViolationCode::DuplicateId,
                format!("annotator {:?} has more than one line for this id", line.annotator),
            ));
        }
    }
    if violations.is_empty() {
        Ok(out)
    } else {
        Err(Error::Invalid(violations))
    }
}

/// Resolves a `--scheme` value.
///
/// `none` disables category checks. Other names are looked up as
/// `<name>.json` in `dir` first, then among the built-in schemes.
pub fn resolve_scheme(name: &str, dir: Option<&Path>) -> Result<Option<CategoryScheme>> {
    let name = name.trim();
    if name.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    if let Some(dir) = dir {
        let path = dir.join(format!("{name}.json"));
        if path.is_file() {
            let scheme: CategoryScheme = serde_json::from_str(&read_text(&path)?)
                .map_err(|e| Error::Syntax { path: path.clone(), line: e.line(), msg: e.to_string() })?;
            return Ok(Some(CategoryScheme::new(
                scheme.domain,
                &scheme.entities.iter().map(String::as_str).collect::<Vec<_>>(),
                &scheme.attributes.iter().map(String::as_str).collect::<Vec<_>>(),
            )));
        }
    }
    CategoryScheme::builtin(name)
        .map(Some)
        .ok_or_else(|| Error::Usage(format!("unknown category scheme {name:?}")))
}

/// Scheme directory from the environment, if set.
pub fn scheme_dir_from_env() -> Option<std::path::PathBuf> {
    std::env::var_os(SCHEME_DIR_ENV).filter(|v| !v.is_empty()).map(Into::into)
}
