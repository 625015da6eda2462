use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::va::VaScore;
use crate::validate::Violation;
use crate::{Error, Result};

/// Number of categorical elements carried by a tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Arity {
    /// (aspect, VA)
    Pair,
    /// (aspect, opinion, VA)
    Triplet,
    /// (aspect, category, opinion, VA)
    Quad,
}

/// The three DimABSA subtasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subtask {
    /// VA regression for given aspects.
    #[serde(rename = "DimASR", alias = "asr", alias = "dimasr")]
    DimAsr,
    /// Joint (aspect, opinion, VA) extraction.
    #[serde(rename = "DimASTE", alias = "aste", alias = "dimaste")]
    DimAste,
    /// Joint (aspect, category, opinion, VA) extraction.
    #[serde(rename = "DimASQP", alias = "asqp", alias = "dimasqp")]
    DimAsqp,
}

impl Subtask {
    pub const ALL: [Subtask; 3] = [Subtask::DimAsr, Subtask::DimAste, Subtask::DimAsqp];

    pub fn arity(self) -> Arity {
        match self {
            Subtask::DimAsr => Arity::Pair,
            Subtask::DimAste => Arity::Triplet,
            Subtask::DimAsqp => Arity::Quad,
        }
    }

    pub fn for_arity(arity: Arity) -> Self {
        match arity {
            Arity::Pair => Subtask::DimAsr,
            Arity::Triplet => Subtask::DimAste,
            Arity::Quad => Subtask::DimAsqp,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Subtask::DimAsr => "DimASR",
            Subtask::DimAste => "DimASTE",
            Subtask::DimAsqp => "DimASQP",
        }
    }

    /// Short command-line tag (`asr`, `aste`, `asqp`).
    pub fn tag(self) -> &'static str {
        match self {
            Subtask::DimAsr => "asr",
            Subtask::DimAste => "aste",
            Subtask::DimAsqp => "asqp",
        }
    }
}

impl fmt::Display for Subtask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subtask {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Subtask::ALL
            .into_iter()
            .find(|t| lower == t.tag() || lower == t.name().to_ascii_lowercase())
            .ok_or_else(|| alloc::format!("unknown subtask {s:?} (expected asr, aste or asqp)"))
    }
}

/// A verbatim span of the annotated sentence.
///
/// The text is stored as given; comparison goes through [`TextSpan::normalized`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TextSpan(String);

impl TextSpan {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::EmptyField("text span"));
        }
        Ok(Self(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// NFC composition of the trimmed text; the unit of key equality.
    pub fn normalized(&self) -> String {
        normalize_text(&self.0)
    }
}

impl fmt::Display for TextSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn normalize_text(s: &str) -> String {
    s.trim().nfc().collect()
}

/// An `ENTITY#ATTRIBUTE` aspect category, upper-cased.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CategoryLabel {
    entity: String,
    attribute: String,
}

impl CategoryLabel {
    pub fn new(entity: &str, attribute: &str) -> Result<Self> {
        let entity = entity.trim().to_uppercase();
        let attribute = attribute.trim().to_uppercase();
        if !is_identifier(&entity) || !is_identifier(&attribute) {
            return Err(Error::InvalidCategory(alloc::format!("{entity}#{attribute}")));
        }
        Ok(Self { entity, attribute })
    }

    /// Parses `ENTITY#ATTRIBUTE`. Exactly one `#` is required; whitespace
    /// around either side is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let invalid = || Error::InvalidCategory(s.to_string());
        let (entity, attribute) = s.split_once('#').ok_or_else(invalid)?;
        if attribute.contains('#') {
            return Err(invalid());
        }
        Self::new(entity, attribute).map_err(|_| invalid())
    }

    pub fn entity(&self) -> &str {
        &self.entity
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

impl fmt::Display for CategoryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.entity, self.attribute)
    }
}

impl FromStr for CategoryLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for CategoryLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CategoryLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A gold or predicted sentiment tuple: a pair, triplet or quadruplet.
///
/// Field presence always matches the arity; the constructors are the only
/// way to build one.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentTuple {
    aspect: TextSpan,
    opinion: Option<TextSpan>,
    category: Option<CategoryLabel>,
    va: VaScore,
}

impl SentimentTuple {
    pub fn pair(aspect: TextSpan, va: VaScore) -> Self {
        Self { aspect, opinion: None, category: None, va }
    }

    pub fn triplet(aspect: TextSpan, opinion: TextSpan, va: VaScore) -> Self {
        Self { aspect, opinion: Some(opinion), category: None, va }
    }

    pub fn quad(aspect: TextSpan, category: CategoryLabel, opinion: TextSpan, va: VaScore) -> Self {
        Self { aspect, opinion: Some(opinion), category: Some(category), va }
    }

    /// Builds a tuple whose arity is implied by the optional fields.
    ///
    /// A category without an opinion has no arity and is rejected.
    pub fn from_parts(
        aspect: TextSpan,
        category: Option<CategoryLabel>,
        opinion: Option<TextSpan>,
        va: VaScore,
    ) -> Result<Self> {
        match (category, opinion) {
            (None, None) => Ok(Self::pair(aspect, va)),
            (None, Some(o)) => Ok(Self::triplet(aspect, o, va)),
            (Some(c), Some(o)) => Ok(Self::quad(aspect, c, o, va)),
            (Some(_), None) => Err(Error::EmptyField("opinion")),
        }
    }

    pub fn arity(&self) -> Arity {
        match (&self.category, &self.opinion) {
            (Some(_), _) => Arity::Quad,
            (None, Some(_)) => Arity::Triplet,
            (None, None) => Arity::Pair,
        }
    }

    pub fn aspect(&self) -> &TextSpan {
        &self.aspect
    }

    pub fn opinion(&self) -> Option<&TextSpan> {
        self.opinion.as_ref()
    }

    pub fn category(&self) -> Option<&CategoryLabel> {
        self.category.as_ref()
    }

    pub fn va(&self) -> VaScore {
        self.va
    }

    pub fn with_va(&self, va: VaScore) -> Self {
        Self { va, ..self.clone() }
    }

    /// The tuple minus its VA score.
    pub fn key(&self) -> CategoricalKey {
        CategoricalKey::new(&self.aspect, self.category.as_ref(), self.opinion.as_ref())
    }
}

/// The categorical part of a tuple, normalized for exact-match comparison.
///
/// Spans are compared code point by code point after NFC composition and
/// trimming; there is no case folding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CategoricalKey {
    pub aspect: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub category: Option<CategoryLabel>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub opinion: Option<String>,
}

/// Which elements of a key take part in a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KeyLevel {
    /// A
    Aspect,
    /// (A, C)
    AspectCategory,
    /// (A, O)
    AspectOpinion,
    /// (A, C, O) for quadruplets, (A, O) for triplets.
    Full,
}

impl KeyLevel {
    pub const ALL: [KeyLevel; 4] =
        [KeyLevel::Aspect, KeyLevel::AspectCategory, KeyLevel::AspectOpinion, KeyLevel::Full];

    pub fn label(self) -> &'static str {
        match self {
            KeyLevel::Aspect => "A",
            KeyLevel::AspectCategory => "A,C",
            KeyLevel::AspectOpinion => "A,O",
            KeyLevel::Full => "A,C,O",
        }
    }
}

impl CategoricalKey {
    pub fn new(aspect: &TextSpan, category: Option<&CategoryLabel>, opinion: Option<&TextSpan>) -> Self {
        Self {
            aspect: aspect.normalized(),
            category: category.cloned(),
            opinion: opinion.map(TextSpan::normalized),
        }
    }

    pub fn arity(&self) -> Arity {
        match (&self.category, &self.opinion) {
            (Some(_), _) => Arity::Quad,
            (None, Some(_)) => Arity::Triplet,
            (None, None) => Arity::Pair,
        }
    }

    pub fn project(&self, level: KeyLevel) -> Self {
        let (category, opinion) = match level {
            KeyLevel::Aspect => (None, None),
            KeyLevel::AspectCategory => (self.category.clone(), None),
            KeyLevel::AspectOpinion => (None, self.opinion.clone()),
            KeyLevel::Full => (self.category.clone(), self.opinion.clone()),
        };
        Self { aspect: self.aspect.clone(), category, opinion }
    }
}

/// One annotated sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    id: String,
    text: String,
    lang: String,
    domain: String,
    subtask: Subtask,
    tuples: Vec<SentimentTuple>,
}

impl Record {
    /// Fails with [`Error::ArityMismatch`] when a tuple does not have the
    /// arity the subtask implies.
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        lang: impl Into<String>,
        domain: impl Into<String>,
        subtask: Subtask,
        tuples: Vec<SentimentTuple>,
    ) -> Result<Self> {
        let expected = subtask.arity();
        if let Some(t) = tuples.iter().find(|t| t.arity() != expected) {
            return Err(Error::ArityMismatch { expected, found: t.arity() });
        }
        Ok(Self {
            id: id.into(),
            text: text.into(),
            lang: lang.into(),
            domain: domain.into(),
            subtask,
            tuples,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn subtask(&self) -> Subtask {
        self.subtask
    }

    pub fn tuples(&self) -> &[SentimentTuple] {
        &self.tuples
    }
}

/// System output for one sentence.
///
/// `rejected` holds one violation per predicted tuple that could not be
/// accepted (invalid VA, empty span, bad category). Each of them still counts
/// as a prediction when scoring, with a continuous true positive of zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionRecord {
    pub id: String,
    pub tuples: Vec<SentimentTuple>,
    pub rejected: Vec<Violation>,
}

impl PredictionRecord {
    pub fn new(id: impl Into<String>, tuples: Vec<SentimentTuple>) -> Self {
        Self { id: id.into(), tuples, rejected: Vec::new() }
    }

    /// Accepted plus rejected predictions.
    pub fn n_predicted(&self) -> usize {
        self.tuples.len() + self.rejected.len()
    }

    /// Mirrors a gold record, VA included.
    pub fn echo(record: &Record) -> Self {
        Self::new(record.id(), record.tuples().to_vec())
    }
}
