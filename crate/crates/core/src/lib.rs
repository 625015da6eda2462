//! Core primitives for dimensional aspect-based sentiment analysis (DimABSA).
//!
//! Sentences carry sentiment tuples whose sentiment is a real-valued
//! valence–arousal pair on the 1–9 scale instead of a polarity label. This
//! crate holds everything that does not need an operating system:
//!
//! * the domain model ([`VaScore`], [`SentimentTuple`], [`Record`], category schemes),
//! * the `V#A` micro-format and corpus validation ([`validate`]),
//! * tolerant parsing of model responses and the matching formatter ([`output`]),
//! * optimal per-sentence matching and the continuous-F1 metric family ([`matching`], [`metrics`]),
//! * multi-annotator aggregation and agreement statistics ([`agreement`]),
//! * polarity conversion and distribution summaries ([`analysis`]),
//! * prompt construction and the model-client abstraction ([`prompt`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and the
//! command-line tool live in the `dimabsa` crate.
//!
//! ```
//! use dimabsa_core::{metrics::va_distance, VaScore};
//!
//! let p: VaScore = "8.00#8.00".parse().unwrap();
//! let g: VaScore = "7.00#7.00".parse().unwrap();
//! assert_eq!(va_distance(&p, &g), 0.125);
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod agreement;
pub mod analysis;
pub mod assignment;
mod error;
pub mod matching;
pub mod metrics;
mod model;
pub mod output;
pub mod prompt;
mod scheme;
mod va;
pub mod validate;

pub use error::Error;
pub use model::{
    Arity, CategoricalKey, CategoryLabel, KeyLevel, PredictionRecord, Record, SentimentTuple,
    Subtask, TextSpan,
};
pub use scheme::CategoryScheme;
pub use va::{format_two_decimals, parse_va_string, round_half_up_2, VaError, VaScore, VA_MAX, VA_MIN};
pub use validate::{Violation, ViolationCode};

pub type Result<T, E = Error> = core::result::Result<T, E>;
