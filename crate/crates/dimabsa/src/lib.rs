//! File formats, reports and the `dimabsa` command-line tool.
//!
//! The computations live in [`dimabsa_core`]; this crate adds line-delimited
//! JSON IO with atomic writes, report rendering, a bounded-parallel batch
//! runner for model clients, and the command driver.

pub mod batch;
pub mod cli;
mod error;
pub mod io;
pub mod report;

pub use error::{exit, Error, Result};
