//! Bounded-parallel batch inference with a per-prompt log.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use dimabsa_core::prompt::ModelClient;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::{to_jsonl, write_atomic};
use crate::report::sha256_hex;

/// Outcome of one prompt. Exactly one of `response` and `error` is set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchItem {
    pub index: usize,
    pub prompt_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub latency_ms: u64,
}

/// Sends `prompts` to `client` with at most `workers` requests in flight.
///
/// Results are in prompt order whatever the completion order, and a failed
/// prompt never stops the others.
pub fn run_batch<C>(client: &C, prompts: &[String], workers: usize) -> Vec<BatchItem>
where
    C: ModelClient + Sync + ?Sized,
{
    let slots: Vec<Mutex<Option<BatchItem>>> = prompts.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = workers.clamp(1, prompts.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(prompt) = prompts.get(i) else { break };
                let start = Instant::now();
                let result = client.complete(prompt);
                let latency_ms = start.elapsed().as_millis() as u64;
                let (response, error) = match result {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.0)),
                };
                let item = BatchItem { index: i, prompt_hash: sha256_hex(prompt.as_bytes()), response, error, latency_ms };
                *slots[i].lock().unwrap_or_else(|p| p.into_inner()) = Some(item);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap_or_else(|p| p.into_inner()).expect("every index is processed"))
        .collect()
}

pub fn write_batch_log(items: &[BatchItem], path: &Path) -> Result<()> {
    write_atomic(path, to_jsonl(items)?.as_bytes())
}
