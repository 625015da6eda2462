//! Command-line driver.
//!
//! Each command reads its inputs, builds one artifact and writes it to
//! `--out` (standard output when absent). With `--format table` a table
//! rendered from the same report goes to standard output. Exit codes are
//! listed in [`crate::exit`].

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use dimabsa_core::agreement::{
    adjudicate, aggregate_bundle, tuple_agreement, va_agreement_rmse, AnnotatorSet, SdKind,
};
use dimabsa_core::analysis::{bucket_stats, distribution_report, to_categorical, DistributionReport, DEFAULT_BIN_WIDTH};
use dimabsa_core::metrics::{score_extraction, score_regression, ScoreReport};
use dimabsa_core::output::parse_model_output;
use dimabsa_core::prompt::{build_prompt, queries_for, select_few_shot, PromptStyle, PromptTemplate, TEMPLATE_VERSION};
use dimabsa_core::validate::{prediction_from_raw, validate_raw_with, RawPrediction};
use dimabsa_core::{Arity, CategoryScheme, KeyLevel, PredictionRecord, Subtask, Violation};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{exit, Error, Result};
use crate::io::{self, RawKey};
use crate::report::{self, Format, InputDigest, RunMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Check a corpus and/or prediction file.
    Validate,
    /// Score predictions against gold.
    Score,
    /// Aggregate VA ratings and adjudicate tuple annotations.
    Aggregate,
    /// Inter-annotator agreement.
    Agree,
    /// Convert VA to polarity labels.
    Convert,
    /// Category and VA distribution summaries.
    Stats,
    /// Render prompts for a corpus.
    Prompt,
    /// Turn model responses into predictions.
    Parse,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Score => "score",
            Command::Aggregate => "aggregate",
            Command::Agree => "agree",
            Command::Convert => "convert",
            Command::Stats => "stats",
            Command::Prompt => "prompt",
            Command::Parse => "parse",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StyleArg {
    #[default]
    FewShot,
    Chat,
}

impl From<StyleArg> for PromptStyle {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::FewShot => PromptStyle::FewShot,
            StyleArg::Chat => PromptStyle::FineTuneChat,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SdArg {
    #[default]
    Population,
    Sample,
}

impl From<SdArg> for SdKind {
    fn from(s: SdArg) -> Self {
        match s {
            SdArg::Population => SdKind::Population,
            SdArg::Sample => SdKind::Sample,
        }
    }
}

fn parse_subtask(s: &str) -> std::result::Result<Subtask, String> {
    s.parse()
}

/// Options of one invocation. Every option falls back to a `DIMABSA_*`
/// environment variable.
#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "dimabsa",
    version,
    about = "Validate, score and analyse dimensional aspect-based sentiment data",
    after_help = "Exit codes: 0 ok, 1 usage, 2 invalid data, 3 I/O or internal error.\n\
                  DIMABSA_SCHEME_DIR names a directory of <name>.json category schemes."
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Gold corpus (JSONL); the query corpus for `prompt`.
    #[arg(long, env = "DIMABSA_GOLD")]
    pub gold: Option<PathBuf>,
    /// Predictions (JSONL); model responses for `parse`.
    #[arg(long, env = "DIMABSA_PRED")]
    pub pred: Option<PathBuf>,
    /// Training corpus supplying few-shot examples.
    #[arg(long, env = "DIMABSA_TRAIN")]
    pub train: Option<PathBuf>,
    /// Multi-annotator VA ratings (JSONL).
    #[arg(long, env = "DIMABSA_RATINGS")]
    pub ratings: Option<PathBuf>,
    /// Per-annotator tuple annotations (JSONL).
    #[arg(long, env = "DIMABSA_ANNOTATIONS")]
    pub annotations: Option<PathBuf>,
    /// asr, aste or asqp.
    #[arg(long, env = "DIMABSA_SUBTASK", value_parser = parse_subtask)]
    pub subtask: Option<Subtask>,
    /// restaurant, laptop, hotel, none, or a scheme file name. Defaults to
    /// the scheme named by each record's domain.
    #[arg(long, env = "DIMABSA_SCHEME")]
    pub scheme: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, env = "DIMABSA_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, env = "DIMABSA_FORMAT", default_value_t)]
    pub format: Format,
    /// Histogram bin width for `stats`; must divide 8.
    #[arg(long, env = "DIMABSA_BIN_WIDTH", default_value_t = DEFAULT_BIN_WIDTH)]
    pub bin_width: f64,
    /// Number of few-shot examples for `prompt`.
    #[arg(long, env = "DIMABSA_K", default_value_t = 0)]
    pub k: usize,
    #[arg(long, value_enum, env = "DIMABSA_STYLE", default_value_t)]
    pub style: StyleArg,
    /// Standard deviation used by the outlier filter.
    #[arg(long, value_enum, env = "DIMABSA_SD", default_value_t)]
    pub sd: SdArg,
    /// Directory for plot-ready CSV tables written by `stats`.
    #[arg(long, env = "DIMABSA_CSV_DIR")]
    pub csv_dir: Option<PathBuf>,
}

fn need<T>(opt: &Option<T>, flag: &str, cmd: Command) -> Result<()> {
    match opt {
        Some(_) => Ok(()),
        None => Err(Error::Usage(format!("{} requires --{flag}", cmd.name()))),
    }
}

impl RunConfig {
    /// Checks the options a command needs; opens no file.
    pub fn check(&self) -> Result<()> {
        let c = self.command;
        match c {
            Command::Validate => {
                if self.gold.is_none() && self.pred.is_none() {
                    return Err(Error::Usage("validate requires --gold or --pred".into()));
                }
                if self.pred.is_some() {
                    need(&self.subtask, "subtask", c)?;
                }
            }
            Command::Score => {
                need(&self.gold, "gold", c)?;
                need(&self.pred, "pred", c)?;
                need(&self.subtask, "subtask", c)?;
            }
            Command::Aggregate | Command::Agree => {
                if self.ratings.is_none() && self.annotations.is_none() {
                    return Err(Error::Usage(format!("{} requires --ratings or --annotations", c.name())));
                }
            }
            Command::Convert => need(&self.gold, "gold", c)?,
            Command::Stats => {
                need(&self.gold, "gold", c)?;
                if !(self.bin_width.is_finite() && self.bin_width > 0.0) {
                    return Err(Error::Usage(format!("--bin-width must be positive, got {}", self.bin_width)));
                }
            }
            Command::Prompt => {
                need(&self.gold, "gold", c)?;
                need(&self.subtask, "subtask", c)?;
                if self.k > 0 && self.style == StyleArg::FewShot {
                    need(&self.train, "train", c)?;
                }
            }
            Command::Parse => {
                need(&self.pred, "pred", c)?;
                need(&self.subtask, "subtask", c)?;
            }
        }
        Ok(())
    }

    fn inputs(&self) -> Vec<&Path> {
        [&self.gold, &self.pred, &self.train, &self.ratings, &self.annotations]
            .into_iter()
            .filter_map(|p| p.as_deref())
            .collect()
    }

    fn subtask(&self) -> Subtask {
        self.subtask.expect("checked by RunConfig::check")
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    /// A report value.
    Report(Value),
    /// Line-delimited data with a summary used for the table.
    Lines { body: String, summary: Value },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifact: Artifact,
    pub exit_code: u8,
}

impl Outcome {
    fn ok(artifact: Artifact) -> Self {
        Self { artifact, exit_code: exit::OK }
    }
}

/// Runs a command without touching the output destination.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    cfg.check()?;
    match cfg.command {
        Command::Validate => cmd_validate(cfg),
        Command::Score => cmd_score(cfg),
        Command::Aggregate => cmd_aggregate(cfg),
        Command::Agree => cmd_agree(cfg),
        Command::Convert => cmd_convert(cfg),
        Command::Stats => cmd_stats(cfg),
        Command::Prompt => cmd_prompt(cfg),
        Command::Parse => cmd_parse(cfg),
    }
}

/// Runs a command, writes its artifact and sidecar, and returns the exit code.
pub fn run(cfg: &RunConfig) -> u8 {
    let started = SystemTime::now();
    let clock = Instant::now();
    let (artifact, code) = match execute(cfg) {
        Ok(o) => (Some(o.artifact), o.exit_code),
        Err(e) => {
            eprintln!("error: {e}");
            for v in e.violations() {
                eprintln!("{v}");
            }
            let code = e.exit_code();
            let artifact = (code == exit::INVALID).then(|| Artifact::Report(error_report(cfg.command, &e)));
            (artifact, code)
        }
    };
    let Some(artifact) = artifact else { return code };
    if let Err(e) = emit(cfg, &artifact) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    if let Some(out) = &cfg.out {
        let meta = RunMeta {
            command: cfg.command.name().into(),
            version: env!("CARGO_PKG_VERSION"),
            args: serde_json::to_value(cfg).unwrap_or(Value::Null),
            inputs: cfg.inputs().into_iter().filter_map(|p| InputDigest::of(p).ok()).collect(),
            exit_code: code,
            started_unix_ms: started.duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0),
            elapsed_ms: clock.elapsed().as_millis(),
        };
        let written = report::to_value(&meta)
            .and_then(|v| report::to_pretty_json(&v))
            .and_then(|s| io::write_atomic(&report::sidecar_path(out), s.as_bytes()));
        if let Err(e) = written {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    code
}

fn error_report(command: Command, e: &Error) -> Value {
    json!({
        "command": command.name(),
        "status": "invalid",
        "error": e.to_string(),
        "violations": e.violations(),
    })
}

fn emit(cfg: &RunConfig, artifact: &Artifact) -> Result<()> {
    let (body, summary) = match artifact {
        Artifact::Report(v) => (report::to_pretty_json(v)?, v),
        Artifact::Lines { body, summary } => (body.clone(), summary),
    };
    match &cfg.out {
        Some(out) => io::write_atomic(out, body.as_bytes())?,
        None if cfg.format == Format::Structured => print!("{body}"),
        None => {}
    }
    if cfg.format == Format::Table {
        print!("{}", report::render_table(summary));
    }
    Ok(())
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    command: &'static str,
    n_records: usize,
    n_predictions: usize,
    errors: usize,
    warnings: usize,
    violations: &'a [Violation],
}

fn cmd_validate(cfg: &RunConfig) -> Result<Outcome> {
    let dir = io::scheme_dir_from_env();
    let fixed = cfg.scheme.as_deref().map(|s| io::resolve_scheme(s, dir.as_deref())).transpose()?;
    let mut violations = Vec::new();
    let mut n_records = 0;
    if let Some(path) = &cfg.gold {
        let raw = io::load_raw_corpus(path)?;
        n_records = raw.len();
        let mut by_domain: HashMap<&str, Option<CategoryScheme>> = HashMap::new();
        if fixed.is_none() {
            for r in &raw {
                by_domain
                    .entry(r.domain.as_str())
                    .or_insert_with(|| io::resolve_scheme(&r.domain, dir.as_deref()).ok().flatten());
            }
        }
        let scheme_for = |r: &dimabsa_core::validate::RawRecord| match &fixed {
            Some(s) => s.as_ref(),
            None => by_domain.get(r.domain.as_str()).and_then(Option::as_ref),
        };
        violations.extend(validate_raw_with(&raw, scheme_for, cfg.subtask));
    }
    let mut n_predictions = 0;
    if let Some(path) = &cfg.pred {
        let raw: Vec<RawPrediction> = io::read_jsonl(path)?.into_iter().map(|(_, r)| r).collect();
        n_predictions = raw.len();
        for r in &raw {
            match prediction_from_raw(r, cfg.subtask()) {
                Ok(p) => violations.extend(p.rejected),
                Err(v) => violations.push(v),
            }
        }
        violations.extend(io::duplicate_ids(raw.iter().map(|r| r.id.as_str()), "prediction"));
    }
    let warnings = violations.iter().filter(|v| v.code.is_warning()).count();
    let errors = violations.len() - warnings;
    let report = ValidateReport { command: "validate", n_records, n_predictions, errors, warnings, violations: &violations };
    Ok(Outcome {
        artifact: Artifact::Report(report::to_value(&report)?),
        exit_code: if errors > 0 { exit::INVALID } else { exit::OK },
    })
}

#[derive(Serialize)]
struct ScoreOutput<'a> {
    command: &'static str,
    #[serde(flatten)]
    scores: &'a ScoreReport,
    tied_records: Vec<&'a str>,
    violations: Vec<&'a Violation>,
}

fn cmd_score(cfg: &RunConfig) -> Result<Outcome> {
    let subtask = cfg.subtask();
    let gold = io::load_corpus(cfg.gold.as_deref().expect("checked"), Some(subtask))?;
    let preds = io::load_predictions(cfg.pred.as_deref().expect("checked"), subtask)?;
    let scores = match subtask {
        Subtask::DimAsr => score_regression(&preds, &gold)?,
        _ => score_extraction(subtask, &preds, &gold)?,
    };
    let out = ScoreOutput {
        command: "score",
        scores: &scores,
        tied_records: scores.tied_records().collect(),
        violations: preds.iter().flat_map(|p| &p.rejected).collect(),
    };
    Ok(Outcome::ok(Artifact::Report(report::to_value(&out)?)))
}

#[derive(Serialize)]
struct AggregatedRating {
    id: String,
    #[serde(flatten)]
    key: RawKey,
    #[serde(flatten)]
    outcome: dimabsa_core::agreement::AggregateOutcome,
}

#[derive(Serialize)]
struct AdjudicatedRecord {
    id: String,
    accepted: Vec<RawKey>,
    discarded: Vec<RawKey>,
}

fn cmd_aggregate(cfg: &RunConfig) -> Result<Outcome> {
    let mut body = serde_json::Map::new();
    body.insert("command".into(), "aggregate".into());
    if let Some(path) = &cfg.ratings {
        let kind: SdKind = cfg.sd.into();
        let items: Vec<_> = io::load_ratings(path)?
            .iter()
            .map(|b| AggregatedRating {
                id: b.record_id().into(),
                key: RawKey::from_key(b.key()),
                outcome: aggregate_bundle(b, kind),
            })
            .collect();
        body.insert("sd".into(), report::to_value(&cfg.sd)?);
        body.insert("n_items".into(), items.len().into());
        body.insert("n_under_rated".into(), items.iter().filter(|i| i.outcome.under_rated).count().into());
        body.insert("ratings".into(), report::to_value(&items)?);
    }
    if let Some(path) = &cfg.annotations {
        let mut ann = io::load_annotations(path)?;
        if !(2..=3).contains(&ann.len()) {
            return Err(Error::Usage(format!(
                "adjudication needs two annotators plus an optional third, found {}",
                ann.len()
            )));
        }
        let third = if ann.len() == 3 { ann.pop().map(|(_, m)| m) } else { None };
        let names: Vec<String> = ann.iter().map(|(n, _)| n.clone()).collect();
        let primary = AnnotatorSet::new(ann)?;
        let mut records = Vec::new();
        for (id, keys1) in primary.records(0) {
            let keys2 = &primary.records(1)[id];
            let keys3 = third.as_ref().and_then(|t| t.get(id)).map(Vec::as_slice);
            let adj = adjudicate(keys1, keys2, keys3).map_err(|source| Error::InRecord { id: id.clone(), source })?;
            records.push(AdjudicatedRecord {
                id: id.clone(),
                accepted: adj.accepted.iter().map(RawKey::from_key).collect(),
                discarded: adj.discarded.iter().map(RawKey::from_key).collect(),
            });
        }
        body.insert("annotators".into(), report::to_value(&names)?);
        body.insert("n_accepted".into(), records.iter().map(|r| r.accepted.len()).sum::<usize>().into());
        body.insert("n_discarded".into(), records.iter().map(|r| r.discarded.len()).sum::<usize>().into());
        body.insert("adjudication".into(), report::to_value(&records)?);
    }
    Ok(Outcome::ok(Artifact::Report(Value::Object(body))))
}

fn levels_for(arity: Arity) -> &'static [KeyLevel] {
    match arity {
        Arity::Pair => &[KeyLevel::Aspect],
        Arity::Triplet => &[KeyLevel::Aspect, KeyLevel::AspectOpinion],
        Arity::Quad => &KeyLevel::ALL,
    }
}

fn cmd_agree(cfg: &RunConfig) -> Result<Outcome> {
    let mut body = serde_json::Map::new();
    body.insert("command".into(), "agree".into());
    if let Some(path) = &cfg.annotations {
        let set = AnnotatorSet::new(io::load_annotations(path)?)?;
        let arity = (0..set.len())
            .flat_map(|i| set.records(i).values().flatten())
            .map(|k| k.arity())
            .max()
            .unwrap_or(Arity::Pair);
        let mut rows = Vec::new();
        for &level in levels_for(arity) {
            let s = tuple_agreement(&set, level)?;
            let label = if arity == Arity::Triplet && level == KeyLevel::AspectOpinion { "A,O" } else { level.label() };
            rows.push(json!({"level": label, "precision": s.precision, "recall": s.recall, "f1": s.f1}));
        }
        body.insert("annotators".into(), report::to_value(&set.names().collect::<Vec<_>>())?);
        body.insert("tuple_agreement".into(), Value::Array(rows));
    }
    if let Some(path) = &cfg.ratings {
        let bundles = io::load_ratings(path)?;
        let (v, a) = va_agreement_rmse(&bundles)?;
        body.insert("va_agreement".into(), json!({"n_items": bundles.len(), "rmse_valence": v, "rmse_arousal": a}));
    }
    Ok(Outcome::ok(Artifact::Report(Value::Object(body))))
}

fn cmd_convert(cfg: &RunConfig) -> Result<Outcome> {
    let records = io::load_corpus(cfg.gold.as_deref().expect("checked"), cfg.subtask)?;
    let body = json!({
        "command": "convert",
        "n_records": records.len(),
        "buckets": bucket_stats(&records),
        "records": to_categorical(&records),
    });
    Ok(Outcome::ok(Artifact::Report(body)))
}

fn cmd_stats(cfg: &RunConfig) -> Result<Outcome> {
    let records = io::load_corpus(cfg.gold.as_deref().expect("checked"), cfg.subtask)?;
    let dist = distribution_report(&records, cfg.bin_width)?;
    if let Some(dir) = &cfg.csv_dir {
        write_stats_csv(&dist, dir)?;
    }
    let mut body = serde_json::Map::new();
    body.insert("command".into(), "stats".into());
    body.insert("n_records".into(), records.len().into());
    if let Value::Object(m) = report::to_value(&dist)? {
        body.extend(m);
    }
    Ok(Outcome::ok(Artifact::Report(Value::Object(body))))
}

fn csv_bytes<F>(fill: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    fill(&mut w).map_err(|e| Error::Internal(e.to_string()))?;
    w.into_inner().map_err(|e| Error::Internal(e.to_string()))
}

/// Writes `va_histogram.csv`, `arousal_by_valence.csv`, `buckets.csv` and,
/// for quadruplet corpora, `categories.csv`.
pub fn write_stats_csv(dist: &DistributionReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let va = &dist.va;
    let hist = csv_bytes(|w| {
        w.write_record(["valence_bin", "arousal_bin", "valence", "arousal", "count"])?;
        for (i, row) in va.counts.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                w.serialize((i, j, va.center(i), va.center(j), c))?;
            }
        }
        Ok(())
    })?;
    io::write_atomic(&dir.join("va_histogram.csv"), &hist)?;
    let curve = csv_bytes(|w| {
        w.write_record(["valence_bin", "valence", "count", "mean_arousal"])?;
        for m in &va.arousal_by_valence {
            w.serialize((m.bin, m.valence, m.count, m.mean_arousal))?;
        }
        Ok(())
    })?;
    io::write_atomic(&dir.join("arousal_by_valence.csv"), &curve)?;
    let buckets = csv_bytes(|w| {
        w.write_record(["polarity", "count", "percent", "mean_valence", "sd_valence", "mean_arousal", "sd_arousal"])?;
        for b in &dist.buckets {
            w.serialize((b.polarity.as_str(), b.count, b.percent, b.mean_valence, b.sd_valence, b.mean_arousal, b.sd_arousal))?;
        }
        Ok(())
    })?;
    io::write_atomic(&dir.join("buckets.csv"), &buckets)?;
    if let Some(cats) = &dist.categories {
        let table = csv_bytes(|w| {
            w.write_record(["category", "count", "percent"])?;
            for c in &cats.categories {
                w.serialize((c.label.to_string(), c.count, c.percent))?;
            }
            Ok(())
        })?;
        io::write_atomic(&dir.join("categories.csv"), &table)?;
    }
    Ok(())
}

/// One rendered prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptLine {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspect: Option<String>,
    pub prompt: String,
}

fn cmd_prompt(cfg: &RunConfig) -> Result<Outcome> {
    let subtask = cfg.subtask();
    let queries = io::load_corpus(cfg.gold.as_deref().expect("checked"), Some(subtask))?;
    let train = match (&cfg.train, cfg.style) {
        (Some(path), StyleArg::FewShot) if cfg.k > 0 => io::load_corpus(path, Some(subtask))?,
        _ => Vec::new(),
    };
    let examples = select_few_shot(&train, cfg.k);
    let dir = io::scheme_dir_from_env();
    let fixed = cfg.scheme.as_deref().map(|s| io::resolve_scheme(s, dir.as_deref())).transpose()?;
    let mut lines = Vec::new();
    for record in &queries {
        let mut template = PromptTemplate::new(subtask, cfg.style.into(), cfg.k);
        if subtask == Subtask::DimAsqp {
            let scheme = match &fixed {
                Some(s) => s.clone(),
                None => io::resolve_scheme(record.domain(), dir.as_deref()).ok().flatten(),
            };
            template = match scheme {
                Some(s) => template.with_scheme(s),
                None => return Err(Error::InRecord { id: record.id().into(), source: dimabsa_core::Error::MissingScheme }),
            };
        }
        for q in queries_for(record) {
            let prompt = build_prompt(&template, examples, &q)?;
            lines.push(PromptLine { id: q.id, aspect: q.aspect, prompt });
        }
    }
    let summary = json!({
        "command": "prompt",
        "subtask": subtask,
        "style": cfg.style,
        "k": examples.len(),
        "template_version": TEMPLATE_VERSION,
        "n_records": queries.len(),
        "n_prompts": lines.len(),
    });
    Ok(Outcome::ok(Artifact::Lines { body: io::to_jsonl(&lines)?, summary }))
}

/// One model response; `aspect` is the queried aspect for DimASR.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseLine {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspect: Option<String>,
    pub response: String,
}

/// Parses responses into prediction records, merging lines that share an id.
///
/// Returns the predictions in order of first appearance and the violations
/// that concern whole responses.
pub fn parse_responses(lines: &[ResponseLine], subtask: Subtask) -> (Vec<PredictionRecord>, Vec<Violation>) {
    let mut preds: Vec<PredictionRecord> = Vec::new();
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut failures = Vec::new();
    for line in lines {
        let (pred, violations) =
            parse_model_output(&line.response, subtask, line.aspect.as_deref()).into_prediction(&line.id);
        failures.extend(violations);
        match index.get(line.id.as_str()) {
            Some(&i) => {
                preds[i].tuples.extend(pred.tuples);
                preds[i].rejected.extend(pred.rejected);
            }
            None => {
                index.insert(&line.id, preds.len());
                preds.push(pred);
            }
        }
    }
    (preds, failures)
}

fn cmd_parse(cfg: &RunConfig) -> Result<Outcome> {
    let subtask = cfg.subtask();
    let lines: Vec<ResponseLine> =
        io::read_jsonl(cfg.pred.as_deref().expect("checked"))?.into_iter().map(|(_, l)| l).collect();
    let (preds, failures) = parse_responses(&lines, subtask);
    for v in &failures {
        eprintln!("{v}");
    }
    let summary = json!({
        "command": "parse",
        "subtask": subtask,
        "n_responses": lines.len(),
        "n_records": preds.len(),
        "n_tuples": preds.iter().map(|p| p.tuples.len()).sum::<usize>(),
        "n_rejected": preds.iter().map(|p| p.rejected.len()).sum::<usize>(),
        "violations": preds.iter().flat_map(|p| &p.rejected).chain(&failures).collect::<Vec<_>>(),
    });
    let body = io::to_jsonl(preds.iter().map(RawPrediction::from_prediction))?;
    Ok(Outcome::ok(Artifact::Lines { body, summary }))
}
