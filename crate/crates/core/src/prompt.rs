//! Prompt construction and the model-client abstraction.
//!
//! Templates are text assets under `templates/v1` with `{{name}}`
//! placeholders. A few-shot prompt is the task definition, one block per
//! in-context example (`Input: …\nOutput: …\n\n`), then the query.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::{Record, SentimentTuple, Subtask};
use crate::output::{format_as_model_output, format_va_output};
use crate::scheme::CategoryScheme;
use crate::{Error, Result};

/// Version directory of the bundled templates.
pub const TEMPLATE_VERSION: &str = "v1";

const FEWSHOT_ASR: &str = include_str!("../templates/v1/fewshot_asr.txt");
const FEWSHOT_ASTE: &str = include_str!("../templates/v1/fewshot_aste.txt");
const FEWSHOT_ASQP: &str = include_str!("../templates/v1/fewshot_asqp.txt");
const EXAMPLE_ASR: &str = include_str!("../templates/v1/example_asr.txt");
const EXAMPLE_EXTRACT: &str = include_str!("../templates/v1/example_extract.txt");
const SYSTEM_ASR: &str = include_str!("../templates/v1/sft_system_asr.txt");
const SYSTEM_ASTE: &str = include_str!("../templates/v1/sft_system_aste.txt");
const SYSTEM_ASQP: &str = include_str!("../templates/v1/sft_system_asqp.txt");
const USER_ASR: &str = include_str!("../templates/v1/sft_user_asr.txt");
const USER_EXTRACT: &str = include_str!("../templates/v1/sft_user_extract.txt");

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptStyle {
    /// Instruction, in-context examples and query in one prompt.
    #[default]
    FewShot,
    /// System / user / assistant sections as used for fine-tuning.
    FineTuneChat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplate {
    pub subtask: Subtask,
    pub scheme: Option<CategoryScheme>,
    pub style: PromptStyle,
    /// In-context examples; 0 is zero-shot. Unused by the chat style.
    pub k: usize,
}

impl PromptTemplate {
    pub fn new(subtask: Subtask, style: PromptStyle, k: usize) -> Self {
        Self { subtask, scheme: None, style, k }
    }

    pub fn with_scheme(mut self, scheme: CategoryScheme) -> Self {
        self.scheme = Some(scheme);
        self
    }

    fn categories(&self) -> Result<String> {
        match (self.subtask, &self.scheme) {
            (Subtask::DimAsqp, None) => Err(Error::MissingScheme),
            (Subtask::DimAsqp, Some(s)) => Ok(s.render_labels()),
            _ => Ok(String::new()),
        }
    }
}

/// One unit of model input: a sentence, plus the aspect for DimASR.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptQuery {
    pub id: String,
    pub sentence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspect: Option<String>,
}

/// DimASR yields one query per gold aspect, in tuple order; the extraction
/// subtasks yield one query per sentence.
pub fn queries_for(record: &Record) -> Vec<PromptQuery> {
    let query = |aspect: Option<String>| PromptQuery { id: record.id().into(), sentence: record.text().into(), aspect };
    match record.subtask() {
        Subtask::DimAsr => record.tuples().iter().map(|t| query(Some(t.aspect().as_str().into()))).collect(),
        _ => alloc::vec![query(None)],
    }
}

/// The first `k` training records, in order.
pub fn select_few_shot(train: &[Record], k: usize) -> &[Record] {
    &train[..k.min(train.len())]
}

/// Substitutes `{{name}}` placeholders in one pass; unknown names are kept.
fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        match after.find("}}").and_then(|end| {
            let name = &after[..end];
            vars.iter().find(|(n, _)| *n == name).map(|(_, v)| (end, *v))
        }) {
            Some((end, value)) => {
                out.push_str(value);
                rest = &after[end + 2..];
            }
            None => {
                out.push_str("{{");
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

fn strip_final_newline(s: &str) -> &str {
    s.strip_suffix('\n').unwrap_or(s)
}

fn example_blocks(subtask: Subtask, examples: &[Record]) -> Result<String> {
    let mut out = String::new();
    for ex in examples {
        if ex.subtask() != subtask {
            return Err(Error::QueryMismatch(subtask));
        }
        match subtask {
            Subtask::DimAsr => {
                for t in ex.tuples() {
                    let answer = format_va_output(&t.va());
                    out.push_str(&render(
                        EXAMPLE_ASR,
                        &[("sentence", ex.text()), ("aspect", t.aspect().as_str()), ("answer", &answer)],
                    ));
                }
            }
            _ => {
                let answer = format_as_model_output(ex.tuples(), subtask)?;
                out.push_str(&render(EXAMPLE_EXTRACT, &[("sentence", ex.text()), ("answer", &answer)]));
            }
        }
    }
    Ok(out)
}

fn query_aspect(template: &PromptTemplate, query: &PromptQuery) -> Result<String> {
    match (template.subtask, &query.aspect) {
        (Subtask::DimAsr, Some(a)) => Ok(a.clone()),
        (Subtask::DimAsr, None) => Err(Error::QueryMismatch(Subtask::DimAsr)),
        (_, _) => Ok(String::new()),
    }
}

/// A fine-tuning conversation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatPrompt {
    pub system: String,
    pub user: String,
    /// Gold answer for training data; absent at inference time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assistant: Option<String>,
}

impl ChatPrompt {
    /// Flattened text with section headers, ending where the assistant speaks.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("System Prompt:\n");
        out.push_str(&self.system);
        out.push_str("\nUser Prompt:\n");
        out.push_str(&self.user);
        out.push_str("\nAssistant Prompt:\n");
        if let Some(a) = &self.assistant {
            out.push_str(a);
        }
        out
    }
}

/// Builds the system and user sections, plus the assistant answer when
/// `answer` is given.
///
/// For DimASR the answer is the VA of the first tuple.
pub fn build_chat(
    template: &PromptTemplate,
    query: &PromptQuery,
    answer: Option<&[SentimentTuple]>,
) -> Result<ChatPrompt> {
    let categories = template.categories()?;
    let aspect = query_aspect(template, query)?;
    let (system, user) = match template.subtask {
        Subtask::DimAsr => (SYSTEM_ASR, USER_ASR),
        Subtask::DimAste => (SYSTEM_ASTE, USER_EXTRACT),
        Subtask::DimAsqp => (SYSTEM_ASQP, USER_EXTRACT),
    };
    let vars = [("categories", categories.as_str()), ("sentence", query.sentence.as_str()), ("aspect", aspect.as_str())];
    let assistant = match answer {
        None => None,
        Some(tuples) if template.subtask == Subtask::DimAsr => {
            let t = tuples.first().ok_or(Error::QueryMismatch(Subtask::DimAsr))?;
            Some(format_va_output(&t.va()))
        }
        Some(tuples) => Some(format_as_model_output(tuples, template.subtask)?),
    };
    Ok(ChatPrompt {
        system: strip_final_newline(&render(system, &vars)).to_string(),
        user: strip_final_newline(&render(user, &vars)).to_string(),
        assistant,
    })
}

/// Renders the prompt for one query.
///
/// Examples are used by the few-shot style only and must belong to the
/// template's subtask; quadruplet prompts need a scheme for the category list.
pub fn build_prompt(template: &PromptTemplate, examples: &[Record], query: &PromptQuery) -> Result<String> {
    if template.style == PromptStyle::FineTuneChat {
        return build_chat(template, query, None).map(|c| c.render());
    }
    let categories = template.categories()?;
    let aspect = query_aspect(template, query)?;
    let examples = example_blocks(template.subtask, examples)?;
    let skeleton = match template.subtask {
        Subtask::DimAsr => FEWSHOT_ASR,
        Subtask::DimAste => FEWSHOT_ASTE,
        Subtask::DimAsqp => FEWSHOT_ASQP,
    };
    let vars = [
        ("categories", categories.as_str()),
        ("examples", examples.as_str()),
        ("sentence", query.sentence.as_str()),
        ("aspect", aspect.as_str()),
    ];
    Ok(strip_final_newline(&render(skeleton, &vars)).to_string())
}

/// Failure reported by a model client for one prompt.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ClientError(pub String);

/// Anything that turns a prompt into a response.
pub trait ModelClient {
    fn complete(&self, prompt: &str) -> core::result::Result<String, ClientError>;
}

impl<C: ModelClient + ?Sized> ModelClient for &C {
    fn complete(&self, prompt: &str) -> core::result::Result<String, ClientError> {
        (**self).complete(prompt)
    }
}

/// Sends every prompt in order; one failure does not stop the batch.
pub fn run_with_client<C: ModelClient + ?Sized>(
    client: &C,
    prompts: &[String],
) -> Vec<core::result::Result<String, ClientError>> {
    prompts.iter().map(|p| client.complete(p)).collect()
}

/// Answers from a fixed prompt → response table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReplayClient {
    responses: BTreeMap<String, String>,
}

impl ReplayClient {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, prompt: impl Into<String>, response: impl Into<String>) {
        self.responses.insert(prompt.into(), response.into());
    }
}

impl FromIterator<(String, String)> for ReplayClient {
    fn from_iter<I: IntoIterator<Item = (String, String)>>(iter: I) -> Self {
        Self { responses: iter.into_iter().collect() }
    }
}

impl ModelClient for ReplayClient {
    fn complete(&self, prompt: &str) -> core::result::Result<String, ClientError> {
        self.responses
            .get(prompt)
            .cloned()
            .ok_or_else(|| ClientError("no recorded response for prompt".into()))
    }
}

/// Adapts a closure.
pub struct FnClient<F>(pub F);

impl<F> ModelClient for FnClient<F>
where
    F: Fn(&str) -> core::result::Result<String, ClientError>,
{
    fn complete(&self, prompt: &str) -> core::result::Result<String, ClientError> {
        (self.0)(prompt)
    }
}
