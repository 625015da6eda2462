//! Model response parsing and the matching formatter.
//!
//! Responses look like `Sentiment elements: [("aspect", "CAT#ATTR", "opinion",
//! [v#a]), ...]` for extraction, or `[v#a]` for DimASR. Anything before the
//! first `[` and after its balanced `]` is ignored. Strings may use single or
//! double quotes; VA values may carry any number of decimals and are rounded
//! half-up to two.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::model::{CategoryLabel, PredictionRecord, SentimentTuple, Subtask, TextSpan};
use crate::va::{round_half_up_2, VaError, VaScore};
use crate::validate::{Violation, ViolationCode};
use crate::{Arity, Error, Result};

/// Prefix written before the tuple list.
pub const OUTPUT_PREFIX: &str = "Sentiment elements: ";

/// Outcome of parsing one response.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedOutput {
    pub tuples: Vec<SentimentTuple>,
    /// Tuples that were recognized but invalid; each still counts as a prediction.
    pub rejected: Vec<Violation>,
    /// Problems with the response as a whole; no tuples were recovered.
    pub violations: Vec<Violation>,
}

impl ParsedOutput {
    /// All problems, tuple-level first.
    pub fn all_violations(&self) -> impl Iterator<Item = &Violation> {
        self.rejected.iter().chain(&self.violations)
    }

    pub fn is_clean(&self) -> bool {
        self.rejected.is_empty() && self.violations.is_empty()
    }

    /// Attaches a record id to the tuples and every violation.
    pub fn into_prediction(self, id: &str) -> (PredictionRecord, Vec<Violation>) {
        let stamp = |mut v: Violation| {
            v.record_id = id.into();
            v
        };
        let record = PredictionRecord {
            id: id.into(),
            tuples: self.tuples,
            rejected: self.rejected.into_iter().map(stamp).collect(),
        };
        (record, self.violations.into_iter().map(stamp).collect())
    }

    fn failed(code: ViolationCode, detail: impl Into<String>) -> Self {
        Self { violations: alloc::vec![Violation::new("", code, detail)], ..Self::default() }
    }
}

/// Parses a model response for `subtask`.
///
/// A bare `[v#a]` answer is only meaningful for DimASR and needs the queried
/// `aspect`. Violations carry an empty record id; see
/// [`ParsedOutput::into_prediction`].
pub fn parse_model_output(text: &str, subtask: Subtask, aspect: Option<&str>) -> ParsedOutput {
    if text.trim().is_empty() {
        return ParsedOutput::failed(ViolationCode::EmptyField, "empty response");
    }
    let Some(payload) = find_payload(text) else {
        return ParsedOutput::failed(ViolationCode::ArityMismatch, "no balanced [...] list in response");
    };
    let body = payload.trim();
    if !body.is_empty() && !body.starts_with('(') {
        return parse_bare_va(body, subtask, aspect);
    }
    let tuples = match tokenize_list(body) {
        Ok(t) => t,
        Err(e) => return ParsedOutput::failed(ViolationCode::ArityMismatch, format!("unparseable tuple list: {e}")),
    };
    let mut out = ParsedOutput::default();
    for (i, elems) in tuples.into_iter().enumerate() {
        match build_tuple(elems, subtask.arity()) {
            Ok(t) => out.tuples.push(t),
            Err((code, detail)) => out.rejected.push(Violation::new("", code, format!("tuple {i}: {detail}"))),
        }
    }
    out
}

fn parse_bare_va(body: &str, subtask: Subtask, aspect: Option<&str>) -> ParsedOutput {
    if subtask != Subtask::DimAsr {
        return ParsedOutput::failed(ViolationCode::ArityMismatch, format!("bare VA answer is not a {subtask} tuple list"));
    }
    let Some(aspect) = aspect else {
        return ParsedOutput::failed(ViolationCode::ArityMismatch, "bare VA answer without a queried aspect");
    };
    let Ok(aspect) = TextSpan::new(aspect) else {
        return ParsedOutput::failed(ViolationCode::EmptyField, "empty aspect");
    };
    let mut out = ParsedOutput::default();
    match parse_model_va(body) {
        Ok(va) => out.tuples.push(SentimentTuple::pair(aspect, va)),
        Err(e) => out.rejected.push(Violation::from_va_error("", &e)),
    }
    out
}

/// Lenient VA reading: optional sign, any number of decimals, spaces around
/// the parts; rounded half-up to two decimals before the range check.
pub fn parse_model_va(s: &str) -> core::result::Result<VaScore, VaError> {
    let malformed = || VaError::Malformed(s.to_string());
    let (v, a) = s.trim().split_once('#').ok_or_else(malformed)?;
    let num = |x: &str| {
        let x = x.trim();
        let digits = x.strip_prefix(['+', '-']).unwrap_or(x);
        let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
        let ok = !(int.is_empty() && frac.is_empty())
            && int.bytes().all(|b| b.is_ascii_digit())
            && frac.bytes().all(|b| b.is_ascii_digit());
        if ok {
            x.parse::<f64>().map_err(|_| malformed())
        } else {
            Err(malformed())
        }
    };
    let (v, a) = (num(v)?, num(a)?);
    VaScore::new(round_half_up_2(v), round_half_up_2(a))
}

/// Content between the first `[` and its balanced `]`.
fn find_payload(text: &str) -> Option<&str> {
    let start = text.find('[')?;
    let mut depth = 0usize;
    let mut quote: Option<char> = None;
    let mut escaped = false;
    let mut prev = '[';
    for (i, c) in text[start..].char_indices() {
        if let Some(q) = quote {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == q {
                quote = None;
                prev = c;
            }
            continue;
        }
        match c {
            '"' | '\'' if matches!(prev, '(' | ',' | '[') => quote = Some(c),
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start + 1..start + i]);
                }
            }
            _ => {}
        }
        if !c.is_whitespace() {
            prev = c;
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
enum Elem {
    Quoted(String),
    Bracketed(String),
    Bare(String),
}

impl Elem {
    fn text(self) -> String {
        match self {
            Elem::Quoted(s) | Elem::Bracketed(s) | Elem::Bare(s) => s,
        }
    }
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.rest = &self.rest[c.len_utf8()..];
        Some(c)
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn expect(&mut self, want: char) -> core::result::Result<(), String> {
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => Err(format!("expected {want:?}, found {c:?}")),
            None => Err(format!("expected {want:?}, found end of list")),
        }
    }

    fn quoted(&mut self, q: char) -> core::result::Result<String, String> {
        let mut s = String::new();
        while let Some(c) = self.bump() {
            match c {
                '\\' => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some(e @ ('\\' | '"' | '\'')) => s.push(e),
                    Some(e) => {
                        s.push('\\');
                        s.push(e);
                    }
                    None => break,
                },
                c if c == q => return Ok(s),
                c => s.push(c),
            }
        }
        Err("unterminated string".into())
    }

    fn until(&mut self, stop: impl Fn(char) -> bool) -> &'a str {
        let end = self.rest.find(stop).unwrap_or(self.rest.len());
        let (head, tail) = self.rest.split_at(end);
        self.rest = tail;
        head
    }

    fn elem(&mut self) -> core::result::Result<Elem, String> {
        match self.peek() {
            Some(q @ ('"' | '\'')) => {
                self.bump();
                self.quoted(q).map(Elem::Quoted)
            }
            Some('[') => {
                self.bump();
                let inner = self.until(|c| c == ']').to_string();
                self.expect(']')?;
                Ok(Elem::Bracketed(inner))
            }
            _ => Ok(Elem::Bare(self.until(|c| c == ',' || c == ')').trim().to_string())),
        }
    }

    fn tuple(&mut self) -> core::result::Result<Vec<Elem>, String> {
        self.expect('(')?;
        let mut elems = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() == Some(')') {
                self.bump();
                return Ok(elems);
            }
            elems.push(self.elem()?);
            self.skip_ws();
            match self.bump() {
                Some(',') => {}
                Some(')') => return Ok(elems),
                Some(c) => return Err(format!("unexpected {c:?} inside tuple")),
                None => return Err("unterminated tuple".into()),
            }
        }
    }
}

fn tokenize_list(body: &str) -> core::result::Result<Vec<Vec<Elem>>, String> {
    let mut cur = Cursor { rest: body };
    let mut tuples = Vec::new();
    cur.skip_ws();
    while cur.peek().is_some() {
        tuples.push(cur.tuple()?);
        cur.skip_ws();
        if cur.peek().is_some() {
            cur.expect(',')?;
            cur.skip_ws();
        }
    }
    Ok(tuples)
}

fn build_tuple(mut elems: Vec<Elem>, arity: Arity) -> core::result::Result<SentimentTuple, (ViolationCode, String)> {
    let expected = match arity {
        Arity::Pair => 2,
        Arity::Triplet => 3,
        Arity::Quad => 4,
    };
    if elems.len() != expected {
        return Err((
            ViolationCode::ArityMismatch,
            format!("expected {expected} elements for a {arity:?}, found {}", elems.len()),
        ));
    }
    let va = elems.pop().expect("non-empty").text();
    let texts = elems
        .into_iter()
        .map(|e| match e {
            Elem::Bracketed(s) => Err((ViolationCode::ArityMismatch, format!("unexpected bracketed value [{s}]"))),
            e => Ok(e.text()),
        })
        .collect::<core::result::Result<Vec<_>, _>>()?;
    let span = |s: &str, what: &str| TextSpan::new(s).map_err(|_| (ViolationCode::EmptyField, format!("empty {what}")));
    let aspect = span(&texts[0], "aspect")?;
    let (category, opinion) = match arity {
        Arity::Pair => (None, None),
        Arity::Triplet => (None, Some(span(&texts[1], "opinion")?)),
        Arity::Quad => {
            if texts[1].trim().is_empty() {
                return Err((ViolationCode::EmptyField, "empty category".into()));
            }
            let c = CategoryLabel::parse(&texts[1]).map_err(|e| (ViolationCode::UnknownCategory, e.to_string()))?;
            (Some(c), Some(span(&texts[2], "opinion")?))
        }
    };
    if va.trim().is_empty() {
        return Err((ViolationCode::EmptyField, "empty VA".into()));
    }
    let va = parse_model_va(&va).map_err(|e| {
        let v = Violation::from_va_error("", &e);
        (v.code, v.detail)
    })?;
    SentimentTuple::from_parts(aspect, category, opinion, va).map_err(|e| (ViolationCode::ArityMismatch, e.to_string()))
}

fn push_quoted(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

/// `[v#a]` with two decimals.
pub fn format_va_output(va: &VaScore) -> String {
    format!("[{va}]")
}

/// Renders tuples in the response syntax [`parse_model_output`] reads back.
pub fn format_as_model_output(tuples: &[SentimentTuple], subtask: Subtask) -> Result<String> {
    let expected = subtask.arity();
    if let Some(t) = tuples.iter().find(|t| t.arity() != expected) {
        return Err(Error::ArityMismatch { expected, found: t.arity() });
    }
    let mut out = String::from(OUTPUT_PREFIX);
    out.push('[');
    for (i, t) in tuples.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push('(');
        push_quoted(&mut out, t.aspect().as_str());
        if let Some(c) = t.category() {
            out.push_str(", ");
            push_quoted(&mut out, &c.to_string());
        }
        if let Some(o) = t.opinion() {
            out.push_str(", ");
            push_quoted(&mut out, o.as_str());
        }
        let _ = write!(out, ", [{}])", t.va());
    }
    out.push(']');
    Ok(out)
}
