//! The per-check record printed by every subcommand.

use melonic_core::{Error, Series};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// Everything needed to rerun a check. Unused fields are omitted.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Params {
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<u8>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deg: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nsize: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_window: Option<(i32, i32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: Params,
    pub status: Status,
    /// Nonzero residual terms, one text line each; empty on pass.
    pub residual: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
}

impl CheckReport {
    pub fn new(check: &str, params: Params) -> Self {
        CheckReport {
            check: check.to_string(),
            params,
            status: Status::Pass,
            residual: Vec::new(),
            runtime_ms: None,
            notes: Vec::new(),
            data: None,
        }
    }

    /// Pass iff every residual is the zero series; each nonzero one is
    /// recorded under its label.
    pub fn with_residuals<'a>(mut self, residuals: impl IntoIterator<Item = (&'a str, &'a Series)>) -> Self {
        for (label, s) in residuals {
            for line in s.text_lines() {
                self.residual.push(if label.is_empty() { line } else { format!("{label}: {line}") });
            }
        }
        if !self.residual.is_empty() {
            self.status = Status::Fail;
        }
        self
    }

    /// Records a failed boolean condition.
    pub fn require(mut self, ok: bool, what: &str) -> Self {
        if !ok {
            self.status = Status::Fail;
            self.residual.push(format!("violated: {what}"));
        }
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn data(mut self, value: serde_json::Value) -> Self {
        self.data = Some(value);
        self
    }

    pub fn error(check: &str, params: Params, err: &Error) -> Self {
        let mut r = CheckReport::new(check, params);
        r.status = Status::Error;
        r.notes.push(err.to_string());
        r
    }

    pub fn to_text(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let params = serde_json::to_string(&self.params).expect("params serialize");
        let mut out = format!("{status} {} {params}", self.check);
        if let Some(ms) = self.runtime_ms {
            out.push_str(&format!(" ({ms} ms)"));
        }
        if let Some(d) = &self.data {
            out.push_str(&format!("\n  data: {d}"));
        }
        for n in &self.notes {
            out.push_str(&format!("\n  note: {n}"));
        }
        for r in &self.residual {
            out.push_str(&format!("\n  residual: {r}"));
        }
        out
    }
}
