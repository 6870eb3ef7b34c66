//! Batch front end for xmodkit: load definition files, run checks and
//! constructions, and emit JSON reports.

pub mod commands;
pub mod defs;

use serde::Serialize;
use serde_json::Value;

pub const TOOL_VERSION: &str = concat!("xmodkit ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("definition error at line {line}, column {column}: {message}")]
    Definition { line: usize, column: usize, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] xmodkit::error::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(xmodkit::error::Error::BudgetExhausted(_)) => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    BudgetExhausted,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::BudgetExhausted => 3,
        }
    }

    pub fn from_bool(passed: bool) -> Self {
        if passed {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Budget exhaustion dominates failure, failure dominates success.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (BudgetExhausted, _) | (_, BudgetExhausted) => BudgetExhausted,
            (Fail, _) | (_, Fail) => Fail,
            _ => Pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub tool_version: &'static str,
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub verdict: Verdict,
    /// one line per check, for `--summary`
    pub summary: Vec<String>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_summary(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, serde_json::to_value(self.verdict).expect("verdict").as_str().unwrap_or("?"));
        for line in &self.summary {
            out.push_str("  ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!("  inputs {}\n", &self.inputs_digest[..16]));
        if let Some(ms) = self.timing_ms {
            out.push_str(&format!("  {ms:.1} ms\n"));
        }
        out
    }
}
