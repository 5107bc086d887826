//! Check results and their human and machine renderings.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

/// Diagnostics are rounded to this many decimal places so reports do not
/// depend on the last bits of floating-point results.
const DIGITS: i32 = 9;

pub fn num(x: f64) -> Value {
    let scale = 10f64.powi(DIGITS);
    let r = (x * scale).round() / scale;
    // avoid "-0.0"
    Value::from(if r == 0.0 { 0.0 } else { r })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub diagnostics: Map<String, Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            diagnostics: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }

    pub fn with_f64(self, key: &str, value: f64) -> Self {
        self.with(key, num(value))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub subject: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// A rewritten document or other payload, when the command produces one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
}

impl Report {
    pub fn new(command: &str, subject: &str) -> Self {
        Report {
            command: command.to_string(),
            subject: subject.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
            samples: None,
            passed: true,
            checks: Vec::new(),
            output: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn to_machine(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} (gext {})", self.command, self.subject, self.version);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed {seed}, samples {}", self.samples.unwrap_or(0));
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let details: Vec<String> = c
                .diagnostics
                .iter()
                .map(|(k, v)| format!("{k}={}", compact(v)))
                .collect();
            let line = format!(
                "{}  {:width$}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                details.join(" "),
            );
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(out, "{} checks, {failed} failed", self.checks.len());
        if let Some(output) = &self.output {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(output).expect("serializes"));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
