//! Versioned experiment reports with byte-stable JSON and CSV renderings.
//!
//! Exact quantities are written as `"p/q"` strings and estimates as a mean
//! and standard error with 17 significant digits. Results are kept in a
//! sorted map, checks in the order they were run, so identical inputs render
//! to identical bytes.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::rational::{self, Rational};
use crate::stats::Estimate;

#[derive(Debug, Clone, PartialEq)]
pub enum ReportValue {
    Exact(Rational),
    Estimate(Estimate),
    Count(u64),
    Flag(bool),
    Text(String),
}

impl ReportValue {
    /// `(value, stderr)` as flat strings.
    fn cells(&self) -> (String, String) {
        match self {
            ReportValue::Exact(q) => (rational::to_string(q), String::new()),
            ReportValue::Estimate(e) => (rational::format_f64(e.mean), rational::format_f64(e.stderr)),
            ReportValue::Count(n) => (n.to_string(), String::new()),
            ReportValue::Flag(b) => (b.to_string(), String::new()),
            ReportValue::Text(s) => (s.clone(), String::new()),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            ReportValue::Exact(q) => Value::String(rational::to_string(q)),
            ReportValue::Estimate(e) => json!({
                "mean": rational::format_f64(e.mean),
                "stderr": rational::format_f64(e.stderr),
                "n": e.n,
            }),
            ReportValue::Count(n) => json!(n),
            ReportValue::Flag(b) => json!(b),
            ReportValue::Text(s) => json!(s),
        }
    }
}

impl From<Rational> for ReportValue {
    fn from(q: Rational) -> Self {
        ReportValue::Exact(q)
    }
}

impl From<&Rational> for ReportValue {
    fn from(q: &Rational) -> Self {
        ReportValue::Exact(q.clone())
    }
}

impl From<Estimate> for ReportValue {
    fn from(e: Estimate) -> Self {
        ReportValue::Estimate(e)
    }
}

impl From<bool> for ReportValue {
    fn from(b: bool) -> Self {
        ReportValue::Flag(b)
    }
}

impl From<usize> for ReportValue {
    fn from(n: usize) -> Self {
        ReportValue::Count(n as u64)
    }
}

impl From<u64> for ReportValue {
    fn from(n: u64) -> Self {
        ReportValue::Count(n)
    }
}

impl From<String> for ReportValue {
    fn from(s: String) -> Self {
        ReportValue::Text(s)
    }
}

impl From<&str> for ReportValue {
    fn from(s: &str) -> Self {
        ReportValue::Text(s.to_owned())
    }
}

/// One pass/fail invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Echo of the resolved configuration.
    pub config: Value,
    pub seed: Option<u64>,
    pub reps: Option<u64>,
    pub results: BTreeMap<String, ReportValue>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Report {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: command.to_owned(),
            config,
            seed: None,
            reps: None,
            results: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl Into<ReportValue>) {
        self.results.insert(key.into(), value.into());
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    pub fn get(&self, key: &str) -> Option<&ReportValue> {
        self.results.get(key)
    }

    /// Every check passed.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json_value(&self) -> Value {
        let results: Map<String, Value> = self.results.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        let checks: Vec<Value> =
            self.checks.iter().map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail})).collect();
        json!({
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "reps": self.reps,
            "results": results,
            "checks": checks,
            "pass": self.pass(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Rows `section,key,value,stderr`. Config entries are flattened with
    /// dotted keys.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut row = |section: &str, key: &str, value: &str, stderr: &str| {
            w.write_record([section, key, value, stderr]).expect("in-memory writes succeed");
        };
        row("section", "key", "value", "stderr");
        row("meta", "tool", &self.tool, "");
        row("meta", "version", &self.version, "");
        row("meta", "command", &self.command, "");
        row("meta", "seed", &self.seed.map(|s| s.to_string()).unwrap_or_default(), "");
        row("meta", "reps", &self.reps.map(|s| s.to_string()).unwrap_or_default(), "");
        let mut config = Vec::new();
        flatten("", &self.config, &mut config);
        for (k, v) in &config {
            row("config", k, v, "");
        }
        for (k, v) in &self.results {
            let (value, stderr) = v.cells();
            row("result", k, &value, &stderr);
        }
        for c in &self.checks {
            row("check", &c.name, &c.pass.to_string(), "");
        }
        row("meta", "pass", &self.pass().to_string(), "");
        String::from_utf8(w.into_inner().expect("in-memory writes succeed")).expect("csv is utf-8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Null => {}
        Value::String(s) => out.push((prefix.to_owned(), s.clone())),
        other => out.push((prefix.to_owned(), other.to_string())),
    }
}

/// Writes the rendered report to `out`, or to stdout when `out` is `None`.
pub fn emit_report(report: &Report, format: Format, out: Option<&Path>) -> io::Result<()> {
    let text = report.render(format);
    match out {
        Some(path) => std::fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn sample() -> Report {
        let mut r = Report::new("tv-bound", json!({"n": 10, "k": 3}));
        r.put("exact_gap_bound", ratio(14, 25));
        r.put("coarse_bound", ratio(3, 5));
        r.put("estimate", Estimate { mean: 0.25, stderr: 0.001, n: 100 });
        r.check("ordered", true, "");
        r
    }

    #[test]
    fn json_is_sorted_and_exact() {
        let text = sample().to_json();
        assert!(text.contains("\"exact_gap_bound\": \"14/25\""));
        assert!(text.contains("\"mean\": \"2.5000000000000000e-1\""));
        assert!(text.find("\"coarse_bound\"").unwrap() < text.find("\"exact_gap_bound\"").unwrap());
        assert_eq!(text, sample().to_json());
    }

    #[test]
    fn csv_carries_the_same_values() {
        let text = sample().to_csv();
        assert!(text.contains("result,exact_gap_bound,14/25,"));
        assert!(text.contains("result,coarse_bound,3/5,"));
        assert!(text.contains("config,k,3,"));
        assert!(text.ends_with("meta,pass,true,\n"));
    }

    #[test]
    fn failing_check_fails_the_report() {
        let mut r = sample();
        r.check("broken", false, "on purpose");
        assert!(!r.pass());
        assert!(r.to_json().contains("\"pass\": false"));
    }
}
