use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    /// Outside the certified window; never counted as a pass.
    #[serde(rename = "uncertified (truncation)")]
    Uncertified,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Uncertified => "uncertified (truncation)",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub subject: String,
    pub degree: i64,
    pub kind: Option<String>,
    pub stage: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioEcho {
    pub name: String,
    pub prime: u32,
    pub depth: u32,
    pub degree_bound: u32,
    pub dp_cap: u32,
    /// Scenario-specific inputs, sorted by key.
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Truncation {
    pub truncated: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: ScenarioEcho,
    pub tables: Vec<Table>,
    pub certificates: Vec<Certificate>,
    pub truncation: Truncation,
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
    pub error: Option<ErrorInfo>,
    pub passed: bool,
}

impl Report {
    pub fn new(scenario: ScenarioEcho) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            scenario,
            tables: Vec::new(),
            certificates: Vec::new(),
            truncation: Truncation {
                truncated: false,
                notes: Vec::new(),
            },
            assertions: Vec::new(),
            notes: Vec::new(),
            error: None,
            passed: false,
        }
    }

    pub fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        });
    }

    pub fn uncertified(&mut self, name: &str, detail: impl Into<String>) {
        self.truncation.truncated = true;
        self.assertions.push(Assertion {
            name: name.into(),
            status: Status::Uncertified,
            detail: detail.into(),
        });
    }

    pub fn table<R: IntoIterator<Item = Vec<Value>>>(&mut self, name: &str, columns: &[&str], rows: R) {
        self.tables.push(Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: rows.into_iter().collect(),
        });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Seal the report: it passes iff there was no error, at least one
    /// assertion ran, and none failed.
    pub fn finish(mut self) -> Self {
        self.passed = self.error.is_none()
            && !self.assertions.is_empty()
            && self.assertions.iter().all(|a| a.status != Status::Fail);
        self
    }

    pub fn render_text(&self) -> String {
        let s = &self.scenario;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scenario {} (p={}, R={}, D={}, Q={})",
            s.name, s.prime, s.depth, s.degree_bound, s.dp_cap
        );
        for (k, v) in &s.params {
            let _ = writeln!(out, "  {k} = {v}");
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n{}", t.name);
            let cells: Vec<Vec<String>> = std::iter::once(t.columns.clone())
                .chain(t.rows.iter().map(|r| r.iter().map(cell).collect()))
                .collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|c| cells.iter().map(|r| r.get(c).map_or(0, |x| x.chars().count())).max().unwrap_or(0))
                .collect();
            for row in &cells {
                let line: Vec<String> = row.iter().zip(&widths).map(|(x, w)| format!("{x:>w$}")).collect();
                let _ = writeln!(out, "  {}", line.join("  "));
            }
        }
        if !self.certificates.is_empty() {
            let _ = writeln!(out, "\ncertificates");
            for c in &self.certificates {
                let kind = c.kind.as_deref().unwrap_or("uncertified (truncation)");
                let stage = c.stage.map_or("-".to_string(), |s| s.to_string());
                let _ = writeln!(out, "  {} degree {}: {kind}, stage {stage}", c.subject, c.degree);
            }
        }
        let _ = writeln!(out, "\nassertions");
        for a in &self.assertions {
            let _ = writeln!(out, "  [{}] {}: {}", a.status.label(), a.name, a.detail);
        }
        for n in self.truncation.notes.iter().chain(&self.notes) {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error ({}): {}", e.kind, e.message);
        }
        let _ = writeln!(out, "{}", if self.passed { "PASSED" } else { "FAILED" });
        out
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}
