//! Run reports: one JSON document per invocation plus a plain-text table.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "liecompat";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Warn,
    Found,
    NotFound,
    Info,
    Skipped,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Warn => "warn",
            Status::Found => "found",
            Status::NotFound => "not found",
            Status::Info => "info",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        let mut hex = String::with_capacity(64);
        for b in digest {
            let _ = write!(hex, "{b:02x}");
        }
        InputDigest {
            path: path.to_string(),
            sha256: hex,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        CheckResult {
            name: name.into(),
            status,
            residual: None,
            detail: String::new(),
            payload: None,
        }
    }

    pub fn residual(mut self, r: f64) -> Self {
        self.residual = Some(r);
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    pub fn payload(mut self, p: Value) -> Self {
        self.payload = Some(p);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    /// Full argument vector, program name included.
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub scalar: String,
    pub tol: f64,
    pub seeds: Vec<u64>,
    pub checks: Vec<CheckResult>,
    pub exit_code: i32,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(command: Vec<String>, scalar: &str, tol: f64, seed: u64) -> Self {
        RunReport {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            inputs: Vec::new(),
            scalar: scalar.to_string(),
            tol,
            seeds: vec![seed],
            checks: Vec::new(),
            exit_code: 0,
            wall_time_s: 0.0,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn any(&self, status: Status) -> bool {
        self.checks.iter().any(|c| c.status == status)
    }

    pub fn to_table(&self) -> String {
        let rows: Vec<[String; 4]> = self
            .checks
            .iter()
            .map(|c| {
                [
                    c.name.clone(),
                    c.status.label().to_string(),
                    c.residual.map(|r| format!("{r:.3e}")).unwrap_or_else(|| "-".into()),
                    c.detail.clone(),
                ]
            })
            .collect();
        let header = ["check", "status", "residual", "detail"];
        let mut width = header.map(str::len);
        for r in &rows {
            for (w, cell) in width.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: [&str; 4]| {
            let _ = writeln!(
                out,
                "{:<w0$}  {:<w1$}  {:>w2$}  {}",
                cells[0],
                cells[1],
                cells[2],
                cells[3],
                w0 = width[0],
                w1 = width[1],
                w2 = width[2],
            );
        };
        line(&mut out, header);
        let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, [&rule[0], &rule[1], &rule[2], "------"]);
        for r in &rows {
            line(&mut out, [&r[0], &r[1], &r[2], &r[3]]);
        }
        let _ = writeln!(out, "exit code {} ({:.2} s)", self.exit_code, self.wall_time_s);
        out
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("report serialises");
        if path == Path::new("-") {
            println!("{text}");
            Ok(())
        } else {
            std::fs::write(path, text + "\n")
        }
    }
}
