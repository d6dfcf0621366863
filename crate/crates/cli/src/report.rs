//! Machine-readable output. Every count is an exact decimal string.

use serde::{Deserialize, Serialize};

use ramsey_core::engines::Coloring;
use ramsey_core::EngineReport;

use crate::problem::Resolved;

pub const SCHEMA: &str = "ramsey-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub input: InputEcho,
    pub runs: Vec<RunRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kmax: Vec<KmaxRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub t: usize,
    pub r: usize,
    pub p: Vec<usize>,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub engine: Option<String>,
    pub k_cutoff: Option<usize>,
    pub budget: u64,
    pub workers: Option<usize>,
}

impl From<&Resolved> for InputEcho {
    fn from(r: &Resolved) -> Self {
        Self {
            t: r.spec.t(),
            r: r.spec.r(),
            p: r.spec.p().to_vec(),
            n: r.n,
            n_max: r.n_max,
            engine: r.engine.map(|e| e.to_string()),
            k_cutoff: r.k_cutoff,
            budget: r.budget,
            workers: r.workers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n: usize,
    pub engine: String,
    /// `"ok"` or `"error"`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_w: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_witness: Option<bool>,
    #[serde(default)]
    pub enumerated: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_k: Option<usize>,
    /// Signed per-k inclusion-exclusion sums.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_k: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_coloring: Option<Vec<u8>>,
    pub elapsed_ms: f64,
}

impl RunRecord {
    pub fn from_report(report: &EngineReport) -> Self {
        Self {
            n: report.n,
            engine: report.engine.to_string(),
            status: "ok".into(),
            error: None,
            n_w: Some(report.n_w.to_string()),
            total: Some(report.total.to_string()),
            is_witness: Some(report.is_ramsey_witness()),
            enumerated: report.enumerated,
            max_k: report.max_k,
            per_k: report.per_k.iter().map(|v| v.to_string()).collect(),
            witness_coloring: None,
            elapsed_ms: report.elapsed.as_secs_f64() * 1e3,
        }
    }

    pub fn from_error(n: usize, engine: &str, error: &ramsey_core::Error) -> Self {
        Self {
            n,
            engine: engine.into(),
            status: "error".into(),
            error: Some(error.to_string()),
            n_w: None,
            total: None,
            is_witness: None,
            enumerated: 0,
            max_k: None,
            per_k: Vec::new(),
            witness_coloring: None,
            elapsed_ms: 0.0,
        }
    }

    pub fn with_coloring(mut self, coloring: &Coloring) -> Self {
        self.witness_coloring = Some(coloring.boxes().to_vec());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub ramsey_n: Option<usize>,
    pub n_max: usize,
    /// `n` of the distribution without the property, when one was recorded.
    pub lower_witness_n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KmaxRecord {
    pub n: usize,
    pub bound: String,
    pub realized: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportDocument {
    pub fn new(command: &str, input: InputEcho) -> Self {
        Self {
            schema: SCHEMA.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            input,
            runs: Vec::new(),
            agreement: None,
            search: None,
            kmax: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// The document with every timing field zeroed.
    pub fn without_timing(&self) -> Self {
        let mut copy = self.clone();
        for run in &mut copy.runs {
            run.elapsed_ms = 0.0;
        }
        copy
    }

    /// One row per `(n, engine)`, or per `n` for `kmax` documents.
    pub fn to_csv(&self) -> String {
        let mut out = csv::Writer::from_writer(Vec::new());
        let p: Vec<String> = self.input.p.iter().map(|v| v.to_string()).collect();
        let p = p.join(",");
        let (t, r) = (self.input.t.to_string(), self.input.r.to_string());
        let opt = |v: Option<String>| v.unwrap_or_default();
        if self.command == "kmax" {
            out.write_record(["schema", "command", "t", "r", "p", "n", "bound", "realized", "error"])
                .expect("in-memory write");
            for row in &self.kmax {
                out.write_record([
                    self.schema.as_str(),
                    &self.command,
                    &t,
                    &r,
                    &p,
                    &row.n.to_string(),
                    &row.bound,
                    &opt(row.realized.map(|v| v.to_string())),
                    &opt(row.error.clone()),
                ])
                .expect("in-memory write");
            }
        } else {
            out.write_record([
                "schema", "command", "t", "r", "p", "n", "engine", "status", "n_w", "total",
                "is_witness", "enumerated", "max_k", "elapsed_ms", "error",
            ])
            .expect("in-memory write");
            for run in &self.runs {
                out.write_record([
                    self.schema.as_str(),
                    &self.command,
                    &t,
                    &r,
                    &p,
                    &run.n.to_string(),
                    &run.engine,
                    &run.status,
                    &opt(run.n_w.clone()),
                    &opt(run.total.clone()),
                    &opt(run.is_witness.map(|v| v.to_string())),
                    &run.enumerated.to_string(),
                    &opt(run.max_k.map(|v| v.to_string())),
                    &format!("{:.3}", run.elapsed_ms),
                    &opt(run.error.clone()),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(out.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}
