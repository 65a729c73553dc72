use serde::Serialize;
use serde_json::Value;

use crate::dataset::{Dataset, Task};

#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    /// `synthetic:<model>` or the input path.
    pub source: String,
    pub fingerprint: String,
    pub n: usize,
    pub p: usize,
    pub task: &'static str,
    pub variables: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_fingerprint: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_n: Option<usize>,
}

impl DatasetInfo {
    pub fn new(source: String, data: &Dataset<f64>, variables: Vec<String>) -> Self {
        Self {
            source,
            fingerprint: data.fingerprint(),
            n: data.n_samples(),
            p: data.n_vars(),
            task: task_name(data.task()),
            variables,
            test_fingerprint: None,
            test_n: None,
        }
    }
}

pub fn task_name(task: Task) -> &'static str {
    match task {
        Task::Regression => "regression",
        Task::Classification => "classification",
    }
}

/// One self-describing result per invocation. Everything except
/// `timing_ms` is a pure function of the flags, seed and input bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub dataset: Option<DatasetInfo>,
    pub config: Value,
    pub results: Value,
    pub converged: bool,
    pub timing_ms: f64,
}

impl RunRecord {
    /// The record without its timing, for determinism comparisons.
    pub fn payload(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("record serializes");
        v.as_object_mut().expect("object").remove("timing_ms");
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}

/// Tab-separated table with a header row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_tsv(&self) -> String {
        let mut out = self.header.join("\t");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip representation.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}
