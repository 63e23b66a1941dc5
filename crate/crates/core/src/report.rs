//! Experiment reports: long-format rows plus reproducibility metadata.
//!
//! Every scan emits the same shape — `(n, trial, quantity, value)` rows —
//! so downstream plotting never needs per-experiment parsing. CSV is the
//! default surface (stable column order, shortest round-trip floats); the
//! JSON form carries the full config echo for archival.

use serde::Serialize;

/// One observation. `trial` is empty for per-`n` aggregate rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub n: usize,
    pub trial: Option<usize>,
    pub quantity: String,
    pub value: f64,
}

impl Row {
    pub fn aggregate(n: usize, quantity: &str, value: f64) -> Self {
        Self {
            n,
            trial: None,
            quantity: quantity.to_string(),
            value,
        }
    }

    pub fn trial(n: usize, trial: usize, quantity: &str, value: f64) -> Self {
        Self {
            n,
            trial: Some(trial),
            quantity: quantity.to_string(),
            value,
        }
    }
}

/// Reproducibility header: which experiment, which seed, and an honest
/// caveat line when the numbers must not be over-read.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub experiment: String,
    pub seed: u64,
    pub config_echo: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub meta: ReportMeta,
    pub rows: Vec<Row>,
}

impl ExperimentReport {
    /// CSV with header `n,trial,quantity,value`; floats print in shortest
    /// round-trip form, aggregate rows leave `trial` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,trial,quantity,value\n");
        for row in &self.rows {
            let trial = row
                .trial
                .map(|t| t.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.n, trial, row.quantity, row.value
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// First value matching `(n, trial, quantity)`; convenience for tests
    /// and assertions, not a query language.
    pub fn find(&self, n: usize, trial: Option<usize>, quantity: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.trial == trial && r.quantity == quantity)
            .map(|r| r.value)
    }

    pub fn values(&self, quantity: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.quantity == quantity)
            .map(|r| r.value)
            .collect()
    }
}
