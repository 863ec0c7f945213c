use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Advisory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Element { label: String, coords: Vec<f64> },
    Map { label: String, dim: usize, entries: Vec<f64> },
    Indices { label: String, indices: Vec<usize> },
}

/// Structured pass/fail record. A failing report always carries a residual
/// or a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub statement_id: String,
    pub status: Status,
    pub residuals: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub seed: Option<u64>,
    pub runtime_ms: u64,
}

impl Report {
    /// A passing report with no evidence attached yet.
    pub fn new(statement_id: impl Into<String>) -> Self {
        Self {
            statement_id: statement_id.into(),
            status: Status::Pass,
            residuals: BTreeMap::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
            seed: None,
            runtime_ms: 0,
        }
    }

    pub fn residual(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.residuals.insert(name.into(), value);
        self
    }

    pub fn witness(&mut self, w: Witness) -> &mut Self {
        self.witnesses.push(w);
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Records `value` under `name` and fails the report unless `pass` holds.
    pub fn require(&mut self, name: impl Into<String>, value: f64, pass: bool) -> &mut Self {
        self.residual(name, value);
        if !pass {
            self.status = Status::Fail;
        }
        self
    }

    /// Records `value` and fails unless `value ≤ tol` (NaN fails).
    pub fn require_below(&mut self, name: impl Into<String>, value: f64, tol: f64) -> &mut Self {
        self.require(name, value, value <= tol)
    }

    /// Records `value` and fails unless `value ≥ bound`.
    pub fn require_above(&mut self, name: impl Into<String>, value: f64, bound: f64) -> &mut Self {
        self.require(name, value, value >= bound)
    }

    pub fn fail(&mut self, note: impl Into<String>) -> &mut Self {
        self.status = Status::Fail;
        self.note(note)
    }

    pub fn mark_advisory(&mut self) -> &mut Self {
        self.status = Status::Advisory;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn has_evidence(&self) -> bool {
        !self.residuals.is_empty() || !self.witnesses.is_empty()
    }

    /// Folds another report's outcome into this one, prefixing its residuals.
    pub fn absorb(&mut self, prefix: &str, other: &Report) -> &mut Self {
        for (k, v) in &other.residuals {
            self.residuals.insert(format!("{prefix}.{k}"), *v);
        }
        self.witnesses.extend(other.witnesses.iter().cloned());
        self.notes.extend(other.notes.iter().map(|n| format!("{prefix}: {n}")));
        if other.status == Status::Fail {
            self.status = Status::Fail;
        }
        self
    }
}
