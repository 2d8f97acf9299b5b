use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    PassUpToConvention,
}

impl Status {
    pub fn is_pass(self) -> bool {
        !matches!(self, Status::Fail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub location: String,
    pub expected: f64,
    pub found: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max: f64,
    pub mean: f64,
}

impl Residual {
    pub fn from_samples(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Residual::default();
        }
        let max = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let mean = samples.iter().map(|s| s.abs()).sum::<f64>() / samples.len() as f64;
        Residual { max, mean }
    }
}

/// Outcome of checking one identity, exactly or on random probes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub status: Status,
    pub discrepancies: Vec<Discrepancy>,
    pub convention: Option<String>,
    pub residual: Residual,
    pub trials: u64,
    pub seed: Option<u64>,
    /// Named scalar findings (measured defects, extremal statistics, ...).
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(identity: impl Into<String>) -> Self {
        VerificationReport {
            identity: identity.into(),
            status: Status::Pass,
            discrepancies: Vec::new(),
            convention: None,
            residual: Residual::default(),
            trials: 0,
            seed: None,
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn fail(&mut self, location: impl Into<String>, expected: f64, found: f64) {
        self.status = Status::Fail;
        self.discrepancies.push(Discrepancy { location: location.into(), expected, found });
    }

    /// Records a residual check; fails the report if `value` exceeds `tol`.
    pub fn check(&mut self, location: impl Into<String>, value: f64, tol: f64) -> bool {
        let ok = value.abs() <= tol && value.is_finite();
        if !ok {
            self.fail(location, 0.0, value);
        }
        ok
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }
}
