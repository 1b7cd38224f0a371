//! Machine-readable record of one run.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// Echo of the options the run used.
    pub config: BTreeMap<String, String>,
    pub stages: Vec<Stage>,
    pub summary: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn with_config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    /// Runs `f` and records its wall-clock time under `name`.
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.stages.push(Stage {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn record(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), value);
    }

    /// Records `value <= tolerance` as a named check.
    pub fn check(&mut self, name: &str, value: f64, tolerance: f64) -> bool {
        let passed = value <= tolerance;
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            value,
            tolerance,
        });
        passed
    }

    pub fn check_bool(&mut self, name: &str, passed: bool) -> bool {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            value: if passed { 0.0 } else { 1.0 },
            tolerance: 0.0,
        });
        passed
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.stages.iter().all(|s| s.seconds.is_finite())
            && self.summary.values().all(|v| v.is_finite())
            && self
                .checks
                .iter()
                .all(|c| c.value.is_finite() && c.tolerance.is_finite())
    }

    pub fn to_json(&self) -> Result<String> {
        if !self.is_finite() {
            return Err(Error::Format("report holds non-finite values".into()));
        }
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    /// One `PASS`/`FAIL` line per check.
    pub fn check_lines(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {}: {:.3e} (tolerance {:.1e})\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance
                )
            })
            .collect()
    }
}
