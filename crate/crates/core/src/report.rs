use std::time::Duration;

use serde::Serialize;

/// Outcome of a verification pass. Violations are evidence to inspect, never
/// a reason to abort the run.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub bound: u64,
    pub violations: Vec<String>,
    pub elapsed_ms: u128,
}

impl CheckReport {
    pub fn new(
        check: impl Into<String>,
        bound: u64,
        violations: Vec<String>,
        elapsed: Duration,
    ) -> Self {
        CheckReport {
            check: check.into(),
            bound,
            violations,
            elapsed_ms: elapsed.as_millis(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}
