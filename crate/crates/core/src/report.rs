use serde::Serialize;

/// Outcome of running one invariant suite: case counts, worst discrepancy,
/// and a human-readable description of the worst case.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub cases: u64,
    pub failures: u64,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub worst_case: Option<String>,
}

impl CheckReport {
    pub fn new(tolerance: f64) -> Self {
        CheckReport {
            cases: 0,
            failures: 0,
            max_discrepancy: 0.0,
            tolerance,
            worst_case: None,
        }
    }

    /// Record one case. `describe` is only invoked when the case becomes the
    /// new worst, so callers can build the description lazily.
    pub fn record(&mut self, discrepancy: f64, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if discrepancy > self.tolerance {
            self.failures += 1;
        }
        if discrepancy > self.max_discrepancy || (self.cases == 1 && self.worst_case.is_none()) {
            self.max_discrepancy = self.max_discrepancy.max(discrepancy);
            if discrepancy >= self.max_discrepancy {
                self.worst_case = Some(describe());
            }
        }
    }

    /// Record an exact comparison: any mismatch is an immediate failure.
    pub fn record_exact(&mut self, equal: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !equal {
            self.failures += 1;
            self.max_discrepancy = f64::INFINITY;
            self.worst_case = Some(describe());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn merge(&mut self, other: &CheckReport) {
        self.cases += other.cases;
        self.failures += other.failures;
        if other.max_discrepancy > self.max_discrepancy {
            self.max_discrepancy = other.max_discrepancy;
            self.worst_case = other.worst_case.clone();
        }
    }
}
