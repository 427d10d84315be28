//! Residual suites shared by the test harness and the command-line tool:
//! exhaustive commutator tables, equivariance sampling, curvature agreement,
//! projection equivalence, Hodge checks, and the spin-lift chain. Each suite
//! returns a structured report with its worst residual.

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rand::SeedableRng;

/// Deterministic RNG for sampled checks.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Outcome of one named identity or sampled check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            max_residual,
            tolerance,
            passed: max_residual < tolerance,
        }
    }
}

/// A suite report: a list of outcomes plus an overall flag.
#[derive(Debug, Clone, Serialize, Default)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteReport {
            suite: suite.into(),
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, c: CheckOutcome) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}
