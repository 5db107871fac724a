//! Named-residual reports produced by the verification suites.

use serde::{Deserialize, Serialize};

/// One named identity check: passes iff residual ≤ tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn pass(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// A collection of identity checks tied to the RNG seed that produced the
/// sample points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn new(seed: u64) -> IdentityReport {
        IdentityReport {
            seed,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        self.checks.push(IdentityCheck {
            name: name.into(),
            residual,
            tolerance,
        });
    }

    /// Record the max of an existing residual and a new sample.
    pub fn bump(&mut self, name: &str, residual: f64, tolerance: f64) {
        if let Some(c) = self.checks.iter_mut().find(|c| c.name == name) {
            c.residual = c.residual.max(residual);
        } else {
            self.push(name, residual, tolerance);
        }
    }

    pub fn merge(&mut self, other: IdentityReport) {
        self.checks.extend(other.checks);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(IdentityCheck::pass)
    }

    pub fn failed(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass()).collect()
    }

    pub fn worst_residual(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.residual))
    }
}
