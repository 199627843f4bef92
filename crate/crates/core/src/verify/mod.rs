//! Verification harness.
//!
//! Each check runs a lemma-level claim on concrete instances against an
//! independent oracle and records every counterexample with the inputs needed
//! to reproduce it. Finite-depth checks of limsup statements are evidence up
//! to the tested depth, not proofs.

mod chain;
mod lemmas;

use serde::Serialize;
use serde_json::{Map, Value};

pub use chain::{check_emptiness, check_gamma_chain, check_prop31, check_wb_alpha1_identity, explore_above_threshold};
pub use lemmas::{check_divisibility, check_forced_digits, random_same_prime_pair, sweep_lemmas};

/// One counterexample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub inputs: Value,
    pub observed: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub instances_tested: u64,
    pub failures: Vec<Failure>,
    /// Observed supremum for `≪`-style bounds.
    #[serde(serialize_with = "crate::arith::json::opt_float12")]
    pub max_ratio: Option<f64>,
    /// Check-specific data such as per-level counts.
    pub details: Map<String, Value>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub(crate) fn new(name: &str) -> Self {
        CheckReport {
            check_name: name.to_string(),
            instances_tested: 0,
            failures: Vec::new(),
            max_ratio: None,
            details: Map::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub(crate) fn fail(&mut self, inputs: Value, observed: impl ToString, expected: impl ToString) {
        self.failures.push(Failure {
            inputs,
            observed: observed.to_string(),
            expected: expected.to_string(),
        });
    }

    pub(crate) fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable detail"),
        );
    }

    pub(crate) fn absorb(&mut self, other: CheckReport) {
        self.instances_tested += other.instances_tested;
        self.failures.extend(other.failures);
    }
}
