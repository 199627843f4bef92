use std::env;

use serde::Serialize;

/// Desk-scale guardrails for the enumeration engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    /// Maximum number of points (numerators, digit strings, tuples) a brute-force scan may visit.
    pub enumeration: u64,
    /// Maximum number of live residues in a residue mapping.
    pub residue: u64,
    /// Maximum size, in bits, of an integer built by an exact comparison.
    pub bits: u64,
}

pub const ENV_BUDGET_ENUM: &str = "DIGITDIOPH_BUDGET_ENUM";
pub const ENV_BUDGET_RESIDUE: &str = "DIGITDIOPH_BUDGET_RESIDUE";
pub const ENV_BUDGET_BITS: &str = "DIGITDIOPH_BUDGET_BITS";

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            enumeration: 10_000_000,
            residue: 1_000_000,
            bits: 1_000_000,
        }
    }
}

impl Budgets {
    /// Defaults overridden by the `DIGITDIOPH_BUDGET_*` environment variables.
    /// Unparseable values are ignored.
    pub fn from_env() -> Self {
        let mut budgets = Budgets::default();
        let read = |key: &str| env::var(key).ok().and_then(|v| v.trim().parse::<u64>().ok());
        if let Some(v) = read(ENV_BUDGET_ENUM) {
            budgets.enumeration = v;
        }
        if let Some(v) = read(ENV_BUDGET_RESIDUE) {
            budgets.residue = v;
        }
        if let Some(v) = read(ENV_BUDGET_BITS) {
            budgets.bits = v;
        }
        budgets
    }

    /// Install the bits budget as the cap for exact log comparisons.
    pub fn apply_bits_cap(&self) {
        crate::arith::set_bits_cap(self.bits);
    }
}
