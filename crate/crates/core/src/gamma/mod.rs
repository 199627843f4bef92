//! The hit sets `Γₙ(ψ) = {0 ≤ p ≤ tⁿ : B(p/tⁿ, ψ(n)) ∩ C(b, D) ≠ ∅}`.
//!
//! Three independent methods are provided: a brute-force scan over all
//! numerators, candidate generation from basic-interval endpoints, and a
//! residue dynamic program over digit strings. All of them use open balls.

mod dp;
mod endpoint;

pub use dp::{gamma_residue_dp, residue_counts, upsilon_count, ResidueCounts, UpsilonResult};
pub use endpoint::{
    e_set_contains, endpoint_candidates, f_set_contains, gamma_endpoint, proof_sets, ProofSets,
};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{big_pow, Rational};
use crate::budget::Budgets;
use crate::cantor::{Interval, MissingDigitSet};
use crate::error::{Error, Result};
use crate::psi::PsiSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    BruteForce,
    EndpointCharacterized,
    ResidueDP,
}

/// Whether a count is `#Γₙ` itself or the size of a candidate superset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CountKind {
    /// `#Γₙ(ψ)` after the open-ball test.
    Exact,
    /// Number of candidate digit strings (with their endpoint side) before the open-ball test.
    Prefilter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaResult {
    pub n: u64,
    pub method: Method,
    #[serde(serialize_with = "crate::arith::json::biguint")]
    pub count: BigUint,
    pub count_kind: CountKind,
    /// Candidate count before filtering, for the endpoint and residue methods.
    #[serde(serialize_with = "crate::arith::json::opt_biguint")]
    pub prefilter_count: Option<BigUint>,
    /// Sorted numerators `p`.
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::arith::json::opt_biguint_vec"
    )]
    pub members: Option<Vec<BigUint>>,
    /// Digit level of the candidate strings, for the endpoint and residue methods.
    pub level: Option<u64>,
}

/// Whether the open ball `B(p/tⁿ, radius)` meets the set.
pub fn ball_hits(set: &MissingDigitSet, p: &BigUint, t_pow: &BigUint, radius: &Rational) -> Result<bool> {
    let center = Rational::from_big_ratio(p.clone(), t_pow.clone());
    set.interval_intersects(&Interval::ball(&center, radius)?)
}

/// Exact `Γₙ(ψ)` by testing every `0 ≤ p ≤ tⁿ`.
pub fn gamma_bruteforce(
    set: &MissingDigitSet,
    t: u64,
    psi: &PsiSpec,
    n: u64,
    budgets: &Budgets,
) -> Result<GammaResult> {
    check_t(t)?;
    let radius = psi.eval_exact(n)?;
    let t_pow = big_pow(t, n);
    let points = t_pow.to_u64().and_then(|v| v.checked_add(1));
    let points = match points {
        Some(v) if v <= budgets.enumeration => v,
        _ => {
            return Err(Error::resource(format!(
                "brute force at n = {n} needs {t}^{n} + 1 ball tests, over the enumeration budget of {}; use the residue DP method",
                budgets.enumeration
            )))
        }
    };
    let hits: Result<Vec<Option<u64>>> = (0..points)
        .into_par_iter()
        .map(|p| Ok(ball_hits(set, &BigUint::from(p), &t_pow, &radius)?.then_some(p)))
        .collect();
    let members: Vec<BigUint> = hits?.into_iter().flatten().map(BigUint::from).collect();
    Ok(GammaResult {
        n,
        method: Method::BruteForce,
        count: BigUint::from(members.len()),
        count_kind: CountKind::Exact,
        prefilter_count: None,
        members: Some(members),
        level: None,
    })
}

fn check_t(t: u64) -> Result<()> {
    if t < 2 {
        return Err(Error::domain(format!("base t = {t} must be at least 2")));
    }
    Ok(())
}

/// Keep the candidates whose open ball meets the set; input need not be sorted.
pub(crate) fn filter_candidates(
    set: &MissingDigitSet,
    t: u64,
    n: u64,
    psi: &PsiSpec,
    mut candidates: Vec<BigUint>,
) -> Result<Vec<BigUint>> {
    candidates.sort();
    candidates.dedup();
    let radius = psi.eval_exact(n)?;
    let t_pow = big_pow(t, n);
    let kept: Result<Vec<Option<BigUint>>> = candidates
        .into_par_iter()
        .map(|p| Ok(ball_hits(set, &p, &t_pow, &radius)?.then_some(p)))
        .collect();
    Ok(kept?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nums(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn example_emptiness() {
        let set = MissingDigitSet::new(5, &[1, 2]).unwrap();
        let psi: PsiSpec = "geom:c=1/4,beta=5".parse().unwrap();
        for n in 1..=3 {
            let g = gamma_bruteforce(&set, 5, &psi, n, &Budgets::default()).unwrap();
            assert_eq!(g.count, BigUint::from(0u32));
        }
    }

    #[test]
    fn cantor_level_one() {
        let set = MissingDigitSet::new(3, &[0, 2]).unwrap();
        let psi: PsiSpec = "geom:beta=3,p=2".parse().unwrap();
        let g = gamma_bruteforce(&set, 3, &psi, 1, &Budgets::default()).unwrap();
        assert_eq!(g.members, Some(nums(&[0, 1, 2, 3])));
    }

    #[test]
    fn six_twelve_level_one() {
        // Left and right endpoints of adjacent basic intervals coincide, so the
        // eight candidate strings give six distinct numerators.
        let set = MissingDigitSet::new(6, &[0, 1, 4, 5]).unwrap();
        let psi: PsiSpec = "geom:beta=6,p=2,q=1".parse().unwrap();
        let g = gamma_bruteforce(&set, 12, &psi, 1, &Budgets::default()).unwrap();
        assert_eq!(g.members, Some(nums(&[0, 2, 4, 8, 10, 12])));
    }

    #[test]
    fn budget_is_enforced() {
        let set = MissingDigitSet::new(3, &[0, 2]).unwrap();
        let psi: PsiSpec = "geom:beta=3,p=2".parse().unwrap();
        let budgets = Budgets {
            enumeration: 10,
            ..Budgets::default()
        };
        assert!(matches!(
            gamma_bruteforce(&set, 3, &psi, 3, &budgets),
            Err(Error::Resource(_))
        ));
    }
}
