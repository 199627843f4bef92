use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::endpoint::{proof_sets, require_threshold};
use super::{filter_candidates, CountKind, GammaResult, Method};
use crate::budget::Budgets;
use crate::cantor::MissingDigitSet;
use crate::error::{Error, Result};
use crate::params::{MultClass, ParamProfile};
use crate::psi::PsiSpec;

/// Numbers of digit strings `ξ ∈ D^len` whose value `V = Σ ξᵢ b^{len−i}`
/// satisfies `V ≡ 0` and `V ≡ −1` modulo `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueCounts {
    #[serde(serialize_with = "crate::arith::json::biguint")]
    pub zero: BigUint,
    #[serde(serialize_with = "crate::arith::json::biguint")]
    pub minus_one: BigUint,
}

/// Per-level moduli of the least-significant-digit-first reduction.
///
/// At level `j` the remaining condition is `M_j | a + k_j·W` where `W` is the
/// value of the digits not yet read. Reading the next digit `ξ` requires
/// `g_j = gcd(M_j, k_j·b)` to divide `a + k_j·ξ`, after which the condition
/// is divided through by `g_j`. `M_j` and `k_j` do not depend on the digits.
struct Levels {
    moduli: Vec<BigUint>,
    mults: Vec<BigUint>,
}

impl Levels {
    fn new(b: u64, len: u64, modulus: &BigUint) -> Self {
        let mut moduli = vec![modulus.clone()];
        let mut mults = vec![BigUint::one() % modulus.max(&BigUint::one())];
        for _ in 0..len {
            let m = moduli.last().unwrap();
            if m.is_one() {
                break;
            }
            let kb = mults.last().unwrap() * b;
            let g = m.gcd(&kb);
            let next = m / &g;
            let k = (&kb / &g) % &next;
            moduli.push(next);
            mults.push(k);
        }
        Levels { moduli, mults }
    }

    /// `g_j`, the divisor applied when reading the digit at level `j`.
    fn divisor(&self, j: usize) -> BigUint {
        &self.moduli[j] / &self.moduli[j + 1]
    }
}

fn count_from(
    set: &MissingDigitSet,
    len: u64,
    levels: &Levels,
    start: u64,
    budgets: &Budgets,
) -> Result<BigUint> {
    let size = BigUint::from(set.size());
    let mut states: HashMap<BigUint, BigUint> = HashMap::new();
    states.insert(BigUint::from(start) % &levels.moduli[0], BigUint::one());
    for j in 0..len as usize {
        if levels.moduli[j].is_one() {
            let total: BigUint = states.values().sum();
            return Ok(total * size.pow((len as usize - j) as u32));
        }
        let g = levels.divisor(j);
        let next = &levels.moduli[j + 1];
        let k = &levels.mults[j];
        let mut fresh: HashMap<BigUint, BigUint> = HashMap::new();
        for (a, c) in &states {
            for &d in set.digits() {
                let s = a + k * d;
                let (q, r) = s.div_rem(&g);
                if r.is_zero() {
                    *fresh.entry(q % next).or_insert_with(BigUint::zero) += c;
                }
            }
        }
        if fresh.len() as u64 > budgets.residue {
            return Err(Error::resource(format!(
                "residue mapping grew past the budget of {} entries",
                budgets.residue
            )));
        }
        states = fresh;
    }
    let m = &levels.moduli[levels.moduli.len().min(len as usize + 1) - 1];
    Ok(states
        .iter()
        .filter(|(a, _)| (*a % m).is_zero())
        .map(|(_, c)| c)
        .sum())
}

/// Count the strings of length `len` over `D` with value `≡ 0` and `≡ −1` modulo `M`.
pub fn residue_counts(
    set: &MissingDigitSet,
    len: u64,
    modulus: &BigUint,
    budgets: &Budgets,
) -> Result<ResidueCounts> {
    if modulus.is_zero() {
        return Err(Error::domain("modulus must be positive"));
    }
    let levels = Levels::new(set.b(), len, modulus);
    Ok(ResidueCounts {
        zero: count_from(set, len, &levels, 0, budgets)?,
        minus_one: count_from(set, len, &levels, 1, budgets)?,
    })
}

/// Values of all strings counted by `count_from` with the given start.
fn enumerate_from(set: &MissingDigitSet, len: u64, levels: &Levels, start: u64) -> Vec<BigUint> {
    let mut out = Vec::new();
    let start = BigUint::from(start) % &levels.moduli[0];
    descend(set, len as usize, levels, 0, start, BigUint::zero(), BigUint::one(), &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn descend(
    set: &MissingDigitSet,
    len: usize,
    levels: &Levels,
    j: usize,
    a: BigUint,
    low: BigUint,
    weight: BigUint,
    out: &mut Vec<BigUint>,
) {
    if j == len {
        if (&a % &levels.moduli[j.min(levels.moduli.len() - 1)]).is_zero() {
            out.push(low);
        }
        return;
    }
    if levels.moduli[j].is_one() {
        for top in all_strings(set, len - j) {
            out.push(&low + &weight * top);
        }
        return;
    }
    let g = levels.divisor(j);
    let next = &levels.moduli[j + 1];
    let k = &levels.mults[j];
    for &d in set.digits() {
        let (q, r) = (&a + k * d).div_rem(&g);
        if r.is_zero() {
            descend(set, len, levels, j + 1, q % next, &low + &weight * d, &weight * set.b(), out);
        }
    }
}

fn all_strings(set: &MissingDigitSet, len: usize) -> Vec<BigUint> {
    let mut vals = vec![BigUint::zero()];
    for _ in 0..len {
        vals = vals
            .iter()
            .flat_map(|v| set.digits().iter().map(move |&d| v * set.b() + d))
            .collect();
    }
    vals
}

/// Residue dynamic program over the digit strings of length `m0`.
///
/// Without members the count is the number of candidate (string, side) pairs
/// (left endpoints `V ≡ 0`, right endpoints `V ≡ −1` modulo `M`). With members
/// the candidates are rebuilt, deduplicated and filtered by the open-ball test,
/// and the count is `#Γₙ(ψ)`.
pub fn gamma_residue_dp(
    set: &MissingDigitSet,
    t: u64,
    psi: &PsiSpec,
    n: u64,
    profile: &ParamProfile,
    with_members: bool,
    budgets: &Budgets,
) -> Result<GammaResult> {
    if set.b() != profile.b || t != profile.t {
        return Err(Error::domain("profile does not match (b, t)"));
    }
    require_threshold(profile, psi, n)?;
    let ps = proof_sets(profile, n)?;
    let counts = residue_counts(set, ps.m0, &ps.modulus, budgets)?;
    let prefilter = &counts.zero + &counts.minus_one;
    if !with_members {
        return Ok(GammaResult {
            n,
            method: Method::ResidueDP,
            count: prefilter.clone(),
            count_kind: CountKind::Prefilter,
            prefilter_count: Some(prefilter),
            members: None,
            level: Some(ps.m0),
        });
    }
    if prefilter > BigUint::from(budgets.enumeration) {
        return Err(Error::resource(format!(
            "{prefilter} candidate strings exceed the enumeration budget of {}",
            budgets.enumeration
        )));
    }
    let levels = Levels::new(set.b(), ps.m0, &ps.modulus);
    let mut candidates: Vec<BigUint> = enumerate_from(set, ps.m0, &levels, 0)
        .into_iter()
        .map(|v| v / &ps.modulus)
        .collect();
    candidates.extend(
        enumerate_from(set, ps.m0, &levels, 1)
            .into_iter()
            .map(|v| (v + 1u32) / &ps.modulus),
    );
    let members = filter_candidates(set, t, n, psi, candidates)?;
    Ok(GammaResult {
        n,
        method: Method::ResidueDP,
        count: BigUint::from(members.len()),
        count_kind: CountKind::Exact,
        prefilter_count: Some(prefilter),
        members: Some(members),
        level: Some(ps.m0),
    })
}

/// Tail tuples `(ξ_{α₁n+1}, …, ξ_{m0}) ∈ D^{m0−α₁n}` whose value, or value plus one, is divisible by `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpsilonResult {
    pub n: u64,
    pub tail_len: u64,
    #[serde(rename = "M", serialize_with = "crate::arith::json::biguint")]
    pub modulus: BigUint,
    #[serde(serialize_with = "crate::arith::json::biguint")]
    pub count: BigUint,
    pub tag: &'static str,
}

pub fn upsilon_count(
    set: &MissingDigitSet,
    t: u64,
    n: u64,
    profile: &ParamProfile,
    budgets: &Budgets,
) -> Result<UpsilonResult> {
    if profile.class != MultClass::IndependentSamePrimes {
        return Err(Error::hypothesis(
            "the tail set is defined for multiplicatively independent bases with equal prime support",
        ));
    }
    if set.b() != profile.b || t != profile.t {
        return Err(Error::domain("profile does not match (b, t)"));
    }
    if !n.is_multiple_of(profile.l0) {
        return Err(Error::hypothesis(format!(
            "alpha1 * n = {} * {n} is not an integer",
            profile.alpha1
        )));
    }
    let ps = proof_sets(profile, n)?;
    let head = profile.l1 * n / profile.l0;
    let tail_len = ps.m0 - head;
    let count = if ps.modulus.is_one() {
        BigUint::from(set.size()).pow(tail_len as u32)
    } else {
        let c = residue_counts(set, tail_len, &ps.modulus, budgets)?;
        c.zero + c.minus_one
    };
    Ok(UpsilonResult {
        n,
        tail_len,
        modulus: ps.modulus,
        count,
        tag: "generalized-upsilon",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::big_pow;
    use crate::params::build_param_profile;

    /// Direct scan of all strings.
    fn brute_counts(set: &MissingDigitSet, len: u64, m: u64) -> (u64, u64) {
        let mut zero = 0;
        let mut minus = 0;
        for v in all_strings(set, len as usize) {
            let r = (v % m).to_u64_digits().first().copied().unwrap_or(0);
            if r == 0 {
                zero += 1;
            }
            if (r + 1) % m == 0 {
                minus += 1;
            }
        }
        (zero, minus)
    }

    #[test]
    fn counts_match_scan() {
        for (b, d) in [(6, vec![0, 1, 4, 5]), (6, vec![0, 1, 2, 3]), (12, vec![0, 1, 2, 5, 6, 9, 10, 11]), (10, vec![0, 3, 7])] {
            let set = MissingDigitSet::new(b, &d).unwrap();
            for len in 0..5 {
                for m in [1u64, 2, 3, 4, 8, 9, 27, 12, 16, 100] {
                    let c = residue_counts(&set, len, &BigUint::from(m), &Budgets::default()).unwrap();
                    let (z, o) = brute_counts(&set, len, m);
                    assert_eq!(c.zero, BigUint::from(z), "b={b} len={len} M={m}");
                    assert_eq!(c.minus_one, BigUint::from(o), "b={b} len={len} M={m}");
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_count() {
        let set = MissingDigitSet::new(6, &[0, 1, 4, 5]).unwrap();
        for m in [1u64, 3, 9, 27] {
            let modulus = BigUint::from(m);
            let levels = Levels::new(6, 4, &modulus);
            let c = residue_counts(&set, 4, &modulus, &Budgets::default()).unwrap();
            let zero = enumerate_from(&set, 4, &levels, 0);
            assert_eq!(BigUint::from(zero.len()), c.zero);
            assert!(zero.iter().all(|v| (v % m).is_zero()));
            let one = enumerate_from(&set, 4, &levels, 1);
            assert_eq!(BigUint::from(one.len()), c.minus_one);
            assert!(one.iter().all(|v| ((v + 1u32) % m).is_zero()));
        }
    }

    #[test]
    fn six_twelve_prefilter() {
        let set = MissingDigitSet::new(6, &[0, 1, 4, 5]).unwrap();
        let profile = build_param_profile(6, 12).unwrap();
        let psi: PsiSpec = "geom:beta=6,p=2,q=1".parse().unwrap();
        for n in 1..=12 {
            let g = gamma_residue_dp(&set, 12, &psi, n, &profile, false, &Budgets::default()).unwrap();
            assert_eq!(g.count, big_pow(4, n) * 2u32);
            assert_eq!(g.count_kind, CountKind::Prefilter);
        }
    }

    #[test]
    fn upsilon_examples() {
        let profile = build_param_profile(6, 12).unwrap();
        let b = Budgets::default();
        let set = MissingDigitSet::new(6, &[0, 1, 4, 5]).unwrap();
        assert_eq!(upsilon_count(&set, 12, 3, &profile, &b).unwrap().count, BigUint::from(2u32));
        let set = MissingDigitSet::new(6, &[0, 5]).unwrap();
        assert_eq!(upsilon_count(&set, 12, 2, &profile, &b).unwrap().count, BigUint::from(2u32));
        let set = MissingDigitSet::new(6, &[0, 1, 2, 3]).unwrap();
        assert_eq!(upsilon_count(&set, 12, 1, &profile, &b).unwrap().count, BigUint::from(3u32));
        let p1218 = build_param_profile(12, 18).unwrap();
        let set = MissingDigitSet::new(12, &[0, 11]).unwrap();
        assert!(matches!(upsilon_count(&set, 18, 1, &p1218, &b), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn members_match_bruteforce() {
        let profile = build_param_profile(6, 12).unwrap();
        let psi: PsiSpec = "geom:beta=6,p=2,q=1".parse().unwrap();
        let b = Budgets::default();
        for d in [vec![0, 1, 4, 5], vec![0, 1, 2, 3], vec![0, 5], vec![1, 2, 3]] {
            let set = MissingDigitSet::new(6, &d).unwrap();
            for n in 1..=3 {
                let dp = gamma_residue_dp(&set, 12, &psi, n, &profile, true, &b).unwrap();
                let bf = super::super::gamma_bruteforce(&set, 12, &psi, n, &b).unwrap();
                assert_eq!(dp.members, bf.members, "D={d:?} n={n}");
                assert_eq!(dp.count, bf.count);
            }
        }
    }
}
