use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{filter_candidates, CountKind, GammaResult, Method};
use crate::arith::{big_pow, power_divides, Rational};
use crate::budget::Budgets;
use crate::cantor::{digits_in_set, endpoint_member, MissingDigitSet};
use crate::error::{Error, Result};
use crate::params::{DigitProfile, MultClass, ParamProfile};
use crate::psi::{PsiSpec, Threshold};

/// The level bookkeeping behind the endpoint characterization at a fixed `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofSets {
    pub n: u64,
    pub l0: u64,
    pub l1: u64,
    /// `⌊n / l0⌋`.
    pub ntilde: u64,
    /// `n − l0·ntilde`.
    pub r: u64,
    /// `⌈alpha2·l0·ntilde⌉ + ⌈alpha2·r⌉`.
    pub m0: u64,
    /// `alpha1·l0·ntilde + ⌈alpha2·r⌉`, the level of the refined superset.
    pub m1: u64,
    /// `⌈alpha2·n⌉`.
    pub alpha2_level: u64,
    /// `M = b^{m0} / tⁿ`.
    #[serde(rename = "M", serialize_with = "crate::arith::json::biguint")]
    pub modulus: BigUint,
}

pub fn proof_sets(profile: &ParamProfile, n: u64) -> Result<ProofSets> {
    if profile.class == MultClass::IndependentDifferentPrimes {
        return Err(Error::hypothesis("b and t must have the same prime divisors"));
    }
    let (l0, l1) = (profile.l0, profile.l1);
    let ntilde = n / l0;
    let r = n % l0;
    let ceil = |k: u64| -> u64 { profile.ceil_alpha2(k) };
    let m0 = ceil(l0 * ntilde) + ceil(r);
    let m1 = l1 * ntilde + ceil(r);
    if !power_divides(profile.t, n, profile.b, m0) {
        return Err(Error::hypothesis(format!(
            "t^n does not divide b^m0 for n = {n}, m0 = {m0}"
        )));
    }
    let modulus = big_pow(profile.b, m0) / big_pow(profile.t, n);
    Ok(ProofSets {
        n,
        l0,
        l1,
        ntilde,
        r,
        m0,
        m1,
        alpha2_level: ceil(n),
        modulus,
    })
}

/// Check `ψ(n) ≤ b^{−⌈alpha2·n⌉−1}` at this `n`.
pub(crate) fn require_threshold(profile: &ParamProfile, psi: &PsiSpec, n: u64) -> Result<()> {
    let thr = Threshold::alpha2(profile.b, profile.alpha2.clone());
    if psi.eval_exact(n)? > thr.eval(n) {
        return Err(Error::hypothesis(format!(
            "psi(n) <= b^(-ceil(alpha2 n) - 1) fails at n = {n}"
        )));
    }
    Ok(())
}

fn check_compatible(set: &MissingDigitSet, t: u64, profile: &ParamProfile) -> Result<()> {
    if set.b() != profile.b || t != profile.t {
        return Err(Error::domain(format!(
            "profile is for (b, t) = ({}, {}), not ({}, {t})",
            profile.b,
            profile.t,
            set.b()
        )));
    }
    Ok(())
}

/// Numerators `p ≤ tⁿ` with `p/tⁿ ∈ E(level)`, generated from the digit strings of length `level`.
pub fn endpoint_candidates(
    set: &MissingDigitSet,
    t: u64,
    n: u64,
    level: u64,
    budgets: &Budgets,
) -> Result<Vec<BigUint>> {
    let strings = set.size().checked_pow(level as u32).filter(|&s| s <= budgets.enumeration);
    if strings.is_none() {
        return Err(Error::resource(format!(
            "{}^{level} digit strings exceed the enumeration budget of {}",
            set.size(),
            budgets.enumeration
        )));
    }
    let t_pow = big_pow(t, n);
    let b_pow = big_pow(set.b(), level);
    let g = t_pow.gcd(&b_pow);
    let num = &t_pow / &g;
    let den = &b_pow / &g;
    let mut out = Vec::new();
    let mut push = |v: &BigUint| {
        let (q, rem) = v.div_rem(&den);
        if rem.is_zero() {
            out.push(q * &num);
        }
    };
    let digits = set.digits();
    let mut idx = vec![0usize; level as usize];
    loop {
        let mut v = BigUint::zero();
        for &i in &idx {
            v = v * set.b() + digits[i];
        }
        push(&v);
        push(&(v + 1u32));
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                out.sort();
                out.dedup();
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < digits.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `Γₙ(ψ)` from endpoint candidates, filtered by the open-ball test.
///
/// Candidates are the numerators whose point is an endpoint at level `m0`,
/// or at the refined level `m1` when `D ⊆ D*`.
pub fn gamma_endpoint(
    set: &MissingDigitSet,
    t: u64,
    psi: &PsiSpec,
    n: u64,
    profile: &ParamProfile,
    digits: &DigitProfile,
    budgets: &Budgets,
) -> Result<GammaResult> {
    check_compatible(set, t, profile)?;
    require_threshold(profile, psi, n)?;
    let ps = proof_sets(profile, n)?;
    let level = if digits.d_subset_dstar == Some(true) {
        ps.m1
    } else {
        ps.m0
    };
    let candidates = endpoint_candidates(set, t, n, level, budgets)?;
    let prefilter = BigUint::from(candidates.len());
    let members = filter_candidates(set, t, n, psi, candidates)?;
    Ok(GammaResult {
        n,
        method: Method::EndpointCharacterized,
        count: BigUint::from(members.len()),
        count_kind: CountKind::Exact,
        prefilter_count: Some(prefilter),
        members: Some(members),
        level: Some(level),
    })
}

/// Whether `p/tⁿ ∈ E(m)`.
pub fn e_set_contains(set: &MissingDigitSet, t: u64, n: u64, p: &BigUint, m: u64) -> Result<bool> {
    let x = Rational::from_big_ratio(p.clone(), big_pow(t, n));
    endpoint_member(set, &x, m)
}

/// Whether `p ∈ F_{n,m}(ψ)`: some `q/b^m ∈ E(m)` lies within `max(ψ(n), b^{−m})` of `p/tⁿ`.
pub fn f_set_contains(
    set: &MissingDigitSet,
    t: u64,
    n: u64,
    psi: &PsiSpec,
    m: u64,
    p: &BigUint,
    budgets: &Budgets,
) -> Result<bool> {
    let b_pow = big_pow(set.b(), m);
    let cell = Rational::from_big_ratio(BigUint::from(1u32), b_pow.clone());
    let psi_n = psi.eval_exact(n)?;
    let radius = if psi_n > cell { psi_n } else { cell };
    // q ranges over the integers strictly within radius·b^m of p·b^m/tⁿ.
    let scale = Rational::from(b_pow.clone());
    let center = &Rational::from_big_ratio(p.clone(), big_pow(t, n)) * &scale;
    let reach = &radius * &scale;
    let lo: BigInt = (&center - &reach).floor() + 1;
    let hi: BigInt = (&center + &reach).ceil() - 1;
    let lo = lo.max(BigInt::zero());
    let hi = hi.min(BigInt::from(b_pow.clone()));
    if lo > hi {
        return Ok(false);
    }
    let width = (&hi - &lo).to_u64().unwrap_or(u64::MAX);
    if width >= budgets.enumeration {
        return Err(Error::resource("F-set window exceeds the enumeration budget"));
    }
    let mut q = lo.to_biguint().expect("non-negative");
    let hi = hi.to_biguint().expect("non-negative");
    while q <= hi {
        if digits_in_set(set, &q, m) || (!q.is_zero() && digits_in_set(set, &(&q - 1u32), m)) {
            return Ok(true);
        }
        q += 1u32;
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma_bruteforce;
    use crate::params::{build_digit_profile, build_param_profile};

    #[test]
    fn proof_set_examples() {
        let p = build_param_profile(6, 12).unwrap();
        let ps = proof_sets(&p, 5).unwrap();
        assert_eq!((ps.l0, ps.ntilde, ps.r, ps.m0), (1, 5, 0, 10));
        assert_eq!(ps.modulus, BigUint::from(243u32));
        let ps = proof_sets(&p, 1).unwrap();
        assert_eq!((ps.m0, ps.m1), (2, 1));
        assert_eq!(ps.modulus, BigUint::from(3u32));
        let p = build_param_profile(12, 18).unwrap();
        let ps = proof_sets(&p, 3).unwrap();
        assert_eq!((ps.l0, ps.l1, ps.ntilde, ps.r, ps.m0), (2, 1, 1, 1, 6));
        assert_eq!(ps.modulus, BigUint::from(512u32));
    }

    fn agree(digits: &[u64], n: u64) {
        let set = MissingDigitSet::new(6, digits).unwrap();
        let profile = build_param_profile(6, 12).unwrap();
        let dp = build_digit_profile(&profile, digits).unwrap();
        let psi: PsiSpec = "geom:beta=6,p=2,q=1".parse().unwrap();
        let b = Budgets::default();
        let e = gamma_endpoint(&set, 12, &psi, n, &profile, &dp, &b).unwrap();
        let g = gamma_bruteforce(&set, 12, &psi, n, &b).unwrap();
        assert_eq!(e.members, g.members, "D={digits:?} n={n}");
    }

    #[test]
    fn agrees_with_brute_force() {
        agree(&[0, 1, 4, 5], 1);
        agree(&[0, 1, 4, 5], 2);
        agree(&[0, 1, 2, 3], 1);
        agree(&[0, 5], 3);
    }

    #[test]
    fn threshold_is_required() {
        let set = MissingDigitSet::new(6, &[0, 1, 4, 5]).unwrap();
        let profile = build_param_profile(6, 12).unwrap();
        let dp = build_digit_profile(&profile, &[0, 1, 4, 5]).unwrap();
        let psi: PsiSpec = "geom:beta=6,p=2".parse().unwrap();
        let r = gamma_endpoint(&set, 12, &psi, 1, &profile, &dp, &Budgets::default());
        assert!(matches!(r, Err(Error::Hypothesis(_))));
    }
}
