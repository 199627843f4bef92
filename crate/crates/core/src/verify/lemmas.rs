use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::CheckReport;
use crate::arith::{big_pow, factorize, power_divides};
use crate::budget::Budgets;
use crate::cantor::MissingDigitSet;
use crate::error::{Error, Result};
use crate::gamma::residue_counts;
use crate::params::{build_param_profile, MultClass};

/// `tⁿ | b^{⌈α₂n⌉}` for `n ≤ n_max`, checked by valuations and by big-integer division.
pub fn check_divisibility(b: u64, t: u64, n_max: u64) -> Result<CheckReport> {
    let profile = build_param_profile(b, t)?;
    let mut report = CheckReport::new("divisibility");
    for n in 1..=n_max {
        let m = profile.ceil_alpha2(n);
        let by_valuation = power_divides(t, n, b, m);
        let by_division = (big_pow(b, m) % big_pow(t, n)).is_zero();
        report.instances_tested += 1;
        if !(by_valuation && by_division) {
            report.fail(
                json!({"b": b, "t": t, "n": n, "m": m}),
                format!("valuation test {by_valuation}, division test {by_division}"),
                "t^n divides b^ceil(alpha2 n)",
            );
        }
    }
    Ok(report)
}

/// Tuples over the allowed digits whose value (plus `shift`) is divisible by `b*ⁿ`.
fn scan_solutions(b: u64, allowed: &[u64], n: u64, modulus: u128, shift: u128) -> Vec<Vec<u64>> {
    allowed
        .par_iter()
        .flat_map_iter(|&first| {
            let mut found = Vec::new();
            let mut idx = vec![0usize; n as usize - 1];
            loop {
                let mut v = first as u128;
                for &i in &idx {
                    v = v * b as u128 + allowed[i] as u128;
                }
                if (v + shift).is_multiple_of(modulus) {
                    let mut tuple = vec![first];
                    tuple.extend(idx.iter().map(|&i| allowed[i]));
                    found.push(tuple);
                }
                let mut pos = idx.len();
                loop {
                    if pos == 0 {
                        return found;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < allowed.len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        })
        .collect()
}

/// Forced digits: over `{0..b−1} ∖ D₁`, `b*ⁿ | value` only for the all-zero tuple;
/// over `{0..b−1} ∖ D₂`, `b*ⁿ | value + 1` only for the all-`(b−1)` tuple.
///
/// The scan is exhaustive when `(b − #D₁)ⁿ` fits the enumeration budget.
/// Otherwise the solutions are counted by the residue dynamic program, where a
/// count of one together with the known solution proves uniqueness.
pub fn check_forced_digits(b: u64, t: u64, n: u64, budgets: &Budgets) -> Result<CheckReport> {
    let profile = build_param_profile(b, t)?;
    if profile.class != MultClass::IndependentSamePrimes {
        return Err(Error::hypothesis(format!(
            "forced digits need multiplicatively independent bases with equal prime support; ({b}, {t}) is {:?}",
            profile.class
        )));
    }
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let bstar = profile.bstar.expect("independent pairs have b*");
    let d1: Vec<u64> = (1..b / bstar).map(|k| k * bstar).collect();
    let d2: Vec<u64> = d1.iter().map(|d| d - 1).collect();
    let allowed1: Vec<u64> = (0..b).filter(|x| !d1.contains(x)).collect();
    let allowed2: Vec<u64> = (0..b).filter(|x| !d2.contains(x)).collect();
    let mut report = CheckReport::new("forced_digits");
    report.detail("bstar", bstar);
    report.detail("D1", &d1);
    report.detail("D2", &d2);
    let tuples = (allowed1.len() as u64).checked_pow(n as u32);
    let fits_word = (n as f64) * (b as f64).log2() < 120.0;
    let exhaustive = fits_word && tuples.is_some_and(|c| c <= budgets.enumeration);
    report.detail("method", if exhaustive { "exhaustive" } else { "residue-dp" });
    for (part, allowed, shift, forced) in [("i", &allowed1, 0u32, 0u64), ("ii", &allowed2, 1, b - 1)] {
        if exhaustive {
            let modulus = (bstar as u128).pow(n as u32);
            let sols = scan_solutions(b, allowed, n, modulus, shift as u128);
            report.instances_tested += tuples.unwrap();
            let expected = vec![vec![forced; n as usize]];
            if sols != expected {
                report.fail(
                    json!({"b": b, "t": t, "n": n, "part": part}),
                    format!("{} solutions, first {:?}", sols.len(), sols.first()),
                    format!("only {:?}", expected[0]),
                );
            }
        } else {
            let set = MissingDigitSet::new(b, allowed)?;
            let counts = residue_counts(&set, n, &BigUint::from(bstar).pow(n as u32), budgets)?;
            let count = if shift == 0 { counts.zero } else { counts.minus_one };
            report.instances_tested += 1;
            if !count.is_one() {
                report.fail(
                    json!({"b": b, "t": t, "n": n, "part": part}),
                    format!("{count} solutions"),
                    "exactly one solution",
                );
            }
        }
    }
    Ok(report)
}

/// A random pair `(b, t)` with `3 ≤ b ≤ max`, `2 ≤ t ≤ max` and equal prime support.
pub fn random_same_prime_pair(rng: &mut ChaCha8Rng, max: u64, independent: bool) -> (u64, u64) {
    loop {
        let b = rng.gen_range(3..=max);
        let primes: Vec<u64> = factorize(b as i64).expect("b >= 3").primes().collect();
        let radical: u64 = primes.iter().product();
        if radical > max {
            continue;
        }
        let mut t = radical;
        for _ in 0..rng.gen_range(0..8) {
            let q = primes[rng.gen_range(0..primes.len())];
            if t * q > max {
                break;
            }
            t *= q;
        }
        if t < 2 {
            continue;
        }
        let class = crate::params::classify(b, t).expect("valid bases");
        if !independent || class == MultClass::IndependentSamePrimes {
            return (b, t);
        }
    }
}

/// Divisibility for `n ≤ n_div` and forced digits for `n ≤ n_forced` on `pairs` random pairs.
pub fn sweep_lemmas(
    seed: u64,
    pairs: usize,
    max: u64,
    n_div: u64,
    n_forced: u64,
    budgets: &Budgets,
) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut div = CheckReport::new("sweep_divisibility");
    let mut forced = CheckReport::new("sweep_forced_digits");
    let mut div_pairs = Vec::new();
    let mut forced_pairs = Vec::new();
    for _ in 0..pairs {
        let (b, t) = random_same_prime_pair(&mut rng, max, false);
        div.absorb(check_divisibility(b, t, n_div)?);
        div_pairs.push((b, t));
        let (b, t) = random_same_prime_pair(&mut rng, max, true);
        for n in 1..=n_forced {
            forced.absorb(check_forced_digits(b, t, n, budgets)?);
        }
        forced_pairs.push((b, t));
    }
    div.detail("seed", seed);
    div.detail("pairs", &div_pairs);
    forced.detail("seed", seed);
    forced.detail("pairs", &forced_pairs);
    Ok(vec![div, forced])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisibility_examples() {
        assert!(check_divisibility(6, 12, 30).unwrap().passed());
        assert!(check_divisibility(12, 18, 30).unwrap().passed());
        assert!(matches!(check_divisibility(6, 10, 5), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn forced_digit_examples() {
        let b = Budgets::default();
        let r = check_forced_digits(6, 12, 5, &b).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.instances_tested, 2 * 3125);
        assert!(check_forced_digits(12, 18, 3, &b).unwrap().passed());
    }

    #[test]
    fn dp_fallback_agrees() {
        let tiny = Budgets { enumeration: 10, ..Budgets::default() };
        let r = check_forced_digits(6, 12, 5, &tiny).unwrap();
        assert_eq!(r.details["method"], "residue-dp");
        assert!(r.passed());
        assert!(check_forced_digits(9990, 2220, 4, &Budgets::default()).unwrap().passed());
    }

    #[test]
    fn sweep_is_deterministic() {
        let b = Budgets::default();
        let a = sweep_lemmas(7, 5, 10_000, 10, 2, &b).unwrap();
        let c = sweep_lemmas(7, 5, 10_000, 10, 2, &b).unwrap();
        assert_eq!(a, c);
        assert!(a.iter().all(|r| r.passed()));
    }
}
