//! Library results against small, independent reference implementations
//! written directly on `BigRational`.

use std::collections::BTreeSet;

use digitdioph::arith::{power_divides, Rational};
use digitdioph::cantor::{endpoint_member, endpoints_count, grid_count, MissingDigitSet};
use digitdioph::dimension::dim_report;
use digitdioph::gamma::{gamma_bruteforce, residue_counts};
use digitdioph::params::{build_digit_profile, build_param_profile};
use digitdioph::psi::PsiSpec;
use digitdioph::verify::check_forced_digits;
use digitdioph::Budgets;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Hull `[min D/(b−1), max D/(b−1)]` of `C(b, D)`.
fn hull(b: u64, d: &[u64]) -> (BigRational, BigRational) {
    let lo = *d.iter().min().unwrap() as i64;
    let hi = *d.iter().max().unwrap() as i64;
    (q(lo, b as i64 - 1), q(hi, b as i64 - 1))
}

/// Whether the open ball `(x − r, x + r)` meets `C(b, D)`.
///
/// The hull endpoints belong to the set, so the ball hits as soon as it covers
/// one of them; otherwise it sits inside the hull and the self-similarity
/// `C = ⋃ (d + C)/b` reduces it to a ball `b` times larger.
fn open_ball_meets(b: u64, d: &[u64], x: &BigRational, r: &BigRational) -> bool {
    let (lo, hi) = hull(b, d);
    let (a, c) = (x - r, x + r);
    if c <= lo || a >= hi {
        return false;
    }
    if a < lo || c > hi {
        return true;
    }
    let bb = int(b);
    d.iter()
        .any(|&digit| open_ball_meets(b, d, &(&bb * x - int(digit)), &(&bb * r)))
}

/// Whether the closed interval `[a, c]` meets `C(b, D)`.
fn closed_meets(b: u64, d: &[u64], a: &BigRational, c: &BigRational) -> bool {
    let (lo, hi) = hull(b, d);
    if c < &lo || a > &hi {
        return false;
    }
    if a <= &lo || c >= &hi {
        return true;
    }
    let bb = int(b);
    d.iter().any(|&digit| {
        let shift = int(digit);
        closed_meets(b, d, &(&bb * a - &shift), &(&bb * c - &shift))
    })
}

fn gamma_oracle(b: u64, d: &[u64], t: u64, radius: &BigRational, n: u32) -> Vec<u64> {
    let tn = t.pow(n);
    (0..=tn)
        .filter(|&p| open_ball_meets(b, d, &q(p as i64, tn as i64), radius))
        .collect()
}

fn psi_at(psi: &str, n: u64) -> BigRational {
    let spec: PsiSpec = psi.parse().unwrap();
    spec.eval_exact(n).unwrap().inner().clone()
}

fn members(b: u64, d: &[u64], t: u64, psi: &str, n: u64) -> Vec<u64> {
    let set = MissingDigitSet::new(b, d).unwrap();
    let g = gamma_bruteforce(&set, t, &psi.parse().unwrap(), n, &Budgets::default()).unwrap();
    g.members
        .unwrap()
        .iter()
        .map(|m| u64::try_from(m.clone()).unwrap())
        .collect()
}

#[test]
fn brute_force_matches_oracle() {
    let configs: &[(u64, &[u64], u64, &str, u64)] = &[
        (6, &[0, 1, 4, 5], 12, "geom:beta=6,p=2,q=1", 3),
        (6, &[0, 5], 12, "geom:beta=6,p=2,q=1", 3),
        (6, &[1, 4], 12, "geom:beta=6,p=2,q=1", 3),
        (3, &[0, 2], 3, "geom:beta=3,p=2", 5),
        (3, &[0, 2], 2, "geom:c=1/2,beta=2,p=1", 8),
        (5, &[1, 2], 5, "geom:c=1/4,beta=5,p=1", 5),
        (4, &[0, 3], 2, "geom:beta=2,p=1,q=1", 8),
        (10, &[0, 3, 9], 6, "geom:beta=10,p=1,q=1", 3),
    ];
    for &(b, d, t, psi, n_max) in configs {
        for n in 1..=n_max {
            let oracle = gamma_oracle(b, d, t, &psi_at(psi, n), n as u32);
            assert_eq!(members(b, d, t, psi, n), oracle, "b={b} D={d:?} t={t} psi={psi} n={n}");
        }
    }
}

#[test]
fn six_twelve_exact_counts() {
    // The open-ball hit sets are smaller than the 2·4ⁿ candidate pairs, because
    // a right endpoint of one basic interval is the left endpoint of the next.
    let psi = "geom:beta=6,p=2,q=1";
    let counts: Vec<usize> = (1..=3)
        .map(|n| gamma_oracle(6, &[0, 1, 4, 5], 12, &psi_at(psi, n), n as u32).len())
        .collect();
    assert_eq!(counts, vec![6, 22, 86]);
}

#[test]
fn emptiness_boundary_is_sharp() {
    let below = "geom:c=1/4,beta=5,p=1";
    for n in 1..=5u32 {
        assert!(gamma_oracle(5, &[1, 2], 5, &psi_at(below, n as u64), n).is_empty());
    }
    for n in 1..=4u32 {
        let r = psi_at(below, n as u64) + q(1, 5i64.pow(2 * n));
        let hit = gamma_oracle(5, &[1, 2], 5, &r, n);
        assert!(!hit.is_empty(), "n={n}");
        let set = MissingDigitSet::new(5, &[1, 2]).unwrap();
        let g = digitdioph::gamma::ball_hits(
            &set,
            &BigUint::from(hit[0]),
            &BigUint::from(5u32).pow(n),
            &Rational::new(r.numer().clone(), r.denom().clone()).unwrap(),
        )
        .unwrap();
        assert!(g);
    }
}

#[test]
fn residue_counts_match_enumeration() {
    let configs: &[(u64, &[u64], u64, u64)] = &[
        (6, &[0, 1, 4, 5], 4, 9),
        (6, &[0, 5], 6, 27),
        (12, &[0, 1, 5, 11], 3, 64),
        (10, &[0, 3, 7, 9], 4, 25),
        (6, &[0, 1, 4, 5], 5, 1),
    ];
    for &(b, d, len, m) in configs {
        let mut zero = 0u64;
        let mut minus_one = 0u64;
        let total = (d.len() as u64).pow(len as u32);
        for mut code in 0..total {
            let mut v = 0u64;
            for _ in 0..len {
                v = v * b + d[(code % d.len() as u64) as usize];
                code /= d.len() as u64;
            }
            zero += v.is_multiple_of(m) as u64;
            minus_one += (v + 1).is_multiple_of(m) as u64;
        }
        let set = MissingDigitSet::new(b, d).unwrap();
        let r = residue_counts(&set, len, &BigUint::from(m), &Budgets::default()).unwrap();
        assert_eq!(r.zero, BigUint::from(zero), "b={b} D={d:?} len={len} M={m}");
        assert_eq!(r.minus_one, BigUint::from(minus_one), "b={b} D={d:?} len={len} M={m}");
    }
}

#[test]
fn divisibility_by_big_integers() {
    for (b, t) in [(6u64, 12u64), (12, 18), (10, 20), (24, 54), (6, 6)] {
        let p = build_param_profile(b, t).unwrap();
        for n in 1..=30u64 {
            let m = p.ceil_alpha2(n);
            let tn = BigUint::from(t).pow(n as u32);
            let bm = BigUint::from(b).pow(m as u32);
            assert!((&bm % &tn).is_zero(), "({b},{t}) n={n}");
            assert!(power_divides(t, n, b, m));
            if m > 0 {
                assert!(!power_divides(t, n, b, m - 1) || (BigUint::from(b).pow(m as u32 - 1) % &tn).is_zero());
            }
        }
    }
}

#[test]
fn forced_digits_by_enumeration() {
    // Strings over {0..5} \ {3} whose value is divisible by 3ⁿ: only the zero string.
    for n in 1..=4u32 {
        let allowed = [0u64, 1, 2, 4, 5];
        let modulus = 3u64.pow(n);
        let mut hits = 0;
        let mut hits_high = 0;
        let high = [0u64, 1, 3, 4, 5];
        for code in 0..5u64.pow(n) {
            let (mut v, mut w, mut c) = (0u64, 0u64, code);
            for _ in 0..n {
                v = v * 6 + allowed[(c % 5) as usize];
                w = w * 6 + high[(c % 5) as usize];
                c /= 5;
            }
            hits += (v % modulus == 0) as u32;
            hits_high += ((w + 1) % modulus == 0) as u32;
        }
        assert_eq!((hits, hits_high), (1, 1), "n={n}");
        assert!(check_forced_digits(6, 12, n as u64, &Budgets::default()).unwrap().passed());
    }
}

#[test]
fn grid_count_matches_cell_scan() {
    let sets: &[(u64, &[u64])] = &[(3, &[0, 2]), (5, &[1, 2]), (4, &[0, 3]), (6, &[0, 1, 4, 5]), (7, &[2, 3, 6])];
    for &(b, d) in sets {
        let set = MissingDigitSet::new(b, d).unwrap();
        for cells in [1u64, 2, 3, 8, 9, 10, 27, 64, 100] {
            let expected = (0..cells)
                .filter(|&k| closed_meets(b, d, &q(k as i64, cells as i64), &q(k as i64 + 1, cells as i64)))
                .count();
            assert_eq!(grid_count(&set, &BigUint::from(cells)), BigUint::from(expected), "b={b} D={d:?} cells={cells}");
        }
    }
}

#[test]
fn endpoints_match_materialized_set() {
    for (b, d) in [(3u64, vec![0u64, 2]), (6, vec![0, 1, 4, 5]), (5, vec![1, 3]), (4, vec![0, 1, 3])] {
        let set = MissingDigitSet::new(b, &d).unwrap();
        for m in 1..=4u32 {
            let scale = b.pow(m);
            let mut e = BTreeSet::new();
            for code in 0..(d.len() as u64).pow(m) {
                let (mut v, mut c) = (0u64, code);
                for _ in 0..m {
                    v = v * b + d[(c % d.len() as u64) as usize];
                    c /= d.len() as u64;
                }
                e.insert(q(v as i64, scale as i64));
                e.insert(q(v as i64 + 1, scale as i64));
            }
            assert_eq!(endpoints_count(&set, m as u64), BigUint::from(e.len()), "b={b} D={d:?} m={m}");
            for k in 0..=scale {
                let x = q(k as i64, scale as i64);
                let r = Rational::new(x.numer().clone(), x.denom().clone()).unwrap();
                assert_eq!(endpoint_member(&set, &r, m as u64).unwrap(), e.contains(&x));
            }
        }
    }
}

#[test]
fn ball_boundary_is_excluded() {
    // 1/3 ∈ C(3, {0, 2}); a ball centered at 1/2 with radius exactly 1/6 stops short of it.
    let set = MissingDigitSet::new(3, &[0, 2]).unwrap();
    let center = BigUint::from(1u32);
    let t_pow = BigUint::from(2u32);
    assert!(!digitdioph::gamma::ball_hits(&set, &center, &t_pow, &Rational::frac(1, 6)).unwrap());
    assert!(!open_ball_meets(3, &[0, 2], &q(1, 2), &q(1, 6)));
    let wider = Rational::frac(1, 6) + Rational::frac(1, 1000);
    assert!(digitdioph::gamma::ball_hits(&set, &center, &t_pow, &wider).unwrap());
}

#[test]
fn dimension_values() {
    let p = build_param_profile(3, 3).unwrap();
    let dp = build_digit_profile(&p, &[0, 2]).unwrap();
    let r = dim_report(&p, &dp, &"geom:beta=3,p=2".parse().unwrap()).unwrap();
    let expected = 0.5 * 2f64.ln() / 3f64.ln();
    assert!((r.dim_intersection.value - expected).abs() < 1e-9);
    assert!((expected - 0.315464876785).abs() < 1e-9);

    let p = build_param_profile(6, 12).unwrap();
    let dp = build_digit_profile(&p, &[0, 1, 4, 5]).unwrap();
    let r = dim_report(&p, &dp, &"float:t=6,rate=log(3)/log(1.5)".parse().unwrap()).unwrap();
    let alpha = 3f64.ln() / 1.5f64.ln();
    let dim_w = 12f64.ln() / (alpha * 6f64.ln());
    let dim_c = 4f64.ln() / 6f64.ln();
    let corrected = 6f64.ln() / 12f64.ln() * dim_w * dim_c;
    assert!((r.dim_w - dim_w).abs() < 1e-9);
    assert!((r.dim_intersection.value - corrected).abs() < 1e-9);
    assert!((corrected - (dim_w + dim_c - 1.0)).abs() < 1e-9);
    assert!((dim_w * dim_c - corrected).abs() > 0.1 * dim_w * dim_c);
}

#[test]
fn empty_verdicts_have_empty_hit_sets() {
    use digitdioph::arith::SExponent;
    use digitdioph::dimension::{verdict_for, MeasureClass};
    let configs: &[(u64, &[u64], u64, &str, u64)] = &[
        (5, &[1, 2], 5, "geom:c=1/4,beta=5,p=1", 6),
        (6, &[1, 4], 12, "geom:beta=6,p=2,q=1", 3),
        (12, &[1, 5, 6], 18, "geom:beta=12,p=2,q=1", 2),
    ];
    for &(b, d, t, psi, n_max) in configs {
        let spec: PsiSpec = psi.parse().unwrap();
        let v = verdict_for(b, t, d, &spec, &SExponent::Rational(Rational::frac(1, 2))).unwrap();
        assert_eq!(v.measure_class, MeasureClass::EmptySet, "b={b} D={d:?} t={t}");
        for n in 1..=n_max {
            assert!(members(b, d, t, psi, n).is_empty(), "b={b} D={d:?} t={t} n={n}");
            assert!(gamma_oracle(b, d, t, &psi_at(psi, n), n as u32).is_empty());
        }
    }
}
