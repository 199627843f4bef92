use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use super::word::Word;
use super::{unit_parts, Interval, MissingDigitSet, Openness};
use crate::arith::{big_pow, Rational};
use crate::error::Result;

/// Number of closed cells `[k/M, (k+1)/M]`, `0 ≤ k < M`, meeting `C(b, D)`.
///
/// The digit tree is descended only to the first level `L` at which every gap
/// of a level-`L` piece is at most `1/M`. From there, any closed cell meeting
/// the convex hull of a piece also meets the set, so each piece contributes a
/// whole run of cells and the runs are merged left to right.
pub fn grid_count(set: &MissingDigitSet, cells: &BigUint) -> BigUint {
    if cells.is_zero() {
        return BigUint::zero();
    }
    let b = set.b();
    let level = stop_level(set, cells);
    let den = big_pow(b, level) * (b - 1);
    let peak = (&den * b + 1u32) * cells;
    if peak.bits() < 127 {
        let small = |v: &BigUint| u128::try_from_big(v).expect("checked size");
        count_runs(set, small(cells), level, small(&den)).to_big()
    } else {
        count_runs(set, cells.clone(), level, den)
    }
}

/// `grid_count` for the grid of mesh `t^{−n}`.
pub fn grid_count_pow(set: &MissingDigitSet, t: u64, n: u64) -> BigUint {
    grid_count(set, &big_pow(t, n))
}

/// Largest gap of `C(b, D)` times `b·(b − 1)`; non-positive when pieces touch or overlap.
fn scaled_max_gap(set: &MissingDigitSet) -> i128 {
    let b = set.b() as i128;
    let spread = (set.max_digit() - set.min_digit()) as i128;
    set.digits()
        .windows(2)
        .map(|w| (w[1] - w[0]) as i128 * (b - 1) - spread)
        .max()
        .unwrap_or(0)
}

/// Least `L` with `gap·M ≤ b^{L+1}·(b − 1)`.
fn stop_level(set: &MissingDigitSet, cells: &BigUint) -> u64 {
    let gap = scaled_max_gap(set);
    if gap <= 0 {
        return 0;
    }
    let target = cells * BigUint::from(gap as u128);
    let b = set.b();
    let mut level = 0;
    let mut scale = BigUint::from(b * (b - 1));
    while scale < target {
        scale *= b;
        level += 1;
    }
    level
}

fn count_runs<W: Word>(set: &MissingDigitSet, cells: W, level: u64, den: W) -> W {
    let b = set.b();
    let one = W::from_u64(1);
    let last_cell = cells.sub(&one);
    let lo_off = W::from_u64(set.min_digit());
    let hi_off = W::from_u64(set.max_digit());
    let mut state = Runs {
        count: W::from_u64(0),
        last_hi: None,
    };
    // Odometer over D^level in increasing order; j is the piece index.
    let size = set.digits().len();
    let mut idx = vec![0usize; level as usize];
    loop {
        let mut j = W::from_u64(0);
        for &i in &idx {
            j = j.mul_u64(b).add(&W::from_u64(set.digits()[i]));
        }
        let base = j.mul_u64(b - 1);
        // a·M and c·M over the common denominator (b − 1)·b^L
        let a_num = base.add(&lo_off).mul(&cells);
        let c_num = base.add(&hi_off).mul(&cells);
        let (a_q, a_r) = a_num.div_rem(&den);
        let first = if a_r.is_nil() { a_q } else { a_q.add(&one) };
        let first = if first.is_nil() { first } else { first.sub(&one) };
        let (last, _) = c_num.div_rem(&den);
        let last = if last > last_cell { last_cell.clone() } else { last };
        state.push(first, last);
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return state.count;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < size {
                break;
            }
            idx[pos] = 0;
        }
    }
}

struct Runs<W> {
    count: W,
    last_hi: Option<W>,
}

impl<W: Word> Runs<W> {
    /// Add the cell range `[lo, hi]`; ranges arrive sorted by `lo`.
    fn push(&mut self, lo: W, hi: W) {
        if hi < lo {
            return;
        }
        let one = W::from_u64(1);
        let start = match &self.last_hi {
            Some(prev) if *prev >= lo => prev.add(&one),
            _ => lo,
        };
        if hi >= start {
            self.count = self.count.add(&hi.sub(&start).add(&one));
        }
        if self.last_hi.as_ref().is_none_or(|prev| hi > *prev) {
            self.last_hi = Some(hi);
        }
    }
}

/// Number of cells `[k/M, (k+1)/M]` meeting a finite union of intervals.
pub fn grid_count_intervals(intervals: &[Interval], cells: &BigUint) -> Result<BigUint> {
    if cells.is_zero() {
        return Ok(BigUint::zero());
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let last_cell = cells - 1u32;
    let mut ranges: Vec<(BigUint, BigUint)> = Vec::new();
    for iv in intervals {
        let lo = if iv.lo < zero { zero.clone() } else { iv.lo.clone() };
        let hi = if iv.hi > one { one.clone() } else { iv.hi.clone() };
        let empty = match iv.openness {
            Openness::Closed => lo > hi,
            Openness::Open => lo >= hi,
        };
        if empty {
            continue;
        }
        let (lo_n, lo_d) = unit_parts(&lo)?;
        let (hi_n, hi_d) = unit_parts(&hi)?;
        let lo_m = &lo_n * cells;
        let hi_m = &hi_n * cells;
        let (first, last) = match iv.openness {
            Openness::Closed => {
                let c = Integer::div_ceil(&lo_m, &lo_d);
                (if c.is_zero() { c } else { c - 1u32 }, hi_m.div_floor(&hi_d))
            }
            Openness::Open => {
                let c = Integer::div_ceil(&hi_m, &hi_d);
                (lo_m.div_floor(&lo_d), if c.is_zero() { c } else { c - 1u32 })
            }
        };
        let last = last.min(last_cell.clone());
        if first <= last {
            ranges.push((first, last));
        }
    }
    ranges.sort();
    let mut runs = Runs {
        count: BigUint::zero(),
        last_hi: None,
    };
    for (lo, hi) in ranges {
        runs.push(lo, hi);
    }
    Ok(runs.count)
}
