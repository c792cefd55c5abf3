//! Interval sizes in `D_{n+2}` from the interval table of `D_n`.
//!
//! An element of `D_{n+2}` is a square `(x0, x1, x2, x3)` of `D_n` elements
//! with `x0 <= x1 <= x3` and `x0 <= x2 <= x3`. Fixing the two corners
//! `y0` and `y3` of an element above `x`, the remaining corners range over
//! independent intervals of `D_n`, whose sizes are read from the table:
//!
//! ```text
//! #[x, top] = sum_{y0 >= x0} sum_{y3 >= x3} T(y0|x1, y3) * T(y0|x2, y3)
//! ```
//!
//! Products are at most `d_5^2 < 2^26` and totals at most `d_7 < 2^42` for
//! tables up to `D_5`, so `u64` arithmetic is exact.

use crate::matrix::IntervalMatrix;
use crate::poset::PosetLevel;
use crate::truth_table::TruthTable;
use crate::{Error, Result};

fn check_query(x: &TruthTable, sq: &IntervalMatrix, level: &PosetLevel) -> Result<()> {
    sq.check_level(level)?;
    if x.n() != level.n() + 2 {
        return Err(Error::ArityMismatch {
            left: x.n(),
            right: level.n() + 2,
        });
    }
    x.require_monotone()
}

#[inline]
fn lookup(level: &PosetLevel, w: u64) -> usize {
    level
        .index_of_word(w)
        .expect("join/meet of monotone functions must be monotone")
}

/// `#[x, top]` for `x` in `D_{n+2}` given the table of `D_n`.
pub fn upset_size_alg1(x: &TruthTable, sq: &IntervalMatrix, level: &PosetLevel) -> Result<u64> {
    check_query(x, sq, level)?;
    Ok(upset_size_unchecked(x, sq, level))
}

/// As [`upset_size_alg1`] without validating arities or monotonicity.
pub fn upset_size_unchecked(x: &TruthTable, sq: &IntervalMatrix, level: &PosetLevel) -> u64 {
    let [x0, x1, x2, x3] = x.split4().map(|q| q.word());
    let words = level.words();
    let corner0 = level.scan_interval(x0, u64::MAX);
    let corner3 = level.scan_interval(x3, u64::MAX);
    let mut total = 0u64;
    for &y0 in &corner0 {
        let y0 = words[y0 as usize];
        let left = sq.row(lookup(level, y0 | x1));
        let right = sq.row(lookup(level, y0 | x2));
        let inner: u64 = corner3
            .iter()
            .map(|&y3| left[y3 as usize] as u64 * right[y3 as usize] as u64)
            .sum();
        total += inner;
    }
    total
}

/// `#[x, y]` for `x, y` in `D_{n+2}`; zero when `x` is not below `y`.
pub fn interval_size_alg2(
    x: &TruthTable,
    y: &TruthTable,
    sq: &IntervalMatrix,
    level: &PosetLevel,
) -> Result<u64> {
    check_query(x, sq, level)?;
    check_query(y, sq, level)?;
    if !x.leq_unchecked(y) {
        return Ok(0);
    }
    let [x0, x1, x2, x3] = x.split4().map(|q| q.word());
    let [y0, y1, y2, y3] = y.split4().map(|q| q.word());
    let words = level.words();
    let upper: Vec<(usize, usize)> = level
        .scan_interval(x3, y3)
        .into_iter()
        .map(|f3| {
            let f3 = words[f3 as usize];
            (lookup(level, f3 & y1), lookup(level, f3 & y2))
        })
        .collect();
    let mut total = 0u64;
    for f0 in level.scan_interval(x0, y0) {
        let f0 = words[f0 as usize];
        let left = sq.row(lookup(level, f0 | x1));
        let right = sq.row(lookup(level, f0 | x2));
        let inner: u64 = upper
            .iter()
            .map(|&(a, b)| left[a] as u64 * right[b] as u64)
            .sum();
        total += inner;
    }
    Ok(total)
}

/// Counts `h` in `level` with `x <= h <= y` by scanning every element.
pub fn oracle_interval_size(x: &TruthTable, y: &TruthTable, level: &PosetLevel) -> Result<u64> {
    for f in [x, y] {
        if f.n() != level.n() {
            return Err(Error::ArityMismatch {
                left: f.n(),
                right: level.n(),
            });
        }
    }
    let (lo, hi) = (x.word(), y.word());
    Ok(level
        .words()
        .iter()
        .filter(|&&h| lo & !h == 0 && h & !hi == 0)
        .count() as u64)
}

/// `#[x, top]` for many `x` at once by scanning. Walks `level` in
/// cache-sized blocks so each block is tested against the whole batch.
pub fn oracle_upset_sizes(xs: &[TruthTable], level: &PosetLevel) -> Result<Vec<u64>> {
    if let Some(x) = xs.iter().find(|x| x.n() != level.n()) {
        return Err(Error::ArityMismatch {
            left: x.n(),
            right: level.n(),
        });
    }
    const BLOCK: usize = 2048;
    let probes: Vec<u64> = xs.iter().map(|x| x.word()).collect();
    let mut counts = vec![0u64; xs.len()];
    for block in level.words().chunks(BLOCK) {
        for (c, &x) in counts.iter_mut().zip(&probes) {
            *c += block.iter().filter(|&&h| x & !h == 0).count() as u64;
        }
    }
    Ok(counts)
}
