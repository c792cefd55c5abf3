//! Three independent routes to `d_n`.
//!
//! * `direct`: the size of the generated `D_n` (n <= 6).
//! * `sumsq`: the sum of squared entries of the interval table of `D_{n-2}`;
//!   an element of `D_n` is a square of `D_{n-2}` elements, and once its
//!   bottom corner `x` and top corner `y` are fixed the other two corners
//!   range independently over `[x, y]`.
//! * `classes`: `d_n = #[bottom, top]` in `D_n` split over the first variable:
//!   `Σ_{x ∈ D_{n-1}} #[x, top]`, grouped by permutation class.

use std::path::PathBuf;
use std::str::FromStr;

use crate::matrix::{load_matrix, IntervalMatrix, MAX_MATRIX_ARITY};
use crate::poset::{PosetLevel, MAX_LEVEL_ARITY};
use crate::symmetry::{enumerate_classes, load_classes, validate_classes, OrbitRecord};
use crate::sweep::{sweep_total, SweepOptions};
use crate::wide::WideAccumulator;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Direct,
    SumSq,
    Classes,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "sumsq" => Ok(Method::SumSq),
            "classes" => Ok(Method::Classes),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Optional precomputed inputs; anything missing is built in memory.
#[derive(Clone, Debug, Default)]
pub struct Inputs {
    pub matrix: Option<PathBuf>,
    pub classes: Option<PathBuf>,
    pub workers: Option<usize>,
}

pub fn direct(n: usize) -> Result<WideAccumulator> {
    if n > MAX_LEVEL_ARITY {
        return Err(Error::arity("direct method", n, 0, MAX_LEVEL_ARITY));
    }
    Ok(WideAccumulator::new(PosetLevel::generate(n)?.len() as u128))
}

/// `d_{k+2}` from the interval table of `D_k`.
pub fn from_sumsq(sq: &IntervalMatrix) -> WideAccumulator {
    sq.sumsq()
}

/// `d_{k+1}` from the classes of `D_k` and the table of `D_{k-2}`.
pub fn from_classes(
    classes: &[OrbitRecord],
    sq: &IntervalMatrix,
    level: &PosetLevel,
    opts: &SweepOptions,
) -> Result<WideAccumulator> {
    sweep_total(classes, sq, level, opts)
}

fn matrix_for(base: usize, path: Option<&PathBuf>) -> Result<IntervalMatrix> {
    match path {
        Some(p) => {
            let m = load_matrix(p)?;
            if m.n() != base {
                return Err(Error::ArityMismatch {
                    left: m.n(),
                    right: base,
                });
            }
            Ok(m)
        }
        None => IntervalMatrix::for_arity(base),
    }
}

pub fn compute(method: Method, n: usize, inputs: &Inputs) -> Result<WideAccumulator> {
    match method {
        Method::Direct => direct(n),
        Method::SumSq => {
            if !(2..=MAX_MATRIX_ARITY + 2).contains(&n) {
                return Err(Error::arity("sumsq method", n, 2, MAX_MATRIX_ARITY + 2));
            }
            Ok(from_sumsq(&matrix_for(n - 2, inputs.matrix.as_ref())?))
        }
        Method::Classes => {
            if !(3..=MAX_MATRIX_ARITY + 3).contains(&n) {
                return Err(Error::arity("classes method", n, 3, MAX_MATRIX_ARITY + 3));
            }
            let k = n - 1;
            let classes = match &inputs.classes {
                Some(p) => {
                    let (m, recs) = load_classes(p)?;
                    if m != k {
                        return Err(Error::ArityMismatch { left: m, right: k });
                    }
                    recs
                }
                None if k <= MAX_LEVEL_ARITY => enumerate_classes(k)?,
                None => {
                    return Err(Error::Unsupported(format!(
                        "d_{n} by classes needs a class file for D_{k}"
                    )))
                }
            };
            let gamma_total = validate_classes(k, &classes)?;
            let expected = crate::known::dedekind(k).unwrap();
            if gamma_total.value() != expected {
                return Err(Error::Format(format!(
                    "orbit sizes sum to {gamma_total}, expected d_{k} = {expected}"
                )));
            }
            let sq = matrix_for(k - 2, inputs.matrix.as_ref())?;
            let level = PosetLevel::generate(k - 2)?;
            let opts = inputs
                .workers
                .map_or_else(SweepOptions::default, SweepOptions::with_workers);
            from_classes(&classes, &sq, &level, &opts)
        }
    }
}
