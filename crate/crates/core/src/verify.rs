//! Self-checks against published values and brute-force oracles.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use crate::dedekind::{self, Inputs, Method};
use crate::intervals::{interval_size_alg2, upset_size_alg1};
use crate::known::{CLASSES, DEDEKIND};
use crate::matrix::IntervalMatrix;
use crate::poset::PosetLevel;
use crate::symmetry::enumerate_classes;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Quick,
    Standard,
    Full,
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "standard" => Ok(Level::Standard),
            "full" => Ok(Level::Full),
            other => Err(Error::Parse(format!("unknown verify level {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

/// Optional inputs for the heavier checks.
#[derive(Clone, Debug, Default)]
pub struct VerifyInputs {
    /// Interval table of `D_5` (`.mxm`); built in memory when absent.
    pub matrix5: Option<PathBuf>,
    /// Class list of `D_7` (`.rn`); the `d_8` check is skipped without it.
    pub classes7: Option<PathBuf>,
    pub workers: Option<usize>,
}

struct Runner<'a> {
    checks: Vec<Check>,
    report: &'a mut dyn FnMut(&Check),
}

impl Runner<'_> {
    fn run(&mut self, name: impl Into<String>, f: impl FnOnce() -> Result<(bool, String)>) {
        let start = Instant::now();
        let (status, detail) = match f() {
            Ok((true, d)) => (Status::Pass, d),
            Ok((false, d)) => (Status::Fail, d),
            Err(e) => (Status::Fail, format!("error: {e}")),
        };
        let check = Check {
            name: name.into(),
            status,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        };
        (self.report)(&check);
        self.checks.push(check);
    }

    fn skip(&mut self, name: &str, why: &str) {
        let check = Check {
            name: name.into(),
            status: Status::Skip,
            detail: why.into(),
            seconds: 0.0,
        };
        (self.report)(&check);
        self.checks.push(check);
    }
}

fn expect_eq(got: u128, want: u128) -> (bool, String) {
    (got == want, format!("got {got}, expected {want}"))
}

/// Runs every check of `level`, calling `report` as each finishes.
pub fn verify(level: Level, inputs: &VerifyInputs, report: &mut dyn FnMut(&Check)) -> Vec<Check> {
    let mut r = Runner {
        checks: Vec::new(),
        report,
    };
    let base_inputs = Inputs {
        workers: inputs.workers,
        ..Default::default()
    };

    r.run("square(M_D3) equals interval scans", || {
        let level = PosetLevel::generate(3)?;
        let sq = IntervalMatrix::for_arity(3)?;
        let mut bad = 0;
        for (i, x) in level.iter().enumerate() {
            for (j, y) in level.iter().enumerate() {
                if sq.get(i, j) as usize != level.interval_indices(&x, &y)?.len() {
                    bad += 1;
                }
            }
        }
        Ok((bad == 0, format!("{bad} mismatching entries")))
    });
    r.run("Alg1 equals upset scan on all of D_4 (base 2)", || {
        let level = PosetLevel::generate(2)?;
        let sq = IntervalMatrix::for_arity(2)?;
        let d4 = PosetLevel::generate(4)?;
        let mut bad = 0;
        for x in d4.iter() {
            if upset_size_alg1(&x, &sq, &level)? as usize != d4.upset_indices(&x)?.len() {
                bad += 1;
            }
        }
        Ok((bad == 0, format!("{bad} of {} differ", d4.len())))
    });
    r.run("Alg2 equals square(M_D4) on all pairs (base 2)", || {
        let level = PosetLevel::generate(2)?;
        let sq = IntervalMatrix::for_arity(2)?;
        let d4 = PosetLevel::generate(4)?;
        let sq4 = IntervalMatrix::for_arity(4)?;
        let mut bad = 0;
        for (i, x) in d4.iter().enumerate() {
            for (j, y) in d4.iter().enumerate() {
                if interval_size_alg2(&x, &y, &sq, &level)? != sq4.get(i, j) as u64 {
                    bad += 1;
                }
            }
        }
        Ok((bad == 0, format!("{bad} mismatching pairs")))
    });
    let top_direct = if level >= Level::Standard { 6 } else { 5 };
    for n in 0..=top_direct {
        r.run(format!("d_{n} direct"), || {
            Ok(expect_eq(dedekind::direct(n)?.value(), DEDEKIND[n]))
        });
    }
    for n in 0..=top_direct {
        r.run(format!("r_{n} and sum of orbit sizes"), || {
            let classes = enumerate_classes(n)?;
            let total: u128 = classes.iter().map(|c| c.gamma as u128).sum();
            let ok = classes.len() as u64 == CLASSES[n] && total == DEDEKIND[n];
            Ok((
                ok,
                format!("r_{n} = {}, sum gamma = {total}", classes.len()),
            ))
        });
    }
    for n in 2..=5 {
        r.run(format!("d_{n} by sumsq"), || {
            Ok(expect_eq(
                dedekind::compute(Method::SumSq, n, &base_inputs)?.value(),
                DEDEKIND[n],
            ))
        });
    }
    if level == Level::Quick {
        return r.checks;
    }

    r.run("d_6 by sumsq", || {
        Ok(expect_eq(
            dedekind::compute(Method::SumSq, 6, &base_inputs)?.value(),
            DEDEKIND[6],
        ))
    });
    r.run("d_7 by sumsq", || {
        let inputs = Inputs {
            matrix: inputs.matrix5.clone(),
            ..base_inputs.clone()
        };
        Ok(expect_eq(
            dedekind::compute(Method::SumSq, 7, &inputs)?.value(),
            DEDEKIND[7],
        ))
    });
    r.run("d_7 by classes of D_6", || {
        Ok(expect_eq(
            dedekind::compute(Method::Classes, 7, &base_inputs)?.value(),
            DEDEKIND[7],
        ))
    });
    if level == Level::Standard {
        return r.checks;
    }

    match &inputs.classes7 {
        Some(path) => r.run("d_8 by classes of D_7", || {
            let inputs = Inputs {
                matrix: inputs.matrix5.clone(),
                classes: Some(path.clone()),
                workers: inputs.workers,
            };
            Ok(expect_eq(
                dedekind::compute(Method::Classes, 8, &inputs)?.value(),
                DEDEKIND[8],
            ))
        }),
        None => r.skip("d_8 by classes of D_7", "no D_7 class file given"),
    }
    r.checks
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.status != Status::Fail)
}
