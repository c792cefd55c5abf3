//! Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//!
//! Criterion 11 needs an external class file of D_7. Point `MBF_R7_CLASSES`
//! at a `.rn` file (and optionally `MBF_D5_MATRIX` at a saved D_5 table) to
//! run it; otherwise it is reported as skipped.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use mbf::intervals::{oracle_upset_sizes, upset_size_alg1, interval_size_alg2};
use mbf::known::{CLASSES, DEDEKIND};
use mbf::matrix::{load_matrix, save_matrix, IncidenceMatrix, IntervalMatrix};
use mbf::sweep::{max_workers, run_sweep, sweep_total, SweepConfig, SweepOptions, SweepOutcome};
use mbf::symmetry::{enumerate_classes, save_classes, OrbitRecord, PermTable};
use mbf::truth_table::parse_tt;
use mbf::{PosetLevel, TruthTable};
use rand::{Rng, SeedableRng};

const D7: u128 = 2414682040998;
const D8: u128 = 56130437228687557907788;

struct Shared {
    levels: Vec<PosetLevel>,
    squares: Vec<IntervalMatrix>,
    square5_time: Duration,
    r5: Vec<OrbitRecord>,
    r6: Vec<OrbitRecord>,
}

fn shared() -> &'static Shared {
    static S: OnceLock<Shared> = OnceLock::new();
    S.get_or_init(|| {
        let levels: Vec<_> = (0..=6).map(|n| PosetLevel::generate(n).unwrap()).collect();
        let mut squares = Vec::new();
        let mut square5_time = Duration::ZERO;
        for level in &levels[..=5] {
            let start = Instant::now();
            squares.push(IncidenceMatrix::build(level).unwrap().square());
            if level.n() == 5 {
                square5_time = start.elapsed();
            }
        }
        Shared {
            levels,
            squares,
            square5_time,
            r5: enumerate_classes(5).unwrap(),
            r6: enumerate_classes(6).unwrap(),
        }
    })
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(
        elapsed <= limit,
        format!("{what} took {:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn c1_generation() -> Outcome {
    let start = Instant::now();
    let mut sizes = Vec::new();
    for n in 0..=6 {
        let len = PosetLevel::generate(n).map_err(|e| e.to_string())?.len();
        ensure(len as u128 == DEDEKIND[n], format!("|D_{n}| = {len}, expected {}", DEDEKIND[n]))?;
        sizes.push(len.to_string());
    }
    within(start.elapsed(), Duration::from_secs(60), "generation")?;
    Ok(sizes.join(", "))
}

fn c2_classes() -> Outcome {
    let start = Instant::now();
    for n in 0..=6 {
        let classes = enumerate_classes(n).map_err(|e| e.to_string())?;
        let total: u128 = classes.iter().map(|c| c.gamma as u128).sum();
        ensure(classes.len() as u64 == CLASSES[n], format!("r_{n} = {}", classes.len()))?;
        ensure(total == DEDEKIND[n], format!("sum gamma at n={n} is {total}"))?;
    }
    within(start.elapsed(), Duration::from_secs(600), "class enumeration")?;
    Ok("r_0..r_6 = 2, 3, 5, 10, 30, 210, 16353 with sum gamma = d_n".into())
}

fn c3_printed_matrices() -> Outcome {
    // Rows and columns in the printed order 0000, 0001, 0011, 0101, 0111, 1111.
    let labels = ["0000", "0001", "0011", "0101", "0111", "1111"];
    let incidence = [
        [1, 1, 1, 1, 1, 1],
        [0, 1, 1, 1, 1, 1],
        [0, 0, 1, 0, 1, 1],
        [0, 0, 0, 1, 1, 1],
        [0, 0, 0, 0, 1, 1],
        [0, 0, 0, 0, 0, 1],
    ];
    let squared = [
        [1, 2, 3, 3, 5, 6],
        [0, 1, 2, 2, 4, 5],
        [0, 0, 1, 0, 2, 3],
        [0, 0, 0, 1, 2, 3],
        [0, 0, 0, 0, 1, 2],
        [0, 0, 0, 0, 0, 1],
    ];
    let s = shared();
    let d2 = &s.levels[2];
    let m = IncidenceMatrix::build(d2).unwrap();
    let sq = &s.squares[2];
    let idx: Vec<usize> = labels
        .iter()
        .map(|l| d2.index_of(&parse_tt(l).unwrap()).unwrap())
        .collect();
    for r in 0..6 {
        for c in 0..6 {
            let (i, j) = (idx[r], idx[c]);
            ensure(
                m.get(i, j) as u32 == incidence[r][c],
                format!("M({},{}) differs", labels[r], labels[c]),
            )?;
            ensure(
                sq.get(i, j) == squared[r][c],
                format!("M^2({},{}) = {}, printed {}", labels[r], labels[c], sq.get(i, j), squared[r][c]),
            )?;
        }
    }
    Ok("36 + 36 entries match".into())
}

fn c4_sumsq() -> Outcome {
    let s = shared();
    for n in 0..=5 {
        let got = s.squares[n].sumsq().value();
        ensure(got == DEDEKIND[n + 2], format!("SumSq at n={n} is {got}"))?;
    }
    within(s.square5_time, Duration::from_secs(600), "squaring M_D5")?;
    Ok(format!(
        "n=5 gives {}; D_5 build+square {:.2}s",
        s.squares[5].sumsq(),
        s.square5_time.as_secs_f64()
    ))
}

fn c5_alg1_oracle() -> Outcome {
    let s = shared();
    let d4 = &s.levels[4];
    let all_d4: Vec<TruthTable> = d4.iter().collect();
    let oracle = oracle_upset_sizes(&all_d4, d4).unwrap();
    for (x, want) in all_d4.iter().zip(oracle) {
        let got = upset_size_alg1(x, &s.squares[2], &s.levels[2]).unwrap();
        ensure(got == want, format!("D_4 {x}: alg1 {got}, scan {want}"))?;
    }
    let reps: Vec<TruthTable> = s.r6.iter().map(|r| r.rep).collect();
    let oracle = oracle_upset_sizes(&reps, &s.levels[6]).unwrap();
    for (x, want) in reps.iter().zip(oracle) {
        let got = upset_size_alg1(x, &s.squares[4], &s.levels[4]).unwrap();
        ensure(got == want, format!("R_6 {x}: alg1 {got}, scan {want}"))?;
    }
    Ok(format!("168 + {} representatives agree", reps.len()))
}

fn c6_alg2_oracle() -> Outcome {
    let s = shared();
    let d4 = &s.levels[4];
    let mut pairs = 0;
    for (i, x) in d4.iter().enumerate() {
        for (j, y) in d4.iter().enumerate() {
            if !x.leq_unchecked(&y) {
                continue;
            }
            let got = interval_size_alg2(&x, &y, &s.squares[2], &s.levels[2]).unwrap();
            let want = s.squares[4].get(i, j) as u64;
            ensure(got == want, format!("[{x}, {y}]: alg2 {got}, table {want}"))?;
            pairs += 1;
        }
    }
    ensure(pairs as u128 == DEDEKIND[5], format!("{pairs} comparable pairs"))?;
    Ok(format!("{pairs} comparable pairs agree"))
}

fn c7_d7_from_r6() -> Outcome {
    let s = shared();
    let total = sweep_total(&s.r6, &s.squares[4], &s.levels[4], &SweepOptions::with_workers(max_workers()))
        .map_err(|e| e.to_string())?;
    ensure(total.value() == D7, format!("sum = {total}"))?;
    Ok(format!("sum over R_6 = {total}"))
}

fn c8_d7_single_call() -> Outcome {
    let s = shared();
    let start = Instant::now();
    let got = upset_size_alg1(&TruthTable::bottom(7), &s.squares[5], &s.levels[5]).unwrap();
    let elapsed = start.elapsed();
    ensure(got as u128 == D7, format!("#[bottom, top] = {got}"))?;
    within(elapsed, Duration::from_secs(60), "upset count at base 5")?;
    Ok(format!("#[bottom, top] in D_7 = {got}"))
}

fn c9_permutation_invariance() -> Outcome {
    let s = shared();
    let d6 = &s.levels[6];
    let perms = PermTable::new(6).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let x = d6.element(rng.gen_range(0..d6.len()));
        let base = upset_size_alg1(&x, &s.squares[4], &s.levels[4]).unwrap();
        for k in 0..perms.len() {
            let px = perms.apply(k, &x);
            let got = upset_size_alg1(&px, &s.squares[4], &s.levels[4]).unwrap();
            ensure(got == base, format!("{x} under permutation {k}: {got} vs {base}"))?;
        }
    }
    Ok("100 functions x 720 permutations".into())
}

fn c10_determinism() -> Outcome {
    let s = shared();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut counts = vec![1, 4, max_workers()];
    counts.sort_unstable();
    counts.dedup();
    let mut lines = Vec::new();
    for (classes, base) in [(&s.r5, 3usize), (&s.r6, 4)] {
        let k = base + 2;
        let expected = DEDEKIND[k + 1];
        for &workers in &counts {
            for chunk_size in [1, 97] {
                let opts = SweepOptions {
                    workers,
                    chunk_size,
                    ..SweepOptions::default()
                };
                let total = sweep_total(classes, &s.squares[base], &s.levels[base], &opts).unwrap();
                ensure(
                    total.value() == expected,
                    format!("R_{k}, {workers} workers, chunk {chunk_size}: {total}"),
                )?;
            }
        }

        let m = dir.path().join(format!("m{base}.mxm"));
        let c = dir.path().join(format!("r{k}.rn"));
        save_matrix(&s.squares[base], &m, 4).unwrap();
        save_classes(k, classes, &c).unwrap();
        ensure(load_matrix(&m).unwrap() == s.squares[base], "matrix file round trip")?;
        let mut cfg = SweepConfig::new(base, &m, &c);
        cfg.checkpoint = Some(dir.path().join(format!("r{k}.ckpt")));
        cfg.out = Some(dir.path().join(format!("r{k}.out")));
        cfg.options = SweepOptions {
            workers: 4,
            chunk_size: 16,
            checkpoint_every: 5,
            stop_after_chunks: Some(12),
        };
        let first = run_sweep(&cfg).map_err(|e| e.to_string())?;
        ensure(
            matches!(first, SweepOutcome::Interrupted { chunks_done: 12 }),
            format!("first leg: {first:?}"),
        )?;
        cfg.options.stop_after_chunks = None;
        cfg.options.workers = 1;
        let second = run_sweep(&cfg).map_err(|e| e.to_string())?;
        let SweepOutcome::Complete(summary) = second else {
            return Err(format!("resumed sweep did not complete: {second:?}"));
        };
        ensure(summary.resumed_chunks == 10, format!("resumed at chunk {}", summary.resumed_chunks))?;
        ensure(
            summary.total.value() == expected,
            format!("R_{k} resumed total {}", summary.total),
        )?;
        lines.push(format!("R_{k} -> {}", summary.total));
    }
    Ok(format!("workers {counts:?}, kill/resume: {}", lines.join(", ")))
}

fn c11_d8() -> Option<Outcome> {
    let classes = PathBuf::from(std::env::var_os("MBF_R7_CLASSES")?);
    Some((|| {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let matrix = match std::env::var_os("MBF_D5_MATRIX") {
            Some(p) => PathBuf::from(p),
            None => {
                let p = dir.path().join("m5.mxm");
                save_matrix(&shared().squares[5], &p, 2).map_err(|e| e.to_string())?;
                p
            }
        };
        let mut cfg = SweepConfig::new(5, matrix, classes);
        cfg.options.workers = max_workers();
        let outcome = run_sweep(&cfg).map_err(|e| e.to_string())?;
        let total = outcome.total().ok_or("sweep interrupted")?;
        ensure(total.value() == D8, format!("d_8 sweep gave {total}"))?;
        Ok(format!("d_8 = {total}"))
    })())
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("C1 generation ground truth", c1_generation),
        ("C2 class ground truth", c2_classes),
        ("C3 printed matrix reproduction", c3_printed_matrices),
        ("C4 SumSq identity", c4_sumsq),
        ("C5 upset count oracle equivalence", c5_alg1_oracle),
        ("C6 interval count oracle equivalence", c6_alg2_oracle),
        ("C7 d_7 from R_6 classes", c7_d7_from_r6),
        ("C8 d_7 as one upset count", c8_d7_single_call),
        ("C9 permutation invariance", c9_permutation_invariance),
        ("C10 sweep determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.2}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{secs:.2}s]");
            }
        }
    }
    match c11_d8() {
        None => println!("SKIP C11 d_8 from R_7 classes: MBF_R7_CLASSES not set"),
        Some(Ok(detail)) => println!("PASS C11 d_8 from R_7 classes: {detail}"),
        Some(Err(why)) => {
            failed += 1;
            println!("FAIL C11 d_8 from R_7 classes: {why}");
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
