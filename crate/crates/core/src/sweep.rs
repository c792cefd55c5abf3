//! Parallel evaluation of `Σ_{x ∈ R_k} #[x, top] · γ(x)` over a class list.
//!
//! The class array is cut into fixed-size chunks handed out through a shared
//! atomic cursor. Workers send one result per chunk to the calling thread,
//! which folds them in chunk order. Folding in order gives a well-defined
//! prefix to checkpoint: a checkpoint records how many leading chunks are
//! done and their exact partial total, together with SHA-256 digests of the
//! input files so a resume against different inputs is refused.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::intervals::upset_size_unchecked;
use crate::matrix::{load_matrix, IntervalMatrix, MAX_MATRIX_ARITY};
use crate::poset::PosetLevel;
use crate::symmetry::{load_classes, validate_classes, OrbitRecord};
use crate::truth_table::TruthTable;
use crate::wide::WideAccumulator;
use crate::{Error, Result};

/// Environment variable consulted for the worker count.
pub const THREADS_ENV: &str = "MBF_THREADS";

pub const MIN_SWEEP_BASE: usize = 2;

const OUT_MAGIC: &[u8; 4] = b"MBFS";
const OUT_HEADER_LEN: u64 = 6;
const CHECKPOINT_VERSION: u32 = 1;

/// Worker count from [`THREADS_ENV`], else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&t: &usize| t >= 1)
        .unwrap_or_else(max_workers)
}

pub fn max_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    pub workers: usize,
    pub chunk_size: usize,
    /// Checkpoint after this many newly completed chunks.
    pub checkpoint_every: usize,
    /// Stop dispatching after this many chunks in this run, without a final
    /// checkpoint. Simulates an abrupt kill.
    pub stop_after_chunks: Option<u64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            workers: default_workers(),
            chunk_size: 256,
            checkpoint_every: 64,
            stop_after_chunks: None,
        }
    }
}

impl SweepOptions {
    pub fn with_workers(workers: usize) -> Self {
        SweepOptions {
            workers,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.workers == 0 || self.chunk_size == 0 || self.checkpoint_every == 0 {
            return Err(Error::Unsupported(
                "worker count, chunk size and checkpoint interval must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub base_n: usize,
    pub matrix_path: PathBuf,
    pub classes_path: PathBuf,
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub options: SweepOptions,
}

impl SweepConfig {
    pub fn new(base_n: usize, matrix_path: impl Into<PathBuf>, classes_path: impl Into<PathBuf>) -> Self {
        SweepConfig {
            base_n,
            matrix_path: matrix_path.into(),
            classes_path: classes_path.into(),
            checkpoint: None,
            out: None,
            options: SweepOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepSummary {
    pub total: WideAccumulator,
    pub classes: u64,
    pub chunks: u64,
    /// Chunks taken from a checkpoint rather than computed in this run.
    pub resumed_chunks: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepOutcome {
    Complete(SweepSummary),
    Interrupted { chunks_done: u64 },
}

impl SweepOutcome {
    pub fn total(&self) -> Option<WideAccumulator> {
        match self {
            SweepOutcome::Complete(s) => Some(s.total),
            SweepOutcome::Interrupted { .. } => None,
        }
    }
}

struct ChunkResult {
    index: u64,
    weighted: WideAccumulator,
    counts: Vec<u64>,
}

/// Evaluates chunks `start..` and hands them to `fold` in index order.
/// Returns the number of chunks folded.
fn run_chunks(
    classes: &[OrbitRecord],
    sq: &IntervalMatrix,
    level: &PosetLevel,
    opts: &SweepOptions,
    start: u64,
    keep_counts: bool,
    mut fold: impl FnMut(ChunkResult) -> Result<()>,
) -> Result<u64> {
    let chunk = opts.chunk_size;
    let n_chunks = classes.len().div_ceil(chunk) as u64;
    let limit = match opts.stop_after_chunks {
        Some(k) => n_chunks.min(start.saturating_add(k)),
        None => n_chunks,
    };
    if start >= limit {
        return Ok(0);
    }
    let cursor = AtomicU64::new(start);
    let abort = AtomicBool::new(false);
    let workers = opts.workers.min((limit - start) as usize);
    let (tx, rx) = mpsc::sync_channel::<ChunkResult>(2 * workers);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (cursor, abort) = (&cursor, &abort);
            scope.spawn(move || {
                while !abort.load(Ordering::Relaxed) {
                    let index = cursor.fetch_add(1, Ordering::Relaxed);
                    if index >= limit {
                        break;
                    }
                    let lo = index as usize * chunk;
                    let hi = (lo + chunk).min(classes.len());
                    let mut weighted = WideAccumulator::ZERO;
                    let mut counts = Vec::new();
                    for r in &classes[lo..hi] {
                        let c = upset_size_unchecked(&r.rep, sq, level);
                        weighted.add_product(c, r.gamma as u64);
                        if keep_counts {
                            counts.push(c);
                        }
                    }
                    if tx
                        .send(ChunkResult {
                            index,
                            weighted,
                            counts,
                        })
                        .is_err()
                    {
                        break;
                    }
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let mut next = start;
        let mut outcome = Ok(());
        for res in rx {
            if outcome.is_err() {
                continue;
            }
            pending.insert(res.index, res);
            while let Some(r) = pending.remove(&next) {
                if let Err(e) = fold(r) {
                    abort.store(true, Ordering::Relaxed);
                    outcome = Err(e);
                    break;
                }
                next += 1;
            }
        }
        outcome.map(|_| next - start)
    })
}

/// In-memory sweep: `Σ #[rep, top] · γ` over `classes`.
pub fn sweep_total(
    classes: &[OrbitRecord],
    sq: &IntervalMatrix,
    level: &PosetLevel,
    opts: &SweepOptions,
) -> Result<WideAccumulator> {
    opts.validate()?;
    check_inputs(classes, sq, level)?;
    let mut total = WideAccumulator::ZERO;
    let opts = SweepOptions {
        stop_after_chunks: None,
        ..*opts
    };
    run_chunks(classes, sq, level, &opts, 0, false, |r| {
        total.merge(r.weighted);
        Ok(())
    })?;
    Ok(total)
}

/// `#[rep, top]` for every class, in class order.
pub fn upset_sizes(
    classes: &[OrbitRecord],
    sq: &IntervalMatrix,
    level: &PosetLevel,
    opts: &SweepOptions,
) -> Result<Vec<u64>> {
    opts.validate()?;
    check_inputs(classes, sq, level)?;
    let mut out = Vec::with_capacity(classes.len());
    let opts = SweepOptions {
        stop_after_chunks: None,
        ..*opts
    };
    run_chunks(classes, sq, level, &opts, 0, true, |r| {
        out.extend(r.counts);
        Ok(())
    })?;
    Ok(out)
}

fn check_inputs(classes: &[OrbitRecord], sq: &IntervalMatrix, level: &PosetLevel) -> Result<()> {
    sq.check_level(level)?;
    validate_classes(level.n() + 2, classes)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    base_n: usize,
    matrix_sha256: String,
    classes_sha256: String,
    class_count: u64,
    chunk_size: u64,
    chunks_done: u64,
    partial_total: WideAccumulator,
}

impl Checkpoint {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Checkpoint(format!("unreadable checkpoint {}: {e}", path.display())))
    }

    fn store(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = File::create(&tmp)?;
            f.write_all(serde_json::to_string_pretty(self).unwrap().as_bytes())?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    fn ensure_matches(&self, expected: &Checkpoint) -> Result<()> {
        let fields = [
            ("format version", self.version.to_string(), expected.version.to_string()),
            ("base arity", self.base_n.to_string(), expected.base_n.to_string()),
            ("matrix digest", self.matrix_sha256.clone(), expected.matrix_sha256.clone()),
            ("class file digest", self.classes_sha256.clone(), expected.classes_sha256.clone()),
            ("class count", self.class_count.to_string(), expected.class_count.to_string()),
            ("chunk size", self.chunk_size.to_string(), expected.chunk_size.to_string()),
        ];
        for (what, have, want) in fields {
            if have != want {
                return Err(Error::Checkpoint(format!("{what} is {have}, current run has {want}")));
            }
        }
        if self.chunks_done > self.class_count.div_ceil(self.chunk_size) {
            return Err(Error::Checkpoint("more chunks recorded than exist".into()));
        }
        Ok(())
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    loop {
        let k = f.read(&mut buf)?;
        if k == 0 {
            break;
        }
        h.update(&buf[..k]);
    }
    Ok(hex::encode(h.finalize()))
}

/// Opens the per-class output, positioned after `records` records.
fn open_out(path: &Path, n: usize, records: u64, resume: bool) -> Result<BufWriter<File>> {
    let record = (TruthTable::packed_size(n) + 8) as u64;
    let keep = OUT_HEADER_LEN + records * record;
    let mut f = if resume {
        let f = OpenOptions::new().read(true).write(true).open(path)?;
        let len = f.metadata()?.len();
        if len < keep {
            return Err(Error::Checkpoint(format!(
                "output {} has {len} bytes, checkpoint needs {keep}",
                path.display()
            )));
        }
        f.set_len(keep)?;
        f
    } else {
        let mut f = File::create(path)?;
        let mut header = Vec::with_capacity(OUT_HEADER_LEN as usize);
        header.extend_from_slice(OUT_MAGIC);
        header.push(crate::codec::FORMAT_VERSION);
        header.push(n as u8);
        f.write_all(&header)?;
        f
    };
    f.seek(SeekFrom::End(0))?;
    Ok(BufWriter::new(f))
}

/// Reads a per-class output file back as `(rep, #[rep, top])` pairs.
pub fn read_sweep_output(path: &Path) -> Result<Vec<(TruthTable, u64)>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < OUT_HEADER_LEN as usize || &bytes[..4] != OUT_MAGIC {
        return Err(Error::Format("not a sweep output file".into()));
    }
    let n = bytes[5] as usize;
    if n > crate::truth_table::MAX_ARITY {
        return Err(Error::Format(format!("unsupported arity {n}")));
    }
    let size = TruthTable::packed_size(n);
    let body = &bytes[OUT_HEADER_LEN as usize..];
    if body.len() % (size + 8) != 0 {
        return Err(Error::Format("truncated sweep output record".into()));
    }
    body.chunks_exact(size + 8)
        .map(|r| {
            let rep = TruthTable::from_le_bytes(n, &r[..size])?;
            Ok((rep, u64::from_le_bytes(r[size..].try_into().unwrap())))
        })
        .collect()
}

/// File-driven sweep with optional checkpointing and per-class output.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    let opts = &config.options;
    opts.validate()?;
    let base = config.base_n;
    if !(MIN_SWEEP_BASE..=MAX_MATRIX_ARITY).contains(&base) {
        return Err(Error::arity("sweep base", base, MIN_SWEEP_BASE, MAX_MATRIX_ARITY));
    }
    let sq = load_matrix(&config.matrix_path)?;
    let (n, classes) = load_classes(&config.classes_path)?;
    if n != base + 2 {
        return Err(Error::ArityMismatch {
            left: n,
            right: base + 2,
        });
    }
    let level = PosetLevel::generate(base)?;
    sq.check_level(&level)?;
    let gamma_total = validate_classes(n, &classes)?;
    if let Some(d) = crate::known::dedekind(n) {
        if gamma_total.value() != d {
            return Err(Error::Format(format!(
                "class file orbit sizes sum to {gamma_total}, expected d_{n} = {d}"
            )));
        }
    }

    let n_chunks = classes.len().div_ceil(opts.chunk_size) as u64;
    let mut state = Checkpoint {
        version: CHECKPOINT_VERSION,
        base_n: base,
        matrix_sha256: String::new(),
        classes_sha256: String::new(),
        class_count: classes.len() as u64,
        chunk_size: opts.chunk_size as u64,
        chunks_done: 0,
        partial_total: WideAccumulator::ZERO,
    };
    let mut resumed = false;
    if let Some(cp) = &config.checkpoint {
        state.matrix_sha256 = sha256_file(&config.matrix_path)?;
        state.classes_sha256 = sha256_file(&config.classes_path)?;
        if cp.exists() {
            let saved = Checkpoint::load(cp)?;
            saved.ensure_matches(&state)?;
            state = saved;
            resumed = true;
        }
    }
    let resumed_chunks = state.chunks_done;
    let classes_done = (state.chunks_done as usize * opts.chunk_size).min(classes.len());
    let mut out = match &config.out {
        Some(p) => Some(open_out(p, n, classes_done as u64, resumed && p.exists())?),
        None => None,
    };

    let mut since_checkpoint = 0usize;
    let folded = run_chunks(
        &classes,
        &sq,
        &level,
        opts,
        state.chunks_done,
        out.is_some(),
        |r| {
            if let Some(w) = out.as_mut() {
                let lo = r.index as usize * opts.chunk_size;
                for (rec, c) in classes[lo..].iter().zip(&r.counts) {
                    w.write_all(&rec.rep.to_le_bytes())?;
                    w.write_all(&c.to_le_bytes())?;
                }
            }
            state.partial_total.merge(r.weighted);
            state.chunks_done = r.index + 1;
            since_checkpoint += 1;
            if since_checkpoint >= opts.checkpoint_every {
                if let Some(cp) = &config.checkpoint {
                    if let Some(w) = out.as_mut() {
                        w.flush()?;
                    }
                    state.store(cp)?;
                }
                since_checkpoint = 0;
            }
            Ok(())
        },
    )?;
    debug_assert_eq!(state.chunks_done, resumed_chunks + folded);

    if state.chunks_done < n_chunks {
        return Ok(SweepOutcome::Interrupted {
            chunks_done: state.chunks_done,
        });
    }
    if let Some(w) = out.as_mut() {
        w.flush()?;
    }
    if let Some(cp) = &config.checkpoint {
        state.store(cp)?;
    }
    Ok(SweepOutcome::Complete(SweepSummary {
        total: state.partial_total,
        classes: classes.len() as u64,
        chunks: n_chunks,
        resumed_chunks,
    }))
}
