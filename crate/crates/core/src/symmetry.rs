//! Permutations of input variables acting on truth tables.
//!
//! Two routes are provided. [`PermTable`] stores, for every permutation, the
//! full position remap and gathers bits one at a time; it is the reference.
//! The orbit walker used for canonical forms instead visits all `n!` images
//! by a sequence of variable transpositions (Heap's order), each of which is
//! a single masked delta swap on the packed table.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::codec::{self, PayloadReader, PayloadWriter, FORMAT_VERSION};
use crate::poset::{PosetLevel, MAX_LEVEL_ARITY};
use crate::truth_table::{TruthTable, MAX_ARITY, ZERO_COORD};
use crate::wide::WideAccumulator;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"MBFR";

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// A permutation of the variables, 0-based: variable `i` is sent to `images[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn new(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        let mut seen = [false; MAX_ARITY];
        if n > MAX_ARITY {
            return Err(Error::InvalidPermutation(images));
        }
        for &i in &images {
            if i as usize >= n || std::mem::replace(&mut seen[i as usize], true) {
                return Err(Error::InvalidPermutation(images));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u8).collect(),
        }
    }

    /// Swaps variables `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a, b);
        p
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Permutation {
            images: other.images.iter().map(|&i| self.images[i as usize]).collect(),
        }
    }

    /// All permutations of `n` variables in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        let mut cur: Vec<u8> = (0..n as u8).collect();
        let mut out = vec![Permutation { images: cur.clone() }];
        loop {
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(Permutation { images: cur.clone() });
        }
    }

    /// Truth-table position remap: the permuted table takes its value at
    /// position `p` from position `remap[p]` of the original.
    pub fn position_remap(&self) -> Vec<u8> {
        let n = self.len();
        (0..1usize << n)
            .map(|p| {
                let x = |k: usize| (p >> (n - 1 - k)) & 1;
                (0..n)
                    .map(|i| x(self.images[i] as usize) << (n - 1 - i))
                    .sum::<usize>() as u8
            })
            .collect()
    }
}

/// `g(x_1, ..., x_n) = f(x_{π(1)}, ..., x_{π(n)})`.
pub fn apply_perm(f: &TruthTable, pi: &Permutation) -> Result<TruthTable> {
    if pi.len() != f.n() {
        return Err(Error::ArityMismatch {
            left: pi.len(),
            right: f.n(),
        });
    }
    Ok(gather(f, &pi.position_remap()))
}

fn gather(f: &TruthTable, remap: &[u8]) -> TruthTable {
    let bits = remap
        .iter()
        .enumerate()
        .fold(0u128, |acc, (p, &q)| acc | (((f.bits() >> q) & 1) << p));
    TruthTable::from_raw(f.n(), bits)
}

/// Every permutation of `n` variables with its precomputed position remap.
#[derive(Clone, Debug)]
pub struct PermTable {
    n: usize,
    perms: Vec<Permutation>,
    remaps: Vec<Vec<u8>>,
}

impl PermTable {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::arity("permutation table", n, 0, MAX_ARITY));
        }
        let perms = Permutation::all(n);
        let remaps = perms.iter().map(Permutation::position_remap).collect();
        Ok(PermTable { n, perms, remaps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn remap(&self, k: usize) -> &[u8] {
        &self.remaps[k]
    }

    pub fn apply(&self, k: usize, f: &TruthTable) -> TruthTable {
        assert_eq!(f.n(), self.n);
        gather(f, &self.remaps[k])
    }

    /// All `n!` images, with repetitions.
    pub fn images(&self, f: &TruthTable) -> Vec<TruthTable> {
        (0..self.len()).map(|k| self.apply(k, f)).collect()
    }
}

/// A variable transposition as a delta swap on the packed table.
#[derive(Clone, Copy, Debug)]
struct DeltaSwap {
    mask: u128,
    shift: u32,
}

impl DeltaSwap {
    /// Swaps variables `a < b`; their coordinates carry weights
    /// `2^(n-1-a)` (high) and `2^(n-1-b)` (low).
    fn new(n: usize, a: usize, b: usize) -> Self {
        let hi = n - 1 - a;
        let lo = n - 1 - b;
        DeltaSwap {
            mask: !ZERO_COORD[lo] & ZERO_COORD[hi],
            shift: (1u32 << hi) - (1u32 << lo),
        }
    }

    #[inline(always)]
    fn apply(self, x: u128) -> u128 {
        let t = ((x >> self.shift) ^ x) & self.mask;
        x ^ t ^ (t << self.shift)
    }
}

/// Transpositions visiting all `n!` arrangements, `n! - 1` steps (Heap).
fn heap_swaps(n: usize) -> Vec<DeltaSwap> {
    let mut out = Vec::new();
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            let j = if i % 2 == 0 { 0 } else { c[i] };
            out.push(DeltaSwap::new(n, j.min(i), j.max(i)));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn orbit_steps(n: usize) -> &'static [DeltaSwap] {
    static STEPS: OnceLock<Vec<Vec<DeltaSwap>>> = OnceLock::new();
    &STEPS.get_or_init(|| (0..=MAX_ARITY).map(heap_swaps).collect())[n]
}

/// Calls `visit` on each of the `n!` images of `bits`, identity first.
/// Stops early when `visit` returns `false`.
#[inline]
fn walk_orbit(n: usize, bits: u128, mut visit: impl FnMut(u128) -> bool) {
    let mut x = bits;
    if !visit(x) {
        return;
    }
    for s in orbit_steps(n) {
        x = s.apply(x);
        if !visit(x) {
            return;
        }
    }
}

/// Smallest packed value in the orbit of `f`.
pub fn canonical(f: &TruthTable) -> TruthTable {
    let mut best = f.bits();
    walk_orbit(f.n(), f.bits(), |x| {
        best = best.min(x);
        true
    });
    TruthTable::from_raw(f.n(), best)
}

pub fn is_canonical(f: &TruthTable) -> bool {
    let mut canon = true;
    walk_orbit(f.n(), f.bits(), |x| {
        canon = x >= f.bits();
        canon
    });
    canon
}

/// The distinct images of `f`, sorted.
pub fn orbit(f: &TruthTable) -> Vec<TruthTable> {
    let mut all = Vec::with_capacity(factorial(f.n()) as usize);
    walk_orbit(f.n(), f.bits(), |x| {
        all.push(x);
        true
    });
    all.sort_unstable();
    all.dedup();
    all.into_iter().map(|b| TruthTable::from_raw(f.n(), b)).collect()
}

/// Number of distinct functions obtained from `f` by permuting variables.
pub fn gamma(f: &TruthTable) -> u32 {
    orbit(f).len() as u32
}

/// A class of functions equal up to variable permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitRecord {
    pub rep: TruthTable,
    pub gamma: u32,
}

impl OrbitRecord {
    pub fn of(f: &TruthTable) -> Self {
        OrbitRecord {
            rep: canonical(f),
            gamma: gamma(f),
        }
    }
}

/// One record per class of `D_n`, sorted by representative.
pub fn enumerate_classes(n: usize) -> Result<Vec<OrbitRecord>> {
    if n == MAX_ARITY {
        return Err(Error::Unsupported(
            "enumerating the classes of D_7 needs an external class file".into(),
        ));
    }
    if n > MAX_LEVEL_ARITY {
        return Err(Error::arity("enumerate_classes", n, 0, MAX_LEVEL_ARITY));
    }
    Ok(classes_of_level(&PosetLevel::generate(n)?))
}

pub fn classes_of_level(level: &PosetLevel) -> Vec<OrbitRecord> {
    let n = level.n();
    level
        .words()
        .par_iter()
        .map(|&w| TruthTable::from_raw(n, w as u128))
        .filter(is_canonical)
        .map(|rep| OrbitRecord {
            rep,
            gamma: gamma(&rep),
        })
        .collect()
}

/// Checks that `records` is a plausible class list of `D_n` and returns `Σ γ`.
///
/// Representatives must be monotone, of arity `n` and strictly increasing;
/// orbit sizes must divide `n!`. Canonicity itself is not rechecked.
pub fn validate_classes(n: usize, records: &[OrbitRecord]) -> Result<WideAccumulator> {
    let nfact = factorial(n);
    let mut total = WideAccumulator::ZERO;
    let mut prev: Option<u128> = None;
    for r in records {
        if r.rep.n() != n {
            return Err(Error::ArityMismatch {
                left: r.rep.n(),
                right: n,
            });
        }
        r.rep.require_monotone()?;
        if prev.is_some_and(|p| p >= r.rep.bits()) {
            return Err(Error::Format(format!("class list not strictly increasing at {}", r.rep)));
        }
        if r.gamma == 0 || nfact % r.gamma as u64 != 0 {
            return Err(Error::Format(format!("orbit size {} does not divide {n}!", r.gamma)));
        }
        prev = Some(r.rep.bits());
        total.add(r.gamma as u128);
    }
    Ok(total)
}

pub fn write_classes<W: Write>(n: usize, records: &[OrbitRecord], w: W) -> Result<()> {
    if n > MAX_ARITY {
        return Err(Error::arity("class file", n, 0, MAX_ARITY));
    }
    let mut out = PayloadWriter::new(w);
    let mut header = Vec::with_capacity(14);
    header.extend_from_slice(MAGIC);
    header.push(FORMAT_VERSION);
    header.push(n as u8);
    header.extend_from_slice(&(records.len() as u64).to_le_bytes());
    out.header(&header)?;
    let mut buf = Vec::with_capacity(20);
    for r in records {
        if r.rep.n() != n {
            return Err(Error::ArityMismatch {
                left: r.rep.n(),
                right: n,
            });
        }
        buf.clear();
        buf.extend_from_slice(&r.rep.to_le_bytes());
        buf.extend_from_slice(&r.gamma.to_le_bytes());
        out.payload(&buf)?;
    }
    out.finish()?;
    Ok(())
}

/// Reads a `.rn` file, returning its arity and records.
pub fn read_classes<R: Read>(r: R) -> Result<(usize, Vec<OrbitRecord>)> {
    let mut input = PayloadReader::new(r);
    input.magic_and_version(MAGIC)?;
    let mut rest = [0u8; 9];
    input.header(&mut rest)?;
    let n = rest[0] as usize;
    if n > MAX_ARITY {
        return Err(Error::Format(format!("unsupported arity {n} in class file")));
    }
    let count = u64::from_le_bytes(rest[1..].try_into().unwrap());
    let size = TruthTable::packed_size(n);
    let mut buf = vec![0u8; size + 4];
    let mut records = Vec::with_capacity(count.min(1 << 32) as usize);
    for _ in 0..count {
        input.payload(&mut buf)?;
        let rep = TruthTable::from_le_bytes(n, &buf[..size])?;
        let gamma = u32::from_le_bytes(buf[size..].try_into().unwrap());
        records.push(OrbitRecord { rep, gamma });
    }
    input.finish()?;
    Ok((n, records))
}

pub fn save_classes(n: usize, records: &[OrbitRecord], path: &Path) -> Result<()> {
    write_classes(n, records, codec::create(path)?)
}

pub fn load_classes(path: &Path) -> Result<(usize, Vec<OrbitRecord>)> {
    read_classes(codec::open(path)?)
}
