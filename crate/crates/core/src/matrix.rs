//! The incidence matrix of `D_n` and its square, the table of interval sizes.
//!
//! Rows and columns are indexed by the sorted enumeration of [`PosetLevel`].
//! The square is formed as `popcount(row_i & column_j)`, evaluated only where
//! `element_i <= element_j` because every other entry is zero.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::codec::{self, PayloadReader, PayloadWriter, FORMAT_VERSION};
use crate::poset::PosetLevel;
use crate::wide::WideAccumulator;
use crate::{Error, Result};

/// Largest arity whose incidence matrix is built; the `D_6` one would need
/// tens of terabytes.
pub const MAX_MATRIX_ARITY: usize = 5;

/// Largest dimension accepted by the CSV export.
pub const CSV_MAX_DIM: usize = 200;

const MAGIC: &[u8; 4] = b"MBFM";

#[derive(Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    n: usize,
    dim: usize,
    stride: usize,
    rows: Vec<u64>,
}

impl std::fmt::Debug for IncidenceMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IncidenceMatrix(n={}, dim={})", self.n, self.dim)
    }
}

impl IncidenceMatrix {
    /// Row `i`, bit `j` set iff `element_i <= element_j`.
    pub fn build(level: &PosetLevel) -> Result<Self> {
        if level.n() > MAX_MATRIX_ARITY {
            return Err(Error::arity("incidence matrix", level.n(), 0, MAX_MATRIX_ARITY));
        }
        let dim = level.len();
        let stride = dim.div_ceil(64);
        let words = level.words();
        let mut rows = vec![0u64; dim * stride];
        rows.par_chunks_mut(stride)
            .zip(words.par_iter())
            .for_each(|(row, &x)| {
                for (j, &y) in words.iter().enumerate() {
                    if x & !y == 0 {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
            });
        Ok(IncidenceMatrix {
            n: level.n(),
            dim,
            stride,
            rows,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i * self.stride + j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.stride..(i + 1) * self.stride]
    }

    /// Number of comparable pairs, which is `d_{n+1}`.
    pub fn count_ones(&self) -> u64 {
        self.rows.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Column-major copy: row `j` of the result is column `j` of `self`.
    pub fn transpose(&self) -> IncidenceMatrix {
        let mut t = vec![0u64; self.rows.len()];
        for i in 0..self.dim {
            for (wi, &w) in self.row(i).iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let j = wi * 64 + bits.trailing_zeros() as usize;
                    t[j * self.stride + i / 64] |= 1 << (i % 64);
                    bits &= bits - 1;
                }
            }
        }
        IncidenceMatrix {
            n: self.n,
            dim: self.dim,
            stride: self.stride,
            rows: t,
        }
    }

    /// Entry `(i, j)` counts the `k` with `element_i <= element_k <= element_j`.
    pub fn square(&self) -> IntervalMatrix {
        let cols = self.transpose();
        let dim = self.dim;
        let mut entries = vec![0u32; dim * dim];
        entries
            .par_chunks_mut(dim)
            .enumerate()
            .for_each(|(i, out)| {
                let row = self.row(i);
                for (wi, &w) in row.iter().enumerate() {
                    let mut bits = w;
                    while bits != 0 {
                        let j = wi * 64 + bits.trailing_zeros() as usize;
                        out[j] = row
                            .iter()
                            .zip(cols.row(j))
                            .map(|(a, b)| (a & b).count_ones())
                            .sum();
                        bits &= bits - 1;
                    }
                }
            });
        IntervalMatrix {
            n: self.n,
            dim,
            entries,
        }
    }

    /// The 0/1 matrix as counts, so that `sum` and friends apply.
    pub fn to_counts(&self) -> IntervalMatrix {
        let dim = self.dim;
        let entries = (0..dim * dim)
            .map(|k| self.get(k / dim, k % dim) as u32)
            .collect();
        IntervalMatrix {
            n: self.n,
            dim,
            entries,
        }
    }
}

/// Dense table of `#[element_i, element_j]`, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntervalMatrix {
    n: usize,
    dim: usize,
    entries: Vec<u32>,
}

impl std::fmt::Debug for IntervalMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IntervalMatrix(n={}, dim={})", self.n, self.dim)
    }
}

impl IntervalMatrix {
    /// Builds `D_n`, its incidence matrix, and squares it.
    pub fn for_arity(n: usize) -> Result<Self> {
        if n > MAX_MATRIX_ARITY {
            return Err(Error::arity("incidence matrix", n, 0, MAX_MATRIX_ARITY));
        }
        let level = PosetLevel::generate(n)?;
        Ok(IncidenceMatrix::build(&level)?.square())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    pub fn sum(&self) -> WideAccumulator {
        self.entries
            .par_chunks(self.dim.max(1))
            .map(|r| WideAccumulator::new(r.iter().map(|&v| v as u128).sum()))
            .sum()
    }

    pub fn sumsq(&self) -> WideAccumulator {
        self.entries
            .par_chunks(self.dim.max(1))
            .map(|r| {
                WideAccumulator::new(r.iter().map(|&v| v as u128 * v as u128).sum())
            })
            .sum()
    }

    /// Checks that the matrix belongs to `level` (same arity and dimension).
    pub fn check_level(&self, level: &PosetLevel) -> Result<()> {
        if self.n != level.n() {
            return Err(Error::ArityMismatch {
                left: self.n,
                right: level.n(),
            });
        }
        if self.dim != level.len() {
            return Err(Error::Format(format!(
                "matrix dimension {} does not match |D_{}| = {}",
                self.dim,
                level.n(),
                level.len()
            )));
        }
        Ok(())
    }

    /// Writes the `.mxm` format with 2- or 4-byte entries.
    pub fn write_to<W: Write>(&self, w: W, entry_width: u8) -> Result<()> {
        if entry_width != 2 && entry_width != 4 {
            return Err(Error::Unsupported(format!("entry width {entry_width}")));
        }
        if entry_width == 2 && self.max_entry() > u16::MAX as u32 {
            return Err(Error::Unsupported(
                "entries exceed 16 bits; use entry width 4".into(),
            ));
        }
        let mut out = PayloadWriter::new(w);
        let mut header = Vec::with_capacity(11);
        header.extend_from_slice(MAGIC);
        header.push(FORMAT_VERSION);
        header.push(self.n as u8);
        header.extend_from_slice(&(self.dim as u32).to_le_bytes());
        header.push(entry_width);
        out.header(&header)?;
        let mut buf = Vec::with_capacity(self.dim * entry_width as usize);
        for i in 0..self.dim {
            buf.clear();
            for &v in self.row(i) {
                if entry_width == 2 {
                    buf.extend_from_slice(&(v as u16).to_le_bytes());
                } else {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
            }
            out.payload(&buf)?;
        }
        out.finish()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut input = PayloadReader::new(r);
        input.magic_and_version(MAGIC)?;
        let mut rest = [0u8; 6];
        input.header(&mut rest)?;
        let n = rest[0] as usize;
        if n > MAX_MATRIX_ARITY {
            return Err(Error::Format(format!("unsupported matrix arity {n}")));
        }
        let dim = u32::from_le_bytes(rest[1..5].try_into().unwrap()) as usize;
        let expected = crate::known::dedekind(n).unwrap() as usize;
        if dim != expected {
            return Err(Error::Format(format!(
                "dimension {dim} does not match d_{n} = {expected}"
            )));
        }
        let width = rest[5] as usize;
        if width != 2 && width != 4 {
            return Err(Error::Format(format!("bad entry width {width}")));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        let mut buf = vec![0u8; dim * width];
        for _ in 0..dim {
            input.payload(&mut buf)?;
            if width == 2 {
                entries.extend(
                    buf.chunks_exact(2)
                        .map(|c| u16::from_le_bytes([c[0], c[1]]) as u32),
                );
            } else {
                entries.extend(
                    buf.chunks_exact(4)
                        .map(|c| u32::from_le_bytes(c.try_into().unwrap())),
                );
            }
        }
        input.finish()?;
        Ok(IntervalMatrix { n, dim, entries })
    }

    /// Human-readable dump with element labels; refuses large matrices.
    pub fn write_csv<W: Write>(&self, level: &PosetLevel, mut w: W) -> Result<()> {
        self.check_level(level)?;
        if self.dim > CSV_MAX_DIM {
            return Err(Error::Unsupported(format!(
                "CSV export limited to dimension {CSV_MAX_DIM}, got {}",
                self.dim
            )));
        }
        let labels: Vec<String> = level.iter().map(|f| f.to_string()).collect();
        writeln!(w, ",{}", labels.join(","))?;
        for (i, label) in labels.iter().enumerate() {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(w, "{label},{}", row.join(","))?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn save_matrix(m: &IntervalMatrix, path: &Path, entry_width: u8) -> Result<()> {
    m.write_to(codec::create(path)?, entry_width)
}

pub fn load_matrix(path: &Path) -> Result<IntervalMatrix> {
    IntervalMatrix::read_from(codec::open(path)?)
}
