//! Sorted enumerations of `D_n` for `n <= 6`.

use std::io::{Read, Write};
use std::path::Path;

use crate::codec::{self, PayloadReader, PayloadWriter, FORMAT_VERSION};
use crate::truth_table::{is_monotone_bits, TruthTable};
use crate::{Error, Result};

/// Largest arity held in memory; `D_7` has 2.4e12 elements.
pub const MAX_LEVEL_ARITY: usize = 6;

const MAGIC: &[u8; 4] = b"MBFD";
const HEADER_LEN: usize = 16;

/// All monotone functions of `n` variables, strictly increasing by packed value.
#[derive(Clone, PartialEq, Eq)]
pub struct PosetLevel {
    n: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for PosetLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PosetLevel")
            .field("n", &self.n)
            .field("len", &self.words.len())
            .finish()
    }
}

impl PosetLevel {
    /// Builds `D_n` from `D_{n-1}` as the concatenations `f0 f1` with `f0 <= f1`.
    ///
    /// Iterating `f1` in the outer loop produces the packed values already in
    /// increasing order since `f1` occupies the high half.
    pub fn generate(n: usize) -> Result<Self> {
        if n > MAX_LEVEL_ARITY {
            return Err(Error::arity("generate", n, 0, MAX_LEVEL_ARITY));
        }
        let mut words = vec![0u64, 1];
        for k in 1..=n {
            let half = 1u32 << (k - 1);
            let mut next = Vec::new();
            for &f1 in &words {
                for &f0 in &words {
                    if f0 & !f1 == 0 {
                        next.push(f0 | (f1 << half));
                    }
                }
            }
            words = next;
        }
        debug_assert!(words.windows(2).all(|w| w[0] < w[1]));
        Ok(PosetLevel { n, words })
    }

    /// Wraps an explicit word list; it must be sorted, duplicate-free and monotone.
    pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        if n > MAX_LEVEL_ARITY {
            return Err(Error::arity("poset level", n, 0, MAX_LEVEL_ARITY));
        }
        let mask = crate::truth_table::table_mask(n) as u64;
        if let Some(w) = words.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Format(format!(
                "elements not strictly increasing at {:#x}, {:#x}",
                w[0], w[1]
            )));
        }
        if let Some(&w) = words
            .iter()
            .find(|&&w| w & !mask != 0 || !is_monotone_bits(n, w as u128))
        {
            return Err(Error::NotMonotone(format!("{w:#x}")));
        }
        Ok(PosetLevel { n, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn element(&self, i: usize) -> TruthTable {
        TruthTable::from_raw(self.n, self.words[i] as u128)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = TruthTable> + '_ {
        self.words
            .iter()
            .map(move |&w| TruthTable::from_raw(self.n, w as u128))
    }

    fn check_arity(&self, f: &TruthTable) -> Result<()> {
        if f.n() != self.n {
            return Err(Error::ArityMismatch {
                left: f.n(),
                right: self.n,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn index_of_word(&self, w: u64) -> Option<usize> {
        self.words.binary_search(&w).ok()
    }

    pub fn index_of(&self, f: &TruthTable) -> Result<usize> {
        self.check_arity(f)?;
        self.index_of_word(f.word()).ok_or_else(|| Error::NotMember {
            n: self.n,
            tt: f.to_string(),
        })
    }

    /// Indices `i` with `lo <= element_i <= hi`, by a full scan.
    pub fn scan_interval(&self, lo: u64, hi: u64) -> Vec<u32> {
        self.words
            .iter()
            .enumerate()
            .filter(|&(_, &h)| lo & !h == 0 && h & !hi == 0)
            .map(|(i, _)| i as u32)
            .collect()
    }

    pub fn upset_indices(&self, x: &TruthTable) -> Result<Vec<usize>> {
        self.check_arity(x)?;
        Ok(widen(self.scan_interval(x.word(), u64::MAX)))
    }

    pub fn downset_indices(&self, y: &TruthTable) -> Result<Vec<usize>> {
        self.check_arity(y)?;
        Ok(widen(self.scan_interval(0, y.word())))
    }

    pub fn interval_indices(&self, x: &TruthTable, y: &TruthTable) -> Result<Vec<usize>> {
        self.check_arity(x)?;
        self.check_arity(y)?;
        Ok(widen(self.scan_interval(x.word(), y.word())))
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = PayloadWriter::new(w);
        let mut header = [0u8; HEADER_LEN];
        header[..4].copy_from_slice(MAGIC);
        header[4] = FORMAT_VERSION;
        header[5] = self.n as u8;
        header[8..].copy_from_slice(&(self.words.len() as u64).to_le_bytes());
        out.header(&header)?;
        for &w in &self.words {
            out.payload(&w.to_le_bytes())?;
        }
        out.finish()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut input = PayloadReader::new(r);
        input.magic_and_version(MAGIC)?;
        let mut rest = [0u8; HEADER_LEN - 5];
        input.header(&mut rest)?;
        let n = rest[0] as usize;
        if n > 7 {
            return Err(Error::Format(format!("unsupported arity {n}")));
        }
        if n > MAX_LEVEL_ARITY {
            return Err(Error::Unsupported(format!("D_{n} is never materialized")));
        }
        let count = u64::from_le_bytes(rest[3..].try_into().unwrap());
        let expected = crate::known::dedekind(n).unwrap() as u64;
        if count != expected {
            return Err(Error::Format(format!(
                "element count {count} does not match d_{n} = {expected}"
            )));
        }
        let mut words = Vec::with_capacity(count as usize);
        let mut buf = [0u8; 8];
        for _ in 0..count {
            input.payload(&mut buf)?;
            words.push(u64::from_le_bytes(buf));
        }
        input.finish()?;
        Self::from_words(n, words).map_err(|e| Error::Format(e.to_string()))
    }
}

fn widen(v: Vec<u32>) -> Vec<usize> {
    v.into_iter().map(|i| i as usize).collect()
}

pub fn save_level(level: &PosetLevel, path: &Path) -> Result<()> {
    level.write_to(codec::create(path)?)
}

pub fn load_level(path: &Path) -> Result<PosetLevel> {
    PosetLevel::read_from(codec::open(path)?)
}
