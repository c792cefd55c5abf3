//! Bit-packed truth tables of Boolean functions with at most seven inputs.
//!
//! Position `p` of a table of arity `n` holds `f(x_1, ..., x_n)` where
//! `p = sum x_k * 2^(n-k)`, so `x_1` is the most significant coordinate and a
//! table written as a string reads left to right as positions `0..2^n`.
//! Position `p` is stored in bit `p` of a `u128`; for `n <= 6` only the low
//! 64-bit word is used, for `n = 7` the low word holds positions `0..64`
//! (the `x_1 = 0` half) and the high word positions `64..128`.

use std::fmt;

use crate::{Error, Result};

pub const MAX_ARITY: usize = 7;

/// Bits of the positions whose coordinate with weight `2^b` is zero.
pub(crate) const fn zero_coord_mask(b: usize) -> u128 {
    let mut m = 0u128;
    let mut p = 0;
    while p < 128 {
        if p & (1 << b) == 0 {
            m |= 1u128 << p;
        }
        p += 1;
    }
    m
}

pub(crate) const ZERO_COORD: [u128; MAX_ARITY] = [
    zero_coord_mask(0),
    zero_coord_mask(1),
    zero_coord_mask(2),
    zero_coord_mask(3),
    zero_coord_mask(4),
    zero_coord_mask(5),
    zero_coord_mask(6),
];

/// All-ones mask over the `2^n` valid positions.
#[inline]
pub const fn table_mask(n: usize) -> u128 {
    if n >= MAX_ARITY {
        u128::MAX
    } else {
        (1u128 << (1usize << n)) - 1
    }
}

/// Word-level monotonicity test: for every coordinate the half with the
/// coordinate cleared must be contained in the half with it set.
#[inline]
pub fn is_monotone_bits(n: usize, bits: u128) -> bool {
    (0..n).all(|b| ((bits & ZERO_COORD[b]) << (1u32 << b)) & !bits == 0)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: u8,
    bits: u128,
}

impl TruthTable {
    pub fn new(n: usize, bits: u128) -> Result<Self> {
        if n > MAX_ARITY {
            return Err(Error::arity("truth table", n, 0, MAX_ARITY));
        }
        if bits & !table_mask(n) != 0 {
            return Err(Error::Parse(format!(
                "bits set above position {} for arity {n}",
                (1usize << n) - 1
            )));
        }
        Ok(TruthTable { n: n as u8, bits })
    }

    /// Caller guarantees `n <= 7` and no stray bits.
    #[inline]
    pub(crate) const fn from_raw(n: usize, bits: u128) -> Self {
        TruthTable { n: n as u8, bits }
    }

    pub fn from_word(n: usize, word: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::arity("single-word truth table", n, 0, 6));
        }
        Self::new(n, word as u128)
    }

    /// Arity-7 table from its two halves.
    pub fn from_words(low: u64, high: u64) -> Self {
        TruthTable {
            n: 7,
            bits: (low as u128) | ((high as u128) << 64),
        }
    }

    pub fn bottom(n: usize) -> Self {
        assert!(n <= MAX_ARITY);
        Self::from_raw(n, 0)
    }

    pub fn top(n: usize) -> Self {
        assert!(n <= MAX_ARITY);
        Self::from_raw(n, table_mask(n))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    /// The low word; the whole table when `n <= 6`.
    #[inline]
    pub fn word(&self) -> u64 {
        self.bits as u64
    }

    /// `(low, high)` words. `high` is zero unless `n == 7`.
    pub fn words(&self) -> (u64, u64) {
        (self.bits as u64, (self.bits >> 64) as u64)
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn get(&self, position: usize) -> bool {
        assert!(position < self.len(), "position {position} out of range");
        (self.bits >> position) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    fn same_arity(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ArityMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }

    /// Pointwise order: every input mapped to 1 by `self` is mapped to 1 by `other`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.same_arity(other)?;
        Ok(self.leq_unchecked(other))
    }

    #[inline]
    pub fn leq_unchecked(&self, other: &Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_arity(other)?;
        Ok(Self::from_raw(self.n(), self.bits | other.bits))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.same_arity(other)?;
        Ok(Self::from_raw(self.n(), self.bits & other.bits))
    }

    pub fn is_monotone(&self) -> bool {
        is_monotone_bits(self.n(), self.bits)
    }

    pub(crate) fn require_monotone(&self) -> Result<()> {
        if self.is_monotone() {
            Ok(())
        } else {
            Err(Error::NotMonotone(self.to_string()))
        }
    }

    /// Splits on `x_1` without validation. Panics if `n == 0`.
    #[inline]
    pub fn split2(&self) -> (Self, Self) {
        assert!(self.n >= 1, "cannot split an arity-0 table");
        let m = self.n() - 1;
        let half = 1u32 << m;
        let mask = table_mask(m);
        (
            Self::from_raw(m, self.bits & mask),
            Self::from_raw(m, (self.bits >> half) & mask),
        )
    }

    /// `(f0, f1)` with `f0` the restriction to `x_1 = 0` and `f1` to `x_1 = 1`.
    pub fn decompose2(&self) -> Result<(Self, Self)> {
        if self.n == 0 {
            return Err(Error::arity("decompose2", 0, 1, MAX_ARITY));
        }
        Ok(self.split2())
    }

    /// Concatenation of two halves without validation.
    #[inline]
    pub fn join2(f0: &Self, f1: &Self) -> Self {
        debug_assert_eq!(f0.n, f1.n);
        debug_assert!(f0.n() < MAX_ARITY);
        let half = 1u32 << f0.n;
        Self::from_raw(f0.n() + 1, f0.bits | (f1.bits << half))
    }

    /// Inverse of [`decompose2`](Self::decompose2); rejects `f0 > f1`.
    pub fn compose2(f0: &Self, f1: &Self) -> Result<Self> {
        f0.same_arity(f1)?;
        if f0.n() >= MAX_ARITY {
            return Err(Error::arity("compose2 input", f0.n(), 0, MAX_ARITY - 1));
        }
        if !f0.leq_unchecked(f1) {
            return Err(Error::NotOrdered(f0.to_string(), f1.to_string()));
        }
        Ok(Self::join2(f0, f1))
    }

    /// Quarters `[f(00.), f(01.), f(10.), f(11.)]` over `(x_1, x_2)`, unvalidated.
    #[inline]
    pub fn split4(&self) -> [Self; 4] {
        assert!(self.n >= 2, "cannot split an arity-{} table into quarters", self.n);
        let m = self.n() - 2;
        let q = 1u32 << m;
        let mask = table_mask(m);
        [0, 1, 2, 3].map(|j| Self::from_raw(m, (self.bits >> (j * q)) & mask))
    }

    /// Checked quarter split: the quarters must satisfy
    /// `x0 <= x1 <= x3` and `x0 <= x2 <= x3`.
    pub fn decompose4(&self) -> Result<[Self; 4]> {
        if self.n < 2 {
            return Err(Error::arity("decompose4", self.n(), 2, MAX_ARITY));
        }
        let q = self.split4();
        check_square(&q)?;
        Ok(q)
    }

    #[inline]
    pub fn join4(q: &[Self; 4]) -> Self {
        let m = q[0].n();
        debug_assert!(q.iter().all(|x| x.n() == m));
        let s = 1u32 << m;
        Self::from_raw(
            m + 2,
            q[0].bits | (q[1].bits << s) | (q[2].bits << (2 * s)) | (q[3].bits << (3 * s)),
        )
    }

    pub fn compose4(q: &[Self; 4]) -> Result<Self> {
        for x in &q[1..] {
            q[0].same_arity(x)?;
        }
        if q[0].n() + 2 > MAX_ARITY {
            return Err(Error::arity("compose4 input", q[0].n(), 0, MAX_ARITY - 2));
        }
        check_square(q)?;
        Ok(Self::join4(q))
    }

    /// Left-to-right binary string, position 0 first.
    pub fn to_binary_string(&self) -> String {
        (0..self.len())
            .map(|p| if self.get(p) { '1' } else { '0' })
            .collect()
    }

    /// `0x`-prefixed hexadecimal of the packed value.
    pub fn to_hex(&self) -> String {
        let digits = (self.len() + 3) / 4;
        format!("0x{:0width$x}", self.bits, width = digits)
    }

    /// Little-endian packed bytes: 8 for `n <= 6`, 16 for `n = 7`.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        if self.n() <= 6 {
            self.word().to_le_bytes().to_vec()
        } else {
            self.bits.to_le_bytes().to_vec()
        }
    }

    /// Size of [`to_le_bytes`](Self::to_le_bytes) for arity `n`.
    pub fn packed_size(n: usize) -> usize {
        if n <= 6 {
            8
        } else {
            16
        }
    }

    pub fn from_le_bytes(n: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != Self::packed_size(n) {
            return Err(Error::Format(format!(
                "expected {} bytes for an arity-{n} table, got {}",
                Self::packed_size(n),
                bytes.len()
            )));
        }
        let mut buf = [0u8; 16];
        buf[..bytes.len()].copy_from_slice(bytes);
        Self::new(n, u128::from_le_bytes(buf)).map_err(|e| Error::Format(e.to_string()))
    }
}

fn check_square(q: &[TruthTable; 4]) -> Result<()> {
    for (lo, hi) in [(0, 1), (1, 3), (0, 2), (2, 3)] {
        if !q[lo].leq_unchecked(&q[hi]) {
            return Err(Error::NotOrdered(q[lo].to_string(), q[hi].to_string()));
        }
    }
    Ok(())
}

impl PartialOrd for TruthTable {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order by arity, then by packed value. Not the lattice order.
impl Ord for TruthTable {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, self.bits).cmp(&(other.n, other.bits))
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_binary_string())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}: {})", self.n, self)
    }
}

/// Parses a binary string whose length `2^n` fixes the arity.
pub fn parse_tt(text: &str) -> Result<TruthTable> {
    let text = text.trim();
    let len = text.len();
    if len == 0 || !len.is_power_of_two() || len > 1 << MAX_ARITY {
        return Err(Error::Parse(format!(
            "truth table length {len} is not 2^n for 0 <= n <= {MAX_ARITY}"
        )));
    }
    let n = len.trailing_zeros() as usize;
    let mut bits = 0u128;
    for (p, c) in text.chars().enumerate() {
        match c {
            '0' => {}
            '1' => bits |= 1u128 << p,
            other => return Err(Error::Parse(format!("invalid character {other:?} in truth table"))),
        }
    }
    Ok(TruthTable::from_raw(n, bits))
}

/// Parses `0x`-prefixed hexadecimal of the packed value at a given arity.
pub fn parse_hex(text: &str, n: usize) -> Result<TruthTable> {
    let text = text.trim();
    let digits = text
        .strip_prefix("0x")
        .or_else(|| text.strip_prefix("0X"))
        .ok_or_else(|| Error::Parse(format!("hex truth table must start with 0x: {text:?}")))?;
    let digits = digits.replace('_', "");
    let bits = u128::from_str_radix(&digits, 16)
        .map_err(|e| Error::Parse(format!("bad hex truth table {text:?}: {e}")))?;
    TruthTable::new(n, bits)
}

/// Accepts either notation. Hex needs `arity`; for binary strings `arity`,
/// when given, must agree with the string length.
pub fn parse_with_arity(text: &str, arity: Option<usize>) -> Result<TruthTable> {
    let t = text.trim();
    if t.starts_with("0x") || t.starts_with("0X") {
        let n = arity.ok_or_else(|| Error::Parse("hex truth tables need an explicit arity".into()))?;
        return parse_hex(t, n);
    }
    let f = parse_tt(t)?;
    match arity {
        Some(n) if n != f.n() => Err(Error::ArityMismatch {
            left: f.n(),
            right: n,
        }),
        _ => Ok(f),
    }
}

pub fn format_tt(f: &TruthTable) -> String {
    f.to_binary_string()
}
