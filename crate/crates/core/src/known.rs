//! Published Dedekind numbers and class counts used as ground truth.

/// `d_n` for n = 0..=8.
pub const DEDEKIND: [u128; 9] = [
    2,
    3,
    6,
    20,
    168,
    7581,
    7828354,
    2414682040998,
    56130437228687557907788,
];

/// Number of inequivalent monotone functions `r_n` for n = 0..=7.
pub const CLASSES: [u64; 8] = [2, 3, 5, 10, 30, 210, 16353, 490013048];

pub fn dedekind(n: usize) -> Option<u128> {
    DEDEKIND.get(n).copied()
}

pub fn classes(n: usize) -> Option<u64> {
    CLASSES.get(n).copied()
}
