use std::fmt;
use std::iter::Sum;
use std::ops::AddAssign;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact unsigned total with 128-bit range. `d_8` is about `5.6e22`, well
/// inside `2^128`; overflow is treated as a bug and panics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WideAccumulator(u128);

impl WideAccumulator {
    pub const ZERO: Self = WideAccumulator(0);

    pub fn new(v: u128) -> Self {
        WideAccumulator(v)
    }

    #[inline]
    pub fn add(&mut self, v: u128) {
        self.0 = self
            .0
            .checked_add(v)
            .expect("wide accumulator overflowed 128 bits");
    }

    #[inline]
    pub fn add_product(&mut self, a: u64, b: u64) {
        self.add(a as u128 * b as u128);
    }

    pub fn merge(&mut self, other: Self) {
        self.add(other.0);
    }

    pub fn value(&self) -> u128 {
        self.0
    }
}

impl AddAssign<u128> for WideAccumulator {
    fn add_assign(&mut self, rhs: u128) {
        self.add(rhs);
    }
}

impl AddAssign for WideAccumulator {
    fn add_assign(&mut self, rhs: Self) {
        self.merge(rhs);
    }
}

impl Sum for WideAccumulator {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |mut a, b| {
            a += b;
            a
        })
    }
}

impl From<u128> for WideAccumulator {
    fn from(v: u128) -> Self {
        WideAccumulator(v)
    }
}

impl fmt::Display for WideAccumulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for WideAccumulator {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(WideAccumulator)
    }
}

// Decimal strings keep JSON readers that stop at 2^53 honest.
impl Serialize for WideAccumulator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for WideAccumulator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holds_d8_exactly() {
        let mut acc = WideAccumulator::ZERO;
        acc.add(u64::MAX as u128);
        acc.add_product(u64::MAX, 3);
        assert_eq!(acc.value(), 4 * u64::MAX as u128);
        let d8: WideAccumulator = "56130437228687557907788".parse().unwrap();
        assert_eq!(d8.to_string(), "56130437228687557907788");
        let json = serde_json::to_string(&d8).unwrap();
        assert_eq!(json, "\"56130437228687557907788\"");
        assert_eq!(serde_json::from_str::<WideAccumulator>(&json).unwrap(), d8);
    }

    #[test]
    #[should_panic(expected = "overflowed")]
    fn overflow_panics() {
        let mut acc = WideAccumulator::new(u128::MAX);
        acc.add(1);
    }
}
