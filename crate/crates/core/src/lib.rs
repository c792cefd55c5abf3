//! Interval sizes in the lattice `D_n` of monotone Boolean functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`truth_table`] packs a function of up to seven variables into 128 bits
//!   and provides the order, lattice operations and the split/concatenate
//!   maps `D_{n+1} = D_n^{B}` and `D_{n+2} = D_n^{B^2}`.
//! * [`poset`] enumerates `D_n` (n <= 6) as a sorted array that doubles as the
//!   coordinate system for matrices.
//! * [`matrix`] builds the incidence matrix of `D_n` and squares it into the
//!   table of all interval sizes `#[x, y]`.
//! * [`intervals`] counts intervals of `D_{n+2}` from that table.
//! * [`symmetry`] handles the action of variable permutations, canonical
//!   representatives and orbit sizes.
//! * [`sweep`], [`dedekind`] and [`verify`] drive whole computations.

pub mod codec;
pub mod dedekind;
mod error;
pub mod intervals;
pub mod known;
pub mod matrix;
pub mod poset;
pub mod sweep;
pub mod symmetry;
pub mod truth_table;
pub mod verify;
pub mod wide;

pub use error::{Error, Result};
pub use intervals::{interval_size_alg2, oracle_interval_size, upset_size_alg1};
pub use matrix::{IncidenceMatrix, IntervalMatrix};
pub use poset::PosetLevel;
pub use symmetry::{OrbitRecord, PermTable, Permutation};
pub use truth_table::TruthTable;
pub use wide::WideAccumulator;
