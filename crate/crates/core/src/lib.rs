//! Exact moment–cumulant machinery and universal cumulant bounds.
//!
//! Every bound here has the shape `|κ_n(X)| ≤ C_n · M_n(X)`, where `C_n` is the
//! total `(|π| − 1)!` mass over a restricted family of set partitions of
//! `{1, …, n}` and `M_n` is an `n`-th absolute moment:
//!
//! | family                          | coefficient | functional            | rate ρ        |
//! |---------------------------------|-------------|-----------------------|---------------|
//! | [`PartitionClass::All`]         | `C_raw`     | `E|X|^n`              | `ln 2`        |
//! | [`PartitionClass::NoSingletons`]| `C_cen`     | `E|X − EX|^n`         | `e^ρ = 2 + ρ` |
//! | [`PartitionClass::EvenBlocks`]  | `C_sym`     | `E|X|^n`, symmetric X | `arcosh 2`    |
//!
//! Counting and transforms are done in exact big-integer / big-rational
//! arithmetic; floating point only appears where a functional is irrational
//! (for example odd absolute moments of a Gaussian) or in asymptotic
//! approximants.

pub mod asymptotics;
pub mod bounds;
pub mod combinatorics;
pub mod distributions;
mod error;
pub mod numeric;
pub mod series;
pub mod tail;
pub mod transforms;

pub use combinatorics::{CoefficientTable, PartitionClass, SetPartition};
pub use error::{Error, Result};
pub use transforms::{CumulantSequence, MixedMomentTable, MomentSequence, MultiIndex, Scalar};

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
