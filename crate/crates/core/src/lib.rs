//! Minimal free resolutions and invariants of semigroup rings obtained by
//! gluing numerical (and affine) semigroups.

pub mod affine;
pub mod arith;
pub mod betti;
pub mod complex;
pub mod error;
pub mod gluing;
pub mod invariants;
pub mod linalg;
pub mod oracle;

pub use arith::SemigroupGens;
pub use betti::{BettiTable, HilbertNumerator};
pub use error::{Error, Result};
pub use gluing::{Binomial, DecompTree, GluingSplit, Strategy};
pub use linalg::Field;
