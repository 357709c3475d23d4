//! Exact computations in the κ-free strata algebra of the moduli spaces of
//! stable curves: Pixton-style weighting sums, topological recursion
//! relations, and ψ-class intersection numbers.

#![no_std]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod exact_arith;
pub mod identities;
pub mod oracle;
pub mod pixton;
pub mod stable_graphs;
pub mod strata;
pub mod trr;
pub mod witten;

pub use engine::Engine;
pub use error::{Error, Result};
pub use exact_arith::Rational;
