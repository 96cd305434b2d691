//! Numerical laboratory for ε-hypercyclic operators that are not hypercyclic.
//!
//! The crate builds weighted backward shifts on the direct sum `⊕_Y X` of
//! canonical sequence spaces, chooses the block schedule adaptively, and runs
//! a constructive ε-hypercyclicity criterion that produces vectors together
//! with explicit approximation certificates. Everything here is `no_std`
//! (with `alloc`); file formats, timing and the command line live in the
//! companion `epshyp` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod construction;
pub mod criterion;
pub mod math;
pub mod shift;
pub mod space;
pub mod verify;
pub mod weights;

use alloc::string::String;

/// Index type for outer blocks, inner coordinates and orbit times.
///
/// Block schedules grow geometrically once the tail condition is enforced, so
/// 64 bits are not enough for a few dozen blocks.
pub type Index = u128;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("index {index} is outside the schedule horizon 1..={horizon}")]
    Horizon { index: Index, horizon: Index },
    #[error("non-finite value while evaluating {0}")]
    Overflow(&'static str),
    #[error("delta search for block {k} exceeded cap {cap}; worst residual {residual:e}")]
    DeltaCap { k: usize, cap: Index, residual: f64 },
    #[error("no admissible index for step {step}: {reason}")]
    NoAdmissible { step: usize, reason: String },
    #[error("invalid isomorphism: {0}")]
    Isomorphism(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub use space::{InnerVec, NormSpec, OuterVec};
pub use weights::{Params, Schedule, WeightDescriptor};
