//! Access-redundancy protocols for linear computation with `{±1}` coefficients.
//!
//! Data `x ∈ ℝ^k` is stored as `y = Dᵀx` across `n` nodes. A protocol pairs the
//! encoder `D` with, for every `w ∈ {±1}^k`, a sparse combination `a` such that
//! `D·a = w`; then `wᵀx = aᵀy` reads at most `ℓ` nodes. This crate builds such
//! protocols (parity, covering-code and custom block constructions), checks them
//! exhaustively, evaluates the impossibility bounds on `(n/k, ℓ/k)`, and builds
//! approximate schemes where `‖w − D·a‖² ≤ εk`.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the command
//! line live in the `accessred` crate.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

mod error;
pub use error::{Error, Result};

pub mod approx;
pub mod bounds;
pub mod construct;
pub mod covering;
pub mod linalg;
pub mod math;
mod matrix;
mod protocol;
mod sign;
pub mod verify;

pub use matrix::Matrix;
pub use protocol::{Decoder, Protocol, RatePoint, SparseCombination};
pub use sign::{enumerate_sign_vectors, SignVector, SignVectors, MAX_ENUMERATION_LEN};

/// Default absolute tolerance for floating-point membership and reconstruction checks.
pub const DEFAULT_TOL: f64 = 1e-9;
