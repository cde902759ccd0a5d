//! ε-approximate protocols: `‖w − D·a_w‖² ≤ εk` for every `w` instead of
//! exact reconstruction.
//!
//! Since `|wᵀx − aᵀDᵀx| ≤ ‖w − D·a‖·‖x‖`, such a decoder returns `wᵀx` up to
//! `εk‖x‖²` squared error.

mod codes;
mod discard;
mod ksvd;
mod omp;

pub use codes::{approx_covering, approx_covering_block, approx_covering_codeonly, approx_codeonly_block};
pub use discard::discard_blocks;
pub use ksvd::{ksvd, KsvdConfig, KsvdInit, KsvdOutcome, StageObjective, MAX_KSVD_K};
pub use omp::omp;

use crate::{enumerate_sign_vectors, Decoder, Error, Protocol, Result, SignVector};

/// Largest `k` for [`measure_epsilon_exhaustive`].
pub const MAX_MEASURE_K: usize = 16;

/// A protocol whose decoder may reconstruct `w` only approximately.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxProtocol {
    pub protocol: Protocol,
    /// Guaranteed worst case of `‖w − D·a_w‖² / k`.
    pub epsilon_bound: f64,
    /// Observed worst case, when it was computed.
    pub epsilon_measured: Option<f64>,
}

impl ApproxProtocol {
    /// `m` independent copies of a single-block scheme. The per-coordinate
    /// error is unchanged, so the bound carries over.
    pub fn repeat(&self, m: usize) -> Result<ApproxProtocol> {
        let Decoder::Blocks { spec, blocks: 1, kept: 1 } = self.protocol.decoder() else {
            return Err(Error::contract("only single-block schemes can be repeated"));
        };
        let protocol = crate::construct::expand_blocks(spec, m)?;
        let epsilon_measured = Some(measure_epsilon(&protocol)?);
        Ok(ApproxProtocol {
            protocol,
            epsilon_bound: self.epsilon_bound,
            epsilon_measured,
        })
    }

    /// `epsilon_measured ≤ epsilon_bound + 1e-9`, or `true` if nothing was measured.
    pub fn within_bound(&self) -> bool {
        self.epsilon_measured.is_none_or(|e| e <= self.epsilon_bound + 1e-9)
    }
}

/// `‖w − D·a_w‖²` for one sign vector.
pub fn residual_sq(p: &Protocol, w: &SignVector) -> f64 {
    p.reconstruct(w)
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let d = w.value(i) - x;
            d * d
        })
        .sum()
}

/// `max_w ‖w − D·a_w‖² / k`.
///
/// Block decoders are measured one block at a time: the squared residual is a
/// sum over blocks, so its maximum is the sum of per-block maxima (a discarded
/// block always contributes `k0`). Other decoders are enumerated in full.
pub fn measure_epsilon(p: &Protocol) -> Result<f64> {
    match p.decoder() {
        Decoder::Blocks { spec, blocks, kept } => {
            let k0 = spec.k0();
            let mut worst_block = 0.0f64;
            for w in enumerate_sign_vectors(k0)? {
                let back = spec.matrix().mul_sparse(spec.decode(&w));
                let r: f64 = back
                    .iter()
                    .enumerate()
                    .map(|(i, x)| (w.value(i) - x) * (w.value(i) - x))
                    .sum();
                worst_block = worst_block.max(r);
            }
            let total = *kept as f64 * worst_block + ((blocks - kept) * k0) as f64;
            Ok(total / p.k() as f64)
        }
        Decoder::Table(_) => measure_epsilon_exhaustive(p),
    }
}

/// `max_w ‖w − D·a_w‖² / k` over all `2^k` sign vectors, using the full encoder.
pub fn measure_epsilon_exhaustive(p: &Protocol) -> Result<f64> {
    if p.k() > MAX_MEASURE_K {
        return Err(Error::budget("epsilon measurement k", MAX_MEASURE_K as u64, p.k() as u64));
    }
    let worst = enumerate_sign_vectors(p.k())?
        .map(|w| residual_sq(p, &w))
        .fold(0.0, f64::max);
    Ok(worst / p.k() as f64)
}
