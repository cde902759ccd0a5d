//! Reduced-query covering-code schemes.
//!
//! Both schemes store only `±`-representatives of the codewords, so a code is
//! first closed under negation; its covering radius can only drop, and is
//! then at most `k0/2`.

use alloc::vec::Vec;

use super::{measure_epsilon, ApproxProtocol};
use crate::construct::{expand_blocks, BlockSpec, MAX_COVERING_K0};
use crate::covering::{antipodal_half, AntipodalHalf, CoveringCode};
use crate::{enumerate_sign_vectors, Error, Matrix, Result, SignVector, SparseCombination};

fn closed(code: &CoveringCode) -> Result<CoveringCode> {
    if code.k0() > MAX_COVERING_K0 {
        return Err(Error::budget("covering block k0", MAX_COVERING_K0 as u64, code.k0() as u64));
    }
    if code.is_complement_closed() {
        return Ok(code.clone());
    }
    let words = code.words().iter().flat_map(|c| [*c, -*c]).collect();
    CoveringCode::new(code.k0(), words)
}

fn half_columns(k0: usize, half: &AntipodalHalf) -> Result<Matrix> {
    let cols: Vec<Vec<f64>> = half.words().iter().map(SignVector::to_f64).collect();
    Matrix::from_columns(k0, &cols)
}

fn nearest_in_half(code: &CoveringCode, half: &AntipodalHalf, w: &SignVector) -> Result<(SignVector, usize, f64)> {
    let (c, _) = code.nearest(w);
    let (idx, sigma) = half
        .locate(&c)
        .ok_or_else(|| Error::contract("nearest codeword missing from antipodal half"))?;
    Ok((c, idx, sigma))
}

fn single_block(spec: BlockSpec, epsilon_bound: f64) -> Result<ApproxProtocol> {
    let protocol = expand_blocks(&spec, 1)?;
    let epsilon_measured = Some(measure_epsilon(&protocol)?);
    Ok(ApproxProtocol {
        protocol,
        epsilon_bound,
        epsilon_measured,
    })
}

/// Block for the covering scheme that corrects all but `b` of the differing
/// positions, with its error bound.
///
/// `M = (I_k0 | B)`. For `w` with nearest codeword `c = σ·h`, the decoder reads
/// `h` with coefficient `σα` and the first `r − b` differing systematic
/// positions `j` with coefficient `(α+1)·w_j`, where
/// `α = (k0−r−b)/(k0−r+b)`. Corrected positions are reproduced exactly; the
/// rest contribute `(α−1)²` or `(α+1)²`.
pub fn approx_covering_block(code: &CoveringCode, b: usize) -> Result<(BlockSpec, f64)> {
    let code = closed(code)?;
    let (k0, r) = (code.k0(), code.radius());
    if r == 0 || b >= r {
        return Err(Error::contract(alloc::format!(
            "need radius >= 1 and b <= r - 1, got r = {r}, b = {b}"
        )));
    }
    let half = antipodal_half(&code);
    let matrix = Matrix::identity(k0)?.hconcat(&half_columns(k0, &half)?)?;
    let s = (k0 - r + b) as f64;
    let alpha = (k0 - r) as f64 / s - b as f64 / s;
    let beta = alpha + 1.0;
    let table = enumerate_sign_vectors(k0)?
        .map(|w| {
            let (c, idx, sigma) = nearest_in_half(&code, &half, &w)?;
            let mut pairs = alloc::vec![(k0 + idx, sigma * alpha)];
            let differing = (0..k0).filter(|&j| w.is_plus(j) != c.is_plus(j));
            pairs.extend(differing.take(r - b).map(|j| (j, beta * w.value(j))));
            SparseCombination::new(pairs)
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = 4.0 * (b * (k0 - r)) as f64 / (k0 as f64 * s);
    Ok((BlockSpec::new(matrix, r - b + 1, table)?, bound))
}

/// Single-block covering scheme with `b` uncorrected positions; see
/// [`approx_covering_block`]. Rate point `((k0+ĉ)/k0, (r−b+1)/k0)`.
pub fn approx_covering(code: &CoveringCode, b: usize) -> Result<ApproxProtocol> {
    let (spec, bound) = approx_covering_block(code, b)?;
    single_block(spec, bound)
}

/// Block storing only the antipodal half `B`: each `w` reads its nearest
/// codeword `σ·h` with coefficient `σα`, `α = (k0 − 2r)/k0`.
pub fn approx_codeonly_block(code: &CoveringCode) -> Result<(BlockSpec, f64)> {
    let code = closed(code)?;
    let (k0, r) = (code.k0(), code.radius());
    let half = antipodal_half(&code);
    let matrix = half_columns(k0, &half)?;
    let alpha = (k0 as f64 - 2.0 * r as f64) / k0 as f64;
    let table = enumerate_sign_vectors(k0)?
        .map(|w| {
            let (_, idx, sigma) = nearest_in_half(&code, &half, &w)?;
            SparseCombination::new(alloc::vec![(idx, sigma * alpha)])
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = 4.0 * (r * (k0 - r)) as f64 / (k0 * k0) as f64;
    Ok((BlockSpec::new(matrix, 1, table)?, bound))
}

/// Single-block code-only scheme: rate point `(ĉ/k0, 1/k0)`,
/// `ε ≤ 4r(k0−r)/k0²`.
pub fn approx_covering_codeonly(code: &CoveringCode) -> Result<ApproxProtocol> {
    let (spec, bound) = approx_codeonly_block(code)?;
    single_block(spec, bound)
}
