//! Verification spread over a rayon pool. Results are gathered in bitmask
//! order before reduction, so reports do not depend on the thread count.

use accessred_core::construct::expand_blocks;
use accessred_core::verify::{check_vector, summarize, VerificationReport, MAX_VERIFY_K};
use accessred_core::{Decoder, Protocol, SignVector};
use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every `w ∈ {±1}^k` against the full encoder.
    Exhaustive,
    /// Every `w ∈ {±1}^k0` against the block matrix; the encoder was checked
    /// to be its block-diagonal expansion when loaded.
    PerBlock,
}

pub fn verify_exhaustive(p: &Protocol, tol: f64) -> Result<VerificationReport> {
    let k = p.k();
    if k > MAX_VERIFY_K {
        bail!("exhaustive verification is limited to k <= {MAX_VERIFY_K}, got k = {k}");
    }
    let results: Vec<(SignVector, usize, f64)> = (0..1u64 << k)
        .into_par_iter()
        .map(|bits| {
            let w = SignVector::new(k, bits).expect("bitmask below 2^k");
            let (access, resid) = check_vector(p, &w);
            (w, access, resid)
        })
        .collect();
    Ok(summarize(p, tol, results))
}

/// Exhaustive when `k` allows it, otherwise one block of a block decoder.
pub fn verify(p: &Protocol, tol: f64) -> Result<(Mode, VerificationReport)> {
    if p.k() <= MAX_VERIFY_K {
        return Ok((Mode::Exhaustive, verify_exhaustive(p, tol)?));
    }
    match p.decoder() {
        Decoder::Blocks { spec, blocks, kept } => {
            let one = expand_blocks(spec, 1)?;
            let mut report = verify_exhaustive(&one, tol)?;
            // access adds up over blocks; the worst w repeats the worst block
            report.max_access *= kept;
            if report.ok && report.max_access > p.ell() {
                let k0 = spec.k0() as u32;
                let worst = (0..1u64 << k0)
                    .find(|&b| spec.decode(&SignVector::new(spec.k0(), b).expect("k0 bits")).access() * kept == report.max_access)
                    .expect("maximum is attained");
                let bits = (0..*kept as u32).fold(0u64, |acc, i| acc | worst << (i * k0));
                report.ok = false;
                report.witness = Some(SignVector::new(p.k(), bits)?);
            }
            if kept < blocks {
                // unstored blocks decode to zero, so every w is off by 1 there
                report.ok = false;
                report.max_residual = report.max_residual.max(1.0);
                report.witness = Some(SignVector::new(p.k(), 0)?);
            }
            Ok((Mode::PerBlock, report))
        }
        Decoder::Table(_) => bail!("k = {} is too large to verify a decoder table", p.k()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use accessred_core::construct::{custom_block, shifted_diagonal_5x6, trivial_protocol};
    use accessred_core::verify::verify_protocol;

    #[test]
    fn agrees_with_sequential() {
        for k in 1..=8 {
            let p = trivial_protocol(k).unwrap();
            assert_eq!(verify_exhaustive(&p, 1e-9).unwrap(), verify_protocol(&p, 1e-9).unwrap());
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let p = trivial_protocol(10).unwrap();
        let run = |n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| verify_exhaustive(&p, 1e-9).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn large_block_protocols_check_one_block() {
        let spec = custom_block(shifted_diagonal_5x6(), 2).unwrap();
        let p = expand_blocks(&spec, 10).unwrap();
        let (mode, report) = verify(&p, 1e-9).unwrap();
        assert_eq!(mode, Mode::PerBlock);
        assert!(report.ok);
        assert_eq!(report.checked, 32);
        assert_eq!(report.max_access, 20);

        let tight = Protocol::new(p.encoder().clone(), 19, p.decoder().clone()).unwrap();
        let (_, report) = verify(&tight, 1e-9).unwrap();
        assert!(!report.ok);
        let w = report.witness.unwrap();
        assert_eq!(tight.combination(&w).access(), 20);
    }

    #[test]
    fn discarded_blocks_fail() {
        let spec = custom_block(shifted_diagonal_5x6(), 2).unwrap();
        let p = accessred_core::approx::discard_blocks(&spec, 0.1, 10).unwrap().protocol;
        let (mode, report) = verify(&p, 1e-9).unwrap();
        assert_eq!(mode, Mode::PerBlock);
        assert!(!report.ok);
        assert_eq!(report.witness.unwrap().bits(), 0);
    }
}
