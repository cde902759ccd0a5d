use super::{measure_epsilon, ApproxProtocol};
use crate::construct::BlockSpec;
use crate::{Decoder, Error, Protocol, Result};

/// `m` blocks of an exact block scheme with the last `⌊εm⌋` never stored.
///
/// The data still has `k = m·k0` coordinates but only `(m − ⌊εm⌋)·n0` nodes
/// are kept, and a discarded block decodes to `0`, costing `‖w_i‖² = k0`.
/// Hence `ε_bound = ⌊εm⌋/m ≤ ε` and the rate point scales by `1 − ⌊εm⌋/m`.
pub fn discard_blocks(spec: &BlockSpec, eps: f64, m: usize) -> Result<ApproxProtocol> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::contract(alloc::format!("eps must lie in (0, 1), got {eps}")));
    }
    if m == 0 {
        return Err(Error::contract("block count must be positive"));
    }
    // absorbs representation error in eps·m
    let dropped = libm::floor(eps * m as f64 * (1.0 + 1e-12)) as usize;
    let kept = m - dropped;
    let encoder = spec.matrix().block_diagonal(kept, dropped * spec.k0())?;
    let protocol = Protocol::new(
        encoder,
        kept * spec.ell0(),
        Decoder::Blocks {
            spec: spec.clone(),
            blocks: m,
            kept,
        },
    )?;
    let epsilon_measured = Some(measure_epsilon(&protocol)?);
    Ok(ApproxProtocol {
        protocol,
        epsilon_bound: dropped as f64 / m as f64,
        epsilon_measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::measure_epsilon_exhaustive;
    use crate::bounds::cor1_lambda_min;
    use crate::construct::{custom_block, shifted_diagonal_5x6};
    use crate::verify::verify_protocol;
    use crate::RatePoint;

    fn spec() -> BlockSpec {
        custom_block(shifted_diagonal_5x6(), 2).unwrap()
    }

    #[test]
    fn ten_blocks_drop_one() {
        let a = discard_blocks(&spec(), 0.1, 10).unwrap();
        let p = &a.protocol;
        assert_eq!((p.k(), p.n(), p.ell()), (50, 54, 18));
        let rp = p.rate_point().unwrap();
        assert!((rp.nu - 1.08).abs() < 1e-12 && (rp.lambda - 0.36).abs() < 1e-12);
        assert_eq!(a.epsilon_bound, 0.1);
        assert_eq!(a.epsilon_measured, Some(0.1));
        assert!(rp.lambda < cor1_lambda_min(rp.nu).unwrap());
    }

    #[test]
    fn nothing_dropped_is_exact() {
        let a = discard_blocks(&spec(), 0.05, 3).unwrap();
        assert_eq!(a.epsilon_bound, 0.0);
        assert_eq!(a.epsilon_measured, Some(0.0));
        assert!(verify_protocol(&a.protocol, 1e-9).unwrap().ok);
        assert_eq!(a.protocol.rate_point().unwrap(), RatePoint { nu: 1.2, lambda: 0.4 });
    }

    #[test]
    fn small_case_enumerated() {
        let a = discard_blocks(&spec(), 0.5, 2).unwrap();
        assert_eq!(a.protocol.n(), 6);
        assert_eq!(measure_epsilon_exhaustive(&a.protocol).unwrap(), 0.5);
        assert_eq!(a.epsilon_measured, Some(0.5));
    }

    #[test]
    fn floor_is_robust() {
        let a = discard_blocks(&spec(), 1.0 / 3.0, 12).unwrap();
        assert_eq!(a.epsilon_bound, 4.0 / 12.0);
        assert_eq!(a.protocol.n(), 48);
    }

    #[test]
    fn eps_out_of_range() {
        for eps in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(discard_blocks(&spec(), eps, 4).is_err());
        }
        assert!(discard_blocks(&spec(), 0.5, 0).is_err());
    }
}
