//! Exhaustive checks over `{±1}^k`.
//!
//! These are the brute-force oracles the constructions are tested against.
//! [`verify_protocol`] always works from the full encoder matrix, never from
//! block structure, so block expansion is checked end to end.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::{index_subsets, search_work};
use crate::linalg::{count_pm1_in_span, span_contains};
use crate::{enumerate_sign_vectors, Error, Matrix, Protocol, Result, SignVector};

/// Largest `k` checked exhaustively.
pub const MAX_VERIFY_K: usize = 20;
/// Cap on span tests in [`min_access_for_m`].
pub const MAX_MIN_ACCESS_WORK: u128 = 50_000_000;
/// Largest `k` for [`subspace_cap_audit`].
pub const MAX_AUDIT_K: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub ok: bool,
    /// Sign vectors examined (`2^k` for a completed check).
    pub checked: u64,
    pub max_access: usize,
    /// Largest `‖D·a_w − w‖∞` seen.
    pub max_residual: f64,
    /// First failing `w` in bitmask order.
    pub witness: Option<SignVector>,
}

/// Access count and `‖D·a_w − w‖∞` for one sign vector.
pub fn check_vector(p: &Protocol, w: &SignVector) -> (usize, f64) {
    let a = p.combination(w);
    let back = p.encoder().mul_sparse(&a);
    let resid = back
        .iter()
        .enumerate()
        .map(|(i, x)| (x - w.value(i)).abs())
        .fold(0.0, f64::max);
    (a.access(), resid)
}

/// Folds per-vector results, taken in bitmask order, into a report.
pub fn summarize(
    p: &Protocol,
    tol: f64,
    results: impl IntoIterator<Item = (SignVector, usize, f64)>,
) -> VerificationReport {
    let mut report = VerificationReport {
        ok: true,
        checked: 0,
        max_access: 0,
        max_residual: 0.0,
        witness: None,
    };
    for (w, access, resid) in results {
        report.checked += 1;
        report.max_access = report.max_access.max(access);
        report.max_residual = report.max_residual.max(resid);
        if (access > p.ell() || !(resid <= tol)) && report.witness.is_none() {
            report.witness = Some(w);
        }
    }
    report.ok = report.witness.is_none() && report.checked == 1u64 << p.k();
    report
}

/// Checks `D·a_w = w` (within `tol`) and `|supp a_w| ≤ ℓ` for every `w`.
///
/// Failures are reported, not returned as errors; only oversize `k` errors.
pub fn verify_protocol(p: &Protocol, tol: f64) -> Result<VerificationReport> {
    if p.k() > MAX_VERIFY_K {
        return Err(Error::budget("protocol verification k", MAX_VERIFY_K as u64, p.k() as u64));
    }
    let results = enumerate_sign_vectors(p.k())?.map(|w| {
        let (a, r) = check_vector(p, &w);
        (w, a, r)
    });
    Ok(summarize(p, tol, results))
}

/// Smallest `ℓ0` such that every `w ∈ {±1}^k0` lies in the span of some
/// `ℓ0` columns of `m`.
///
/// Errors with [`Error::NotCovered`] if some `w` is outside the full column span.
pub fn min_access_for_m(m: &Matrix) -> Result<usize> {
    let (k0, n0) = (m.rows(), m.cols());
    let work = search_work(k0, n0, n0);
    if k0 > MAX_VERIFY_K || work > MAX_MIN_ACCESS_WORK {
        return Err(Error::budget(
            "minimum access search",
            MAX_MIN_ACCESS_WORK as u64,
            u64::try_from(work).unwrap_or(u64::MAX),
        ));
    }
    let mut worst = 0;
    for w in enumerate_sign_vectors(k0)? {
        let mut need = None;
        'sizes: for s in 1..=n0 {
            for support in index_subsets(n0, s) {
                if span_contains(&m.select_columns(&support)?, &w, crate::DEFAULT_TOL)?.is_some() {
                    need = Some(s);
                    break 'sizes;
                }
            }
        }
        match need {
            Some(s) => worst = worst.max(s),
            None => return Err(Error::NotCovered { witness: w, ell: n0 }),
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapAudit {
    pub trials: usize,
    /// Largest `#{±1 vectors in span}` seen.
    pub max_count: u64,
    /// Trials whose count exceeded `2^ℓ`.
    pub violations: usize,
    /// Per-trial counts in trial order.
    pub counts: Vec<u64>,
}

/// Counts `±1` vectors in the span of `trials` random `k x ℓ` integer matrices
/// (entries uniform in `−3..=3`, seeded) and compares against `2^ℓ`.
pub fn subspace_cap_audit(k: usize, ell: usize, trials: usize, seed: u64) -> Result<CapAudit> {
    if k == 0 || k > MAX_AUDIT_K {
        return Err(Error::budget("subspace cap audit k", MAX_AUDIT_K as u64, k as u64));
    }
    if ell == 0 || ell >= 64 {
        return Err(Error::contract("audit needs 1 <= ell < 64"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(trials);
    for _ in 0..trials {
        let data = (0..k * ell).map(|_| rng.gen_range(-3i32..=3) as f64).collect();
        counts.push(count_pm1_in_span(&Matrix::new(k, ell, data)?)?);
    }
    let cap = 1u64 << ell;
    Ok(CapAudit {
        trials,
        max_count: counts.iter().copied().max().unwrap_or(0),
        violations: counts.iter().filter(|&&c| c > cap).count(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{custom_block, expand_blocks, shifted_diagonal_5x6, trivial_protocol};
    use crate::{Decoder, SparseCombination};

    #[test]
    fn trivial_four() {
        let r = verify_protocol(&trivial_protocol(4).unwrap(), 1e-9).unwrap();
        assert!(r.ok);
        assert_eq!(r.checked, 16);
        assert_eq!(r.max_access, 3);
    }

    #[test]
    fn shifted_diagonal_exact() {
        let spec = custom_block(shifted_diagonal_5x6(), 2).unwrap();
        let r = verify_protocol(&expand_blocks(&spec, 1).unwrap(), 1e-9).unwrap();
        assert!(r.ok);
        assert_eq!(r.max_access, 2);
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn lowered_ell_fails_with_witness() {
        let p = trivial_protocol(4).unwrap();
        let Decoder::Table(table) = p.decoder().clone() else { unreachable!() };
        let tight = Protocol::new(p.encoder().clone(), 2, Decoder::Table(table)).unwrap();
        let r = verify_protocol(&tight, 1e-9).unwrap();
        assert!(!r.ok);
        let w = r.witness.unwrap();
        assert_eq!(tight.combination(&w).access(), 3);
    }

    #[test]
    fn perturbed_coefficient_fails() {
        let p = trivial_protocol(3).unwrap();
        let Decoder::Table(mut table) = p.decoder().clone() else { unreachable!() };
        let a = &table[5];
        let mut coeffs = a.coeffs().to_vec();
        coeffs[0] += 1e-3;
        table[5] = SparseCombination::from_parts(a.support(), &coeffs).unwrap();
        let bad = Protocol::new(p.encoder().clone(), p.ell(), Decoder::Table(table)).unwrap();
        let r = verify_protocol(&bad, 1e-9).unwrap();
        assert!(!r.ok);
        assert_eq!(r.witness.unwrap().bits(), 5);
        assert!(r.max_residual > 1e-4);
    }

    #[test]
    fn min_access_examples() {
        assert_eq!(min_access_for_m(&shifted_diagonal_5x6()).unwrap(), 2);
        assert_eq!(min_access_for_m(&Matrix::identity(5).unwrap()).unwrap(), 5);
        let parity = Matrix::identity(3)
            .unwrap()
            .hconcat(&Matrix::new(3, 1, alloc::vec![1.0; 3]).unwrap())
            .unwrap();
        assert_eq!(min_access_for_m(&parity).unwrap(), 2);
    }

    #[test]
    fn min_access_not_spanning() {
        let m = Matrix::from_columns(2, &[[1.0, 0.0]]).unwrap();
        assert!(matches!(min_access_for_m(&m), Err(Error::NotCovered { .. })));
    }

    #[test]
    fn min_access_agrees_with_custom_block() {
        let m = shifted_diagonal_5x6();
        let need = min_access_for_m(&m).unwrap();
        for ell0 in 1..=4 {
            assert_eq!(custom_block(m.clone(), ell0).is_ok(), need <= ell0);
        }
        let parity = trivial_protocol(4).unwrap().encoder().clone();
        let need = min_access_for_m(&parity).unwrap();
        for ell0 in 1..=5 {
            assert_eq!(custom_block(parity.clone(), ell0).is_ok(), need <= ell0);
        }
    }

    #[test]
    fn min_access_monotone_under_new_columns() {
        let mut m = Matrix::identity(4).unwrap();
        let mut last = min_access_for_m(&m).unwrap();
        for extra in [[1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 1.0, -1.0], [1.0, 1.0, -1.0, -1.0]] {
            m = m.hconcat(&Matrix::from_columns(4, &[extra]).unwrap()).unwrap();
            let now = min_access_for_m(&m).unwrap();
            assert!(now <= last);
            last = now;
        }
    }

    #[test]
    fn audit_examples() {
        let full = Matrix::identity(3).unwrap();
        assert_eq!(count_pm1_in_span(&full).unwrap(), 8);
        let a = subspace_cap_audit(8, 1, 50, 3).unwrap();
        assert!(a.max_count <= 2);
        let a = subspace_cap_audit(10, 4, 200, 1).unwrap();
        assert_eq!(a.violations, 0);
        assert!(a.max_count <= 16);
    }
}
