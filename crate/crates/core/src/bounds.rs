//! Impossibility bounds on `(k, n, ℓ)` and on rate points `(ν, λ)`.
//!
//! Binomials enter through [`crate::math::log2_binomial`]. Every inequality is
//! compared with [`SLACK`] so that exact equalities (the corner points of the
//! block bound) classify as admissible.

use alloc::string::String;
use alloc::vec::Vec;

use crate::math::{binary_entropy, inverse_binary_entropy, ln_binomial, log2_binomial};
use crate::{Error, RatePoint, Result};

/// Relative slack for `lhs >= rhs` comparisons.
pub const SLACK: f64 = 1e-9;

/// Bisection tolerance for curve inversions.
pub const BISECTION_TOL: f64 = 1e-12;

#[inline]
fn at_least(lhs: f64, rhs: f64) -> bool {
    lhs + SLACK * rhs.abs().max(1.0) >= rhs
}

/// Union bound over `ℓ`-subsets: `C(n,ℓ)·2^ℓ ≥ 2^k`.
pub fn thm1_admissible(k: usize, n: usize, ell: usize) -> bool {
    if ell > n {
        return false;
    }
    at_least(log2_binomial(n as u64, ell as u64) + ell as f64, k as f64)
}

/// `log2` of `[1 + ln C(t,ℓ)] · C(n,ℓ)/C(t,ℓ) · 2^t`.
pub fn thm2_log2_rhs(n: usize, ell: usize, t: usize) -> f64 {
    let (n, ell, t) = (n as u64, ell as u64, t as u64);
    libm::log2(1.0 + ln_binomial(t, ell)) + log2_binomial(n, ell) - log2_binomial(t, ell) + t as f64
}

/// Whether `2^k ≤ [1 + ln C(t,ℓ)] · C(n,ℓ)/C(t,ℓ) · 2^t` at one `t`.
pub fn thm2_admissible_at(k: usize, n: usize, ell: usize, t: usize) -> bool {
    ell <= t && t <= n && at_least(thm2_log2_rhs(n, ell, t), k as f64)
}

/// Covering-design bound: admissible iff the inequality holds for every
/// `t ∈ {ℓ, …, n}`. Also returns the `t` with the smallest right-hand side
/// (lowest `t` on ties). At `t = ℓ` this is exactly [`thm1_admissible`].
pub fn thm2_admissible(k: usize, n: usize, ell: usize) -> (bool, usize) {
    if ell > n {
        return (false, ell);
    }
    let mut best = (f64::INFINITY, ell);
    for t in ell..=n {
        let v = thm2_log2_rhs(n, ell, t);
        if v < best.0 {
            best = (v, t);
        }
    }
    (at_least(best.0, k as f64), best.1)
}

/// `ν·H(λ/ν) − r·λ·H(1/r) + r·λ`, the per-`k` exponent of the covering-design
/// bound with `t ≈ rℓ`.
pub fn asymptotic_lhs(nu: f64, lambda: f64, r: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= nu && r >= 1.0 && nu.is_finite()) {
        return Err(Error::contract(alloc::format!(
            "asymptotic bound needs 0 < λ <= ν and r >= 1, got ν={nu}, λ={lambda}, r={r}"
        )));
    }
    Ok(nu * binary_entropy(lambda / nu) - r * lambda * binary_entropy(1.0 / r) + r * lambda)
}

/// `r·(1 − H(1/r))`, the coefficient of `λ` that the choice of `r` controls.
pub fn r_penalty(r: f64) -> f64 {
    r * (1.0 - binary_entropy(1.0 / r))
}

/// Smallest `λ ∈ (0, ν/2]` with `H(λ/ν) ≥ 1/ν`.
pub fn cor1_lambda_min(nu: f64) -> Result<f64> {
    if !(nu >= 1.0) || !nu.is_finite() {
        return Err(Error::contract(alloc::format!("cor1 needs ν >= 1, got {nu}")));
    }
    Ok(nu * inverse_binary_entropy(1.0 / nu, BISECTION_TOL / nu))
}

/// Smallest `λ ∈ (0, ν/2]` with `ν·H(λ/ν) + λ ≥ 1`: the union bound in the
/// limit `k → ∞`.
pub fn thm1_lambda_min(nu: f64) -> Result<f64> {
    if !(nu >= 1.0) || !nu.is_finite() {
        return Err(Error::contract(alloc::format!("thm1 curve needs ν >= 1, got {nu}")));
    }
    let f = |lambda: f64| nu * binary_entropy(lambda / nu) + lambda;
    let (mut lo, mut hi) = (0.0f64, nu / 2.0);
    if f(hi) < 1.0 {
        return Ok(hi);
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `ℓ` with [`thm2_admissible`]`(k, n, ℓ)` true, or `None`.
pub fn thm2_min_ell(k: usize, n: usize) -> Option<usize> {
    (0..=n).find(|&ell| thm2_admissible(k, n, ell).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockVerdict {
    Admissible,
    Inadmissible,
    /// `2ℓ0 > n0`: the block bound says nothing here.
    HypothesisNotMet,
}

impl BlockVerdict {
    /// `true` unless the bound rules the parameters out.
    pub fn allows(self) -> bool {
        self != BlockVerdict::Inadmissible
    }
}

/// `2ℓ0 + log2 C(n0,ℓ0) − log2 C(2ℓ0,ℓ0)`.
pub fn block_bound_lhs(n0: usize, ell0: usize) -> f64 {
    let (n0, ell0) = (n0 as u64, ell0 as u64);
    2.0 * ell0 as f64 + log2_binomial(n0, ell0) - log2_binomial(2 * ell0, ell0)
}

/// Block-construction bound `2ℓ0 + log2 C(n0,ℓ0) − log2 C(2ℓ0,ℓ0) ≥ k0`,
/// which only applies when `2ℓ0 ≤ n0`.
pub fn block_bound_admissible(k0: usize, n0: usize, ell0: usize) -> BlockVerdict {
    if 2 * ell0 > n0 {
        return BlockVerdict::HypothesisNotMet;
    }
    if at_least(block_bound_lhs(n0, ell0), k0 as f64) {
        BlockVerdict::Admissible
    } else {
        BlockVerdict::Inadmissible
    }
}

/// A labelled curve of rate points, sorted by `ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub label: String,
    pub points: Vec<RatePoint>,
}

impl BoundCurve {
    pub fn new(label: impl Into<String>, mut points: Vec<RatePoint>) -> Self {
        points.sort_by(|a, b| a.nu.total_cmp(&b.nu).then(a.lambda.total_cmp(&b.lambda)));
        BoundCurve {
            label: label.into(),
            points,
        }
    }
}

/// For each `ℓ0 ∈ 1..=⌊k0/2⌋`, the smallest `n0 ≤ n0_max` (with `2ℓ0 ≤ n0`)
/// passing the block bound, as the point `(n0/k0, ℓ0/k0)`.
pub fn block_bound_curve(k0: usize, n0_max: usize) -> BoundCurve {
    let mut points = Vec::new();
    for ell0 in 1..=k0 / 2 {
        let hit = (2 * ell0..=n0_max)
            .find(|&n0| block_bound_admissible(k0, n0, ell0) == BlockVerdict::Admissible);
        if let Some(n0) = hit {
            points.push(RatePoint {
                nu: n0 as f64 / k0 as f64,
                lambda: ell0 as f64 / k0 as f64,
            });
        }
    }
    BoundCurve::new(alloc::format!("block_k0_{k0}"), points)
}

/// Evaluates `lambda_of(ν)` on each grid value.
pub fn sample_curve(
    label: &str,
    grid: &[f64],
    lambda_of: impl Fn(f64) -> Result<f64>,
) -> Result<BoundCurve> {
    let points = grid
        .iter()
        .map(|&nu| Ok(RatePoint { nu, lambda: lambda_of(nu)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve::new(label, points))
}

pub fn cor1_curve(grid: &[f64]) -> Result<BoundCurve> {
    sample_curve("cor1", grid, cor1_lambda_min)
}

pub fn thm1_curve(grid: &[f64]) -> Result<BoundCurve> {
    sample_curve("thm1", grid, thm1_lambda_min)
}

/// The covering-design bound at finite `k`: for each `ν`, `n = round(νk)` and
/// `λ = ℓ_min/k` with `ℓ_min` the smallest admissible access.
pub fn thm2_curve(grid: &[f64], k: usize) -> Result<BoundCurve> {
    sample_curve("thm2", grid, |nu| {
        let n = libm::round(nu * k as f64) as usize;
        thm2_min_ell(k, n)
            .map(|ell| ell as f64 / k as f64)
            .ok_or_else(|| Error::contract(alloc::format!("no admissible ℓ for k={k}, n={n}")))
    })
}

/// `count` evenly spaced values `min, min+step, …` with `count = round((max−min)/step) + 1`.
pub fn grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(max >= min) || !min.is_finite() || !max.is_finite() {
        return Err(Error::contract(alloc::format!(
            "grid needs min <= max and step > 0, got {min}:{max}:{step}"
        )));
    }
    let count = libm::round((max - min) / step) as usize + 1;
    Ok((0..count).map(|i| min + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm1_examples() {
        // log2 15 + 2 = 5.907 >= 5
        assert!(thm1_admissible(5, 6, 2));
        // log2 5 + 1 = 3.32 < 5
        assert!(!thm1_admissible(5, 5, 1));
        assert!(thm1_admissible(1, 1, 1));
    }

    #[test]
    fn thm2_reduces_to_thm1_when_n_equals_ell() {
        for k in 1..30 {
            for ell in 1..12 {
                let (ok, t) = thm2_admissible(k, ell, ell);
                assert_eq!(t, ell);
                assert_eq!(ok, thm1_admissible(k, ell, ell));
            }
        }
    }

    #[test]
    fn thm2_at_least_as_strong() {
        let (ok2, t) = thm2_admissible(40, 48, 10);
        assert!(t >= 10 && t <= 48);
        if ok2 {
            assert!(thm1_admissible(40, 48, 10));
        }
        let mut strict = false;
        for k in 20..=60 {
            for li in 1..=10 {
                for ni in 0..=10 {
                    let ell = libm::round(k as f64 * li as f64 * 0.05) as usize;
                    let n = libm::round(k as f64 * (1.0 + ni as f64 * 0.1)) as usize;
                    let t1 = thm1_admissible(k, n, ell);
                    let t2 = thm2_admissible(k, n, ell).0;
                    assert!(!t2 || t1, "k={k} n={n} ell={ell}");
                    strict |= t1 && !t2;
                }
            }
        }
        assert!(strict);
    }

    #[test]
    fn asymptotic_examples() {
        let (nu, lambda) = (1.2, 0.4);
        let h = nu * binary_entropy(lambda / nu);
        assert!((asymptotic_lhs(nu, lambda, 2.0).unwrap() - h).abs() < 1e-12);
        assert!((asymptotic_lhs(nu, lambda, 1.0).unwrap() - (h + lambda)).abs() < 1e-12);
        assert!(asymptotic_lhs(1.0, 2.0, 2.0).is_err());
        assert!(asymptotic_lhs(1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn r_penalty_minimised_at_two() {
        // grid search over [1, 8]
        let (best_r, best) = (0..=7000)
            .map(|i| 1.0 + i as f64 * 0.001)
            .map(|r| (r, r_penalty(r)))
            .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        assert!((best_r - 2.0).abs() < 1e-9);
        assert!(best.abs() < 1e-12);
        for i in 0..=7000 {
            let r = 1.0 + i as f64 * 0.001;
            if (r - 2.0).abs() > 1e-6 {
                assert!(r_penalty(r) > 0.0, "r = {r}");
            }
        }
    }

    #[test]
    fn cor1_examples() {
        assert!((cor1_lambda_min(1.0).unwrap() - 0.5).abs() < 1e-9);
        let l = cor1_lambda_min(4.0 / 3.0).unwrap();
        assert!((l - 0.2857).abs() < 1e-3, "{l}");
        assert!((l / (4.0 / 3.0) - 0.2145).abs() < 1e-3);
        // the non-systematic point (4/3, 1/3) sits above the bound
        assert!(1.0 / 3.0 > l);
        assert!(cor1_lambda_min(0.9).is_err());
        let mut prev = f64::INFINITY;
        for i in 0..=900 {
            let v = cor1_lambda_min(1.0 + i as f64 * 0.01).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn thm1_curve_below_cor1() {
        for nu in grid(1.0, 3.0, 0.1).unwrap() {
            assert!(thm1_lambda_min(nu).unwrap() <= cor1_lambda_min(nu).unwrap() + 1e-12);
        }
    }

    #[test]
    fn block_examples() {
        assert_eq!(block_bound_admissible(5, 6, 2), BlockVerdict::Admissible);
        assert_eq!(block_bound_admissible(5, 6, 1), BlockVerdict::Inadmissible);
        assert_eq!(block_bound_admissible(5, 3, 2), BlockVerdict::HypothesisNotMet);
        for k0 in 3..=12 {
            let lhs = block_bound_lhs(1 << (k0 - 1), 1);
            assert_eq!(lhs, k0 as f64);
            assert_eq!(block_bound_admissible(k0, 1 << (k0 - 1), 1), BlockVerdict::Admissible);
            assert_eq!(block_bound_admissible(k0, (1 << (k0 - 1)) - 1, 1), BlockVerdict::Inadmissible);
        }
    }

    #[test]
    fn block_curves() {
        let c = block_bound_curve(4, 16);
        assert!(c.points.contains(&RatePoint { nu: 2.0, lambda: 0.25 }));
        let c = block_bound_curve(5, 16);
        assert!(c.points.contains(&RatePoint { nu: 1.2, lambda: 0.4 }));
        let c = block_bound_curve(2, 4);
        assert_eq!(c.points, vec![RatePoint { nu: 1.0, lambda: 0.5 }]);
    }

    #[test]
    fn shipped_blocks_respect_block_bound() {
        // (k0, n0, ℓ0) of shipped constructions
        let shipped = [(5, 6, 2), (5, 6, 3), (3, 4, 2), (2, 2, 1), (3, 4, 1), (4, 8, 1), (5, 16, 1)];
        for (k0, n0, l0) in shipped {
            assert!(block_bound_admissible(k0, n0, l0).allows(), "({k0},{n0},{l0})");
        }
    }

    #[test]
    fn grid_cardinality() {
        assert_eq!(grid(1.0, 3.0, 0.1).unwrap().len(), 21);
        assert!(grid(2.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn finite_bound_tracks_asymptotic_sign() {
        // points where H(λ/ν) − 1/ν is clearly away from zero
        let mut checked = 0;
        for &k in &[50usize, 100, 200] {
            for ni in 0..=10 {
                let nu = 1.0 + ni as f64 * 0.1;
                for li in 1..=10 {
                    let lambda = li as f64 * 0.05;
                    let gap = binary_entropy(lambda / nu) - 1.0 / nu;
                    if gap.abs() < 0.15 {
                        continue;
                    }
                    let n = libm::round(nu * k as f64) as usize;
                    let ell = libm::round(lambda * k as f64) as usize;
                    if 2 * ell > n {
                        continue;
                    }
                    assert_eq!(thm2_admissible_at(k, n, ell, 2 * ell), gap > 0.0, "k={k} ν={nu} λ={lambda}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 50);
    }
}
