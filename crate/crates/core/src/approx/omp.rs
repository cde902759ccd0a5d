use alloc::vec::Vec;

use crate::linalg::least_squares;
use crate::{Error, Matrix, Result, SignVector, SparseCombination};

/// Orthogonal matching pursuit.
///
/// Each step picks the unused column with the largest `|⟨d_j, residual⟩|`
/// (lowest index on ties), then refits all chosen coefficients by least
/// squares. Stops after `ell` columns, when `‖residual‖₂ ≤ tol`, or when no
/// column correlates with the residual.
pub fn omp(d: &Matrix, w: &SignVector, ell: usize, tol: f64) -> Result<SparseCombination> {
    if w.len() != d.rows() {
        return Err(Error::contract(alloc::format!(
            "sign vector has length {}, dictionary has {} rows",
            w.len(),
            d.rows()
        )));
    }
    if ell > d.cols() {
        return Err(Error::contract(alloc::format!(
            "ell = {ell} exceeds the {} dictionary columns",
            d.cols()
        )));
    }
    if let Some(j) = (0..d.cols()).find(|&j| d.column_norm_sq(j) == 0.0) {
        return Err(Error::contract(alloc::format!("dictionary column {j} is zero")));
    }
    omp_unchecked(d, &w.to_f64(), ell, tol)
}

/// [`omp`] without argument checks, on an arbitrary target.
pub(crate) fn omp_unchecked(d: &Matrix, target: &[f64], ell: usize, tol: f64) -> Result<SparseCombination> {
    let mut residual = target.to_vec();
    let mut support: Vec<usize> = Vec::with_capacity(ell);
    let mut coeffs: Vec<f64> = Vec::new();
    while support.len() < ell && norm(&residual) > tol {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..d.cols()).filter(|j| !support.contains(j)) {
            let corr = (0..d.rows()).map(|i| d.get(i, j) * residual[i]).sum::<f64>().abs();
            if best.is_none_or(|(_, b)| corr > b) {
                best = Some((j, corr));
            }
        }
        let Some((j, corr)) = best else { break };
        if corr <= f64::EPSILON * norm(&residual) {
            break;
        }
        support.push(j);
        let sub = d.select_columns(&support)?;
        coeffs = least_squares(&sub, target, 1e-12)?;
        let back = sub.mul_vec(&coeffs);
        for (r, (t, b)) in residual.iter_mut().zip(target.iter().zip(&back)) {
            *r = t - b;
        }
    }
    SparseCombination::from_parts(&support, &coeffs)
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::nonsystematic_block;
    use crate::enumerate_sign_vectors;
    use proptest::prelude::*;

    fn resid(d: &Matrix, w: &SignVector, a: &SparseCombination) -> f64 {
        let back = d.mul_sparse(a);
        norm(&back.iter().enumerate().map(|(i, x)| w.value(i) - x).collect::<Vec<_>>())
    }

    #[test]
    fn column_match() {
        let d = Matrix::from_rows(&[[1.0, 1.0, 0.0], [1.0, -1.0, 1.0], [-1.0, 1.0, 1.0]]).unwrap();
        let w: SignVector = "+-+".parse().unwrap();
        let a = omp(&d, &w, 1, 1e-12).unwrap();
        assert_eq!(a.support(), &[1]);
        assert_eq!(a.coeffs(), &[1.0]);
    }

    #[test]
    fn identity_full_support() {
        let d = Matrix::identity(4).unwrap();
        for w in enumerate_sign_vectors(4).unwrap() {
            let a = omp(&d, &w, 4, 1e-12).unwrap();
            assert_eq!(a.support(), &[0, 1, 2, 3]);
            assert!(resid(&d, &w, &a) < 1e-12);
        }
    }

    #[test]
    fn nonsystematic_single_atom() {
        let spec = nonsystematic_block(4).unwrap();
        for w in enumerate_sign_vectors(4).unwrap() {
            let a = omp(spec.matrix(), &w, 1, 1e-12).unwrap();
            assert_eq!(a.access(), 1);
            assert!(resid(spec.matrix(), &w, &a) < 1e-12);
        }
    }

    #[test]
    fn argument_checks() {
        let d = Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        let w: SignVector = "++".parse().unwrap();
        assert!(omp(&d, &w, 1, 1e-12).is_err());
        let d = Matrix::identity(2).unwrap();
        assert!(omp(&d, &w, 3, 1e-12).is_err());
        assert!(omp(&d, &"+++".parse().unwrap(), 1, 1e-12).is_err());
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let d = Matrix::identity(3).unwrap();
        let a = omp(&d, &"-++".parse().unwrap(), 1, 1e-12).unwrap();
        assert_eq!(a.support(), &[0]);
        assert_eq!(a.coeffs(), &[-1.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn residual_non_increasing(
            entries in proptest::collection::vec(-3i32..=3, 6 * 8),
            bits in 0u64..64,
        ) {
            let data = entries.iter().map(|&x| if x == 0 { 1.0 } else { x as f64 }).collect();
            let d = Matrix::new(6, 8, data).unwrap();
            let w = SignVector::new(6, bits).unwrap();
            let mut last = f64::INFINITY;
            for ell in 0..=6 {
                let a = omp(&d, &w, ell, 0.0).unwrap();
                prop_assert!(a.access() <= ell);
                let r = resid(&d, &w, &a);
                prop_assert!(r <= last + 1e-9);
                last = r;
            }
        }
    }
}
