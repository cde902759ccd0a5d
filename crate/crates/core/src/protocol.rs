use alloc::vec::Vec;

use crate::construct::BlockSpec;
use crate::{Error, Matrix, Result, SignVector};

/// A decoder column: which nodes to read and how to weight them.
///
/// Support is strictly increasing and zero coefficients are never stored, so
/// `access()` is exactly the number of nodes read.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseCombination {
    support: Vec<usize>,
    coeffs: Vec<f64>,
}

impl SparseCombination {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds from `(index, coefficient)` pairs in any order. Exact zeros are
    /// dropped; repeated indices are rejected.
    pub fn new(mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.retain(|&(_, c)| c != 0.0);
        pairs.sort_by_key(|&(j, _)| j);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::contract("repeated index in sparse combination"));
        }
        if let Some(&(j, c)) = pairs.iter().find(|(_, c)| !c.is_finite()) {
            return Err(Error::contract(alloc::format!(
                "coefficient {c} at index {j} is not finite"
            )));
        }
        let (support, coeffs) = pairs.into_iter().unzip();
        Ok(SparseCombination { support, coeffs })
    }

    /// From parallel slices; same normalisation as [`SparseCombination::new`].
    pub fn from_parts(support: &[usize], coeffs: &[f64]) -> Result<Self> {
        if support.len() != coeffs.len() {
            return Err(Error::contract(alloc::format!(
                "{} support indices but {} coefficients",
                support.len(),
                coeffs.len()
            )));
        }
        Self::new(support.iter().copied().zip(coeffs.iter().copied()).collect())
    }

    #[inline]
    pub fn access(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().copied().zip(self.coeffs.iter().copied())
    }

    pub fn max_index(&self) -> Option<usize> {
        self.support.last().copied()
    }

    /// Shift every index by `offset`; used to place a block decoder in a larger protocol.
    pub fn shifted(&self, offset: usize) -> SparseCombination {
        SparseCombination {
            support: self.support.iter().map(|j| j + offset).collect(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// Concatenate combinations whose index ranges are disjoint and increasing.
    pub(crate) fn append(&mut self, other: SparseCombination) {
        debug_assert!(match (self.support.last(), other.support.first()) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        });
        self.support.extend(other.support);
        self.coeffs.extend(other.coeffs);
    }
}

/// A `(ν, λ) = (n/k, ℓ/k)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub nu: f64,
    pub lambda: f64,
}

impl RatePoint {
    pub fn new(nu: f64, lambda: f64) -> Result<Self> {
        if !(nu.is_finite() && lambda.is_finite() && nu > 0.0 && lambda > 0.0) {
            return Err(Error::contract(alloc::format!(
                "rate point ({nu}, {lambda}) must be finite and positive"
            )));
        }
        Ok(RatePoint { nu, lambda })
    }

    pub fn from_params(k: usize, n: usize, ell: usize) -> Result<Self> {
        Self::new(n as f64 / k as f64, ell as f64 / k as f64)
    }
}

/// How a protocol maps a sign vector to its decoder column.
#[derive(Debug, Clone, PartialEq)]
pub enum Decoder {
    /// One entry per sign vector, indexed by bitmask.
    Table(Vec<SparseCombination>),
    /// `blocks` copies of a block decoder. Only the first `kept` blocks are
    /// encoded; the rest of the data is not stored and decodes to nothing.
    Blocks {
        spec: BlockSpec,
        blocks: usize,
        kept: usize,
    },
}

/// An encoder `D` (`k x n`) together with a decoder for every `w ∈ {±1}^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    k: usize,
    n: usize,
    ell: usize,
    encoder: Matrix,
    decoder: Decoder,
}

impl Protocol {
    /// Wraps an encoder and decoder table. Shapes are checked; reconstruction
    /// is not (see [`crate::verify::verify_protocol`]).
    pub fn new(encoder: Matrix, ell: usize, decoder: Decoder) -> Result<Self> {
        let k = encoder.rows();
        let n = encoder.cols();
        if k > crate::sign::MAX_LEN {
            return Err(Error::contract(alloc::format!(
                "k = {k} exceeds the {} supported coordinates",
                crate::sign::MAX_LEN
            )));
        }
        if ell > n {
            return Err(Error::contract(alloc::format!(
                "access bound {ell} exceeds n = {n}"
            )));
        }
        match &decoder {
            Decoder::Table(table) => {
                if k >= 64 || table.len() != 1usize << k {
                    return Err(Error::contract(alloc::format!(
                        "decoder table has {} entries, expected 2^{k}",
                        table.len()
                    )));
                }
                if let Some(bad) = table.iter().position(|a| a.max_index().is_some_and(|j| j >= n)) {
                    return Err(Error::contract(alloc::format!(
                        "decoder entry {bad} references a column beyond n = {n}"
                    )));
                }
            }
            Decoder::Blocks { spec, blocks, kept } => {
                if *kept > *blocks || blocks * spec.k0() != k || kept * spec.n0() != n {
                    return Err(Error::contract(alloc::format!(
                        "block decoder ({blocks} blocks, {kept} kept, k0 = {}, n0 = {}) does not match a {k}x{n} encoder",
                        spec.k0(),
                        spec.n0()
                    )));
                }
            }
        }
        Ok(Protocol {
            k,
            n,
            ell,
            encoder,
            decoder,
        })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn encoder(&self) -> &Matrix {
        &self.encoder
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    pub fn rate_point(&self) -> Result<RatePoint> {
        RatePoint::from_params(self.k, self.n, self.ell)
    }

    /// Decoder column for `w`.
    pub fn combination(&self, w: &SignVector) -> SparseCombination {
        debug_assert_eq!(w.len(), self.k);
        match &self.decoder {
            Decoder::Table(table) => table[w.bits() as usize].clone(),
            Decoder::Blocks { spec, kept, .. } => {
                let mut out = SparseCombination::empty();
                for b in 0..*kept {
                    let part = spec.decode(&w.block(b, spec.k0()));
                    out.append(part.shifted(b * spec.n0()));
                }
                out
            }
        }
    }

    /// `D · a_w`.
    pub fn reconstruct(&self, w: &SignVector) -> Vec<f64> {
        self.encoder.mul_sparse(&self.combination(w))
    }

    /// The same protocol with an explicit decoder table.
    pub fn materialize(&self) -> Result<Protocol> {
        let table = crate::enumerate_sign_vectors(self.k)?
            .map(|w| self.combination(&w))
            .collect();
        Protocol::new(self.encoder.clone(), self.ell, Decoder::Table(table))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_normalisation() {
        let a = SparseCombination::new(alloc::vec![(3, 1.0), (1, -2.0), (2, 0.0)]).unwrap();
        assert_eq!(a.support(), &[1, 3]);
        assert_eq!(a.coeffs(), &[-2.0, 1.0]);
        assert_eq!(a.access(), 2);
        assert!(SparseCombination::new(alloc::vec![(1, 1.0), (1, 2.0)]).is_err());
        assert!(SparseCombination::from_parts(&[0], &[]).is_err());
    }

    #[test]
    fn table_size_checked() {
        let d = Matrix::identity(2).unwrap();
        assert!(Protocol::new(d.clone(), 2, Decoder::Table(alloc::vec![])).is_err());
        assert!(Protocol::new(d, 3, Decoder::Table(alloc::vec![SparseCombination::empty(); 4])).is_err());
    }

    #[test]
    fn rate_point_positive() {
        assert!(RatePoint::new(0.0, 1.0).is_err());
        let p = RatePoint::from_params(5, 6, 2).unwrap();
        assert!((p.nu - 1.2).abs() < 1e-15 && (p.lambda - 0.4).abs() < 1e-15);
    }
}
