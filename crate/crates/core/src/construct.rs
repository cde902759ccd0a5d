//! Protocol constructions.
//!
//! Block constructions split `w ∈ {±1}^{m·k0}` into `m` blocks and decode each
//! with the same `k0 x n0` block matrix; the encoder is `I_m ⊗ M`. A
//! [`BlockSpec`] holds `M` and the decoder table for one block.

use alloc::vec;
use alloc::vec::Vec;

use crate::covering::{antipodal_half, CoveringCode};
use crate::linalg::span_contains;
use crate::{
    enumerate_sign_vectors, Decoder, Error, Matrix, Protocol, RatePoint, Result, SignVector,
    SparseCombination,
};

/// Largest `k` for the parity protocol (its decoder table has `2^k` entries).
pub const MAX_TRIVIAL_K: usize = 20;
/// Largest `k0` for the non-systematic block (`2^(k0−1)` columns).
pub const MAX_NONSYSTEMATIC_K0: usize = 12;
/// Largest `k0` for covering-code blocks.
pub const MAX_COVERING_K0: usize = 14;
/// Cap on `2^k0 · Σ_{s≤ℓ0} C(n0, s)` span tests in [`custom_block`].
pub const MAX_SEARCH_WORK: u128 = 20_000_000;

/// One block of a block construction: `M` plus a decoder for every `w ∈ {±1}^k0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    k0: usize,
    n0: usize,
    ell0: usize,
    matrix: Matrix,
    table: Vec<SparseCombination>,
}

impl BlockSpec {
    /// Wraps a block matrix and decoder table; shapes and the access bound
    /// are checked, reconstruction is not.
    pub fn new(matrix: Matrix, ell0: usize, table: Vec<SparseCombination>) -> Result<Self> {
        let (k0, n0) = (matrix.rows(), matrix.cols());
        if k0 > crate::sign::MAX_ENUMERATION_LEN || table.len() != 1usize << k0 {
            return Err(Error::contract(alloc::format!(
                "block decoder table has {} entries, expected 2^{k0}",
                table.len()
            )));
        }
        if ell0 > n0 {
            return Err(Error::contract(alloc::format!("ell0 = {ell0} exceeds n0 = {n0}")));
        }
        for (bits, a) in table.iter().enumerate() {
            if a.access() > ell0 || a.max_index().is_some_and(|j| j >= n0) {
                return Err(Error::contract(alloc::format!(
                    "decoder entry for {} reads {:?}, outside {ell0} of {n0} columns",
                    SignVector::from_raw(k0, bits as u64),
                    a.support()
                )));
            }
        }
        Ok(BlockSpec {
            k0,
            n0,
            ell0,
            matrix,
            table,
        })
    }

    #[inline]
    pub fn k0(&self) -> usize {
        self.k0
    }

    #[inline]
    pub fn n0(&self) -> usize {
        self.n0
    }

    #[inline]
    pub fn ell0(&self) -> usize {
        self.ell0
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn table(&self) -> &[SparseCombination] {
        &self.table
    }

    pub fn decode(&self, w: &SignVector) -> &SparseCombination {
        &self.table[w.bits() as usize]
    }

    /// `(n0/k0, ℓ0/k0)`.
    pub fn rate_point(&self) -> Result<RatePoint> {
        RatePoint::from_params(self.k0, self.n0, self.ell0)
    }
}

/// Builds a decoder table by calling `f` on every sign vector in bitmask order.
fn table_from(k0: usize, mut f: impl FnMut(&SignVector) -> Result<SparseCombination>) -> Result<Vec<SparseCombination>> {
    enumerate_sign_vectors(k0)?.map(|w| f(&w)).collect()
}

/// Systematic nodes plus one parity node: `D = [I_k | 1]`.
///
/// For `w` with `p` plus and `q` minus entries, `w = 1 − 2·Σ_{w_j<0} e_j`
/// reads the parity node and the `q` minus nodes; `w = −1 + 2·Σ_{w_j>0} e_j`
/// reads the parity node and the `p` plus nodes. The cheaper one is used,
/// the `+1` form on ties, so access is at most `⌊k/2⌋ + 1`.
pub fn trivial_protocol(k: usize) -> Result<Protocol> {
    if k == 0 || k > MAX_TRIVIAL_K {
        return Err(Error::budget("trivial protocol k", MAX_TRIVIAL_K as u64, k as u64));
    }
    let encoder = Matrix::identity(k)?.hconcat(&Matrix::new(k, 1, vec![1.0; k])?)?;
    let table = table_from(k, |w| {
        let plus = w.plus_count();
        let minus = k - plus;
        let (parity, fix_plus) = if minus <= plus { (1.0, false) } else { (-1.0, true) };
        let mut pairs = vec![(k, parity)];
        for j in 0..k {
            if w.is_plus(j) == fix_plus {
                pairs.push((j, 2.0 * w.value(j)));
            }
        }
        SparseCombination::new(pairs)
    })?;
    Protocol::new(encoder, k / 2 + 1, Decoder::Table(table))
}

/// `M` = one column per antipodal class of `{±1}^k0` (the smaller bitmask of
/// each pair, i.e. top bit clear), `2^(k0−1)` columns, access 1.
pub fn nonsystematic_block(k0: usize) -> Result<BlockSpec> {
    if k0 == 0 || k0 > MAX_NONSYSTEMATIC_K0 {
        return Err(Error::budget("non-systematic block k0", MAX_NONSYSTEMATIC_K0 as u64, k0 as u64));
    }
    let half = 1usize << (k0 - 1);
    let columns: Vec<Vec<f64>> = (0..half)
        .map(|b| SignVector::from_raw(k0, b as u64).to_f64())
        .collect();
    let matrix = Matrix::from_columns(k0, &columns)?;
    let top = 1u64 << (k0 - 1);
    let table = table_from(k0, |w| {
        if w.bits() & top == 0 {
            SparseCombination::new(vec![(w.bits() as usize, 1.0)])
        } else {
            SparseCombination::new(vec![((-*w).bits() as usize, -1.0)])
        }
    })?;
    BlockSpec::new(matrix, 1, table)
}

/// `M = (I_k0 | B)` with `B` the antipodal half of `code`.
///
/// `w` is decoded from its nearest codeword `c = σ·h` (`h` in the half): node
/// `k0 + idx(h)` with coefficient `σ`, plus systematic node `j` with coefficient
/// `2·w_j` wherever `w_j ≠ c_j`. Access is at most `r + 1`.
pub fn covering_code_block(code: &CoveringCode) -> Result<BlockSpec> {
    let k0 = code.k0();
    if k0 > MAX_COVERING_K0 {
        return Err(Error::budget("covering block k0", MAX_COVERING_K0 as u64, k0 as u64));
    }
    let half = antipodal_half(code);
    let b_cols: Vec<Vec<f64>> = half.words().iter().map(SignVector::to_f64).collect();
    let matrix = Matrix::identity(k0)?.hconcat(&Matrix::from_columns(k0, &b_cols)?)?;
    let table = table_from(k0, |w| {
        let (c, _) = code.nearest(w);
        let (idx, sigma) = half
            .locate(&c)
            .ok_or_else(|| Error::contract("nearest codeword missing from antipodal half"))?;
        let mut pairs = vec![(k0 + idx, sigma)];
        for j in (0..k0).filter(|&j| w.is_plus(j) != c.is_plus(j)) {
            pairs.push((j, 2.0 * w.value(j)));
        }
        SparseCombination::new(pairs)
    })?;
    BlockSpec::new(matrix, code.radius() + 1, table)
}

/// The 5x6 block matrix with an all-ones column followed by five columns of
/// ones with `−3` on successive rows. Every `w ∈ {±1}^5` lies in the span of
/// two of its columns.
pub fn shifted_diagonal_5x6() -> Matrix {
    let mut m = Matrix::new(5, 6, vec![1.0; 30]).expect("static shape");
    for i in 0..5 {
        m.set(i, i + 1, -3.0);
    }
    m
}

/// Size-`s` subsets of `0..n` in lexicographic order, as sorted index lists.
pub(crate) fn index_subsets(n: usize, s: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut idx: Vec<usize> = (0..s).collect();
    let mut done = s > n;
    core::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = idx.clone();
        let mut i = s;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - s + i {
                idx[i] += 1;
                for j in i + 1..s {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

pub(crate) fn search_work(k0: usize, n0: usize, ell0: usize) -> u128 {
    let subsets: u128 = (1..=ell0)
        .map(|s| crate::math::binomial(n0 as u64, s as u64).unwrap_or(u128::MAX))
        .fold(0u128, u128::saturating_add);
    subsets.saturating_mul(1u128 << k0.min(100))
}

/// Decoder table for an arbitrary block matrix, found by exhaustive search.
///
/// For each `w` the smallest support (then lexicographically first) whose
/// columns span `w` is stored with its exact coefficients. Fails with a
/// witness if some `w` needs more than `ell0` columns.
pub fn custom_block(matrix: Matrix, ell0: usize) -> Result<BlockSpec> {
    let (k0, n0) = (matrix.rows(), matrix.cols());
    if ell0 > n0 {
        return Err(Error::contract(alloc::format!("ell0 = {ell0} exceeds n0 = {n0}")));
    }
    let work = search_work(k0, n0, ell0);
    if k0 > crate::sign::MAX_ENUMERATION_LEN || work > MAX_SEARCH_WORK {
        return Err(Error::budget(
            "block decoder search",
            MAX_SEARCH_WORK as u64,
            u64::try_from(work).unwrap_or(u64::MAX),
        ));
    }
    let table = table_from(k0, |w| {
        for s in 1..=ell0 {
            for support in index_subsets(n0, s) {
                let cols = matrix.select_columns(&support)?;
                if let Some(c) = span_contains(&cols, w, crate::DEFAULT_TOL)? {
                    return SparseCombination::from_parts(&support, &c);
                }
            }
        }
        Err(Error::NotCovered { witness: *w, ell: ell0 })
    })?;
    BlockSpec::new(matrix, ell0, table)
}

/// `m` copies of a block: encoder `I_m ⊗ M`, `k = m·k0`, `n = m·n0`, `ℓ = m·ℓ0`.
pub fn expand_blocks(spec: &BlockSpec, m: usize) -> Result<Protocol> {
    if m == 0 || m * spec.k0() > crate::sign::MAX_LEN {
        return Err(Error::contract(alloc::format!(
            "{m} blocks of length {} do not fit in {} coordinates",
            spec.k0(),
            crate::sign::MAX_LEN
        )));
    }
    let encoder = spec.matrix().kron_identity(m)?;
    Protocol::new(
        encoder,
        m * spec.ell0(),
        Decoder::Blocks {
            spec: spec.clone(),
            blocks: m,
            kept: m,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify_protocol;

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    #[test]
    fn trivial_examples() {
        let p = trivial_protocol(2).unwrap();
        let a = p.combination(&sv("++"));
        assert_eq!(a.support(), &[2]);
        assert_eq!(a.coeffs(), &[1.0]);

        let p = trivial_protocol(3).unwrap();
        let a = p.combination(&sv("++-"));
        assert_eq!(a.support(), &[2, 3]);
        assert_eq!(a.coeffs(), &[-2.0, 1.0]);

        let p = trivial_protocol(5).unwrap();
        let worst = enumerate_sign_vectors(5)
            .unwrap()
            .map(|w| p.combination(&w).access())
            .max()
            .unwrap();
        assert_eq!(worst, 3);
    }

    #[test]
    fn trivial_rate_tends_to_one_half() {
        let r = trivial_protocol(9).unwrap().rate_point().unwrap();
        assert!((r.nu - 10.0 / 9.0).abs() < 1e-15);
        assert!((r.lambda - 5.0 / 9.0).abs() < 1e-15);
        let big = trivial_protocol(20).unwrap().rate_point().unwrap();
        assert!(big.nu < r.nu && big.lambda < r.lambda);
        assert!((big.lambda - 0.5).abs() < 0.06);
    }

    #[test]
    fn nonsystematic_rates() {
        let b = nonsystematic_block(3).unwrap();
        assert_eq!((b.n0(), b.ell0()), (4, 1));
        let r = b.rate_point().unwrap();
        assert!((r.nu - 4.0 / 3.0).abs() < 1e-15 && (r.lambda - 1.0 / 3.0).abs() < 1e-15);
        let r = nonsystematic_block(4).unwrap().rate_point().unwrap();
        assert_eq!((r.nu, r.lambda), (2.0, 0.25));
        let b = nonsystematic_block(2).unwrap();
        assert_eq!(b.rate_point().unwrap(), RatePoint { nu: 1.0, lambda: 0.5 });
        for w in enumerate_sign_vectors(2).unwrap() {
            let a = b.decode(&w);
            assert_eq!(a.access(), 1);
            assert_eq!(a.coeffs()[0].abs(), 1.0);
        }
    }

    #[test]
    fn covering_full_cube_reads_one_node() {
        let spec = covering_code_block(&CoveringCode::full_cube(3).unwrap()).unwrap();
        assert!(spec.table().iter().all(|a| a.access() == 1));
    }

    #[test]
    fn covering_repetition_rates() {
        let spec = covering_code_block(&CoveringCode::repetition(5).unwrap()).unwrap();
        assert_eq!(spec.rate_point().unwrap(), RatePoint { nu: 1.2, lambda: 0.6 });
        assert_eq!(spec.table().iter().map(|a| a.access()).max(), Some(3));
        let p = expand_blocks(&spec, 1).unwrap();
        assert!(verify_protocol(&p, 1e-9).unwrap().ok);

        let spec = covering_code_block(&CoveringCode::repetition(3).unwrap()).unwrap();
        let r = spec.rate_point().unwrap();
        assert!((r.nu - 4.0 / 3.0).abs() < 1e-15 && (r.lambda - 2.0 / 3.0).abs() < 1e-15);
        assert!(verify_protocol(&expand_blocks(&spec, 1).unwrap(), 1e-9).unwrap().ok);
    }

    #[test]
    fn shifted_diagonal_block() {
        let spec = custom_block(shifted_diagonal_5x6(), 2).unwrap();
        assert_eq!(spec.rate_point().unwrap(), RatePoint { nu: 1.2, lambda: 0.4 });
        assert!(custom_block(shifted_diagonal_5x6(), 1).is_err());
    }

    #[test]
    fn identity_block() {
        let spec = custom_block(Matrix::identity(4).unwrap(), 4).unwrap();
        for w in enumerate_sign_vectors(4).unwrap() {
            assert_eq!(spec.decode(&w).coeffs(), w.to_f64().as_slice());
        }
        match custom_block(Matrix::identity(4).unwrap(), 3) {
            Err(Error::NotCovered { witness, ell: 3 }) => assert_eq!(witness.len(), 4),
            other => panic!("expected NotCovered, got {other:?}"),
        }
    }

    #[test]
    fn expand_shapes() {
        let spec = nonsystematic_block(2).unwrap();
        let p = expand_blocks(&spec, 3).unwrap();
        assert_eq!((p.k(), p.n(), p.ell()), (6, 6, 3));
        assert!(verify_protocol(&p, 1e-9).unwrap().ok);

        let spec = custom_block(shifted_diagonal_5x6(), 2).unwrap();
        let p = expand_blocks(&spec, 2).unwrap();
        assert_eq!((p.k(), p.n(), p.ell()), (10, 12, 4));
        let report = verify_protocol(&p, 1e-9).unwrap();
        assert!(report.ok);
        assert_eq!(report.checked, 1024);
    }

    #[test]
    fn expand_single_block_matches_spec() {
        let spec = custom_block(shifted_diagonal_5x6(), 2).unwrap();
        let p = expand_blocks(&spec, 1).unwrap();
        assert_eq!(p.encoder(), spec.matrix());
        for w in enumerate_sign_vectors(5).unwrap() {
            assert_eq!(&p.combination(&w), spec.decode(&w));
        }
    }

    #[test]
    fn expand_preserves_rate() {
        let spec = nonsystematic_block(3).unwrap();
        let base = spec.rate_point().unwrap();
        for m in 1..=6 {
            let r = expand_blocks(&spec, m).unwrap().rate_point().unwrap();
            assert!((r.nu - base.nu).abs() < 1e-15 && (r.lambda - base.lambda).abs() < 1e-15);
        }
    }
}
