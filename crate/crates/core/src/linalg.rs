//! Span membership, rank and least squares for small dense matrices.
//!
//! Integral inputs go through fraction-free (Bareiss) elimination over `i128`
//! and rational back-substitution, so membership is decided exactly. Everything
//! else uses partial-pivoting elimination with an absolute tolerance.

use alloc::vec;
use alloc::vec::Vec;

use crate::{enumerate_sign_vectors, Error, Matrix, Result, SignVector};

/// Largest `k` accepted by [`count_pm1_in_span`].
pub const MAX_COUNT_LEN: usize = 20;

/// Entries beyond this magnitude skip the exact path.
const EXACT_ENTRY_LIMIT: f64 = (1u64 << 24) as f64;

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Reduced fraction with positive denominator. Arithmetic returns `None` on overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    const ZERO: Ratio = Ratio { num: 0, den: 1 };

    fn new(num: i128, den: i128) -> Option<Ratio> {
        if den == 0 {
            return None;
        }
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Some(Ratio {
            num: s * num / g,
            den: s * den / g,
        })
    }

    fn int(x: i128) -> Ratio {
        Ratio { num: x, den: 1 }
    }

    fn sub(self, o: Ratio) -> Option<Ratio> {
        let g = gcd(self.den, o.den).max(1);
        let l = self.den / g;
        let num = self
            .num
            .checked_mul(o.den / g)?
            .checked_sub(o.num.checked_mul(l)?)?;
        Ratio::new(num, l.checked_mul(o.den)?)
    }

    fn mul(self, o: Ratio) -> Option<Ratio> {
        let g1 = gcd(self.num, o.den).max(1);
        let g2 = gcd(o.num, self.den).max(1);
        Ratio::new(
            (self.num / g1).checked_mul(o.num / g2)?,
            (self.den / g2).checked_mul(o.den / g1)?,
        )
    }

    fn div(self, o: Ratio) -> Option<Ratio> {
        if o.num == 0 {
            return None;
        }
        self.mul(Ratio {
            num: o.den * o.num.signum(),
            den: o.num.abs(),
        })
    }

    fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Row echelon form from fraction-free elimination, with pivot columns.
struct Echelon {
    rows: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

/// Bareiss elimination on an integer matrix. `None` on `i128` overflow.
fn bareiss(mut a: Vec<Vec<i128>>) -> Option<Echelon> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c];
        for i in r + 1..nrows {
            let lead = a[i][c];
            for j in c + 1..ncols {
                let v = piv
                    .checked_mul(a[i][j])?
                    .checked_sub(lead.checked_mul(a[r][j])?)?;
                debug_assert_eq!(v % prev, 0);
                a[i][j] = v / prev;
            }
            a[i][c] = 0;
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    Some(Echelon { rows: a, pivots })
}

fn to_int_rows(m: &Matrix, extra: Option<&SignVector>) -> Option<Vec<Vec<i128>>> {
    if !m.is_integral() || m.as_slice().iter().any(|x| x.abs() > EXACT_ENTRY_LIMIT) {
        return None;
    }
    Some(
        (0..m.rows())
            .map(|i| {
                let mut row: Vec<i128> = m.row(i).iter().map(|&x| x as i128).collect();
                if let Some(w) = extra {
                    row.push(if w.is_plus(i) { 1 } else { -1 });
                }
                row
            })
            .collect(),
    )
}

/// Exact membership. Outer `None`: the exact path does not apply (or overflowed).
fn span_contains_exact(columns: &Matrix, w: &SignVector) -> Option<Option<Vec<f64>>> {
    let p = columns.cols();
    let ech = bareiss(to_int_rows(columns, Some(w))?)?;
    if ech.pivots.last() == Some(&p) {
        return Some(None);
    }
    let mut x = vec![Ratio::ZERO; p];
    for (r, &c) in ech.pivots.iter().enumerate().rev() {
        let row = &ech.rows[r];
        let mut acc = Ratio::int(row[p]);
        for &c2 in &ech.pivots[r + 1..] {
            acc = acc.sub(Ratio::int(row[c2]).mul(x[c2])?)?;
        }
        x[c] = acc.div(Ratio::int(row[c]))?;
    }
    Some(Some(x.into_iter().map(Ratio::to_f64).collect()))
}

/// Gaussian elimination with partial pivoting on `[A | b]`.
///
/// Returns the solution with free variables set to zero, or `None` when a
/// pivot appears in the right-hand-side column.
fn solve_float(a: &Matrix, b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let rows = a.rows();
    let p = a.cols();
    let mut m: Vec<Vec<f64>> = (0..rows)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i]);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..=p {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, m[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        if c == p {
            return None;
        }
        m.swap(r, best);
        for i in r + 1..rows {
            let f = m[i][c] / m[r][c];
            if f != 0.0 {
                for j in c..=p {
                    m[i][j] -= f * m[r][j];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut x = vec![0.0; p];
    for (r, &c) in pivots.iter().enumerate().rev() {
        let mut acc = m[r][p];
        for &c2 in &pivots[r + 1..] {
            acc -= m[r][c2] * x[c2];
        }
        x[c] = acc / m[r][c];
    }
    Some(x)
}

fn check_dims(columns: &Matrix, w: &SignVector) -> Result<()> {
    if columns.rows() != w.len() {
        return Err(Error::contract(alloc::format!(
            "matrix has {} rows but sign vector has length {}",
            columns.rows(),
            w.len()
        )));
    }
    Ok(())
}

/// Coefficients `c` with `columns · c = w`, if `w` lies in the column span.
///
/// Integral matrices are decided exactly and `tol` is ignored. Otherwise the
/// rank test uses `tol` as the pivot threshold and the returned coefficients
/// satisfy `‖columns·c − w‖∞ ≤ tol`.
pub fn span_contains(columns: &Matrix, w: &SignVector, tol: f64) -> Result<Option<Vec<f64>>> {
    check_dims(columns, w)?;
    if let Some(exact) = span_contains_exact(columns, w) {
        return Ok(exact);
    }
    span_contains_float(columns, w, tol)
}

/// Floating-point path only, regardless of integrality.
pub fn span_contains_float(
    columns: &Matrix,
    w: &SignVector,
    tol: f64,
) -> Result<Option<Vec<f64>>> {
    check_dims(columns, w)?;
    if !(tol > 0.0) {
        return Err(Error::contract("tolerance must be positive"));
    }
    let target = w.to_f64();
    let Some(x) = solve_float(columns, &target, tol) else {
        return Ok(None);
    };
    let back = columns.mul_vec(&x);
    let resid = back
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((resid <= tol).then_some(x))
}

/// Number of `w ∈ {±1}^k` in the column span of `columns` (`k` = row count).
pub fn count_pm1_in_span(columns: &Matrix) -> Result<u64> {
    let k = columns.rows();
    if k > MAX_COUNT_LEN {
        return Err(Error::budget("count_pm1_in_span length", MAX_COUNT_LEN as u64, k as u64));
    }
    let mut count = 0;
    for w in enumerate_sign_vectors(k)? {
        if span_contains(columns, &w, crate::DEFAULT_TOL)?.is_some() {
            count += 1;
        }
    }
    Ok(count)
}

/// Rank via exact elimination when integral, otherwise with pivot threshold `tol`.
pub fn rank(m: &Matrix, tol: f64) -> usize {
    if let Some(ech) = to_int_rows(m, None).and_then(bareiss) {
        return ech.pivots.len();
    }
    rank_float(m, tol)
}

pub fn rank_float(m: &Matrix, tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap_or(r);
        if a[best][c].abs() <= tol {
            continue;
        }
        a.swap(r, best);
        for i in r + 1..rows {
            let f = a[i][c] / a[r][c];
            for j in c..cols {
                a[i][j] -= f * a[r][j];
            }
        }
        r += 1;
    }
    r
}

/// Least-squares solution of `min ‖A x − b‖₂` via Householder QR.
///
/// Columns whose remaining norm falls below `tol` relative to the largest
/// column are treated as dependent and get a zero coefficient.
pub fn least_squares(a: &Matrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::contract(alloc::format!(
            "right-hand side has {} entries, expected {m}",
            b.len()
        )));
    }
    // column-major working copy
    let mut q: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut rhs = b.to_vec();
    let scale = (0..n)
        .map(|j| libm::sqrt(a.column_norm_sq(j)))
        .fold(0.0, f64::max)
        .max(1.0);
    let mut used = vec![false; n];
    let mut row = 0;
    let mut order = Vec::new();
    for j in 0..n {
        if row == m {
            break;
        }
        let norm = libm::sqrt(q[j][row..].iter().map(|x| x * x).sum::<f64>());
        if norm <= tol * scale {
            continue;
        }
        let alpha = if q[j][row] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = q[j][row..].to_vec();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq > 0.0 {
            for col in q.iter_mut().skip(j) {
                let dot: f64 = v.iter().zip(&col[row..]).map(|(x, y)| x * y).sum();
                let f = 2.0 * dot / vnorm_sq;
                for (c, vi) in col[row..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(&rhs[row..]).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vnorm_sq;
            for (c, vi) in rhs[row..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
        used[j] = true;
        order.push((j, row));
        row += 1;
    }
    let mut x = vec![0.0; n];
    for idx in (0..order.len()).rev() {
        let (j, r) = order[idx];
        let mut acc = rhs[r];
        for &(j2, _) in &order[idx + 1..] {
            acc -= q[j2][r] * x[j2];
        }
        x[j] = acc / q[j][r];
    }
    debug_assert!(used.iter().zip(&x).all(|(&u, &v)| u || v == 0.0));
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    #[test]
    fn single_column_all_ones() {
        let col = Matrix::from_columns(5, &[[1.0; 5]]).unwrap();
        let c = span_contains(&col, &sv("+++++"), 1e-9).unwrap().unwrap();
        assert_eq!(c, vec![1.0]);
    }

    #[test]
    fn identity_two() {
        let id = Matrix::identity(2).unwrap();
        let c = span_contains(&id, &sv("+-"), 1e-9).unwrap().unwrap();
        assert_eq!(c, vec![1.0, -1.0]);
        assert_eq!(count_pm1_in_span(&id).unwrap(), 4);
    }

    #[test]
    fn unit_vector_holds_no_sign_vector() {
        let e1 = Matrix::from_columns(3, &[[1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(count_pm1_in_span(&e1).unwrap(), 0);
    }

    #[test]
    fn dimension_mismatch() {
        let id = Matrix::identity(2).unwrap();
        assert!(matches!(
            span_contains(&id, &sv("+++"), 1e-9),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn shifted_diagonal_pair_against_least_squares() {
        // columns 1 and 2 of the 5x6 shifted-diagonal block matrix
        let c1 = [-3.0, 1.0, 1.0, 1.0, 1.0];
        let c2 = [1.0, -3.0, 1.0, 1.0, 1.0];
        let cols = Matrix::from_columns(5, &[c1, c2]).unwrap();
        // (c1 + c2)/2 = (-1, -1, 1, 1, 1)
        let w = sv("--+++");
        let c = span_contains(&cols, &w, 1e-9).unwrap().unwrap();
        assert_eq!(c, vec![0.5, 0.5]);
        // independent route: normal equations solved by hand (2x2 Cramer)
        let g11: f64 = c1.iter().map(|x| x * x).sum();
        let g22: f64 = c2.iter().map(|x| x * x).sum();
        let g12: f64 = c1.iter().zip(&c2).map(|(a, b)| a * b).sum();
        let wt = w.to_f64();
        let b1: f64 = c1.iter().zip(&wt).map(|(a, b)| a * b).sum();
        let b2: f64 = c2.iter().zip(&wt).map(|(a, b)| a * b).sum();
        let det = g11 * g22 - g12 * g12;
        let x = [(b1 * g22 - b2 * g12) / det, (g11 * b2 - g12 * b1) / det];
        let resid: f64 = (0..5)
            .map(|i| (c1[i] * x[0] + c2[i] * x[1] - wt[i]).powi(2))
            .sum();
        assert!(resid.sqrt() < 1e-9);
        assert!((x[0] - c[0]).abs() < 1e-12 && (x[1] - c[1]).abs() < 1e-12);
    }

    #[test]
    fn random_matrix_cap_k8_l3() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let data: Vec<f64> = (0..24).map(|_| rng.gen_range(-3i32..=3) as f64).collect();
            let m = Matrix::new(8, 3, data).unwrap();
            assert!(count_pm1_in_span(&m).unwrap() <= 8);
        }
    }

    #[test]
    fn least_squares_overdetermined() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let x = least_squares(&a, &[1.0, 1.0, 0.0], 1e-12).unwrap();
        // normal equations: [[2,1],[1,2]] x = [1,1] -> x = (1/3, 1/3)
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-12 && (x[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_dependent_column() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [1.0, 2.0]]).unwrap();
        let x = least_squares(&a, &[1.0, 1.0], 1e-10).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert_eq!(x[1], 0.0);
    }

    fn small_int_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..=12, 1usize..=6).prop_flat_map(|(k, l)| {
            proptest::collection::vec(-3i32..=3, k * l)
                .prop_map(move |d| Matrix::new(k, l, d.into_iter().map(f64::from).collect()).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn subspace_cap(m in small_int_matrix()) {
            let r = rank(&m, 1e-9);
            prop_assert!(count_pm1_in_span(&m).unwrap() <= 1u64 << r);
        }

        #[test]
        fn negation_symmetric(m in small_int_matrix(), raw in any::<u64>()) {
            let k = m.rows();
            let w = SignVector::new(k, raw & ((1u64 << k) - 1)).unwrap();
            let a = span_contains(&m, &w, 1e-9).unwrap();
            let b = span_contains(&m, &-w, 1e-9).unwrap();
            prop_assert_eq!(a.is_some(), b.is_some());
            if let (Some(a), Some(b)) = (a, b) {
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x + y).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn exact_and_float_agree(m in small_int_matrix(), raw in any::<u64>()) {
            let k = m.rows();
            let w = SignVector::new(k, raw & ((1u64 << k) - 1)).unwrap();
            let exact = span_contains(&m, &w, 1e-9).unwrap();
            let float = span_contains_float(&m, &w, 1e-9).unwrap();
            prop_assert_eq!(exact.is_some(), float.is_some());
            prop_assert_eq!(rank(&m, 1e-9), rank_float(&m, 1e-9));
        }
    }
}
