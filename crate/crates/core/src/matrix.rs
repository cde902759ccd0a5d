use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result, SparseCombination};

/// Small dense real matrix, row-major.
///
/// Every entry is finite. `is_integral` is cached at construction and enables
/// the exact elimination path in [`crate::linalg`].
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    integral: bool,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::contract(alloc::format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::contract(alloc::format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::contract(alloc::format!(
                "entry {bad} is not finite"
            )));
        }
        let integral = data.iter().all(|&x| libm::trunc(x) == x);
        Ok(Matrix {
            rows,
            cols,
            data,
            integral,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.as_ref().len() != c {
                return Err(Error::contract(alloc::format!(
                    "row {i} has {} entries, expected {c}",
                    row.as_ref().len()
                )));
            }
            data.extend_from_slice(row.as_ref());
        }
        Matrix::new(r, c, data)
    }

    /// Builds a `rows x cols` matrix whose column `j` is `columns[j]`.
    pub fn from_columns<C: AsRef<[f64]>>(rows: usize, columns: &[C]) -> Result<Self> {
        let cols = columns.len();
        let mut data = vec![0.0; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            let col = col.as_ref();
            if col.len() != rows {
                return Err(Error::contract(alloc::format!(
                    "column {j} has {} entries, expected {rows}",
                    col.len()
                )));
            }
            for (i, &x) in col.iter().enumerate() {
                data[i * cols + j] = x;
            }
        }
        Matrix::new(rows, cols, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix::new(n, n, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_integral(&self) -> bool {
        self.integral
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn column_norm_sq(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self.get(i, j) * self.get(i, j)).sum()
    }

    /// The submatrix formed by the listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.cols) {
            return Err(Error::contract(alloc::format!(
                "column {bad} out of range for {} columns",
                self.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            data.extend(idx.iter().map(|&j| self.get(i, j)));
        }
        Matrix::new(self.rows, idx.len(), data)
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::contract(alloc::format!(
                "cannot join {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Matrix::new(self.rows, cols, data)
    }

    /// `I_m ⊗ self`, placed in the top-left corner of a `(m*rows + pad_rows) x m*cols` matrix.
    ///
    /// `pad_rows` adds all-zero rows below the block diagonal; it is used when
    /// trailing blocks of the data are not encoded at all.
    pub fn block_diagonal(&self, m: usize, pad_rows: usize) -> Result<Matrix> {
        let rows = m * self.rows + pad_rows;
        let cols = m * self.cols;
        if m == 0 {
            return Err(Error::contract("block count must be positive"));
        }
        let mut data = vec![0.0; rows * cols];
        for b in 0..m {
            for i in 0..self.rows {
                let r = b * self.rows + i;
                let start = r * cols + b * self.cols;
                data[start..start + self.cols].copy_from_slice(self.row(i));
            }
        }
        Matrix::new(rows, cols, data)
    }

    /// `I_m ⊗ self`.
    pub fn kron_identity(&self, m: usize) -> Result<Matrix> {
        self.block_diagonal(m, 0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self · a` where only the support columns of `a` are touched.
    pub fn mul_sparse(&self, a: &SparseCombination) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (j, c) in a.iter() {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j) * c;
            }
        }
        out
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, x: f64) {
        debug_assert!(x.is_finite());
        self.data[i * self.cols + j] = x;
        self.integral = self.integral && libm::trunc(x) == x;
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}
