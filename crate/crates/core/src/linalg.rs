//! Small dense row-major matrices.
//!
//! Mixing matrices here are a handful of rows and columns, so everything is
//! plain Gaussian elimination with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Matrix::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape("ragged rows"));
            }
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entries.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// The submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out[(i, k)] = self[(i, j)];
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape("inner dimensions differ"));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::Shape("vector length differs from column count"));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| f64::max(acc, (a - b).abs()))
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Determinant of a square matrix by LU with partial pivoting.
    pub fn determinant(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::Shape("determinant of a non-square matrix"));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[x * n + c].abs().total_cmp(&a[y * n + c].abs()))
                .unwrap_or(c);
            let pivot = a[p * n + c];
            if pivot == 0.0 {
                return Ok(0.0);
            }
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            det *= pivot;
            for r in c + 1..n {
                let f = a[r * n + c] / pivot;
                if f != 0.0 {
                    for j in c..n {
                        a[r * n + j] -= f * a[c * n + j];
                    }
                }
            }
        }
        Ok(det)
    }

    /// Inverse of a square matrix by Gauss-Jordan elimination.
    ///
    /// Fails with [`Error::IllConditioned`] when the 1-norm condition estimate
    /// exceeds `max_condition` or a pivot vanishes.
    pub fn inverse(&self, max_condition: f64) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[(x, c)].abs().total_cmp(&a[(y, c)].abs()))
                .unwrap_or(c);
            let pivot = a[(p, c)];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                });
            }
            if p != c {
                a.swap_rows(p, c);
                inv.swap_rows(p, c);
            }
            for j in 0..n {
                a[(c, j)] /= pivot;
                inv[(c, j)] /= pivot;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[(r, c)];
                if f != 0.0 {
                    for j in 0..n {
                        a[(r, j)] -= f * a[(c, j)];
                        inv[(r, j)] -= f * inv[(c, j)];
                    }
                }
            }
        }
        let condition = self.norm1() * inv.norm1();
        if !(condition <= max_condition) {
            return Err(Error::IllConditioned { condition });
        }
        Ok(inv)
    }

    /// Minimum-norm right inverse `Aᵀ (A Aᵀ)⁻¹` of a full-row-rank matrix,
    /// via the normal equations plus one refinement step `X += X (I − A X)`.
    /// The correction stays in the row space of `A`.
    pub fn right_pseudo_inverse(&self, max_condition: f64) -> Result<Matrix> {
        let at = self.transpose();
        let gram = self.matmul(&at)?;
        let mut x = at.matmul(&gram.inverse(max_condition)?)?;
        let mut residual = self.matmul(&x)?;
        for i in 0..residual.rows {
            for j in 0..residual.cols {
                let id = if i == j { 1.0 } else { 0.0 };
                residual[(i, j)] = id - residual[(i, j)];
            }
        }
        let correction = x.matmul(&residual)?;
        for (v, c) in x.data.iter_mut().zip(&correction.data) {
            *v += c;
        }
        Ok(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Laplace expansion along the first row.
    fn cofactor_det(m: &Matrix) -> f64 {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)];
        }
        let mut det = 0.0;
        for j in 0..n {
            let keep: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let mut minor = Matrix::zeros(n - 1, n - 1);
            for i in 1..n {
                for (k, &c) in keep.iter().enumerate() {
                    minor[(i - 1, k)] = m[(i, c)];
                }
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            det += sign * m[(0, j)] * cofactor_det(&minor);
        }
        det
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = Matrix::from_rows(&[
            [2.0, -1.0, 0.5, 3.0],
            [0.0, 4.0, 1.0, -2.0],
            [1.5, 0.25, -3.0, 1.0],
            [-1.0, 2.0, 2.0, 0.75],
        ])
        .unwrap();
        let lu = m.determinant().unwrap();
        let cf = cofactor_det(&m);
        assert!((lu - cf).abs() < 1e-12 * cf.abs().max(1.0), "{lu} vs {cf}");
    }

    #[test]
    fn singular_determinant_is_zero() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert_eq!(m.determinant().unwrap(), 0.0);
        assert!(m.inverse(1e12).is_err());
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = Matrix::from_rows(&[[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]]).unwrap();
        let inv = m.inverse(1e12).unwrap();
        let prod = m.matmul(&inv).unwrap();
        assert!(prod.max_abs_diff(&Matrix::identity(3)) < 1e-14);
    }

    #[test]
    fn shape_errors() {
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        let a = Matrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
        assert!(a.determinant().is_err());
        assert!(a.mul_vec(&[1.0, 2.0]).is_err());
    }
}
