use alloc::vec::Vec;

use crate::combinations::Combinations;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Default lower bound on `|det|` for every square submatrix.
pub const DEFAULT_DET_FLOOR: f64 = 1e-9;

/// Largest 1-norm condition estimate of `A Aᵀ` accepted by
/// [`generalized_inverse`].
pub const DEFAULT_MAX_CONDITION: f64 = 1e12;

/// The 3x4 mixing matrix used by the default codec configuration.
pub const DEFAULT_MIXING_ROWS: [[f64; 4]; 3] = [
    [0.50, 0.75, 0.25, 0.15],
    [0.40, 0.25, 0.10, 1.00],
    [0.45, 0.10, 0.85, 0.25],
];

/// Outcome of checking every `m x m` submatrix of a candidate mixing matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub passed: bool,
    /// Column-index set (0-based, ascending) and `|det|` of each submatrix,
    /// in lexicographic order of the index sets.
    pub submatrix_results: Vec<(Vec<usize>, f64)>,
    pub min_abs_determinant: f64,
}

/// Checks that `a` is underdetermined and that every square submatrix formed
/// from `rows` of its columns has `|det| > det_floor`.
pub fn validate_mixing_matrix(a: &Matrix, det_floor: f64) -> Result<ValidationReport> {
    let (m, n) = (a.rows(), a.cols());
    if m >= n {
        return Err(Error::NotUnderdetermined { rows: m, cols: n });
    }
    if m == 0 {
        return Err(Error::Shape("mixing matrix has no rows"));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("mixing matrix"));
    }
    if !(det_floor > 0.0) {
        return Err(Error::Parameter("det_floor must be positive"));
    }
    let mut submatrix_results = Vec::new();
    let mut min_abs_determinant = f64::INFINITY;
    for cols in Combinations::new(n, m) {
        let det = a.select_columns(&cols).determinant()?.abs();
        min_abs_determinant = min_abs_determinant.min(det);
        submatrix_results.push((cols, det));
    }
    Ok(ValidationReport {
        passed: submatrix_results.iter().all(|(_, d)| *d > det_floor),
        submatrix_results,
        min_abs_determinant,
    })
}

/// An `m x n` mixing matrix with `2 <= m < n` whose square submatrices are
/// all nonsingular.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    matrix: Matrix,
}

impl MixingMatrix {
    /// Validates with [`DEFAULT_DET_FLOOR`].
    pub fn new(matrix: Matrix) -> Result<Self> {
        Self::with_det_floor(matrix, DEFAULT_DET_FLOOR)
    }

    pub fn with_det_floor(matrix: Matrix, det_floor: f64) -> Result<Self> {
        if matrix.rows() < 2 {
            return Err(Error::Shape("mixing matrix needs at least two rows"));
        }
        let report = validate_mixing_matrix(&matrix, det_floor)?;
        if !report.passed {
            return Err(Error::SingularSubmatrix {
                min_abs_det: report.min_abs_determinant,
            });
        }
        Ok(MixingMatrix { matrix })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// Number of mixed frames `m`.
    #[inline]
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    /// Number of source frames `n`.
    #[inline]
    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// Column `j`, the mixing weights of source `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.matrix.column(j)
    }
}

impl Default for MixingMatrix {
    fn default() -> Self {
        MixingMatrix::from_rows(&DEFAULT_MIXING_ROWS).expect("default mixing matrix is valid")
    }
}

/// Minimum-norm right inverse `Aᵀ (A Aᵀ)⁻¹`, an `n x m` matrix.
pub fn generalized_inverse(a: &MixingMatrix) -> Result<Matrix> {
    a.matrix().right_pseudo_inverse(DEFAULT_MAX_CONDITION)
}
