//! Sparse component recovery against a known mixing matrix.
//!
//! If a source column has at most `m - 1` nonzero entries, its mixture lies
//! in the span of the corresponding `m - 1` columns of `A`. Every observed
//! column is therefore matched to the closest of the `C(n, m-1)` candidate
//! subspaces, expressed in that subspace's mixing columns, and scattered
//! back into an `n`-vector with zeros elsewhere.

use alloc::vec;
use alloc::vec::Vec;

use crate::combinations::{binomial, Combinations};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, Matrix};
use crate::mixcore::{MixingMatrix, DEFAULT_MAX_CONDITION};

/// Default relative-residual tolerance for exactly sparse data.
pub const DEFAULT_TAU: f64 = 1e-8;

/// Suggested tolerance for real, approximately sparse wavelet detail.
pub const WAVELET_TAU: f64 = 0.05;

/// Columns with norm below this fraction of the block's largest column norm
/// reconstruct to zero.
pub const ZERO_COLUMN_RATIO: f64 = 1e-12;

/// Relative residuals closer than this count as a tie; the lower plane
/// index wins.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Span of `m - 1` columns of the mixing matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    index_set: Vec<usize>,
    basis: Matrix,
    orthonormal_basis: Matrix,
    gram_inverse: Matrix,
}

impl Hyperplane {
    fn new(a: &MixingMatrix, index_set: Vec<usize>) -> Result<Self> {
        let basis = a.matrix().select_columns(&index_set);
        let orthonormal_basis = orthonormalize(&basis)?;
        let gram_inverse = basis
            .transpose()
            .matmul(&basis)?
            .inverse(DEFAULT_MAX_CONDITION)?;
        Ok(Hyperplane {
            index_set,
            basis,
            orthonormal_basis,
            gram_inverse,
        })
    }

    /// Source indices (0-based, ascending) whose mixing columns span the plane.
    pub fn index_set(&self) -> &[usize] {
        &self.index_set
    }

    /// The spanning mixing columns, `m x (m-1)`.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Orthonormal columns with the same span as [`Hyperplane::basis`].
    pub fn orthonormal_basis(&self) -> &Matrix {
        &self.orthonormal_basis
    }

    /// Least-squares coefficients of `x` in the spanning columns.
    pub fn coefficients(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.index_set.len()];
        self.coefficients_into(x, &mut out);
        out
    }

    fn coefficients_into(&self, x: &[f64], out: &mut [f64]) {
        let k = self.index_set.len();
        let mut bt_x = [0.0f64; 16];
        let mut bt_x_heap;
        let rhs: &mut [f64] = if k <= bt_x.len() {
            &mut bt_x[..k]
        } else {
            bt_x_heap = vec![0.0; k];
            &mut bt_x_heap
        };
        for (c, r) in rhs.iter_mut().enumerate() {
            *r = (0..x.len()).map(|i| self.basis[(i, c)] * x[i]).sum();
        }
        for (r, o) in out.iter_mut().enumerate() {
            *o = dot(self.gram_inverse.row(r), rhs);
        }
    }

    /// Projection matrix onto the plane built from the spanning columns,
    /// `B (BᵀB)⁻¹ Bᵀ`.
    pub fn projector_from_basis(&self) -> Matrix {
        let bt = self.basis.transpose();
        self.basis
            .matmul(&self.gram_inverse)
            .and_then(|p| p.matmul(&bt))
            .expect("conforming shapes")
    }

    /// Projection matrix onto the plane built from the orthonormal basis,
    /// `Q Qᵀ`.
    pub fn projector_from_orthonormal(&self) -> Matrix {
        self.orthonormal_basis
            .matmul(&self.orthonormal_basis.transpose())
            .expect("conforming shapes")
    }
}

/// Modified Gram-Schmidt, run twice for stability.
fn orthonormalize(basis: &Matrix) -> Result<Matrix> {
    let (m, k) = (basis.rows(), basis.cols());
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let original = basis.column(j);
        let scale = norm2(&original);
        let mut v = original;
        for _ in 0..2 {
            for prev in &q {
                let c = dot(prev, &v);
                for (vi, pi) in v.iter_mut().zip(prev) {
                    *vi -= c * pi;
                }
            }
        }
        let nv = norm2(&v);
        if !(nv > 1e-10 * scale) {
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
            });
        }
        v.iter_mut().for_each(|x| *x /= nv);
        q.push(v);
    }
    let mut out = Matrix::zeros(m, k);
    for (j, col) in q.iter().enumerate() {
        for i in 0..m {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

/// All `C(n, m-1)` candidate planes, in lexicographic index-set order.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneSet {
    planes: Vec<Hyperplane>,
    m: usize,
    n: usize,
}

impl HyperplaneSet {
    pub fn planes(&self) -> &[Hyperplane] {
        &self.planes
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    /// Mixture dimension `m`.
    pub fn mixtures(&self) -> usize {
        self.m
    }

    /// Source count `n`.
    pub fn sources(&self) -> usize {
        self.n
    }

    /// Best plane and its relative residual, or `None` for a zero column.
    /// `scratch` holds the per-plane residuals between calls.
    fn best_plane(&self, x: &[f64], zero_eps: f64, scratch: &mut Vec<f64>) -> Option<(usize, f64)> {
        let norm = norm2(x);
        if norm <= zero_eps || norm == 0.0 {
            return None;
        }
        scratch.clear();
        scratch.extend(self.planes.iter().map(|p| column_residual(p, x) / norm));
        let min = scratch.iter().copied().fold(f64::INFINITY, f64::min);
        scratch
            .iter()
            .position(|&r| r <= min + TIE_TOLERANCE)
            .map(|q| (q, scratch[q]))
    }

    /// Recovers an `n x T` source matrix from an `m x T` observation matrix.
    pub fn recover_block(&self, x: &Matrix, tau: f64) -> Result<(Matrix, RecoveryStats)> {
        let (out, residuals, zero) = self.recover_block_raw(x, tau)?;
        Ok((out, RecoveryStats::from_residuals(zero, tau, residuals)))
    }

    /// Like [`HyperplaneSet::recover_block`] but hands back the raw relative
    /// residual of every nonzero column plus the zero-column count.
    pub fn recover_block_raw(&self, x: &Matrix, tau: f64) -> Result<(Matrix, Vec<f64>, usize)> {
        if x.rows() != self.m {
            return Err(Error::Shape("observation rows differ from mixture count"));
        }
        if !(tau >= 0.0) {
            return Err(Error::Parameter("tau must be non-negative"));
        }
        let t = x.cols();
        let mut columns = vec![0.0; self.m * t];
        for c in 0..t {
            for r in 0..self.m {
                columns[c * self.m + r] = x[(r, c)];
            }
        }
        let max_norm = columns
            .chunks_exact(self.m.max(1))
            .map(norm2)
            .fold(0.0, f64::max);
        let zero_eps = ZERO_COLUMN_RATIO * max_norm;

        let mut out = Matrix::zeros(self.n, t);
        let mut residuals = Vec::with_capacity(t);
        let mut zero = 0;
        let mut lambda = vec![0.0; self.m - 1];
        let mut scratch = Vec::with_capacity(self.planes.len());
        for (c, col) in columns.chunks_exact(self.m).enumerate() {
            match self.best_plane(col, zero_eps, &mut scratch) {
                None => zero += 1,
                Some((q, r)) => {
                    let plane = &self.planes[q];
                    plane.coefficients_into(col, &mut lambda);
                    for (&i, &l) in plane.index_set.iter().zip(&lambda) {
                        out[(i, c)] = l;
                    }
                    residuals.push(r);
                }
            }
        }
        Ok((out, residuals, zero))
    }
}

pub fn build_hyperplanes(a: &MixingMatrix) -> Result<HyperplaneSet> {
    let (m, n) = (a.rows(), a.cols());
    let planes = Combinations::new(n, m - 1)
        .map(|set| Hyperplane::new(a, set))
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(planes.len(), binomial(n, m - 1));
    Ok(HyperplaneSet { planes, m, n })
}

/// `‖x − P x‖₂` for the orthogonal projection `P` onto the plane.
pub fn column_residual(h: &Hyperplane, x: &[f64]) -> f64 {
    let q = &h.orthonormal_basis;
    assert_eq!(
        x.len(),
        q.rows(),
        "column length differs from mixture count"
    );
    let mut r = [0.0f64; 16];
    let mut heap;
    let r: &mut [f64] = if x.len() <= r.len() {
        &mut r[..x.len()]
    } else {
        heap = vec![0.0; x.len()];
        &mut heap
    };
    r.copy_from_slice(x);
    for j in 0..q.cols() {
        let c: f64 = (0..r.len()).map(|i| q[(i, j)] * r[i]).sum();
        for (i, ri) in r.iter_mut().enumerate() {
            *ri -= c * q[(i, j)];
        }
    }
    norm2(r)
}

/// One observed column matched to a plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnAssignment {
    /// Position in the [`HyperplaneSet`].
    pub plane_index: usize,
    /// Source indices of the plane.
    pub index_set: Vec<usize>,
    /// Coefficients aligned with `index_set`.
    pub coefficients: Vec<f64>,
    /// Relative residual `‖x − P x‖ / ‖x‖` of the chosen plane.
    pub residual: f64,
    /// The best plane still missed the tolerance.
    pub forced: bool,
    /// The column was below the zero threshold.
    pub zero: bool,
}

/// Assigns `x` to the plane with the smallest relative residual.
///
/// Columns with `‖x‖ <= zero_eps` get the zero assignment, whose
/// reconstruction is all zeros.
pub fn classify_column(hs: &HyperplaneSet, x: &[f64], tau: f64, zero_eps: f64) -> ColumnAssignment {
    let mut scratch = Vec::with_capacity(hs.planes.len());
    match hs.best_plane(x, zero_eps, &mut scratch) {
        None => ColumnAssignment {
            plane_index: 0,
            index_set: hs.planes[0].index_set.clone(),
            coefficients: vec![0.0; hs.m - 1],
            residual: 0.0,
            forced: false,
            zero: true,
        },
        Some((q, residual)) => {
            let plane = &hs.planes[q];
            ColumnAssignment {
                plane_index: q,
                index_set: plane.index_set.clone(),
                coefficients: plane.coefficients(x),
                residual,
                forced: residual > tau,
                zero: false,
            }
        }
    }
}

/// Scatters the assignment's coefficients into an `n`-vector.
pub fn reconstruct_column(asgn: &ColumnAssignment, n: usize) -> Result<Vec<f64>> {
    if asgn.index_set.len() != asgn.coefficients.len() {
        return Err(Error::Shape("coefficients do not match plane index set"));
    }
    let mut out = vec![0.0; n];
    for (&i, &l) in asgn.index_set.iter().zip(&asgn.coefficients) {
        *out.get_mut(i)
            .ok_or(Error::IndexOutOfRange { index: i, n })? = l;
    }
    Ok(out)
}

/// Builds the plane set for `a` and recovers every column of `x`.
pub fn recover_block(a: &MixingMatrix, x: &Matrix, tau: f64) -> Result<(Matrix, RecoveryStats)> {
    build_hyperplanes(a)?.recover_block(x, tau)
}

/// `A⁺ x`, the minimum-norm solution for every column.
pub fn recover_dense(pinv: &Matrix, x: &Matrix) -> Result<Matrix> {
    pinv.matmul(x)
}

/// Column outcome counts and relative-residual quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RecoveryStats {
    pub zero_columns: usize,
    pub clean_columns: usize,
    pub forced_columns: usize,
    /// Nearest-rank quantiles at [`RecoveryStats::QUANTILES`] over nonzero
    /// columns; all zero when there are none.
    pub residual_quantiles: [f64; 5],
}

impl RecoveryStats {
    pub const QUANTILES: [f64; 5] = [0.0, 0.5, 0.9, 0.99, 1.0];

    pub fn from_residuals(zero_columns: usize, tau: f64, mut residuals: Vec<f64>) -> Self {
        let forced_columns = residuals.iter().filter(|&&r| r > tau).count();
        residuals.sort_by(f64::total_cmp);
        let mut residual_quantiles = [0.0; 5];
        if !residuals.is_empty() {
            let len = residuals.len();
            for (slot, p) in residual_quantiles.iter_mut().zip(Self::QUANTILES) {
                let rank = libm::ceil(p * len as f64) as usize;
                *slot = residuals[rank.clamp(1, len) - 1];
            }
        }
        RecoveryStats {
            zero_columns,
            clean_columns: residuals.len() - forced_columns,
            forced_columns,
            residual_quantiles,
        }
    }

    pub fn total_columns(&self) -> usize {
        self.zero_columns + self.clean_columns + self.forced_columns
    }
}
