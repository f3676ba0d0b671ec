//! Frames, the mixing matrix, and the encoder-side mixing operation.

mod frame;
mod matrix;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub(crate) use frame::check_uniform;
pub use frame::{Frame, FrameBlock, MixedBlock};
pub use matrix::{
    generalized_inverse, validate_mixing_matrix, MixingMatrix, ValidationReport, DEFAULT_DET_FLOOR,
    DEFAULT_MAX_CONDITION, DEFAULT_MIXING_ROWS,
};

/// Default magnitude below which [`check_sparsity`] treats an entry as zero.
pub const DEFAULT_ZERO_EPS: f64 = 1e-12;

/// Mixes `n` source frames into `m` frames: `x_i(t) = Σ_j A[i][j] s_j(t)`.
pub fn mix_block(a: &MixingMatrix, sources: &FrameBlock) -> Result<MixedBlock> {
    if sources.len() != a.cols() {
        return Err(Error::FrameCount {
            expected: a.cols(),
            actual: sources.len(),
        });
    }
    let (w, h) = sources.dims();
    let frames = (0..a.rows())
        .map(|i| {
            let mut out = vec![0.0; w * h];
            for (j, src) in sources.frames().iter().enumerate() {
                let weight = a.get(i, j);
                for (o, &p) in out.iter_mut().zip(src.pixels()) {
                    *o += weight * p;
                }
            }
            Frame::new(w, h, out)
        })
        .collect::<Result<Vec<_>>>()?;
    MixedBlock::new(frames)
}

/// Column-sparsity summary of an `n x T` matrix against the bound `m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityReport {
    /// `histogram[k]` = number of columns with exactly `k` nonzeros.
    pub histogram: Vec<usize>,
    pub worst_column_nonzeros: usize,
    /// Fraction of columns with at most `m - 1` nonzeros (1.0 when empty).
    pub satisfied_fraction: f64,
    pub satisfied: bool,
}

/// Counts nonzero entries (`|v| > zero_eps`) per column of the matrix whose
/// rows are `rows`, e.g. the pixels of a [`FrameBlock`] or subband
/// coefficients.
pub fn check_sparsity<R: AsRef<[f64]>>(
    rows: &[R],
    m: usize,
    zero_eps: f64,
) -> Result<SparsityReport> {
    let n = rows.len();
    if m == 0 || m > n {
        return Err(Error::Parameter("need 1 <= m <= n"));
    }
    let t = rows[0].as_ref().len();
    if rows.iter().any(|r| r.as_ref().len() != t) {
        return Err(Error::Shape("rows differ in length"));
    }
    let mut histogram = vec![0usize; n + 1];
    for col in 0..t {
        let nz = rows
            .iter()
            .filter(|r| r.as_ref()[col].abs() > zero_eps)
            .count();
        histogram[nz] += 1;
    }
    let worst_column_nonzeros = histogram.iter().rposition(|&c| c > 0).unwrap_or(0);
    let ok: usize = histogram[..m].iter().sum();
    Ok(SparsityReport {
        satisfied_fraction: if t == 0 { 1.0 } else { ok as f64 / t as f64 },
        satisfied: worst_column_nonzeros < m,
        worst_column_nonzeros,
        histogram,
    })
}

impl FrameBlock {
    /// [`check_sparsity`] over the pixel columns of this block.
    pub fn check_sparsity(&self, m: usize, zero_eps: f64) -> Result<SparsityReport> {
        let rows: Vec<&[f64]> = self.frames().iter().map(Frame::pixels).collect();
        check_sparsity(&rows, m, zero_eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(frames: Vec<Vec<f64>>, w: usize, h: usize) -> FrameBlock {
        FrameBlock::new(
            frames
                .into_iter()
                .map(|p| Frame::new(w, h, p).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_sources_mix_to_zero() {
        let a = MixingMatrix::default();
        let s = block(vec![vec![0.0; 6]; 4], 3, 2);
        let x = mix_block(&a, &s).unwrap();
        assert_eq!(x.len(), 3);
        assert!(x
            .frames()
            .iter()
            .all(|f| f.pixels().iter().all(|&p| p == 0.0)));
    }

    #[test]
    fn constant_sources_give_row_sums() {
        let a = MixingMatrix::default();
        let s = block(vec![vec![100.0; 4]; 4], 2, 2);
        let x = mix_block(&a, &s).unwrap();
        for (f, want) in x.frames().iter().zip([165.0, 175.0, 165.0]) {
            for &p in f.pixels() {
                assert!((p - want).abs() < 1e-12, "{p} vs {want}");
            }
        }
    }

    #[test]
    fn basis_sources_copy_matrix_rows() {
        let a = MixingMatrix::default();
        let frames = (0..4)
            .map(|j| (0..4).map(|t| if t == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let x = mix_block(&a, &block(frames, 4, 1)).unwrap();
        for (i, f) in x.frames().iter().enumerate() {
            assert_eq!(f.pixels(), a.matrix().row(i));
        }
    }

    #[test]
    fn frame_count_mismatch() {
        let a = MixingMatrix::default();
        let s = block(vec![vec![0.0; 4]; 3], 2, 2);
        assert_eq!(
            mix_block(&a, &s),
            Err(Error::FrameCount {
                expected: 4,
                actual: 3
            })
        );
    }

    #[test]
    fn sparsity_counts() {
        let ok = check_sparsity(&[[5.0], [0.0], [-2.0], [0.0]], 3, DEFAULT_ZERO_EPS).unwrap();
        assert!(ok.satisfied);
        assert_eq!(ok.worst_column_nonzeros, 2);

        let bad = check_sparsity(&[[1.0], [1.0], [1.0], [0.0]], 3, DEFAULT_ZERO_EPS).unwrap();
        assert!(!bad.satisfied);
        assert_eq!(bad.worst_column_nonzeros, 3);
        assert_eq!(bad.satisfied_fraction, 0.0);

        let zero = check_sparsity(&[[0.0; 5]; 4], 3, DEFAULT_ZERO_EPS).unwrap();
        assert!(zero.satisfied);
        assert_eq!(zero.satisfied_fraction, 1.0);
        assert_eq!(zero.histogram, vec![5, 0, 0, 0, 0]);
    }

    #[test]
    fn sparsity_mixed_columns() {
        let rows = [[1.0, 1.0], [0.0, 1.0], [0.0, 1.0], [0.0, 0.0]];
        let r = check_sparsity(&rows, 3, DEFAULT_ZERO_EPS).unwrap();
        assert_eq!(r.histogram, vec![0, 1, 0, 1, 0]);
        assert_eq!(r.satisfied_fraction, 0.5);
        assert!(check_sparsity(&rows, 5, DEFAULT_ZERO_EPS).is_err());
    }
}
