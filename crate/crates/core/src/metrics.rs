//! Mean squared error and peak signal-to-noise ratio for 8-bit video.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mixcore::Frame;

/// Peak value of the 8-bit pixel range.
pub const PEAK: f64 = 255.0;

/// `Σ (a − b)² / (width · height)`.
pub fn frame_mse(a: &Frame, b: &Frame) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::Dimensions {
            want_w: a.width(),
            want_h: a.height(),
            got_w: b.width(),
            got_h: b.height(),
        });
    }
    let sum: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.len() as f64)
}

/// PSNR in dB for a given MSE; `f64::INFINITY` when the MSE is zero.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * libm::log10(PEAK * PEAK / mse)
    }
}

/// `10 log₁₀(255² / MSE)`, with `f64::INFINITY` for identical frames.
pub fn frame_psnr(a: &Frame, b: &Frame) -> Result<f64> {
    frame_mse(a, b).map(psnr_from_mse)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub per_frame_psnr: Vec<f64>,
    pub per_frame_mse: Vec<f64>,
    /// Mean of the finite per-frame PSNR values, `f64::INFINITY` if there
    /// are none.
    pub mean_psnr: f64,
    pub infinite_count: usize,
}

impl QualityReport {
    pub fn frames(&self) -> usize {
        self.per_frame_psnr.len()
    }

    pub fn min_psnr(&self) -> f64 {
        self.per_frame_psnr
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn mean_mse(&self) -> f64 {
        self.per_frame_mse.iter().sum::<f64>() / self.per_frame_mse.len() as f64
    }
}

/// Per-frame metrics between two equally long sequences.
pub fn sequence_report(orig: &[Frame], rec: &[Frame]) -> Result<QualityReport> {
    if orig.is_empty() || orig.len() != rec.len() {
        return Err(Error::FrameCount {
            expected: orig.len().max(1),
            actual: rec.len(),
        });
    }
    let per_frame_mse = orig
        .iter()
        .zip(rec)
        .map(|(a, b)| frame_mse(a, b))
        .collect::<Result<Vec<_>>>()?;
    let per_frame_psnr: Vec<f64> = per_frame_mse.iter().map(|&m| psnr_from_mse(m)).collect();
    let finite: Vec<f64> = per_frame_psnr
        .iter()
        .copied()
        .filter(|p| p.is_finite())
        .collect();
    let mean_psnr = if finite.is_empty() {
        f64::INFINITY
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    Ok(QualityReport {
        infinite_count: per_frame_psnr.len() - finite.len(),
        per_frame_psnr,
        per_frame_mse,
        mean_psnr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn uniform_differences() {
        let white = Frame::filled(4, 3, 255.0);
        let black = Frame::filled(4, 3, 0.0);
        assert_eq!(frame_mse(&white, &black).unwrap(), 65025.0);
        assert_eq!(frame_psnr(&white, &black).unwrap(), 0.0);
        assert_eq!(frame_mse(&black, &black).unwrap(), 0.0);
        assert_eq!(frame_psnr(&black, &black).unwrap(), f64::INFINITY);

        let shifted = Frame::filled(4, 3, 16.0);
        assert_eq!(frame_mse(&shifted, &black).unwrap(), 256.0);
        // 10 log10(65025 / 256)
        let p = frame_psnr(&shifted, &black).unwrap();
        assert!((p - 24.048_403_955_560_61).abs() < 1e-9, "{p}");
    }

    #[test]
    fn dimension_mismatch() {
        assert!(frame_mse(&Frame::filled(2, 2, 0.0), &Frame::filled(2, 4, 0.0)).is_err());
    }

    #[test]
    fn sequence_aggregation() {
        let a = vec![Frame::filled(2, 2, 10.0); 3];
        let same = sequence_report(&a, &a).unwrap();
        assert_eq!(same.infinite_count, 3);
        assert_eq!(same.mean_psnr, f64::INFINITY);

        let mut b = a.clone();
        b[1] = Frame::filled(2, 2, 26.0);
        let r = sequence_report(&a, &b).unwrap();
        assert_eq!(r.infinite_count, 2);
        assert!((r.mean_psnr - 24.05).abs() < 0.01);

        assert!(sequence_report(&[], &[]).is_err());
        assert!(sequence_report(&a, &a[..2]).is_err());
    }
}
