//! One-level orthonormal 2-D Haar transform.
//!
//! Each 2x2 pixel cell `[a b; c d]` maps to one coefficient in each subband.
//! The row pass pairs horizontally adjacent pixels, the column pass pairs
//! vertically adjacent row outputs, both with `1/√2` weights, which folds to
//! a factor of one half per coefficient:
//!
//! ```text
//! ll = (a + b + c + d) / 2    row approx, column approx
//! lh = (a - b + c - d) / 2    row detail, column approx
//! hl = (a + b - c - d) / 2    row approx, column detail
//! hh = (a - b - c + d) / 2    row detail, column detail
//! ```

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mixcore::Frame;

/// The four quarter-size planes of a one-level decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandImage {
    pub ll: Frame,
    pub lh: Frame,
    pub hl: Frame,
    pub hh: Frame,
    pub original_width: usize,
    pub original_height: usize,
}

impl SubbandImage {
    /// Subbands in `[ll, lh, hl, hh]` order.
    pub fn planes(&self) -> [&Frame; 4] {
        [&self.ll, &self.lh, &self.hl, &self.hh]
    }

    /// Sum of squared coefficients over all four planes.
    pub fn energy(&self) -> f64 {
        self.planes()
            .iter()
            .flat_map(|p| p.pixels())
            .map(|v| v * v)
            .sum()
    }
}

pub fn haar_forward(f: &Frame) -> Result<SubbandImage> {
    let (w, h) = f.dims();
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::OddDimensions {
            width: w,
            height: h,
        });
    }
    let (hw, hh_) = (w / 2, h / 2);
    let cap = hw * hh_;
    let (mut ll, mut lh, mut hl, mut hh) = (
        Vec::with_capacity(cap),
        Vec::with_capacity(cap),
        Vec::with_capacity(cap),
        Vec::with_capacity(cap),
    );
    let px = f.pixels();
    for y in 0..hh_ {
        let top = &px[2 * y * w..(2 * y + 1) * w];
        let bottom = &px[(2 * y + 1) * w..(2 * y + 2) * w];
        for x in 0..hw {
            let (a, b) = (top[2 * x], top[2 * x + 1]);
            let (c, d) = (bottom[2 * x], bottom[2 * x + 1]);
            ll.push(0.5 * ((a + b) + (c + d)));
            lh.push(0.5 * ((a - b) + (c - d)));
            hl.push(0.5 * ((a + b) - (c + d)));
            hh.push(0.5 * ((a - b) - (c - d)));
        }
    }
    Ok(SubbandImage {
        ll: Frame::new(hw, hh_, ll)?,
        lh: Frame::new(hw, hh_, lh)?,
        hl: Frame::new(hw, hh_, hl)?,
        hh: Frame::new(hw, hh_, hh)?,
        original_width: w,
        original_height: h,
    })
}

pub fn haar_inverse(sb: &SubbandImage) -> Result<Frame> {
    let dims = sb.ll.dims();
    if sb.planes().iter().any(|p| p.dims() != dims) {
        return Err(Error::Shape("subband planes differ in size"));
    }
    let (hw, hh_) = dims;
    let (w, h) = (2 * hw, 2 * hh_);
    if (sb.original_width, sb.original_height) != (w, h) {
        return Err(Error::Shape("subband size does not match original size"));
    }
    let mut out = alloc::vec![0.0; w * h];
    let (ll, lh, hl, hh) = (
        sb.ll.pixels(),
        sb.lh.pixels(),
        sb.hl.pixels(),
        sb.hh.pixels(),
    );
    for y in 0..hh_ {
        for x in 0..hw {
            let k = y * hw + x;
            let (s, dr, dc, dd) = (ll[k], lh[k], hl[k], hh[k]);
            // undo column pass, then row pass
            let top_approx = s + dc;
            let bottom_approx = s - dc;
            let top_detail = dr + dd;
            let bottom_detail = dr - dd;
            let t = 2 * y * w + 2 * x;
            out[t] = 0.5 * (top_approx + top_detail);
            out[t + 1] = 0.5 * (top_approx - top_detail);
            out[t + w] = 0.5 * (bottom_approx + bottom_detail);
            out[t + w + 1] = 0.5 * (bottom_approx - bottom_detail);
        }
    }
    Frame::new(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const SQRT_HALF: f64 = core::f64::consts::FRAC_1_SQRT_2;

    // Two explicit 1-D passes with 1/√2 weights.
    fn two_pass_oracle(f: &Frame) -> [Vec<f64>; 4] {
        let (w, h) = f.dims();
        let mut row_a = vec![0.0; (w / 2) * h];
        let mut row_d = vec![0.0; (w / 2) * h];
        for y in 0..h {
            for x in 0..w / 2 {
                let (a, b) = (f.get(2 * x, y), f.get(2 * x + 1, y));
                row_a[y * (w / 2) + x] = (a + b) * SQRT_HALF;
                row_d[y * (w / 2) + x] = (a - b) * SQRT_HALF;
            }
        }
        let col = |src: &[f64], sign: f64| -> Vec<f64> {
            let hw = w / 2;
            let mut out = vec![0.0; hw * (h / 2)];
            for y in 0..h / 2 {
                for x in 0..hw {
                    out[y * hw + x] =
                        (src[2 * y * hw + x] + sign * src[(2 * y + 1) * hw + x]) * SQRT_HALF;
                }
            }
            out
        };
        [
            col(&row_a, 1.0),
            col(&row_d, 1.0),
            col(&row_a, -1.0),
            col(&row_d, -1.0),
        ]
    }

    #[test]
    fn constant_cell() {
        let sb = haar_forward(&Frame::filled(2, 2, 4.0)).unwrap();
        assert_eq!(sb.ll.pixels(), &[8.0]);
        assert_eq!(sb.lh.pixels(), &[0.0]);
        assert_eq!(sb.hl.pixels(), &[0.0]);
        assert_eq!(sb.hh.pixels(), &[0.0]);
        assert_eq!(haar_inverse(&sb).unwrap(), Frame::filled(2, 2, 4.0));
    }

    #[test]
    fn hand_worked_cell() {
        let f = Frame::new(2, 2, vec![1.0, 3.0, 5.0, 7.0]).unwrap();
        let sb = haar_forward(&f).unwrap();
        let oracle = two_pass_oracle(&f);
        for (plane, want) in sb.planes().iter().zip(&oracle) {
            assert!((plane.pixels()[0] - want[0]).abs() < 1e-14);
        }
        assert_eq!(sb.ll.pixels(), &[8.0]);
        assert_eq!(sb.lh.pixels(), &[-2.0]);
        assert_eq!(sb.hl.pixels(), &[-4.0]);
        assert_eq!(sb.hh.pixels(), &[0.0]);
        assert_eq!(haar_inverse(&sb).unwrap(), f);
    }

    #[test]
    fn zero_frame() {
        let sb = haar_forward(&Frame::filled(4, 6, 0.0)).unwrap();
        assert_eq!(sb.energy(), 0.0);
        assert_eq!(sb.ll.dims(), (2, 3));
    }

    #[test]
    fn matches_two_pass_oracle() {
        let px: Vec<f64> = (0..48).map(|i| ((i * 37) % 23) as f64 - 7.5).collect();
        let f = Frame::new(8, 6, px).unwrap();
        let sb = haar_forward(&f).unwrap();
        for (plane, want) in sb.planes().iter().zip(&two_pass_oracle(&f)) {
            for (a, b) in plane.pixels().iter().zip(want) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            haar_forward(&Frame::filled(3, 2, 0.0)),
            Err(Error::OddDimensions { .. })
        ));
        let mut sb = haar_forward(&Frame::filled(4, 4, 1.0)).unwrap();
        sb.hh = Frame::filled(1, 2, 0.0);
        assert!(haar_inverse(&sb).is_err());
    }
}
