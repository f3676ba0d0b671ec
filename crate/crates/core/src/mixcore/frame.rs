use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A single-plane frame of real-valued pixels in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::EmptyFrame);
        }
        if !pixels.iter().all(|p| p.is_finite()) {
            return Err(Error::NonFinite("frame pixels"));
        }
        Ok(Frame {
            width,
            height,
            pixels,
        })
    }

    /// Frame with every pixel set to `value`. Panics on zero dimensions.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "frame dimensions must be positive");
        Frame {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_u8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Frame::new(width, height, bytes.iter().map(|&b| f64::from(b)).collect())
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Pixel count `width * height`.
    #[inline]
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    /// Clamps to `[0, 255]` and rounds half away from zero.
    pub fn to_u8(&self) -> Vec<u8> {
        self.pixels.iter().map(|&p| quantize_u8(p)).collect()
    }

    /// The same frame after a trip through 8-bit storage.
    pub fn quantized_8bit(&self) -> Frame {
        Frame {
            width: self.width,
            height: self.height,
            pixels: self
                .pixels
                .iter()
                .map(|&p| f64::from(quantize_u8(p)))
                .collect(),
        }
    }

    /// Extends to the next even width and height by repeating the last
    /// column and row.
    pub fn pad_even(&self) -> Frame {
        let w = self.width + self.width % 2;
        let h = self.height + self.height % 2;
        if (w, h) == self.dims() {
            return self.clone();
        }
        let mut pixels = Vec::with_capacity(w * h);
        for y in 0..h {
            let sy = y.min(self.height - 1);
            for x in 0..w {
                pixels.push(self.get(x.min(self.width - 1), sy));
            }
        }
        Frame {
            width: w,
            height: h,
            pixels,
        }
    }

    /// Top-left `width x height` window. Panics if the window is larger
    /// than the frame.
    pub fn crop(&self, width: usize, height: usize) -> Frame {
        assert!(width <= self.width && height <= self.height && width > 0 && height > 0);
        if (width, height) == self.dims() {
            return self.clone();
        }
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            pixels.extend_from_slice(&self.pixels[y * self.width..y * self.width + width]);
        }
        Frame {
            width,
            height,
            pixels,
        }
    }
}

pub(crate) fn quantize_u8(v: f64) -> u8 {
    // f64::round is half-away-from-zero; values are clamped first.
    libm::round(v.clamp(0.0, 255.0)) as u8
}

pub(crate) fn check_uniform(frames: &[Frame]) -> Result<(usize, usize)> {
    let first = frames.first().ok_or(Error::FrameCount {
        expected: 1,
        actual: 0,
    })?;
    let (want_w, want_h) = first.dims();
    for f in frames {
        if f.dims() != (want_w, want_h) {
            return Err(Error::Dimensions {
                want_w,
                want_h,
                got_w: f.width,
                got_h: f.height,
            });
        }
    }
    Ok((want_w, want_h))
}

/// `n` source frames of a common size, the rows of the source matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameBlock {
    frames: Vec<Frame>,
}

impl FrameBlock {
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::FrameCount {
                expected: 2,
                actual: frames.len(),
            });
        }
        check_uniform(&frames)?;
        Ok(FrameBlock { frames })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.frames[0].dims()
    }
}

/// `m` mixed frames of a common size, the rows of the observation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedBlock {
    frames: Vec<Frame>,
}

impl MixedBlock {
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::FrameCount {
                expected: 2,
                actual: frames.len(),
            });
        }
        check_uniform(&frames)?;
        Ok(MixedBlock { frames })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.frames[0].dims()
    }
}
