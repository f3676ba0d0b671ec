//! The `UBSS` container: mixing matrix, mixed frames and tail frames.
//!
//! ```text
//! offset  size  field
//!  0       4    magic "UBSS"
//!  4       1    version (1)
//!  5       1    quantization mode (0 float, 1 affine-8bit)
//!  6       2    m               u16 LE
//!  8       2    n               u16 LE
//! 10       4    width           u32 LE
//! 14       4    height          u32 LE
//! 18       4    mixed_count     u32 LE
//! 22       1    tail_count      u8
//! 23       8    scale           f64 LE (0 in float mode)
//! 31       8    offset          f64 LE (0 in float mode)
//! 39     8mn    matrix          f64 LE, row-major
//!        ...    mixed frames    f32 LE (float) or u8 (affine), frame-major
//!        ...    tail frames     u8 planes
//! ```

use std::fs;
use std::path::Path;

use ubssvc_core::{EncodedSequence, Frame, Matrix, MixingMatrix, QuantMode, Quantization};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"UBSS";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 39;

/// Serializes `enc`. Float-mode pixels are narrowed to `f32`.
pub fn encode_container(enc: &EncodedSequence) -> Result<Vec<u8>> {
    let (m, n) = (enc.matrix.rows(), enc.matrix.cols());
    let bad = |what: &str| Error::Format(format!("cannot store {what}"));
    let m16 = u16::try_from(m).map_err(|_| bad("more than 65535 mixtures"))?;
    let n16 = u16::try_from(n).map_err(|_| bad("more than 65535 sources"))?;
    let w32 = u32::try_from(enc.width).map_err(|_| bad("width above u32"))?;
    let h32 = u32::try_from(enc.height).map_err(|_| bad("height above u32"))?;
    let mixed_count =
        u32::try_from(enc.mixed_frames.len()).map_err(|_| bad("mixed count above u32"))?;
    let tail_count =
        u8::try_from(enc.tail_frames.len()).map_err(|_| bad("more than 255 tail frames"))?;
    if enc.mixed_frames.is_empty() || !enc.mixed_frames.len().is_multiple_of(m) {
        return Err(bad(
            "a mixed frame count that is not a positive multiple of m",
        ));
    }
    if enc.tail_frames.len() >= n {
        return Err(bad("a tail as long as a block"));
    }
    let plane = enc.width * enc.height;
    if enc
        .mixed_frames
        .iter()
        .chain(&enc.tail_frames)
        .any(|f| f.dims() != (enc.width, enc.height))
    {
        return Err(bad("frames whose size differs from the header"));
    }
    let q = enc.quantization;
    let (mode, scale, offset) = match q.mode {
        QuantMode::Float => (0u8, 0.0, 0.0),
        QuantMode::Affine8 => (1u8, q.scale, q.offset),
    };
    if !scale.is_finite() || !offset.is_finite() {
        return Err(Error::Core(ubssvc_core::Error::NonFinite(
            "quantization parameters",
        )));
    }

    let bytes_per_px = if mode == 0 { 4 } else { 1 };
    let mut out = Vec::with_capacity(
        HEADER_LEN
            + 8 * m * n
            + enc.mixed_frames.len() * plane * bytes_per_px
            + enc.tail_frames.len() * plane,
    );
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(mode);
    out.extend(m16.to_le_bytes());
    out.extend(n16.to_le_bytes());
    out.extend(w32.to_le_bytes());
    out.extend(h32.to_le_bytes());
    out.extend(mixed_count.to_le_bytes());
    out.push(tail_count);
    out.extend(scale.to_le_bytes());
    out.extend(offset.to_le_bytes());
    for v in enc.matrix.matrix().as_slice() {
        out.extend(v.to_le_bytes());
    }
    for f in &enc.mixed_frames {
        match q.mode {
            QuantMode::Float => {
                for &p in f.pixels() {
                    let narrow = p as f32;
                    if !narrow.is_finite() {
                        return Err(Error::Core(ubssvc_core::Error::NonFinite("mixed frame")));
                    }
                    out.extend(narrow.to_le_bytes());
                }
            }
            QuantMode::Affine8 => {
                for &p in f.pixels() {
                    if p != p.round() || !(0.0..=255.0).contains(&p) {
                        return Err(bad("an affine code outside 0..=255"));
                    }
                    out.push(p as u8);
                }
            }
        }
    }
    for f in &enc.tail_frames {
        out.extend(f.to_u8());
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> &'a [u8] {
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        s
    }

    fn array<const N: usize>(&mut self) -> [u8; N] {
        self.take(N).try_into().expect("length checked")
    }
}

pub fn decode_container(bytes: &[u8]) -> Result<EncodedSequence> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && &bytes[..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        return Err(Error::SizeMismatch {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4) != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = r.array::<1>()[0];
    if version != VERSION {
        return Err(Error::Version(version));
    }
    let mode = match r.array::<1>()[0] {
        0 => QuantMode::Float,
        1 => QuantMode::Affine8,
        other => return Err(Error::Format(format!("unknown quantization mode {other}"))),
    };
    let m = usize::from(u16::from_le_bytes(r.array()));
    let n = usize::from(u16::from_le_bytes(r.array()));
    let width = u32::from_le_bytes(r.array()) as usize;
    let height = u32::from_le_bytes(r.array()) as usize;
    let mixed_count = u32::from_le_bytes(r.array()) as usize;
    let tail_count = usize::from(r.array::<1>()[0]);
    let scale = f64::from_le_bytes(r.array());
    let offset = f64::from_le_bytes(r.array());

    if m < 2 || n <= m {
        return Err(Error::Format(format!(
            "header declares a {m}x{n} mixing matrix"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Format("header declares an empty frame".into()));
    }
    if mixed_count == 0 || !mixed_count.is_multiple_of(m) {
        return Err(Error::Format(format!(
            "mixed_count {mixed_count} is not a positive multiple of m = {m}"
        )));
    }
    if tail_count >= n {
        return Err(Error::Format(format!(
            "tail_count {tail_count} is not below n = {n}"
        )));
    }
    let plane = width
        .checked_mul(height)
        .ok_or_else(|| Error::Format("frame size overflows".into()))?;
    let px_bytes = if mode == QuantMode::Float { 4 } else { 1 };
    let expected = [
        8 * m * n,
        mixed_count * plane * px_bytes,
        tail_count * plane,
    ]
    .iter()
    .try_fold(HEADER_LEN, |acc, &x| acc.checked_add(x))
    .ok_or_else(|| Error::Format("declared sizes overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::SizeMismatch {
            expected,
            actual: bytes.len(),
        });
    }

    let entries: Vec<f64> = (0..m * n).map(|_| f64::from_le_bytes(r.array())).collect();
    let matrix = MixingMatrix::new(Matrix::new(m, n, entries)?)?;
    let quantization = match mode {
        QuantMode::Float => Quantization::FLOAT,
        QuantMode::Affine8 => {
            if !(scale.is_finite() && scale > 0.0 && offset.is_finite()) {
                return Err(Error::Format("invalid affine scale/offset".into()));
            }
            Quantization {
                mode,
                scale,
                offset,
            }
        }
    };
    let mut mixed_frames = Vec::with_capacity(mixed_count);
    for _ in 0..mixed_count {
        let px: Vec<f64> = match mode {
            QuantMode::Float => r
                .take(plane * 4)
                .chunks_exact(4)
                .map(|c| f64::from(f32::from_le_bytes(c.try_into().expect("4 bytes"))))
                .collect(),
            QuantMode::Affine8 => r.take(plane).iter().map(|&b| f64::from(b)).collect(),
        };
        mixed_frames.push(Frame::new(width, height, px)?);
    }
    let tail_frames = (0..tail_count)
        .map(|_| Frame::from_u8(width, height, r.take(plane)))
        .collect::<ubssvc_core::Result<Vec<_>>>()?;
    Ok(EncodedSequence {
        matrix,
        width,
        height,
        mixed_frames,
        tail_frames,
        quantization,
    })
}

pub fn write_container(enc: &EncodedSequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_container(enc)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_container(path: impl AsRef<Path>) -> Result<EncodedSequence> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_container(&bytes)
}
