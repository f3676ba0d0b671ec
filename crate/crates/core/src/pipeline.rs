//! Sequence-level encoder and decoder.
//!
//! The encoder mixes consecutive groups of `n` frames into `m` frames in the
//! pixel domain. The decoder takes each group of `m` mixed frames into the
//! Haar domain, recovers the three detail subbands column by column against
//! the plane set of `A`, recovers the approximation subband with `A⁺`, and
//! transforms the `n` recovered subband sets back to frames.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metrics::{sequence_report, QualityReport};
use crate::mixcore::{
    check_uniform, generalized_inverse, mix_block, Frame, FrameBlock, MixingMatrix,
};
use crate::sca::{build_hyperplanes, recover_dense, RecoveryStats, DEFAULT_TAU};
use crate::wavelet::{haar_forward, haar_inverse, SubbandImage};

/// What to do with frames whose width or height is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PadPolicy {
    Reject,
    /// Repeat the last column/row before the transform, crop afterwards.
    #[default]
    EdgeReplicate,
}

/// Handling of the `count mod n` frames that do not fill a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailPolicy {
    /// Stored unmixed as 8-bit planes.
    #[default]
    Passthrough,
}

/// Storage representation of the mixed frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantMode {
    /// 32-bit floats.
    #[default]
    Float,
    /// One affine map of the whole mixed sequence onto `0..=255`.
    Affine8,
}

/// Mode plus the affine parameters; `value = code * scale + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantization {
    pub mode: QuantMode,
    pub scale: f64,
    pub offset: f64,
}

impl Quantization {
    pub const FLOAT: Quantization = Quantization {
        mode: QuantMode::Float,
        scale: 0.0,
        offset: 0.0,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodecConfig {
    pub matrix: MixingMatrix,
    /// Relative residual tolerance for detail-column plane membership.
    pub tau: f64,
    pub pad_policy: PadPolicy,
    pub tail_policy: TailPolicy,
    pub quantization: QuantMode,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            matrix: MixingMatrix::default(),
            tau: DEFAULT_TAU,
            pad_policy: PadPolicy::default(),
            tail_policy: TailPolicy::default(),
            quantization: QuantMode::default(),
        }
    }
}

impl CodecConfig {
    pub fn with_matrix(matrix: MixingMatrix) -> Self {
        CodecConfig {
            matrix,
            ..CodecConfig::default()
        }
    }

    /// Sources per block.
    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    /// Mixed frames per block.
    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau >= 0.0) {
            return Err(Error::Parameter("tau must be non-negative"));
        }
        Ok(())
    }
}

/// Output of the encoder: `b·m` mixed frames plus the unmixed tail.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSequence {
    pub matrix: MixingMatrix,
    pub width: usize,
    pub height: usize,
    /// Mixed pixel values, or 8-bit codes in [`QuantMode::Affine8`].
    pub mixed_frames: Vec<Frame>,
    /// Leftover source frames, 8-bit valued.
    pub tail_frames: Vec<Frame>,
    pub quantization: Quantization,
}

impl EncodedSequence {
    pub fn blocks(&self) -> usize {
        self.mixed_frames.len() / self.matrix.rows()
    }

    /// Number of frames the decoder will return.
    pub fn source_count(&self) -> usize {
        self.blocks() * self.matrix.cols() + self.tail_frames.len()
    }

    /// Rounds float-mode mixed pixels to `f32`, the precision they are
    /// stored with. Affine codes are integers and unchanged.
    pub fn to_storage_precision(&self) -> EncodedSequence {
        let mut out = self.clone();
        if self.quantization.mode == QuantMode::Float {
            for f in &mut out.mixed_frames {
                for p in f.pixels_mut() {
                    *p = f64::from(*p as f32);
                }
            }
        }
        out
    }

    /// Mixed frames in pixel units.
    fn dequantized(&self) -> Vec<Frame> {
        let q = self.quantization;
        match q.mode {
            QuantMode::Float => self.mixed_frames.clone(),
            QuantMode::Affine8 => self
                .mixed_frames
                .iter()
                .map(|f| {
                    let mut f = f.clone();
                    for p in f.pixels_mut() {
                        *p = *p * q.scale + q.offset;
                    }
                    f
                })
                .collect(),
        }
    }
}

pub fn encode_sequence(frames: &[Frame], cfg: &CodecConfig) -> Result<EncodedSequence> {
    cfg.validate()?;
    let n = cfg.n();
    if frames.len() < n {
        return Err(Error::FrameCount {
            expected: n,
            actual: frames.len(),
        });
    }
    let (width, height) = check_uniform(frames)?;
    if cfg.pad_policy == PadPolicy::Reject && (width % 2 != 0 || height % 2 != 0) {
        return Err(Error::OddDimensions { width, height });
    }
    let full = frames.len() / n * n;
    let mut mixed_frames = Vec::with_capacity(full / n * cfg.m());
    for group in frames[..full].chunks_exact(n) {
        let block = FrameBlock::new(group.to_vec())?;
        mixed_frames.extend(mix_block(&cfg.matrix, &block)?.into_frames());
    }
    let tail_frames = match cfg.tail_policy {
        TailPolicy::Passthrough => frames[full..].iter().map(Frame::quantized_8bit).collect(),
    };
    let quantization = match cfg.quantization {
        QuantMode::Float => Quantization::FLOAT,
        QuantMode::Affine8 => affine_quantize(&mut mixed_frames),
    };
    Ok(EncodedSequence {
        matrix: cfg.matrix.clone(),
        width,
        height,
        mixed_frames,
        tail_frames,
        quantization,
    })
}

fn affine_quantize(frames: &mut [Frame]) -> Quantization {
    let (lo, hi) = frames
        .iter()
        .flat_map(|f| f.pixels())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    let scale = if hi > lo { (hi - lo) / 255.0 } else { 1.0 };
    for f in frames.iter_mut() {
        for p in f.pixels_mut() {
            *p = libm::round(((*p - lo) / scale).clamp(0.0, 255.0));
        }
    }
    Quantization {
        mode: QuantMode::Affine8,
        scale,
        offset: lo,
    }
}

/// Recovers `b·n + tail` frames. Detail columns that miss every plane by
/// more than `cfg.tau` are still reconstructed and counted as forced.
pub fn decode_sequence(
    enc: &EncodedSequence,
    cfg: &CodecConfig,
) -> Result<(Vec<Frame>, RecoveryStats)> {
    cfg.validate()?;
    if enc.matrix != cfg.matrix {
        return Err(Error::Parameter(
            "stream mixing matrix differs from configuration",
        ));
    }
    let (m, n) = (cfg.m(), cfg.n());
    if enc.mixed_frames.is_empty() || !enc.mixed_frames.len().is_multiple_of(m) {
        return Err(Error::FrameCount {
            expected: enc.mixed_frames.len().div_ceil(m).max(1) * m,
            actual: enc.mixed_frames.len(),
        });
    }
    for f in enc.mixed_frames.iter().chain(&enc.tail_frames) {
        if f.dims() != (enc.width, enc.height) {
            return Err(Error::Dimensions {
                want_w: enc.width,
                want_h: enc.height,
                got_w: f.width(),
                got_h: f.height(),
            });
        }
    }

    let planes = build_hyperplanes(&cfg.matrix)?;
    let pinv = generalized_inverse(&cfg.matrix)?;
    let mixed = enc.dequantized();

    let mut out = Vec::with_capacity(enc.source_count());
    let mut residuals = Vec::new();
    let mut zero_columns = 0;
    for group in mixed.chunks_exact(m) {
        let subbands = group
            .iter()
            .map(|f| haar_forward(&f.pad_even()))
            .collect::<Result<Vec<_>>>()?;
        let (hw, hh) = subbands[0].ll.dims();

        let stack = |pick: fn(&SubbandImage) -> &Frame| -> Result<Matrix> {
            let mut data = Vec::with_capacity(m * hw * hh);
            for sb in &subbands {
                data.extend_from_slice(pick(sb).pixels());
            }
            Matrix::new(m, hw * hh, data)
        };
        let ll = recover_dense(&pinv, &stack(|s| &s.ll)?)?;
        let mut detail = Vec::with_capacity(3);
        for pick in [
            (|s| &s.lh) as fn(&SubbandImage) -> &Frame,
            |s| &s.hl,
            |s| &s.hh,
        ] {
            let (rec, res, zero) = planes.recover_block_raw(&stack(pick)?, cfg.tau)?;
            residuals.extend(res);
            zero_columns += zero;
            detail.push(rec);
        }

        for j in 0..n {
            let plane = |mat: &Matrix| Frame::new(hw, hh, mat.row(j).to_vec());
            let sb = SubbandImage {
                ll: plane(&ll)?,
                lh: plane(&detail[0])?,
                hl: plane(&detail[1])?,
                hh: plane(&detail[2])?,
                original_width: 2 * hw,
                original_height: 2 * hh,
            };
            out.push(haar_inverse(&sb)?.crop(enc.width, enc.height));
        }
    }
    out.extend(enc.tail_frames.iter().cloned());
    Ok((
        out,
        RecoveryStats::from_residuals(zero_columns, cfg.tau, residuals),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripReport {
    pub mixed_count: usize,
    pub tail_count: usize,
    pub decoded_count: usize,
    pub quality: QualityReport,
    pub stats: RecoveryStats,
}

/// Encodes, rounds the stream to its storage precision, decodes, and
/// compares originals with reconstructions in the clamped 8-bit domain.
pub fn roundtrip_eval(
    frames: &[Frame],
    cfg: &CodecConfig,
) -> Result<(RoundtripReport, Vec<Frame>)> {
    let enc = encode_sequence(frames, cfg)?.to_storage_precision();
    let (decoded, stats) = decode_sequence(&enc, cfg)?;
    let orig: Vec<Frame> = frames.iter().map(Frame::quantized_8bit).collect();
    let rec: Vec<Frame> = decoded.iter().map(Frame::quantized_8bit).collect();
    let quality = sequence_report(&orig, &rec)?;
    Ok((
        RoundtripReport {
            mixed_count: enc.mixed_frames.len(),
            tail_count: enc.tail_frames.len(),
            decoded_count: decoded.len(),
            quality,
            stats,
        },
        rec,
    ))
}
