//! Compression-ratio accounting against an external codec.
//!
//! The codec is any shell command template; `{in}` and `{out}` are replaced
//! by the raw input stream and the path the codec must write. `{width}`,
//! `{height}` and `{frames}` describe the raw stream (8-bit planes).

use std::fs;
use std::path::Path;
use std::process::Command;

use ubssvc_core::{encode_sequence, CodecConfig, EncodedSequence, Frame, QuantMode};

use crate::error::{Error, Result};
use crate::vio::write_raw_planar;

/// One row of a size table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub label: String,
    pub original_bytes: f64,
    pub compressed_bytes: f64,
    /// `original_bytes / compressed_bytes`.
    pub ratio: f64,
    /// `(ratio - 1) * 100`.
    pub improvement_percent: f64,
}

pub fn compression_ratio(original_bytes: f64, compressed_bytes: f64) -> Result<BenchResult> {
    if !(original_bytes > 0.0 && compressed_bytes > 0.0)
        || !original_bytes.is_finite()
        || !compressed_bytes.is_finite()
    {
        return Err(Error::Config(format!(
            "sizes must be positive, got {original_bytes} and {compressed_bytes}"
        )));
    }
    let ratio = original_bytes / compressed_bytes;
    Ok(BenchResult {
        label: String::new(),
        original_bytes,
        compressed_bytes,
        ratio,
        improvement_percent: (ratio - 1.0) * 100.0,
    })
}

impl BenchResult {
    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    /// Codec applied to the raw source frames.
    pub direct: std::result::Result<BenchResult, String>,
    /// Codec applied to the raw mixed stream (plus unmixed tail).
    pub mixed: std::result::Result<BenchResult, String>,
    /// `mixed.ratio / direct.ratio` when both rows succeeded.
    pub ratio_of_ratios: Option<f64>,
    pub raw_source_bytes: usize,
    pub raw_mixed_bytes: usize,
}

impl BenchReport {
    pub fn improvement_percent(&self) -> Option<f64> {
        self.ratio_of_ratios.map(|r| (r - 1.0) * 100.0)
    }

    pub fn failed(&self) -> bool {
        self.direct.is_err() || self.mixed.is_err()
    }
}

/// Mixed stream bytes as fed to the codec: 8-bit affine codes (or `f32`
/// LE values in float mode), followed by the tail planes.
pub fn mixed_stream_bytes(enc: &EncodedSequence) -> Vec<u8> {
    let mut out = Vec::new();
    match enc.quantization.mode {
        QuantMode::Affine8 => out.extend(write_raw_planar(&enc.mixed_frames)),
        QuantMode::Float => {
            for f in &enc.mixed_frames {
                for &p in f.pixels() {
                    out.extend((p as f32).to_le_bytes());
                }
            }
        }
    }
    out.extend(write_raw_planar(&enc.tail_frames));
    out
}

fn run_codec(
    template: &str,
    input: &Path,
    output: &Path,
    w: usize,
    h: usize,
    frames: usize,
) -> std::result::Result<u64, String> {
    let cmd = template
        .replace("{in}", &input.to_string_lossy())
        .replace("{out}", &output.to_string_lossy())
        .replace("{width}", &w.to_string())
        .replace("{height}", &h.to_string())
        .replace("{frames}", &frames.to_string());
    let status = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .status()
        .map_err(|e| format!("{cmd}: {e}"))?;
    if !status.success() {
        return Err(format!("{cmd}: exited with {status}"));
    }
    fs::metadata(output)
        .map(|m| m.len())
        .map_err(|e| format!("{cmd}: no output at {}: {e}", output.display()))
}

/// Runs the codec on the raw source and on the mixed stream, sequentially.
/// `quant` selects how mixed frames are exported.
pub fn bench(
    frames: &[Frame],
    cfg: &CodecConfig,
    codec_cmd: &str,
    quant: QuantMode,
) -> Result<BenchReport> {
    let cfg = CodecConfig {
        quantization: quant,
        ..cfg.clone()
    };
    let enc = encode_sequence(frames, &cfg)?.to_storage_precision();
    let (w, h) = frames[0].dims();
    let dir = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
    let source_raw = dir.path().join("source.raw");
    let mixed_raw = dir.path().join("mixed.raw");
    let source_bytes = write_raw_planar(frames);
    let mixed_bytes = mixed_stream_bytes(&enc);
    fs::write(&source_raw, &source_bytes).map_err(|e| Error::io(&source_raw, e))?;
    fs::write(&mixed_raw, &mixed_bytes).map_err(|e| Error::io(&mixed_raw, e))?;

    let original = source_bytes.len() as f64;
    let row = |input: &Path, out_name: &str, count: usize, label: &str| {
        run_codec(codec_cmd, input, &dir.path().join(out_name), w, h, count).and_then(|size| {
            compression_ratio(original, size as f64)
                .map(|r| r.labeled(label))
                .map_err(|e| e.to_string())
        })
    };
    let direct = row(&source_raw, "source.out", frames.len(), "codec");
    let mixed_count = enc.mixed_frames.len() + enc.tail_frames.len();
    let mixed = row(&mixed_raw, "mixed.out", mixed_count, "ubssvc+codec");
    let ratio_of_ratios = match (&direct, &mixed) {
        (Ok(d), Ok(m)) => Some(m.ratio / d.ratio),
        _ => None,
    };
    Ok(BenchReport {
        direct,
        mixed,
        ratio_of_ratios,
        raw_source_bytes: source_bytes.len(),
        raw_mixed_bytes: mixed_bytes.len(),
    })
}
