use std::fs;
use std::path::PathBuf;

use ubssvc_core::Frame;

use super::pgm::{decode_pgm, encode_pgm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    PgmSequence,
    RawPlanar,
}

/// Where to read frames from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceInput {
    /// Numbered PGM files. `pattern` holds a printf-style `%d` or `%0Nd`
    /// placeholder; without one it names a single file. Reading starts at
    /// `start` and stops at the first missing file unless `count` is given.
    PgmPattern {
        pattern: String,
        start: usize,
        count: Option<usize>,
    },
    /// Headerless concatenated 8-bit planes.
    RawPlanar {
        path: PathBuf,
        width: usize,
        height: usize,
        count: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSource {
    pub frames: Vec<Frame>,
    pub origin: Origin,
}

/// Substitutes `index` for the first `%d` / `%0Nd` in `pattern`.
pub fn expand_pattern(pattern: &str, index: usize) -> Option<String> {
    let start = pattern.find('%')?;
    let rest = &pattern[start + 1..];
    let spec_len = rest.find('d')?;
    let spec = &rest[..spec_len];
    if !spec.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let width: usize = if spec.is_empty() {
        0
    } else {
        spec.parse().ok()?
    };
    Some(format!(
        "{}{:0width$}{}",
        &pattern[..start],
        index,
        &rest[spec_len + 1..],
        width = width
    ))
}

fn has_placeholder(pattern: &str) -> bool {
    expand_pattern(pattern, 0).is_some()
}

pub fn read_sequence(input: &SequenceInput) -> Result<SequenceSource> {
    match input {
        SequenceInput::PgmPattern {
            pattern,
            start,
            count,
        } => {
            let frames = read_pgm_pattern(pattern, *start, *count)?;
            Ok(SequenceSource {
                frames,
                origin: Origin::PgmSequence,
            })
        }
        SequenceInput::RawPlanar {
            path,
            width,
            height,
            count,
        } => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            Ok(SequenceSource {
                frames: read_raw_planar(&bytes, *width, *height, *count)?,
                origin: Origin::RawPlanar,
            })
        }
    }
}

fn read_pgm_pattern(pattern: &str, start: usize, count: Option<usize>) -> Result<Vec<Frame>> {
    let mut frames: Vec<Frame> = Vec::new();
    if !has_placeholder(pattern) {
        if count.is_some_and(|c| c != 1) {
            return Err(Error::Format(format!(
                "{pattern} names a single file but {} frames were requested",
                count.unwrap_or(0)
            )));
        }
        let bytes = fs::read(pattern).map_err(|e| Error::io(pattern, e))?;
        return Ok(vec![decode_pgm(&bytes)?]);
    }
    for index in start.. {
        if count.is_some_and(|c| frames.len() == c) {
            break;
        }
        let path = expand_pattern(pattern, index).expect("pattern has a placeholder");
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound && count.is_none() => break,
            Err(e) => return Err(Error::io(path, e)),
        };
        let frame = decode_pgm(&bytes).map_err(|e| Error::Format(format!("{path}: {e}")))?;
        if let Some(first) = frames.first() {
            if first.dims() != frame.dims() {
                return Err(Error::Format(format!(
                    "{path}: {}x{} frame in a {}x{} sequence",
                    frame.width(),
                    frame.height(),
                    first.width(),
                    first.height()
                )));
            }
        }
        frames.push(frame);
    }
    if frames.is_empty() {
        return Err(Error::io(
            expand_pattern(pattern, start).unwrap_or_default(),
            std::io::Error::from(std::io::ErrorKind::NotFound),
        ));
    }
    Ok(frames)
}

/// Splits `bytes` into `width x height` 8-bit planes. Without `count`, the
/// length must be an exact multiple of the plane size.
pub fn read_raw_planar(
    bytes: &[u8],
    width: usize,
    height: usize,
    count: Option<usize>,
) -> Result<Vec<Frame>> {
    let plane = width * height;
    if plane == 0 {
        return Err(Error::Format(
            "raw-planar input needs nonzero width and height".into(),
        ));
    }
    let count = match count {
        Some(c) => c,
        None if bytes.len().is_multiple_of(plane) => bytes.len() / plane,
        None => {
            return Err(Error::Format(format!(
                "raw-planar length {} is not a multiple of {plane}",
                bytes.len()
            )))
        }
    };
    if bytes.len() < count * plane {
        return Err(Error::Format(format!(
            "raw-planar payload truncated: {} bytes for {count} frames of {plane}",
            bytes.len()
        )));
    }
    bytes
        .chunks_exact(plane)
        .take(count)
        .map(|c| Frame::from_u8(width, height, c).map_err(Error::from))
        .collect()
}

/// Concatenated clamped-rounded 8-bit planes.
pub fn write_raw_planar(frames: &[Frame]) -> Vec<u8> {
    frames.iter().flat_map(Frame::to_u8).collect()
}

/// Writes one PGM per frame, numbered from 0, creating missing parent
/// directories. Returns the written paths.
pub fn write_sequence(frames: &[Frame], pattern: &str) -> Result<Vec<PathBuf>> {
    if frames.len() > 1 && !has_placeholder(pattern) {
        return Err(Error::Format(format!(
            "output pattern {pattern} needs a %d placeholder for {} frames",
            frames.len()
        )));
    }
    let mut written = Vec::with_capacity(frames.len());
    for (i, frame) in frames.iter().enumerate() {
        let path = PathBuf::from(expand_pattern(pattern, i).unwrap_or_else(|| pattern.to_owned()));
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, encode_pgm(frame)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
