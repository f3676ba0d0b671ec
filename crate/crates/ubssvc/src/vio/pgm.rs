use ubssvc_core::Frame;

use crate::error::{Error, Result};

/// Binary `P5` with a maxval of 255.
pub fn encode_pgm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend(frame.to_u8());
    out
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Frame> {
    let mut pos = 0;
    let magic = header_token(bytes, &mut pos)?;
    if magic != b"P5" {
        return Err(Error::Format("expected binary PGM (P5)".into()));
    }
    let width = header_number(bytes, &mut pos)?;
    let height = header_number(bytes, &mut pos)?;
    let maxval = header_number(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(Error::Format(format!(
            "PGM maxval {maxval} unsupported, only 8-bit (255) is"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Format("missing whitespace after PGM header".into()));
    }
    pos += 1;
    let len = width
        .checked_mul(height)
        .filter(|&l| l > 0)
        .ok_or_else(|| Error::Format("PGM has zero or oversized dimensions".into()))?;
    let raster = bytes
        .get(pos..pos + len)
        .ok_or_else(|| Error::Format(format!("PGM payload truncated: want {len} bytes")))?;
    Ok(Frame::from_u8(width, height, raster)?)
}

fn header_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while bytes.get(*pos).is_some_and(u8::is_ascii_whitespace) {
            *pos += 1;
        }
        if bytes.get(*pos) == Some(&b'#') {
            while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    let start = *pos;
    while bytes
        .get(*pos)
        .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
    {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Format("PGM header truncated".into()));
    }
    Ok(&bytes[start..*pos])
}

fn header_number(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    let tok = header_token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            Error::Format(format!(
                "bad PGM header field {:?}",
                String::from_utf8_lossy(tok)
            ))
        })
}
