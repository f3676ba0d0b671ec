//! Key-value codec configuration files.
//!
//! One `key = value` per line, `#` starts a comment. Recognized keys:
//! `m`, `n`, `matrix` (the `m*n` entries row-major, separated by spaces or
//! commas), `tau`, `det_floor`, `pad` (`reject` | `edge-replicate`), `tail`
//! (`passthrough`) and `quant` (`float` | `affine8`). Missing keys keep the
//! defaults; `matrix` requires `m` and `n`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ubssvc_core::mixcore::DEFAULT_DET_FLOOR;
use ubssvc_core::{CodecConfig, Matrix, MixingMatrix, PadPolicy, QuantMode, TailPolicy};

use crate::error::{Error, Result};

const KEYS: [&str; 8] = [
    "m",
    "n",
    "matrix",
    "tau",
    "det_floor",
    "pad",
    "tail",
    "quant",
];

pub fn parse_pad(s: &str) -> Result<PadPolicy> {
    match s {
        "reject" => Ok(PadPolicy::Reject),
        "edge-replicate" => Ok(PadPolicy::EdgeReplicate),
        _ => Err(Error::Config(format!("unknown pad policy {s:?}"))),
    }
}

pub fn parse_quant(s: &str) -> Result<QuantMode> {
    match s {
        "float" => Ok(QuantMode::Float),
        "affine8" => Ok(QuantMode::Affine8),
        _ => Err(Error::Config(format!("unknown quantization mode {s:?}"))),
    }
}

pub fn quant_name(q: QuantMode) -> &'static str {
    match q {
        QuantMode::Float => "float",
        QuantMode::Affine8 => "affine8",
    }
}

fn number<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

pub fn parse_config(text: &str) -> Result<CodecConfig> {
    let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(Error::Config(format!(
                "line {}: unknown key {k:?}",
                lineno + 1
            )));
        }
        if kv.insert(k, v).is_some() {
            return Err(Error::Config(format!(
                "line {}: duplicate key {k:?}",
                lineno + 1
            )));
        }
    }

    let det_floor = match kv.get("det_floor") {
        Some(v) => number("det_floor", v)?,
        None => DEFAULT_DET_FLOOR,
    };
    let dims = match (kv.get("m"), kv.get("n")) {
        (Some(m), Some(n)) => Some((number::<usize>("m", m)?, number::<usize>("n", n)?)),
        (None, None) => None,
        _ => return Err(Error::Config("m and n must be given together".into())),
    };
    let matrix = match (kv.get("matrix"), dims) {
        (Some(entries), Some((m, n))) => {
            let values = entries
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| number::<f64>("matrix", s))
                .collect::<Result<Vec<_>>>()?;
            if values.len() != m * n {
                return Err(Error::Config(format!(
                    "matrix has {} entries, m*n = {}",
                    values.len(),
                    m * n
                )));
            }
            MixingMatrix::with_det_floor(Matrix::new(m, n, values)?, det_floor)?
        }
        (Some(_), None) => return Err(Error::Config("matrix needs m and n".into())),
        (None, dims) => {
            let default = MixingMatrix::default();
            if dims.is_some_and(|d| d != (default.rows(), default.cols())) {
                return Err(Error::Config(
                    "m and n differ from the default matrix; give matrix".into(),
                ));
            }
            default
        }
    };

    let mut cfg = CodecConfig::with_matrix(matrix);
    if let Some(v) = kv.get("tau") {
        cfg.tau = number("tau", v)?;
    }
    if let Some(v) = kv.get("pad") {
        cfg.pad_policy = parse_pad(v)?;
    }
    if let Some(v) = kv.get("tail") {
        cfg.tail_policy = match *v {
            "passthrough" => TailPolicy::Passthrough,
            _ => return Err(Error::Config(format!("unknown tail policy {v:?}"))),
        };
    }
    if let Some(v) = kv.get("quant") {
        cfg.quantization = parse_quant(v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<CodecConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Text that [`parse_config`] reads back to the same configuration.
pub fn render_config(cfg: &CodecConfig) -> String {
    let mut s = String::new();
    let a = cfg.matrix.matrix();
    writeln!(s, "m = {}", a.rows()).unwrap();
    writeln!(s, "n = {}", a.cols()).unwrap();
    let entries: Vec<String> = a.as_slice().iter().map(|v| v.to_string()).collect();
    writeln!(s, "matrix = {}", entries.join(" ")).unwrap();
    writeln!(s, "tau = {:e}", cfg.tau).unwrap();
    let pad = match cfg.pad_policy {
        PadPolicy::Reject => "reject",
        PadPolicy::EdgeReplicate => "edge-replicate",
    };
    writeln!(s, "pad = {pad}").unwrap();
    writeln!(s, "tail = passthrough").unwrap();
    writeln!(s, "quant = {}", quant_name(cfg.quantization)).unwrap();
    s
}
