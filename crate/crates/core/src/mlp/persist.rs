//! Binary model file.
//!
//! All integers are little-endian `u32`, all parameters little-endian IEEE-754 `f64`.
//!
//! ```text
//! offset  size        field
//! 0       8           magic  b"NSAIMLP\0"
//! 8       4           format version (currently 1)
//! 12      4           L = byte length of the training config
//! 16      L           training config, UTF-8 JSON
//! 16+L    4           layer count (3)
//! then, per layer:
//!         4           rows (outputs)
//!         4           cols (inputs)
//!         8*rows*cols weights, row-major
//!         8*rows      biases
//! ```
//!
//! Trailing bytes after the last layer are rejected.

use super::{Dense, MlpParams, TrainConfig};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"NSAIMLP\0";
pub const MODEL_VERSION: u32 = 1;

pub fn save_model(params: &MlpParams, config: &TrainConfig) -> Vec<u8> {
    let cfg = serde_json::to_vec(config).expect("TrainConfig serializes");
    let mut out = Vec::with_capacity(32 + cfg.len() + params.len() * 8);
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&(cfg.len() as u32).to_le_bytes());
    out.extend_from_slice(&cfg);
    out.extend_from_slice(&(params.layers.len() as u32).to_le_bytes());
    for l in &params.layers {
        out.extend_from_slice(&(l.rows as u32).to_le_bytes());
        out.extend_from_slice(&(l.cols as u32).to_le_bytes());
        for v in l.weights.iter().chain(&l.bias) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| Error::Format("size overflow".into()))?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn load_model(bytes: &[u8]) -> Result<(MlpParams, TrainConfig)> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MODEL_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let cfg_len = r.u32()? as usize;
    let config: TrainConfig = serde_json::from_slice(r.take(cfg_len)?)?;
    let count = r.u32()?;
    if count != 3 {
        return Err(Error::Format(format!("expected 3 layers, found {count}")));
    }
    let mut layers = Vec::with_capacity(3);
    for _ in 0..3 {
        let rows = r.u32()? as usize;
        let cols = r.u32()? as usize;
        let weights = r.f64s(rows * cols)?;
        let bias = r.f64s(rows)?;
        layers.push(Dense {
            rows,
            cols,
            weights,
            bias,
        });
    }
    if r.pos != bytes.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes",
            bytes.len() - r.pos
        )));
    }
    let params = MlpParams {
        layers: layers.try_into().expect("three layers"),
    };
    params.validate().map_err(|e| Error::Format(e.to_string()))?;
    Ok((params, config))
}
