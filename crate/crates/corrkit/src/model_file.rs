//! Binary tagger model format, little-endian throughout.
//!
//! ```text
//! magic        8 bytes  "CORRTAG1"
//! version      u32      1
//! label count  u8       6, then each label as u8 length + UTF-8
//! epochs       u32
//! seed         u64
//! records      u64
//! entries      u64, then per entry (sorted by key):
//!              u32 key length, key UTF-8, 6 x f64 raw, 6 x f64 averaged
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use corrkit_core::tagger::{LabelWeights, TaggerModel, TrainingMeta};
use corrkit_core::LabelTag;

pub const MAGIC: &[u8; 8] = b"CORRTAG1";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("not a tagger model: {0}")]
    Format(String),
}

fn format_err(msg: impl Into<String>) -> ModelFileError {
    ModelFileError::Format(msg.into())
}

pub fn encode(model: &TaggerModel) -> Vec<u8> {
    let entries = model.entries();
    let mut out = Vec::with_capacity(64 + entries.len() * 120);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let labels = model.labels();
    out.push(labels.len() as u8);
    for l in labels {
        out.push(l.as_str().len() as u8);
        out.extend_from_slice(l.as_str().as_bytes());
    }
    let meta = model.meta();
    out.extend_from_slice(&meta.epochs.to_le_bytes());
    out.extend_from_slice(&meta.seed.to_le_bytes());
    out.extend_from_slice(&meta.record_count.to_le_bytes());
    out.extend_from_slice(&(entries.len() as u64).to_le_bytes());
    for (key, raw, avg) in entries {
        out.extend_from_slice(&(key.len() as u32).to_le_bytes());
        out.extend_from_slice(key.as_bytes());
        for w in raw.iter().chain(&avg) {
            out.extend_from_slice(&w.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelFileError> {
        if self.buf.len() < n {
            return Err(format_err("truncated file"));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], ModelFileError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8, ModelFileError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, ModelFileError> {
        self.array().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64, ModelFileError> {
        self.array().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64, ModelFileError> {
        self.array().map(f64::from_le_bytes)
    }

    fn str(&mut self, len: usize) -> Result<&'a str, ModelFileError> {
        std::str::from_utf8(self.take(len)?).map_err(|_| format_err("invalid UTF-8"))
    }

    fn weights(&mut self) -> Result<LabelWeights, ModelFileError> {
        let mut w = [0.0; 6];
        for x in &mut w {
            *x = self.f64()?;
        }
        Ok(w)
    }
}

pub fn decode(bytes: &[u8]) -> Result<TaggerModel, ModelFileError> {
    let mut r = Reader { buf: bytes };
    if r.take(MAGIC.len()).map_err(|_| format_err("bad magic"))? != MAGIC {
        return Err(format_err("bad magic"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(format_err(format!("unsupported version {version}")));
    }
    let n_labels = r.u8()? as usize;
    let mut labels = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        let len = r.u8()? as usize;
        labels.push(
            r.str(len)?
                .parse::<LabelTag>()
                .map_err(|e| format_err(e.to_string()))?,
        );
    }
    if labels != LabelTag::ALL {
        return Err(format_err("label set differs from C,D,R1,R2,S1,S2"));
    }
    let meta = TrainingMeta {
        epochs: r.u32()?,
        seed: r.u64()?,
        record_count: r.u64()?,
    };
    let count = r.u64()?;
    let mut entries = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        let len = r.u32()? as usize;
        let key = r.str(len)?.to_string();
        let raw = r.weights()?;
        let avg = r.weights()?;
        entries.push((key, raw, avg));
    }
    if !r.buf.is_empty() {
        return Err(format_err("trailing bytes"));
    }
    Ok(TaggerModel::from_parts(entries, meta))
}

pub fn save_model(model: &TaggerModel, path: &Path) -> Result<(), ModelFileError> {
    fs::write(path, encode(model)).map_err(|source| ModelFileError::Io {
        path: path.into(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<TaggerModel, ModelFileError> {
    let bytes = fs::read(path).map_err(|source| ModelFileError::Io {
        path: path.into(),
        source,
    })?;
    decode(&bytes)
}
