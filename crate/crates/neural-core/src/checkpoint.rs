//! Binary model checkpoints.
//!
//! Layout: magic `SFCK`, u32 LE format version, UTF-8 key/value metadata
//! block, then per array: name, rank and dims as u64 LE, float32 LE payload.
//! Arrays and metadata are written in sorted key order so serialization is
//! deterministic; float32 payloads round-trip bit-exactly.

use crate::error::{NeuralError, Result};
use crate::rng::fnv1a64_bytes;
use crate::tensor::Tensor;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const MAGIC: [u8; 4] = *b"SFCK";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointArray {
    pub shape: Vec<usize>,
    pub data: Vec<f32>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelCheckpoint {
    pub metadata: BTreeMap<String, String>,
    arrays: BTreeMap<String, CheckpointArray>,
}

impl ModelCheckpoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn meta(&self, key: &str) -> Result<&str> {
        self.metadata
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| NeuralError::Checkpoint(format!("missing metadata key {key:?}")))
    }

    pub fn meta_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.meta(key)?
            .parse()
            .map_err(|_| NeuralError::Checkpoint(format!("metadata key {key:?} failed to parse")))
    }

    pub fn insert_array(&mut self, name: &str, shape: Vec<usize>, data: Vec<f32>) {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        self.arrays
            .insert(name.to_string(), CheckpointArray { shape, data });
    }

    /// Stores a tensor, narrowing f64 to f32.
    pub fn insert_tensor(&mut self, name: &str, t: &Tensor) {
        self.insert_array(
            name,
            t.shape().to_vec(),
            t.data().iter().map(|&v| v as f32).collect(),
        );
    }

    pub fn array(&self, name: &str) -> Result<&CheckpointArray> {
        self.arrays
            .get(name)
            .ok_or_else(|| NeuralError::Checkpoint(format!("missing array {name:?}")))
    }

    /// Loads an array back as an f64 tensor.
    pub fn tensor(&self, name: &str) -> Result<Tensor> {
        let arr = self.array(name)?;
        Tensor::from_vec(
            &arr.shape,
            arr.data.iter().map(|&v| f64::from(v)).collect(),
        )
    }

    pub fn array_names(&self) -> impl Iterator<Item = &str> {
        self.arrays.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.arrays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrays.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.metadata.len() as u64).to_le_bytes());
        for (k, v) in &self.metadata {
            write_str(&mut out, k);
            write_str(&mut out, v);
        }
        out.extend_from_slice(&(self.arrays.len() as u64).to_le_bytes());
        for (name, arr) in &self.arrays {
            write_str(&mut out, name);
            out.extend_from_slice(&(arr.shape.len() as u64).to_le_bytes());
            for &d in &arr.shape {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            for &v in &arr.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take(4)?;
        if magic != MAGIC {
            return Err(NeuralError::Checkpoint("bad magic".into()));
        }
        let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(NeuralError::Checkpoint(format!(
                "unsupported format version {version}"
            )));
        }
        let mut ckpt = ModelCheckpoint::new();
        let n_meta = r.take_u64()?;
        for _ in 0..n_meta {
            let k = r.take_str()?;
            let v = r.take_str()?;
            ckpt.metadata.insert(k, v);
        }
        let n_arrays = r.take_u64()?;
        for _ in 0..n_arrays {
            let name = r.take_str()?;
            let rank = r.take_u64()? as usize;
            let mut shape = Vec::with_capacity(rank);
            for _ in 0..rank {
                shape.push(r.take_u64()? as usize);
            }
            let count: usize = shape.iter().product();
            let payload = r.take(count * 4)?;
            let data = payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect();
            ckpt.arrays.insert(name, CheckpointArray { shape, data });
        }
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes)
    }

    /// FNV-1a hash of the serialized checkpoint; used to pin downstream
    /// models to the exact upstream they were trained against.
    pub fn content_hash(&self) -> u64 {
        fnv1a64_bytes(&self.to_bytes())
    }
}

fn write_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u64).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(NeuralError::Checkpoint("truncated checkpoint".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn take_u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn take_str(&mut self) -> Result<String> {
        let len = self.take_u64()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| NeuralError::Checkpoint("invalid UTF-8 in checkpoint".into()))
    }
}
