//! The "DARN" binary model container.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "DARN" | version: u32 | kind: u8
//! vocabulary: count u32, then (len u32, UTF-8 bytes) per word in index order
//! labels:     same encoding
//! tensors until EOF: name (len u32 + UTF-8), rank u8, dims u32 × rank,
//!                    payload f32 × Π dims, row-major
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"DARN";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("unknown model kind tag {0}")]
    Kind(u8),
    #[error("file truncated at byte {0}")]
    Truncated(usize),
    #[error("invalid UTF-8 string at byte {0}")]
    Utf8(usize),
    #[error("model is a {found:?}, expected {expected:?}")]
    WrongKind { expected: ModelKind, found: ModelKind },
    #[error("missing tensor {0:?}")]
    MissingTensor(String),
    #[error("tensor {name:?} has shape {got:?}, expected {expected:?}")]
    Shape { name: String, expected: Vec<usize>, got: Vec<usize> },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Dnn,
    MaxEnt,
}

impl ModelKind {
    fn tag(self) -> u8 {
        match self {
            ModelKind::Dnn => 0,
            ModelKind::MaxEnt => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self, ContainerError> {
        match tag {
            0 => Ok(ModelKind::Dnn),
            1 => Ok(ModelKind::MaxEnt),
            t => Err(ContainerError::Kind(t)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedTensor {
    pub name: String,
    pub dims: Vec<usize>,
    pub data: Vec<f32>,
}

impl NamedTensor {
    pub fn new(name: impl Into<String>, dims: Vec<usize>, data: Vec<f32>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        Self { name: name.into(), dims, data }
    }

    pub fn scalar(name: impl Into<String>, value: f32) -> Self {
        Self::new(name, Vec::new(), vec![value])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub kind: ModelKind,
    pub vocab: Vec<String>,
    pub labels: Vec<String>,
    pub tensors: Vec<NamedTensor>,
}

impl Container {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.kind.tag());
        for block in [&self.vocab, &self.labels] {
            out.extend_from_slice(&(block.len() as u32).to_le_bytes());
            for s in block {
                put_str(&mut out, s);
            }
        }
        for t in &self.tensors {
            put_str(&mut out, &t.name);
            out.push(t.dims.len() as u8);
            for d in &t.dims {
                out.extend_from_slice(&(*d as u32).to_le_bytes());
            }
            for v in &t.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ContainerError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(ContainerError::BadMagic);
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(ContainerError::Version(version));
        }
        let kind = ModelKind::from_tag(r.take(1)?[0])?;
        let vocab = r.str_block()?;
        let labels = r.str_block()?;
        let mut tensors = Vec::new();
        while r.pos < bytes.len() {
            let name = r.string()?;
            let rank = r.take(1)?[0] as usize;
            let dims = (0..rank).map(|_| r.u32().map(|d| d as usize)).collect::<Result<Vec<_>, _>>()?;
            let n: usize = dims.iter().product();
            let payload = r.take(n.checked_mul(4).ok_or(ContainerError::Truncated(r.pos))?)?;
            let data = payload.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
            tensors.push(NamedTensor { name, dims, data });
        }
        Ok(Self { kind, vocab, labels, tensors })
    }

    pub fn save(&self, path: &Path) -> Result<(), ContainerError> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ContainerError> {
        Self::from_bytes(&fs::read(path)?)
    }

    pub fn expect_kind(&self, expected: ModelKind) -> Result<(), ContainerError> {
        if self.kind != expected {
            return Err(ContainerError::WrongKind { expected, found: self.kind });
        }
        Ok(())
    }

    /// Tensor `name`, checked against `dims`.
    pub fn tensor(&self, name: &str, dims: &[usize]) -> Result<&[f32], ContainerError> {
        let t = self
            .tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| ContainerError::MissingTensor(name.to_string()))?;
        if t.dims != dims {
            return Err(ContainerError::Shape { name: name.to_string(), expected: dims.to_vec(), got: t.dims.clone() });
        }
        Ok(&t.data)
    }

    /// Tensor `name` with whatever shape it has.
    pub fn tensor_any(&self, name: &str) -> Result<&NamedTensor, ContainerError> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| ContainerError::MissingTensor(name.to_string()))
    }

    pub fn scalar(&self, name: &str) -> Result<f32, ContainerError> {
        Ok(self.tensor(name, &[])?[0])
    }
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ContainerError> {
        if self.bytes.len() - self.pos < n {
            return Err(ContainerError::Truncated(self.bytes.len()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, ContainerError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, ContainerError> {
        let len = self.u32()? as usize;
        let at = self.pos;
        String::from_utf8(self.take(len)?.to_vec()).map_err(|_| ContainerError::Utf8(at))
    }

    fn str_block(&mut self) -> Result<Vec<String>, ContainerError> {
        let n = self.u32()? as usize;
        (0..n).map(|_| self.string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Container {
        Container {
            kind: ModelKind::MaxEnt,
            vocab: vec!["yes".into(), "<UNK>".into()],
            labels: vec!["ny".into(), "sd".into()],
            tensors: vec![
                NamedTensor::new("w", vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
                NamedTensor::scalar("meta", 7.0),
            ],
        }
    }

    #[test]
    fn byte_layout() {
        let b = sample().to_bytes();
        assert_eq!(&b[..4], b"DARN");
        assert_eq!(&b[4..8], &1u32.to_le_bytes());
        assert_eq!(b[8], 1);
        assert_eq!(&b[9..13], &2u32.to_le_bytes());
        assert_eq!(&b[13..17], &3u32.to_le_bytes());
        assert_eq!(&b[17..20], b"yes");
    }

    #[test]
    fn read_back() {
        let c = sample();
        let back = Container::from_bytes(&c.to_bytes()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.scalar("meta").unwrap(), 7.0);
        assert!(matches!(back.tensor("w", &[3, 2]), Err(ContainerError::Shape { .. })));
        assert!(matches!(back.tensor("nope", &[1]), Err(ContainerError::MissingTensor(_))));
    }

    #[test]
    fn corrupt_inputs() {
        let b = sample().to_bytes();
        assert!(matches!(Container::from_bytes(b"NOPE"), Err(ContainerError::BadMagic)));
        assert!(matches!(Container::from_bytes(&b[..b.len() - 2]), Err(ContainerError::Truncated(_))));
        let mut v = b.clone();
        v[4] = 9;
        assert!(matches!(Container::from_bytes(&v), Err(ContainerError::Version(9))));
        let mut k = b;
        k[8] = 5;
        assert!(matches!(Container::from_bytes(&k), Err(ContainerError::Kind(5))));
    }
}
