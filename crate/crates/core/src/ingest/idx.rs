//! IDX tensors: `00 00 <type> <k>`, then `k` big-endian u32 sizes, then the
//! row-major payload. Types `0x08` (u8) and `0x0D` (big-endian f32) are
//! supported. A gzip stream (`1f 8b`) is decompressed first.

use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, IdxErrorKind, Result};

const TYPE_U8: u8 = 0x08;
const TYPE_F32: u8 = 0x0D;

#[derive(Debug, Clone, PartialEq)]
pub enum IdxData {
    U8(Vec<u8>),
    F32(Vec<f32>),
}

impl IdxData {
    pub fn len(&self) -> usize {
        match self {
            IdxData::U8(v) => v.len(),
            IdxData::F32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            IdxData::U8(v) => v.iter().map(|&b| f64::from(b)).collect(),
            IdxData::F32(v) => v.iter().map(|&f| f64::from(f)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdxTensor {
    pub dims: Vec<usize>,
    pub data: IdxData,
}

impl IdxTensor {
    pub fn new(dims: Vec<usize>, data: IdxData) -> Result<Self> {
        let n = element_count(&dims)
            .ok_or_else(|| Error::DimensionOverflow("IDX dimension product overflows".into()))?;
        if n != data.len() {
            return Err(Error::Shape(format!(
                "dims {dims:?} need {n} elements, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    /// Flatten all but the first dimension: an `n x (prod of the rest)` matrix.
    pub fn to_matrix(&self) -> Result<ndarray::Array2<f64>> {
        let rows = *self
            .dims
            .first()
            .ok_or_else(|| Error::Shape("IDX tensor has no dimensions".into()))?;
        let cols = self.data.len().checked_div(rows).unwrap_or(0);
        ndarray::Array2::from_shape_vec((rows, cols), self.data.to_f64())
            .map_err(|e| Error::Shape(e.to_string()))
    }
}

fn element_count(dims: &[usize]) -> Option<usize> {
    dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
}

fn truncated(offset: usize, needed: usize, found: usize) -> Error {
    Error::Idx {
        offset,
        kind: IdxErrorKind::Truncated { needed, found },
    }
}

/// Parse an IDX stream, gzip-compressed or not.
pub fn read_idx(bytes: &[u8]) -> Result<IdxTensor> {
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut raw = Vec::new();
        GzDecoder::new(bytes).read_to_end(&mut raw)?;
        return parse(&raw);
    }
    parse(bytes)
}

pub fn read_idx_file(path: impl AsRef<Path>) -> Result<IdxTensor> {
    read_idx(&std::fs::read(path)?)
}

fn parse(bytes: &[u8]) -> Result<IdxTensor> {
    if bytes.len() < 4 {
        return Err(truncated(bytes.len(), 4, bytes.len()));
    }
    if bytes[0] != 0 || bytes[1] != 0 {
        return Err(Error::Idx {
            offset: 0,
            kind: IdxErrorKind::BadMagic(bytes[0], bytes[1]),
        });
    }
    let ty = bytes[2];
    let width = match ty {
        TYPE_U8 => 1,
        TYPE_F32 => 4,
        other => {
            return Err(Error::Idx {
                offset: 2,
                kind: IdxErrorKind::UnsupportedType(other),
            })
        }
    };
    let k = bytes[3] as usize;
    let header = 4 + 4 * k;
    if bytes.len() < header {
        return Err(truncated(bytes.len(), header, bytes.len()));
    }
    let dims: Vec<usize> = bytes[4..header]
        .chunks_exact(4)
        .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]) as usize)
        .collect();
    let payload_len = element_count(&dims)
        .and_then(|n| n.checked_mul(width))
        .ok_or_else(|| Error::DimensionOverflow("IDX dimension product overflows".into()))?;
    let payload = &bytes[header..];
    if payload.len() < payload_len {
        return Err(truncated(bytes.len(), header + payload_len, bytes.len()));
    }
    if payload.len() > payload_len {
        return Err(Error::Idx {
            offset: header + payload_len,
            kind: IdxErrorKind::Trailing(payload.len() - payload_len),
        });
    }
    let data = match ty {
        TYPE_U8 => IdxData::U8(payload.to_vec()),
        _ => IdxData::F32(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_be_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        ),
    };
    IdxTensor::new(dims, data)
}

/// Serialize without compression.
pub fn write_idx(tensor: &IdxTensor) -> Result<Vec<u8>> {
    if tensor.dims.len() > u8::MAX as usize {
        return Err(Error::DimensionOverflow(
            "IDX supports at most 255 dimensions".into(),
        ));
    }
    let mut out = vec![0, 0];
    out.push(match tensor.data {
        IdxData::U8(_) => TYPE_U8,
        IdxData::F32(_) => TYPE_F32,
    });
    out.push(tensor.dims.len() as u8);
    for &d in &tensor.dims {
        let d = u32::try_from(d)
            .map_err(|_| Error::DimensionOverflow(format!("IDX size {d} exceeds u32")))?;
        out.extend_from_slice(&d.to_be_bytes());
    }
    match &tensor.data {
        IdxData::U8(v) => out.extend_from_slice(v),
        IdxData::F32(v) => v
            .iter()
            .for_each(|f| out.extend_from_slice(&f.to_be_bytes())),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use flate2::write::GzEncoder;
    use flate2::Compression;
    use std::io::Write;

    #[test]
    fn one_dimensional_bytes() {
        let t = read_idx(&[0, 0, 8, 1, 0, 0, 0, 3, 5, 2, 9]).unwrap();
        assert_eq!(t.dims, vec![3]);
        assert_eq!(t.data, IdxData::U8(vec![5, 2, 9]));
    }

    #[test]
    fn three_dimensional_bytes() {
        let mut b = vec![0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2];
        b.extend(0..8u8);
        assert_eq!(read_idx(&b).unwrap().dims, vec![2, 2, 2]);
    }

    #[test]
    fn truncated_payload_names_first_missing_byte() {
        let mut b = vec![0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2];
        b.extend(0..7u8);
        // 16 header bytes plus 7 payload bytes: the eighth is missing at offset 23.
        match read_idx(&b).unwrap_err() {
            Error::Idx {
                offset,
                kind: IdxErrorKind::Truncated { needed, found },
            } => {
                assert_eq!((offset, needed, found), (23, 24, 23));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn bad_magic_and_type() {
        assert!(matches!(
            read_idx(&[1, 0, 8, 0]),
            Err(Error::Idx {
                offset: 0,
                kind: IdxErrorKind::BadMagic(1, 0)
            })
        ));
        assert!(matches!(
            read_idx(&[0, 0, 0x0B, 0]),
            Err(Error::Idx {
                offset: 2,
                kind: IdxErrorKind::UnsupportedType(0x0B)
            })
        ));
    }

    #[test]
    fn float_round_trip_and_gzip() {
        let t = IdxTensor::new(vec![2, 2], IdxData::F32(vec![1.5, -0.0, 3.25, f32::MAX])).unwrap();
        let bytes = write_idx(&t).unwrap();
        assert_eq!(read_idx(&bytes).unwrap(), t);
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(&bytes).unwrap();
        assert_eq!(read_idx(&enc.finish().unwrap()).unwrap(), t);
    }

    #[test]
    fn trailing_bytes_rejected() {
        assert!(matches!(
            read_idx(&[0, 0, 8, 1, 0, 0, 0, 1, 7, 7]),
            Err(Error::Idx {
                offset: 9,
                kind: IdxErrorKind::Trailing(1)
            })
        ));
    }
}
