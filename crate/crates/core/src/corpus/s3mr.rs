//! `.s3mr` representation matrix files.
//!
//! Little-endian layout, no padding:
//!
//! | offset | size | field                       |
//! |--------|------|-----------------------------|
//! | 0      | 4    | magic `S3MR`                |
//! | 4      | 2    | version (1)                 |
//! | 6      | 2    | dtype (1 = float32)         |
//! | 8      | 4    | rows T'                     |
//! | 12     | 4    | cols F                      |
//! | 16     | 4    | stride in samples           |
//! | 20     | 4    | sample rate (Hz)            |
//! | 24     | 4·T'·F | row-major float32 payload |

use std::io::{Read, Write};
use std::path::Path;

use super::{CorpusError, RepresentationMatrix};

pub const MAGIC: [u8; 4] = *b"S3MR";
pub const VERSION: u16 = 1;
pub const DTYPE_F32: u16 = 1;
pub const HEADER_LEN: usize = 24;

pub fn encode(m: &RepresentationMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * m.data().len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&DTYPE_F32.to_le_bytes());
    out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
    out.extend_from_slice(&m.stride_samples().to_le_bytes());
    out.extend_from_slice(&m.sample_rate().to_le_bytes());
    for v in m.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write<W: Write>(mut w: W, m: &RepresentationMatrix) -> std::io::Result<()> {
    w.write_all(&encode(m))
}

fn u16_at(b: &[u8], off: usize) -> u16 {
    u16::from_le_bytes([b[off], b[off + 1]])
}

fn u32_at(b: &[u8], off: usize) -> u32 {
    u32::from_le_bytes([b[off], b[off + 1], b[off + 2], b[off + 3]])
}

/// Decode a complete `.s3mr` byte buffer. Layer and model metadata are not
/// part of the file and are filled in by the caller.
pub fn decode(bytes: &[u8]) -> Result<RepresentationMatrix, CorpusError> {
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        return Err(CorpusError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(CorpusError::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let version = u16_at(bytes, 4);
    if version != VERSION {
        return Err(CorpusError::VersionMismatch(version));
    }
    let dtype = u16_at(bytes, 6);
    if dtype != DTYPE_F32 {
        return Err(CorpusError::UnsupportedDtype(dtype));
    }
    let rows = u32_at(bytes, 8) as usize;
    let cols = u32_at(bytes, 12) as usize;
    let stride = u32_at(bytes, 16);
    let sample_rate = u32_at(bytes, 20);
    let payload = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(4))
        .ok_or(CorpusError::InvalidShape { rows, cols })?;
    let expected = HEADER_LEN + payload;
    if bytes.len() < expected {
        return Err(CorpusError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(CorpusError::TrailingBytes(bytes.len() - expected));
    }
    let data = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    RepresentationMatrix::new(data, rows, cols, stride, sample_rate)
}

pub fn read<R: Read>(mut r: R) -> Result<RepresentationMatrix, CorpusError> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    decode(&buf)
}

pub fn read_file(path: &Path) -> Result<RepresentationMatrix, CorpusError> {
    let bytes = std::fs::read(path).map_err(|e| CorpusError::io(path, e))?;
    decode(&bytes).map_err(|e| e.in_file(path))
}
