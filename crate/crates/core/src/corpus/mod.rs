//! Segment manifests, representation dumps, pooling and phone banks.

mod bank;
mod dump;
mod manifest;
mod pool;
pub mod s3mr;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use bank::{
    build_phone_bank, parse_label_map, parse_label_set, BankFilters, PhoneBank, PhoneInstances,
    SegmentSource,
};
pub use dump::{
    discover_dumps, read_rep_dump, write_rep_dump, DumpMeta, RepDump, MANIFEST_FILE, META_FILE, REPS_DIR,
};
pub use manifest::{merge_closures, read_manifest, write_manifest, SegmentRecord};
pub use pool::{frame_range, slice_and_pool};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("bad magic: not an .s3mr file")]
    BadMagic,
    #[error("unsupported .s3mr version {0}")]
    VersionMismatch(u16),
    #[error("unsupported dtype code {0}")]
    UnsupportedDtype(u16),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("invalid matrix shape {rows}x{cols}")]
    InvalidShape { rows: usize, cols: usize },
    #[error("invalid stride/sample rate ({stride}, {sample_rate})")]
    InvalidTiming { stride: u32, sample_rate: u32 },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("invalid segment {utterance_id}/{phone} [{t_start}, {t_end}): {reason}")]
    InvalidSegment {
        utterance_id: String,
        phone: String,
        t_start: f64,
        t_end: f64,
        reason: String,
    },
    #[error("segment starting at frame {start} lies beyond the matrix extent ({rows} rows)")]
    BeyondExtent { start: usize, rows: usize },
    #[error("empty slice after clamping")]
    EmptySlice,
    #[error("manifest references utterance {0:?} which has no matrix in the dump")]
    MissingUtterance(String),
    #[error("no segments retained after filtering")]
    NoSegments,
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<CorpusError>,
    },
    #[error("{path}: {source}")]
    PathIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::PathIo {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn in_file(self, path: &Path) -> Self {
        CorpusError::File {
            path: path.to_path_buf(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping file-context wrappers.
    pub fn root(&self) -> &CorpusError {
        match self {
            CorpusError::File { source, .. } => source.root(),
            other => other,
        }
    }
}

/// A T'×F float32 matrix of frame-level representations.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationMatrix {
    data: Vec<f32>,
    rows: usize,
    cols: usize,
    stride_samples: u32,
    sample_rate: u32,
    pub layer_index: u32,
    pub model_id: String,
}

impl RepresentationMatrix {
    pub fn new(
        data: Vec<f32>,
        rows: usize,
        cols: usize,
        stride_samples: u32,
        sample_rate: u32,
    ) -> Result<Self, CorpusError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(CorpusError::InvalidShape { rows, cols });
        }
        if stride_samples == 0 || sample_rate == 0 {
            return Err(CorpusError::InvalidTiming {
                stride: stride_samples,
                sample_rate,
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(CorpusError::NonFinite {
                row: i / cols,
                col: i % cols,
            });
        }
        Ok(RepresentationMatrix {
            data,
            rows,
            cols,
            stride_samples,
            sample_rate,
            layer_index: 0,
            model_id: String::new(),
        })
    }

    pub fn with_layer(mut self, layer_index: u32, model_id: impl Into<String>) -> Self {
        self.layer_index = layer_index;
        self.model_id = model_id.into();
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn stride_samples(&self) -> u32 {
        self.stride_samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, t: usize) -> &[f32] {
        &self.data[t * self.cols..(t + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, t: usize) -> &mut [f32] {
        &mut self.data[t * self.cols..(t + 1) * self.cols]
    }

    /// Frames per second.
    pub fn frame_rate(&self) -> f64 {
        self.sample_rate as f64 / self.stride_samples as f64
    }
}
