//! Synthetic corpora and audio with known ground truth.

mod corpus;
mod rig;
pub mod signals;

use thiserror::Error;

pub use corpus::{synthetic_corpus, write_synthetic_dump, CorpusKind, SyntheticCorpus, SyntheticSpec, DEFAULT_INVENTORY};
pub use rig::{write_correlation_rig, RigSpec, EDITED_DIR, ORIG_DIR};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    Acoustic(#[from] crate::acoustics::AcousticError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
