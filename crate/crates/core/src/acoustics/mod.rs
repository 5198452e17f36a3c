//! Acoustic measurements on audio segments and their correlation with edit strength.

mod cog;
mod correlate;
mod formants;
mod hnr;
mod wav;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cog::cog;
pub use correlate::{
    correlate_edits, correlate_feature, default_threshold, measure_edits, measure_segment, spearman, stability_check, stability_from_dirs,
    write_correlation_csv, write_stability_csv, write_stability_density_csv, CorrelationRow, EditPairAudio,
    MeasuredGroup, MeasurementPair, Sign, SignTable, StabilitySummary, MIN_DEFINED_PAIRS,
};
pub use formants::{formants, lpc_coefficients, lpc_roots, resample, FormantSet};
pub use hnr::hnr;
pub use wav::{read_wav, write_wav, WavEncoding};

#[derive(Debug, Error)]
pub enum AcousticError {
    #[error("sample rate must be positive")]
    InvalidSampleRate,
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("expected mono audio, found {0} channels")]
    Multichannel(u16),
    #[error("{0}: truncated WAV file")]
    Truncated(PathBuf),
    #[error("{path}: {message}")]
    Wav { path: PathBuf, message: String },
    #[error("segment [{t_start}, {t_end}) is outside the waveform or empty")]
    InvalidSegment { t_start: f64, t_end: f64 },
    #[error("segment of {samples} samples is shorter than the required {required}")]
    SegmentTooShort { samples: usize, required: usize },
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 points, found {0}")]
    TooFewPoints(usize),
    #[error("rank correlation undefined: constant series")]
    ConstantSeries,
    #[error("only {found} defined measurement pairs, need {required}")]
    TooFewDefined { found: usize, required: usize },
    #[error("no paired audio for {0}")]
    UnpairedAudio(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self, AcousticError> {
        if sample_rate == 0 {
            return Err(AcousticError::InvalidSampleRate);
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(AcousticError::NonFinite(i));
        }
        Ok(Waveform { samples, sample_rate })
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Samples in `[round(t_start·fs), round(t_end·fs))`, clamped to the waveform.
    pub fn segment(&self, t_start: f64, t_end: f64) -> Result<&[f64], AcousticError> {
        let fs = self.sample_rate as f64;
        let s = (t_start * fs).round().max(0.0) as usize;
        let e = ((t_end * fs).round().max(0.0) as usize).min(self.samples.len());
        if !(t_start.is_finite() && t_end.is_finite()) || s >= e {
            return Err(AcousticError::InvalidSegment { t_start, t_end });
        }
        Ok(&self.samples[s..e])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasurementKind {
    F1,
    F2,
    F1BW,
    HNR,
    COG,
}

impl MeasurementKind {
    pub const ALL: [MeasurementKind; 5] = [
        MeasurementKind::F1,
        MeasurementKind::F2,
        MeasurementKind::F1BW,
        MeasurementKind::HNR,
        MeasurementKind::COG,
    ];

    pub fn unit(self) -> &'static str {
        match self {
            MeasurementKind::HNR => "dB",
            _ => "Hz",
        }
    }
}

impl fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasurementKind::F1 => "F1",
            MeasurementKind::F2 => "F2",
            MeasurementKind::F1BW => "F1BW",
            MeasurementKind::HNR => "HNR",
            MeasurementKind::COG => "COG",
        })
    }
}

impl FromStr for MeasurementKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "F1" => Ok(MeasurementKind::F1),
            "F2" => Ok(MeasurementKind::F2),
            "F1BW" | "B1" => Ok(MeasurementKind::F1BW),
            "HNR" => Ok(MeasurementKind::HNR),
            "COG" => Ok(MeasurementKind::COG),
            other => Err(format!("unknown measurement {other:?}")),
        }
    }
}

/// A measurement that may be undefined (no value, never a sentinel).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub kind: MeasurementKind,
    pub value: Option<f64>,
    pub n_frames_used: usize,
}

impl Measurement {
    pub fn defined(kind: MeasurementKind, value: f64, n_frames_used: usize) -> Self {
        Measurement {
            kind,
            value: Some(value),
            n_frames_used,
        }
    }

    pub fn undefined(kind: MeasurementKind) -> Self {
        Measurement {
            kind,
            value: None,
            n_frames_used: 0,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.value.is_some()
    }
}

/// Analysis parameters for all measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcousticConfig {
    pub formant_ceiling: f64,
    pub pre_emphasis: f64,
    pub window_s: f64,
    pub hop_s: f64,
    pub min_formant: f64,
    pub max_bandwidth: f64,
    pub cog_exponent: f64,
    /// RMS below which a segment counts as silent for COG.
    pub silence_rms: f64,
    pub pitch_floor: f64,
    pub pitch_ceiling: f64,
    /// Frames with a normalized autocorrelation peak above this are voiced.
    pub voicing_threshold: f64,
}

impl Default for AcousticConfig {
    fn default() -> Self {
        AcousticConfig {
            formant_ceiling: 5500.0,
            pre_emphasis: 0.97,
            window_s: 0.025,
            hop_s: 0.010,
            min_formant: 90.0,
            max_bandwidth: 700.0,
            cog_exponent: 2.0,
            silence_rms: 1e-5,
            pitch_floor: 75.0,
            pitch_ceiling: 500.0,
            voicing_threshold: 0.1,
        }
    }
}

fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}
