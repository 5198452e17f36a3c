//! Harmonics-to-noise ratio from the normalized autocorrelation peak.

use super::{AcousticConfig, AcousticError, Measurement, MeasurementKind, Waveform};
use crate::stats;

/// Largest correlation accepted, so perfectly periodic input stays finite (~100 dB).
const R_MAX: f64 = 1.0 - 1e-10;

/// Normalized cross-correlation of `x[0..span]` with `x[lag..lag + span]`.
fn ncc(x: &[f64], lag: usize, span: usize) -> f64 {
    let a = &x[..span];
    let b = &x[lag..lag + span];
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (p, q) in a.iter().zip(b) {
        ab += p * q;
        aa += p * p;
        bb += q * q;
    }
    if aa <= 0.0 || bb <= 0.0 {
        0.0
    } else {
        ab / (aa * bb).sqrt()
    }
}

/// Peak correlation over the pitch lag range, refined by a parabola through
/// the peak and its neighbours.
fn frame_peak(x: &[f64], min_lag: usize, max_lag: usize, span: usize) -> f64 {
    let rs: Vec<f64> = (min_lag..=max_lag).map(|lag| ncc(x, lag, span)).collect();
    let (k, &peak) = rs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty lag range");
    if k == 0 || k + 1 == rs.len() {
        return peak;
    }
    let (l, r) = (rs[k - 1], rs[k + 1]);
    let curvature = l - 2.0 * peak + r;
    if curvature >= 0.0 {
        return peak;
    }
    peak - (l - r) * (l - r) / (8.0 * curvature)
}

/// Median frame HNR (dB) over voiced frames of `[t_start, t_end)`.
///
/// Frames span three periods of the pitch floor (hop `hop_s`), comparing two
/// floor periods against their shift by each candidate lag. A segment shorter
/// than a frame but at least two floor periods long is analysed as one frame.
pub fn hnr(w: &Waveform, t_start: f64, t_end: f64, cfg: &AcousticConfig) -> Result<Measurement, AcousticError> {
    let seg = w.segment(t_start, t_end)?;
    let fs = w.sample_rate as f64;
    let min_lag = ((fs / cfg.pitch_ceiling).floor() as usize).max(1);
    let max_lag = (fs / cfg.pitch_floor).ceil() as usize;
    let required = 2 * max_lag;
    if seg.len() < required {
        return Err(AcousticError::SegmentTooShort {
            samples: seg.len(),
            required,
        });
    }
    let mean = stats::mean(seg);
    let x: Vec<f64> = seg.iter().map(|v| v - mean).collect();
    let frame_len = 3 * max_lag;
    let hop = ((cfg.hop_s * fs).round() as usize).max(1);
    let mut frames = Vec::new();
    if x.len() < frame_len {
        frames.push((0, x.len() - max_lag));
    } else {
        let mut s = 0;
        while s + frame_len <= x.len() {
            frames.push((s, 2 * max_lag));
            s += hop;
        }
    }
    let mut values = Vec::new();
    for (s, span) in frames {
        let r = frame_peak(&x[s..], min_lag, max_lag, span);
        if r > cfg.voicing_threshold {
            let r = r.min(R_MAX);
            values.push(10.0 * (r / (1.0 - r)).log10());
        }
    }
    Ok(match stats::median(&values) {
        Some(v) => Measurement::defined(MeasurementKind::HNR, v, values.len()),
        None => Measurement::undefined(MeasurementKind::HNR),
    })
}
