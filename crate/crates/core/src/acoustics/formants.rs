//! LPC formant tracking.

use nalgebra::{Complex, DMatrix};
use rustfft::FftPlanner;

use super::{hann, AcousticConfig, AcousticError, Measurement, MeasurementKind, Waveform};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormantSet {
    pub f1: Measurement,
    pub f2: Measurement,
    pub b1: Measurement,
}

/// Band-limited resampling of `x` from `fs` to `fs_new` by truncating or
/// zero-extending its spectrum.
pub fn resample(x: &[f64], fs: f64, fs_new: f64) -> Vec<f64> {
    let n = x.len();
    let m = ((n as f64) * fs_new / fs).round().max(1.0) as usize;
    if n == 0 || m == n {
        return x.to_vec();
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut spec: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut spec);
    let mut out = vec![Complex::new(0.0, 0.0); m];
    let nn = n.min(m);
    for k in 0..=nn / 2 {
        out[k] = spec[k];
    }
    for k in 1..=(nn - 1) / 2 {
        out[m - k] = spec[n - k];
    }
    if nn % 2 == 0 {
        // the shared Nyquist bin: fold when shrinking, split when growing
        let h = nn / 2;
        if m < n {
            out[h] = spec[h] + spec[n - h];
        } else {
            out[h] = spec[h] * 0.5;
            out[m - h] = out[h];
        }
    }
    planner.plan_fft_inverse(m).process(&mut out);
    out.iter().map(|c| c.re / n as f64).collect()
}

/// Autocorrelation LPC via Levinson–Durbin. Returns `a[1..=order]` with the
/// predictor polynomial `1 + Σ a_k z^-k`, or `None` for a silent frame.
pub fn lpc_coefficients(frame: &[f64], order: usize) -> Option<Vec<f64>> {
    let r: Vec<f64> = (0..=order)
        .map(|lag| {
            frame
                .iter()
                .zip(frame.iter().skip(lag))
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    if r[0] <= 0.0 {
        return None;
    }
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut err = r[0];
    for i in 1..=order {
        let acc: f64 = (1..i).map(|j| a[j] * r[i - j]).sum::<f64>() + r[i];
        let k = -acc / err;
        let prev = a.clone();
        for j in 1..i {
            a[j] = prev[j] + k * prev[i - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
        if err <= 0.0 {
            break;
        }
    }
    Some(a[1..].to_vec())
}

/// Roots of `z^p + a_1 z^(p-1) + … + a_p` as companion-matrix eigenvalues.
pub fn lpc_roots(a: &[f64]) -> Vec<Complex<f64>> {
    let p = a.len();
    if p == 0 {
        return Vec::new();
    }
    let mut c = DMatrix::<f64>::zeros(p, p);
    for (j, &coef) in a.iter().enumerate() {
        c[(0, j)] = -coef;
    }
    for i in 1..p {
        c[(i, i - 1)] = 1.0;
    }
    c.complex_eigenvalues().iter().copied().collect()
}

/// Formant candidates `(frequency, bandwidth)` of one frame, ascending in frequency.
fn frame_candidates(frame: &[f64], order: usize, fs: f64, cfg: &AcousticConfig) -> Vec<(f64, f64)> {
    let Some(a) = lpc_coefficients(frame, order) else {
        return Vec::new();
    };
    let mut out: Vec<(f64, f64)> = lpc_roots(&a)
        .into_iter()
        .filter(|z| z.im > 1e-12)
        .filter_map(|z| {
            let f = fs * z.im.atan2(z.re) / (2.0 * std::f64::consts::PI);
            let bw = -(fs / std::f64::consts::PI) * z.norm().ln();
            (f > cfg.min_formant && f < cfg.formant_ceiling && bw < cfg.max_bandwidth && bw.is_finite())
                .then_some((f, bw))
        })
        .collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// F1, F2 and the F1 bandwidth over `[t_start, t_end)`: medians over frames
/// that yield at least two formant candidates.
pub fn formants(w: &Waveform, t_start: f64, t_end: f64, cfg: &AcousticConfig) -> Result<FormantSet, AcousticError> {
    let seg = w.segment(t_start, t_end)?;
    let fs = w.sample_rate as f64;
    let target = 2.0 * cfg.formant_ceiling;
    let (x, fs_eff) = if fs > target {
        (resample(seg, fs, target), target)
    } else {
        (seg.to_vec(), fs)
    };
    let win = (cfg.window_s * fs_eff).round() as usize;
    let hop = ((cfg.hop_s * fs_eff).round() as usize).max(1);
    if x.len() < win || win < 2 {
        return Err(AcousticError::SegmentTooShort {
            samples: x.len(),
            required: win,
        });
    }
    let mut y = Vec::with_capacity(x.len());
    y.push(x[0]);
    for i in 1..x.len() {
        y.push(x[i] - cfg.pre_emphasis * x[i - 1]);
    }
    let order = 2 + (fs_eff / 1000.0).ceil() as usize;
    let window = hann(win);
    let (mut f1s, mut f2s, mut b1s) = (Vec::new(), Vec::new(), Vec::new());
    let mut start = 0;
    while start + win <= y.len() {
        let frame: Vec<f64> = y[start..start + win].iter().zip(&window).map(|(a, b)| a * b).collect();
        let c = frame_candidates(&frame, order, fs_eff, cfg);
        if c.len() >= 2 {
            f1s.push(c[0].0);
            f2s.push(c[1].0);
            b1s.push(c[0].1);
        }
        start += hop;
    }
    let n = f1s.len();
    let m = |kind, xs: &[f64]| match stats::median(xs) {
        Some(v) => Measurement::defined(kind, v, n),
        None => Measurement::undefined(kind),
    };
    Ok(FormantSet {
        f1: m(MeasurementKind::F1, &f1s),
        f2: m(MeasurementKind::F2, &f2s),
        b1: m(MeasurementKind::F1BW, &b1s),
    })
}
