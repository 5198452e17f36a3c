use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{hann, AcousticConfig, AcousticError, Measurement, MeasurementKind, Waveform};

/// Spectral centre of gravity: `Σ f·|X(f)|^e / Σ |X(f)|^e` over one
/// zero-padded FFT of the Hann-windowed segment (`e = cog_exponent`).
pub fn cog(w: &Waveform, t_start: f64, t_end: f64, cfg: &AcousticConfig) -> Result<Measurement, AcousticError> {
    let seg = w.segment(t_start, t_end)?;
    let rms = (seg.iter().map(|x| x * x).sum::<f64>() / seg.len() as f64).sqrt();
    if rms <= cfg.silence_rms {
        return Ok(Measurement::undefined(MeasurementKind::COG));
    }
    let n = seg.len().next_power_of_two();
    let window = hann(seg.len());
    let mut buf: Vec<Complex<f64>> = seg
        .iter()
        .zip(&window)
        .map(|(x, h)| Complex::new(x * h, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(n)
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let fs = w.sample_rate as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, c) in buf.iter().enumerate().take(n / 2 + 1) {
        let p = c.norm().powf(cfg.cog_exponent);
        num += k as f64 * fs / n as f64 * p;
        den += p;
    }
    if den <= 0.0 {
        return Ok(Measurement::undefined(MeasurementKind::COG));
    }
    Ok(Measurement::defined(MeasurementKind::COG, num / den, 1))
}
