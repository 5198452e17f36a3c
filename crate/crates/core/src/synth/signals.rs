//! Test signals with known acoustic parameters.

use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

pub fn sine(freq: f64, fs: u32, dur: f64, amp: f64) -> Vec<f64> {
    let n = (dur * fs as f64).round() as usize;
    (0..n).map(|i| amp * (2.0 * PI * freq * i as f64 / fs as f64).sin()).collect()
}

/// Unit impulses every `period` samples.
pub fn pulse_train(period: usize, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i % period == 0 { 1.0 } else { 0.0 }).collect()
}

pub fn white_noise(n: usize, sd: f64, seed: u64) -> Vec<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = Normal::new(0.0, sd).expect("finite non-negative sd");
    (0..n).map(|_| d.sample(&mut rng)).collect()
}

/// Two-pole resonator with centre `freq` and bandwidth `bw` (Hz).
pub fn resonate(x: &[f64], freq: f64, bw: f64, fs: u32) -> Vec<f64> {
    let fs = fs as f64;
    let r = (-PI * bw / fs).exp();
    let a1 = 2.0 * r * (2.0 * PI * freq / fs).cos();
    let a2 = -r * r;
    let mut y = vec![0.0; x.len()];
    for i in 0..x.len() {
        let y1 = if i >= 1 { y[i - 1] } else { 0.0 };
        let y2 = if i >= 2 { y[i - 2] } else { 0.0 };
        y[i] = x[i] + a1 * y1 + a2 * y2;
    }
    y
}

/// One-pole lowpass `y[n] = x[n] + a·y[n-1]`. With `a` equal to the
/// pre-emphasis coefficient it models the source tilt that pre-emphasis undoes.
pub fn tilt(x: &[f64], a: f64) -> Vec<f64> {
    let mut y = Vec::with_capacity(x.len());
    let mut prev = 0.0;
    for &v in x {
        prev = v + a * prev;
        y.push(prev);
    }
    y
}

/// Impulse train at `f0` through a source-tilt lowpass and two resonators.
pub fn two_formant_vowel(f0: f64, f1: f64, b1: f64, f2: f64, b2: f64, fs: u32, dur: f64) -> Vec<f64> {
    let n = (dur * fs as f64) as usize;
    let src = tilt(&pulse_train((fs as f64 / f0).round() as usize, n), 0.97);
    resonate(&resonate(&src, f1, b1, fs), f2, b2, fs)
}

/// Mean power.
pub fn power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64
}

/// `x` plus white noise scaled to the given signal:noise power ratio.
pub fn add_noise_at_ratio(x: &[f64], ratio: f64, seed: u64) -> Vec<f64> {
    let sd = (power(x) / ratio).sqrt();
    x.iter().zip(white_noise(x.len(), sd, seed)).map(|(a, b)| a + b).collect()
}

/// Scale to a peak of `peak` (no-op for silence).
pub fn normalize_peak(x: &[f64], peak: f64) -> Vec<f64> {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return x.to_vec();
    }
    x.iter().map(|v| v * peak / m).collect()
}
