//! Formants, spectral centre of gravity and harmonics-to-noise ratio on
//! synthetic signals with known answers.

use phonovec::acoustics::{cog, formants, hnr, AcousticConfig, Waveform};
use phonovec::synth::signals::{add_noise_at_ratio, sine, two_formant_vowel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = AcousticConfig::default();
    let fs = 16000;

    for (f1, f2) in [(300.0, 2300.0), (500.0, 1500.0), (700.0, 1100.0)] {
        let w = Waveform::new(two_formant_vowel(120.0, f1, 80.0, f2, 100.0, fs, 0.3), fs)?;
        let f = formants(&w, 0.0, 0.3, &cfg)?;
        println!(
            "resonators {f1}/{f2} Hz -> F1 {:.0}  F2 {:.0}  B1 {:.0}",
            f.f1.value.unwrap_or(f64::NAN),
            f.f2.value.unwrap_or(f64::NAN),
            f.b1.value.unwrap_or(f64::NAN)
        );
    }

    let tone = Waveform::new(sine(1000.0, fs, 0.2, 0.5), fs)?;
    println!("COG of a 1 kHz sine: {:.1} Hz", cog(&tone, 0.0, 0.2, &cfg)?.value.unwrap_or(f64::NAN));

    let voiced = two_formant_vowel(120.0, 600.0, 80.0, 1700.0, 100.0, fs, 0.5);
    for ratio in [10.0, 1.0, 0.1] {
        let w = Waveform::new(add_noise_at_ratio(&voiced, ratio, 1), fs)?;
        let m = hnr(&w, 0.0, 0.5, &cfg)?;
        match m.value {
            Some(v) => println!("HNR at harmonic:noise {ratio}: {v:.1} dB over {} frames", m.n_frames_used),
            None => println!("HNR at harmonic:noise {ratio}: undefined"),
        }
    }
    Ok(())
}
