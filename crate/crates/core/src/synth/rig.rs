//! Audio rig for the correlation analysis: original and "edited" recordings
//! whose measured parameter moves with λ in the expected direction.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::signals::{add_noise_at_ratio, normalize_peak, sine, two_formant_vowel};
use crate::acoustics::{write_wav, MeasurementKind, Sign, SignTable, WavEncoding, Waveform};
use crate::features::PhoneClass;
use crate::io::{to_jsonl, write_atomic};
use crate::rng;
use crate::vectors::{EditSpec, EDITS_FILE};

pub const ORIG_DIR: &str = "orig";
pub const EDITED_DIR: &str = "edited";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigSpec {
    pub n_per_feature: usize,
    pub sample_rate: u32,
    pub duration: f64,
    pub lambda_range: (f64, f64),
    pub seed: u64,
}

impl Default for RigSpec {
    fn default() -> Self {
        RigSpec {
            n_per_feature: 200,
            sample_rate: 16000,
            duration: 0.25,
            lambda_range: (-5.0, 5.0),
            seed: 0,
        }
    }
}

/// Class and representative phone label used for each sign-table feature.
fn feature_target(feature: &str) -> (PhoneClass, &'static str) {
    match feature {
        "hi" => (PhoneClass::Vowel, "i"),
        "lo" => (PhoneClass::Vowel, "a"),
        "back" => (PhoneClass::Vowel, "u"),
        "round" => (PhoneClass::Vowel, "o"),
        "nas" => (PhoneClass::Consonant, "n"),
        "son" => (PhoneClass::Consonant, "l"),
        "strid" => (PhoneClass::Consonant, "s"),
        _ => (PhoneClass::Consonant, "z"),
    }
}

/// Signal whose `kind` measurement sits near a base value (moved by
/// `jitter ∈ [-1, 1]`) plus `shift` in the measurement's natural units.
fn rig_signal(kind: MeasurementKind, jitter: f64, shift: f64, fs: u32, dur: f64, noise_seed: u64) -> Vec<f64> {
    let f0 = 125.0;
    match kind {
        MeasurementKind::F1 => two_formant_vowel(f0, 500.0 + 50.0 * jitter + shift, 80.0, 1500.0, 100.0, fs, dur),
        MeasurementKind::F2 => two_formant_vowel(f0, 500.0, 80.0, 1500.0 + 100.0 * jitter + shift, 100.0, fs, dur),
        MeasurementKind::F1BW => {
            two_formant_vowel(f0, 600.0, 180.0 + 20.0 * jitter + shift, 1700.0, 100.0, fs, dur)
        }
        MeasurementKind::HNR => {
            let h = two_formant_vowel(f0, 600.0, 80.0, 1700.0, 100.0, fs, dur);
            let db = 6.0 + 2.0 * jitter + shift;
            add_noise_at_ratio(&h, 10f64.powf(db / 10.0), noise_seed)
        }
        MeasurementKind::COG => {
            let db = 2.0 * jitter + shift;
            let hi_amp = 10f64.powf(db / 20.0);
            sine(800.0, fs, dur, 1.0)
                .iter()
                .zip(sine(3000.0, fs, dur, hi_amp))
                .map(|(a, b)| a + b)
                .collect()
        }
    }
}

/// Parameter change per unit λ, in the measurement's units.
fn slope(kind: MeasurementKind) -> f64 {
    match kind {
        MeasurementKind::F1 => 20.0,
        MeasurementKind::F2 => 40.0,
        MeasurementKind::F1BW => 15.0,
        MeasurementKind::HNR => 1.2,
        MeasurementKind::COG => 1.0,
    }
}

fn signed(sign: Sign) -> f64 {
    match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    }
}

/// Write `orig/<utt>.wav`, `edited/<edit_id>.wav` and `edits.jsonl` for every
/// sign-table feature.
pub fn write_correlation_rig(dir: &Path, spec: &RigSpec, table: &SignTable) -> Result<Vec<EditSpec>, super::SynthError> {
    let (lo, hi) = spec.lambda_range;
    let frames = (spec.duration * 50.0).round() as usize;
    let mut plans = Vec::new();
    for (feature, kind, sign) in table.rows() {
        let (class, phone) = feature_target(feature);
        let mut rng = rng::stream_for(spec.seed, &format!("rig/{feature}"), 0);
        for i in 0..spec.n_per_feature {
            let lambda: f64 = rng.gen_range(lo..=hi);
            let jitter: f64 = rng.gen_range(-1.0..=1.0);
            let utt = format!("rig_{feature}_{i:04}");
            let edit = EditSpec {
                edit_id: format!("{utt}__{i:05}_lam{lambda:+.3}"),
                utterance_id: utt,
                phone: phone.to_string(),
                t_start: 0.0,
                t_end: spec.duration,
                frame_start: 0,
                frame_end: frames.max(1),
                feature: feature.clone(),
                phone_class: class,
                lambda,
            };
            plans.push((edit, *kind, signed(*sign) * slope(*kind) * lambda, jitter, rng.gen::<u64>()));
        }
    }
    std::fs::create_dir_all(dir.join(ORIG_DIR))?;
    std::fs::create_dir_all(dir.join(EDITED_DIR))?;
    plans
        .par_iter()
        .map(|(edit, kind, shift, jitter, noise_seed)| {
            let fs = spec.sample_rate;
            let orig = rig_signal(*kind, *jitter, 0.0, fs, spec.duration, *noise_seed);
            let edited = rig_signal(*kind, *jitter, *shift, fs, spec.duration, noise_seed.wrapping_add(1));
            for (sub, name, x) in [(ORIG_DIR, &edit.utterance_id, orig), (EDITED_DIR, &edit.edit_id, edited)] {
                let w = Waveform::new(normalize_peak(&x, 0.8), fs)?;
                write_wav(dir.join(sub).join(format!("{name}.wav")), &w, WavEncoding::Float32)?;
            }
            Ok(())
        })
        .collect::<Result<(), super::SynthError>>()?;
    let edits: Vec<EditSpec> = plans.into_iter().map(|p| p.0).collect();
    write_atomic(&dir.join(EDITS_FILE), &to_jsonl(&edits)?)?;
    Ok(edits)
}
