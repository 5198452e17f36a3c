//! Synthetic representation dumps with known phonological structure.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::corpus::{write_rep_dump, CorpusError, DumpMeta, PhoneBank, RepDump, RepresentationMatrix, SegmentRecord};
use crate::features::{FeatureError, FeatureTable};
use crate::rng;

/// Twelve consonants and seven vowels with pairwise distinct feature vectors,
/// forming both consonant and vowel quadruplets.
pub const DEFAULT_INVENTORY: [&str; 19] = [
    "p", "b", "t", "d", "k", "ɡ", "f", "v", "s", "z", "m", "n", "i", "e", "a", "o", "u", "y", "ø",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    /// Every segment vector is exactly `extend(h_p)` (plus `noise_sd` noise).
    Analogy,
    /// i.i.d. zero-mean Gaussian vectors unrelated to the phone label.
    Null,
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusKind::Analogy => "analogy",
            CorpusKind::Null => "null",
        })
    }
}

impl FromStr for CorpusKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analogy" | "exact" | "noisy" => Ok(CorpusKind::Analogy),
            "null" => Ok(CorpusKind::Null),
            other => Err(format!("unknown corpus kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub kind: CorpusKind,
    pub phones: Vec<String>,
    pub instances_per_phone: usize,
    /// Per-segment Gaussian noise added to `extend(h)` (analogy kind).
    pub noise_sd: f64,
    /// Vector width for the null kind; the analogy kind uses `2 × n_features`.
    pub null_dim: usize,
    pub segments_per_utterance: usize,
    pub frames_per_segment: usize,
    pub stride_samples: u32,
    pub sample_rate: u32,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            kind: CorpusKind::Analogy,
            phones: DEFAULT_INVENTORY.iter().map(|s| s.to_string()).collect(),
            instances_per_phone: 120,
            noise_sd: 0.01,
            null_dim: 42,
            segments_per_utterance: 10,
            frames_per_segment: 3,
            stride_samples: 320,
            sample_rate: 16000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub manifest: Vec<SegmentRecord>,
    pub matrices: Vec<(String, RepresentationMatrix)>,
}

impl SyntheticCorpus {
    /// Bank built by pooling each segment in memory (no filters).
    pub fn bank(&self) -> Result<PhoneBank, CorpusError> {
        let dim = self.matrices.first().map_or(0, |(_, m)| m.cols());
        let mut bank = PhoneBank::new(dim);
        let by_id: std::collections::BTreeMap<&str, &RepresentationMatrix> =
            self.matrices.iter().map(|(id, m)| (id.as_str(), m)).collect();
        for seg in &self.manifest {
            let m = by_id
                .get(seg.utterance_id.as_str())
                .ok_or_else(|| CorpusError::MissingUtterance(seg.utterance_id.clone()))?;
            let v: Vec<f32> = crate::corpus::slice_and_pool(m, seg)?
                .into_iter()
                .map(|x| x as f32)
                .collect();
            bank.push(
                &seg.phone,
                &v,
                crate::corpus::SegmentSource {
                    utterance_id: seg.utterance_id.clone(),
                    t_start: seg.t_start,
                    t_end: seg.t_end,
                    speaker_id: seg.speaker_id.clone(),
                },
            );
        }
        Ok(bank)
    }
}

/// Generate segment vectors, shuffle them into utterances, and hold every
/// frame of a segment at its vector so pooling returns it exactly.
pub fn synthetic_corpus(table: &FeatureTable, spec: &SyntheticSpec) -> Result<SyntheticCorpus, FeatureError> {
    let dim = match spec.kind {
        CorpusKind::Analogy => 2 * table.n_features(),
        CorpusKind::Null => spec.null_dim,
    };
    let mut rng = rng::stream_for(spec.seed, &format!("synthetic/{}", spec.kind), 0);
    let mut segments: Vec<(String, Vec<f32>)> = Vec::new();
    for phone in &spec.phones {
        let base = match spec.kind {
            CorpusKind::Analogy => Some(table.binary(phone)?.as_f32()),
            CorpusKind::Null => None,
        };
        for _ in 0..spec.instances_per_phone {
            let v: Vec<f32> = match &base {
                Some(h) if spec.noise_sd > 0.0 => {
                    let noise = Normal::new(0.0, spec.noise_sd).expect("valid sd");
                    h.iter().map(|&x| x + noise.sample(&mut rng) as f32).collect()
                }
                Some(h) => h.clone(),
                None => {
                    let d = Normal::new(0.0, 1.0).expect("valid sd");
                    (0..dim).map(|_| d.sample(&mut rng) as f32).collect()
                }
            };
            segments.push((phone.clone(), v));
        }
    }
    segments.shuffle(&mut rng);

    let per = spec.segments_per_utterance.max(1);
    let fps = spec.frames_per_segment.max(1);
    let frame_s = spec.stride_samples as f64 / spec.sample_rate as f64;
    let mut manifest = Vec::new();
    let mut matrices = Vec::new();
    for (u, chunk) in segments.chunks(per).enumerate() {
        let utt = format!("syn_{u:05}");
        let rows = chunk.len() * fps;
        let mut data = Vec::with_capacity(rows * dim);
        for (j, (phone, v)) in chunk.iter().enumerate() {
            for _ in 0..fps {
                data.extend_from_slice(v);
            }
            let mut rec = SegmentRecord::new(&utt, phone, (j * fps) as f64 * frame_s, ((j + 1) * fps) as f64 * frame_s);
            rec.speaker_id = format!("spk{}", u % 4);
            manifest.push(rec);
        }
        let m = RepresentationMatrix::new(data, rows, dim, spec.stride_samples, spec.sample_rate)
            .expect("generated matrices are well formed");
        matrices.push((utt, m));
    }
    Ok(SyntheticCorpus { manifest, matrices })
}

/// Generate and write a dump directory.
pub fn write_synthetic_dump(
    dir: &Path,
    table: &FeatureTable,
    spec: &SyntheticSpec,
) -> Result<RepDump, super::SynthError> {
    let corpus = synthetic_corpus(table, spec)?;
    let meta = DumpMeta {
        model_id: format!("synthetic-{}", spec.kind),
        layer_index: 0,
    };
    Ok(write_rep_dump(
        dir,
        &meta,
        &corpus.manifest,
        corpus.matrices.iter().map(|(id, m)| (id.as_str(), m)),
    )?)
}
