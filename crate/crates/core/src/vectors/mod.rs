//! Phonological direction vectors: extraction, subsampling analyses and edits.

mod edit;

use std::fmt;
use std::str::FromStr;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusError, PhoneBank};
use crate::features::{FeatureError, FeatureTable, PhoneClass, Ternary};
use crate::rng;
use crate::stats;

pub use edit::{
    apply_edit, plan_edit_batch, write_edit_batch, EditLog, EditSpec, UtteranceGeometry, EDITS_FILE,
};

#[derive(Debug, Error)]
pub enum VectorError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("no {side} instances of class {class} for feature {feature}")]
    EmptySide {
        feature: String,
        class: PhoneClass,
        side: &'static str,
    },
    #[error("phone {0:?} has no instances in the bank")]
    MissingPhone(String),
    #[error("vector length {found} does not match representation width {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("frame range [{start}, {end}) outside [0, {rows})")]
    RangeOutOfBounds { start: usize, end: usize, rows: usize },
    #[error("vector {0} has zero norm")]
    ZeroVector(usize),
    #[error("no eligible segments for feature {feature} in class {class}")]
    NoEligibleSegments { feature: String, class: PhoneClass },
    #[error("invalid lambda range [{0}, {1}]")]
    InvalidLambdaRange(f64, f64),
    #[error("bad vector encoding: {0}")]
    Encoding(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// The eight standard (feature, class) targets: vowel height, lowness,
/// backness and rounding; consonant nasality, sonorance, stridency and voicing.
pub const DEFAULT_TARGETS: [(&str, PhoneClass); 8] = [
    ("hi", PhoneClass::Vowel),
    ("lo", PhoneClass::Vowel),
    ("back", PhoneClass::Vowel),
    ("round", PhoneClass::Vowel),
    ("nas", PhoneClass::Consonant),
    ("son", PhoneClass::Consonant),
    ("strid", PhoneClass::Consonant),
    ("voi", PhoneClass::Consonant),
];

/// How side means weight the phones that make up each side.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Every pooled segment counts once.
    #[default]
    Instance,
    /// Each phone type counts once (mean of per-phone means).
    PhoneType,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Instance => "instance",
            Weighting::PhoneType => "phone-type",
        })
    }
}

impl FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "instance" => Ok(Weighting::Instance),
            "phone-type" | "type" => Ok(Weighting::PhoneType),
            other => Err(format!("unknown weighting {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhonologicalVector {
    pub feature: String,
    pub phone_class: PhoneClass,
    pub direction: Vec<f32>,
    pub n_pos: usize,
    pub n_neg: usize,
    pub pos_phones: Vec<String>,
    pub neg_phones: Vec<String>,
    pub weighting: Weighting,
    pub layer_index: u32,
    pub model_id: String,
}

impl PhonologicalVector {
    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn norm(&self) -> f64 {
        self.direction_f64().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn direction_f64(&self) -> Vec<f64> {
        self.direction.iter().map(|&x| x as f64).collect()
    }

    pub fn to_json(&self) -> Result<String, VectorError> {
        Ok(serde_json::to_string_pretty(&VectorRecord::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self, VectorError> {
        let rec: VectorRecord = serde_json::from_str(text)?;
        rec.try_into()
    }
}

/// On-disk vector layout: direction as base64 little-endian float32.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorRecord {
    pub feature: String,
    pub phone_class: PhoneClass,
    pub dim: usize,
    pub n_pos: usize,
    pub n_neg: usize,
    #[serde(default)]
    pub pos_phones: Vec<String>,
    #[serde(default)]
    pub neg_phones: Vec<String>,
    #[serde(default)]
    pub weighting: Weighting,
    #[serde(default)]
    pub layer_index: u32,
    #[serde(default)]
    pub model_id: String,
    pub direction_f32_b64: String,
}

impl From<&PhonologicalVector> for VectorRecord {
    fn from(v: &PhonologicalVector) -> Self {
        let bytes: Vec<u8> = v.direction.iter().flat_map(|x| x.to_le_bytes()).collect();
        VectorRecord {
            feature: v.feature.clone(),
            phone_class: v.phone_class,
            dim: v.dim(),
            n_pos: v.n_pos,
            n_neg: v.n_neg,
            pos_phones: v.pos_phones.clone(),
            neg_phones: v.neg_phones.clone(),
            weighting: v.weighting,
            layer_index: v.layer_index,
            model_id: v.model_id.clone(),
            direction_f32_b64: BASE64.encode(bytes),
        }
    }
}

impl TryFrom<VectorRecord> for PhonologicalVector {
    type Error = VectorError;

    fn try_from(r: VectorRecord) -> Result<Self, Self::Error> {
        let bytes = BASE64
            .decode(r.direction_f32_b64.as_bytes())
            .map_err(|e| VectorError::Encoding(e.to_string()))?;
        if bytes.len() != 4 * r.dim {
            return Err(VectorError::Encoding(format!(
                "{} bytes for dimension {}",
                bytes.len(),
                r.dim
            )));
        }
        let direction = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(PhonologicalVector {
            feature: r.feature,
            phone_class: r.phone_class,
            direction,
            n_pos: r.n_pos,
            n_neg: r.n_neg,
            pos_phones: r.pos_phones,
            neg_phones: r.neg_phones,
            weighting: r.weighting,
            layer_index: r.layer_index,
            model_id: r.model_id,
        })
    }
}

/// Phones of `class` in both bank and table with `+` / `-` for `feature`.
fn sides<'a>(
    bank: &'a PhoneBank,
    table: &FeatureTable,
    feature: &str,
    class: PhoneClass,
) -> Result<(Vec<&'a str>, Vec<&'a str>), VectorError> {
    let fi = table.feature_index(feature)?;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (p, inst) in bank.phones() {
        if inst.is_empty() || !table.contains(p) || table.phone_class(p)? != class {
            continue;
        }
        match table.value(p, fi)? {
            Ternary::Plus => pos.push(p),
            Ternary::Minus => neg.push(p),
            Ternary::Zero => {}
        }
    }
    let empty = |side| VectorError::EmptySide {
        feature: feature.to_string(),
        class,
        side,
    };
    if pos.is_empty() {
        return Err(empty("positive"));
    }
    if neg.is_empty() {
        return Err(empty("negative"));
    }
    Ok((pos, neg))
}

fn side_mean(bank: &PhoneBank, phones: &[&str], weighting: Weighting) -> (Vec<f64>, usize) {
    let mut acc = vec![0.0f64; bank.dim()];
    let mut n = 0usize;
    for p in phones {
        let inst = bank.get(p).expect("side phones come from the bank");
        match weighting {
            Weighting::Instance => {
                for v in inst.iter() {
                    acc.iter_mut().zip(v).for_each(|(a, &x)| *a += x as f64);
                }
            }
            Weighting::PhoneType => {
                acc.iter_mut().zip(inst.mean()).for_each(|(a, x)| *a += x);
            }
        }
        n += inst.len();
    }
    let denom = match weighting {
        Weighting::Instance => n,
        Weighting::PhoneType => phones.len(),
    } as f64;
    acc.iter_mut().for_each(|a| *a /= denom);
    (acc, n)
}

fn difference(a: &[f64], b: &[f64]) -> Vec<f32> {
    a.iter().zip(b).map(|(x, y)| (x - y) as f32).collect()
}

/// Mean of `+feature` instances minus mean of `-feature` instances within `class`.
pub fn extract_vector(
    bank: &PhoneBank,
    table: &FeatureTable,
    feature: &str,
    class: PhoneClass,
    weighting: Weighting,
) -> Result<PhonologicalVector, VectorError> {
    let (pos, neg) = sides(bank, table, feature, class)?;
    let (mp, n_pos) = side_mean(bank, &pos, weighting);
    let (mn, n_neg) = side_mean(bank, &neg, weighting);
    Ok(PhonologicalVector {
        feature: feature.to_string(),
        phone_class: class,
        direction: difference(&mp, &mn),
        n_pos,
        n_neg,
        pos_phones: pos.iter().map(|s| s.to_string()).collect(),
        neg_phones: neg.iter().map(|s| s.to_string()).collect(),
        weighting,
        layer_index: bank.layer_index,
        model_id: bank.model_id.clone(),
    })
}

/// Cosine of subsampled vectors to the full-bank vector, per sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEfficiency {
    pub n: usize,
    pub cosines: Vec<f64>,
}

impl SampleEfficiency {
    pub fn mean(&self) -> f64 {
        stats::mean(&self.cosines)
    }
}

/// For each `N`, draw `N` instances per side with replacement `repeats` times
/// and record the cosine of the mean difference to the full-bank vector.
/// Trials with a zero-norm subsample are recorded as 0.
pub fn sample_efficiency(
    bank: &PhoneBank,
    table: &FeatureTable,
    feature: &str,
    class: PhoneClass,
    ns: &[usize],
    repeats: usize,
    seed: u64,
) -> Result<Vec<SampleEfficiency>, VectorError> {
    let full = extract_vector(bank, table, feature, class, Weighting::Instance)?.direction_f64();
    let (pos, neg) = sides(bank, table, feature, class)?;
    let flatten = |phones: &[&str]| -> Vec<&[f32]> {
        phones
            .iter()
            .flat_map(|p| bank.get(p).expect("side phones come from the bank").iter())
            .collect()
    };
    let pos_pool = flatten(&pos);
    let neg_pool = flatten(&neg);
    let dim = bank.dim();
    Ok(ns
        .iter()
        .map(|&n| {
            let cosines = (0..repeats)
                .into_par_iter()
                .map(|r| {
                    let mut rng = rng::stream(seed, &[rng::stable_hash(feature.as_bytes()), n as u64, r as u64]);
                    let mut acc = vec![0.0f64; dim];
                    for _ in 0..n {
                        let v = pos_pool[rng.gen_range(0..pos_pool.len())];
                        acc.iter_mut().zip(v).for_each(|(a, &x)| *a += x as f64);
                    }
                    for _ in 0..n {
                        let v = neg_pool[rng.gen_range(0..neg_pool.len())];
                        acc.iter_mut().zip(v).for_each(|(a, &x)| *a -= x as f64);
                    }
                    stats::cosine(&acc, &full).unwrap_or(0.0)
                })
                .collect();
            SampleEfficiency { n, cosines }
        })
        .collect())
}

/// Vector from a single phone pair, and its cosine to the full extraction
/// of `feature` in the class of `p_pos`.
pub fn single_pair_vector(
    bank: &PhoneBank,
    table: &FeatureTable,
    feature: &str,
    p_pos: &str,
    p_neg: &str,
) -> Result<(PhonologicalVector, f64), VectorError> {
    let get = |p: &str| {
        bank.get(p)
            .filter(|i| !i.is_empty())
            .ok_or_else(|| VectorError::MissingPhone(p.to_string()))
    };
    let (ip, ineg) = (get(p_pos)?, get(p_neg)?);
    let class = table.phone_class(p_pos)?;
    let direction = difference(&ip.mean(), &ineg.mean());
    let full = extract_vector(bank, table, feature, class, Weighting::Instance)?;
    let v = PhonologicalVector {
        feature: feature.to_string(),
        phone_class: class,
        direction,
        n_pos: ip.len(),
        n_neg: ineg.len(),
        pos_phones: vec![p_pos.to_string()],
        neg_phones: vec![p_neg.to_string()],
        weighting: Weighting::Instance,
        layer_index: bank.layer_index,
        model_id: bank.model_id.clone(),
    };
    let cos = stats::cosine(&v.direction_f64(), &full.direction_f64()).unwrap_or(0.0);
    Ok((v, cos))
}

/// Pairwise cosine similarities; errors on zero vectors or mismatched widths.
pub fn vector_similarity_matrix(vs: &[PhonologicalVector]) -> Result<Vec<Vec<f64>>, VectorError> {
    let dirs: Vec<Vec<f64>> = vs.iter().map(|v| v.direction_f64()).collect();
    for (i, d) in dirs.iter().enumerate() {
        if d.len() != dirs[0].len() {
            return Err(VectorError::LengthMismatch {
                expected: dirs[0].len(),
                found: d.len(),
            });
        }
        if stats::norm(d) == 0.0 {
            return Err(VectorError::ZeroVector(i));
        }
    }
    let n = dirs.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = 1.0;
        for j in i + 1..n {
            let c = stats::cosine(&dirs[i], &dirs[j]).expect("norms checked");
            m[i][j] = c;
            m[j][i] = c;
        }
    }
    Ok(m)
}
