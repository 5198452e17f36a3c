//! λ-scaled edits of representation matrices.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PhonologicalVector, VectorError};
use crate::corpus::{frame_range, s3mr, RepDump, RepresentationMatrix, SegmentRecord};
use crate::features::{FeatureTable, PhoneClass, Ternary};
use crate::io::{to_jsonl, write_atomic};
use crate::rng;

pub const EDITS_FILE: &str = "edits.jsonl";

/// One planned edit: add `lambda · v` to frames `[frame_start, frame_end)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditSpec {
    pub edit_id: String,
    pub utterance_id: String,
    pub phone: String,
    pub t_start: f64,
    pub t_end: f64,
    pub frame_start: usize,
    pub frame_end: usize,
    pub feature: String,
    pub phone_class: PhoneClass,
    pub lambda: f64,
}

/// Frame count and frame rate of one utterance, enough to map times to rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtteranceGeometry {
    pub rows: usize,
    pub frame_rate: f64,
}

impl From<&RepresentationMatrix> for UtteranceGeometry {
    fn from(m: &RepresentationMatrix) -> Self {
        UtteranceGeometry {
            rows: m.rows(),
            frame_rate: m.frame_rate(),
        }
    }
}

/// Return a copy of `r` with `lambda · v` added to the spec's frame range.
/// Rows outside the range are bit-identical to the input.
pub fn apply_edit(
    r: &RepresentationMatrix,
    spec: &EditSpec,
    v: &PhonologicalVector,
) -> Result<RepresentationMatrix, VectorError> {
    if v.dim() != r.cols() {
        return Err(VectorError::LengthMismatch {
            expected: r.cols(),
            found: v.dim(),
        });
    }
    if spec.frame_start >= spec.frame_end || spec.frame_end > r.rows() {
        return Err(VectorError::RangeOutOfBounds {
            start: spec.frame_start,
            end: spec.frame_end,
            rows: r.rows(),
        });
    }
    let mut out = r.clone();
    if spec.lambda == 0.0 {
        return Ok(out);
    }
    for t in spec.frame_start..spec.frame_end {
        for (x, &d) in out.row_mut(t).iter_mut().zip(&v.direction) {
            *x = (*x as f64 + spec.lambda * d as f64) as f32;
        }
    }
    Ok(out)
}

fn edit_id(utterance_id: &str, index: usize, lambda: f64) -> String {
    format!("{utterance_id}__{index:05}_lam{lambda:+.3}")
}

/// Sample `n` edits: segments with replacement from the eligible pool
/// (class `class`, nonzero value for `feature`, utterance present in
/// `geometry`), λ uniform on `lambda_range`.
#[allow(clippy::too_many_arguments)]
pub fn plan_edit_batch(
    manifest: &[SegmentRecord],
    geometry: &BTreeMap<String, UtteranceGeometry>,
    table: &FeatureTable,
    feature: &str,
    class: PhoneClass,
    n: usize,
    lambda_range: (f64, f64),
    seed: u64,
) -> Result<Vec<EditSpec>, VectorError> {
    let (lo, hi) = lambda_range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(VectorError::InvalidLambdaRange(lo, hi));
    }
    let fi = table.feature_index(feature)?;
    let mut eligible = Vec::new();
    for seg in manifest {
        if !table.contains(&seg.phone)
            || table.phone_class(&seg.phone)? != class
            || table.value(&seg.phone, fi)? == Ternary::Zero
        {
            continue;
        }
        let Some(g) = geometry.get(&seg.utterance_id) else {
            continue;
        };
        if seg.validate().is_err() {
            continue;
        }
        if let Ok(range) = frame_range(g.rows, g.frame_rate, seg.t_start, seg.t_end) {
            eligible.push((seg, range));
        }
    }
    if eligible.is_empty() {
        return Err(VectorError::NoEligibleSegments {
            feature: feature.to_string(),
            class,
        });
    }
    let mut rng = rng::stream_for(seed, &format!("plan-edit/{feature}/{class}"), 0);
    Ok((0..n)
        .map(|i| {
            let (seg, (s, e)) = eligible[rng.gen_range(0..eligible.len())];
            let lambda = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
            EditSpec {
                edit_id: edit_id(&seg.utterance_id, i, lambda),
                utterance_id: seg.utterance_id.clone(),
                phone: seg.phone.clone(),
                t_start: seg.t_start,
                t_end: seg.t_end,
                frame_start: s,
                frame_end: e,
                feature: feature.to_string(),
                phone_class: class,
                lambda,
            }
        })
        .collect())
}

/// Sidecar written next to each edited matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditLog {
    pub edit_id: String,
    pub source_utterance: String,
    pub source_path: String,
    pub feature: String,
    pub phone_class: PhoneClass,
    pub lambda: f64,
    pub frame_start: usize,
    pub frame_end: usize,
    pub vector_norm: f64,
    pub layer_index: u32,
    pub model_id: String,
}

/// Apply every spec to its source matrix in `dump` and write
/// `out/reps/<edit_id>.s3mr`, `out/reps/<edit_id>.edit.json`,
/// `out/edits.jsonl` and `out/vector.json`.
pub fn write_edit_batch(
    dump: &RepDump,
    specs: &[EditSpec],
    v: &PhonologicalVector,
    out: &Path,
) -> Result<Vec<EditLog>, VectorError> {
    let reps = out.join(crate::corpus::REPS_DIR);
    std::fs::create_dir_all(&reps)?;
    let logs: Vec<EditLog> = specs
        .par_iter()
        .map(|spec| {
            let r = dump.load(&spec.utterance_id)?;
            let edited = apply_edit(&r, spec, v)?;
            write_atomic(&reps.join(format!("{}.s3mr", spec.edit_id)), &s3mr::encode(&edited))?;
            let log = EditLog {
                edit_id: spec.edit_id.clone(),
                source_utterance: spec.utterance_id.clone(),
                source_path: dump.rep_path(&spec.utterance_id).display().to_string(),
                feature: spec.feature.clone(),
                phone_class: spec.phone_class,
                lambda: spec.lambda,
                frame_start: spec.frame_start,
                frame_end: spec.frame_end,
                vector_norm: v.norm(),
                layer_index: r.layer_index,
                model_id: r.model_id.clone(),
            };
            write_atomic(
                &reps.join(format!("{}.edit.json", spec.edit_id)),
                &serde_json::to_vec_pretty(&log)?,
            )?;
            Ok(log)
        })
        .collect::<Result<_, VectorError>>()?;
    write_atomic(&out.join(EDITS_FILE), &to_jsonl(specs)?)?;
    write_atomic(&out.join("vector.json"), v.to_json()?.as_bytes())?;
    Ok(logs)
}
