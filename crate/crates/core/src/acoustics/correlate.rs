//! Rank correlation of measurement changes with edit strength, and the λ=0
//! resynthesis stability summary.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cog, formants, hnr, read_wav, AcousticConfig, AcousticError, Measurement, MeasurementKind, Waveform};
use crate::features::PhoneClass;
use crate::io::write_atomic;
use crate::stats;
use crate::vectors::EditSpec;

/// Minimum number of defined (λ, Δ) pairs for a correlation.
pub const MIN_DEFINED_PAIRS: usize = 30;

/// Spearman's ρ: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, AcousticError> {
    if xs.len() != ys.len() {
        return Err(AcousticError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(AcousticError::TooFewPoints(xs.len()));
    }
    stats::pearson(&stats::average_ranks(xs), &stats::average_ranks(ys)).ok_or(AcousticError::ConstantSeries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Plus)
        } else if x < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Expected sign of the correlation between λ and a measurement change, per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct SignTable {
    rows: Vec<(String, MeasurementKind, Sign)>,
}

impl Default for SignTable {
    fn default() -> Self {
        use MeasurementKind::*;
        let rows = [
            ("hi", F1, Sign::Minus),
            ("lo", F1, Sign::Plus),
            ("back", F2, Sign::Minus),
            ("round", F2, Sign::Minus),
            ("nas", F1BW, Sign::Minus),
            ("son", HNR, Sign::Plus),
            ("strid", COG, Sign::Plus),
            ("voi", COG, Sign::Minus),
        ];
        SignTable {
            rows: rows.iter().map(|&(f, k, s)| (f.to_string(), k, s)).collect(),
        }
    }
}

impl SignTable {
    pub fn rows(&self) -> &[(String, MeasurementKind, Sign)] {
        &self.rows
    }

    pub fn get(&self, feature: &str) -> Option<(MeasurementKind, Sign)> {
        self.rows.iter().find(|r| r.0 == feature).map(|r| (r.1, r.2))
    }
}

/// One edit's measurement before and after editing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPair {
    pub lambda: f64,
    pub before: Option<f64>,
    pub after: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub feature: String,
    pub class: PhoneClass,
    pub measurement: MeasurementKind,
    pub n: usize,
    pub rho: Option<f64>,
    pub sign_expected: Sign,
    pub sign_observed: Option<Sign>,
    pub sign_match: bool,
    pub n_dropped: usize,
    /// `ok`, or `no effect` when every Δ is identical.
    pub verdict: String,
}

/// Correlate λ with Δ = after − before over pairs where both are defined.
pub fn correlate_feature(
    feature: &str,
    class: PhoneClass,
    kind: MeasurementKind,
    expected: Sign,
    pairs: &[MeasurementPair],
) -> Result<CorrelationRow, AcousticError> {
    let mut lambdas = Vec::new();
    let mut deltas = Vec::new();
    for p in pairs {
        if let (Some(b), Some(a)) = (p.before, p.after) {
            lambdas.push(p.lambda);
            deltas.push(a - b);
        }
    }
    let n = lambdas.len();
    if n < MIN_DEFINED_PAIRS {
        return Err(AcousticError::TooFewDefined {
            found: n,
            required: MIN_DEFINED_PAIRS,
        });
    }
    let constant_delta = deltas.iter().all(|&d| d == deltas[0]);
    let rho = if constant_delta {
        None
    } else {
        Some(spearman(&lambdas, &deltas)?)
    };
    let sign_observed = rho.and_then(Sign::of);
    Ok(CorrelationRow {
        feature: feature.to_string(),
        class,
        measurement: kind,
        n,
        rho,
        sign_expected: expected,
        sign_observed,
        sign_match: sign_observed == Some(expected),
        n_dropped: pairs.len() - n,
        verdict: if constant_delta { "no effect" } else { "ok" }.to_string(),
    })
}

/// Measure one kind on a segment; analysis failures (too short, silent) are undefined.
pub fn measure_segment(
    w: &Waveform,
    t_start: f64,
    t_end: f64,
    kind: MeasurementKind,
    cfg: &AcousticConfig,
) -> Measurement {
    let result = match kind {
        MeasurementKind::F1 => formants(w, t_start, t_end, cfg).map(|f| f.f1),
        MeasurementKind::F2 => formants(w, t_start, t_end, cfg).map(|f| f.f2),
        MeasurementKind::F1BW => formants(w, t_start, t_end, cfg).map(|f| f.b1),
        MeasurementKind::HNR => hnr(w, t_start, t_end, cfg),
        MeasurementKind::COG => cog(w, t_start, t_end, cfg),
    };
    result.unwrap_or(Measurement::undefined(kind))
}

/// Paths of the original and edited audio for one edit.
#[derive(Debug, Clone, PartialEq)]
pub struct EditPairAudio {
    pub original: PathBuf,
    pub edited: PathBuf,
}

impl EditPairAudio {
    /// `<orig_dir>/<utterance_id>.wav` and `<edited_dir>/<edit_id>.wav`.
    pub fn locate(spec: &EditSpec, orig_dir: &Path, edited_dir: &Path) -> Result<Self, AcousticError> {
        let original = orig_dir.join(format!("{}.wav", spec.utterance_id));
        let edited = edited_dir.join(format!("{}.wav", spec.edit_id));
        for p in [&original, &edited] {
            if !p.is_file() {
                return Err(AcousticError::UnpairedAudio(format!("{} ({})", spec.edit_id, p.display())));
            }
        }
        Ok(EditPairAudio { original, edited })
    }
}

fn measure_pairs(
    edits: &[&EditSpec],
    orig_dir: &Path,
    edited_dir: &Path,
    kind: MeasurementKind,
    cfg: &AcousticConfig,
) -> Result<Vec<MeasurementPair>, AcousticError> {
    edits
        .par_iter()
        .map(|spec| {
            let paths = EditPairAudio::locate(spec, orig_dir, edited_dir)?;
            let orig = read_wav(&paths.original)?;
            let edited = read_wav(&paths.edited)?;
            Ok(MeasurementPair {
                lambda: spec.lambda,
                before: measure_segment(&orig, spec.t_start, spec.t_end, kind, cfg).value,
                after: measure_segment(&edited, spec.t_start, spec.t_end, kind, cfg).value,
            })
        })
        .collect()
}

/// Measurements for one (feature, class) group of edits, in edit order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredGroup {
    pub feature: String,
    pub class: PhoneClass,
    pub kind: MeasurementKind,
    pub expected: Sign,
    pub edit_ids: Vec<String>,
    pub pairs: Vec<MeasurementPair>,
}

impl MeasuredGroup {
    pub fn correlate(&self) -> Result<CorrelationRow, AcousticError> {
        correlate_feature(&self.feature, self.class, self.kind, self.expected, &self.pairs)
    }
}

/// Measure every edit whose feature has an expected sign, grouped by
/// (feature, class).
pub fn measure_edits(
    edits: &[EditSpec],
    orig_dir: &Path,
    edited_dir: &Path,
    table: &SignTable,
    cfg: &AcousticConfig,
) -> Result<Vec<MeasuredGroup>, AcousticError> {
    let mut groups: BTreeMap<(String, PhoneClass), Vec<&EditSpec>> = BTreeMap::new();
    for e in edits {
        groups.entry((e.feature.clone(), e.phone_class)).or_default().push(e);
    }
    let mut out = Vec::new();
    for ((feature, class), group) in groups {
        let Some((kind, expected)) = table.get(&feature) else {
            continue;
        };
        let pairs = measure_pairs(&group, orig_dir, edited_dir, kind, cfg)?;
        out.push(MeasuredGroup {
            feature,
            class,
            kind,
            expected,
            edit_ids: group.iter().map(|e| e.edit_id.clone()).collect(),
            pairs,
        });
    }
    Ok(out)
}

/// One report row per (feature, class) group of `edits` whose feature has
/// an expected sign.
pub fn correlate_edits(
    edits: &[EditSpec],
    orig_dir: &Path,
    edited_dir: &Path,
    table: &SignTable,
    cfg: &AcousticConfig,
) -> Result<Vec<CorrelationRow>, AcousticError> {
    measure_edits(edits, orig_dir, edited_dir, table, cfg)?
        .iter()
        .map(MeasuredGroup::correlate)
        .collect()
}

pub fn write_correlation_csv(path: &Path, rows: &[CorrelationRow]) -> Result<(), AcousticError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "feature",
        "class",
        "measurement",
        "n",
        "rho",
        "sign_expected",
        "sign_observed",
        "sign_match",
        "n_dropped",
        "verdict",
    ])?;
    for r in rows {
        w.write_record([
            r.feature.clone(),
            r.class.to_string(),
            r.measurement.to_string(),
            r.n.to_string(),
            r.rho.map(|v| format!("{v:.6}")).unwrap_or_default(),
            r.sign_expected.to_string(),
            r.sign_observed.map(|s| s.to_string()).unwrap_or_default(),
            r.sign_match.to_string(),
            r.n_dropped.to_string(),
            r.verdict.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(write_atomic(path, &bytes)?)
}

/// Distribution of Δ for one measurement kind under λ=0 resynthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub kind: MeasurementKind,
    pub n: usize,
    pub n_dropped: usize,
    pub median: Option<f64>,
    pub iqr: Option<f64>,
    pub threshold: f64,
    pub frac_below: Option<f64>,
    #[serde(skip)]
    pub deltas: Vec<f64>,
}

/// Default |Δ| thresholds: 50 Hz for F1 and its bandwidth, 100 Hz for F2,
/// 200 Hz for COG, 2 dB for HNR.
pub fn default_threshold(kind: MeasurementKind) -> f64 {
    match kind {
        MeasurementKind::F1 | MeasurementKind::F1BW => 50.0,
        MeasurementKind::F2 => 100.0,
        MeasurementKind::COG => 200.0,
        MeasurementKind::HNR => 2.0,
    }
}

/// Summarize Δ = resynth − original for every measurement kind.
/// Each item is `(original, resynthesized, t_start, t_end)`.
pub fn stability_check(
    pairs: &[(Waveform, Waveform, f64, f64)],
    cfg: &AcousticConfig,
) -> Vec<StabilitySummary> {
    MeasurementKind::ALL
        .iter()
        .map(|&kind| {
            let measured: Vec<Option<f64>> = pairs
                .par_iter()
                .map(|(o, r, s, e)| {
                    let a = measure_segment(o, *s, *e, kind, cfg).value?;
                    let b = measure_segment(r, *s, *e, kind, cfg).value?;
                    Some(b - a)
                })
                .collect();
            let deltas: Vec<f64> = measured.iter().flatten().copied().collect();
            let threshold = default_threshold(kind);
            let frac_below = (!deltas.is_empty())
                .then(|| deltas.iter().filter(|d| d.abs() < threshold).count() as f64 / deltas.len() as f64);
            StabilitySummary {
                kind,
                n: deltas.len(),
                n_dropped: measured.len() - deltas.len(),
                median: stats::median(&deltas),
                iqr: stats::quantile(&deltas, 0.75).zip(stats::quantile(&deltas, 0.25)).map(|(a, b)| a - b),
                threshold,
                frac_below,
                deltas,
            }
        })
        .collect()
}

/// Load `<orig_dir>/<utterance_id>.wav` and `<resynth_dir>/<edit_id>.wav`
/// for every λ=0 edit and run [`stability_check`].
pub fn stability_from_dirs(
    edits: &[EditSpec],
    orig_dir: &Path,
    resynth_dir: &Path,
    cfg: &AcousticConfig,
) -> Result<Vec<StabilitySummary>, AcousticError> {
    let pairs = edits
        .par_iter()
        .filter(|e| e.lambda == 0.0)
        .map(|e| {
            let p = EditPairAudio::locate(e, orig_dir, resynth_dir)?;
            Ok((read_wav(&p.original)?, read_wav(&p.edited)?, e.t_start, e.t_end))
        })
        .collect::<Result<Vec<_>, AcousticError>>()?;
    Ok(stability_check(&pairs, cfg))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn write_stability_csv(path: &Path, rows: &[StabilitySummary]) -> Result<(), AcousticError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["measurement", "n", "n_dropped", "median", "iqr", "threshold", "frac_below"])?;
    for r in rows {
        w.write_record([
            r.kind.to_string(),
            r.n.to_string(),
            r.n_dropped.to_string(),
            opt(r.median),
            opt(r.iqr),
            r.threshold.to_string(),
            opt(r.frac_below),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(write_atomic(path, &bytes)?)
}

/// Histogram of Δ per measurement over `bins` equal-width bins spanning
/// `[-max|Δ|, max|Δ|]`; density integrates to 1.
pub fn write_stability_density_csv(path: &Path, rows: &[StabilitySummary], bins: usize) -> Result<(), AcousticError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["measurement", "bin_low", "bin_high", "count", "density"])?;
    for r in rows {
        if r.deltas.is_empty() {
            continue;
        }
        let half = r.deltas.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1e-12);
        let width = 2.0 * half / bins as f64;
        let mut counts = vec![0usize; bins];
        for d in &r.deltas {
            let k = (((d + half) / width).floor() as usize).min(bins - 1);
            counts[k] += 1;
        }
        for (k, c) in counts.iter().enumerate() {
            let lo = -half + k as f64 * width;
            w.write_record([
                r.kind.to_string(),
                format!("{lo:.6}"),
                format!("{:.6}", lo + width),
                c.to_string(),
                format!("{:.6}", *c as f64 / (r.deltas.len() as f64 * width)),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(write_atomic(path, &bytes)?)
}
