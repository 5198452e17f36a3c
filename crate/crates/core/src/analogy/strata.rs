use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{averaged_similarity, success_rate, AnalogyError, AnalogyResult, BootstrapEstimate, CvStratum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StratifyMode {
    /// Consonant-only and vowel-only quadruplets; mixed ones are dropped.
    CvClass,
    /// One stratum per feature active in the quadruplet.
    Feature,
    /// By `max(dist(p2, p3), dist(p2, p4))`.
    DistanceBin,
}

impl StratifyMode {
    pub const ALL: [StratifyMode; 3] = [StratifyMode::CvClass, StratifyMode::Feature, StratifyMode::DistanceBin];

    /// Prefix used for stratum labels in reports.
    pub fn prefix(self) -> &'static str {
        match self {
            StratifyMode::CvClass => "cv",
            StratifyMode::Feature => "feat",
            StratifyMode::DistanceBin => "dist",
        }
    }
}

impl fmt::Display for StratifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StratifyMode::CvClass => "cv-class",
            StratifyMode::Feature => "feature",
            StratifyMode::DistanceBin => "distance-bin",
        })
    }
}

impl FromStr for StratifyMode {
    type Err = AnalogyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cv-class" | "cv" => Ok(StratifyMode::CvClass),
            "feature" | "feat" => Ok(StratifyMode::Feature),
            "distance-bin" | "dist" => Ok(StratifyMode::DistanceBin),
            other => Err(AnalogyError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumSummary {
    pub n_quads: usize,
    pub success_rate: f64,
    pub averaged_similarity: BootstrapEstimate,
}

impl StratumSummary {
    pub fn of(results: &[AnalogyResult], ci_level: f64) -> Result<Self, AnalogyError> {
        Ok(StratumSummary {
            n_quads: results.len(),
            success_rate: success_rate(results)?,
            averaged_similarity: averaged_similarity(results, ci_level)?,
        })
    }
}

/// Stratum labels a result belongs to under `mode`. A quadruplet can fall
/// into several feature strata, or none (mixed class under `CvClass`).
pub fn strata_of(result: &AnalogyResult, mode: StratifyMode) -> Vec<String> {
    let q = &result.quadruplet;
    match mode {
        StratifyMode::CvClass => match q.cv {
            CvStratum::Mixed => Vec::new(),
            cv => vec![cv.as_str().to_string()],
        },
        StratifyMode::Feature => q.active_features.clone(),
        StratifyMode::DistanceBin => vec![q.max_distance.to_string()],
    }
}

/// Group results by stratum and summarize each non-empty group.
pub fn stratify(
    results: &[AnalogyResult],
    mode: StratifyMode,
    ci_level: f64,
) -> Result<BTreeMap<String, StratumSummary>, AnalogyError> {
    let mut groups: BTreeMap<String, Vec<AnalogyResult>> = BTreeMap::new();
    for r in results {
        for s in strata_of(r, mode) {
            groups.entry(s).or_default().push(r.clone());
        }
    }
    groups
        .into_iter()
        .map(|(k, rs)| Ok((k, StratumSummary::of(&rs, ci_level)?)))
        .collect()
}
