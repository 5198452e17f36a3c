//! Run configuration: a flat TOML key/value file, overridden by flags.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::acoustics::AcousticConfig;
use crate::analogy::BootstrapConfig;
use crate::corpus::{parse_label_set, BankFilters};
use crate::features::FeatureTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Dump directories or multi-layer roots.
    pub dumps: Vec<PathBuf>,
    /// Feature table TSV; the bundled table when unset.
    pub feature_table: Option<PathBuf>,
    /// `all`, `N`, `A-B`, or a comma list of those.
    pub layers: String,
    pub n_samples: usize,
    pub n_replicates: usize,
    pub ci_level: f64,
    pub max_redraws: usize,
    /// `none` or `timit` (closure merge, diphthong exclusion, IPA relabel).
    pub filters: String,
    pub min_occurrences: usize,
    /// Extra labels dropped before relabeling.
    pub diphthongs: Vec<String>,
    pub merge_map: BTreeMap<String, String>,
    pub relabel: BTreeMap<String, String>,
    /// `all`, `cv`, `feat`, `dist`.
    pub strata: Vec<String>,
    pub weighting: String,
    pub sample_sizes: Vec<usize>,
    pub repeats: usize,
    pub histogram_bins: usize,
    pub n_edits: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub edits: Option<PathBuf>,
    pub orig_audio: Option<PathBuf>,
    pub edited_audio: Option<PathBuf>,
    pub svg: bool,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub out: PathBuf,
    pub acoustic: AcousticConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let b = BootstrapConfig::default();
        RunConfig {
            dumps: Vec::new(),
            feature_table: None,
            layers: "all".into(),
            n_samples: b.n_samples,
            n_replicates: b.n_replicates,
            ci_level: b.ci_level,
            max_redraws: b.max_redraws,
            filters: "none".into(),
            min_occurrences: BankFilters::default().min_occurrences,
            diphthongs: Vec::new(),
            merge_map: BTreeMap::new(),
            relabel: BTreeMap::new(),
            strata: vec!["all".into(), "cv".into(), "feat".into(), "dist".into()],
            weighting: "instance".into(),
            sample_sizes: vec![1, 4, 16, 64, 256],
            repeats: 1000,
            histogram_bins: 40,
            n_edits: 500,
            lambda_min: -5.0,
            lambda_max: 5.0,
            edits: None,
            orig_audio: None,
            edited_audio: None,
            svg: false,
            seed: 0,
            jobs: 0,
            out: PathBuf::from("out"),
            acoustic: AcousticConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(CliError::Usage(format!("ci_level must lie in (0, 1), got {}", self.ci_level)));
        }
        if self.n_samples < 1 {
            return Err(CliError::Usage("n_samples must be at least 1".into()));
        }
        if self.n_replicates < 2 {
            return Err(CliError::Usage("n_replicates must be at least 2".into()));
        }
        if !(self.lambda_min.is_finite() && self.lambda_max.is_finite() && self.lambda_min <= self.lambda_max) {
            return Err(CliError::Usage(format!(
                "invalid lambda range [{}, {}]",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.histogram_bins == 0 {
            return Err(CliError::Usage("histogram_bins must be positive".into()));
        }
        LayerSelection::parse(&self.layers)?;
        Ok(())
    }

    pub fn bootstrap(&self) -> BootstrapConfig {
        BootstrapConfig {
            n_samples: self.n_samples,
            n_replicates: self.n_replicates,
            ci_level: self.ci_level,
            seed: self.seed,
            max_redraws: self.max_redraws,
        }
    }

    pub fn feature_table(&self) -> Result<FeatureTable, CliError> {
        match &self.feature_table {
            None => Ok(FeatureTable::bundled()),
            Some(p) => FeatureTable::from_path(p)
                .map_err(|e| CliError::Usage(format!("cannot load feature table {}: {e}", p.display()))),
        }
    }

    /// Bank filters restricted to phones of `table`.
    pub fn bank_filters(&self, table: &FeatureTable) -> Result<BankFilters, CliError> {
        let mut f = match self.filters.as_str() {
            "none" => BankFilters::default(),
            "timit" => BankFilters::timit(),
            other => return Err(CliError::Usage(format!("unknown filter preset {other:?}"))),
        };
        f.min_occurrences = self.min_occurrences;
        f.diphthongs.extend(self.diphthongs.iter().cloned());
        f.merge_map.extend(self.merge_map.clone());
        f.relabel.extend(self.relabel.clone());
        f.vocabulary = Some(table.phones().map(str::to_string).collect());
        Ok(f)
    }
}

/// Which layers of a multi-layer root to process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerSelection {
    All,
    Set(BTreeSet<u32>),
}

impl LayerSelection {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s.is_empty() || s == "all" {
            return Ok(LayerSelection::All);
        }
        let bad = || CliError::Usage(format!("invalid layer selection {s:?}"));
        let mut set = BTreeSet::new();
        for item in s.split(',') {
            let item = item.trim();
            match item.split_once('-') {
                Some((a, b)) => {
                    let a: u32 = a.trim().parse().map_err(|_| bad())?;
                    let b: u32 = b.trim().parse().map_err(|_| bad())?;
                    if a > b {
                        return Err(bad());
                    }
                    set.extend(a..=b);
                }
                None => {
                    set.insert(item.parse().map_err(|_| bad())?);
                }
            }
        }
        Ok(LayerSelection::Set(set))
    }

    pub fn contains(&self, layer: u32) -> bool {
        match self {
            LayerSelection::All => true,
            LayerSelection::Set(s) => s.contains(&layer),
        }
    }
}

/// Read a vocabulary file: one label per line, `#` comments.
pub fn read_vocab_file(path: &Path) -> Result<BTreeSet<String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read vocabulary {}: {e}", path.display())))?;
    Ok(parse_label_set(&text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_selection_forms() {
        assert_eq!(LayerSelection::parse("all").unwrap(), LayerSelection::All);
        let s = LayerSelection::parse("1, 3-5,9").unwrap();
        assert!([1, 3, 4, 5, 9].iter().all(|&l| s.contains(l)));
        assert!(!s.contains(2));
        assert!(LayerSelection::parse("5-3").is_err());
        assert!(LayerSelection::parse("x").is_err());
    }

    #[test]
    fn config_round_trips_through_toml() {
        let c = RunConfig {
            seed: 7,
            n_samples: 50,
            ..Default::default()
        };
        let text = toml::to_string(&c).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("n_sample = 3").is_err());
        let c: RunConfig = toml::from_str("n_samples = 3\nlayers = \"24\"").unwrap();
        assert_eq!(c.n_samples, 3);
        assert_eq!(c.layers, "24");
    }

    #[test]
    fn invariants_checked() {
        let bad = [
            RunConfig { ci_level: 1.0, ..Default::default() },
            RunConfig { n_samples: 0, ..Default::default() },
            RunConfig { n_replicates: 1, ..Default::default() },
            RunConfig { lambda_min: 2.0, lambda_max: 1.0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
        RunConfig::default().validate().unwrap();
    }
}
