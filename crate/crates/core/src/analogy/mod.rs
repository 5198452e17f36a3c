//! Mining phonological analogies and testing them against a phone bank.

mod bootstrap;
mod mining;
mod pcs;
mod strata;

use thiserror::Error;

use crate::features::FeatureError;

pub use bootstrap::{
    averaged_similarity, bootstrap_cosine_analogy, bootstrap_cosine_diff, bootstrap_cosine_same,
    estimator_seed, evaluate_quadruplet, evaluate_quadruplets, judge_success, success_rate,
    AnalogyResult, BootstrapConfig, BootstrapEstimate, Estimator,
};
pub use mining::{
    canonicalize, is_degenerate, mine_quadruplets, orbit, CvStratum, MiningOutcome, Quadruplet, ORBIT,
};
pub use pcs::{delta_label, pcs, sattolo, PcsCategory, PcsReport};
pub use strata::{strata_of, stratify, StratifyMode, StratumSummary};

#[derive(Debug, Error)]
pub enum AnalogyError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("phone {0:?} has no instances in the bank")]
    MissingPhone(String),
    #[error("phone {0:?} needs at least two instances for same-phone sampling")]
    TooFewInstances(String),
    #[error("bank has no phone other than the anchor for different-phone sampling")]
    TooFewPhones,
    #[error("zero-norm vectors persisted past the redraw limit ({0})")]
    ZeroNorm(String),
    #[error("no results to summarize")]
    Empty,
    #[error("unknown stratification mode {0:?}")]
    UnknownMode(String),
    #[error("no pair category has both correct and mismatched scores")]
    NoPcsCategories,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
