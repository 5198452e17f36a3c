//! Bootstrap estimates of analogy, same-phone and different-phone cosine similarity.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnalogyError, Quadruplet};
use crate::corpus::{PhoneBank, PhoneInstances};
use crate::rng;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub n_samples: usize,
    pub n_replicates: usize,
    pub ci_level: f64,
    pub seed: u64,
    /// Redraws allowed per sample when a vector has zero norm.
    pub max_redraws: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            n_samples: 1000,
            n_replicates: 10,
            ci_level: 0.99,
            seed: 0,
            max_redraws: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapEstimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: usize,
    pub n_replicates: usize,
    pub seed: u64,
}

impl BootstrapEstimate {
    /// Mean of the replicate means with a normal-approximation interval
    /// `mean ± z · sd(replicate means)`.
    pub fn from_replicates(replicate_means: &[f64], cfg: &BootstrapConfig, seed: u64) -> Self {
        let mean = stats::mean(replicate_means);
        let half = if replicate_means.len() > 1 {
            stats::z_critical(cfg.ci_level) * stats::sample_sd(replicate_means)
        } else {
            0.0
        };
        BootstrapEstimate {
            mean,
            ci_low: mean - half,
            ci_high: mean + half,
            n_samples: cfg.n_samples,
            n_replicates: replicate_means.len(),
            seed,
        }
    }
}

/// Which of the three similarity distributions is being sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Analogy = 1,
    SamePhone = 2,
    DiffPhone = 3,
}

fn cosine32(a: &[f32], b: &[f64]) -> Option<f64> {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let x = x as f64;
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        None
    } else {
        Some(dot / (na.sqrt() * nb.sqrt()))
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, inst: &'a PhoneInstances) -> &'a [f32] {
    inst.get(rng.gen_range(0..inst.len()))
}

fn instances<'a>(bank: &'a PhoneBank, phone: &str) -> Result<&'a PhoneInstances, AnalogyError> {
    bank.get(phone)
        .filter(|i| !i.is_empty())
        .ok_or_else(|| AnalogyError::MissingPhone(phone.to_string()))
}

/// Seed for one estimator of one quadruplet, before the replicate index.
pub fn estimator_seed(base: u64, q: &Quadruplet, kind: Estimator) -> u64 {
    rng::derive_seed(base, &[rng::stable_hash(q.id().as_bytes()), kind as u64])
}

fn run_replicates<F>(
    cfg: &BootstrapConfig,
    seed: u64,
    context: &str,
    mut draw: F,
) -> Result<BootstrapEstimate, AnalogyError>
where
    F: FnMut(&mut ChaCha8Rng) -> Option<f64>,
{
    if cfg.n_samples == 0 || cfg.n_replicates == 0 {
        return Err(AnalogyError::InvalidConfig(
            "n_samples and n_replicates must be positive".into(),
        ));
    }
    let mut means = Vec::with_capacity(cfg.n_replicates);
    for r in 0..cfg.n_replicates {
        let mut rng = rng::stream(seed, &[r as u64]);
        let mut acc = 0.0;
        for _ in 0..cfg.n_samples {
            let mut attempts = 0;
            let value = loop {
                if let Some(v) = draw(&mut rng) {
                    break v;
                }
                attempts += 1;
                if attempts > cfg.max_redraws {
                    return Err(AnalogyError::ZeroNorm(context.to_string()));
                }
            };
            acc += value;
        }
        means.push(acc / cfg.n_samples as f64);
    }
    Ok(BootstrapEstimate::from_replicates(&means, cfg, seed))
}

/// `cos(r1, r2 + r3 - r4)` with one instance drawn per phone.
pub fn bootstrap_cosine_analogy(
    bank: &PhoneBank,
    q: &Quadruplet,
    cfg: &BootstrapConfig,
) -> Result<BootstrapEstimate, AnalogyError> {
    let sets = [
        instances(bank, &q.phones[0])?,
        instances(bank, &q.phones[1])?,
        instances(bank, &q.phones[2])?,
        instances(bank, &q.phones[3])?,
    ];
    let mut combo = vec![0.0f64; bank.dim()];
    let seed = estimator_seed(cfg.seed, q, Estimator::Analogy);
    run_replicates(cfg, seed, &format!("analogy {}", q.id()), |rng| {
        let r1 = pick(rng, sets[0]);
        let r2 = pick(rng, sets[1]);
        let r3 = pick(rng, sets[2]);
        let r4 = pick(rng, sets[3]);
        for (k, c) in combo.iter_mut().enumerate() {
            *c = r2[k] as f64 + r3[k] as f64 - r4[k] as f64;
        }
        cosine32(r1, &combo)
    })
}

/// `cos(r1, r1')` for two distinct instances of `p1`.
pub fn bootstrap_cosine_same(
    bank: &PhoneBank,
    q: &Quadruplet,
    cfg: &BootstrapConfig,
) -> Result<BootstrapEstimate, AnalogyError> {
    let set = instances(bank, &q.phones[0])?;
    if set.len() < 2 {
        return Err(AnalogyError::TooFewInstances(q.phones[0].clone()));
    }
    let mut other = vec![0.0f64; bank.dim()];
    let seed = estimator_seed(cfg.seed, q, Estimator::SamePhone);
    run_replicates(cfg, seed, &format!("same-phone {}", q.phones[0]), |rng| {
        let i = rng.gen_range(0..set.len());
        let mut j = rng.gen_range(0..set.len() - 1);
        if j >= i {
            j += 1;
        }
        for (o, &v) in other.iter_mut().zip(set.get(j)) {
            *o = v as f64;
        }
        cosine32(set.get(i), &other)
    })
}

/// `cos(r1, r_q)` for an instance of a uniformly chosen other phone type.
pub fn bootstrap_cosine_diff(
    bank: &PhoneBank,
    q: &Quadruplet,
    cfg: &BootstrapConfig,
) -> Result<BootstrapEstimate, AnalogyError> {
    let set = instances(bank, &q.phones[0])?;
    let others: Vec<&PhoneInstances> = bank
        .phones()
        .filter(|(p, inst)| *p != q.phones[0] && !inst.is_empty())
        .map(|(_, inst)| inst)
        .collect();
    if others.is_empty() {
        return Err(AnalogyError::TooFewPhones);
    }
    let mut other = vec![0.0f64; bank.dim()];
    let seed = estimator_seed(cfg.seed, q, Estimator::DiffPhone);
    run_replicates(cfg, seed, &format!("diff-phone {}", q.phones[0]), |rng| {
        let r1 = pick(rng, set);
        let o = others[rng.gen_range(0..others.len())];
        for (x, &v) in other.iter_mut().zip(pick(rng, o)) {
            *x = v as f64;
        }
        cosine32(r1, &other)
    })
}

/// An analogy succeeds when its interval lies strictly between the
/// different-phone and same-phone intervals.
pub fn judge_success(
    diff: &BootstrapEstimate,
    analogy: &BootstrapEstimate,
    same: &BootstrapEstimate,
) -> bool {
    diff.ci_high < analogy.ci_low && analogy.ci_high < same.ci_low
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalogyResult {
    pub quadruplet: Quadruplet,
    pub layer: u32,
    pub analogy: BootstrapEstimate,
    pub same: BootstrapEstimate,
    pub diff: BootstrapEstimate,
    pub success: bool,
}

pub fn evaluate_quadruplet(
    bank: &PhoneBank,
    q: &Quadruplet,
    cfg: &BootstrapConfig,
) -> Result<AnalogyResult, AnalogyError> {
    let analogy = bootstrap_cosine_analogy(bank, q, cfg)?;
    let same = bootstrap_cosine_same(bank, q, cfg)?;
    let diff = bootstrap_cosine_diff(bank, q, cfg)?;
    Ok(AnalogyResult {
        quadruplet: q.clone(),
        layer: bank.layer_index,
        success: judge_success(&diff, &analogy, &same),
        analogy,
        same,
        diff,
    })
}

/// Evaluate every quadruplet in parallel. Output order follows the input and
/// does not depend on the thread count.
pub fn evaluate_quadruplets(
    bank: &PhoneBank,
    quads: &[Quadruplet],
    cfg: &BootstrapConfig,
) -> Result<Vec<AnalogyResult>, AnalogyError> {
    quads
        .par_iter()
        .map(|q| evaluate_quadruplet(bank, q, cfg))
        .collect()
}

pub fn success_rate(results: &[AnalogyResult]) -> Result<f64, AnalogyError> {
    if results.is_empty() {
        return Err(AnalogyError::Empty);
    }
    Ok(results.iter().filter(|r| r.success).count() as f64 / results.len() as f64)
}

/// Mean of the per-quadruplet analogy means, with interval
/// `mean ± z · sd / sqrt(n)` across quadruplets.
pub fn averaged_similarity(
    results: &[AnalogyResult],
    ci_level: f64,
) -> Result<BootstrapEstimate, AnalogyError> {
    if results.is_empty() {
        return Err(AnalogyError::Empty);
    }
    let means: Vec<f64> = results.iter().map(|r| r.analogy.mean).collect();
    let n = means.len();
    let mean = stats::mean(&means);
    let half = if n > 1 {
        stats::z_critical(ci_level) * stats::sample_sd(&means) / (n as f64).sqrt()
    } else {
        0.0
    };
    Ok(BootstrapEstimate {
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
        n_samples: n,
        n_replicates: 1,
        seed: 0,
    })
}
