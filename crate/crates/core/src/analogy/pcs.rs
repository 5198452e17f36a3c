//! Pair-consistency score.
//!
//! Ordered phone pairs with the same nonzero feature delta form a category.
//! Each correct offset `m_a - m_b` (phone means) is scored by its cosine to
//! the mean of the category's other correct offsets; mismatched offsets are
//! built by cyclically shuffling the second phones and scored the same way.
//! The reference mean always excludes offsets that share a phone with the
//! scored one, so under a null corpus both score distributions coincide. The
//! AUC separating correct from mismatched scores is reported per category and
//! pooled over all categories.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AnalogyError;
use crate::corpus::PhoneBank;
use crate::features::{FeatureTable, PhoneClass};
use crate::rng;
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcsCategory {
    /// e.g. `voi:+-` (first phone `+voi`, second `-voi`).
    pub label: String,
    pub pairs: Vec<(String, String)>,
    pub n_correct: usize,
    pub n_mismatched: usize,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcsReport {
    pub categories: Vec<PcsCategory>,
    /// Categories without both score kinds, with the reason.
    pub skipped: Vec<(String, String)>,
    pub overall_auc: f64,
}

/// Human-readable label for a binary feature delta.
pub fn delta_label(features: &[String], delta: &[i8]) -> String {
    let mut parts = Vec::new();
    for (i, f) in features.iter().enumerate() {
        let code = match (delta[2 * i], delta[2 * i + 1]) {
            (0, 0) => continue,
            (1, 0) => "+0",
            (1, -1) => "+-",
            (-1, 0) => "0+",
            (0, -1) => "0-",
            (-1, 1) => "-+",
            (0, 1) => "-0",
            _ => "??",
        };
        parts.push(format!("{f}:{code}"));
    }
    parts.join(",")
}

/// Uniformly random cyclic permutation (no fixed points for n >= 2).
pub fn sattolo<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..i);
        p.swap(i, j);
    }
    p
}

fn offset(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn mean_excluding(offsets: &[Vec<f64>], exclude: &[usize]) -> Option<Vec<f64>> {
    let dim = offsets.first()?.len();
    let mut acc = vec![0.0; dim];
    let mut n = 0usize;
    for (k, o) in offsets.iter().enumerate() {
        if exclude.contains(&k) {
            continue;
        }
        acc.iter_mut().zip(o).for_each(|(a, x)| *a += x);
        n += 1;
    }
    if n == 0 {
        return None;
    }
    acc.iter_mut().for_each(|a| *a /= n as f64);
    Some(acc)
}

/// Compute the pair-consistency score over phones present in both `bank` and
/// `table`, optionally restricted to one phone class.
pub fn pcs(
    bank: &PhoneBank,
    table: &FeatureTable,
    class: Option<PhoneClass>,
    seed: u64,
) -> Result<PcsReport, AnalogyError> {
    let mut means: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut binary = BTreeMap::new();
    for (p, inst) in bank.phones() {
        if inst.is_empty() || !table.contains(p) {
            continue;
        }
        if let Some(c) = class {
            if table.phone_class(p)? != c {
                continue;
            }
        }
        means.insert(p, inst.mean());
        binary.insert(p, table.binary(p)?);
    }
    let phones: Vec<&str> = means.keys().copied().collect();
    let mut groups: BTreeMap<Vec<i8>, Vec<(&str, &str)>> = BTreeMap::new();
    for &a in &phones {
        for &b in &phones {
            if a == b {
                continue;
            }
            let d = crate::features::binary_delta(&binary[a], &binary[b]);
            if d.iter().any(|&x| x != 0) {
                groups.entry(d).or_default().push((a, b));
            }
        }
    }

    let mut categories = Vec::new();
    let mut skipped = Vec::new();
    let mut all_pos = Vec::new();
    let mut all_neg = Vec::new();
    for (delta, pairs) in groups {
        let label = delta_label(table.features(), &delta);
        if pairs.len() < 2 {
            skipped.push((label, "fewer than 2 pairs".to_string()));
            continue;
        }
        let correct: Vec<Vec<f64>> = pairs.iter().map(|(a, b)| offset(&means[a], &means[b])).collect();
        let mut rng = rng::stream_for(seed, &label, 0);
        let perm = sattolo(pairs.len(), &mut rng);
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for k in 0..pairs.len() {
            if let Some(reference) = mean_excluding(&correct, &[k]) {
                if let Some(c) = stats::cosine(&correct[k], &reference) {
                    pos.push(c);
                }
            }
            let j = perm[k];
            let mismatched = offset(&means[pairs[k].0], &means[pairs[j].1]);
            if let Some(reference) = mean_excluding(&correct, &[k, j]) {
                if let Some(c) = stats::cosine(&mismatched, &reference) {
                    neg.push(c);
                }
            }
        }
        match stats::auc_mann_whitney(&pos, &neg) {
            Some(auc) => {
                all_pos.extend_from_slice(&pos);
                all_neg.extend_from_slice(&neg);
                categories.push(PcsCategory {
                    label,
                    pairs: pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                    n_correct: pos.len(),
                    n_mismatched: neg.len(),
                    auc,
                });
            }
            None => skipped.push((label, "no scorable mismatched or correct offsets".to_string())),
        }
    }
    let overall_auc = stats::auc_mann_whitney(&all_pos, &all_neg).ok_or(AnalogyError::NoPcsCategories)?;
    Ok(PcsReport {
        categories,
        skipped,
        overall_auc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sattolo_is_a_derangement() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for n in 2..40 {
            let p = sattolo(n, &mut rng);
            let mut sorted = p.clone();
            sorted.sort();
            assert_eq!(sorted, (0..n).collect::<Vec<_>>());
            assert!(p.iter().enumerate().all(|(i, &j)| i != j));
        }
    }

    #[test]
    fn label_codes() {
        let f = vec!["voi".to_string(), "lab".to_string()];
        assert_eq!(delta_label(&f, &[1, -1, 0, 0]), "voi:+-");
        assert_eq!(delta_label(&f, &[0, 0, 0, 1]), "lab:-0");
    }

    fn exact_bank(table: &FeatureTable, phones: &[&str]) -> PhoneBank {
        let mut items = Vec::new();
        for p in phones {
            let v = table.binary(p).unwrap().as_f32();
            items.push((*p, v.clone()));
            items.push((*p, v));
        }
        PhoneBank::from_vectors(2 * table.n_features(), items)
    }

    #[test]
    fn exact_bank_scores_one() {
        let table = FeatureTable::bundled();
        let phones = ["p", "b", "t", "d", "k", "ɡ", "f", "v", "s", "z"];
        let r = pcs(&exact_bank(&table, &phones), &table, None, 7).unwrap();
        assert!(!r.categories.is_empty());
        assert!((r.overall_auc - 1.0).abs() < 1e-12, "{}", r.overall_auc);
    }

    #[test]
    fn no_categories_is_error() {
        let table = FeatureTable::bundled();
        let bank = exact_bank(&table, &["p", "b"]);
        assert!(matches!(pcs(&bank, &table, None, 0), Err(AnalogyError::NoPcsCategories)));
    }
}
