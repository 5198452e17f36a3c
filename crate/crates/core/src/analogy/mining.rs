//! Quadruplet mining.
//!
//! `(p1, p2, p3, p4)` is an analogy when `h1 - h2 = h3 - h4` over binarized
//! features, i.e. `h1 + h4 = h2 + h3`. The relation is invariant under eight
//! rearrangements (swap p1/p4, swap p2/p3, exchange the two pairs); each orbit
//! is reported once through its lexicographically smallest member.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::AnalogyError;
use crate::features::{binary_delta, BinaryFeatureVector, FeatureTable, PhoneClass};

/// Phone-class composition of a quadruplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CvStratum {
    Consonant,
    Vowel,
    Mixed,
}

impl CvStratum {
    pub fn as_str(self) -> &'static str {
        match self {
            CvStratum::Consonant => "consonant",
            CvStratum::Vowel => "vowel",
            CvStratum::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadruplet {
    pub phones: [String; 4],
    /// `extend(h_p1) - extend(h_p2)`.
    pub delta: Vec<i8>,
    pub cv: CvStratum,
    /// `max(dist(p2, p3), dist(p2, p4))`.
    pub max_distance: usize,
    /// Features with `h1[i] != h2[i]` or `h1[i] != h3[i]`.
    pub active_features: Vec<String>,
    /// At least one member is a syllabic consonant (classed as a vowel).
    #[serde(default)]
    pub has_syllabic_consonant: bool,
}

impl Quadruplet {
    /// Stable identifier, `p1|p2|p3|p4`.
    pub fn id(&self) -> String {
        self.phones.join("|")
    }

    /// Compute all tags for an (assumed valid) tuple.
    pub fn tagged(table: &FeatureTable, phones: [&str; 4]) -> Result<Self, AnalogyError> {
        let delta = table.feature_delta(phones[0], phones[1])?;
        let mut classes = BTreeSet::new();
        let mut syllabic = false;
        for p in phones {
            classes.insert(table.phone_class(p)?);
            syllabic |= table.is_syllabic_consonant(p)?;
        }
        let cv = match (classes.contains(&PhoneClass::Consonant), classes.contains(&PhoneClass::Vowel)) {
            (true, false) => CvStratum::Consonant,
            (false, true) => CvStratum::Vowel,
            _ => CvStratum::Mixed,
        };
        let max_distance = table
            .phonological_distance(phones[1], phones[2])?
            .max(table.phonological_distance(phones[1], phones[3])?);
        let (t1, t2, t3) = (
            table.ternary(phones[0])?,
            table.ternary(phones[1])?,
            table.ternary(phones[2])?,
        );
        let active_features = table
            .features()
            .iter()
            .enumerate()
            .filter(|&(i, _)| t1.get(i) != t2.get(i) || t1.get(i) != t3.get(i))
            .map(|(_, f)| f.clone())
            .collect();
        Ok(Quadruplet {
            phones: phones.map(str::to_string),
            delta,
            cv,
            max_distance,
            active_features,
            has_syllabic_consonant: syllabic,
        })
    }
}

/// The eight position rearrangements that preserve the analogy relation.
pub const ORBIT: [[usize; 4]; 8] = [
    [0, 1, 2, 3],
    [0, 2, 1, 3],
    [3, 1, 2, 0],
    [3, 2, 1, 0],
    [1, 0, 3, 2],
    [1, 3, 0, 2],
    [2, 0, 3, 1],
    [2, 3, 0, 1],
];

pub fn orbit<T: Copy>(t: [T; 4]) -> [[T; 4]; 8] {
    ORBIT.map(|perm| perm.map(|i| t[i]))
}

/// Lexicographically smallest orbit member.
pub fn canonicalize<T: Copy + Ord>(t: [T; 4]) -> [T; 4] {
    orbit(t).into_iter().min().expect("orbit is non-empty")
}

/// Either of the two analogies has a zero offset (`h1 = h2` or `h1 = h3`).
/// This covers `p1 = p2` and `{p1, p2} = {p3, p4}` and is orbit-invariant.
pub fn is_degenerate(h: [&BinaryFeatureVector; 4]) -> bool {
    h[0] == h[1] || h[0] == h[2]
}

/// Result of mining: canonical quadruplets plus the raw ordered-tuple count.
#[derive(Debug, Clone)]
pub struct MiningOutcome {
    pub quadruplets: Vec<Quadruplet>,
    /// Number of ordered, non-degenerate tuples satisfying the relation
    /// (every orbit member counted).
    pub raw_tuples: usize,
}

fn binarized<'a>(
    table: &FeatureTable,
    vocab: impl IntoIterator<Item = &'a str>,
) -> Result<BTreeMap<&'a str, BinaryFeatureVector>, AnalogyError> {
    vocab
        .into_iter()
        .map(|p| Ok((p, table.binary(p)?)))
        .collect()
}

/// Mine all canonical quadruplets over `vocab` by joining ordered phone pairs
/// on their feature delta.
pub fn mine_quadruplets<'a>(
    table: &FeatureTable,
    vocab: impl IntoIterator<Item = &'a str>,
) -> Result<MiningOutcome, AnalogyError> {
    let h = binarized(table, vocab)?;
    let phones: Vec<&str> = h.keys().copied().collect();
    let mut buckets: HashMap<Vec<i8>, Vec<(usize, usize)>> = HashMap::new();
    for (i, a) in phones.iter().enumerate() {
        for (j, b) in phones.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = binary_delta(&h[a], &h[b]);
            if d.iter().all(|&x| x == 0) {
                continue;
            }
            buckets.entry(d).or_default().push((i, j));
        }
    }
    let mut canon: BTreeSet<[usize; 4]> = BTreeSet::new();
    let mut raw = 0usize;
    for pairs in buckets.values() {
        for &(a, b) in pairs {
            for &(c, d) in pairs {
                let t = [a, b, c, d];
                if is_degenerate(t.map(|k| &h[phones[k]])) {
                    continue;
                }
                raw += 1;
                // phones are sorted, so index order is label order
                canon.insert(canonicalize(t));
            }
        }
    }
    let quadruplets = canon
        .into_iter()
        .map(|t| Quadruplet::tagged(table, t.map(|k| phones[k])))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MiningOutcome {
        quadruplets,
        raw_tuples: raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_is_closed_under_generators() {
        let t = [10, 20, 30, 40];
        let members: BTreeSet<[i32; 4]> = orbit(t).into_iter().collect();
        assert_eq!(members.len(), 8);
        for m in &members {
            for g in [[0, 2, 1, 3], [1, 0, 3, 2], [2, 3, 0, 1]] {
                let image = g.map(|i| m[i]);
                assert!(members.contains(&image));
            }
        }
    }

    #[test]
    fn bpdt_quadruplet() {
        let table = FeatureTable::bundled();
        let out = mine_quadruplets(&table, ["b", "p", "d", "t"]).unwrap();
        assert_eq!(out.quadruplets.len(), 1);
        let q = &out.quadruplets[0];
        assert_eq!(q.phones, ["b", "d", "p", "t"].map(String::from));
        assert_eq!(q.cv, CvStratum::Consonant);
        // all 8 orbit members are valid ordered tuples
        assert_eq!(out.raw_tuples, 8);
        // the (b, p, d, t) voicing analogy is in the orbit
        let members = orbit(["b", "d", "p", "t"]);
        assert!(members.contains(&["b", "p", "d", "t"]));
        assert!(q.active_features.contains(&"voi".to_string()));
    }

    #[test]
    fn single_phone_vocab_is_empty() {
        let table = FeatureTable::bundled();
        let out = mine_quadruplets(&table, ["b"]).unwrap();
        assert!(out.quadruplets.is_empty());
        assert_eq!(out.raw_tuples, 0);
    }

    #[test]
    fn unknown_phone_in_vocab() {
        let table = FeatureTable::bundled();
        assert!(matches!(
            mine_quadruplets(&table, ["b", "zz"]),
            Err(AnalogyError::Feature(_))
        ));
    }
}
