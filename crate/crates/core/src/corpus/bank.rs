use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{merge_closures, slice_and_pool, CorpusError, RepDump, SegmentRecord};

/// Where a pooled vector came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SegmentSource {
    pub utterance_id: String,
    pub t_start: f64,
    pub t_end: f64,
    pub speaker_id: String,
}

/// All pooled vectors of one phone, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct PhoneInstances {
    dim: usize,
    data: Vec<f32>,
    sources: Vec<SegmentSource>,
}

impl PhoneInstances {
    pub fn new(dim: usize) -> Self {
        PhoneInstances {
            dim,
            data: Vec::new(),
            sources: Vec::new(),
        }
    }

    pub fn push(&mut self, v: &[f32], source: SegmentSource) {
        assert_eq!(v.len(), self.dim, "instance dimension mismatch");
        self.data.extend_from_slice(v);
        self.sources.push(source);
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn source(&self, i: usize) -> &SegmentSource {
        &self.sources[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.dim)
    }

    /// Mean over instances, accumulated in f64.
    pub fn mean(&self) -> Vec<f64> {
        let mut acc = vec![0.0f64; self.dim];
        for v in self.iter() {
            for (a, &x) in acc.iter_mut().zip(v) {
                *a += x as f64;
            }
        }
        let n = self.len().max(1) as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }
}

/// Corpus filtering rules applied while building a bank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankFilters {
    pub min_occurrences: usize,
    /// Labels dropped outright (matched before relabeling).
    pub diphthongs: BTreeSet<String>,
    /// Closure label -> release label (matched before relabeling).
    pub merge_map: BTreeMap<String, String>,
    /// Corpus label -> feature-table label.
    pub relabel: BTreeMap<String, String>,
    /// When set, phones outside this set are dropped (after relabeling).
    pub vocabulary: Option<BTreeSet<String>>,
}

impl Default for BankFilters {
    fn default() -> Self {
        BankFilters {
            min_occurrences: 50,
            diphthongs: BTreeSet::new(),
            merge_map: BTreeMap::new(),
            relabel: BTreeMap::new(),
            vocabulary: None,
        }
    }
}

pub const TIMIT_CLOSURE_MERGE: &str = include_str!("../../data/timit_closure_merge.tsv");
pub const TIMIT_DIPHTHONGS: &str = include_str!("../../data/timit_diphthongs.txt");
pub const TIMIT_TO_IPA: &str = include_str!("../../data/timit_to_ipa.tsv");

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
}

/// Parse a two-column TSV map (comments with `#`).
pub fn parse_label_map(text: &str) -> Result<BTreeMap<String, String>, CorpusError> {
    data_lines(text)
        .enumerate()
        .map(|(i, l)| {
            let mut cells = l.split('\t');
            match (cells.next(), cells.next()) {
                (Some(a), Some(b)) if !a.is_empty() && !b.is_empty() => {
                    Ok((a.to_string(), b.trim().to_string()))
                }
                _ => Err(CorpusError::Manifest {
                    line: i + 1,
                    message: format!("expected two tab-separated labels, got {l:?}"),
                }),
            }
        })
        .collect()
}

/// Parse a one-label-per-line set (comments with `#`).
pub fn parse_label_set(text: &str) -> BTreeSet<String> {
    data_lines(text).map(|l| l.trim().to_string()).collect()
}

impl BankFilters {
    /// TIMIT conventions: closure merging, diphthong exclusion and IPA relabeling.
    pub fn timit() -> Self {
        BankFilters {
            diphthongs: parse_label_set(TIMIT_DIPHTHONGS),
            merge_map: parse_label_map(TIMIT_CLOSURE_MERGE).expect("bundled merge map"),
            relabel: parse_label_map(TIMIT_TO_IPA).expect("bundled relabel map"),
            ..BankFilters::default()
        }
    }

    /// Apply merge, diphthong, relabel and vocabulary rules (not the count threshold).
    pub fn prepare(&self, manifest: &[SegmentRecord]) -> Vec<SegmentRecord> {
        merge_closures(manifest, &self.merge_map)
            .into_iter()
            .filter(|s| !self.diphthongs.contains(&s.phone))
            .map(|mut s| {
                if let Some(l) = self.relabel.get(&s.phone) {
                    s.phone = l.clone();
                }
                s
            })
            .filter(|s| self.vocabulary.as_ref().map_or(true, |v| v.contains(&s.phone)))
            .collect()
    }

    /// Prepared segments whose phone meets the occurrence threshold, sorted by
    /// (utterance_id, t_start, t_end).
    pub fn retained(&self, manifest: &[SegmentRecord]) -> Vec<SegmentRecord> {
        let prepared = self.prepare(manifest);
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &prepared {
            *counts.entry(s.phone.as_str()).or_default() += 1;
        }
        let keep: BTreeSet<String> = counts
            .into_iter()
            .filter(|&(_, c)| c >= self.min_occurrences)
            .map(|(p, _)| p.to_string())
            .collect();
        let mut out: Vec<SegmentRecord> = prepared.into_iter().filter(|s| keep.contains(&s.phone)).collect();
        out.sort_by(|a, b| {
            a.utterance_id
                .cmp(&b.utterance_id)
                .then(a.t_start.total_cmp(&b.t_start))
                .then(a.t_end.total_cmp(&b.t_end))
        });
        out
    }
}

/// Phone label -> pooled segment vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PhoneBank {
    dim: usize,
    phones: BTreeMap<String, PhoneInstances>,
    pub layer_index: u32,
    pub model_id: String,
    pub filters: Option<BankFilters>,
}

impl PhoneBank {
    pub fn new(dim: usize) -> Self {
        PhoneBank {
            dim,
            phones: BTreeMap::new(),
            layer_index: 0,
            model_id: String::new(),
            filters: None,
        }
    }

    /// Build directly from vectors; sources are synthesized from the insertion order.
    pub fn from_vectors<'a, I>(dim: usize, items: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, Vec<f32>)>,
    {
        let mut bank = PhoneBank::new(dim);
        for (phone, v) in items {
            let n = bank.phones.get(phone).map_or(0, |p| p.len());
            bank.push(
                phone,
                &v,
                SegmentSource {
                    utterance_id: format!("{phone}#{n}"),
                    t_start: 0.0,
                    t_end: 0.0,
                    speaker_id: String::new(),
                },
            );
        }
        bank
    }

    pub fn push(&mut self, phone: &str, v: &[f32], source: SegmentSource) {
        self.phones
            .entry(phone.to_string())
            .or_insert_with(|| PhoneInstances::new(self.dim))
            .push(v, source);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_phones(&self) -> usize {
        self.phones.len()
    }

    pub fn n_instances(&self) -> usize {
        self.phones.values().map(PhoneInstances::len).sum()
    }

    pub fn contains(&self, phone: &str) -> bool {
        self.phones.contains_key(phone)
    }

    pub fn get(&self, phone: &str) -> Option<&PhoneInstances> {
        self.phones.get(phone)
    }

    pub fn phones(&self) -> impl Iterator<Item = (&str, &PhoneInstances)> {
        self.phones.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.phones.keys().map(String::as_str).collect()
    }

    /// A copy with every vector multiplied by `alpha`.
    pub fn scaled(&self, alpha: f32) -> PhoneBank {
        let mut out = self.clone();
        for inst in out.phones.values_mut() {
            inst.data.iter_mut().for_each(|x| *x *= alpha);
        }
        out
    }
}

/// Pool every retained manifest segment of one dump into a [`PhoneBank`].
///
/// Utterances are pooled in parallel; the result is identical for any thread
/// count because segments are ordered by (utterance_id, t_start) before insertion.
pub fn build_phone_bank(
    dump: &RepDump,
    manifest: &[SegmentRecord],
    filters: &BankFilters,
) -> Result<PhoneBank, CorpusError> {
    let retained = filters.retained(manifest);
    if retained.is_empty() {
        return Err(CorpusError::NoSegments);
    }
    let mut by_utt: BTreeMap<&str, Vec<&SegmentRecord>> = BTreeMap::new();
    for s in &retained {
        by_utt.entry(s.utterance_id.as_str()).or_default().push(s);
    }
    for utt in by_utt.keys() {
        if !dump.has_utterance(utt) {
            return Err(CorpusError::MissingUtterance(utt.to_string()));
        }
    }
    let groups: Vec<(&str, Vec<&SegmentRecord>)> = by_utt.into_iter().collect();
    let pooled: Vec<Vec<(String, Vec<f32>, SegmentSource)>> = groups
        .par_iter()
        .map(|(utt, segs)| {
            let m = dump.load(utt)?;
            segs.iter()
                .map(|s| {
                    let v = slice_and_pool(&m, s)?;
                    Ok((
                        s.phone.clone(),
                        v.into_iter().map(|x| x as f32).collect(),
                        SegmentSource {
                            utterance_id: s.utterance_id.clone(),
                            t_start: s.t_start,
                            t_end: s.t_end,
                            speaker_id: s.speaker_id.clone(),
                        },
                    ))
                })
                .collect::<Result<Vec<_>, CorpusError>>()
        })
        .collect::<Result<_, _>>()?;

    let dim = pooled
        .iter()
        .flatten()
        .map(|(_, v, _)| v.len())
        .next()
        .ok_or(CorpusError::NoSegments)?;
    let mut bank = PhoneBank::new(dim);
    bank.layer_index = dump.layer_index();
    bank.model_id = dump.meta().model_id.clone();
    bank.filters = Some(filters.clone());
    for (phone, v, src) in pooled.into_iter().flatten() {
        if v.len() != dim {
            return Err(CorpusError::InvalidShape {
                rows: 1,
                cols: v.len(),
            });
        }
        bank.push(&phone, &v, src);
    }
    Ok(bank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{write_rep_dump, DumpMeta, RepresentationMatrix};

    fn toy_dump(dir: &std::path::Path, counts: &[(&str, usize)]) -> (RepDump, Vec<SegmentRecord>) {
        // One utterance per phone instance; each utterance has 5 frames at 50 fps.
        let mut manifest = Vec::new();
        let mut mats = Vec::new();
        let mut k = 0;
        for (phone, n) in counts {
            for _ in 0..*n {
                let id = format!("utt{k:04}");
                let m = RepresentationMatrix::new(vec![k as f32; 10], 5, 2, 320, 16000).unwrap();
                manifest.push(SegmentRecord::new(&id, phone, 0.02, 0.06));
                mats.push((id, m));
                k += 1;
            }
        }
        let dump = write_rep_dump(
            dir,
            &DumpMeta::default(),
            &manifest,
            mats.iter().map(|(i, m)| (i.as_str(), m)),
        )
        .unwrap();
        (dump, manifest)
    }

    #[test]
    fn occurrence_threshold() {
        let dir = tempfile::tempdir().unwrap();
        let (dump, manifest) = toy_dump(dir.path(), &[("a", 50), ("b", 49)]);
        let bank = build_phone_bank(&dump, &manifest, &BankFilters::default()).unwrap();
        assert_eq!(bank.labels(), vec!["a"]);
        assert_eq!(bank.get("a").unwrap().len(), 50);
    }

    #[test]
    fn filters_disabled_keep_everything_over_threshold() {
        let dir = tempfile::tempdir().unwrap();
        let (dump, manifest) = toy_dump(dir.path(), &[("a", 3), ("b", 2), ("c", 1)]);
        let filters = BankFilters {
            min_occurrences: 2,
            ..BankFilters::default()
        };
        let bank = build_phone_bank(&dump, &manifest, &filters).unwrap();
        assert_eq!(bank.labels(), vec!["a", "b"]);
        assert_eq!(bank.n_instances(), 5);
        // provenance: every vector traces back to its own utterance
        let a = bank.get("a").unwrap();
        for i in 0..a.len() {
            let utt = &a.source(i).utterance_id;
            let k: f32 = utt[3..].parse::<u32>().unwrap() as f32;
            assert_eq!(a.get(i), &[k, k]);
        }
    }

    #[test]
    fn diphthongs_and_relabel() {
        let dir = tempfile::tempdir().unwrap();
        let (dump, manifest) = toy_dump(dir.path(), &[("ay", 2), ("iy", 2)]);
        let filters = BankFilters {
            min_occurrences: 1,
            diphthongs: ["ay".to_string()].into(),
            relabel: [("iy".to_string(), "i".to_string())].into(),
            ..BankFilters::default()
        };
        let bank = build_phone_bank(&dump, &manifest, &filters).unwrap();
        assert_eq!(bank.labels(), vec!["i"]);
    }

    #[test]
    fn missing_utterance_and_empty() {
        let dir = tempfile::tempdir().unwrap();
        let (dump, mut manifest) = toy_dump(dir.path(), &[("a", 2)]);
        let filters = BankFilters {
            min_occurrences: 1,
            ..BankFilters::default()
        };
        manifest.push(SegmentRecord::new("ghost", "a", 0.0, 0.02));
        assert!(matches!(
            build_phone_bank(&dump, &manifest, &filters),
            Err(CorpusError::MissingUtterance(u)) if u == "ghost"
        ));
        let strict = BankFilters {
            min_occurrences: 100,
            ..BankFilters::default()
        };
        assert!(matches!(
            build_phone_bank(&dump, &manifest, &strict),
            Err(CorpusError::NoSegments)
        ));
    }

    #[test]
    fn timit_filters_parse() {
        let f = BankFilters::timit();
        assert_eq!(f.merge_map.get("bcl").map(String::as_str), Some("b"));
        assert!(f.diphthongs.contains("ay"));
        assert_eq!(f.relabel.get("g").map(String::as_str), Some("\u{261}"));
    }
}
