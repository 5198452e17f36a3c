use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::CorpusError;

/// One labeled phone segment of an utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub utterance_id: String,
    pub phone: String,
    pub t_start: f64,
    pub t_end: f64,
    #[serde(default)]
    pub speaker_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
}

impl SegmentRecord {
    pub fn new(utterance_id: &str, phone: &str, t_start: f64, t_end: f64) -> Self {
        SegmentRecord {
            utterance_id: utterance_id.to_string(),
            phone: phone.to_string(),
            t_start,
            t_end,
            speaker_id: String::new(),
            language: None,
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let reason = if self.phone.is_empty() {
            Some("empty phone label")
        } else if !(self.t_start.is_finite() && self.t_end.is_finite()) {
            Some("non-finite time")
        } else if self.t_start < 0.0 {
            Some("negative start time")
        } else if self.t_end <= self.t_start {
            Some("end time not after start time")
        } else {
            None
        };
        match reason {
            None => Ok(()),
            Some(r) => Err(CorpusError::InvalidSegment {
                utterance_id: self.utterance_id.clone(),
                phone: self.phone.clone(),
                t_start: self.t_start,
                t_end: self.t_end,
                reason: r.to_string(),
            }),
        }
    }
}

pub fn read_manifest<R: Read>(source: R) -> Result<Vec<SegmentRecord>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SegmentRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Manifest {
            line: i + 1,
            message: e.to_string(),
        })?;
        rec.validate().map_err(|e| CorpusError::Manifest {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_manifest<W: Write>(mut w: W, records: &[SegmentRecord]) -> Result<(), CorpusError> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Adjacent closure/release boundaries closer than this are treated as touching.
const ADJACENCY_TOLERANCE: f64 = 1e-6;

/// Fuse each closure segment with the release that immediately follows it in
/// the same utterance. `merge_map` maps closure label -> release label.
/// Closures without their release are kept unchanged.
pub fn merge_closures(
    records: &[SegmentRecord],
    merge_map: &BTreeMap<String, String>,
) -> Vec<SegmentRecord> {
    if merge_map.is_empty() {
        return records.to_vec();
    }
    let mut by_utt: BTreeMap<&str, Vec<&SegmentRecord>> = BTreeMap::new();
    for r in records {
        by_utt.entry(r.utterance_id.as_str()).or_default().push(r);
    }
    let mut out = Vec::with_capacity(records.len());
    for (_, mut segs) in by_utt {
        segs.sort_by(|a, b| a.t_start.total_cmp(&b.t_start).then(a.t_end.total_cmp(&b.t_end)));
        let mut i = 0;
        while i < segs.len() {
            let cur = segs[i];
            if let (Some(release), Some(next)) = (merge_map.get(&cur.phone), segs.get(i + 1)) {
                if &next.phone == release && (next.t_start - cur.t_end).abs() <= ADJACENCY_TOLERANCE
                {
                    let mut fused = (*next).clone();
                    fused.t_start = cur.t_start;
                    out.push(fused);
                    i += 2;
                    continue;
                }
            }
            out.push(cur.clone());
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_merge() {
        let recs = vec![
            SegmentRecord::new("u1", "bcl", 0.10, 0.15),
            SegmentRecord::new("u1", "b", 0.15, 0.18),
            SegmentRecord::new("u1", "iy", 0.18, 0.30),
        ];
        let map = BTreeMap::from([("bcl".to_string(), "b".to_string())]);
        let merged = merge_closures(&recs, &map);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].phone, "b");
        assert_eq!(merged[0].t_start, 0.10);
        assert_eq!(merged[0].t_end, 0.18);
        assert_eq!(merged[1].phone, "iy");
    }

    #[test]
    fn unreleased_closure_kept() {
        let recs = vec![
            SegmentRecord::new("u1", "tcl", 0.10, 0.15),
            SegmentRecord::new("u1", "s", 0.15, 0.20),
        ];
        let map = BTreeMap::from([("tcl".to_string(), "t".to_string())]);
        assert_eq!(merge_closures(&recs, &map), recs);
    }

    #[test]
    fn non_adjacent_release_not_merged() {
        let recs = vec![
            SegmentRecord::new("u1", "bcl", 0.10, 0.15),
            SegmentRecord::new("u1", "b", 0.16, 0.18),
        ];
        let map = BTreeMap::from([("bcl".to_string(), "b".to_string())]);
        assert_eq!(merge_closures(&recs, &map).len(), 2);
    }

    #[test]
    fn manifest_round_trip_and_validation() {
        let mut r = SegmentRecord::new("u", "a", 0.0, 0.5);
        r.language = Some("eng".into());
        let mut buf = Vec::new();
        write_manifest(&mut buf, &[r.clone()]).unwrap();
        assert_eq!(read_manifest(buf.as_slice()).unwrap(), vec![r]);

        let bad = r#"{"utterance_id":"u","phone":"a","t_start":0.5,"t_end":0.5}"#;
        assert!(matches!(
            read_manifest(bad.as_bytes()),
            Err(CorpusError::Manifest { line: 1, .. })
        ));
    }
}
