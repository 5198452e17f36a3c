//! Representation dump directories.
//!
//! ```text
//! <dump>/manifest.jsonl        one SegmentRecord per line
//! <dump>/reps/<utt>.s3mr       one matrix per utterance
//! <dump>/meta.json             optional {"model_id": .., "layer_index": ..}
//! ```
//!
//! A directory without `manifest.jsonl` whose subdirectories are dumps is
//! treated as a multi-layer root (see [`discover_dumps`]).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_manifest, s3mr, write_manifest, CorpusError, RepresentationMatrix, SegmentRecord};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const REPS_DIR: &str = "reps";
pub const META_FILE: &str = "meta.json";
pub const EXTENSION: &str = "s3mr";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpMeta {
    #[serde(default)]
    pub model_id: String,
    #[serde(default)]
    pub layer_index: u32,
}

#[derive(Debug, Clone)]
pub struct RepDump {
    root: PathBuf,
    meta: DumpMeta,
}

fn layer_from_dir_name(path: &Path) -> Option<u32> {
    path.file_name()?.to_str()?.strip_prefix("layer_")?.parse().ok()
}

impl RepDump {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let root = path.as_ref().to_path_buf();
        let manifest = root.join(MANIFEST_FILE);
        if !manifest.is_file() {
            return Err(CorpusError::io(
                &manifest,
                std::io::Error::new(std::io::ErrorKind::NotFound, "missing manifest.jsonl"),
            ));
        }
        let meta_path = root.join(META_FILE);
        let meta = if meta_path.is_file() {
            let text = fs::read_to_string(&meta_path).map_err(|e| CorpusError::io(&meta_path, e))?;
            serde_json::from_str(&text)?
        } else {
            DumpMeta {
                model_id: String::new(),
                layer_index: layer_from_dir_name(&root).unwrap_or(0),
            }
        };
        Ok(RepDump { root, meta })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn meta(&self) -> &DumpMeta {
        &self.meta
    }

    pub fn layer_index(&self) -> u32 {
        self.meta.layer_index
    }

    pub fn manifest(&self) -> Result<Vec<SegmentRecord>, CorpusError> {
        let path = self.root.join(MANIFEST_FILE);
        let f = fs::File::open(&path).map_err(|e| CorpusError::io(&path, e))?;
        read_manifest(f).map_err(|e| e.in_file(&path))
    }

    pub fn rep_path(&self, utterance_id: &str) -> PathBuf {
        self.root
            .join(REPS_DIR)
            .join(format!("{utterance_id}.{EXTENSION}"))
    }

    pub fn has_utterance(&self, utterance_id: &str) -> bool {
        self.rep_path(utterance_id).is_file()
    }

    /// Utterance ids with a matrix file, sorted.
    pub fn utterance_ids(&self) -> Result<Vec<String>, CorpusError> {
        let dir = self.root.join(REPS_DIR);
        let mut ids = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| CorpusError::io(&dir, e))? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) == Some(EXTENSION) {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    ids.push(stem.to_string());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }

    pub fn load(&self, utterance_id: &str) -> Result<RepresentationMatrix, CorpusError> {
        let m = s3mr::read_file(&self.rep_path(utterance_id))?;
        Ok(m.with_layer(self.meta.layer_index, self.meta.model_id.clone()))
    }

    /// Stream matrices one at a time in utterance-id order.
    pub fn iter(
        &self,
    ) -> Result<impl Iterator<Item = Result<(String, RepresentationMatrix), CorpusError>> + '_, CorpusError>
    {
        let ids = self.utterance_ids()?;
        Ok(ids.into_iter().map(move |id| {
            let m = self.load(&id)?;
            Ok((id, m))
        }))
    }
}

/// Open a dump directory and stream its matrices.
pub fn read_rep_dump(
    path: impl AsRef<Path>,
) -> Result<impl Iterator<Item = Result<(String, RepresentationMatrix), CorpusError>>, CorpusError> {
    let dump = RepDump::open(path)?;
    let ids = dump.utterance_ids()?;
    Ok(ids.into_iter().map(move |id| {
        let m = dump.load(&id)?;
        Ok((id, m))
    }))
}

/// Write a complete dump directory.
pub fn write_rep_dump<'a>(
    dir: impl AsRef<Path>,
    meta: &DumpMeta,
    manifest: &[SegmentRecord],
    matrices: impl IntoIterator<Item = (&'a str, &'a RepresentationMatrix)>,
) -> Result<RepDump, CorpusError> {
    let dir = dir.as_ref();
    let reps = dir.join(REPS_DIR);
    fs::create_dir_all(&reps).map_err(|e| CorpusError::io(&reps, e))?;
    for (id, m) in matrices {
        let path = reps.join(format!("{id}.{EXTENSION}"));
        crate::io::write_atomic(&path, &s3mr::encode(m)).map_err(|e| CorpusError::io(&path, e))?;
    }
    let mut buf = Vec::new();
    write_manifest(&mut buf, manifest)?;
    let mpath = dir.join(MANIFEST_FILE);
    crate::io::write_atomic(&mpath, &buf).map_err(|e| CorpusError::io(&mpath, e))?;
    let meta_path = dir.join(META_FILE);
    crate::io::write_atomic(&meta_path, &serde_json::to_vec_pretty(meta)?).map_err(|e| CorpusError::io(&meta_path, e))?;
    RepDump::open(dir)
}

/// A single dump, or every dump one level below a multi-layer root, sorted by layer.
pub fn discover_dumps(path: impl AsRef<Path>) -> Result<Vec<RepDump>, CorpusError> {
    let path = path.as_ref();
    if path.join(MANIFEST_FILE).is_file() {
        return Ok(vec![RepDump::open(path)?]);
    }
    let mut dumps = Vec::new();
    let entries = fs::read_dir(path).map_err(|e| CorpusError::io(path, e))?;
    for entry in entries {
        let p = entry?.path();
        if p.is_dir() && p.join(MANIFEST_FILE).is_file() {
            dumps.push(RepDump::open(&p)?);
        }
    }
    if dumps.is_empty() {
        return Err(CorpusError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no representation dump found"),
        ));
    }
    dumps.sort_by(|a, b| {
        a.layer_index()
            .cmp(&b.layer_index())
            .then_with(|| a.root.cmp(&b.root))
    });
    Ok(dumps)
}
