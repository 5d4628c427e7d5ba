//! Locating and loading label and pose files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use kitti_safety::kitti_io::{parse_ego_poses, parse_tracking_labels, PoseMap};
use kitti_safety::pipeline::SequenceInput;
use kitti_safety::ObservationRecord;

/// Label files keyed by sequence id (the file stem). A directory yields every
/// `*.txt` inside it.
pub fn sequence_files(path: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut files = BTreeMap::new();
    if path.is_dir() {
        let entries = fs::read_dir(path).with_context(|| format!("reading directory {}", path.display()))?;
        for entry in entries {
            let p = entry?.path();
            if p.is_file() && p.extension().is_some_and(|e| e == "txt") {
                files.insert(stem(&p)?, p);
            }
        }
    } else if path.is_file() {
        files.insert(stem(path)?, path.to_owned());
    } else {
        bail!("{} does not exist", path.display());
    }
    Ok(files)
}

fn stem(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_owned)
        .with_context(|| format!("cannot derive a sequence id from {}", path.display()))
}

pub fn read_labels(path: &Path) -> Result<Vec<ObservationRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_tracking_labels(&text).with_context(|| path.display().to_string())
}

pub fn read_poses(path: &Path) -> Result<PoseMap> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_ego_poses(&text).with_context(|| path.display().to_string())
}

/// Where the poses of each sequence live.
pub enum PoseSource<'a> {
    None,
    /// One file, only valid with a single label file.
    File(&'a Path),
    /// `<dir>/<sequence>.txt` or `<dir>/<sequence>.json`.
    Dir(&'a Path),
}

impl<'a> PoseSource<'a> {
    pub fn new(poses: Option<&'a Path>, sequences: usize) -> Result<Self> {
        Ok(match poses {
            None => PoseSource::None,
            Some(p) if p.is_dir() => PoseSource::Dir(p),
            Some(p) if p.is_file() => {
                if sequences > 1 {
                    bail!("a single pose file needs a single label file; pass a pose directory instead");
                }
                PoseSource::File(p)
            }
            Some(p) => bail!("{} does not exist", p.display()),
        })
    }

    fn load(&self, sequence: &str) -> Result<Option<PoseMap>> {
        match self {
            PoseSource::None => Ok(None),
            PoseSource::File(p) => read_poses(p).map(Some),
            PoseSource::Dir(dir) => {
                let found = ["txt", "json"]
                    .iter()
                    .map(|ext| dir.join(format!("{sequence}.{ext}")))
                    .find(|p| p.is_file())
                    .with_context(|| format!("no pose file for sequence {sequence} in {}", dir.display()))?;
                read_poses(&found).map(Some)
            }
        }
    }
}

pub type SequenceFailure = (String, anyhow::Error);

/// Loads every sequence. Failures are returned per sequence instead of
/// aborting the batch.
pub fn load_sequences(labels: &Path, poses: Option<&Path>) -> Result<(Vec<SequenceInput>, Vec<SequenceFailure>)> {
    let files = sequence_files(labels)?;
    let source = PoseSource::new(poses, files.len())?;
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (id, path) in files {
        let loaded = read_labels(&path).and_then(|records| Ok((records, source.load(&id)?)));
        match loaded {
            Ok((records, poses)) => ok.push(SequenceInput { id, records, poses }),
            Err(e) => failed.push((id, e)),
        }
    }
    Ok((ok, failed))
}
