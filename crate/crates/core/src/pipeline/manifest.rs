use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::util::sha256_hex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Perturb,
    Extract,
    Evaluate,
    Analyze,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Ingest,
        Stage::Perturb,
        Stage::Extract,
        Stage::Evaluate,
        Stage::Analyze,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Perturb => "perturb",
            Stage::Extract => "extract",
            Stage::Evaluate => "evaluate",
            Stage::Analyze => "analyze",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Hashes of the files a stage read and wrote, relative to the output
/// directory.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub corpus_sha256: String,
    pub seed: u64,
    /// Choices the method leaves open, with the values used in this run.
    pub decisions: BTreeMap<String, String>,
    pub stages: BTreeMap<Stage, StageRecord>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub(crate) fn file_sha(path: &Path) -> Result<String, PipelineError> {
    let bytes = std::fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

impl Manifest {
    pub fn load(out: &Path) -> Result<Option<Manifest>, PipelineError> {
        let path = out.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| PipelineError::io(&path, e))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| PipelineError::Config(format!("unreadable manifest {}: {e}", path.display())))
    }

    pub fn save(&self, out: &Path) -> Result<(), PipelineError> {
        let path = out.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| PipelineError::io(&path, e))
    }

    /// Which stage wrote `artifact`, and the hash it recorded.
    fn producer(&self, artifact: &str) -> Option<(Stage, &str)> {
        self.stages
            .iter()
            .find_map(|(s, r)| r.outputs.get(artifact).map(|h| (*s, h.as_str())))
    }

    /// Checks that every input of `stage` was produced by an earlier stage of
    /// this run and is unchanged on disk. Returns the input hashes.
    pub fn check_inputs(&self, out: &Path, stage: Stage, inputs: &[String]) -> Result<BTreeMap<String, String>, PipelineError> {
        let mut hashes = BTreeMap::new();
        for name in inputs {
            let stale = |reason: String| PipelineError::Stale {
                stage,
                artifact: name.clone(),
                reason,
            };
            let (producer, recorded) = self
                .producer(name)
                .ok_or_else(|| stale("no upstream stage recorded it; run the earlier stages first".into()))?;
            if producer >= stage {
                return Err(stale(format!("it is written by {producer}, not upstream")));
            }
            let path = out.join(name);
            if !path.exists() {
                return Err(stale("file is missing".into()));
            }
            let actual = file_sha(&path)?;
            if actual != recorded {
                return Err(stale(format!("hash {actual} differs from manifest {recorded}")));
            }
            hashes.insert(name.clone(), actual);
        }
        Ok(hashes)
    }

    /// Records a finished stage and forgets every later one, whose outputs
    /// may now be out of date.
    pub fn record(&mut self, stage: Stage, record: StageRecord) {
        self.stages.retain(|s, _| *s < stage);
        self.stages.insert(stage, record);
    }
}
