//! Resumable run state, written after every partition group.

use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use halfgap_core::enumeration::Cursor;
use halfgap_core::VertexRecord;
use serde::{Deserialize, Serialize};

use crate::pipeline::{PipelineConfig, Stage, StageTimings};
use crate::records::RecordRow;
use crate::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub n: usize,
    pub stage: Stage,
    pub partition_index: usize,
    pub consumed: usize,
    pub candidates: u64,
    pub timings: StageTimings,
    pub records: Vec<RecordRow>,
}

impl Checkpoint {
    pub fn capture(
        cfg: &PipelineConfig,
        cursor: Cursor,
        candidates: u64,
        records: &[VertexRecord],
        timings: StageTimings,
    ) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            n: cfg.n,
            stage: cfg.stage,
            partition_index: cursor.partition_index,
            consumed: cursor.consumed,
            candidates,
            timings,
            records: records.iter().map(RecordRow::from).collect(),
        }
    }

    /// `Ok(None)` when no checkpoint exists yet.
    pub fn load(path: &Path) -> Result<Option<Self>> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(path)(e)),
        };
        let cp: Checkpoint = serde_json::from_str(&text)?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "{} has version {}, expected {CHECKPOINT_VERSION}",
                path.display(),
                cp.version
            )));
        }
        Ok(Some(cp))
    }

    /// Writes to a sibling temp file and renames it over `path`, so a crash
    /// mid-write leaves the previous checkpoint intact.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec(self)?).map_err(Error::io(&tmp))?;
        fs::rename(&tmp, path).map_err(Error::io(path))
    }

    pub fn check_compatible(&self, cfg: &PipelineConfig) -> Result<()> {
        if self.n != cfg.n || self.stage != cfg.stage {
            return Err(Error::Checkpoint(format!(
                "checkpoint is for n = {} up to stage {:?}, run asks for n = {} up to stage {:?}",
                self.n, self.stage, cfg.n, cfg.stage
            )));
        }
        Ok(())
    }

    pub fn cursor(&self) -> Cursor {
        Cursor { partition_index: self.partition_index, consumed: self.consumed }
    }

    pub fn records(&self) -> Result<Vec<VertexRecord>> {
        self.records.iter().cloned().map(VertexRecord::try_from).collect()
    }
}
