//! JSON-lines checkpoints for the brute-force minimum.
//!
//! Line 1 is a header naming the run; each further `chunk` line records the
//! minimum over one completed Gray-index range; a trailing `progress` line
//! carries the running minimum over the completed chunks. The file is
//! rewritten through a temporary sibling and a rename, so a crash leaves
//! either the old or the new version on disk.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use hopping_core::pseudospectra::Partial;
use hopping_core::C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("checkpoint {path}, line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("checkpoint {path} has version {found}, expected {CHECKPOINT_VERSION}")]
    Version { path: PathBuf, found: u32 },
    #[error("checkpoint {path} was written for a different run ({field} differs)")]
    Mismatch { path: PathBuf, field: &'static str },
}

/// Parameters that identify a run; a resume must match them exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunKey {
    pub version: u32,
    pub n: usize,
    pub lambda: [f64; 2],
    pub chunk_size: u64,
    pub total: u64,
    pub crossover: usize,
    pub early_cutoff: Option<f64>,
}

impl RunKey {
    pub fn new(n: usize, lambda: C64, chunk_size: u64, total: u64, crossover: usize, early_cutoff: Option<f64>) -> Self {
        RunKey {
            version: CHECKPOINT_VERSION,
            n,
            lambda: [lambda.re, lambda.im],
            chunk_size,
            total,
            crossover,
            early_cutoff,
        }
    }

    pub fn chunk_count(&self) -> u64 {
        self.total.div_ceil(self.chunk_size)
    }

    pub fn chunk_range(&self, index: u64) -> (u64, u64) {
        let start = index * self.chunk_size;
        (start, self.total.min(start + self.chunk_size))
    }

    fn first_difference(&self, other: &RunKey) -> Option<&'static str> {
        if self.n != other.n {
            Some("n")
        } else if self.lambda[0].to_bits() != other.lambda[0].to_bits()
            || self.lambda[1].to_bits() != other.lambda[1].to_bits()
        {
            Some("lambda")
        } else if self.chunk_size != other.chunk_size {
            Some("chunk_size")
        } else if self.total != other.total {
            Some("total")
        } else if self.crossover != other.crossover {
            Some("crossover")
        } else if self.early_cutoff.map(f64::to_bits) != other.early_cutoff.map(f64::to_bits) {
            Some("early_cutoff")
        } else {
            None
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Header(RunKey),
    Chunk {
        index: u64,
        start: u64,
        end: u64,
        /// Absent when the range held no reversal-canonical sequence.
        min: Option<f64>,
        argmin: Option<u64>,
        evaluated: u64,
        cutoff_hit: bool,
    },
    Progress {
        completed: u64,
        running_min: Option<f64>,
        running_argmin: Option<u64>,
    },
}

/// In-memory state of a checkpoint file.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    path: PathBuf,
    key: RunKey,
    done: BTreeMap<u64, Partial>,
}

impl Checkpoint {
    /// Opens `path` for the run `key`: loads and validates it if it exists,
    /// otherwise starts empty (nothing is written until [`Checkpoint::save`]).
    pub fn open(path: &Path, key: RunKey) -> Result<Self, CheckpointError> {
        if !path.exists() {
            return Ok(Checkpoint {
                path: path.to_path_buf(),
                key,
                done: BTreeMap::new(),
            });
        }
        let text = fs::read_to_string(path).map_err(|source| CheckpointError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let parse_err = |line: usize, msg: String| CheckpointError::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        let found = match lines.next() {
            Some((_, l)) => match serde_json::from_str::<Line>(l) {
                Ok(Line::Header(k)) => k,
                Ok(_) => return Err(parse_err(1, "first line is not a header".into())),
                Err(e) => return Err(parse_err(1, e.to_string())),
            },
            None => return Err(parse_err(1, "empty file".into())),
        };
        if found.version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Version {
                path: path.to_path_buf(),
                found: found.version,
            });
        }
        if let Some(field) = key.first_difference(&found) {
            return Err(CheckpointError::Mismatch {
                path: path.to_path_buf(),
                field,
            });
        }
        let mut done = BTreeMap::new();
        for (i, l) in lines {
            if l.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<Line>(l).map_err(|e| parse_err(i + 1, e.to_string()))? {
                Line::Chunk {
                    index,
                    start,
                    end,
                    min,
                    argmin,
                    evaluated,
                    cutoff_hit,
                } => {
                    if index >= key.chunk_count() || key.chunk_range(index) != (start, end) {
                        return Err(parse_err(i + 1, format!("chunk {index} has range {start}..{end}")));
                    }
                    let part = match (min, argmin) {
                        (Some(v), Some(m)) if evaluated > 0 && v >= 0.0 => Partial {
                            value: v,
                            argmin: m,
                            evaluated,
                            cutoff_hit,
                        },
                        (None, None) if evaluated == 0 => Partial::EMPTY,
                        _ => return Err(parse_err(i + 1, "inconsistent chunk minimum".into())),
                    };
                    done.insert(index, part);
                }
                Line::Progress { .. } => {}
                Line::Header(_) => return Err(parse_err(i + 1, "repeated header".into())),
            }
        }
        Ok(Checkpoint {
            path: path.to_path_buf(),
            key,
            done,
        })
    }

    pub fn key(&self) -> &RunKey {
        &self.key
    }

    pub fn completed(&self) -> &BTreeMap<u64, Partial> {
        &self.done
    }

    pub fn record(&mut self, index: u64, part: Partial) {
        self.done.insert(index, part);
    }

    /// Running minimum over completed chunks, folded in index order.
    pub fn running(&self) -> Partial {
        let mut acc = Partial::EMPTY;
        for p in self.done.values() {
            acc.merge(p);
        }
        acc
    }

    /// Writes the whole checkpoint to a temporary file and renames it into place.
    pub fn save(&self) -> Result<(), CheckpointError> {
        let io_err = |source| CheckpointError::Io {
            path: self.path.clone(),
            source,
        };
        let mut out = String::new();
        let push = |out: &mut String, line: &Line| {
            out.push_str(&serde_json::to_string(line).expect("checkpoint lines serialize"));
            out.push('\n');
        };
        push(&mut out, &Line::Header(self.key));
        for (&index, p) in &self.done {
            let (start, end) = self.key.chunk_range(index);
            let has = p.evaluated > 0;
            push(
                &mut out,
                &Line::Chunk {
                    index,
                    start,
                    end,
                    min: has.then_some(p.value),
                    argmin: has.then_some(p.argmin),
                    evaluated: p.evaluated,
                    cutoff_hit: p.cutoff_hit,
                },
            );
        }
        let run = self.running();
        let has = run.evaluated > 0;
        push(
            &mut out,
            &Line::Progress {
                completed: self.done.len() as u64,
                running_min: has.then_some(run.value),
                running_argmin: has.then_some(run.argmin),
            },
        );

        let mut tmp = self.path.clone().into_os_string();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        {
            let mut f = fs::File::create(&tmp).map_err(io_err)?;
            f.write_all(out.as_bytes()).map_err(io_err)?;
            f.sync_all().map_err(io_err)?;
        }
        fs::rename(&tmp, &self.path).map_err(io_err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> RunKey {
        RunKey::new(10, C64::new(1.5, 0.5), 64, 512, 12, None)
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let mut ck = Checkpoint::open(&path, key()).unwrap();
        let v = 0.1 + 0.2;
        ck.record(3, Partial { value: v, argmin: 77, evaluated: 30, cutoff_hit: false });
        ck.record(0, Partial::EMPTY);
        ck.save().unwrap();
        let back = Checkpoint::open(&path, key()).unwrap();
        assert_eq!(back.completed().len(), 2);
        assert_eq!(back.completed()[&3].value.to_bits(), v.to_bits());
        assert_eq!(back.completed()[&0], Partial::EMPTY);
        assert_eq!(back.running().argmin, 77);
    }

    #[test]
    fn mismatched_run_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        Checkpoint::open(&path, key()).unwrap().save().unwrap();
        let mut other = key();
        other.lambda[1] = 0.25;
        match Checkpoint::open(&path, other) {
            Err(CheckpointError::Mismatch { field, .. }) => assert_eq!(field, "lambda"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn garbage_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        fs::write(&path, "{\"kind\":\"chunk\"}\n").unwrap();
        assert!(matches!(Checkpoint::open(&path, key()), Err(CheckpointError::Parse { .. })));
        Checkpoint::open(&path.with_extension("x"), key()).unwrap().save().unwrap();
        let good = fs::read_to_string(path.with_extension("x")).unwrap();
        fs::write(&path, format!("{good}{{\"kind\":\"chunk\",\"index\":1,\"start\":0,\"end\":9,\"min\":1.0,\"argmin\":0,\"evaluated\":1,\"cutoff_hit\":false}}\n")).unwrap();
        assert!(matches!(Checkpoint::open(&path, key()), Err(CheckpointError::Parse { .. })));
    }

    #[test]
    fn version_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let mut k = key();
        k.version = 99;
        fs::write(&path, format!("{}\n", serde_json::to_string(&Line::Header(k)).unwrap())).unwrap();
        assert!(matches!(Checkpoint::open(&path, key()), Err(CheckpointError::Version { found: 99, .. })));
    }
}
