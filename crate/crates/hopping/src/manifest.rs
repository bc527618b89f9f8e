//! Run manifests written next to every output file.

use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::formats::{write_atomic, Json};

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub params: Vec<(String, Json)>,
    pub seeds: Vec<u64>,
    pub kernel_tolerances: Json,
    pub threads: usize,
    pub wall_time: Duration,
    /// False when a resource cap cut the computation short.
    pub complete: bool,
    pub outputs: Vec<OutputFile>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

impl OutputFile {
    pub fn describe(path: &Path, contents: &[u8]) -> Self {
        OutputFile {
            name: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            sha256: sha256_hex(contents),
            bytes: contents.len() as u64,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `<output>.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut p = output.as_os_str().to_owned();
    p.push(".manifest.json");
    PathBuf::from(p)
}

impl RunManifest {
    pub fn to_json(&self) -> Json {
        Json::obj([
            ("tool", Json::Str(format!("hopping {}", env!("CARGO_PKG_VERSION")))),
            ("command", Json::Str(self.command.clone())),
            ("params", Json::Obj(self.params.clone())),
            ("seeds", Json::Arr(self.seeds.iter().map(|&s| Json::Int(s as i128)).collect())),
            ("kernel_tolerances", self.kernel_tolerances.clone()),
            ("threads", Json::Int(self.threads as i128)),
            ("wall_time_seconds", Json::Num(self.wall_time.as_secs_f64())),
            ("complete", Json::Bool(self.complete)),
            (
                "outputs",
                Json::Arr(
                    self.outputs
                        .iter()
                        .map(|o| {
                            Json::obj([
                                ("name", Json::Str(o.name.clone())),
                                ("sha256", Json::Str(o.sha256.clone())),
                                ("bytes", Json::Int(o.bytes as i128)),
                            ])
                        })
                        .collect(),
                ),
            ),
        ])
    }

    pub fn write_next_to(&self, output: &Path) -> io::Result<PathBuf> {
        let path = manifest_path(output);
        write_atomic(&path, self.to_json().render().as_bytes())?;
        Ok(path)
    }
}
