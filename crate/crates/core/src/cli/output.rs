//! The single output writer and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    /// Zero unless timings are recorded, to keep manifests reproducible.
    pub runtime_s: f64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
    /// Hard checks decide the exit status; soft ones are reported only.
    pub hard: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: BTreeMap<String, BTreeMap<String, String>>,
    pub stages: Vec<StageRecord>,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<CheckRecord>,
    pub results: BTreeMap<String, serde_json::Value>,
    pub notes: Vec<String>,
    pub invariants_passed: bool,
    pub solver_failed: bool,
    pub files: Vec<FileEntry>,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes files atomically (temp file, then rename) and records their digests.
pub struct Writer {
    dir: PathBuf,
    files: BTreeMap<String, FileEntry>,
}

impl Writer {
    /// Prepares `dir`: files listed by a previous manifest are removed; any
    /// other file makes the directory unusable.
    pub fn open(dir: &Path) -> Result<Self, String> {
        if dir.exists() {
            let listed: Vec<String> = match fs::read(dir.join(MANIFEST)) {
                Ok(bytes) => serde_json::from_slice::<RunManifest>(&bytes)
                    .map_err(|e| format!("{}: unreadable manifest: {e}", dir.display()))?
                    .files
                    .into_iter()
                    .map(|f| f.name)
                    .collect(),
                Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
                Err(e) => return Err(format!("{}: {e}", dir.display())),
            };
            let entries = fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            let mut names: Vec<String> = Vec::new();
            for entry in entries {
                let entry = entry.map_err(|e| format!("{}: {e}", dir.display()))?;
                names.push(entry.file_name().to_string_lossy().into_owned());
            }
            names.sort();
            if let Some(stray) = names.iter().find(|n| *n != MANIFEST && !listed.contains(n)) {
                return Err(format!(
                    "output directory {} contains `{stray}`, which no manifest lists",
                    dir.display()
                ));
            }
            for n in &names {
                fs::remove_file(dir.join(n)).map_err(|e| format!("{n}: {e}"))?;
            }
        } else {
            fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            files: BTreeMap::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> io::Result<()> {
        assert!(
            name != MANIFEST && !name.contains('/'),
            "invalid output name {name}"
        );
        self.put(name, contents)?;
        self.files.insert(
            name.to_string(),
            FileEntry {
                name: name.to_string(),
                bytes: contents.len() as u64,
                sha256: digest(contents),
            },
        );
        Ok(())
    }

    fn put(&self, name: &str, contents: &[u8]) -> io::Result<()> {
        let tmp = self.dir.join(format!(".{name}.tmp"));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(contents)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.dir.join(name))
    }

    /// Lists every written file in the manifest and writes it last.
    pub fn finish(self, mut manifest: RunManifest) -> io::Result<RunManifest> {
        manifest.files = self.files.values().cloned().collect();
        let mut text = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
        text.push('\n');
        self.put(MANIFEST, text.as_bytes())?;
        Ok(manifest)
    }
}
