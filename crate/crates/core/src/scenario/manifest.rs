use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestFile {
    /// Path relative to the run directory.
    pub path: String,
    pub sha256: String,
}

/// Record of one run: the effective configuration, every emitted file with
/// its checksum, and whether the scenario's own acceptance checks passed.
/// The manifest file itself is the only unlisted file in the directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub config: BTreeMap<String, String>,
    pub version: String,
    pub wall_seconds: f64,
    pub files: Vec<ManifestFile>,
    pub incomplete: bool,
    pub pass: bool,
    /// Non-fatal conditions, e.g. "under-sampled".
    pub flags: Vec<String>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let raw = fs::read_to_string(dir.join(MANIFEST_NAME))?;
        Ok(serde_json::from_str(&raw)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(dir.join(MANIFEST_NAME), json)?;
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects emitted files and their checksums while a scenario runs.
pub struct OutputWriter {
    dir: PathBuf,
    files: Vec<ManifestFile>,
}

impl OutputWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("cannot create output directory: {e}")))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.files.push(ManifestFile { path: name.into(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let json = serde_json::to_string_pretty(value)?;
        self.write(name, json.as_bytes())
    }

    pub fn into_files(self) -> Vec<ManifestFile> {
        self.files
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn writer_registers_every_file() {
        let tmp = tempfile::tempdir().unwrap();
        let mut w = OutputWriter::create(tmp.path()).unwrap();
        w.write("a.csv", b"x,y\n").unwrap();
        w.write("b.json", b"{}").unwrap();
        let files = w.into_files();
        assert_eq!(files.len(), 2);
        for f in &files {
            let bytes = fs::read(tmp.path().join(&f.path)).unwrap();
            assert_eq!(sha256_hex(&bytes), f.sha256);
        }
    }

    #[test]
    fn manifest_round_trips() {
        let tmp = tempfile::tempdir().unwrap();
        let m = RunManifest {
            scenario: "sho".into(),
            config: BTreeMap::new(),
            version: "0.1.0".into(),
            wall_seconds: 1.5,
            files: vec![],
            incomplete: false,
            pass: true,
            flags: vec![],
        };
        m.save(tmp.path()).unwrap();
        let back = RunManifest::load(tmp.path()).unwrap();
        assert_eq!(back.scenario, "sho");
        assert!(back.pass && !back.incomplete);
    }
}
