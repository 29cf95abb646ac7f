use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::tables::write_text;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Provenance record written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Full argument vector, enough to re-run the command.
    pub args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub toolkit_version: String,
    pub timestamp: String,
    pub inputs: Vec<InputDigest>,
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>, config_hash: Option<String>) -> Self {
        RunManifest {
            command: command.to_string(),
            args,
            config_hash,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            inputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputDigest {
            path: path.to_path_buf(),
            sha256: file_digest(path)?,
        });
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_toml())
    }

    /// `<output>.manifest.toml` for single-file outputs.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.toml");
        output.with_file_name(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_records_digests() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.csv");
        std::fs::write(&input, "abc").unwrap();
        let mut m = RunManifest::new("reconstruct", vec!["ofdr-shape".into()], None);
        m.add_input(&input).unwrap();
        assert_eq!(
            m.inputs[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let back: RunManifest = toml::from_str(&m.to_toml()).unwrap();
        assert_eq!(back, m);
        assert_eq!(
            RunManifest::path_for(Path::new("out/shape.csv")),
            PathBuf::from("out/shape.csv.manifest.toml")
        );
    }
}
