//! Run manifests: a `.manifest` text file next to every artifact recording
//! the command line, input digests and method parameters. Equal manifests
//! plus equal inputs guarantee byte-identical outputs, so manifests carry no
//! timestamps or host details.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Default)]
pub struct Manifest {
    command: String,
    inputs: Vec<(String, String)>,
    seed: Option<u64>,
    params: Vec<(String, String)>,
}

impl Manifest {
    /// Captures the invocation as the user typed it.
    pub fn for_current_command() -> Self {
        let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
        Self {
            command,
            ..Self::default()
        }
    }

    #[cfg(test)]
    pub fn for_command(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    /// Records an input file by its SHA-256 digest.
    pub fn add_input(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        let digest = hex::encode(Sha256::digest(&bytes));
        self.inputs.push((path.display().to_string(), digest));
        Ok(())
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn add_param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = format!("command: shiftdeconv {}\n", self.command);
        for (path, digest) in &self.inputs {
            out.push_str(&format!("input {path}: sha256={digest}\n"));
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        for (key, value) in &self.params {
            out.push_str(&format!("param {key}: {value}\n"));
        }
        out
    }

    /// Path of the manifest that accompanies `artifact`.
    pub fn path_for(artifact: &Path) -> PathBuf {
        let mut name = artifact.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest");
        artifact.with_file_name(name)
    }

    /// Writes the manifest next to an artifact the command just produced.
    pub fn write_for(&self, artifact: &Path) -> Result<(), CliError> {
        let path = Self::path_for(artifact);
        fs::write(&path, self.render()).map_err(|e| CliError::io(&path, e))
    }
}
