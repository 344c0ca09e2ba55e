use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Reads input files and remembers the digest of exactly the bytes read.
#[derive(Debug, Default)]
pub struct Inputs {
    pub digests: Vec<InputDigest>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        self.digests.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(bytes)
    }

    pub fn read_string(&mut self, path: &Path) -> Result<String> {
        String::from_utf8(self.read(path)?).map_err(|_| Error::Data(format!("{} is not UTF-8 text", path.display())))
    }
}

/// Output directory whose files are written atomically (temp file + rename).
#[derive(Debug)]
pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(OutDir {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.path(name);
        let tmp = self.path(&format!(".{name}.tmp"));
        let result = (|| {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(bytes)?;
            f.sync_all()?;
            fs::rename(&tmp, &target)
        })();
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            return Err(Error::io(&target, e));
        }
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_owned());
        }
        Ok(())
    }

    /// Write `manifest.json` listing everything written so far.
    pub fn finish<C: Serialize>(mut self, command: &str, config: &C, seed: Option<u64>, inputs: Inputs) -> Result<Vec<String>> {
        let manifest = RunManifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config: serde_json::to_value(config)?,
            seeds: seed.map(|s| serde_json::json!({ "seed": s })),
            inputs: inputs.digests,
            outputs: self.written.clone(),
        };
        let mut text = serde_json::to_vec_pretty(&manifest)?;
        text.push(b'\n');
        self.write("manifest.json", &text)?;
        Ok(self.written)
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    version: &'a str,
    config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seeds: Option<serde_json::Value>,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
}
