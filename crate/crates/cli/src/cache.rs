//! On-disk report cache keyed by a content hash of the inputs.

use std::fs;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::report::ReportDocument;

pub const ENV_VAR: &str = "FRACTON_CACHE_DIR";

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    /// Uses `$FRACTON_CACHE_DIR`, falling back to a directory under the
    /// system temp dir. `disabled` turns the cache off.
    pub fn from_env(disabled: bool) -> Self {
        if disabled {
            return Cache { dir: None };
        }
        let dir = std::env::var_os(ENV_VAR)
            .map(PathBuf::from)
            .unwrap_or_else(|| std::env::temp_dir().join("fracton-cache"));
        Cache { dir: Some(dir) }
    }

    pub fn key(material: &str) -> String {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update([0]);
        h.update(material.as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn get(&self, key: &str) -> Option<ReportDocument> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Best effort; a read-only cache directory is not an error.
    pub fn put(&self, key: &str, report: &ReportDocument) {
        let (Some(dir), Some(path)) = (&self.dir, self.path(key)) else {
            return;
        };
        if fs::create_dir_all(dir).is_err() {
            return;
        }
        if let Ok(text) = serde_json::to_string(report) {
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            if fs::write(&tmp, text).is_ok() {
                let _ = fs::rename(&tmp, &path);
            }
        }
    }
}
