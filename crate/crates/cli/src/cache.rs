use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::compute::ResultRecord;

/// Content-addressed store of result records, one JSON file per key.
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    /// Falls back to a disabled cache, with a warning, if `dir` is unusable.
    pub fn open(dir: &Path) -> Self {
        match fs::create_dir_all(dir).and_then(|_| probe(dir)) {
            Ok(()) => Cache { dir: Some(dir.to_path_buf()) },
            Err(e) => {
                log::warn!("cache directory {} is not writable ({e}); caching disabled", dir.display());
                Cache::disabled()
            }
        }
    }

    pub fn key(input: &str, invariant: &str, options: &str, version: &str) -> String {
        let mut h = Sha256::new();
        for part in [input, invariant, options, version] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// A stored record, or None if absent or unreadable. Corrupt entries
    /// are reported and then overwritten by the caller's next `put`.
    pub fn get(&self, key: &str) -> Option<ResultRecord> {
        let path = self.path(key)?;
        let bytes = fs::read(&path).ok()?;
        match serde_json::from_slice(&bytes) {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!("discarding corrupt cache entry {}: {e}", path.display());
                None
            }
        }
    }

    pub fn put(&self, key: &str, rec: &ResultRecord) {
        let Some(path) = self.path(key) else { return };
        if let Err(e) = write_atomic(&path, &serde_json::to_vec(rec).expect("records serialize")) {
            log::warn!("could not write cache entry {}: {e}", path.display());
        }
    }
}

fn probe(dir: &Path) -> std::io::Result<()> {
    let p = dir.join(format!(".probe-{}", std::process::id()));
    fs::write(&p, b"")?;
    fs::remove_file(p)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().expect("cache paths have a parent");
    let tmp = dir.join(format!(
        ".{}.{}.{:?}.tmp",
        path.file_name().unwrap().to_string_lossy(),
        std::process::id(),
        std::thread::current().id()
    ));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)
}
