use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::PromptRequest;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    request: PromptRequest,
    model: String,
    response: String,
    timestamp: u64,
}

/// Response cache keyed by request fingerprint: in memory, optionally
/// mirrored to a directory of `<fingerprint>.json` files.
#[derive(Debug, Default)]
pub struct ResponseCache {
    mem: Mutex<HashMap<String, String>>,
    dir: Option<PathBuf>,
}

impl ResponseCache {
    pub fn in_memory() -> Self {
        ResponseCache::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ResponseCache { mem: Mutex::default(), dir: Some(dir) })
    }

    fn path(&self, fp: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{fp}.json")))
    }

    pub fn get(&self, fp: &str) -> Option<String> {
        if let Some(hit) = self.mem.lock().unwrap_or_else(|e| e.into_inner()).get(fp) {
            return Some(hit.clone());
        }
        let text = fs::read_to_string(self.path(fp)?).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        self.mem.lock().unwrap_or_else(|e| e.into_inner()).insert(fp.to_string(), file.response.clone());
        Some(file.response)
    }

    pub fn put(&self, fp: &str, req: &PromptRequest, model: &str, response: &str) {
        self.mem.lock().unwrap_or_else(|e| e.into_inner()).insert(fp.to_string(), response.to_string());
        if let Some(path) = self.path(fp) {
            let file = CacheFile {
                request: req.clone(),
                model: model.to_string(),
                response: response.to_string(),
                timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            };
            if let Err(e) = write_atomic(&path, &file) {
                log::warn!("cache write {} failed: {e}", path.display());
            }
        }
    }

    pub fn evict(&self, fp: &str) {
        self.mem.lock().unwrap_or_else(|e| e.into_inner()).remove(fp);
        if let Some(path) = self.path(fp) {
            let _ = fs::remove_file(path);
        }
    }
}

fn write_atomic(path: &Path, file: &CacheFile) -> std::io::Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serde_json::to_string_pretty(file)?.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}
