//! Backend selection and the optional JSON config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::llm::{Gateway, HttpTransport, RateLimiter, ResponseCache, RetryPolicy, Script, ScriptedTransport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendConfig {
    LiveHttp { endpoint: String, model: String },
    Scripted { script: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Live,
    Scripted,
}

/// Settings read from `--config <file>`; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub backend: Option<BackendKind>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub script: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub prompts_dir: Option<PathBuf>,
    pub concurrency: Option<usize>,
    /// Requests per second.
    pub rate_limit: Option<f64>,
    pub one_step: Option<bool>,
    pub max_rank: Option<u32>,
    pub prefer_icons: Option<bool>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading config {path}: {message}")]
    File { path: String, message: String },
    #[error("{0}")]
    Backend(String),
    #[error("cache directory {path}: {source}")]
    Cache { path: String, source: std::io::Error },
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let err = |message: String| ConfigError::File { path: path.display().to_string(), message };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| err(format!("at `{}`: {}", e.path(), e.inner())))
    }
}

/// Builds a gateway. Scripted backends retry without sleeping.
pub fn build_gateway(backend: &BackendConfig, cache_dir: Option<&Path>, rate_limit: Option<f64>) -> Result<Gateway, ConfigError> {
    let mut gateway = match backend {
        BackendConfig::LiveHttp { endpoint, model } => {
            let transport = HttpTransport::from_env(endpoint.clone(), model.clone()).map_err(ConfigError::Backend)?;
            Gateway::new(transport)
        }
        BackendConfig::Scripted { script } => {
            let script = Script::load(script).map_err(|e| ConfigError::Backend(e.to_string()))?;
            Gateway::new(ScriptedTransport::new(script)).with_retry(RetryPolicy::immediate())
        }
    };
    if let Some(dir) = cache_dir {
        let cache = ResponseCache::with_dir(dir).map_err(|source| ConfigError::Cache { path: dir.display().to_string(), source })?;
        gateway = gateway.with_cache(cache);
    }
    if let Some(rps) = rate_limit.filter(|r| *r > 0.0) {
        gateway = gateway.with_rate_limit(RateLimiter::new(rps, rps.ceil().max(1.0) as u32));
    }
    Ok(gateway)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"backend": "scripted", "concurrency": 2}"#).unwrap();
        let c = FileConfig::load(&p).unwrap();
        assert_eq!((c.backend, c.concurrency), (Some(BackendKind::Scripted), Some(2)));
        std::fs::write(&p, r#"{"model": "m", "temprature": 0}"#).unwrap();
        let e = FileConfig::load(&p).unwrap_err().to_string();
        assert!(e.contains("temprature"), "{e}");
    }

    #[test]
    fn live_backend_needs_a_key() {
        std::env::remove_var(crate::llm::API_KEY_ENV);
        let b = BackendConfig::LiveHttp { endpoint: "http://localhost:1".into(), model: "m".into() };
        assert!(matches!(build_gateway(&b, None, None), Err(ConfigError::Backend(_))));
    }
}
