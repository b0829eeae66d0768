//! Chat-completion access for the LLM-driven stages: fingerprinting, retries
//! with exponential backoff, response caching, rate limiting, structured
//! output parsing, and a deterministic scripted backend for tests.

mod cache;
mod gateway;
mod http;
mod ratelimit;
mod scripted;
mod structured;

pub use cache::ResponseCache;
pub use gateway::{CallRecord, Completion, Gateway, GatewayError, GatewayStats, RetryPolicy};
pub use http::HttpTransport;
pub use ratelimit::RateLimiter;
pub use scripted::{Script, ScriptEntry, ScriptError, ScriptedResponse, ScriptedTransport};
pub use structured::{
    parse_boolean, parse_choice, parse_segments, parse_table, DraftRow, ExtractionDraft, Shape, Structured,
};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const API_KEY_ENV: &str = "GISTVIS_API_KEY";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Decoding {
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl Default for Decoding {
    fn default() -> Self {
        Decoding { temperature: 0.0, max_output_tokens: 1024 }
    }
}

/// One prompt for one pipeline stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PromptRequest {
    pub system_text: String,
    pub user_text: String,
    pub decoding: Decoding,
    /// Stage name, e.g. `discoverer`, `checker:trend`, `extractor:rank`.
    pub tag: String,
    /// The text the stage operates on (paragraph or segment). Scripted
    /// backends can key responses on it.
    pub subject: String,
}

impl PromptRequest {
    pub fn new(tag: impl Into<String>, subject: impl Into<String>, system_text: impl Into<String>, user_text: impl Into<String>) -> Self {
        PromptRequest {
            system_text: system_text.into(),
            user_text: user_text.into(),
            decoding: Decoding::default(),
            tag: tag.into(),
            subject: subject.into(),
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if !(self.decoding.temperature >= 0.0) {
            return Err(format!("temperature must be >= 0, got {}", self.decoding.temperature));
        }
        if self.decoding.max_output_tokens == 0 {
            return Err("max_output_tokens must be > 0".into());
        }
        Ok(())
    }
}

/// Stable hash over (system text, user text, decoding, model id).
pub fn fingerprint(req: &PromptRequest, model_id: &str) -> String {
    let mut h = Sha256::new();
    let temp = req.decoding.temperature.to_bits().to_le_bytes();
    let max = req.decoding.max_output_tokens.to_le_bytes();
    let parts: [&[u8]; 5] = [req.system_text.as_bytes(), req.user_text.as_bytes(), &temp, &max, model_id.as_bytes()];
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    /// Worth retrying: timeouts, connection resets, 429 and 5xx.
    #[error("transient transport failure: {0}")]
    Transient(String),
    /// Not worth retrying: authentication, malformed request, script miss.
    #[error("{0}")]
    Fatal(String),
}

/// Something that turns a prompt into model text.
pub trait Transport: Send + Sync {
    fn model_id(&self) -> &str;
    fn send(&self, req: &PromptRequest, fingerprint: &str) -> Result<String, TransportError>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_changes_with_every_component() {
        let base = PromptRequest::new("t", "s", "sys", "user");
        let fp = fingerprint(&base, "m");
        assert_eq!(fp, fingerprint(&base.clone(), "m"));
        let mut a = base.clone();
        a.system_text.push('!');
        let mut b = base.clone();
        b.user_text.push('!');
        let mut c = base.clone();
        c.decoding.temperature = 0.5;
        let mut d = base.clone();
        d.decoding.max_output_tokens = 7;
        for other in [fingerprint(&a, "m"), fingerprint(&b, "m"), fingerprint(&c, "m"), fingerprint(&d, "m"), fingerprint(&base, "m2")] {
            assert_ne!(fp, other);
        }
        // Concatenation ambiguity: ("ab","c") vs ("a","bc").
        let x = PromptRequest::new("t", "s", "ab", "c");
        let y = PromptRequest::new("t", "s", "a", "bc");
        assert_ne!(fingerprint(&x, "m"), fingerprint(&y, "m"));
    }

    #[test]
    fn request_invariants() {
        let mut r = PromptRequest::new("t", "s", "a", "b");
        assert!(r.check().is_ok());
        r.decoding.temperature = -0.1;
        assert!(r.check().is_err());
        r.decoding.temperature = 0.0;
        r.decoding.max_output_tokens = 0;
        assert!(r.check().is_err());
    }
}
