use std::time::Duration;

use serde_json::{json, Value};

use super::{PromptRequest, Transport, TransportError, API_KEY_ENV};

/// Generic OpenAI-style chat-completion endpoint (`POST {endpoint}/chat/completions`).
pub struct HttpTransport {
    endpoint: String,
    model: String,
    api_key: String,
    agent: ureq::Agent,
}

impl std::fmt::Debug for HttpTransport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpTransport").field("endpoint", &self.endpoint).field("model", &self.model).finish()
    }
}

impl HttpTransport {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, api_key: impl Into<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        HttpTransport { endpoint: endpoint.into(), model: model.into(), api_key: api_key.into(), agent }
    }

    /// Reads credentials from `GISTVIS_API_KEY`.
    pub fn from_env(endpoint: impl Into<String>, model: impl Into<String>) -> Result<Self, String> {
        let key = std::env::var(API_KEY_ENV).map_err(|_| format!("{API_KEY_ENV} is not set"))?;
        Ok(Self::new(endpoint, model, key, Duration::from_secs(120)))
    }

    fn url(&self) -> String {
        let base = self.endpoint.trim_end_matches('/');
        if base.ends_with("/chat/completions") {
            base.to_string()
        } else {
            format!("{base}/chat/completions")
        }
    }

    pub fn body(&self, req: &PromptRequest) -> Value {
        json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": req.system_text},
                {"role": "user", "content": req.user_text},
            ],
            "temperature": req.decoding.temperature,
            "max_tokens": req.decoding.max_output_tokens,
            "stream": false,
        })
    }
}

/// Pulls the assistant text out of a chat-completion response body.
pub(crate) fn extract_content(v: &Value) -> Option<String> {
    v.pointer("/choices/0/message/content").and_then(Value::as_str).map(str::to_string)
}

impl Transport for HttpTransport {
    fn model_id(&self) -> &str {
        &self.model
    }

    fn send(&self, req: &PromptRequest, _fingerprint: &str) -> Result<String, TransportError> {
        let resp = self
            .agent
            .post(&self.url())
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(self.body(req));
        let mut resp = match resp {
            Ok(r) => r,
            Err(ureq::Error::StatusCode(code)) if code == 429 || code >= 500 => {
                return Err(TransportError::Transient(format!("HTTP {code}")))
            }
            Err(ureq::Error::StatusCode(code)) => return Err(TransportError::Fatal(format!("HTTP {code}"))),
            Err(e) => return Err(TransportError::Transient(e.to_string())),
        };
        let body: Value = resp.body_mut().read_json().map_err(|e| TransportError::Transient(e.to_string()))?;
        extract_content(&body).ok_or_else(|| TransportError::Fatal("response has no choices[0].message.content".into()))
    }
}
