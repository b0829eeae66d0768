use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{PromptRequest, Transport, TransportError};
use crate::text::normalize_ws;

/// A canned reply: model text, or an injected transport failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScriptedResponse {
    Text(String),
    Fail { fail: String },
}

/// One scripted rule. Matched by `fingerprint` if given, otherwise by `tag`
/// plus `subject`; a rule with a tag and no subject matches every subject of
/// that tag. Successive calls walk `responses`, repeating the last one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub responses: Vec<ScriptedResponse>,
}

impl ScriptEntry {
    pub fn for_subject(tag: &str, subject: &str, responses: &[&str]) -> Self {
        ScriptEntry {
            fingerprint: None,
            tag: Some(tag.to_string()),
            subject: Some(subject.to_string()),
            responses: responses.iter().map(|r| ScriptedResponse::Text(r.to_string())).collect(),
        }
    }

    pub fn for_tag(tag: &str, responses: &[&str]) -> Self {
        ScriptEntry { subject: None, ..ScriptEntry::for_subject(tag, "", responses) }
    }

    pub fn with_responses(mut self, responses: Vec<ScriptedResponse>) -> Self {
        self.responses = responses;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Script {
    #[serde(default = "default_model")]
    pub model: String,
    pub entries: Vec<ScriptEntry>,
}

fn default_model() -> String {
    "scripted".into()
}

#[derive(Debug, thiserror::Error)]
pub enum ScriptError {
    #[error("reading script {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing script at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("script entry {0} has neither a fingerprint nor a tag, or has no responses")]
    Entry(usize),
}

impl Script {
    pub fn new(entries: Vec<ScriptEntry>) -> Self {
        Script { model: default_model(), entries }
    }

    pub fn from_json(text: &str) -> Result<Self, ScriptError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let script: Script = serde_path_to_error::deserialize(de)
            .map_err(|e| ScriptError::Parse { path: e.path().to_string(), message: e.inner().to_string() })?;
        for (i, e) in script.entries.iter().enumerate() {
            if (e.fingerprint.is_none() && e.tag.is_none()) || e.responses.is_empty() {
                return Err(ScriptError::Entry(i));
            }
        }
        Ok(script)
    }

    pub fn load(path: &Path) -> Result<Self, ScriptError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ScriptError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }
}

/// Deterministic backend replaying a [`Script`]. A request no rule matches is
/// a configuration error, never retried.
#[derive(Debug)]
pub struct ScriptedTransport {
    script: Script,
    cursors: Mutex<HashMap<usize, usize>>,
}

impl ScriptedTransport {
    pub fn new(script: Script) -> Self {
        ScriptedTransport { script, cursors: Mutex::default() }
    }

    fn find(&self, req: &PromptRequest, fp: &str) -> Option<usize> {
        let entries = &self.script.entries;
        let subject = normalize_ws(&req.subject);
        entries
            .iter()
            .position(|e| e.fingerprint.as_deref() == Some(fp))
            .or_else(|| {
                entries.iter().position(|e| {
                    e.tag.as_deref() == Some(req.tag.as_str())
                        && e.subject.as_deref().map(normalize_ws).as_deref() == Some(subject.as_str())
                })
            })
            .or_else(|| {
                entries
                    .iter()
                    .position(|e| e.fingerprint.is_none() && e.subject.is_none() && e.tag.as_deref() == Some(req.tag.as_str()))
            })
    }
}

impl Transport for ScriptedTransport {
    fn model_id(&self) -> &str {
        &self.script.model
    }

    fn send(&self, req: &PromptRequest, fp: &str) -> Result<String, TransportError> {
        let idx = self.find(req, fp).ok_or_else(|| {
            TransportError::Fatal(format!("scripted backend has no response for tag `{}` (fingerprint {fp})", req.tag))
        })?;
        let responses = &self.script.entries[idx].responses;
        let step = {
            let mut cursors = self.cursors.lock().unwrap_or_else(|e| e.into_inner());
            let c = cursors.entry(idx).or_insert(0);
            let step = *c;
            *c += 1;
            step
        };
        match &responses[step.min(responses.len() - 1)] {
            ScriptedResponse::Text(t) => Ok(t.clone()),
            ScriptedResponse::Fail { fail } => Err(TransportError::Transient(fail.clone())),
        }
    }
}
