use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use super::structured::parse_shape;
use super::{fingerprint, PromptRequest, RateLimiter, ResponseCache, Shape, Structured, Transport, TransportError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    /// Transport retries after the first attempt.
    pub transport_retries: u32,
    pub base_delay: Duration,
    /// Re-prompts after an unparseable structured answer.
    pub structured_reprompts: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { transport_retries: 3, base_delay: Duration::from_millis(500), structured_reprompts: 2 }
    }
}

impl RetryPolicy {
    /// Same budgets, no sleeping. For tests and scripted runs.
    pub fn immediate() -> Self {
        RetryPolicy { base_delay: Duration::ZERO, ..RetryPolicy::default() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("[{tag}] backend exhausted after {attempts} attempts: {last}")]
    Exhausted { tag: String, attempts: u32, last: String },
    #[error("[{tag}] {message}")]
    Backend { tag: String, message: String },
    #[error("[{tag}] unparseable model output after {attempts} attempts: {last_response:?}")]
    Structured { tag: String, attempts: u32, last_response: String },
    #[error("[{tag}] invalid request: {message}")]
    InvalidRequest { tag: String, message: String },
}

impl GatewayError {
    pub fn tag(&self) -> &str {
        match self {
            GatewayError::Exhausted { tag, .. }
            | GatewayError::Backend { tag, .. }
            | GatewayError::Structured { tag, .. }
            | GatewayError::InvalidRequest { tag, .. } => tag,
        }
    }

    pub fn is_exhaustion(&self) -> bool {
        matches!(self, GatewayError::Exhausted { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub fingerprint: String,
    /// Transport attempts spent (0 on a cache hit).
    pub attempts: u32,
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallRecord {
    pub tag: String,
    pub fingerprint: String,
    pub response: Option<String>,
    pub latency: Duration,
    pub attempts: u32,
    pub cached: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GatewayStats {
    /// Calls to `complete` (each structured re-prompt counts).
    pub requests: u64,
    pub transport_attempts: u64,
    pub cache_hits: u64,
}

/// Thread-safe front door to a language model backend.
pub struct Gateway {
    transport: Box<dyn Transport>,
    cache: ResponseCache,
    limiter: Option<RateLimiter>,
    retry: RetryPolicy,
    requests: AtomicU64,
    attempts: AtomicU64,
    hits: AtomicU64,
    log: Mutex<Vec<CallRecord>>,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway").field("model", &self.transport.model_id()).field("retry", &self.retry).finish()
    }
}

impl Gateway {
    pub fn new(transport: impl Transport + 'static) -> Self {
        Gateway {
            transport: Box::new(transport),
            cache: ResponseCache::in_memory(),
            limiter: None,
            retry: RetryPolicy::default(),
            requests: AtomicU64::new(0),
            attempts: AtomicU64::new(0),
            hits: AtomicU64::new(0),
            log: Mutex::default(),
        }
    }

    pub fn with_cache(mut self, cache: ResponseCache) -> Self {
        self.cache = cache;
        self
    }

    pub fn with_rate_limit(mut self, limiter: RateLimiter) -> Self {
        self.limiter = Some(limiter);
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn model_id(&self) -> &str {
        self.transport.model_id()
    }

    pub fn stats(&self) -> GatewayStats {
        GatewayStats {
            requests: self.requests.load(Ordering::SeqCst),
            transport_attempts: self.attempts.load(Ordering::SeqCst),
            cache_hits: self.hits.load(Ordering::SeqCst),
        }
    }

    pub fn records(&self) -> Vec<CallRecord> {
        self.log.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    fn record(&self, rec: CallRecord) {
        log::debug!(
            "llm call tag={} fp={} cached={} attempts={} latency={:?}",
            rec.tag,
            &rec.fingerprint[..12.min(rec.fingerprint.len())],
            rec.cached,
            rec.attempts,
            rec.latency
        );
        self.log.lock().unwrap_or_else(|e| e.into_inner()).push(rec);
    }

    pub fn complete(&self, req: &PromptRequest) -> Result<String, GatewayError> {
        self.complete_with_meta(req).map(|c| c.text)
    }

    /// Raw model text. Deterministic (temperature 0) requests are served
    /// from the cache when possible; transient failures are retried with
    /// exponential backoff.
    pub fn complete_with_meta(&self, req: &PromptRequest) -> Result<Completion, GatewayError> {
        self.requests.fetch_add(1, Ordering::SeqCst);
        req.check().map_err(|message| GatewayError::InvalidRequest { tag: req.tag.clone(), message })?;
        let fp = fingerprint(req, self.transport.model_id());
        let cacheable = req.decoding.temperature == 0.0;
        let started = Instant::now();

        if cacheable {
            if let Some(text) = self.cache.get(&fp) {
                self.hits.fetch_add(1, Ordering::SeqCst);
                self.record(CallRecord {
                    tag: req.tag.clone(),
                    fingerprint: fp.clone(),
                    response: Some(text.clone()),
                    latency: started.elapsed(),
                    attempts: 0,
                    cached: true,
                });
                return Ok(Completion { text, fingerprint: fp, attempts: 0, cached: true });
            }
        }

        let max_attempts = self.retry.transport_retries + 1;
        let mut attempt = 0;
        loop {
            attempt += 1;
            if let Some(l) = &self.limiter {
                l.acquire();
            }
            self.attempts.fetch_add(1, Ordering::SeqCst);
            let outcome = self.transport.send(req, &fp);
            let rec = |response: Option<String>| CallRecord {
                tag: req.tag.clone(),
                fingerprint: fp.clone(),
                response,
                latency: started.elapsed(),
                attempts: attempt,
                cached: false,
            };
            match outcome {
                Ok(text) => {
                    if cacheable {
                        self.cache.put(&fp, req, self.transport.model_id(), &text);
                    }
                    self.record(rec(Some(text.clone())));
                    return Ok(Completion { text, fingerprint: fp, attempts: attempt, cached: false });
                }
                Err(TransportError::Transient(msg)) if attempt < max_attempts => {
                    log::warn!("[{}] attempt {attempt} failed: {msg}", req.tag);
                    let delay = self.retry.base_delay.saturating_mul(1 << (attempt - 1).min(16));
                    if !delay.is_zero() {
                        thread::sleep(delay);
                    }
                }
                Err(TransportError::Transient(last)) => {
                    self.record(rec(None));
                    return Err(GatewayError::Exhausted { tag: req.tag.clone(), attempts: attempt, last });
                }
                Err(TransportError::Fatal(message)) => {
                    self.record(rec(None));
                    return Err(GatewayError::Backend { tag: req.tag.clone(), message });
                }
            }
        }
    }

    /// Model text parsed into `shape`. Unparseable answers are evicted from
    /// the cache and re-prompted with a corrective suffix.
    pub fn complete_structured(&self, req: &PromptRequest, shape: &Shape) -> Result<Structured, GatewayError> {
        self.complete_structured_raw(req, shape).map(|(v, _)| v)
    }

    /// Like [`Gateway::complete_structured`], also returning the raw text
    /// of the answer that parsed.
    pub fn complete_structured_raw(&self, req: &PromptRequest, shape: &Shape) -> Result<(Structured, String), GatewayError> {
        let mut current = req.clone();
        let mut last = String::new();
        let total = self.retry.structured_reprompts + 1;
        for attempt in 1..=total {
            let c = self.complete_with_meta(&current)?;
            if let Some(parsed) = parse_shape(&c.text, shape) {
                return Ok((parsed, c.text));
            }
            self.cache.evict(&c.fingerprint);
            last = c.text;
            if attempt == 1 {
                current.user_text.push_str(&shape.corrective_suffix());
            }
        }
        Err(GatewayError::Structured { tag: req.tag.clone(), attempts: total, last_response: last })
    }
}
