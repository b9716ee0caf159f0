//! Remote generation backend.
//!
//! One `POST {endpoint}/generate` per batch with body
//! `{"inputs": [...], "task": "asqp", "decoding": "greedy"}`; a `200`
//! response must carry `{"outputs": [...]}` with one output per input.
//! Transport failures, timeouts, `429` and `5xx` are retried with
//! exponential backoff; any other status, or an arity mismatch, is a
//! protocol error.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use asqp_core::backend::{GenerationRequest, GeneratorBackend};
use ureq::Agent;

use crate::records::{GenerateRequestBody, GenerateResponseBody};

pub const ENDPOINT_ENV: &str = "ASQP_ENDPOINT";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HttpError {
    #[error("connection to {url} failed after {attempts} attempt(s): {message}")]
    Connection { url: String, attempts: usize, message: String },
    #[error("request to {url} timed out after {attempts} attempt(s)")]
    Timeout { url: String, attempts: usize },
    #[error("protocol error from {url}: {message}")]
    Protocol { url: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpConfig {
    /// Base URL, e.g. `http://127.0.0.1:8080`; `/generate` is appended.
    pub endpoint: String,
    pub max_batch: usize,
    /// Retries after the first attempt.
    pub retries: usize,
    pub backoff: Duration,
    pub timeout: Duration,
    pub max_in_flight: usize,
}

impl HttpConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpConfig {
            endpoint: endpoint.into(),
            max_batch: 32,
            retries: 3,
            backoff: Duration::from_millis(200),
            timeout: Duration::from_secs(120),
            max_in_flight: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HttpBackend {
    config: HttpConfig,
    url: String,
    agent: Agent,
}

type BatchResult = Result<Vec<String>, HttpError>;

enum Attempt {
    Retry(HttpError),
    Fail(HttpError),
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Self {
        let url = format!("{}/generate", config.endpoint.trim_end_matches('/'));
        let agent: Agent =
            Agent::config_builder().http_status_as_error(false).timeout_global(Some(config.timeout)).build().into();
        HttpBackend { config, url, agent }
    }

    pub fn config(&self) -> &HttpConfig {
        &self.config
    }

    fn post_batch(&self, inputs: &[String], task: &str) -> Result<Vec<String>, HttpError> {
        let body = serde_json::to_string(&GenerateRequestBody {
            inputs: inputs.to_vec(),
            task: task.into(),
            decoding: "greedy".into(),
        })
        .expect("serializable request");
        let attempts = self.config.retries + 1;
        let mut delay = self.config.backoff;
        let mut last = None;
        for attempt in 1..=attempts {
            match self.attempt(&body, inputs.len(), attempt) {
                Ok(outputs) => return Ok(outputs),
                Err(Attempt::Fail(e)) => return Err(e),
                Err(Attempt::Retry(e)) => last = Some(e),
            }
            if attempt < attempts {
                thread::sleep(delay);
                delay = delay.saturating_mul(2);
            }
        }
        Err(last.expect("at least one attempt"))
    }

    fn attempt(&self, body: &str, n_inputs: usize, attempt: usize) -> Result<Vec<String>, Attempt> {
        let url = self.url.clone();
        let protocol = |message: String| Attempt::Fail(HttpError::Protocol { url: url.clone(), message });
        let mut response = match self.agent.post(&self.url).header("Content-Type", "application/json").send(body) {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => return Err(Attempt::Retry(HttpError::Timeout { url, attempts: attempt })),
            Err(e @ (ureq::Error::Io(_) | ureq::Error::ConnectionFailed | ureq::Error::HostNotFound)) => {
                return Err(Attempt::Retry(HttpError::Connection { url, attempts: attempt, message: e.to_string() }))
            }
            Err(e) => return Err(protocol(e.to_string())),
        };
        let status = response.status().as_u16();
        if status == 429 || (500..600).contains(&status) {
            return Err(Attempt::Retry(HttpError::Connection {
                url,
                attempts: attempt,
                message: format!("server answered {status}"),
            }));
        }
        if status != 200 {
            return Err(protocol(format!("unexpected status {status}")));
        }
        let text = match response.body_mut().read_to_string() {
            Ok(t) => t,
            Err(ureq::Error::Timeout(_)) => return Err(Attempt::Retry(HttpError::Timeout { url, attempts: attempt })),
            Err(e) => return Err(protocol(format!("unreadable body: {e}"))),
        };
        let parsed: GenerateResponseBody =
            serde_json::from_str(&text).map_err(|e| protocol(format!("invalid response body: {e}")))?;
        if parsed.outputs.len() != n_inputs {
            return Err(protocol(format!("{} outputs for {n_inputs} inputs", parsed.outputs.len())));
        }
        Ok(parsed.outputs)
    }
}

impl GeneratorBackend for HttpBackend {
    type Error = HttpError;

    /// Sends batches of at most `max_batch` inputs, with at most
    /// `max_in_flight` outstanding requests, and reassembles outputs in order.
    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>, HttpError> {
        let batches: Vec<&[String]> = request.inputs().chunks(self.config.max_batch.max(1)).collect();
        let task = request.task().as_str();
        let results: Mutex<Vec<Option<BatchResult>>> = Mutex::new(vec![None; batches.len()]);
        let next = AtomicUsize::new(0);
        let workers = self.config.max_in_flight.clamp(1, batches.len().max(1));
        thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(batch) = batches.get(i) else { break };
                    let outcome = self.post_batch(batch, task);
                    let failed = outcome.is_err();
                    results.lock().expect("no poisoned lock")[i] = Some(outcome);
                    if failed {
                        // stop handing out batches once one has failed
                        next.store(batches.len(), Ordering::SeqCst);
                    }
                });
            }
        });
        let mut outputs = Vec::with_capacity(request.inputs().len());
        for slot in results.into_inner().expect("no poisoned lock") {
            match slot {
                Some(Ok(batch)) => outputs.extend(batch),
                Some(Err(e)) => return Err(e),
                // skipped after an earlier failure; that failure is reported first
                None => continue,
            }
        }
        Ok(outputs)
    }
}
