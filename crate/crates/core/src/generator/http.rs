use std::thread;
use std::time::Duration;

use ureq::Agent;

use super::{GenRequest, GenResponse, Generator, HealthResponse};
use crate::error::{Error, Result};

const EXCERPT_CHARS: usize = 200;

/// Attempts and exponential backoff for transient failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub initial_backoff: Duration,
    pub timeout: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            initial_backoff: Duration::from_millis(200),
            timeout: Duration::from_secs(60),
        }
    }
}

/// Client for the generator wire protocol (`POST /v1/generate`,
/// `GET /v1/health`).
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    base_url: String,
    agent: Agent,
    retry: RetryPolicy,
}

enum Failure {
    Transient(String),
    Fatal(Error),
}

fn excerpt(body: &str) -> String {
    body.chars().take(EXCERPT_CHARS).collect()
}

impl HttpGenerator {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self::with_retry(base_url, RetryPolicy::default())
    }

    pub fn with_retry(base_url: impl Into<String>, retry: RetryPolicy) -> Self {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(retry.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpGenerator {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            agent,
            retry,
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    fn with_retries<T>(&self, mut call: impl FnMut() -> Result<T, Failure>) -> Result<T> {
        let mut backoff = self.retry.initial_backoff;
        let attempts = self.retry.attempts.max(1);
        let mut last = String::new();
        for attempt in 1..=attempts {
            match call() {
                Ok(v) => return Ok(v),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Transient(message)) => {
                    log::warn!("generator attempt {attempt}/{attempts} failed: {message}");
                    last = message;
                    if attempt < attempts {
                        thread::sleep(backoff);
                        backoff *= 2;
                    }
                }
            }
        }
        Err(Error::Transport { attempts, message: last })
    }

    fn classify(status: u16, body: String) -> Result<String, Failure> {
        match status {
            200 => Ok(body),
            429 | 500..=599 => Err(Failure::Transient(format!("HTTP {status}"))),
            _ => Err(Failure::Fatal(Error::Protocol {
                message: format!("unexpected HTTP status {status}"),
                excerpt: excerpt(&body),
            })),
        }
    }

    /// `GET /v1/health`; succeeds only on `{"status":"ok"}`.
    pub fn health(&self) -> Result<()> {
        let url = format!("{}/v1/health", self.base_url);
        let body = self.with_retries(|| {
            let mut resp = self.agent.get(&url).call().map_err(|e| Failure::Transient(e.to_string()))?;
            let status = resp.status().as_u16();
            let body = resp.body_mut().read_to_string().map_err(|e| Failure::Transient(e.to_string()))?;
            Self::classify(status, body)
        })?;
        let parsed: HealthResponse = serde_json::from_str(&body).map_err(|e| Error::Protocol {
            message: format!("bad health response: {e}"),
            excerpt: excerpt(&body),
        })?;
        if parsed.status == "ok" {
            Ok(())
        } else {
            Err(Error::Protocol {
                message: format!("generator reports status {:?}", parsed.status),
                excerpt: excerpt(&body),
            })
        }
    }
}

impl Generator for HttpGenerator {
    fn id(&self) -> String {
        format!("http:{}", self.base_url)
    }

    fn generate(&self, request: &GenRequest) -> Result<Vec<String>> {
        request.validate()?;
        let url = format!("{}/v1/generate", self.base_url);
        let payload = serde_json::to_vec(request)?;
        let body = self.with_retries(|| {
            let mut resp = self
                .agent
                .post(&url)
                .header("content-type", "application/json")
                .send(&payload[..])
                .map_err(|e| Failure::Transient(e.to_string()))?;
            let status = resp.status().as_u16();
            let body = resp.body_mut().read_to_string().map_err(|e| Failure::Transient(e.to_string()))?;
            Self::classify(status, body)
        })?;
        let parsed: GenResponse = serde_json::from_str(&body).map_err(|e| Error::Protocol {
            message: format!("bad generate response: {e}"),
            excerpt: excerpt(&body),
        })?;
        if parsed.sentences.len() != request.num_candidates as usize {
            return Err(Error::Protocol {
                message: format!(
                    "asked for {} candidates, got {}",
                    request.num_candidates,
                    parsed.sentences.len()
                ),
                excerpt: excerpt(&body),
            });
        }
        Ok(parsed.sentences)
    }
}
