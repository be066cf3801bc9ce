//! Client for chat-completions compatible inference servers.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use ureq::Agent;

use crate::{Backend, GenerationRequest, GenerationResponse, InFlightLimit, LlmError, RetryPolicy};

pub const API_KEY_ENV: &str = "PLAUSCHECK_API_KEY";
pub const BASE_URL_ENV: &str = "PLAUSCHECK_BASE_URL";

#[derive(Debug, Clone, PartialEq)]
pub struct HttpConfig {
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub retry: RetryPolicy,
    pub timeout: Duration,
    pub max_in_flight: usize,
}

impl HttpConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model: model.into(),
            api_key: None,
            retry: RetryPolicy::default(),
            timeout: Duration::from_secs(120),
            max_in_flight: 4,
        }
    }

    pub fn with_api_key(mut self, key: Option<String>) -> Self {
        self.api_key = key;
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn endpoint(&self) -> String {
        format!("{}/v1/chat/completions", self.base_url.trim_end_matches('/'))
    }

    pub fn host(&self) -> String {
        let rest = self
            .base_url
            .split_once("://")
            .map(|(_, r)| r)
            .unwrap_or(&self.base_url);
        rest.split('/').next().unwrap_or(rest).to_string()
    }
}

#[derive(Debug, Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: [WireMessage<'a>; 2],
    temperature: f64,
    max_tokens: u32,
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    stop: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Debug, Serialize)]
struct WireMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Debug, Deserialize)]
struct WireResponse {
    #[serde(default)]
    model: Option<String>,
    choices: Vec<WireChoice>,
}

#[derive(Debug, Deserialize)]
struct WireChoice {
    #[serde(default)]
    index: Option<u32>,
    message: WireChoiceMessage,
}

#[derive(Debug, Deserialize)]
struct WireChoiceMessage {
    #[serde(default)]
    content: Option<String>,
}

enum Failure {
    Transient(LlmError),
    Fatal(LlmError),
}

pub struct HttpBackend {
    config: HttpConfig,
    agent: Agent,
    limit: InFlightLimit,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Self {
        let agent: Agent = Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        let limit = InFlightLimit::new(config.max_in_flight);
        Self {
            config,
            agent,
            limit,
        }
    }

    pub fn config(&self) -> &HttpConfig {
        &self.config
    }

    /// Sends one batch request with retries. Returns the completions and the
    /// model id reported by the server.
    pub(crate) fn request_batch(
        &self,
        request: &GenerationRequest,
        n: u32,
    ) -> Result<(Vec<String>, Option<String>), LlmError> {
        let policy = &self.config.retry;
        let mut last = None;
        for attempt in 0..policy.max_attempts() {
            if attempt > 0 {
                let delay = policy.delay(attempt - 1);
                log::warn!(
                    "retrying {} in {:?} (attempt {}/{})",
                    self.config.endpoint(),
                    delay,
                    attempt + 1,
                    policy.max_attempts()
                );
                std::thread::sleep(delay);
            }
            match self.attempt(request, n) {
                Ok(out) => return Ok(out),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Transient(e)) => last = Some(e),
            }
        }
        match last {
            // A host that never answered stays a network error.
            Some(e @ LlmError::Network { .. }) => Err(e),
            Some(e) => Err(LlmError::Exhausted {
                attempts: policy.max_attempts(),
                last: e.to_string(),
            }),
            None => Err(LlmError::Exhausted {
                attempts: 0,
                last: "no attempts allowed".into(),
            }),
        }
    }

    fn attempt(
        &self,
        request: &GenerationRequest,
        n: u32,
    ) -> Result<(Vec<String>, Option<String>), Failure> {
        let body = WireRequest {
            model: &self.config.model,
            messages: [
                WireMessage {
                    role: "system",
                    content: &request.system_prompt,
                },
                WireMessage {
                    role: "user",
                    content: &request.user_prompt,
                },
            ],
            temperature: request.temperature,
            max_tokens: request.max_tokens,
            n,
            stop: request.stop.as_deref(),
            seed: request.seed,
        };
        let payload = serde_json::to_string(&body)
            .map_err(|e| Failure::Fatal(LlmError::Protocol(e.to_string())))?;

        let mut req = self
            .agent
            .post(&self.config.endpoint())
            .header("Content-Type", "application/json");
        if let Some(key) = &self.config.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }

        let host = self.config.host();
        let mut resp = match req.send(payload.as_str()) {
            Ok(r) => r,
            Err(e) => return Err(classify_transport(e, &host)),
        };
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| classify_transport(e, &host))?;

        match status {
            200..=299 => parse_completions(&text).map_err(Failure::Fatal),
            401 | 403 => Err(Failure::Fatal(LlmError::Auth { host, status })),
            429 | 500..=599 => Err(Failure::Transient(LlmError::Protocol(format!(
                "HTTP {status} from {host}"
            )))),
            _ => Err(Failure::Fatal(LlmError::Protocol(format!(
                "HTTP {status} from {host}: {}",
                truncate(&text, 200)
            )))),
        }
    }
}

fn classify_transport(e: ureq::Error, host: &str) -> Failure {
    match e {
        ureq::Error::Io(_)
        | ureq::Error::HostNotFound
        | ureq::Error::ConnectionFailed
        | ureq::Error::Timeout(_) => Failure::Transient(LlmError::Network {
            host: host.to_string(),
            message: e.to_string(),
        }),
        ureq::Error::BadUri(m) => Failure::Fatal(LlmError::Config(format!("bad URL: {m}"))),
        other => Failure::Fatal(LlmError::Protocol(other.to_string())),
    }
}

fn parse_completions(text: &str) -> Result<(Vec<String>, Option<String>), LlmError> {
    let wire: WireResponse = serde_json::from_str(text)
        .map_err(|e| LlmError::Protocol(format!("malformed response body: {e}")))?;
    let mut choices = wire.choices;
    choices.sort_by_key(|c| c.index.unwrap_or(0));
    let completions = choices
        .into_iter()
        .map(|c| c.message.content.unwrap_or_default())
        .collect();
    Ok((completions, wire.model))
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

impl Backend for HttpBackend {
    fn id(&self) -> &str {
        &self.config.model
    }

    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, LlmError> {
        request.validate()?;
        let _permit = self.limit.acquire();
        let start = Instant::now();
        let want = request.n_samples as usize;
        let mut completions = Vec::with_capacity(want);
        // Some servers ignore `n`; top up with further batches.
        while completions.len() < want {
            let missing = (want - completions.len()) as u32;
            let (batch, _) = self.request_batch(request, missing)?;
            if batch.is_empty() {
                return Err(LlmError::Protocol("response contained no choices".into()));
            }
            completions.extend(batch);
        }
        completions.truncate(want);
        Ok(GenerationResponse {
            completions,
            backend_id: self.config.model.clone(),
            latency: start.elapsed(),
            correlation_id: request.correlation_id,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_and_host() {
        let c = HttpConfig::new("http://localhost:8080/", "m");
        assert_eq!(c.endpoint(), "http://localhost:8080/v1/chat/completions");
        assert_eq!(c.host(), "localhost:8080");
    }

    #[test]
    fn request_body_shape() {
        let body = WireRequest {
            model: "m",
            messages: [
                WireMessage {
                    role: "system",
                    content: "s",
                },
                WireMessage {
                    role: "user",
                    content: "u",
                },
            ],
            temperature: 0.5,
            max_tokens: 7,
            n: 3,
            stop: Some(&["END".to_string()]),
            seed: None,
        };
        let v: serde_json::Value = serde_json::to_value(&body).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "model": "m",
                "messages": [{"role": "system", "content": "s"}, {"role": "user", "content": "u"}],
                "temperature": 0.5,
                "max_tokens": 7,
                "n": 3,
                "stop": ["END"]
            })
        );
    }

    #[test]
    fn choices_are_ordered_by_index() {
        let (c, model) = parse_completions(
            r#"{"model":"x","choices":[{"index":1,"message":{"content":"b"}},{"index":0,"message":{"content":"a"}}]}"#,
        )
        .unwrap();
        assert_eq!(c, vec!["a", "b"]);
        assert_eq!(model.as_deref(), Some("x"));
    }

    #[test]
    fn garbage_body_is_protocol_error() {
        assert!(matches!(
            parse_completions("<html>oops"),
            Err(LlmError::Protocol(_))
        ));
    }
}
