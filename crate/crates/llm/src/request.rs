use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::LlmError;

/// Backend-agnostic sampling envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub system_prompt: String,
    pub user_prompt: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub n_samples: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Echoed back in the response so callers never rely on arrival order.
    #[serde(default)]
    pub correlation_id: u64,
}

impl GenerationRequest {
    pub fn new(system_prompt: impl Into<String>, user_prompt: impl Into<String>) -> Self {
        Self {
            system_prompt: system_prompt.into(),
            user_prompt: user_prompt.into(),
            temperature: 0.7,
            max_tokens: 1024,
            n_samples: 1,
            stop: None,
            seed: None,
            correlation_id: 0,
        }
    }

    pub fn with_samples(mut self, n: u32) -> Self {
        self.n_samples = n;
        self
    }

    pub fn with_temperature(mut self, t: f64) -> Self {
        self.temperature = t;
        self
    }

    pub fn with_max_tokens(mut self, m: u32) -> Self {
        self.max_tokens = m;
        self
    }

    pub fn with_correlation_id(mut self, id: u64) -> Self {
        self.correlation_id = id;
        self
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.n_samples < 1 {
            return Err(LlmError::InvalidRequest("n_samples must be >= 1".into()));
        }
        if self.max_tokens < 1 {
            return Err(LlmError::InvalidRequest("max_tokens must be >= 1".into()));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(LlmError::InvalidRequest("temperature must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationResponse {
    pub completions: Vec<String>,
    pub backend_id: String,
    pub latency: Duration,
    pub correlation_id: u64,
}
