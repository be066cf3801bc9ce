use std::path::PathBuf;
use std::time::{Duration, Instant};

use crate::{
    Backend, GenerationRequest, GenerationResponse, HttpBackend, HttpConfig, LlmError, MockBackend,
};

/// Which backend to sample from.
#[derive(Debug, Clone, PartialEq)]
pub enum BackendConfig {
    /// Fixture-table mock; `None` answers every prompt with a template echo.
    Mock { fixtures: Option<PathBuf> },
    Http(HttpConfig),
}

impl BackendConfig {
    pub fn mock() -> Self {
        BackendConfig::Mock { fixtures: None }
    }
}

pub fn build_backend(config: &BackendConfig) -> Result<Box<dyn Backend>, LlmError> {
    match config {
        BackendConfig::Mock { fixtures: None } => Ok(Box::new(MockBackend::empty())),
        BackendConfig::Mock {
            fixtures: Some(path),
        } => Ok(Box::new(MockBackend::from_file(path)?)),
        BackendConfig::Http(http) => Ok(Box::new(HttpBackend::new(http.clone()))),
    }
}

/// One-shot convenience: build the configured backend and sample from it.
pub fn generate(
    request: &GenerationRequest,
    config: &BackendConfig,
) -> Result<GenerationResponse, LlmError> {
    build_backend(config)?.generate(request)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HealthReport {
    pub backend: String,
    pub model_id: String,
    pub latency: Duration,
}

/// Round-trips a one-token request and reports latency plus model id.
pub fn health_check(config: &BackendConfig) -> Result<HealthReport, LlmError> {
    let request = GenerationRequest::new("health check", "ping")
        .with_max_tokens(1)
        .with_samples(1);
    match config {
        BackendConfig::Http(http) => {
            let backend = HttpBackend::new(http.clone());
            let start = Instant::now();
            let (_, model) = backend.request_batch(&request, 1)?;
            Ok(HealthReport {
                backend: "http".into(),
                model_id: model.unwrap_or_else(|| http.model.clone()),
                latency: start.elapsed(),
            })
        }
        BackendConfig::Mock { .. } => {
            let backend = build_backend(config)?;
            let resp = backend.generate(&request)?;
            Ok(HealthReport {
                backend: "mock".into(),
                model_id: resp.backend_id,
                latency: resp.latency,
            })
        }
    }
}
