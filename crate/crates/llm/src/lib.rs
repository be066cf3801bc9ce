//! Completion sampling backends.
//!
//! Every consumer talks to a [`Backend`]: either the chat-completions
//! [`HttpBackend`] for a live inference server or the [`MockBackend`], which
//! answers from a fixture table keyed by prompt hash and is bit-deterministic.

mod config;
mod error;
mod http;
mod limit;
mod mock;
mod request;
mod retry;

pub use config::{build_backend, generate, health_check, BackendConfig, HealthReport};
pub use error::LlmError;
pub use http::{HttpBackend, HttpConfig, API_KEY_ENV, BASE_URL_ENV};
pub use limit::InFlightLimit;
pub use mock::{prompt_hash, MockBackend, MockFixtures};
pub use request::{GenerationRequest, GenerationResponse};
pub use retry::RetryPolicy;

/// A source of sampled completions.
///
/// Implementations must be shareable across threads; the harness issues
/// requests for several tasks concurrently.
pub trait Backend: Send + Sync {
    /// Stable identifier reported in result tables (model or fixture name).
    fn id(&self) -> &str;

    /// Returns exactly `request.n_samples` completions or an error.
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, LlmError>;
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, LlmError> {
        (**self).generate(request)
    }
}

impl<B: Backend + ?Sized> Backend for std::sync::Arc<B> {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, LlmError> {
        (**self).generate(request)
    }
}
