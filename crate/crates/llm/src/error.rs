use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LlmError {
    #[error("network error talking to {host}: {message}")]
    Network { host: String, message: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("authentication rejected by {host} (HTTP {status})")]
    Auth { host: String, status: u16 },

    #[error("backend exhausted after {attempts} attempts: {last}")]
    Exhausted { attempts: u32, last: String },

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("backend configuration error: {0}")]
    Config(String),
}

impl LlmError {
    /// Whether the failure is worth another attempt under the retry policy.
    pub fn is_transient(&self) -> bool {
        matches!(self, LlmError::Network { .. })
    }
}
