use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::{Backend, GenerationRequest, GenerationResponse, LlmError};

/// SHA-256 hex of `system ⧺ "\n" ⧺ user`, the key of mock fixture tables.
pub fn prompt_hash(system_prompt: &str, user_prompt: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(system_prompt.as_bytes());
    hasher.update(b"\n");
    hasher.update(user_prompt.as_bytes());
    hex::encode(hasher.finalize())
}

/// Prompt hash → completions, as stored in a fixture JSON file.
pub type MockFixtures = BTreeMap<String, Vec<String>>;

/// Deterministic backend answering from a fixture table.
///
/// A fixture list shorter than the requested sample count is cycled; a
/// prompt without a fixture yields identical template echoes that embed the
/// prompt hash.
#[derive(Debug, Clone, Default)]
pub struct MockBackend {
    id: String,
    fixtures: MockFixtures,
}

impl MockBackend {
    pub fn new(fixtures: MockFixtures) -> Self {
        Self {
            id: "mock".to_string(),
            fixtures,
        }
    }

    pub fn empty() -> Self {
        Self::new(MockFixtures::new())
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn from_file(path: &Path) -> Result<Self, LlmError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LlmError::Config(format!("reading {}: {e}", path.display())))?;
        let fixtures: MockFixtures = serde_json::from_str(&text)
            .map_err(|e| LlmError::Config(format!("parsing {}: {e}", path.display())))?;
        Ok(Self::new(fixtures))
    }

    pub fn insert(&mut self, system_prompt: &str, user_prompt: &str, completions: Vec<String>) {
        self.fixtures
            .insert(prompt_hash(system_prompt, user_prompt), completions);
    }

    pub fn fixtures(&self) -> &MockFixtures {
        &self.fixtures
    }

    pub fn echo(hash: &str) -> String {
        format!("# mock completion for prompt {hash}")
    }
}

impl Backend for MockBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, LlmError> {
        request.validate()?;
        let start = Instant::now();
        let hash = prompt_hash(&request.system_prompt, &request.user_prompt);
        let n = request.n_samples as usize;
        let completions = match self.fixtures.get(&hash) {
            Some(list) if list.is_empty() => {
                return Err(LlmError::Config(format!("fixture for {hash} is empty")))
            }
            Some(list) => list.iter().cycle().take(n).cloned().collect(),
            None => vec![Self::echo(&hash); n],
        };
        Ok(GenerationResponse {
            completions,
            backend_id: self.id.clone(),
            latency: start.elapsed(),
            correlation_id: request.correlation_id,
        })
    }
}
