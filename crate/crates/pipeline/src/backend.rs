//! The completion backend contract and its three implementations: a remote
//! HTTP chat-completion client, a deterministic replaying mock, and a
//! recording wrapper that captures fixtures from live runs.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{BackendError, Stage};

/// Name of the environment variable holding the API key for the HTTP backend.
pub const API_KEY_ENV: &str = "NOMAD_API_KEY";

/// One completion request. Temperature must be ≥ 0 and max_tokens > 0;
/// both are validated at configuration time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmRequest {
    pub system_prompt: String,
    pub user_prompt: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

/// A completion backend. Implementations must be safe for concurrent calls;
/// the stage identity is passed alongside the request so replay fixtures can
/// be keyed by (stage, prompt).
pub trait LlmBackend: Send + Sync {
    fn complete(&self, stage: Stage, request: &LlmRequest) -> Result<String, BackendError>;
}

/// Stable fixture file name for a (stage, prompt) pair:
/// `{stage}-{sha256(stage, system, user)}.txt`.
pub fn fixture_file_name(stage: Stage, request: &LlmRequest) -> String {
    let mut hasher = Sha256::new();
    hasher.update(stage.slug().as_bytes());
    hasher.update([0]);
    hasher.update(request.system_prompt.as_bytes());
    hasher.update([0]);
    hasher.update(request.user_prompt.as_bytes());
    format!("{}-{:x}.txt", stage.slug(), hasher.finalize())
}

/// Replays recorded responses from a fixture directory. Referentially
/// transparent: the same request always yields the same response, and the
/// directory is never written.
#[derive(Debug, Clone)]
pub struct MockBackend {
    dir: PathBuf,
}

impl MockBackend {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        MockBackend { dir: dir.into() }
    }
}

impl LlmBackend for MockBackend {
    fn complete(&self, stage: Stage, request: &LlmRequest) -> Result<String, BackendError> {
        let path = self.dir.join(fixture_file_name(stage, request));
        std::fs::read_to_string(&path).map_err(|source| {
            if source.kind() == std::io::ErrorKind::NotFound {
                BackendError::MissingFixture {
                    stage: stage.slug().to_string(),
                    path,
                }
            } else {
                BackendError::Io { path, source }
            }
        })
    }
}

/// Wraps another backend and writes every response into a fixture directory,
/// so that live runs can later be replayed through [`MockBackend`].
pub struct RecordingBackend<B> {
    inner: B,
    dir: PathBuf,
}

impl<B: LlmBackend> RecordingBackend<B> {
    pub fn new(inner: B, dir: impl Into<PathBuf>) -> Self {
        RecordingBackend {
            inner,
            dir: dir.into(),
        }
    }
}

impl<B: LlmBackend> LlmBackend for RecordingBackend<B> {
    fn complete(&self, stage: Stage, request: &LlmRequest) -> Result<String, BackendError> {
        let response = self.inner.complete(stage, request)?;
        let path = self.dir.join(fixture_file_name(stage, request));
        std::fs::create_dir_all(&self.dir).map_err(|source| BackendError::Io {
            path: self.dir.clone(),
            source,
        })?;
        std::fs::write(&path, &response)
            .map_err(|source| BackendError::Io { path, source })?;
        Ok(response)
    }
}

/// JSON chat-completion client. The endpoint URL and model name come from
/// configuration; the API key comes from [`API_KEY_ENV`].
pub struct HttpBackend {
    endpoint: String,
    model: String,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        api_key: impl Into<String>,
    ) -> Self {
        HttpBackend {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key: api_key.into(),
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(180))
                .build()
                .expect("default tls backend"),
        }
    }

    pub fn from_env(
        endpoint: impl Into<String>,
        model: impl Into<String>,
    ) -> Result<Self, BackendError> {
        let api_key = std::env::var(API_KEY_ENV)
            .map_err(|_| BackendError::MissingApiKey(API_KEY_ENV.to_string()))?;
        Ok(HttpBackend::new(endpoint, model, api_key))
    }
}

impl LlmBackend for HttpBackend {
    fn complete(&self, _stage: Stage, request: &LlmRequest) -> Result<String, BackendError> {
        let body = json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_prompt},
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| BackendError::Http(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            let text = response.text().unwrap_or_default();
            return Err(BackendError::Http(format!(
                "{} returned {status}: {}",
                self.endpoint,
                text.chars().take(400).collect::<String>()
            )));
        }
        let value: serde_json::Value = response
            .json()
            .map_err(|e| BackendError::Http(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| {
                BackendError::MalformedResponse(
                    "choices[0].message.content missing or not a string".to_string(),
                )
            })
    }
}

/// Record a whole fixture directory by replaying `responses` in order; the
/// scripted inner backend ignores prompt content. Intended for seeding demo
/// fixtures and tests.
pub fn record_scripted_run(
    dir: &Path,
    responses: Vec<String>,
) -> RecordingBackend<ScriptedBackend> {
    RecordingBackend::new(ScriptedBackend::new(responses), dir.to_path_buf())
}

/// Pops canned responses in order, regardless of the prompt. Not
/// referentially transparent; use [`MockBackend`] for replay semantics.
pub struct ScriptedBackend {
    responses: std::sync::Mutex<std::collections::VecDeque<String>>,
}

impl ScriptedBackend {
    pub fn new(responses: Vec<String>) -> Self {
        ScriptedBackend {
            responses: std::sync::Mutex::new(responses.into()),
        }
    }
}

impl LlmBackend for ScriptedBackend {
    fn complete(&self, stage: Stage, _request: &LlmRequest) -> Result<String, BackendError> {
        self.responses
            .lock()
            .expect("scripted backend poisoned")
            .pop_front()
            .ok_or_else(|| BackendError::MalformedResponse(format!(
                "scripted backend ran out of responses at stage {stage}"
            )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request() -> LlmRequest {
        LlmRequest {
            system_prompt: "sys".into(),
            user_prompt: "user".into(),
            temperature: 0.0,
            max_tokens: 4096,
        }
    }

    #[test]
    fn fixture_names_are_stable_and_keyed_by_stage_and_prompt() {
        let a = fixture_file_name(Stage::ConceptExtractor, &request());
        let b = fixture_file_name(Stage::ConceptExtractor, &request());
        assert_eq!(a, b);
        assert!(a.starts_with("concept_extractor-"));
        assert_ne!(a, fixture_file_name(Stage::Validator, &request()));
        let mut other = request();
        other.user_prompt.push('!');
        assert_ne!(a, fixture_file_name(Stage::ConceptExtractor, &other));
    }

    #[test]
    fn mock_replays_and_reports_missing_fixtures() {
        let dir = tempfile::tempdir().unwrap();
        let mock = MockBackend::new(dir.path());
        let req = request();
        let err = mock.complete(Stage::ConceptExtractor, &req).unwrap_err();
        assert!(matches!(err, BackendError::MissingFixture { .. }));

        let name = fixture_file_name(Stage::ConceptExtractor, &req);
        std::fs::write(dir.path().join(name), "canned").unwrap();
        assert_eq!(mock.complete(Stage::ConceptExtractor, &req).unwrap(), "canned");
        // referential transparency
        assert_eq!(mock.complete(Stage::ConceptExtractor, &req).unwrap(), "canned");
    }

    #[test]
    fn recording_wrapper_writes_replayable_fixtures() {
        let dir = tempfile::tempdir().unwrap();
        let recorder = record_scripted_run(dir.path(), vec!["first".into()]);
        let req = request();
        assert_eq!(recorder.complete(Stage::CodeArticulator, &req).unwrap(), "first");
        let mock = MockBackend::new(dir.path());
        assert_eq!(mock.complete(Stage::CodeArticulator, &req).unwrap(), "first");
    }
}
