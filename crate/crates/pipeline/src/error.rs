use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The five pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    ConceptExtractor,
    RelationshipComprehender,
    ModelIntegrator,
    CodeArticulator,
    Validator,
}

impl Stage {
    pub fn slug(self) -> &'static str {
        match self {
            Stage::ConceptExtractor => "concept_extractor",
            Stage::RelationshipComprehender => "relationship_comprehender",
            Stage::ModelIntegrator => "model_integrator",
            Stage::CodeArticulator => "code_articulator",
            Stage::Validator => "validator",
        }
    }

    pub const GENERATION: [Stage; 4] = [
        Stage::ConceptExtractor,
        Stage::RelationshipComprehender,
        Stage::ModelIntegrator,
        Stage::CodeArticulator,
    ];
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// Transport-level backend failures.
#[derive(Debug, Error)]
pub enum BackendError {
    #[error("environment variable {0} is not set")]
    MissingApiKey(String),
    #[error("http transport: {0}")]
    Http(String),
    #[error("unexpected completion response shape: {0}")]
    MalformedResponse(String),
    #[error("no fixture for stage {stage} at {path} (record it first or check the prompt set)")]
    MissingFixture { stage: String, path: PathBuf },
    #[error("fixture io at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("requirements text is empty")]
    EmptyRequirements,
    #[error("concept set is empty; nothing to relate")]
    EmptyConceptSet,
    #[error("stage {stage}: {source}")]
    Backend {
        stage: Stage,
        #[source]
        source: BackendError,
    },
    #[error("stage {stage}: response not in the required format after one reminder: {detail}")]
    Format { stage: Stage, detail: String },
    #[error("stage {stage}: output violates the object-model schema after one repair attempt: {}", violations.join("; "))]
    Schema {
        stage: Stage,
        violations: Vec<String>,
    },
    #[error("prompt template: {0}")]
    Template(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl PipelineError {
    /// The stage this error surfaced in, when one is attached.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            PipelineError::Backend { stage, .. }
            | PipelineError::Format { stage, .. }
            | PipelineError::Schema { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}
