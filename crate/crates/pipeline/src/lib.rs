//! Five-stage role-specialised generation pipeline over a pluggable LLM
//! backend.
//!
//! The four generation stages run strictly in sequence — concept extraction,
//! relationship comprehension, model integration, code articulation — with an
//! optional single-shot verification stage after them. Each stage consumes
//! only its declared inputs, talks to the backend through a constrained
//! prompt/output contract, and records its request and raw response in the
//! run transcript. Under the replaying mock backend the whole pipeline is a
//! pure function of (requirements, fixtures).

pub mod backend;
pub mod error;
pub mod model;
pub mod prompts;
pub mod stages;

pub use backend::{
    fixture_file_name, HttpBackend, LlmBackend, LlmRequest, MockBackend, RecordingBackend,
    API_KEY_ENV,
};
pub use error::{BackendError, PipelineError, Stage};
pub use model::{IntermediateModel, ModelClass, ModelRelationship, INTERMEDIATE_MODEL_SCHEMA};
pub use prompts::PromptLibrary;
pub use stages::{
    articulate_code, comprehend_relationships, extract_concepts, integrate_model, run_pipeline,
    verify, ConceptEntity, ConceptSet, LlmParams, PipelineResult, RelationSketch, RelationshipSet,
    StageOutcome, TranscriptEntry,
};
