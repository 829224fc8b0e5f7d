//! The five pipeline stages and their sequential composition.
//!
//! Each stage builds its prompts from its declared inputs alone, calls the
//! backend once, and parses the constrained response. A malformed response
//! triggers exactly one reminder re-prompt (for the integrator, a repair
//! re-prompt carrying the validator messages); a second failure is an error.
//! The articulator never fails outright: if its output does not parse it
//! falls back to deterministic emission from the intermediate model.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use nomad_core::model::RelationshipKind;
use nomad_core::normalize_name;
use nomad_core::plantuml::{emit_plantuml, parse_plantuml, PlantUmlSource, Severity};

use crate::backend::{LlmBackend, LlmRequest};
use crate::error::{PipelineError, Stage};
use crate::model::{validate_intermediate_value, IntermediateModel};
use crate::prompts::{PromptLibrary, PromptRole};

/// Sampling parameters shared by every stage; defaults keep generation
/// deterministic-leaning and untruncated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlmParams {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for LlmParams {
    fn default() -> Self {
        LlmParams {
            temperature: 0.0,
            max_tokens: 4096,
        }
    }
}

impl LlmParams {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(PipelineError::InvalidParams(format!(
                "temperature must be finite and >= 0, got {}",
                self.temperature
            )));
        }
        if self.max_tokens == 0 {
            return Err(PipelineError::InvalidParams(
                "max_tokens must be > 0".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptEntity {
    pub name: String,
    #[serde(default)]
    pub attributes: Vec<String>,
}

/// Domain entities grounded in the requirements text; entity names are
/// unique after normalization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptSet {
    pub entities: Vec<ConceptEntity>,
}

impl ConceptSet {
    fn find_by_normalized(&self, name: &str) -> Option<&ConceptEntity> {
        let key = normalize_name(name);
        self.entities.iter().find(|e| normalize_name(&e.name) == key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSketch {
    pub source: String,
    pub target: String,
    pub kind: RelationshipKind,
    /// `(source end, target end)` multiplicity strings when both are known.
    pub multiplicities: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationshipSet {
    pub relations: Vec<RelationSketch>,
}

/// One transcript record: the stage, the request that produced the kept
/// response, and that raw response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub stage: Stage,
    pub request: LlmRequest,
    pub response: String,
}

/// A stage's parsed output plus its transcript entry and warnings.
#[derive(Debug, Clone)]
pub struct StageOutcome<T> {
    pub value: T,
    pub entry: TranscriptEntry,
    pub warnings: Vec<String>,
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub concepts: ConceptSet,
    pub relationships: RelationshipSet,
    pub model: IntermediateModel,
    pub plantuml: PlantUmlSource,
    pub verified_plantuml: Option<PlantUmlSource>,
    pub transcript: Vec<TranscriptEntry>,
    pub warnings: Vec<String>,
}

fn build_request(
    prompts: &PromptLibrary,
    stage: Stage,
    params: &LlmParams,
    vars: &[(&str, &str)],
) -> LlmRequest {
    LlmRequest {
        system_prompt: prompts.render(stage, PromptRole::System, vars),
        user_prompt: prompts.render(stage, PromptRole::User, vars),
        temperature: params.temperature,
        max_tokens: params.max_tokens,
    }
}

fn complete(
    backend: &dyn LlmBackend,
    stage: Stage,
    request: &LlmRequest,
) -> Result<String, PipelineError> {
    backend
        .complete(stage, request)
        .map_err(|source| PipelineError::Backend { stage, source })
}

/// Call the backend and parse; on a parse failure, re-prompt once with the
/// reminder and the parse error appended to the user prompt.
fn complete_and_parse<T>(
    backend: &dyn LlmBackend,
    stage: Stage,
    request: LlmRequest,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<StageOutcome<T>, PipelineError> {
    let response = complete(backend, stage, &request)?;
    match parse(&response) {
        Ok(value) => Ok(StageOutcome {
            value,
            entry: TranscriptEntry {
                stage,
                request,
                response,
            },
            warnings: Vec::new(),
        }),
        Err(first_error) => {
            let mut retry = request;
            retry.user_prompt = format!(
                "{}\n\nThe previous response could not be used: {first_error}\n\
                 Respond again following the required format exactly, with no surrounding prose.",
                retry.user_prompt
            );
            let retry_response = complete(backend, stage, &retry)?;
            match parse(&retry_response) {
                Ok(value) => Ok(StageOutcome {
                    value,
                    entry: TranscriptEntry {
                        stage,
                        request: retry,
                        response: retry_response,
                    },
                    warnings: vec![format!(
                        "{stage}: malformed response, format reminder re-prompt issued"
                    )],
                }),
                Err(second_error) => Err(PipelineError::Format {
                    stage,
                    detail: second_error,
                }),
            }
        }
    }
}

/// Pull the payload out of a markdown code fence when one is present.
pub(crate) fn strip_code_fences(text: &str) -> String {
    let trimmed = text.trim();
    let Some(open) = trimmed.find("```") else {
        return trimmed.to_string();
    };
    let after_fence = &trimmed[open + 3..];
    let body = match after_fence.split_once('\n') {
        Some((_, rest)) => rest,
        None => after_fence,
    };
    match body.rfind("```") {
        Some(close) => body[..close].trim().to_string(),
        None => body.trim().to_string(),
    }
}

fn parse_json(text: &str) -> Result<Value, String> {
    serde_json::from_str(&strip_code_fences(text)).map_err(|e| format!("not valid JSON: {e}"))
}

/// Identify the domain entities (classes) and their attributes from the
/// requirements, grounding the model's vocabulary. Entities that repeat
/// after normalization keep their first occurrence.
pub fn extract_concepts(
    requirements: &str,
    backend: &dyn LlmBackend,
    prompts: &PromptLibrary,
    params: &LlmParams,
) -> Result<StageOutcome<ConceptSet>, PipelineError> {
    if requirements.trim().is_empty() {
        return Err(PipelineError::EmptyRequirements);
    }
    let stage = Stage::ConceptExtractor;
    let request = build_request(prompts, stage, params, &[("requirements", requirements)]);

    let mut outcome = complete_and_parse(backend, stage, request, |text| {
        let value = parse_json(text)?;
        serde_json::from_value::<Vec<ConceptEntity>>(value)
            .map_err(|e| format!("expected a JSON array of {{name, attributes}}: {e}"))
    })?;

    let mut entities: Vec<ConceptEntity> = Vec::new();
    for entity in std::mem::take(&mut outcome.value) {
        if entity.name.trim().is_empty() {
            outcome
                .warnings
                .push(format!("{stage}: entity with empty name dropped"));
            continue;
        }
        if entities
            .iter()
            .any(|e| normalize_name(&e.name) == normalize_name(&entity.name))
        {
            outcome.warnings.push(format!(
                "{stage}: duplicate entity `{}` dropped",
                entity.name
            ));
            continue;
        }
        entities.push(entity);
    }
    Ok(StageOutcome {
        value: ConceptSet { entities },
        entry: outcome.entry,
        warnings: outcome.warnings,
    })
}

/// Wire format for relationship stage responses.
#[derive(Debug, Deserialize)]
struct RawRelation {
    source: String,
    target: String,
    #[serde(rename = "type")]
    kind: String,
    #[serde(rename = "sourceMultiplicity", default)]
    source_multiplicity: Option<String>,
    #[serde(rename = "targetMultiplicity", default)]
    target_multiplicity: Option<String>,
}

fn kind_from_str(text: &str) -> Option<RelationshipKind> {
    match text.to_lowercase().as_str() {
        "association" => Some(RelationshipKind::Association),
        "aggregation" => Some(RelationshipKind::Aggregation),
        "composition" => Some(RelationshipKind::Composition),
        "generalization" | "generalisation" => Some(RelationshipKind::Generalization),
        _ => None,
    }
}

/// Draw associations, aggregations, compositions and generalizations between
/// the grounded entities. Relations whose endpoints are not in the concept
/// set are dropped with a warning, never invented; matching endpoints are
/// rewritten to the entity's exact name.
pub fn comprehend_relationships(
    concepts: &ConceptSet,
    requirements: &str,
    backend: &dyn LlmBackend,
    prompts: &PromptLibrary,
    params: &LlmParams,
) -> Result<StageOutcome<RelationshipSet>, PipelineError> {
    if concepts.entities.is_empty() {
        return Err(PipelineError::EmptyConceptSet);
    }
    let stage = Stage::RelationshipComprehender;
    let entities_json = serde_json::to_string_pretty(&concepts.entities).expect("serializable");
    let request = build_request(
        prompts,
        stage,
        params,
        &[
            ("entities", entities_json.as_str()),
            ("requirements", requirements),
        ],
    );

    let outcome = complete_and_parse(backend, stage, request, |text| {
        let value = parse_json(text)?;
        serde_json::from_value::<Vec<RawRelation>>(value)
            .map_err(|e| format!("expected a JSON array of relations: {e}"))
    })?;

    let mut warnings = outcome.warnings;
    let mut relations = Vec::new();
    for raw in outcome.value {
        let Some(kind) = kind_from_str(&raw.kind) else {
            warnings.push(format!(
                "{stage}: relation {} -> {} dropped: unknown type `{}`",
                raw.source, raw.target, raw.kind
            ));
            continue;
        };
        let (Some(source), Some(target)) = (
            concepts.find_by_normalized(&raw.source),
            concepts.find_by_normalized(&raw.target),
        ) else {
            warnings.push(format!(
                "{stage}: relation {} -> {} dropped: endpoint not among extracted entities",
                raw.source, raw.target
            ));
            continue;
        };
        let multiplicities = match (raw.source_multiplicity, raw.target_multiplicity) {
            (Some(s), Some(t)) => Some((s, t)),
            _ => None,
        };
        relations.push(RelationSketch {
            source: source.name.clone(),
            target: target.name.clone(),
            kind,
            multiplicities,
        });
    }
    Ok(StageOutcome {
        value: RelationshipSet { relations },
        entry: outcome.entry,
        warnings,
    })
}

/// Merge entities and relationships into the schema-valid intermediate
/// model. A response that is not JSON gets the generic format reminder; a
/// JSON response that violates the schema gets one repair re-prompt carrying
/// the validator messages.
pub fn integrate_model(
    concepts: &ConceptSet,
    relationships: &RelationshipSet,
    backend: &dyn LlmBackend,
    prompts: &PromptLibrary,
    params: &LlmParams,
) -> Result<StageOutcome<IntermediateModel>, PipelineError> {
    let stage = Stage::ModelIntegrator;
    let entities_json = serde_json::to_string_pretty(&concepts.entities).expect("serializable");
    let relations_json =
        serde_json::to_string_pretty(&relationships.relations).expect("serializable");
    let request = build_request(
        prompts,
        stage,
        params,
        &[
            ("entities", entities_json.as_str()),
            ("relationships", relations_json.as_str()),
        ],
    );

    let response = complete(backend, stage, &request)?;
    let (retry_reason, first_violations) = match parse_json(&response) {
        Err(json_error) => (json_error, Vec::new()),
        Ok(value) => match IntermediateModel::from_value(&value) {
            Ok(model) => {
                return Ok(StageOutcome {
                    value: model,
                    entry: TranscriptEntry {
                        stage,
                        request,
                        response,
                    },
                    warnings: Vec::new(),
                })
            }
            Err(violations) => (
                format!("schema violations: {}", violations.join("; ")),
                violations,
            ),
        },
    };

    let mut retry = request;
    retry.user_prompt = format!(
        "{}\n\nThe previous response could not be used: {retry_reason}\n\
         Respond again with a single JSON object that satisfies the object-model schema exactly.",
        retry.user_prompt
    );
    let retry_response = complete(backend, stage, &retry)?;
    let value = match parse_json(&retry_response) {
        Ok(value) => value,
        Err(detail) => {
            return Err(if first_violations.is_empty() {
                PipelineError::Format { stage, detail }
            } else {
                PipelineError::Schema {
                    stage,
                    violations: first_violations,
                }
            })
        }
    };
    match IntermediateModel::from_value(&value) {
        Ok(model) => Ok(StageOutcome {
            value: model,
            entry: TranscriptEntry {
                stage,
                request: retry,
                response: retry_response,
            },
            warnings: vec![format!("{stage}: repair re-prompt issued")],
        }),
        Err(violations) => Err(PipelineError::Schema { stage, violations }),
    }
}

fn parses_cleanly(text: &str) -> bool {
    match parse_plantuml(&PlantUmlSource(text.to_string())) {
        Ok((_, diagnostics)) => diagnostics.iter().all(|d| d.severity != Severity::Error),
        Err(_) => false,
    }
}

/// Translate the intermediate model into PlantUML. If the backend output
/// fails to parse, fall back to deterministic emission from the model; the
/// fallback is recorded as a warning, so output is always produced.
pub fn articulate_code(
    model: &IntermediateModel,
    backend: &dyn LlmBackend,
    prompts: &PromptLibrary,
    params: &LlmParams,
) -> Result<StageOutcome<PlantUmlSource>, PipelineError> {
    let stage = Stage::CodeArticulator;
    let model_json = serde_json::to_string_pretty(&model.to_value()).expect("serializable");
    let request = build_request(prompts, stage, params, &[("model", model_json.as_str())]);

    let response = complete(backend, stage, &request)?;
    let candidate = strip_code_fences(&response);
    let (value, warnings) = if parses_cleanly(&candidate) {
        (PlantUmlSource(candidate), Vec::new())
    } else {
        let fallback = emit_plantuml(&model.to_diagram()).map_err(|e| PipelineError::Format {
            stage,
            detail: format!("fallback emission failed: {e}"),
        })?;
        (
            fallback,
            vec![format!(
                "{stage}: backend output failed to parse, deterministic emission used instead"
            )],
        )
    };
    Ok(StageOutcome {
        value,
        entry: TranscriptEntry {
            stage,
            request,
            response,
        },
        warnings,
    })
}

/// Single-shot verification: inspect the diagram against the requirements
/// and return a possibly revised diagram. Returning the input unchanged is
/// explicitly permitted; an unparseable revision is discarded in favor of
/// the input, with a warning.
pub fn verify(
    plantuml: &PlantUmlSource,
    requirements: &str,
    backend: &dyn LlmBackend,
    prompts: &PromptLibrary,
    params: &LlmParams,
) -> Result<StageOutcome<PlantUmlSource>, PipelineError> {
    let stage = Stage::Validator;
    let request = build_request(
        prompts,
        stage,
        params,
        &[
            ("requirements", requirements),
            ("plantuml", plantuml.as_str()),
        ],
    );
    let response = complete(backend, stage, &request)?;
    let candidate = strip_code_fences(&response);
    let (value, warnings) = if parses_cleanly(&candidate) {
        (PlantUmlSource(candidate), Vec::new())
    } else {
        (
            plantuml.clone(),
            vec![format!(
                "{stage}: revised diagram failed to parse, keeping the unverified diagram"
            )],
        )
    };
    Ok(StageOutcome {
        value,
        entry: TranscriptEntry {
            stage,
            request,
            response,
        },
        warnings,
    })
}

/// Run the four generation stages in order, then verification when enabled.
/// The transcript records one entry per executed stage in execution order;
/// the first unrecoverable stage error is surfaced with its stage identity.
pub fn run_pipeline(
    requirements: &str,
    backend: &dyn LlmBackend,
    prompts: &PromptLibrary,
    params: &LlmParams,
    verify_enabled: bool,
) -> Result<PipelineResult, PipelineError> {
    params.validate()?;
    let mut transcript = Vec::new();
    let mut warnings = Vec::new();

    let concepts = extract_concepts(requirements, backend, prompts, params)?;
    transcript.push(concepts.entry.clone());
    warnings.extend(concepts.warnings.clone());

    let relationships =
        comprehend_relationships(&concepts.value, requirements, backend, prompts, params)?;
    transcript.push(relationships.entry.clone());
    warnings.extend(relationships.warnings.clone());

    let model = integrate_model(&concepts.value, &relationships.value, backend, prompts, params)?;
    transcript.push(model.entry.clone());
    warnings.extend(model.warnings.clone());

    let articulated = articulate_code(&model.value, backend, prompts, params)?;
    transcript.push(articulated.entry.clone());
    warnings.extend(articulated.warnings.clone());

    let verified_plantuml = if verify_enabled {
        let verified = verify(&articulated.value, requirements, backend, prompts, params)?;
        transcript.push(verified.entry.clone());
        warnings.extend(verified.warnings.clone());
        Some(verified.value)
    } else {
        None
    };

    Ok(PipelineResult {
        concepts: concepts.value,
        relationships: relationships.value,
        model: model.value,
        plantuml: articulated.value,
        verified_plantuml,
        transcript,
        warnings,
    })
}
