//! Prompt templates are versioned data files, not code.
//!
//! The builtin set ships under `prompts/` in this crate; a prompt directory
//! can override any subset of them file-by-file, which is how agents get
//! swapped or tuned without touching the pipeline.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{PipelineError, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PromptRole {
    System,
    User,
}

impl PromptRole {
    fn slug(self) -> &'static str {
        match self {
            PromptRole::System => "system",
            PromptRole::User => "user",
        }
    }
}

const ALL_STAGES: [Stage; 5] = [
    Stage::ConceptExtractor,
    Stage::RelationshipComprehender,
    Stage::ModelIntegrator,
    Stage::CodeArticulator,
    Stage::Validator,
];

#[derive(Debug, Clone)]
pub struct PromptLibrary {
    templates: HashMap<(Stage, PromptRole), String>,
}

impl PromptLibrary {
    /// The builtin template set embedded at compile time.
    pub fn builtin() -> Self {
        let mut templates = HashMap::new();
        macro_rules! builtin {
            ($stage:expr, $slug:literal) => {
                templates.insert(
                    ($stage, PromptRole::System),
                    include_str!(concat!("../prompts/", $slug, ".system.txt")).to_string(),
                );
                templates.insert(
                    ($stage, PromptRole::User),
                    include_str!(concat!("../prompts/", $slug, ".user.txt")).to_string(),
                );
            };
        }
        builtin!(Stage::ConceptExtractor, "concept_extractor");
        builtin!(Stage::RelationshipComprehender, "relationship_comprehender");
        builtin!(Stage::ModelIntegrator, "model_integrator");
        builtin!(Stage::CodeArticulator, "code_articulator");
        builtin!(Stage::Validator, "validator");
        PromptLibrary { templates }
    }

    /// Builtin templates overridden by any `{stage}.{role}.txt` files present
    /// in `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self, PipelineError> {
        let mut library = PromptLibrary::builtin();
        for stage in ALL_STAGES {
            for role in [PromptRole::System, PromptRole::User] {
                let path = dir.join(format!("{}.{}.txt", stage.slug(), role.slug()));
                match std::fs::read_to_string(&path) {
                    Ok(text) => {
                        library.templates.insert((stage, role), text);
                    }
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                    Err(e) => {
                        return Err(PipelineError::Template(format!(
                            "cannot read {}: {e}",
                            path.display()
                        )))
                    }
                }
            }
        }
        Ok(library)
    }

    /// Render a template, substituting `{{key}}` placeholders.
    pub fn render(&self, stage: Stage, role: PromptRole, vars: &[(&str, &str)]) -> String {
        let mut text = self.templates[&(stage, role)].clone();
        for (key, value) in vars {
            text = text.replace(&format!("{{{{{key}}}}}"), value);
        }
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_covers_every_stage_and_role() {
        let lib = PromptLibrary::builtin();
        for stage in ALL_STAGES {
            for role in [PromptRole::System, PromptRole::User] {
                assert!(!lib.render(stage, role, &[]).is_empty());
            }
        }
    }

    #[test]
    fn placeholders_are_substituted() {
        let lib = PromptLibrary::builtin();
        let rendered = lib.render(
            Stage::ConceptExtractor,
            PromptRole::User,
            &[("requirements", "The system shall record Customer information.")],
        );
        assert!(rendered.contains("The system shall record Customer information."));
        assert!(!rendered.contains("{{requirements}}"));
    }

    #[test]
    fn directory_overrides_win() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("validator.system.txt"), "custom verifier").unwrap();
        let lib = PromptLibrary::from_dir(dir.path()).unwrap();
        assert_eq!(lib.render(Stage::Validator, PromptRole::System, &[]), "custom verifier");
        // untouched templates fall back to the builtin set
        assert!(lib
            .render(Stage::ConceptExtractor, PromptRole::System, &[])
            .contains("JSON"));
    }
}
