//! The intermediate object model: the pipeline's formal JSON exchange format.
//!
//! Instances must validate against the published schema shipped at
//! `schema/intermediate_model.schema.json`, plus semantic rules a JSON Schema
//! cannot express: relationship endpoints must exactly match a declared class
//! name, class names must stay unique after normalization, and
//! generalizations carry no multiplicities. Models that pass the full check
//! convert losslessly to and from [`UmlDiagram`].

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use nomad_core::model::{
    Multiplicity, Relationship, RelationshipKind, UmlAttribute, UmlClass, UmlDiagram,
};
use nomad_core::normalize_name;

/// The published JSON Schema, embedded verbatim from the shipped file.
pub const INTERMEDIATE_MODEL_SCHEMA: &str =
    include_str!("../schema/intermediate_model.schema.json");

static SCHEMA_VALIDATOR: LazyLock<jsonschema::Validator> = LazyLock::new(|| {
    let schema: Value =
        serde_json::from_str(INTERMEDIATE_MODEL_SCHEMA).expect("shipped schema is valid JSON");
    jsonschema::validator_for(&schema).expect("shipped schema compiles")
});

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelClass {
    pub name: String,
    #[serde(default)]
    pub attributes: Vec<String>,
    #[serde(default)]
    pub enumeration: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRelationship {
    pub source: String,
    pub target: String,
    #[serde(rename = "type")]
    pub kind: RelationshipKind,
    #[serde(rename = "sourceMultiplicity", default)]
    pub source_multiplicity: Option<String>,
    #[serde(rename = "targetMultiplicity", default)]
    pub target_multiplicity: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntermediateModel {
    pub classes: Vec<ModelClass>,
    pub relationships: Vec<ModelRelationship>,
}

/// All schema and semantic violations for a candidate model value; empty
/// means valid. The messages are written to be fed back to the integrator in
/// a repair prompt.
pub fn validate_intermediate_value(value: &Value) -> Vec<String> {
    let mut violations: Vec<String> = SCHEMA_VALIDATOR
        .iter_errors(value)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    if !violations.is_empty() {
        return violations;
    }

    let model: IntermediateModel = match serde_json::from_value(value.clone()) {
        Ok(m) => m,
        Err(e) => return vec![format!("cannot decode model: {e}")],
    };

    let mut seen = std::collections::BTreeMap::new();
    for class in &model.classes {
        if let Some(previous) =
            seen.insert(normalize_name(&class.name), class.name.clone())
        {
            violations.push(format!(
                "class names `{previous}` and `{}` collide after normalization",
                class.name
            ));
        }
        let mut attr_seen = std::collections::BTreeSet::new();
        for attr in &class.attributes {
            if !attr_seen.insert(normalize_name(attr)) {
                violations.push(format!(
                    "class `{}` has attributes colliding after normalization: `{attr}`",
                    class.name
                ));
            }
        }
    }
    for rel in &model.relationships {
        for endpoint in [&rel.source, &rel.target] {
            if !model.classes.iter().any(|c| c.name == *endpoint) {
                violations.push(format!(
                    "relationship endpoint `{endpoint}` does not exactly match any declared class"
                ));
            }
        }
        if rel.kind == RelationshipKind::Generalization
            && (rel.source_multiplicity.is_some() || rel.target_multiplicity.is_some())
        {
            violations.push(format!(
                "generalization {} -> {} must carry null multiplicities",
                rel.source, rel.target
            ));
        }
    }
    violations
}

impl IntermediateModel {
    /// Decode and fully validate a JSON value.
    pub fn from_value(value: &Value) -> Result<Self, Vec<String>> {
        let violations = validate_intermediate_value(value);
        if !violations.is_empty() {
            return Err(violations);
        }
        serde_json::from_value(value.clone()).map_err(|e| vec![e.to_string()])
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("model serializes")
    }

    /// Convert to the diagram model. For schema-valid models the result
    /// passes validation.
    pub fn to_diagram(&self) -> UmlDiagram {
        let mut diagram = UmlDiagram::new();
        for class in &self.classes {
            let mut uml = UmlClass::new(&class.name);
            uml.is_enumeration = class.enumeration;
            uml.attributes = class.attributes.iter().map(UmlAttribute::new).collect();
            diagram.classes.push(uml);
        }
        for rel in &self.relationships {
            diagram.relationships.push(Relationship {
                source: rel.source.clone(),
                target: rel.target.clone(),
                kind: rel.kind,
                source_multiplicity: rel
                    .source_multiplicity
                    .as_deref()
                    .and_then(Multiplicity::parse),
                target_multiplicity: rel
                    .target_multiplicity
                    .as_deref()
                    .and_then(Multiplicity::parse),
                label: None,
            });
        }
        diagram
    }

    /// Project a diagram onto the exchange format. Multiplicities are
    /// rendered in the canonical two-part form; abstract flags, stereotypes,
    /// attribute types, operations, labels and titles are outside the format
    /// and dropped.
    pub fn from_diagram(diagram: &UmlDiagram) -> Self {
        IntermediateModel {
            classes: diagram
                .classes
                .iter()
                .map(|c| ModelClass {
                    name: c.name.clone(),
                    attributes: c.attributes.iter().map(|a| a.name.clone()).collect(),
                    enumeration: c.is_enumeration,
                })
                .collect(),
            relationships: diagram
                .relationships
                .iter()
                .map(|r| ModelRelationship {
                    source: r.source.clone(),
                    target: r.target.clone(),
                    kind: r.kind,
                    source_multiplicity: r.source_multiplicity.map(|m| m.range_label()),
                    target_multiplicity: r.target_multiplicity.map(|m| m.range_label()),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn valid_model_value() -> Value {
        json!({
            "classes": [
                {"name": "Customer", "attributes": ["name", "city"], "enumeration": false},
                {"name": "Order", "attributes": ["orderDate"], "enumeration": false}
            ],
            "relationships": [
                {"source": "Customer", "target": "Order", "type": "association",
                 "sourceMultiplicity": "1..1", "targetMultiplicity": "0..*"}
            ]
        })
    }

    #[test]
    fn valid_model_passes_and_converts() {
        let model = IntermediateModel::from_value(&valid_model_value()).unwrap();
        assert_eq!(model.classes.len(), 2);
        let diagram = model.to_diagram();
        assert!(diagram.is_valid(), "{:?}", diagram.validate());
        assert_eq!(diagram.relationships[0].source_multiplicity, Some(Multiplicity::ONE));
    }

    #[test]
    fn missing_relationships_key_is_a_schema_violation() {
        let value = json!({"classes": []});
        let violations = validate_intermediate_value(&value);
        assert!(!violations.is_empty());
        assert!(violations[0].contains("relationships"));
    }

    #[test]
    fn dangling_endpoint_is_a_semantic_violation() {
        let mut value = valid_model_value();
        value["relationships"][0]["target"] = json!("Nowhere");
        let violations = validate_intermediate_value(&value);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("Nowhere"));
    }

    #[test]
    fn generalization_with_multiplicity_is_rejected() {
        let value = json!({
            "classes": [{"name": "A"}, {"name": "B"}],
            "relationships": [
                {"source": "A", "target": "B", "type": "generalization",
                 "sourceMultiplicity": "1..1"}
            ]
        });
        assert!(!validate_intermediate_value(&value).is_empty());
    }

    #[test]
    fn one_part_multiplicity_string_is_rejected_by_the_schema() {
        let mut value = valid_model_value();
        value["relationships"][0]["sourceMultiplicity"] = json!("1");
        assert!(!validate_intermediate_value(&value).is_empty());
    }

    #[test]
    fn diagram_round_trip_is_identity_on_models() {
        let model = IntermediateModel::from_value(&valid_model_value()).unwrap();
        let diagram = model.to_diagram();
        assert_eq!(IntermediateModel::from_diagram(&diagram), model);
    }

    #[test]
    fn duplicate_class_names_after_normalization_are_rejected() {
        let value = json!({
            "classes": [{"name": "Order"}, {"name": "Orders"}],
            "relationships": []
        });
        assert!(!validate_intermediate_value(&value).is_empty());
    }
}
