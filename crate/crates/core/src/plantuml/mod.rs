//! Parse PlantUML class-diagram text into [`UmlDiagram`] and emit canonical
//! PlantUML back out.
//!
//! The parser is deliberately lenient: unknown lines produce warnings, never
//! failures, and the only hard error is unbalanced braces. The emitter
//! produces a deterministic canonical form that re-parses to an equivalent
//! diagram.

mod emit;
mod parse;

pub use emit::emit_plantuml;
pub use parse::parse_plantuml;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Violation;

/// PlantUML text. LF or CRLF is accepted on input; the emitter writes LF.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlantUmlSource(pub String);

impl PlantUmlSource {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<String> for PlantUmlSource {
    fn from(text: String) -> Self {
        PlantUmlSource(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// A non-fatal observation tied to a 1-based source line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    pub(crate) fn warning(line: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            message: message.into(),
            severity: Severity::Warning,
        }
    }

    pub(crate) fn error(line: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            message: message.into(),
            severity: Severity::Error,
        }
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("unbalanced braces at line {line}")]
    UnbalancedBraces { line: usize },
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("diagram fails validation: {0:?}")]
    InvalidDiagram(Vec<Violation>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        Multiplicity, Relationship, RelationshipKind, UmlAttribute, UmlClass, UmlDiagram,
        Visibility,
    };

    fn parse(text: &str) -> (UmlDiagram, Vec<ParseDiagnostic>) {
        parse_plantuml(&PlantUmlSource(text.to_string())).unwrap()
    }

    #[test]
    fn empty_input_warns_about_missing_fences() {
        let (diagram, diagnostics) = parse("");
        assert!(diagram.classes.is_empty());
        assert_eq!(diagnostics.len(), 1);
        assert!(diagnostics[0].message.contains("fences"));
        assert_eq!(diagnostics[0].severity, Severity::Warning);
    }

    #[test]
    fn generalization_arrow_direction() {
        // A --|> B: A is the subclass, the arrow head marks the superclass
        let (diagram, _) = parse("class A\nclass B\nA --|> B");
        assert_eq!(diagram.classes.len(), 2);
        assert_eq!(diagram.relationships.len(), 1);
        let rel = &diagram.relationships[0];
        assert_eq!(rel.kind, RelationshipKind::Generalization);
        assert_eq!((rel.source.as_str(), rel.target.as_str()), ("A", "B"));

        let (reversed, _) = parse("A <|-- B");
        let rel = &reversed.relationships[0];
        assert_eq!((rel.source.as_str(), rel.target.as_str()), ("B", "A"));
    }

    #[test]
    fn attributes_and_quoted_multiplicities() {
        let (diagram, _) =
            parse("class Order { +orderDate }\nCustomer \"1\" -- \"0..*\" Order");
        let order = diagram.class("Order").unwrap();
        assert_eq!(order.attributes.len(), 1);
        assert_eq!(order.attributes[0].name, "orderDate");
        assert_eq!(order.attributes[0].visibility, Some(Visibility::Public));
        let rel = &diagram.relationships[0];
        assert_eq!(rel.kind, RelationshipKind::Association);
        assert_eq!(rel.source, "Customer");
        assert_eq!(rel.source_multiplicity, Some(Multiplicity::ONE));
        assert_eq!(rel.target_multiplicity, Some(Multiplicity::ZERO_OR_MANY));
    }

    #[test]
    fn composition_and_aggregation_owner_side() {
        // the diamond marks the whole; our source is always the whole
        let (d, _) = parse("A *-- B");
        let rel = &d.relationships[0];
        assert_eq!(rel.kind, RelationshipKind::Composition);
        assert_eq!((rel.source.as_str(), rel.target.as_str()), ("A", "B"));

        let (d, _) = parse("A --* B");
        let rel = &d.relationships[0];
        assert_eq!((rel.source.as_str(), rel.target.as_str()), ("B", "A"));

        let (d, _) = parse("A o-- B");
        let rel = &d.relationships[0];
        assert_eq!(rel.kind, RelationshipKind::Aggregation);
        assert_eq!((rel.source.as_str(), rel.target.as_str()), ("A", "B"));
    }

    #[test]
    fn directed_association_flips_to_arrow_origin() {
        let (d, _) = parse("A --> B");
        let rel = &d.relationships[0];
        assert_eq!((rel.source.as_str(), rel.target.as_str()), ("A", "B"));
        let (d, _) = parse("A <-- B");
        let rel = &d.relationships[0];
        assert_eq!((rel.source.as_str(), rel.target.as_str()), ("B", "A"));
    }

    #[test]
    fn multiplicities_flip_with_the_arrow() {
        let (d, _) = parse("A \"1\" --* \"0..*\" B");
        let rel = &d.relationships[0];
        assert_eq!(rel.source, "B");
        assert_eq!(rel.source_multiplicity, Some(Multiplicity::ZERO_OR_MANY));
        assert_eq!(rel.target_multiplicity, Some(Multiplicity::ONE));
    }

    #[test]
    fn enum_and_abstract_and_stereotype() {
        let (d, _) = parse(
            "@startuml\nenum Color {\n  RED\n  GREEN\n}\nabstract class Shape <<geometry>> {\n}\n@enduml",
        );
        let color = d.class("Color").unwrap();
        assert!(color.is_enumeration);
        assert_eq!(color.attributes.len(), 2);
        let shape = d.class("Shape").unwrap();
        assert!(shape.is_abstract);
        assert_eq!(shape.stereotype.as_deref(), Some("geometry"));
    }

    #[test]
    fn operations_are_kept_verbatim_but_separate() {
        let (d, _) = parse("class A {\n  +name : String\n  --\n  +total() : int\n}");
        let a = d.class("A").unwrap();
        assert_eq!(a.attributes.len(), 1);
        assert_eq!(a.operations, vec!["+total() : int"]);
    }

    #[test]
    fn quoted_names_aliases_and_labels() {
        let (d, _) = parse(
            "class \"Order Details\" as OD\nOD \"0..*\" -- \"1\" Products : contains",
        );
        assert!(d.class("Order Details").is_some());
        let rel = &d.relationships[0];
        assert_eq!(rel.source, "Order Details");
        assert_eq!(rel.label.as_deref(), Some("contains"));
    }

    #[test]
    fn unknown_lines_warn_but_never_abort() {
        let (d, diagnostics) = parse(
            "@startuml\nskinparam monochrome true\nclass A\nnote left of A : hm\nwhatever this is\n@enduml",
        );
        assert_eq!(d.classes.len(), 1);
        assert!(diagnostics.iter().all(|d| d.severity == Severity::Warning));
        assert!(diagnostics.len() >= 3);
    }

    #[test]
    fn unbalanced_braces_are_a_hard_error() {
        let err = parse_plantuml(&PlantUmlSource("class A {\n  x".into())).unwrap_err();
        assert!(matches!(err, ParseError::UnbalancedBraces { line: 1 }));
        let err = parse_plantuml(&PlantUmlSource("}\n".into())).unwrap_err();
        assert!(matches!(err, ParseError::UnbalancedBraces { line: 1 }));
    }

    #[test]
    fn packages_do_not_unbalance_braces() {
        let (d, _) = parse("package P {\nclass A\n}\nclass B");
        assert_eq!(d.classes.len(), 2);
    }

    #[test]
    fn crlf_input_accepted() {
        let (d, _) = parse("@startuml\r\nclass A\r\n@enduml\r\n");
        assert_eq!(d.classes.len(), 1);
    }

    #[test]
    fn emit_empty_and_minimal_diagrams_byte_exact() {
        assert_eq!(
            emit_plantuml(&UmlDiagram::new()).unwrap().as_str(),
            "@startuml\n@enduml\n"
        );
        let mut d = UmlDiagram::new();
        d.classes.push(UmlClass::new("A"));
        assert_eq!(
            emit_plantuml(&d).unwrap().as_str(),
            "@startuml\nclass A {\n}\n@enduml\n"
        );
    }

    #[test]
    fn emit_rejects_invalid_diagrams() {
        let mut d = UmlDiagram::new();
        d.relationships
            .push(Relationship::new("A", "B", RelationshipKind::Association));
        assert!(matches!(
            emit_plantuml(&d),
            Err(EmitError::InvalidDiagram(_))
        ));
    }

    #[test]
    fn emit_is_deterministic_and_sorted() {
        let mut d = UmlDiagram::new();
        d.classes.push(UmlClass::new("Zebra"));
        d.classes.push(UmlClass::new("Apple"));
        d.relationships
            .push(Relationship::new("Zebra", "Apple", RelationshipKind::Association));
        d.relationships
            .push(Relationship::new("Apple", "Zebra", RelationshipKind::Composition));
        let first = emit_plantuml(&d).unwrap();
        let second = emit_plantuml(&d).unwrap();
        assert_eq!(first, second);
        let apple = first.as_str().find("class Apple").unwrap();
        let zebra = first.as_str().find("class Zebra").unwrap();
        assert!(apple < zebra);
    }

    #[test]
    fn three_class_fixture_round_trips() {
        let mut d = UmlDiagram::new();
        d.classes.push({
            let mut c = UmlClass::new("Customer");
            c.attributes.push(UmlAttribute {
                name: "name".into(),
                declared_type: Some("String".into()),
                visibility: Some(Visibility::Public),
            });
            c
        });
        d.classes.push(UmlClass::with_attributes("Order", &["orderDate"]));
        d.classes.push({
            let mut c = UmlClass::new("Status");
            c.is_enumeration = true;
            c.attributes.push(UmlAttribute::new("OPEN"));
            c
        });
        d.relationships.push(
            Relationship::new("Customer", "Order", RelationshipKind::Association)
                .with_multiplicities(
                    Some(Multiplicity::ONE),
                    Some(Multiplicity::ZERO_OR_MANY),
                )
                .with_label("places"),
        );
        d.relationships
            .push(Relationship::new("Order", "Status", RelationshipKind::Aggregation));
        d.title = Some("shop".into());

        let emitted = emit_plantuml(&d).unwrap();
        let (reparsed, diagnostics) = parse(emitted.as_str());
        assert!(diagnostics.is_empty(), "{diagnostics:?}");
        assert_eq!(reparsed.normalized_signature(), d.normalized_signature());
        assert_eq!(reparsed.title, d.title);
        // emission is stable under re-emission
        assert_eq!(emit_plantuml(&reparsed).unwrap(), emitted);
    }
}
