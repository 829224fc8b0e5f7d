//! Error classification over the (dimension, error type) taxonomy.
//!
//! Ten cells are valid: classes can be missing, extra or misrepresented;
//! attributes missing, extra or wrong; relationships missing, extra,
//! duplicate or misclassified. The structural cells are detected
//! automatically from the match result. The semantic cells — class
//! misrepresented and attribute wrong — require human judgment and are only
//! ever merged in from an annotation overlay file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluator::{relationship_multiset, MatchResult, RelTriple};
use crate::model::UmlDiagram;
use crate::normalize::normalize_name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dimension {
    Class,
    Attribute,
    Relationship,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorType {
    Missing,
    Extra,
    Misrepresented,
    Wrong,
    Duplicate,
    Misclassified,
}

/// The ten valid taxonomy cells.
pub fn is_valid_cell(dimension: Dimension, error_type: ErrorType) -> bool {
    use {Dimension::*, ErrorType::*};
    matches!(
        (dimension, error_type),
        (Class, Missing)
            | (Class, Extra)
            | (Class, Misrepresented)
            | (Attribute, Missing)
            | (Attribute, Extra)
            | (Attribute, Wrong)
            | (Relationship, Missing)
            | (Relationship, Extra)
            | (Relationship, Duplicate)
            | (Relationship, Misclassified)
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub dimension: Dimension,
    pub error_type: ErrorType,
    /// The element concerned, rendered with the diagrams' verbatim names.
    pub subject: String,
    #[serde(default, alias = "note")]
    pub detail: String,
}

impl ErrorRecord {
    fn new(
        dimension: Dimension,
        error_type: ErrorType,
        subject: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        ErrorRecord {
            dimension,
            error_type,
            subject: subject.into(),
            detail: detail.into(),
        }
    }
}

/// Detect every automatable taxonomy category for a diagram pair.
///
/// Attribute errors are scoped to matched classes, so classes missing from
/// the match never also generate per-attribute errors. Relationship missing
/// and extra use the soft criterion (no connection at all); a soft match
/// without a hard match is a misclassification (wrong kind or direction);
/// repeated identical generated triples yield one duplicate record each.
pub fn classify_errors(
    gold: &UmlDiagram,
    gen: &UmlDiagram,
    matches: &MatchResult,
) -> Vec<ErrorRecord> {
    let mut errors = Vec::new();

    let gold_class_names = original_class_names(gold);
    let gen_class_names = original_class_names(gen);

    for (canonical, original) in &gold_class_names {
        if !matches.matched_classes.contains(canonical) {
            errors.push(ErrorRecord::new(
                Dimension::Class,
                ErrorType::Missing,
                original,
                "reference class not generated",
            ));
        }
    }
    for (canonical, original) in &gen_class_names {
        if !matches.matched_classes.contains(canonical) {
            errors.push(ErrorRecord::new(
                Dimension::Class,
                ErrorType::Extra,
                original,
                "class not present in the reference",
            ));
        }
    }

    let gold_attrs = original_attributes(gold, matches);
    let gen_attrs = original_attributes(gen, matches);
    for (key, original) in &gold_attrs {
        if !matches.matched_attributes.contains(key) {
            errors.push(ErrorRecord::new(
                Dimension::Attribute,
                ErrorType::Missing,
                original,
                "expected attribute not generated",
            ));
        }
    }
    for (key, original) in &gen_attrs {
        if !matches.matched_attributes.contains(key) {
            errors.push(ErrorRecord::new(
                Dimension::Attribute,
                ErrorType::Extra,
                original,
                "attribute not present in the reference",
            ));
        }
    }

    let gold_triples = original_triples(gold);
    let gen_multiset = relationship_multiset(gen);
    let gen_triples = original_triples(gen);

    for (triple, subject) in &gold_triples {
        if !matches.matched_relationships_soft.contains(triple) {
            errors.push(ErrorRecord::new(
                Dimension::Relationship,
                ErrorType::Missing,
                subject,
                "classes not connected in the generated diagram",
            ));
        }
    }
    for (triple, subject) in &gen_triples {
        if !matches.matched_relationships_soft_gen.contains(triple) {
            errors.push(ErrorRecord::new(
                Dimension::Relationship,
                ErrorType::Extra,
                subject,
                "classes not connected in the reference",
            ));
        }
    }
    for (triple, count) in &gen_multiset {
        if *count > 1 {
            let subject = gen_triples
                .get(triple)
                .cloned()
                .unwrap_or_else(|| render_triple_canonical(triple));
            errors.push(ErrorRecord::new(
                Dimension::Relationship,
                ErrorType::Duplicate,
                subject,
                format!("{count} identical copies"),
            ));
        }
    }
    for (triple, subject) in &gold_triples {
        if matches.matched_relationships_soft.contains(triple)
            && !matches.matched_relationships_hard.contains(triple)
        {
            errors.push(ErrorRecord::new(
                Dimension::Relationship,
                ErrorType::Misclassified,
                subject,
                "connected, but relationship kind or direction differs",
            ));
        }
    }

    errors
}

/// Parse an annotation overlay: a JSON array of
/// `{dimension, error_type, subject, detail?}` records. Records outside the
/// ten taxonomy cells are rejected.
pub fn load_annotations(json: &str) -> Result<Vec<ErrorRecord>, AnnotationError> {
    let records: Vec<ErrorRecord> = serde_json::from_str(json)?;
    for record in &records {
        if !is_valid_cell(record.dimension, record.error_type) {
            return Err(AnnotationError::InvalidCell {
                dimension: record.dimension,
                error_type: record.error_type,
            });
        }
    }
    Ok(records)
}

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("annotation file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("({dimension:?}, {error_type:?}) is not a valid taxonomy cell")]
    InvalidCell {
        dimension: Dimension,
        error_type: ErrorType,
    },
}

// original-name lookups keyed by canonical form, first occurrence wins

fn original_class_names(diagram: &UmlDiagram) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    for class in &diagram.classes {
        map.entry(normalize_name(&class.name))
            .or_insert_with(|| class.name.clone());
    }
    map
}

fn original_attributes(
    diagram: &UmlDiagram,
    matches: &MatchResult,
) -> BTreeMap<(String, String), String> {
    let mut map = BTreeMap::new();
    for class in &diagram.classes {
        let canonical_class = normalize_name(&class.name);
        if !matches.matched_classes.contains(&canonical_class) {
            continue;
        }
        for attr in &class.attributes {
            map.entry((canonical_class.clone(), normalize_name(&attr.name)))
                .or_insert_with(|| format!("{}.{}", class.name, attr.name));
        }
    }
    map
}

fn original_triples(diagram: &UmlDiagram) -> BTreeMap<RelTriple, String> {
    let mut map = BTreeMap::new();
    for rel in &diagram.relationships {
        let triple = (
            normalize_name(&rel.source),
            normalize_name(&rel.target),
            rel.kind,
        );
        map.entry(triple).or_insert_with(|| {
            format!("{} -> {} ({})", rel.source, rel.target, rel.kind)
        });
    }
    map
}

fn render_triple_canonical((s, t, k): &RelTriple) -> String {
    format!("{s} -> {t} ({k})")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::compute_matches;
    use crate::model::{Relationship, RelationshipKind, UmlClass};

    fn diagram(classes: &[(&str, &[&str])], rels: &[(&str, &str, RelationshipKind)]) -> UmlDiagram {
        let mut d = UmlDiagram::new();
        for (name, attrs) in classes {
            d.classes.push(UmlClass::with_attributes(*name, attrs));
        }
        for (s, t, k) in rels {
            d.relationships.push(Relationship::new(*s, *t, *k));
        }
        d
    }

    fn classify(gold: &UmlDiagram, gen: &UmlDiagram) -> Vec<ErrorRecord> {
        classify_errors(gold, gen, &compute_matches(gold, gen))
    }

    #[test]
    fn identical_diagrams_have_no_errors() {
        let d = diagram(
            &[("A", &["x"])],
            &[("A", "A", RelationshipKind::Association)],
        );
        assert!(classify(&d, &d).is_empty());
    }

    #[test]
    fn wrong_kind_is_misclassified() {
        let gold = diagram(
            &[("A", &[]), ("B", &[])],
            &[("A", "B", RelationshipKind::Association)],
        );
        let gen = diagram(
            &[("A", &[]), ("B", &[])],
            &[("A", "B", RelationshipKind::Aggregation)],
        );
        let errors = classify(&gold, &gen);
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].dimension, Dimension::Relationship);
        assert_eq!(errors[0].error_type, ErrorType::Misclassified);
    }

    #[test]
    fn repeated_relationship_is_one_duplicate_record() {
        let gold = diagram(
            &[("A", &[]), ("B", &[])],
            &[("A", "B", RelationshipKind::Association)],
        );
        let gen = diagram(
            &[("A", &[]), ("B", &[])],
            &[
                ("A", "B", RelationshipKind::Association),
                ("A", "B", RelationshipKind::Association),
            ],
        );
        let errors = classify(&gold, &gen);
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].error_type, ErrorType::Duplicate);
        assert!(errors[0].detail.contains('2'));
    }

    #[test]
    fn missing_and_extra_classes() {
        let gold = diagram(&[("A", &[]), ("B", &[])], &[]);
        let gen = diagram(&[("A", &[]), ("C", &[])], &[]);
        let errors = classify(&gold, &gen);
        assert_eq!(errors.len(), 2);
        assert_eq!(
            (errors[0].error_type, errors[0].subject.as_str()),
            (ErrorType::Missing, "B")
        );
        assert_eq!(
            (errors[1].error_type, errors[1].subject.as_str()),
            (ErrorType::Extra, "C")
        );
    }

    #[test]
    fn attribute_errors_scoped_to_matched_classes() {
        let gold = diagram(&[("A", &["x"]), ("Gone", &["p", "q"])], &[]);
        let gen = diagram(&[("A", &["y"])], &[]);
        let errors = classify(&gold, &gen);
        let attr_errors: Vec<_> = errors
            .iter()
            .filter(|e| e.dimension == Dimension::Attribute)
            .collect();
        // only A.x missing and A.y extra; Gone's attributes are not counted
        assert_eq!(attr_errors.len(), 2);
    }

    #[test]
    fn overlay_round_trip_and_cell_validation() {
        let json = r#"[{"dimension":"Class","error_type":"Misrepresented","subject":"Robot","detail":"enum modeled as plain class"}]"#;
        let records = load_annotations(json).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].error_type, ErrorType::Misrepresented);

        let bad = r#"[{"dimension":"Class","error_type":"Duplicate","subject":"X","detail":""}]"#;
        assert!(matches!(
            load_annotations(bad),
            Err(AnnotationError::InvalidCell { .. })
        ));
    }
}
