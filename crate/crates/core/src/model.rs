//! Canonical in-memory representation of UML class diagrams.
//!
//! A [`UmlDiagram`] holds classes, their attributes and the relationships
//! between them. Construction never fails; structural invariants are checked
//! by [`UmlDiagram::validate`], which reports breaches as data rather than
//! errors so that callers can decide how to react.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::normalize::normalize_name;

/// Member visibility marker (`+`, `-`, `#`, `~`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Private,
    Protected,
    Package,
}

impl Visibility {
    pub fn marker(self) -> char {
        match self {
            Visibility::Public => '+',
            Visibility::Private => '-',
            Visibility::Protected => '#',
            Visibility::Package => '~',
        }
    }

    pub fn from_marker(c: char) -> Option<Self> {
        match c {
            '+' => Some(Visibility::Public),
            '-' => Some(Visibility::Private),
            '#' => Some(Visibility::Protected),
            '~' => Some(Visibility::Package),
            _ => None,
        }
    }
}

/// An attribute of a class. Declared types are carried verbatim for
/// round-trip fidelity but never participate in matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UmlAttribute {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visibility: Option<Visibility>,
}

impl UmlAttribute {
    pub fn new(name: impl Into<String>) -> Self {
        UmlAttribute {
            name: name.into(),
            declared_type: None,
            visibility: None,
        }
    }

    pub fn typed(name: impl Into<String>, declared_type: impl Into<String>) -> Self {
        UmlAttribute {
            name: name.into(),
            declared_type: Some(declared_type.into()),
            visibility: None,
        }
    }
}

/// A class (or enumeration) in a diagram.
///
/// Operations are stored as opaque strings purely so that parsed diagrams can
/// be re-emitted faithfully; they are excluded from all matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UmlClass {
    pub name: String,
    #[serde(default)]
    pub attributes: Vec<UmlAttribute>,
    #[serde(default)]
    pub is_enumeration: bool,
    #[serde(default)]
    pub is_abstract: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stereotype: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operations: Vec<String>,
}

impl UmlClass {
    pub fn new(name: impl Into<String>) -> Self {
        UmlClass {
            name: name.into(),
            attributes: Vec::new(),
            is_enumeration: false,
            is_abstract: false,
            stereotype: None,
            operations: Vec::new(),
        }
    }

    pub fn with_attributes(name: impl Into<String>, attributes: &[&str]) -> Self {
        let mut class = UmlClass::new(name);
        class.attributes = attributes.iter().map(|a| UmlAttribute::new(*a)).collect();
        class
    }
}

/// The four relationship kinds modeled by the toolkit.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum RelationshipKind {
    Association,
    Aggregation,
    Composition,
    Generalization,
}

impl RelationshipKind {
    pub fn label(self) -> &'static str {
        match self {
            RelationshipKind::Association => "association",
            RelationshipKind::Aggregation => "aggregation",
            RelationshipKind::Composition => "composition",
            RelationshipKind::Generalization => "generalization",
        }
    }
}

impl fmt::Display for RelationshipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Upper bound of a multiplicity range.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum UpperBound {
    Bounded(u32),
    Unbounded,
}

/// An `m..n` instance-count range on one relationship end.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Multiplicity {
    pub lower: u32,
    pub upper: UpperBound,
}

impl Multiplicity {
    pub const ONE: Multiplicity = Multiplicity {
        lower: 1,
        upper: UpperBound::Bounded(1),
    };
    pub const ZERO_OR_ONE: Multiplicity = Multiplicity {
        lower: 0,
        upper: UpperBound::Bounded(1),
    };
    pub const ZERO_OR_MANY: Multiplicity = Multiplicity {
        lower: 0,
        upper: UpperBound::Unbounded,
    };
    pub const ONE_OR_MANY: Multiplicity = Multiplicity {
        lower: 1,
        upper: UpperBound::Unbounded,
    };

    /// Bounded range; `None` when `lower > upper`.
    pub fn bounded(lower: u32, upper: u32) -> Option<Self> {
        (lower <= upper).then_some(Multiplicity {
            lower,
            upper: UpperBound::Bounded(upper),
        })
    }

    pub fn at_least(lower: u32) -> Self {
        Multiplicity {
            lower,
            upper: UpperBound::Unbounded,
        }
    }

    /// Parse `"1"`, `"0..1"`, `"0..*"` or `"*"`. Returns `None` for anything
    /// else, including ranges with `lower > upper`.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if text == "*" {
            return Some(Multiplicity::ZERO_OR_MANY);
        }
        if let Some((lo, hi)) = text.split_once("..") {
            let lower: u32 = lo.trim().parse().ok()?;
            let hi = hi.trim();
            if hi == "*" {
                return Some(Multiplicity::at_least(lower));
            }
            return Multiplicity::bounded(lower, hi.parse().ok()?);
        }
        let n: u32 = text.parse().ok()?;
        Multiplicity::bounded(n, n)
    }

    /// Always-two-part rendering, e.g. `"1..1"` or `"0..*"`.
    pub fn range_label(&self) -> String {
        match self.upper {
            UpperBound::Bounded(n) => format!("{}..{}", self.lower, n),
            UpperBound::Unbounded => format!("{}..*", self.lower),
        }
    }
}

impl fmt::Display for Multiplicity {
    /// Compact form used in PlantUML: `"1"` for `1..1`, otherwise `m..n`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            UpperBound::Bounded(n) if n == self.lower => write!(f, "{}", self.lower),
            UpperBound::Bounded(n) => write!(f, "{}..{}", self.lower, n),
            UpperBound::Unbounded => write!(f, "{}..*", self.lower),
        }
    }
}

/// A directed, typed link between two classes, referenced by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relationship {
    pub source: String,
    pub target: String,
    pub kind: RelationshipKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_multiplicity: Option<Multiplicity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_multiplicity: Option<Multiplicity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Relationship {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        kind: RelationshipKind,
    ) -> Self {
        Relationship {
            source: source.into(),
            target: target.into(),
            kind,
            source_multiplicity: None,
            target_multiplicity: None,
            label: None,
        }
    }

    pub fn with_multiplicities(
        mut self,
        source: Option<Multiplicity>,
        target: Option<Multiplicity>,
    ) -> Self {
        self.source_multiplicity = source;
        self.target_multiplicity = target;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// A whole class diagram.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UmlDiagram {
    #[serde(default)]
    pub classes: Vec<UmlClass>,
    #[serde(default)]
    pub relationships: Vec<Relationship>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
}

/// A structural invariant breach found by [`UmlDiagram::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A relationship endpoint names a class that is not in the diagram.
    DanglingEndpoint { class_name: String },
    /// Two or more classes share the same normalized name.
    DuplicateClass { canonical: String },
    /// Generalizations carry no multiplicities.
    MultiplicityOnGeneralization { source: String, target: String },
    EmptyClassName,
    EmptyAttributeName { class: String },
    /// Two attributes of one class share the same normalized name.
    DuplicateAttribute { class: String, canonical: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingEndpoint { class_name } => {
                write!(f, "relationship endpoint `{class_name}` is not a class in the diagram")
            }
            Violation::DuplicateClass { canonical } => {
                write!(f, "multiple classes normalize to `{canonical}`")
            }
            Violation::MultiplicityOnGeneralization { source, target } => {
                write!(f, "generalization {source} -> {target} carries a multiplicity")
            }
            Violation::EmptyClassName => write!(f, "class with empty name"),
            Violation::EmptyAttributeName { class } => {
                write!(f, "class `{class}` has an attribute with an empty name")
            }
            Violation::DuplicateAttribute { class, canonical } => {
                write!(f, "class `{class}` has multiple attributes normalizing to `{canonical}`")
            }
        }
    }
}

impl UmlDiagram {
    pub fn new() -> Self {
        UmlDiagram::default()
    }

    /// Look up a class by its exact name.
    pub fn class(&self, name: &str) -> Option<&UmlClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// Total element count: classes + attributes + relationships.
    pub fn element_count(&self) -> usize {
        self.classes.len()
            + self.classes.iter().map(|c| c.attributes.len()).sum::<usize>()
            + self.relationships.len()
    }

    /// Check every structural invariant and return all breaches.
    ///
    /// An empty result means the diagram is structurally valid: every
    /// relationship endpoint resolves to exactly one class, class names are
    /// unique after normalization, and no generalization carries a
    /// multiplicity.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();

        let mut canonical_counts: BTreeMap<String, usize> = BTreeMap::new();
        for class in &self.classes {
            if class.name.trim().is_empty() {
                violations.push(Violation::EmptyClassName);
                continue;
            }
            *canonical_counts.entry(normalize_name(&class.name)).or_insert(0) += 1;
        }
        for (canonical, count) in &canonical_counts {
            if *count > 1 {
                violations.push(Violation::DuplicateClass {
                    canonical: canonical.clone(),
                });
            }
        }

        for class in &self.classes {
            let mut attr_counts: BTreeMap<String, usize> = BTreeMap::new();
            for attr in &class.attributes {
                if attr.name.trim().is_empty() {
                    violations.push(Violation::EmptyAttributeName {
                        class: class.name.clone(),
                    });
                    continue;
                }
                *attr_counts.entry(normalize_name(&attr.name)).or_insert(0) += 1;
            }
            for (canonical, count) in attr_counts {
                if count > 1 {
                    violations.push(Violation::DuplicateAttribute {
                        class: class.name.clone(),
                        canonical,
                    });
                }
            }
        }

        let names: HashSet<&str> = self.classes.iter().map(|c| c.name.as_str()).collect();
        for rel in &self.relationships {
            for endpoint in [&rel.source, &rel.target] {
                if !names.contains(endpoint.as_str()) {
                    violations.push(Violation::DanglingEndpoint {
                        class_name: endpoint.clone(),
                    });
                }
            }
            if rel.kind == RelationshipKind::Generalization
                && (rel.source_multiplicity.is_some() || rel.target_multiplicity.is_some())
            {
                violations.push(Violation::MultiplicityOnGeneralization {
                    source: rel.source.clone(),
                    target: rel.target.clone(),
                });
            }
        }

        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Normalized, set-based projection used for diagram equivalence.
    ///
    /// Two diagrams are considered equivalent when their signatures are
    /// equal; equality of signatures is an equivalence relation by
    /// construction.
    pub fn normalized_signature(&self) -> DiagramSignature {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                (
                    normalize_name(&c.name),
                    c.is_enumeration,
                    c.is_abstract,
                    c.attributes
                        .iter()
                        .map(|a| normalize_name(&a.name))
                        .collect::<BTreeSet<_>>(),
                )
            })
            .collect();
        let relationships = self
            .relationships
            .iter()
            .map(|r| {
                (
                    normalize_name(&r.source),
                    normalize_name(&r.target),
                    r.kind,
                    r.source_multiplicity,
                    r.target_multiplicity,
                    r.label.clone(),
                )
            })
            .collect();
        DiagramSignature {
            classes,
            relationships,
        }
    }
}

pub type ClassSignature = (String, bool, bool, BTreeSet<String>);
pub type RelationshipSignature = (
    String,
    String,
    RelationshipKind,
    Option<Multiplicity>,
    Option<Multiplicity>,
    Option<String>,
);

/// See [`UmlDiagram::normalized_signature`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramSignature {
    pub classes: BTreeSet<ClassSignature>,
    pub relationships: BTreeSet<RelationshipSignature>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_diagram_is_valid() {
        assert_eq!(UmlDiagram::new().validate(), Vec::new());
    }

    #[test]
    fn dangling_endpoint_reported() {
        let mut d = UmlDiagram::new();
        d.classes.push(UmlClass::new("A"));
        d.relationships
            .push(Relationship::new("A", "B", RelationshipKind::Association));
        assert_eq!(
            d.validate(),
            vec![Violation::DanglingEndpoint {
                class_name: "B".into()
            }]
        );
    }

    #[test]
    fn duplicate_class_after_normalization() {
        // "Orders" and "Order" both normalize to "order"
        let mut d = UmlDiagram::new();
        d.classes.push(UmlClass::new("Orders"));
        d.classes.push(UmlClass::new("Order"));
        assert_eq!(
            d.validate(),
            vec![Violation::DuplicateClass {
                canonical: "order".into()
            }]
        );
    }

    #[test]
    fn multiplicity_on_generalization_reported() {
        let mut d = UmlDiagram::new();
        d.classes.push(UmlClass::new("A"));
        d.classes.push(UmlClass::new("B"));
        d.relationships.push(
            Relationship::new("A", "B", RelationshipKind::Generalization)
                .with_multiplicities(Some(Multiplicity::ONE), None),
        );
        assert_eq!(
            d.validate(),
            vec![Violation::MultiplicityOnGeneralization {
                source: "A".into(),
                target: "B".into()
            }]
        );
    }

    #[test]
    fn duplicate_attribute_reported() {
        let mut d = UmlDiagram::new();
        d.classes
            .push(UmlClass::with_attributes("A", &["name", "Names"]));
        assert_eq!(
            d.validate(),
            vec![Violation::DuplicateAttribute {
                class: "A".into(),
                canonical: "name".into()
            }]
        );
    }

    #[test]
    fn multiplicity_parse_and_labels() {
        assert_eq!(Multiplicity::parse("1"), Some(Multiplicity::ONE));
        assert_eq!(Multiplicity::parse("*"), Some(Multiplicity::ZERO_OR_MANY));
        assert_eq!(Multiplicity::parse("0..*"), Some(Multiplicity::ZERO_OR_MANY));
        assert_eq!(Multiplicity::parse("1..*"), Some(Multiplicity::ONE_OR_MANY));
        assert_eq!(Multiplicity::parse("0..1"), Some(Multiplicity::ZERO_OR_ONE));
        assert_eq!(Multiplicity::parse("3..2"), None);
        assert_eq!(Multiplicity::parse("lots"), None);
        assert_eq!(Multiplicity::ONE.to_string(), "1");
        assert_eq!(Multiplicity::ONE.range_label(), "1..1");
        assert_eq!(Multiplicity::ZERO_OR_MANY.to_string(), "0..*");
        assert_eq!(Multiplicity::bounded(2, 5).unwrap().to_string(), "2..5");
    }

    #[test]
    fn element_count_sums_classes_attributes_relationships() {
        let mut d = UmlDiagram::new();
        d.classes.push(UmlClass::with_attributes("A", &["x", "y"]));
        d.classes.push(UmlClass::new("B"));
        d.relationships
            .push(Relationship::new("A", "B", RelationshipKind::Association));
        assert_eq!(d.element_count(), 5);
    }
}
