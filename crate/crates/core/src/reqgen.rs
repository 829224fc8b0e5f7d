//! Deterministic generation of structured natural-language requirements from
//! a class diagram.
//!
//! Every class yields a record (or catalogue, for enumerations) requirement,
//! every non-generalization relationship yields one association requirement,
//! and generalization families yield one classification requirement per
//! superclass. Audit attributes are pulled out of record requirements into
//! separate audit requirements. The output is fully deterministic: the same
//! diagram and configuration always produce byte-identical documents.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Multiplicity, Relationship, RelationshipKind, UmlDiagram, UpperBound, Violation,
};
use crate::normalize::normalize_name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequirementKind {
    Functional,
    NonFunctional,
}

/// Reference from a requirement back to the diagram element it covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ElementRef {
    Class {
        name: String,
    },
    Relationship {
        source: String,
        target: String,
        kind: RelationshipKind,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub id: String,
    pub kind: RequirementKind,
    pub text: String,
    pub trace: Vec<ElementRef>,
}

/// How multiplicities are written into association requirements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplicityStyle {
    /// Always the literal `m..n` form; the default, for byte-exact output.
    #[default]
    Literal,
    /// `exactly one` / `zero or more` / `one or more`, falling back to the
    /// literal form for other ranges.
    Readable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReqGenConfig {
    pub domain_prefix: String,
    /// Attribute names (compared after normalization) that are reported in a
    /// separate audit requirement instead of the class record requirement.
    pub audit_attribute_names: BTreeSet<String>,
    pub include_nonfunctional: bool,
    pub multiplicity_style: MultiplicityStyle,
}

impl Default for ReqGenConfig {
    fn default() -> Self {
        ReqGenConfig {
            domain_prefix: "REQ".to_string(),
            audit_attribute_names: ["created_by", "created_at", "modified_by", "modified_at"]
                .into_iter()
                .map(String::from)
                .collect(),
            include_nonfunctional: false,
            multiplicity_style: MultiplicityStyle::Literal,
        }
    }
}

impl ReqGenConfig {
    pub fn with_prefix(prefix: impl Into<String>) -> Self {
        ReqGenConfig {
            domain_prefix: prefix.into(),
            ..ReqGenConfig::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum ReqGenError {
    #[error("diagram fails validation: {0:?}")]
    InvalidDiagram(Vec<Violation>),
    #[error("domain prefix must not be empty")]
    EmptyPrefix,
    #[error("duplicate requirement id `{0}`")]
    DuplicateId(String),
}

/// Generate the requirement list for a valid diagram.
///
/// Document order: per class a record/catalogue requirement followed by its
/// audit requirement if any, then one association requirement per
/// non-generalization relationship, then one classification requirement per
/// generalization family, then the non-functional requirements when enabled.
/// IDs are `{prefix}-F{counter}` / `{prefix}-N{counter}` assigned in that
/// order.
pub fn generate_requirements(
    diagram: &UmlDiagram,
    cfg: &ReqGenConfig,
) -> Result<Vec<Requirement>, ReqGenError> {
    if cfg.domain_prefix.trim().is_empty() {
        return Err(ReqGenError::EmptyPrefix);
    }
    let violations = diagram.validate();
    if !violations.is_empty() {
        return Err(ReqGenError::InvalidDiagram(violations));
    }

    let audit: BTreeSet<String> = cfg
        .audit_attribute_names
        .iter()
        .map(|n| normalize_name(n))
        .collect();

    let mut reqs = Vec::new();
    let mut functional = Counter::new(&cfg.domain_prefix, 'F');
    let mut nonfunctional = Counter::new(&cfg.domain_prefix, 'N');

    for class in &diagram.classes {
        let (plain, audited): (Vec<&str>, Vec<&str>) = class
            .attributes
            .iter()
            .map(|a| a.name.as_str())
            .partition(|name| !audit.contains(&normalize_name(name)));

        let text = if class.is_enumeration {
            match plain.is_empty() {
                true => format!("The system shall maintain a catalogue of {} values.", class.name),
                false => format!(
                    "The system shall maintain a catalogue of {} values including {}.",
                    class.name,
                    plain.join(", ")
                ),
            }
        } else {
            match plain.is_empty() {
                true => format!("The system shall record {} information.", class.name),
                false => format!(
                    "The system shall record {} information including {}.",
                    class.name,
                    plain.join(", ")
                ),
            }
        };
        reqs.push(Requirement {
            id: functional.next_id(),
            kind: RequirementKind::Functional,
            text,
            trace: vec![ElementRef::Class {
                name: class.name.clone(),
            }],
        });

        if !audited.is_empty() {
            reqs.push(Requirement {
                id: functional.next_id(),
                kind: RequirementKind::Functional,
                text: format!(
                    "The system shall maintain audit information for {} including {}.",
                    class.name,
                    audited.join(", ")
                ),
                trace: vec![ElementRef::Class {
                    name: class.name.clone(),
                }],
            });
        }
    }

    for rel in &diagram.relationships {
        if rel.kind == RelationshipKind::Generalization {
            continue;
        }
        reqs.push(Requirement {
            id: functional.next_id(),
            kind: RequirementKind::Functional,
            text: association_sentence(rel, cfg.multiplicity_style),
            trace: vec![ElementRef::Relationship {
                source: rel.source.clone(),
                target: rel.target.clone(),
                kind: rel.kind,
            }],
        });
    }

    // Generalization families, grouped per superclass in first-occurrence order.
    let mut families: BTreeMap<usize, (String, Vec<&Relationship>)> = BTreeMap::new();
    let mut family_order: BTreeMap<String, usize> = BTreeMap::new();
    for rel in &diagram.relationships {
        if rel.kind != RelationshipKind::Generalization {
            continue;
        }
        let slot = *family_order
            .entry(rel.target.clone())
            .or_insert_with(|| families.len());
        families
            .entry(slot)
            .or_insert_with(|| (rel.target.clone(), Vec::new()))
            .1
            .push(rel);
    }
    for (superclass, members) in families.values() {
        let subclasses: Vec<&str> = members.iter().map(|r| r.source.as_str()).collect();
        reqs.push(Requirement {
            id: functional.next_id(),
            kind: RequirementKind::Functional,
            text: format!(
                "The system shall maintain instances of {} classified as either {}.",
                superclass,
                either_list(&subclasses)
            ),
            trace: members
                .iter()
                .map(|r| ElementRef::Relationship {
                    source: r.source.clone(),
                    target: r.target.clone(),
                    kind: r.kind,
                })
                .collect(),
        });
    }

    if cfg.include_nonfunctional {
        reqs.push(Requirement {
            id: nonfunctional.next_id(),
            kind: RequirementKind::NonFunctional,
            text: "The system shall enforce referential integrity across all associated records."
                .to_string(),
            trace: Vec::new(),
        });
        reqs.push(Requirement {
            id: nonfunctional.next_id(),
            kind: RequirementKind::NonFunctional,
            text: "The system shall apply consistent naming conventions to all recorded entities."
                .to_string(),
            trace: Vec::new(),
        });
    }

    Ok(reqs)
}

/// One requirement per line, sorted by id. Duplicate ids are rejected.
pub fn render_document(reqs: &[Requirement]) -> Result<String, ReqGenError> {
    let mut seen = BTreeSet::new();
    for req in reqs {
        if !seen.insert(&req.id) {
            return Err(ReqGenError::DuplicateId(req.id.clone()));
        }
    }
    let mut sorted: Vec<&Requirement> = reqs.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(sorted
        .iter()
        .map(|r| format!("{}: {}\n", r.id, r.text))
        .collect())
}

/// Requirement-id to traced-elements map, the JSON trace sidecar content.
pub fn trace_map(reqs: &[Requirement]) -> BTreeMap<String, Vec<ElementRef>> {
    reqs.iter()
        .map(|r| (r.id.clone(), r.trace.clone()))
        .collect()
}

struct Counter {
    prefix: String,
    letter: char,
    next: usize,
}

impl Counter {
    fn new(prefix: &str, letter: char) -> Self {
        Counter {
            prefix: prefix.to_string(),
            letter,
            next: 1,
        }
    }

    fn next_id(&mut self) -> String {
        let id = format!("{}-{}{:03}", self.prefix, self.letter, self.next);
        self.next += 1;
        id
    }
}

/// One sentence per relationship, written from the many side; ties go to the
/// class whose normalized name sorts first. The counted multiplicity is the
/// one on the other end (how many of the object class per subject instance).
fn association_sentence(rel: &Relationship, style: MultiplicityStyle) -> String {
    let source_rank = upper_rank(rel.source_multiplicity);
    let target_rank = upper_rank(rel.target_multiplicity);
    let source_first = match target_rank.cmp(&source_rank) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            normalize_name(&rel.source) <= normalize_name(&rel.target)
        }
    };
    let (subject, object, counted) = if source_first {
        (&rel.source, &rel.target, rel.target_multiplicity)
    } else {
        (&rel.target, &rel.source, rel.source_multiplicity)
    };
    match counted {
        Some(m) => format!(
            "The system shall associate each instance of {} with {} instances of {}.",
            subject,
            render_multiplicity(m, style),
            object
        ),
        None => format!(
            "The system shall associate each instance of {} with instances of {}.",
            subject, object
        ),
    }
}

/// Missing multiplicities are ranked unbounded so an unconstrained end is
/// treated as the many side.
fn upper_rank(m: Option<Multiplicity>) -> u64 {
    match m {
        Some(Multiplicity {
            upper: UpperBound::Bounded(n),
            ..
        }) => u64::from(n),
        Some(Multiplicity {
            upper: UpperBound::Unbounded,
            ..
        })
        | None => u64::MAX,
    }
}

fn render_multiplicity(m: Multiplicity, style: MultiplicityStyle) -> String {
    if style == MultiplicityStyle::Readable {
        match (m.lower, m.upper) {
            (1, UpperBound::Bounded(1)) => return "exactly one".to_string(),
            (0, UpperBound::Unbounded) => return "zero or more".to_string(),
            (1, UpperBound::Unbounded) => return "one or more".to_string(),
            _ => {}
        }
    }
    m.range_label()
}

fn either_list(items: &[&str]) -> String {
    match items {
        [] => String::new(),
        [only] => (*only).to_string(),
        [a, b] => format!("{a} or {b}"),
        _ => {
            let head = &items[..items.len() - 1];
            format!("{}, or {}", head.join(", "), items[items.len() - 1])
        }
    }
}
