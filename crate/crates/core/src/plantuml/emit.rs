//! Deterministic canonical PlantUML emission.

use std::fmt::Write;
use std::sync::LazyLock;

use regex::Regex;

use crate::model::{RelationshipKind, UmlClass, UmlDiagram};
use crate::normalize::normalize_name;
use crate::plantuml::{EmitError, PlantUmlSource};

static BARE_IDENT_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[A-Za-z_][\w.]*$").unwrap());

/// Emit a diagram in canonical form: fenced, classes sorted by normalized
/// name, attributes in stored order, relationships sorted by
/// (source, target, kind).
///
/// Output is deterministic (same diagram, same bytes) and re-parses to an
/// equivalent diagram. Diagrams with validation violations are rejected.
pub fn emit_plantuml(diagram: &UmlDiagram) -> Result<PlantUmlSource, EmitError> {
    let violations = diagram.validate();
    if !violations.is_empty() {
        return Err(EmitError::InvalidDiagram(violations));
    }

    let mut out = String::from("@startuml\n");
    if let Some(title) = &diagram.title {
        writeln!(out, "title {title}").unwrap();
    }

    let mut classes: Vec<&UmlClass> = diagram.classes.iter().collect();
    classes.sort_by_cached_key(|c| normalize_name(&c.name));
    for class in classes {
        let name = quoted(&class.name);
        let keyword = if class.is_enumeration {
            "enum".to_string()
        } else if class.is_abstract {
            "abstract class".to_string()
        } else {
            "class".to_string()
        };
        match &class.stereotype {
            Some(stereo) => writeln!(out, "{keyword} {name} <<{stereo}>> {{").unwrap(),
            None => writeln!(out, "{keyword} {name} {{").unwrap(),
        }
        for attr in &class.attributes {
            out.push_str("  ");
            if let Some(vis) = attr.visibility {
                out.push(vis.marker());
            }
            out.push_str(&attr.name);
            if let Some(ty) = &attr.declared_type {
                write!(out, " : {ty}").unwrap();
            }
            out.push('\n');
        }
        for op in &class.operations {
            writeln!(out, "  {op}").unwrap();
        }
        out.push_str("}\n");
    }

    let mut rels: Vec<_> = diagram.relationships.iter().collect();
    rels.sort_by_cached_key(|r| {
        (
            normalize_name(&r.source),
            normalize_name(&r.target),
            r.kind,
            r.source_multiplicity,
            r.target_multiplicity,
            r.label.clone(),
        )
    });
    for rel in rels {
        let arrow = match rel.kind {
            RelationshipKind::Association => "--",
            RelationshipKind::Aggregation => "o--",
            RelationshipKind::Composition => "*--",
            RelationshipKind::Generalization => "--|>",
        };
        out.push_str(&quoted(&rel.source));
        if let Some(m) = rel.source_multiplicity {
            write!(out, " \"{m}\"").unwrap();
        }
        write!(out, " {arrow} ").unwrap();
        if let Some(m) = rel.target_multiplicity {
            write!(out, "\"{m}\" ").unwrap();
        }
        out.push_str(&quoted(&rel.target));
        if let Some(label) = &rel.label {
            write!(out, " : {label}").unwrap();
        }
        out.push('\n');
    }

    out.push_str("@enduml\n");
    Ok(PlantUmlSource(out))
}

fn quoted(name: &str) -> String {
    if BARE_IDENT_RE.is_match(name) {
        name.to_string()
    } else {
        format!("\"{name}\"")
    }
}
