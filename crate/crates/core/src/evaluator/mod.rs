//! Structural matching of generated versus gold diagrams and the
//! precision/recall/F1 metrics computed from the matches.
//!
//! All matching happens on normalized names (see [`crate::normalize`]).
//! Classes and attributes are compared as sets; relationships are compared as
//! normalized `(source, target, kind)` triples under two criteria: *hard*
//! requires exact agreement on source, target and kind, *soft* only requires
//! that the two classes are connected at all, ignoring kind and direction.

mod report;
mod taxonomy;

pub use report::{render_report_rows, render_report_table, render_taxonomy_summary};
pub use taxonomy::{
    classify_errors, load_annotations, AnnotationError, Dimension, ErrorRecord, ErrorType,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::UmlDiagram;
use crate::normalize::normalize_name;

/// A relationship as a normalized `(source, target, kind)` triple.
pub type RelTriple = (String, String, crate::model::RelationshipKind);

/// Everything that matched between a gold and a generated diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    /// Canonical class names present in both diagrams.
    pub matched_classes: BTreeSet<String>,
    /// `(class, attribute)` canonical pairs, scoped to matched classes.
    pub matched_attributes: BTreeSet<(String, String)>,
    /// Gold triples with an exact counterpart in the generated diagram.
    pub matched_relationships_hard: BTreeSet<RelTriple>,
    /// Gold triples whose endpoints are connected in the generated diagram,
    /// regardless of kind and direction.
    pub matched_relationships_soft: BTreeSet<RelTriple>,
    /// Symmetric counterpart used for soft precision: generated triples whose
    /// endpoints are connected in the gold diagram.
    pub matched_relationships_soft_gen: BTreeSet<RelTriple>,
}

/// Canonical class names present in both diagrams (normalization first, then
/// exact equality on the canonical forms).
pub fn match_classes(gold: &UmlDiagram, gen: &UmlDiagram) -> BTreeSet<String> {
    let gold_names = class_name_set(gold);
    let gen_names = class_name_set(gen);
    gold_names.intersection(&gen_names).cloned().collect()
}

/// Attribute matches scoped to matched classes.
///
/// Only attributes of classes present in both diagrams participate; classes
/// outside the match contribute no attribute counts anywhere, which keeps a
/// missing class from also being penalized for each of its attributes.
pub fn match_attributes(
    gold: &UmlDiagram,
    gen: &UmlDiagram,
    matched_classes: &BTreeSet<String>,
) -> BTreeSet<(String, String)> {
    let gold_attrs = scoped_attribute_set(gold, matched_classes);
    let gen_attrs = scoped_attribute_set(gen, matched_classes);
    gold_attrs.intersection(&gen_attrs).cloned().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    Hard,
    Soft,
}

/// Gold triples matched under the chosen criterion.
pub fn match_relationships(
    gold: &UmlDiagram,
    gen: &UmlDiagram,
    mode: MatchMode,
) -> BTreeSet<RelTriple> {
    let gold_triples = relationship_set(gold);
    match mode {
        MatchMode::Hard => {
            let gen_triples = relationship_set(gen);
            gold_triples.intersection(&gen_triples).cloned().collect()
        }
        MatchMode::Soft => {
            let gen_pairs = endpoint_pairs(gen);
            gold_triples
                .into_iter()
                .filter(|(s, t, _)| {
                    gen_pairs.contains(&(s.clone(), t.clone()))
                        || gen_pairs.contains(&(t.clone(), s.clone()))
                })
                .collect()
        }
    }
}

/// Compute every match set for a diagram pair.
pub fn compute_matches(gold: &UmlDiagram, gen: &UmlDiagram) -> MatchResult {
    let matched_classes = match_classes(gold, gen);
    let matched_attributes = match_attributes(gold, gen, &matched_classes);
    let matched_relationships_hard = match_relationships(gold, gen, MatchMode::Hard);
    let matched_relationships_soft = match_relationships(gold, gen, MatchMode::Soft);
    // mirror of the soft rule, applied from the generated side
    let gold_pairs = endpoint_pairs(gold);
    let matched_relationships_soft_gen = relationship_set(gen)
        .into_iter()
        .filter(|(s, t, _)| {
            gold_pairs.contains(&(s.clone(), t.clone()))
                || gold_pairs.contains(&(t.clone(), s.clone()))
        })
        .collect();
    MatchResult {
        matched_classes,
        matched_attributes,
        matched_relationships_hard,
        matched_relationships_soft,
        matched_relationships_soft_gen,
    }
}

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub const PERFECT: Prf = Prf {
        precision: 1.0,
        recall: 1.0,
        f1: 1.0,
    };
}

/// P = matched/generated, R = matched/gold, F1 = harmonic mean.
///
/// Empty-denominator conventions: precision is 1 when both sets are empty and
/// 0 when only the generated set is empty; recall mirrors this on the gold
/// side. F1 is 0 whenever P + R = 0.
pub fn compute_prf(gold_count: usize, gen_count: usize, matched_count: usize) -> Prf {
    prf_from_counts(matched_count, gen_count, matched_count, gold_count)
}

fn prf_from_counts(
    matched_for_precision: usize,
    gen_count: usize,
    matched_for_recall: usize,
    gold_count: usize,
) -> Prf {
    let precision = if gen_count == 0 {
        if gold_count == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        matched_for_precision as f64 / gen_count as f64
    };
    let recall = if gold_count == 0 {
        if gen_count == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        matched_for_recall as f64 / gold_count as f64
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Prf {
        precision,
        recall,
        f1,
    }
}

/// The overall score is the unweighted mean of the four per-dimension F1s.
pub fn average_of(f1s: [f64; 4]) -> f64 {
    f1s.iter().sum::<f64>() / 4.0
}

/// Per-dimension scores plus the classified error list for one diagram pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classes: Prf,
    pub attributes: Prf,
    pub relationships_strict: Prf,
    pub relationships_relaxed: Prf,
    pub average: f64,
    pub errors: Vec<ErrorRecord>,
}

/// Evaluate a generated diagram against a gold reference.
///
/// `annotations` is an optional human-annotation overlay whose records are
/// appended to the automatically classified errors; the semantic categories
/// (class misrepresented, attribute wrong) only ever come from there.
pub fn evaluate(
    gold: &UmlDiagram,
    gen: &UmlDiagram,
    annotations: Option<&[ErrorRecord]>,
) -> EvalReport {
    let matches = compute_matches(gold, gen);

    let classes = compute_prf(
        class_name_set(gold).len(),
        class_name_set(gen).len(),
        matches.matched_classes.len(),
    );

    let gold_attrs = scoped_attribute_set(gold, &matches.matched_classes);
    let gen_attrs = scoped_attribute_set(gen, &matches.matched_classes);
    let attributes = compute_prf(
        gold_attrs.len(),
        gen_attrs.len(),
        matches.matched_attributes.len(),
    );

    // Generated relationships count as a multiset: surplus duplicate copies
    // inflate the precision denominator but match at most once.
    let gold_rel_count = relationship_set(gold).len();
    let gen_rel_count = gen.relationships.len();
    let relationships_strict = prf_from_counts(
        matches.matched_relationships_hard.len(),
        gen_rel_count,
        matches.matched_relationships_hard.len(),
        gold_rel_count,
    );
    let relationships_relaxed = prf_from_counts(
        matches.matched_relationships_soft_gen.len(),
        gen_rel_count,
        matches.matched_relationships_soft.len(),
        gold_rel_count,
    );

    let mut errors = classify_errors(gold, gen, &matches);
    if let Some(extra) = annotations {
        errors.extend(extra.iter().cloned());
    }

    let average = average_of([
        classes.f1,
        attributes.f1,
        relationships_strict.f1,
        relationships_relaxed.f1,
    ]);

    EvalReport {
        classes,
        attributes,
        relationships_strict,
        relationships_relaxed,
        average,
        errors,
    }
}

// ---- shared projections -------------------------------------------------

pub(crate) fn class_name_set(diagram: &UmlDiagram) -> BTreeSet<String> {
    diagram
        .classes
        .iter()
        .map(|c| normalize_name(&c.name))
        .collect()
}

/// Canonical `(class, attribute)` pairs for classes inside `scope`.
/// Classes that normalize to the same canonical name contribute the union of
/// their attributes.
pub(crate) fn scoped_attribute_set(
    diagram: &UmlDiagram,
    scope: &BTreeSet<String>,
) -> BTreeSet<(String, String)> {
    let mut set = BTreeSet::new();
    for class in &diagram.classes {
        let canonical = normalize_name(&class.name);
        if !scope.contains(&canonical) {
            continue;
        }
        for attr in &class.attributes {
            set.insert((canonical.clone(), normalize_name(&attr.name)));
        }
    }
    set
}

/// Distinct normalized triples.
pub(crate) fn relationship_set(diagram: &UmlDiagram) -> BTreeSet<RelTriple> {
    diagram
        .relationships
        .iter()
        .map(|r| (normalize_name(&r.source), normalize_name(&r.target), r.kind))
        .collect()
}

/// Normalized triples with their multiset counts.
pub(crate) fn relationship_multiset(diagram: &UmlDiagram) -> BTreeMap<RelTriple, usize> {
    let mut counts = BTreeMap::new();
    for rel in &diagram.relationships {
        *counts
            .entry((normalize_name(&rel.source), normalize_name(&rel.target), rel.kind))
            .or_insert(0) += 1;
    }
    counts
}

pub(crate) fn endpoint_pairs(diagram: &UmlDiagram) -> BTreeSet<(String, String)> {
    diagram
        .relationships
        .iter()
        .map(|r| (normalize_name(&r.source), normalize_name(&r.target)))
        .collect()
}
