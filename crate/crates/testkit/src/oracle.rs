//! Brute-force matching oracle: exhaustive pairwise enumeration over every
//! gold/generated element combination.
//!
//! This is intentionally written as nested loops with no set intersections so
//! that it stays independent of the evaluator's implementation path. Keep it
//! dumb.

use std::collections::BTreeSet;

use nomad_core::model::{RelationshipKind, UmlDiagram};
use nomad_core::normalize_name;

pub fn match_classes(gold: &UmlDiagram, gen: &UmlDiagram) -> BTreeSet<String> {
    let mut matched = BTreeSet::new();
    for gold_class in &gold.classes {
        for gen_class in &gen.classes {
            if normalize_name(&gold_class.name) == normalize_name(&gen_class.name) {
                matched.insert(normalize_name(&gold_class.name));
            }
        }
    }
    matched
}

pub fn match_attributes(gold: &UmlDiagram, gen: &UmlDiagram) -> BTreeSet<(String, String)> {
    let matched_classes = match_classes(gold, gen);
    let mut matched = BTreeSet::new();
    for gold_class in &gold.classes {
        let class_key = normalize_name(&gold_class.name);
        if !matched_classes.contains(&class_key) {
            continue;
        }
        for gen_class in &gen.classes {
            if normalize_name(&gen_class.name) != class_key {
                continue;
            }
            for gold_attr in &gold_class.attributes {
                for gen_attr in &gen_class.attributes {
                    if normalize_name(&gold_attr.name) == normalize_name(&gen_attr.name) {
                        matched.insert((class_key.clone(), normalize_name(&gold_attr.name)));
                    }
                }
            }
        }
    }
    matched
}

type Triple = (String, String, RelationshipKind);

fn triples(diagram: &UmlDiagram) -> Vec<Triple> {
    diagram
        .relationships
        .iter()
        .map(|r| (normalize_name(&r.source), normalize_name(&r.target), r.kind))
        .collect()
}

/// Gold triples with an exact counterpart in the generated diagram.
pub fn hard_matches(gold: &UmlDiagram, gen: &UmlDiagram) -> BTreeSet<Triple> {
    let mut matched = BTreeSet::new();
    for gold_triple in triples(gold) {
        for gen_triple in triples(gen) {
            if gold_triple == gen_triple {
                matched.insert(gold_triple.clone());
            }
        }
    }
    matched
}

/// Gold triples whose endpoints are connected in the generated diagram in
/// either direction, regardless of kind.
pub fn soft_matches_gold(gold: &UmlDiagram, gen: &UmlDiagram) -> BTreeSet<Triple> {
    let mut matched = BTreeSet::new();
    for (gs, gt, gk) in triples(gold) {
        for (ms, mt, _) in triples(gen) {
            if (gs == ms && gt == mt) || (gs == mt && gt == ms) {
                matched.insert((gs.clone(), gt.clone(), gk));
            }
        }
    }
    matched
}

/// Mirror of [`soft_matches_gold`] from the generated side.
pub fn soft_matches_gen(gold: &UmlDiagram, gen: &UmlDiagram) -> BTreeSet<Triple> {
    soft_matches_gold(gen, gold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nomad_core::model::{Relationship, UmlClass};

    #[test]
    fn oracle_on_a_tiny_pair() {
        let mut gold = UmlDiagram::new();
        gold.classes.push(UmlClass::with_attributes("Customer", &["name"]));
        gold.classes.push(UmlClass::new("Order"));
        gold.relationships.push(Relationship::new(
            "Customer",
            "Order",
            RelationshipKind::Association,
        ));
        let mut gen = UmlDiagram::new();
        gen.classes.push(UmlClass::with_attributes("Customers", &["Name"]));
        gen.classes.push(UmlClass::new("Orders"));
        gen.relationships.push(Relationship::new(
            "Orders",
            "Customers",
            RelationshipKind::Aggregation,
        ));

        assert_eq!(
            match_classes(&gold, &gen),
            BTreeSet::from(["customer".to_string(), "order".to_string()])
        );
        assert_eq!(
            match_attributes(&gold, &gen),
            BTreeSet::from([("customer".to_string(), "name".to_string())])
        );
        assert!(hard_matches(&gold, &gen).is_empty());
        assert_eq!(soft_matches_gold(&gold, &gen).len(), 1);
        assert_eq!(soft_matches_gen(&gold, &gen).len(), 1);
    }
}
