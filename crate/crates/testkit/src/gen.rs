//! Seeded generators for valid diagrams, relational schemas, and parser fuzz
//! input.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use nomad_core::model::{
    Multiplicity, Relationship, RelationshipKind, UmlAttribute, UmlClass, UmlDiagram,
};
use nomad_core::schema::{Column, ForeignKey, RelationalSchema, Table};

/// (singular, plural) name stems; the plural must normalize back to the
/// singular so that generated surface variants collide exactly on canonical
/// names.
const CLASS_STEMS: &[(&str, &str)] = &[
    ("customer", "customers"),
    ("order", "orders"),
    ("product", "products"),
    ("invoice", "invoices"),
    ("shipment", "shipments"),
    ("category", "categories"),
    ("supplier", "suppliers"),
    ("employee", "employees"),
    ("payment", "payments"),
    ("address", "addresses"),
    ("carrier", "carriers"),
    ("ticket", "tickets"),
];

const ATTR_STEMS: &[(&str, &str)] = &[
    ("name", "names"),
    ("city", "cities"),
    ("price", "prices"),
    ("status", "statuses"),
    ("quantity", "quantities"),
    ("email", "emails"),
    ("phone", "phones"),
    ("code", "codes"),
    ("label", "labels"),
    ("weight", "weights"),
];

const KINDS: [RelationshipKind; 4] = [
    RelationshipKind::Association,
    RelationshipKind::Aggregation,
    RelationshipKind::Composition,
    RelationshipKind::Generalization,
];

/// Render a stem in one of several surface forms that all normalize back to
/// the singular stem.
fn surface(rng: &mut ChaCha8Rng, singular: &str, plural: &str) -> String {
    let base = if rng.gen_bool(0.4) { plural } else { singular };
    match rng.gen_range(0..4) {
        0 => base.to_string(),
        1 => {
            let mut chars = base.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
                None => String::new(),
            }
        }
        2 => base.to_uppercase(),
        _ => base.replace(' ', "_"),
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small valid diagram for matching tests: up to `max_classes` classes and
/// `max_relationships` relationships drawn from a fixed name pool, with
/// surface-form variation so normalization matters.
pub fn diagram_from_seed(seed: u64, max_classes: usize, max_relationships: usize) -> UmlDiagram {
    build_diagram(&mut rng_for(seed), max_classes, max_relationships, false)
}

/// Two diagrams over the same name pool, as a gold/generated pair.
pub fn diagram_pair_from_seed(
    seed: u64,
    max_classes: usize,
    max_relationships: usize,
) -> (UmlDiagram, UmlDiagram) {
    let mut rng = rng_for(seed);
    let gold = build_diagram(&mut rng, max_classes, max_relationships, false);
    let gen = build_diagram(&mut rng, max_classes, max_relationships, false);
    (gold, gen)
}

/// A richer valid diagram for round-trip tests: multiplicities, labels,
/// enumerations, abstract classes, stereotypes, types, and operations.
pub fn rich_diagram_from_seed(seed: u64) -> UmlDiagram {
    build_diagram(&mut rng_for(seed), 6, 8, true)
}

fn build_diagram(
    rng: &mut ChaCha8Rng,
    max_classes: usize,
    max_relationships: usize,
    rich: bool,
) -> UmlDiagram {
    let class_count = rng.gen_range(0..=max_classes);
    let mut stems: Vec<&(&str, &str)> = CLASS_STEMS.iter().collect();
    stems.shuffle(rng);
    stems.truncate(class_count);

    let mut diagram = UmlDiagram::new();
    for (singular, plural) in stems.iter() {
        let mut class = UmlClass::new(surface(rng, singular, plural));
        let attr_count = rng.gen_range(0..=4usize);
        let mut attr_stems: Vec<&(&str, &str)> = ATTR_STEMS.iter().collect();
        attr_stems.shuffle(rng);
        for (a_sing, a_plur) in attr_stems.into_iter().take(attr_count) {
            let mut attr = UmlAttribute::new(surface(rng, a_sing, a_plur));
            if rich && rng.gen_bool(0.4) {
                attr.declared_type = Some(
                    ["String", "int", "Date", "bool"][rng.gen_range(0..4)].to_string(),
                );
            }
            if rich && rng.gen_bool(0.3) {
                attr.visibility = Some(nomad_core::model::Visibility::Public);
            }
            class.attributes.push(attr);
        }
        if rich {
            if rng.gen_bool(0.15) {
                class.is_enumeration = true;
            } else if rng.gen_bool(0.15) {
                class.is_abstract = true;
            }
            if rng.gen_bool(0.1) {
                class.stereotype = Some("entity".to_string());
            }
            if rng.gen_bool(0.2) {
                class.operations.push("total() : int".to_string());
            }
        }
        diagram.classes.push(class);
    }

    if diagram.classes.is_empty() {
        return diagram;
    }

    let rel_count = rng.gen_range(0..=max_relationships);
    for _ in 0..rel_count {
        // occasionally duplicate an existing relationship to exercise
        // multiset handling
        if !diagram.relationships.is_empty() && rng.gen_bool(0.1) {
            let existing = diagram.relationships[rng.gen_range(0..diagram.relationships.len())]
                .clone();
            diagram.relationships.push(existing);
            continue;
        }
        let source = diagram.classes[rng.gen_range(0..diagram.classes.len())].name.clone();
        let target = diagram.classes[rng.gen_range(0..diagram.classes.len())].name.clone();
        let kind = KINDS[rng.gen_range(0..KINDS.len())];
        let mut rel = Relationship::new(source, target, kind);
        if kind != RelationshipKind::Generalization && rng.gen_bool(0.6) {
            rel.source_multiplicity = Some(random_multiplicity(rng));
            rel.target_multiplicity = Some(random_multiplicity(rng));
        }
        if rich && kind != RelationshipKind::Generalization && rng.gen_bool(0.3) {
            rel.label = Some("linked".to_string());
        }
        diagram.relationships.push(rel);
    }

    diagram
}

fn random_multiplicity(rng: &mut ChaCha8Rng) -> Multiplicity {
    match rng.gen_range(0..4) {
        0 => Multiplicity::ONE,
        1 => Multiplicity::ZERO_OR_ONE,
        2 => Multiplicity::ZERO_OR_MANY,
        _ => Multiplicity::ONE_OR_MANY,
    }
}

/// A valid relational schema: entity tables with a single-column `id`
/// primary key, random foreign keys to other entity tables, and a few pure
/// join tables. Join tables are never referenced by other tables.
pub fn schema_from_seed(seed: u64, max_tables: usize) -> RelationalSchema {
    let mut rng = rng_for(seed);
    let table_count = rng.gen_range(1..=max_tables.max(1));
    let mut schema = RelationalSchema::default();

    for i in 0..table_count {
        let name = format!("table_{i}");
        let mut columns = vec![Column {
            name: "id".to_string(),
            sql_type: "INTEGER".to_string(),
            nullable: false,
            unique: true,
        }];
        for c in 0..rng.gen_range(0..4usize) {
            columns.push(Column {
                name: format!("field_{c}"),
                sql_type: "TEXT".to_string(),
                nullable: rng.gen_bool(0.5),
                unique: false,
            });
        }
        let mut foreign_keys = Vec::new();
        if i > 0 {
            for f in 0..rng.gen_range(0..=2usize.min(i)) {
                let referenced = rng.gen_range(0..i);
                let col = Column {
                    name: format!("fk_{f}"),
                    sql_type: "INTEGER".to_string(),
                    nullable: rng.gen_bool(0.3),
                    unique: rng.gen_bool(0.2),
                };
                columns.push(col);
                foreign_keys.push(ForeignKey {
                    columns: vec![format!("fk_{f}")],
                    referenced_table: format!("table_{referenced}"),
                    referenced_columns: vec!["id".to_string()],
                });
            }
        }
        schema.tables.push(Table {
            name,
            columns,
            primary_key: vec!["id".to_string()],
            foreign_keys,
        });
    }

    // append pure join tables between random pairs of the entity tables
    let join_count = rng.gen_range(0..=(table_count / 3));
    for j in 0..join_count {
        let a = rng.gen_range(0..table_count);
        let b = rng.gen_range(0..table_count);
        schema.tables.push(Table {
            name: format!("join_{j}"),
            columns: vec![
                Column {
                    name: "left_id".to_string(),
                    sql_type: "INTEGER".to_string(),
                    nullable: false,
                    unique: false,
                },
                Column {
                    name: "right_id".to_string(),
                    sql_type: "INTEGER".to_string(),
                    nullable: false,
                    unique: false,
                },
            ],
            primary_key: vec!["left_id".to_string(), "right_id".to_string()],
            foreign_keys: vec![
                ForeignKey {
                    columns: vec!["left_id".to_string()],
                    referenced_table: format!("table_{a}"),
                    referenced_columns: vec!["id".to_string()],
                },
                ForeignKey {
                    columns: vec!["right_id".to_string()],
                    referenced_table: format!("table_{b}"),
                    referenced_columns: vec!["id".to_string()],
                },
            ],
        });
    }

    schema
}

/// Arbitrary text assembled from PlantUML-ish fragments and junk; used to
/// check that the parser never panics.
pub fn fuzz_text_from_seed(seed: u64) -> String {
    let mut rng = rng_for(seed);
    const FRAGMENTS: &[&str] = &[
        "@startuml",
        "@enduml",
        "class",
        "enum",
        "abstract",
        "interface",
        "{",
        "}",
        "{}",
        "--|>",
        "<|--",
        "*--",
        "--*",
        "o--",
        "--o",
        "-->",
        "<--",
        "--",
        "..>",
        ":",
        "\"0..*\"",
        "\"1\"",
        "\"",
        "<<entity>>",
        "as",
        "title",
        "note",
        "end note",
        "package P {",
        "skinparam x y",
        "A",
        "B",
        "Order Details",
        "+name : String",
        "doStuff()",
        "ключ",
        "注文",
        "\u{0}",
        "\t",
        "'comment",
        "/'",
        "'/",
        "-d->",
        "x" ,
    ];
    let line_count = rng.gen_range(0..20);
    let mut out = String::new();
    for _ in 0..line_count {
        let token_count = rng.gen_range(0..8);
        let mut line = Vec::new();
        for _ in 0..token_count {
            line.push(FRAGMENTS[rng.gen_range(0..FRAGMENTS.len())]);
        }
        out.push_str(&line.join(" "));
        if rng.gen_bool(0.2) {
            // raw bytes for good measure
            out.push(char::from_u32(rng.gen_range(1..0x300)).unwrap_or('?'));
        }
        out.push(if rng.gen_bool(0.9) { '\n' } else { '\r' });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nomad_core::normalize_name;

    #[test]
    fn stem_plurals_normalize_back_to_singulars() {
        for (singular, plural) in CLASS_STEMS.iter().chain(ATTR_STEMS) {
            assert_eq!(
                normalize_name(plural),
                normalize_name(singular),
                "{plural} does not normalize to {singular}"
            );
        }
    }

    #[test]
    fn generated_diagrams_are_valid() {
        for seed in 0..200 {
            let diagram = diagram_from_seed(seed, 6, 8);
            assert!(diagram.is_valid(), "seed {seed}: {:?}", diagram.validate());
            let rich = rich_diagram_from_seed(seed);
            assert!(rich.is_valid(), "seed {seed}: {:?}", rich.validate());
        }
    }

    #[test]
    fn generated_schemas_are_valid() {
        for seed in 0..200 {
            let schema = schema_from_seed(seed, 9);
            assert!(schema.validate().is_ok(), "seed {seed}");
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(diagram_from_seed(42, 6, 8), diagram_from_seed(42, 6, 8));
        assert_eq!(schema_from_seed(42, 9), schema_from_seed(42, 9));
        assert_eq!(fuzz_text_from_seed(42), fuzz_text_from_seed(42));
    }
}
