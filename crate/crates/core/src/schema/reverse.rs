//! Rule-based reverse engineering of a class diagram from a relational
//! schema.
//!
//! Rules: every table that is not a pure join table becomes a class with one
//! attribute per non-foreign-key column; every foreign key becomes an
//! association whose cardinality follows from the key's uniqueness and
//! nullability; every pure join table becomes a single many-to-many
//! association between the two referenced classes.

use std::collections::BTreeSet;

use crate::model::{Multiplicity, Relationship, RelationshipKind, UmlAttribute, UmlClass, UmlDiagram};
use crate::schema::{ForeignKey, RelationalSchema, SchemaError, Table};

/// Names of tables that exist purely to realize a many-to-many relationship.
///
/// A table is a join table iff it has exactly two foreign keys, every
/// non-foreign-key column is part of the primary key or absent, and its
/// primary key is exactly the union of the foreign-key columns.
pub fn detect_join_tables(schema: &RelationalSchema) -> BTreeSet<String> {
    schema
        .tables
        .iter()
        .filter(|t| is_join_table(t))
        .map(|t| t.name.clone())
        .collect()
}

fn is_join_table(table: &Table) -> bool {
    if table.foreign_keys.len() != 2 {
        return false;
    }
    let fk_columns: BTreeSet<String> = table
        .foreign_keys
        .iter()
        .flat_map(|fk| fk.columns.iter())
        .map(|c| c.to_lowercase())
        .collect();
    let pk: BTreeSet<String> = table.primary_key.iter().map(|c| c.to_lowercase()).collect();
    let non_fk_in_pk = table.columns.iter().all(|c| {
        let lower = c.name.to_lowercase();
        fk_columns.contains(&lower) || pk.contains(&lower)
    });
    non_fk_in_pk && pk == fk_columns
}

/// Multiplicities implied by a foreign key, as
/// `(referenced side, owning side)`.
///
/// A unique, non-nullable key is one-to-one; a non-unique, non-nullable key
/// is one-to-many. Nullable keys lower the referenced-side lower bound to
/// zero, since a NULL key means the owning row may reference nothing.
pub fn infer_cardinality(fk: &ForeignKey, owning_table: &Table) -> (Multiplicity, Multiplicity) {
    let unique = fk_is_unique(fk, owning_table);
    let nullable = fk
        .columns
        .iter()
        .any(|c| owning_table.column(c).is_none_or(|col| col.nullable));
    let referenced_side = if nullable {
        Multiplicity::ZERO_OR_ONE
    } else {
        Multiplicity::ONE
    };
    let owning_side = if unique {
        Multiplicity::ONE
    } else {
        Multiplicity::ZERO_OR_MANY
    };
    (referenced_side, owning_side)
}

/// A key is unique when every column carries a UNIQUE constraint, or when the
/// key columns are exactly the owning table's primary key.
fn fk_is_unique(fk: &ForeignKey, owning_table: &Table) -> bool {
    let all_unique = fk
        .columns
        .iter()
        .all(|c| owning_table.column(c).is_some_and(|col| col.unique));
    if all_unique {
        return true;
    }
    let fk_set: BTreeSet<String> = fk.columns.iter().map(|c| c.to_lowercase()).collect();
    let pk_set: BTreeSet<String> = owning_table
        .primary_key
        .iter()
        .map(|c| c.to_lowercase())
        .collect();
    !pk_set.is_empty() && fk_set == pk_set
}

/// Reverse-engineer a gold diagram from a validated schema.
///
/// Foreign-key columns are dropped from class attributes: the association
/// replaces them, and carrying both would distort attribute counts at
/// evaluation time. All derived relationships are plain associations;
/// aggregation/composition refinements are manual curation outside these
/// rules. Names are carried verbatim — normalization happens only at
/// evaluation time.
pub fn reverse_engineer(schema: &RelationalSchema) -> Result<UmlDiagram, SchemaError> {
    schema.validate()?;
    let join_tables = detect_join_tables(schema);
    let mut diagram = UmlDiagram::new();

    for table in &schema.tables {
        if join_tables.contains(&table.name) {
            continue;
        }
        let fk_columns: BTreeSet<String> = table
            .foreign_keys
            .iter()
            .flat_map(|fk| fk.columns.iter())
            .map(|c| c.to_lowercase())
            .collect();
        let mut class = UmlClass::new(&table.name);
        class.attributes = table
            .columns
            .iter()
            .filter(|c| !fk_columns.contains(&c.name.to_lowercase()))
            .map(|c| UmlAttribute::typed(&c.name, &c.sql_type))
            .collect();
        diagram.classes.push(class);
    }

    for table in &schema.tables {
        if join_tables.contains(&table.name) {
            continue;
        }
        for fk in &table.foreign_keys {
            let (referenced_mult, owning_mult) = infer_cardinality(fk, table);
            let referenced = declared_name(schema, &fk.referenced_table);
            diagram.relationships.push(
                Relationship::new(referenced, &table.name, RelationshipKind::Association)
                    .with_multiplicities(Some(referenced_mult), Some(owning_mult)),
            );
        }
    }

    for table in &schema.tables {
        if !join_tables.contains(&table.name) {
            continue;
        }
        let left = declared_name(schema, &table.foreign_keys[0].referenced_table);
        let right = declared_name(schema, &table.foreign_keys[1].referenced_table);
        diagram.relationships.push(
            Relationship::new(left, right, RelationshipKind::Association)
                .with_multiplicities(
                    Some(Multiplicity::ZERO_OR_MANY),
                    Some(Multiplicity::ZERO_OR_MANY),
                )
                .with_label(&table.name),
        );
    }

    Ok(diagram)
}

/// Endpoint names use the referenced table's declared spelling so that they
/// resolve exactly against the generated class names.
fn declared_name(schema: &RelationalSchema, referenced: &str) -> String {
    schema
        .table(referenced)
        .map(|t| t.name.clone())
        .unwrap_or_else(|| referenced.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{parse_ddl, Column};

    fn column(name: &str, nullable: bool, unique: bool) -> Column {
        Column {
            name: name.into(),
            sql_type: "INT".into(),
            nullable,
            unique,
        }
    }

    #[test]
    fn join_table_detected() {
        // OrderDetails-style shape: two FKs, PK = union of the FK columns
        let (schema, _) = parse_ddl(
            "CREATE TABLE Orders (id INT PRIMARY KEY);\n\
             CREATE TABLE Products (id INT PRIMARY KEY);\n\
             CREATE TABLE OrderDetails (\n\
               order_id INT NOT NULL,\n\
               product_id INT NOT NULL,\n\
               PRIMARY KEY (order_id, product_id),\n\
               FOREIGN KEY (order_id) REFERENCES Orders (id),\n\
               FOREIGN KEY (product_id) REFERENCES Products (id)\n\
             );",
        )
        .unwrap();
        assert_eq!(
            detect_join_tables(&schema),
            BTreeSet::from(["OrderDetails".to_string()])
        );
    }

    #[test]
    fn payload_column_disqualifies_join_table() {
        let (schema, _) = parse_ddl(
            "CREATE TABLE Orders (id INT PRIMARY KEY);\n\
             CREATE TABLE Products (id INT PRIMARY KEY);\n\
             CREATE TABLE OrderDetails (\n\
               order_id INT NOT NULL,\n\
               product_id INT NOT NULL,\n\
               quantity INT NOT NULL,\n\
               PRIMARY KEY (order_id, product_id),\n\
               FOREIGN KEY (order_id) REFERENCES Orders (id),\n\
               FOREIGN KEY (product_id) REFERENCES Products (id)\n\
             );",
        )
        .unwrap();
        assert!(detect_join_tables(&schema).is_empty());
    }

    #[test]
    fn single_fk_table_is_not_a_join_table() {
        let (schema, _) = parse_ddl(
            "CREATE TABLE A (id INT PRIMARY KEY);\n\
             CREATE TABLE B (a_id INT NOT NULL, PRIMARY KEY (a_id), FOREIGN KEY (a_id) REFERENCES A (id));",
        )
        .unwrap();
        assert!(detect_join_tables(&schema).is_empty());
    }

    #[test]
    fn cardinality_rules() {
        let fk = ForeignKey {
            columns: vec!["ref_id".into()],
            referenced_table: "X".into(),
            referenced_columns: vec!["id".into()],
        };
        let table = |col: Column| Table {
            name: "T".into(),
            columns: vec![col],
            primary_key: vec![],
            foreign_keys: vec![fk.clone()],
        };

        // unique and non-nullable -> one-to-one
        assert_eq!(
            infer_cardinality(&fk, &table(column("ref_id", false, true))),
            (Multiplicity::ONE, Multiplicity::ONE)
        );
        // non-unique, non-nullable -> one-to-many
        assert_eq!(
            infer_cardinality(&fk, &table(column("ref_id", false, false))),
            (Multiplicity::ONE, Multiplicity::ZERO_OR_MANY)
        );
        // nullable lowers the referenced-side lower bound to zero
        assert_eq!(
            infer_cardinality(&fk, &table(column("ref_id", true, false))),
            (Multiplicity::ZERO_OR_ONE, Multiplicity::ZERO_OR_MANY)
        );
        assert_eq!(
            infer_cardinality(&fk, &table(column("ref_id", true, true))),
            (Multiplicity::ZERO_OR_ONE, Multiplicity::ONE)
        );
    }

    #[test]
    fn empty_schema_reverses_to_empty_diagram() {
        let d = reverse_engineer(&RelationalSchema::default()).unwrap();
        assert!(d.classes.is_empty() && d.relationships.is_empty());
    }

    #[test]
    fn customer_order_fixture() {
        // hand application of the rules: 2 classes, Customer "1" -- "0..*" Order
        let (schema, _) = parse_ddl(
            "CREATE TABLE Customer (id INT PRIMARY KEY, name TEXT NOT NULL);\n\
             CREATE TABLE Order_ (id INT PRIMARY KEY, customer_id INT NOT NULL, FOREIGN KEY (customer_id) REFERENCES Customer (id));",
        )
        .unwrap();
        let d = reverse_engineer(&schema).unwrap();
        assert_eq!(d.classes.len(), 2);
        assert_eq!(d.relationships.len(), 1);
        let rel = &d.relationships[0];
        assert_eq!(rel.source, "Customer");
        assert_eq!(rel.target, "Order_");
        assert_eq!(rel.kind, RelationshipKind::Association);
        assert_eq!(rel.source_multiplicity, Some(Multiplicity::ONE));
        assert_eq!(rel.target_multiplicity, Some(Multiplicity::ZERO_OR_MANY));
        // FK column dropped from attributes
        let order = d.class("Order_").unwrap();
        assert_eq!(order.attributes.len(), 1);
        assert_eq!(order.attributes[0].name, "id");
    }

    #[test]
    fn join_table_becomes_many_to_many_association() {
        let (schema, _) = parse_ddl(
            "CREATE TABLE Orders (id INT PRIMARY KEY);\n\
             CREATE TABLE Products (id INT PRIMARY KEY);\n\
             CREATE TABLE OrderDetails (\n\
               order_id INT NOT NULL,\n\
               product_id INT NOT NULL,\n\
               PRIMARY KEY (order_id, product_id),\n\
               FOREIGN KEY (order_id) REFERENCES Orders (id),\n\
               FOREIGN KEY (product_id) REFERENCES Products (id)\n\
             );",
        )
        .unwrap();
        let d = reverse_engineer(&schema).unwrap();
        assert_eq!(d.classes.len(), 2);
        assert_eq!(d.relationships.len(), 1);
        let rel = &d.relationships[0];
        assert_eq!((rel.source.as_str(), rel.target.as_str()), ("Orders", "Products"));
        assert_eq!(rel.source_multiplicity, Some(Multiplicity::ZERO_OR_MANY));
        assert_eq!(rel.target_multiplicity, Some(Multiplicity::ZERO_OR_MANY));
        assert_eq!(rel.label.as_deref(), Some("OrderDetails"));
        assert!(d.is_valid());
    }
}
