use nomad_core::schema::{detect_join_tables, reverse_engineer};
use nomad_testkit::schema_from_seed;
use proptest::prelude::*;

proptest! {
    /// class count = tables - join tables; one relationship per foreign key
    /// of a non-join table plus one per join table
    #[test]
    fn reverse_engineering_counts(seed in any::<u64>()) {
        let schema = schema_from_seed(seed, 9);
        let join_tables = detect_join_tables(&schema);
        let diagram = reverse_engineer(&schema).unwrap();

        prop_assert_eq!(diagram.classes.len(), schema.tables.len() - join_tables.len());

        let fk_count: usize = schema
            .tables
            .iter()
            .filter(|t| !join_tables.contains(&t.name))
            .map(|t| t.foreign_keys.len())
            .sum();
        prop_assert_eq!(diagram.relationships.len(), fk_count + join_tables.len());
        prop_assert!(diagram.is_valid(), "{:?}", diagram.validate());
    }

    /// reverse engineering is deterministic and total on valid schemas
    #[test]
    fn reverse_engineering_is_deterministic(seed in any::<u64>()) {
        let schema = schema_from_seed(seed, 9);
        prop_assert_eq!(reverse_engineer(&schema).unwrap(), reverse_engineer(&schema).unwrap());
    }
}
