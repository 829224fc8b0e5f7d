use nomad_core::plantuml::{emit_plantuml, parse_plantuml, PlantUmlSource};
use nomad_testkit::{fuzz_text_from_seed, rich_diagram_from_seed};
use proptest::prelude::*;

proptest! {
    /// parse(emit(d)) is equivalent to d under normalized set comparison,
    /// and emission is a fixpoint: emitting the reparse gives the same bytes.
    #[test]
    fn round_trip(seed in any::<u64>()) {
        let diagram = rich_diagram_from_seed(seed);
        let emitted = emit_plantuml(&diagram).unwrap();
        let (reparsed, diagnostics) = parse_plantuml(&emitted).unwrap();
        prop_assert!(
            diagnostics.is_empty(),
            "canonical output should parse cleanly: {diagnostics:?}"
        );
        prop_assert_eq!(reparsed.normalized_signature(), diagram.normalized_signature());
        prop_assert_eq!(emit_plantuml(&reparsed).unwrap(), emitted);
    }

    /// byte-identical output for the same diagram
    #[test]
    fn emission_is_deterministic(seed in any::<u64>()) {
        let diagram = rich_diagram_from_seed(seed);
        prop_assert_eq!(emit_plantuml(&diagram).unwrap(), emit_plantuml(&diagram).unwrap());
    }

    /// the parser returns Ok or a typed error on arbitrary text, never panics
    #[test]
    fn parser_never_panics_on_fuzz(seed in any::<u64>()) {
        let _ = parse_plantuml(&PlantUmlSource(fuzz_text_from_seed(seed)));
    }

    #[test]
    fn parser_never_panics_on_raw_strings(text in ".{0,200}") {
        let _ = parse_plantuml(&PlantUmlSource(text));
    }
}
