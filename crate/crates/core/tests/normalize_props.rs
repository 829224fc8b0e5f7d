use nomad_core::normalize_name;
use proptest::prelude::*;

proptest! {
    /// normalize(normalize(x)) = normalize(x)
    #[test]
    fn idempotent(input in ".{0,40}") {
        let once = normalize_name(&input);
        prop_assert_eq!(normalize_name(&once), once);
    }

    /// normalize(x) = normalize(uppercase(x))
    #[test]
    fn case_insensitive(input in "[a-zA-Z_ -]{0,30}") {
        prop_assert_eq!(normalize_name(&input.to_uppercase()), normalize_name(&input));
    }

    /// output never contains separators or uppercase
    #[test]
    fn canonical_form_is_flat(input in ".{0,40}") {
        let out = normalize_name(&input);
        prop_assert!(!out.contains('_') && !out.contains('-') && !out.contains("  "));
        prop_assert_eq!(out.to_lowercase(), out.clone());
        prop_assert_eq!(out.trim(), out.as_str());
    }
}
