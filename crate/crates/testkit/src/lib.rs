//! Test support for the workspace: seeded diagram and schema generators plus
//! brute-force matching oracles.
//!
//! Everything is keyed by a `u64` seed so property tests can wrap the
//! generators in their own strategies (`any::<u64>().prop_map(...)`) while
//! acceptance checks enumerate seeds deterministically.

pub mod gen;
pub mod oracle;

pub use gen::{
    diagram_from_seed, diagram_pair_from_seed, fuzz_text_from_seed, rich_diagram_from_seed,
    schema_from_seed,
};
