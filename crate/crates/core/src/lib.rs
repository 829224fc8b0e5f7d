//! Core building blocks for the NOMAD UML toolkit.
//!
//! Everything revolves around [`model::UmlDiagram`], the in-memory class
//! diagram exchanged between modules:
//!
//! - [`plantuml`] parses and emits the PlantUML class-diagram dialect,
//! - [`schema`] parses a SQL DDL subset and reverse-engineers gold diagrams,
//! - [`reqgen`] renders deterministic requirement documents from diagrams,
//! - [`evaluator`] scores generated diagrams against references with
//!   precision/recall/F1 and a structured error taxonomy.
//!
//! All types are immutable value objects after construction and all
//! operations are pure functions, so everything here is safe to share
//! across threads.

pub mod evaluator;
pub mod model;
pub mod normalize;
pub mod plantuml;
pub mod reqgen;
pub mod schema;

pub use model::{
    Multiplicity, Relationship, RelationshipKind, UmlAttribute, UmlClass, UmlDiagram, UpperBound,
    Violation, Visibility,
};
pub use normalize::normalize_name;
