//! Plain-text rendering of evaluation reports.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::evaluator::{Dimension, ErrorRecord, ErrorType, EvalReport};

const HEADER: [&str; 5] = [
    "Classes",
    "Attributes",
    "Relationships (S)",
    "Relationships (R)",
    "Average",
];

/// One-row F1 table for a single report.
pub fn render_report_table(label: &str, report: &EvalReport) -> String {
    render_report_rows(&[(label.to_string(), report.clone())])
}

/// Multi-row F1 table; used by batch evaluation with one row per use case.
pub fn render_report_rows(rows: &[(String, EvalReport)]) -> String {
    let label_width = rows
        .iter()
        .map(|(label, _)| label.len())
        .chain(std::iter::once("Model".len()))
        .max()
        .unwrap_or(5);

    let mut out = String::new();
    write!(out, "{:label_width$}", "Model").unwrap();
    for column in HEADER {
        write!(out, "  {column}").unwrap();
    }
    out.push('\n');
    for (label, report) in rows {
        write!(out, "{label:label_width$}").unwrap();
        let values = [
            report.classes.f1,
            report.attributes.f1,
            report.relationships_strict.f1,
            report.relationships_relaxed.f1,
            report.average,
        ];
        for (column, value) in HEADER.iter().zip(values) {
            write!(out, "  {value:>width$.4}", width = column.len()).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Error counts grouped per dimension and type.
pub fn render_taxonomy_summary(errors: &[ErrorRecord]) -> String {
    if errors.is_empty() {
        return "No errors.\n".to_string();
    }
    let mut counts: BTreeMap<(Dimension, ErrorType), usize> = BTreeMap::new();
    for error in errors {
        *counts.entry((error.dimension, error.error_type)).or_insert(0) += 1;
    }
    let mut out = String::from("Errors per dimension:\n");
    let mut current: Option<Dimension> = None;
    for ((dimension, error_type), count) in counts {
        if current != Some(dimension) {
            writeln!(out, "  {dimension:?}").unwrap();
            current = Some(dimension);
        }
        writeln!(out, "    {error_type:?}: {count}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::{evaluate, Prf};
    use crate::model::{UmlClass, UmlDiagram};

    #[test]
    fn table_layout_mirrors_the_summary_columns() {
        let mut d = UmlDiagram::new();
        d.classes.push(UmlClass::new("A"));
        let report = evaluate(&d, &d, None);
        let table = render_report_table("self", &report);
        assert!(table.contains("Classes"));
        assert!(table.contains("Relationships (S)"));
        assert!(table.contains("1.0000"));
    }

    #[test]
    fn taxonomy_summary_groups_by_dimension() {
        let gold = {
            let mut d = UmlDiagram::new();
            d.classes.push(UmlClass::new("A"));
            d.classes.push(UmlClass::new("B"));
            d
        };
        let gen = {
            let mut d = UmlDiagram::new();
            d.classes.push(UmlClass::new("A"));
            d
        };
        let report = evaluate(&gold, &gen, None);
        assert_ne!(report.classes, Prf::PERFECT);
        let summary = render_taxonomy_summary(&report.errors);
        assert!(summary.contains("Class"));
        assert!(summary.contains("Missing: 1"));
    }
}
