//! Relational schemas parsed from SQL DDL and the rule-based reverse
//! engineering of gold-standard class diagrams from them.

mod ddl;
mod reverse;

pub use ddl::{parse_ddl, DdlError, DdlWarning};
pub use reverse::{detect_join_tables, infer_cardinality, reverse_engineer};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub sql_type: String,
    pub nullable: bool,
    pub unique: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForeignKey {
    pub columns: Vec<String>,
    pub referenced_table: String,
    pub referenced_columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub primary_key: Vec<String>,
    pub foreign_keys: Vec<ForeignKey>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns
            .iter()
            .find(|c| c.name.eq_ignore_ascii_case(name))
    }

    fn has_column(&self, name: &str) -> bool {
        self.column(name).is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationalSchema {
    pub tables: Vec<Table>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("duplicate table `{0}`")]
    DuplicateTable(String),
    #[error("foreign key on `{table}` references unknown table `{referenced}`")]
    UnknownReferencedTable { table: String, referenced: String },
    #[error("primary key column `{column}` not found in table `{table}`")]
    UnknownPrimaryKeyColumn { table: String, column: String },
    #[error("foreign key column `{column}` not found in table `{table}`")]
    UnknownForeignKeyColumn { table: String, column: String },
    #[error("foreign key on `{table}`: {found} column(s) reference {expected} column(s)")]
    ArityMismatch {
        table: String,
        found: usize,
        expected: usize,
    },
    #[error("primary key column `{column}` in table `{table}` must not be nullable")]
    NullablePrimaryKey { table: String, column: String },
}

impl RelationalSchema {
    /// Look up a table by name, case-insensitively (SQL identifier semantics).
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables
            .iter()
            .find(|t| t.name.eq_ignore_ascii_case(name))
    }

    /// Check all schema invariants: unique table names, primary-key and
    /// foreign-key columns exist, foreign keys reference existing tables with
    /// matching arity, and primary-key columns are non-nullable.
    pub fn validate(&self) -> Result<(), SchemaError> {
        for (i, table) in self.tables.iter().enumerate() {
            if self.tables[..i]
                .iter()
                .any(|t| t.name.eq_ignore_ascii_case(&table.name))
            {
                return Err(SchemaError::DuplicateTable(table.name.clone()));
            }
            for pk in &table.primary_key {
                let column = table.column(pk).ok_or_else(|| {
                    SchemaError::UnknownPrimaryKeyColumn {
                        table: table.name.clone(),
                        column: pk.clone(),
                    }
                })?;
                if column.nullable {
                    return Err(SchemaError::NullablePrimaryKey {
                        table: table.name.clone(),
                        column: pk.clone(),
                    });
                }
            }
            for fk in &table.foreign_keys {
                for col in &fk.columns {
                    if !table.has_column(col) {
                        return Err(SchemaError::UnknownForeignKeyColumn {
                            table: table.name.clone(),
                            column: col.clone(),
                        });
                    }
                }
                let referenced = self.table(&fk.referenced_table).ok_or_else(|| {
                    SchemaError::UnknownReferencedTable {
                        table: table.name.clone(),
                        referenced: fk.referenced_table.clone(),
                    }
                })?;
                if fk.columns.len() != fk.referenced_columns.len() {
                    return Err(SchemaError::ArityMismatch {
                        table: table.name.clone(),
                        found: fk.columns.len(),
                        expected: fk.referenced_columns.len(),
                    });
                }
                for col in &fk.referenced_columns {
                    if !referenced.has_column(col) {
                        return Err(SchemaError::UnknownForeignKeyColumn {
                            table: referenced.name.clone(),
                            column: col.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}
