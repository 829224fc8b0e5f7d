//! Parser for the `CREATE TABLE` subset of SQL DDL.
//!
//! Supported clauses: column definitions with `NOT NULL`/`UNIQUE`, inline and
//! table-level `PRIMARY KEY`, inline `REFERENCES`, and table-level
//! `FOREIGN KEY ... REFERENCES`. Identifiers may be bare or quoted with
//! double quotes, backticks, or square brackets. Everything else (indexes,
//! checks, inserts, ...) is skipped with a warning.

use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

use crate::schema::{Column, ForeignKey, RelationalSchema, SchemaError, Table};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdlWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum DdlError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

static CREATE_TABLE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"(?is)^\s*CREATE\s+TABLE\s+(?:IF\s+NOT\s+EXISTS\s+)?(?P<name>"[^"]+"|`[^`]+`|\[[^\]]+\]|[A-Za-z_][\w$.]*)\s*\((?P<body>.*)\)\s*[^()]*$"#,
    )
    .unwrap()
});

static SKIPPED_STATEMENT_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?is)^\s*(CREATE\s+(UNIQUE\s+)?INDEX|CREATE\s+(OR\s+REPLACE\s+)?VIEW|CREATE\s+TRIGGER|INSERT|UPDATE|DELETE|DROP|ALTER|SET|USE|BEGIN|COMMIT|ROLLBACK|PRAGMA|GRANT|REVOKE|COMMENT)\b",
    )
    .unwrap()
});

/// Parse `CREATE TABLE` statements into a schema.
///
/// Returns the schema plus warnings for skipped clauses and statements.
/// Errors on malformed statements and on foreign keys that reference
/// undeclared tables.
pub fn parse_ddl(sql: &str) -> Result<(RelationalSchema, Vec<DdlWarning>), DdlError> {
    let cleaned = strip_comments(sql);
    let mut warnings = Vec::new();
    let mut tables = Vec::new();

    for (line, statement) in split_statements(&cleaned) {
        let trimmed = statement.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(caps) = CREATE_TABLE_RE.captures(trimmed) {
            let name = unquote_ident(caps.name("name").unwrap().as_str());
            let body = caps.name("body").unwrap().as_str();
            tables.push(parse_table(line, name, body, &mut warnings)?);
        } else if SKIPPED_STATEMENT_RE.is_match(trimmed) {
            let head: String = trimmed.split_whitespace().take(2).collect::<Vec<_>>().join(" ");
            warnings.push(DdlWarning {
                line,
                message: format!("skipped unsupported statement: {head} ..."),
            });
        } else {
            return Err(DdlError::Malformed {
                line,
                message: format!(
                    "unrecognized statement: {}",
                    trimmed.split_whitespace().take(4).collect::<Vec<_>>().join(" ")
                ),
            });
        }
    }

    let mut schema = RelationalSchema { tables };
    resolve_foreign_keys(&mut schema)?;
    schema.validate()?;
    Ok((schema, warnings))
}

fn parse_table(
    line: usize,
    name: String,
    body: &str,
    warnings: &mut Vec<DdlWarning>,
) -> Result<Table, DdlError> {
    let mut table = Table {
        name,
        columns: Vec::new(),
        primary_key: Vec::new(),
        foreign_keys: Vec::new(),
    };
    let mut unique_marks: Vec<String> = Vec::new();

    for item in split_top_level(body) {
        let tokens = tokenize(&item);
        if tokens.is_empty() {
            continue;
        }
        let mut toks = &tokens[..];
        if keyword(toks, 0, "CONSTRAINT") {
            // drop "CONSTRAINT <name>"
            if toks.len() < 3 {
                return Err(malformed(line, &table.name, "truncated CONSTRAINT clause"));
            }
            toks = &toks[2..];
        }

        if keyword(toks, 0, "PRIMARY") && keyword(toks, 1, "KEY") {
            let cols = match toks.get(2) {
                Some(Tok::Parens(inner)) => ident_list(inner),
                _ => return Err(malformed(line, &table.name, "PRIMARY KEY without column list")),
            };
            if !table.primary_key.is_empty() {
                return Err(malformed(line, &table.name, "multiple primary keys"));
            }
            table.primary_key = cols;
        } else if keyword(toks, 0, "FOREIGN") && keyword(toks, 1, "KEY") {
            let columns = match toks.get(2) {
                Some(Tok::Parens(inner)) => ident_list(inner),
                _ => return Err(malformed(line, &table.name, "FOREIGN KEY without column list")),
            };
            if !keyword(toks, 3, "REFERENCES") {
                return Err(malformed(line, &table.name, "FOREIGN KEY without REFERENCES"));
            }
            let referenced_table = match toks.get(4) {
                Some(Tok::Word(w)) => w.clone(),
                Some(Tok::Quoted(q)) => q.clone(),
                _ => return Err(malformed(line, &table.name, "REFERENCES without table name")),
            };
            let referenced_columns = match toks.get(5) {
                Some(Tok::Parens(inner)) => ident_list(inner),
                _ => Vec::new(), // resolved to the referenced table's primary key later
            };
            table.foreign_keys.push(ForeignKey {
                columns,
                referenced_table,
                referenced_columns,
            });
        } else if keyword(toks, 0, "UNIQUE") {
            match toks.get(1) {
                Some(Tok::Parens(inner)) => {
                    let cols = ident_list(inner);
                    if cols.len() == 1 {
                        unique_marks.push(cols[0].clone());
                    } else {
                        warnings.push(DdlWarning {
                            line,
                            message: format!(
                                "table `{}`: composite UNIQUE constraint skipped",
                                table.name
                            ),
                        });
                    }
                }
                _ => {
                    return Err(malformed(line, &table.name, "UNIQUE constraint without column list"))
                }
            }
        } else if keyword(toks, 0, "CHECK") || keyword(toks, 0, "KEY") || keyword(toks, 0, "INDEX")
        {
            warnings.push(DdlWarning {
                line,
                message: format!("table `{}`: unsupported clause skipped: {item}", table.name),
            });
        } else {
            parse_column(line, &mut table, toks, warnings)?;
        }
    }

    // SQL semantics: primary key columns are implicitly NOT NULL, and a
    // single-column primary key is unique.
    let pk = table.primary_key.clone();
    for pk_col in &pk {
        if let Some(col) = table
            .columns
            .iter_mut()
            .find(|c| c.name.eq_ignore_ascii_case(pk_col))
        {
            col.nullable = false;
            if pk.len() == 1 {
                col.unique = true;
            }
        }
    }
    for mark in unique_marks {
        if let Some(col) = table
            .columns
            .iter_mut()
            .find(|c| c.name.eq_ignore_ascii_case(&mark))
        {
            col.unique = true;
        }
    }
    Ok(table)
}

fn parse_column(
    line: usize,
    table: &mut Table,
    toks: &[Tok],
    warnings: &mut Vec<DdlWarning>,
) -> Result<(), DdlError> {
    let name = match &toks[0] {
        Tok::Word(w) => w.clone(),
        Tok::Quoted(q) => q.clone(),
        _ => return Err(malformed(line, &table.name, "expected column name")),
    };
    let mut sql_type = match toks.get(1) {
        Some(Tok::Word(w)) => w.clone(),
        _ => {
            return Err(malformed(
                line,
                &table.name,
                &format!("column `{name}` has no type"),
            ))
        }
    };
    let mut i = 2;
    if let Some(Tok::Parens(inner)) = toks.get(i) {
        sql_type = format!("{sql_type}({inner})");
        i += 1;
    }

    let mut column = Column {
        name: name.clone(),
        sql_type,
        nullable: true,
        unique: false,
    };

    while i < toks.len() {
        if keyword(toks, i, "NOT") && keyword(toks, i + 1, "NULL") {
            column.nullable = false;
            i += 2;
        } else if keyword(toks, i, "NULL") {
            column.nullable = true;
            i += 1;
        } else if keyword(toks, i, "UNIQUE") {
            column.unique = true;
            i += 1;
        } else if keyword(toks, i, "PRIMARY") && keyword(toks, i + 1, "KEY") {
            if !table.primary_key.is_empty() {
                return Err(malformed(line, &table.name, "multiple primary keys"));
            }
            table.primary_key = vec![name.clone()];
            i += 2;
        } else if keyword(toks, i, "REFERENCES") {
            let referenced_table = match toks.get(i + 1) {
                Some(Tok::Word(w)) => w.clone(),
                Some(Tok::Quoted(q)) => q.clone(),
                _ => return Err(malformed(line, &table.name, "REFERENCES without table name")),
            };
            i += 2;
            let referenced_columns = match toks.get(i) {
                Some(Tok::Parens(inner)) => {
                    i += 1;
                    ident_list(inner)
                }
                _ => Vec::new(),
            };
            table.foreign_keys.push(ForeignKey {
                columns: vec![name.clone()],
                referenced_table,
                referenced_columns,
            });
        } else if keyword(toks, i, "DEFAULT") {
            i += 2; // keyword plus one value token
        } else if keyword(toks, i, "ON") {
            i += 3; // ON DELETE/UPDATE <action>
        } else if keyword(toks, i, "COLLATE") {
            i += 2;
        } else if keyword(toks, i, "AUTO_INCREMENT")
            || keyword(toks, i, "AUTOINCREMENT")
            || keyword(toks, i, "IDENTITY")
        {
            i += 1;
            if matches!(toks.get(i), Some(Tok::Parens(_))) {
                i += 1;
            }
        } else if keyword(toks, i, "CHECK") {
            warnings.push(DdlWarning {
                line,
                message: format!(
                    "table `{}`: CHECK on column `{name}` skipped",
                    table.name
                ),
            });
            i += 1;
            if matches!(toks.get(i), Some(Tok::Parens(_))) {
                i += 1;
            }
        } else {
            warnings.push(DdlWarning {
                line,
                message: format!(
                    "table `{}`: ignored option on column `{name}`: {}",
                    table.name,
                    toks[i].text()
                ),
            });
            i += 1;
        }
    }

    table.columns.push(column);
    Ok(())
}

/// Fill in empty `referenced_columns` from the referenced table's primary key.
fn resolve_foreign_keys(schema: &mut RelationalSchema) -> Result<(), DdlError> {
    let pk_by_table: Vec<(String, Vec<String>)> = schema
        .tables
        .iter()
        .map(|t| (t.name.clone(), t.primary_key.clone()))
        .collect();
    for table in &mut schema.tables {
        for fk in &mut table.foreign_keys {
            if fk.referenced_columns.is_empty() {
                let pk = pk_by_table
                    .iter()
                    .find(|(name, _)| name.eq_ignore_ascii_case(&fk.referenced_table))
                    .map(|(_, pk)| pk.clone())
                    .ok_or_else(|| {
                        DdlError::Schema(SchemaError::UnknownReferencedTable {
                            table: table.name.clone(),
                            referenced: fk.referenced_table.clone(),
                        })
                    })?;
                if pk.is_empty() {
                    return Err(DdlError::Malformed {
                        line: 1,
                        message: format!(
                            "foreign key on `{}` references `{}` which has no primary key to infer columns from",
                            table.name, fk.referenced_table
                        ),
                    });
                }
                fk.referenced_columns = pk;
            }
        }
    }
    Ok(())
}

fn malformed(line: usize, table: &str, message: &str) -> DdlError {
    DdlError::Malformed {
        line,
        message: format!("table `{table}`: {message}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Quoted(String),
    Parens(String),
    Literal(String),
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Word(s) | Tok::Quoted(s) | Tok::Literal(s) => s.clone(),
            Tok::Parens(s) => format!("({s})"),
        }
    }
}

fn keyword(toks: &[Tok], i: usize, kw: &str) -> bool {
    matches!(toks.get(i), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
}

fn tokenize(item: &str) -> Vec<Tok> {
    let chars: Vec<char> = item.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == ',' {
            i += 1;
        } else if c == '(' {
            let mut depth = 1;
            let mut j = i + 1;
            while j < chars.len() && depth > 0 {
                match chars[j] {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    _ => {}
                }
                j += 1;
            }
            let inner: String = chars[i + 1..j.saturating_sub(1)].iter().collect();
            toks.push(Tok::Parens(inner.trim().to_string()));
            i = j;
        } else if c == '"' || c == '`' {
            let close = c;
            let mut j = i + 1;
            while j < chars.len() && chars[j] != close {
                j += 1;
            }
            toks.push(Tok::Quoted(chars[i + 1..j].iter().collect()));
            i = (j + 1).min(chars.len());
        } else if c == '[' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != ']' {
                j += 1;
            }
            toks.push(Tok::Quoted(chars[i + 1..j].iter().collect()));
            i = (j + 1).min(chars.len());
        } else if c == '\'' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '\'' {
                j += 1;
            }
            toks.push(Tok::Literal(chars[i + 1..j].iter().collect()));
            i = (j + 1).min(chars.len());
        } else {
            let mut j = i;
            while j < chars.len()
                && !chars[j].is_whitespace()
                && !matches!(chars[j], '(' | ')' | ',' | '"' | '`' | '[' | '\'')
            {
                j += 1;
            }
            toks.push(Tok::Word(chars[i..j].iter().collect()));
            i = j;
        }
    }
    toks
}

/// Split a table body on commas at parenthesis depth zero, outside quotes.
fn split_top_level(body: &str) -> Vec<String> {
    let mut items = Vec::new();
    let mut current = String::new();
    let mut depth = 0usize;
    let mut in_string: Option<char> = None;
    for c in body.chars() {
        match in_string {
            Some(quote) => {
                current.push(c);
                if c == quote {
                    in_string = None;
                }
            }
            None => match c {
                '(' => {
                    depth += 1;
                    current.push(c);
                }
                ')' => {
                    depth = depth.saturating_sub(1);
                    current.push(c);
                }
                ',' if depth == 0 => {
                    items.push(std::mem::take(&mut current));
                }
                '\'' | '"' | '`' => {
                    in_string = Some(c);
                    current.push(c);
                }
                _ => current.push(c),
            },
        }
    }
    if !current.trim().is_empty() {
        items.push(current);
    }
    items.into_iter().filter(|i| !i.trim().is_empty()).collect()
}

fn ident_list(inner: &str) -> Vec<String> {
    inner
        .split(',')
        .map(|s| unquote_ident(s.trim()))
        .filter(|s| !s.is_empty())
        .collect()
}

fn unquote_ident(ident: &str) -> String {
    let ident = ident.trim();
    for (open, close) in [('"', '"'), ('`', '`'), ('[', ']')] {
        if let Some(inner) = ident
            .strip_prefix(open)
            .and_then(|s| s.strip_suffix(close))
        {
            return inner.to_string();
        }
    }
    ident.to_string()
}

/// Replace comments with spaces, preserving newlines for line counting.
fn strip_comments(sql: &str) -> String {
    let mut out = String::with_capacity(sql.len());
    let chars: Vec<char> = sql.chars().collect();
    let mut i = 0;
    let mut in_line_comment = false;
    let mut in_block_comment = false;
    let mut in_string: Option<char> = None;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if in_line_comment {
            if c == '\n' {
                in_line_comment = false;
                out.push('\n');
            } else {
                out.push(' ');
            }
            i += 1;
        } else if in_block_comment {
            if c == '*' && next == Some('/') {
                in_block_comment = false;
                out.push_str("  ");
                i += 2;
            } else {
                out.push(if c == '\n' { '\n' } else { ' ' });
                i += 1;
            }
        } else if let Some(quote) = in_string {
            out.push(c);
            if c == quote {
                in_string = None;
            }
            i += 1;
        } else if c == '-' && next == Some('-') {
            in_line_comment = true;
            out.push_str("  ");
            i += 2;
        } else if c == '/' && next == Some('*') {
            in_block_comment = true;
            out.push_str("  ");
            i += 2;
        } else {
            if c == '\'' || c == '"' || c == '`' {
                in_string = Some(c);
            }
            out.push(c);
            i += 1;
        }
    }
    out
}

/// Split on `;` outside quotes; yields (1-based start line, statement text).
fn split_statements(sql: &str) -> Vec<(usize, String)> {
    let mut statements = Vec::new();
    let mut current = String::new();
    let mut line = 1;
    let mut start_line = 1;
    let mut in_string: Option<char> = None;
    for c in sql.chars() {
        if c == '\n' {
            line += 1;
        }
        match in_string {
            Some(quote) => {
                current.push(c);
                if c == quote {
                    in_string = None;
                }
            }
            None => {
                if c == ';' {
                    statements.push((start_line, std::mem::take(&mut current)));
                    start_line = line;
                } else {
                    if current.trim().is_empty() && !c.is_whitespace() {
                        start_line = line;
                    }
                    if c == '\'' || c == '"' || c == '`' {
                        in_string = Some(c);
                    }
                    current.push(c);
                }
            }
        }
    }
    if !current.trim().is_empty() {
        statements.push((start_line, current));
    }
    statements
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_yields_empty_schema() {
        let (schema, warnings) = parse_ddl("").unwrap();
        assert!(schema.tables.is_empty());
        assert!(warnings.is_empty());
    }

    #[test]
    fn single_table_with_inline_pk() {
        let (schema, _) = parse_ddl(
            "CREATE TABLE Customers (id INTEGER PRIMARY KEY, name VARCHAR(50) NOT NULL);",
        )
        .unwrap();
        assert_eq!(schema.tables.len(), 1);
        let t = &schema.tables[0];
        assert_eq!(t.name, "Customers");
        assert_eq!(t.primary_key, vec!["id"]);
        assert_eq!(t.columns.len(), 2);
        let id = t.column("id").unwrap();
        assert!(!id.nullable && id.unique);
        let name = t.column("name").unwrap();
        assert_eq!(name.sql_type, "VARCHAR(50)");
        assert!(!name.nullable && !name.unique);
    }

    #[test]
    fn two_tables_with_foreign_key() {
        let (schema, _) = parse_ddl(
            "CREATE TABLE Customers (id INTEGER PRIMARY KEY);\n\
             CREATE TABLE Orders (\n\
               id INTEGER PRIMARY KEY,\n\
               customer_id INTEGER NOT NULL,\n\
               FOREIGN KEY (customer_id) REFERENCES Customers (id)\n\
             );",
        )
        .unwrap();
        let orders = schema.table("Orders").unwrap();
        assert_eq!(orders.foreign_keys.len(), 1);
        let fk = &orders.foreign_keys[0];
        assert_eq!(fk.columns, vec!["customer_id"]);
        assert_eq!(fk.referenced_table, "Customers");
        assert_eq!(fk.referenced_columns, vec!["id"]);
    }

    #[test]
    fn inline_references_and_inferred_pk_columns() {
        let (schema, _) = parse_ddl(
            "CREATE TABLE A (id INT PRIMARY KEY);\n\
             CREATE TABLE B (id INT PRIMARY KEY, a_id INT NOT NULL REFERENCES A);",
        )
        .unwrap();
        let fk = &schema.table("B").unwrap().foreign_keys[0];
        assert_eq!(fk.referenced_columns, vec!["id"]);
    }

    #[test]
    fn quoted_identifiers_with_spaces() {
        let (schema, _) = parse_ddl(
            "CREATE TABLE \"Order Details\" (\n\
               \"Order ID\" INT NOT NULL,\n\
               PRIMARY KEY (\"Order ID\")\n\
             );",
        )
        .unwrap();
        let t = schema.table("Order Details").unwrap();
        assert_eq!(t.primary_key, vec!["Order ID"]);
    }

    #[test]
    fn undeclared_reference_is_an_error() {
        let err = parse_ddl(
            "CREATE TABLE Orders (id INT PRIMARY KEY, x INT, FOREIGN KEY (x) REFERENCES Nowhere (id));",
        )
        .unwrap_err();
        assert!(matches!(
            err,
            DdlError::Schema(SchemaError::UnknownReferencedTable { .. })
        ));
    }

    #[test]
    fn malformed_statement_is_an_error() {
        assert!(parse_ddl("SELECT * FROM x;").is_err());
        assert!(parse_ddl("CREATE TABLE T (id INT PRIMARY KEY, id2 INT PRIMARY KEY);").is_err());
    }

    #[test]
    fn unsupported_statements_warn() {
        let (schema, warnings) = parse_ddl(
            "CREATE TABLE T (id INT PRIMARY KEY);\nCREATE INDEX idx ON T (id);\nINSERT INTO T VALUES (1);",
        )
        .unwrap();
        assert_eq!(schema.tables.len(), 1);
        assert_eq!(warnings.len(), 2);
    }

    #[test]
    fn comments_are_stripped() {
        let (schema, _) = parse_ddl(
            "-- a comment\nCREATE TABLE T (\n  id INT PRIMARY KEY, /* inline */ name TEXT\n);",
        )
        .unwrap();
        assert_eq!(schema.tables[0].columns.len(), 2);
    }

    #[test]
    fn composite_primary_key_is_not_unique_per_column() {
        let (schema, _) = parse_ddl(
            "CREATE TABLE J (a INT, b INT, PRIMARY KEY (a, b));",
        )
        .unwrap();
        let t = &schema.tables[0];
        assert!(!t.column("a").unwrap().unique);
        assert!(!t.column("a").unwrap().nullable);
    }
}
