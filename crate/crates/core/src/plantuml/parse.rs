//! Line-oriented PlantUML class-diagram parser.

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;

use crate::model::{
    Multiplicity, Relationship, RelationshipKind, UmlAttribute, UmlClass, UmlDiagram, Visibility,
};
use crate::plantuml::{ParseDiagnostic, ParseError, PlantUmlSource};

static CLASS_HEADER_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"(?x)^
        (?:(?P<abs>abstract)\s+)?
        (?P<kw>class|enum|interface)\s+
        (?P<name>"[^"]+"|[A-Za-z_][\w.]*)
        (?:\s+as\s+(?P<alias>"[^"]+"|[A-Za-z_][\w.]*))?
        (?:\s*<<\s*(?P<stereo>[^>]*?)\s*>>)?
        \s*(?P<rest>\{.*)?$"#,
    )
    .unwrap()
});

static RELATIONSHIP_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"(?x)^
        (?P<l>"[^"]+"|[A-Za-z_][\w.]*)
        \s*
        (?:"(?P<lm>[^"]*)"\s*)?
        (?P<hl><\||[*o<])?
        (?P<dash>-+(?:[A-Za-z]+-+)?)
        (?P<hr>\|>|[*o>])?
        \s*
        (?:"(?P<rm>[^"]*)"\s*)?
        (?P<r>"[^"]+"|[A-Za-z_][\w.]*)
        \s*
        (?::\s*(?P<label>.*))?$"#,
    )
    .unwrap()
});

static MEMBER_SHORTHAND_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"^(?P<n>"[^"]+"|[A-Za-z_][\w.]*)\s*:\s*(?P<m>.+)$"#).unwrap()
});

static MODIFIER_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\{[^}]*\}").unwrap());

/// Constructs we recognize but do not model. Blocks opened by them are
/// skipped; their contents still go through normal line handling so classes
/// declared inside packages are kept.
const IGNORED_BLOCK_KEYWORDS: &[&str] = &["package", "namespace", "together", "rectangle"];

/// Constructs that swallow lines until a matching `end <kw>`.
const TEXT_BLOCK_KEYWORDS: &[&str] = &["note", "legend", "header", "footer"];

const IGNORED_LINE_KEYWORDS: &[&str] = &[
    "skinparam",
    "hide",
    "show",
    "scale",
    "caption",
    "left",
    "right",
    "top",
    "bottom",
    "remove",
    "allowmixing",
    "autonumber",
    "!",
];

enum Scope {
    /// Index into `classes`, plus the line the body was opened on.
    ClassBody(usize, usize),
    Ignored(usize),
}

struct Parser {
    classes: Vec<UmlClass>,
    relationships: Vec<Relationship>,
    title: Option<String>,
    index: HashMap<String, usize>,
    aliases: HashMap<String, String>,
    diagnostics: Vec<ParseDiagnostic>,
    scopes: Vec<Scope>,
    saw_start: bool,
    saw_end: bool,
    in_block_comment: bool,
    text_block: Option<&'static str>,
}

/// Parse PlantUML class-diagram text.
///
/// Returns the diagram together with all diagnostics. `@startuml`/`@enduml`
/// fences are optional (their absence is a warning), unknown lines warn and
/// are skipped, and classes referenced only from relationships are created
/// implicitly. The only hard failure is unbalanced braces.
pub fn parse_plantuml(
    src: &PlantUmlSource,
) -> Result<(UmlDiagram, Vec<ParseDiagnostic>), ParseError> {
    let mut parser = Parser {
        classes: Vec::new(),
        relationships: Vec::new(),
        title: None,
        index: HashMap::new(),
        aliases: HashMap::new(),
        diagnostics: Vec::new(),
        scopes: Vec::new(),
        saw_start: false,
        saw_end: false,
        in_block_comment: false,
        text_block: None,
    };

    let text = src.0.replace("\r\n", "\n");
    for (i, raw_line) in text.split('\n').enumerate() {
        parser.line(i + 1, raw_line)?;
    }
    if let Some(scope) = parser.scopes.last() {
        let line = match scope {
            Scope::ClassBody(_, line) | Scope::Ignored(line) => *line,
        };
        return Err(ParseError::UnbalancedBraces { line });
    }
    if !parser.saw_start || !parser.saw_end {
        parser.diagnostics.insert(
            0,
            ParseDiagnostic::warning(1, "missing @startuml/@enduml fences"),
        );
    }

    Ok((
        UmlDiagram {
            classes: parser.classes,
            relationships: parser.relationships,
            title: parser.title,
        },
        parser.diagnostics,
    ))
}

impl Parser {
    fn line(&mut self, line_no: usize, raw: &str) -> Result<(), ParseError> {
        if self.in_block_comment {
            if raw.contains("'/") {
                self.in_block_comment = false;
            }
            return Ok(());
        }
        if let Some(kw) = self.text_block {
            if raw.trim() == format!("end {kw}") {
                self.text_block = None;
            }
            return Ok(());
        }

        let line = raw.trim();
        if line.is_empty() || line.starts_with('\'') {
            return Ok(());
        }
        if line.starts_with("/'") {
            if !line.contains("'/") {
                self.in_block_comment = true;
            }
            return Ok(());
        }
        if line.starts_with("@startuml") {
            self.saw_start = true;
            return Ok(());
        }
        if line.starts_with("@enduml") {
            self.saw_end = true;
            return Ok(());
        }

        if let Some(Scope::ClassBody(class_idx, _)) = self.scopes.last() {
            let class_idx = *class_idx;
            if line == "}" {
                self.scopes.pop();
                return Ok(());
            }
            if is_member_separator(line) {
                return Ok(());
            }
            self.member(line_no, class_idx, line);
            return Ok(());
        }

        if line == "}" {
            match self.scopes.pop() {
                Some(_) => return Ok(()),
                None => return Err(ParseError::UnbalancedBraces { line: line_no }),
            }
        }

        if let Some(caps) = CLASS_HEADER_RE.captures(line) {
            self.class_header(line_no, &caps);
            return Ok(());
        }
        if let Some(rest) = line.strip_prefix("title") {
            if rest.starts_with(char::is_whitespace) {
                self.title = Some(rest.trim().to_string());
                return Ok(());
            }
        }
        if let Some(caps) = RELATIONSHIP_RE.captures(line) {
            self.relationship(line_no, &caps);
            return Ok(());
        }

        let first_word = line
            .split_whitespace()
            .next()
            .unwrap_or("")
            .to_lowercase();
        if TEXT_BLOCK_KEYWORDS.contains(&first_word.as_str()) {
            // one-line notes carry their text after a colon
            if !line.contains(':') {
                self.text_block = Some(
                    TEXT_BLOCK_KEYWORDS
                        .iter()
                        .find(|kw| **kw == first_word)
                        .unwrap(),
                );
            }
            self.diagnostics
                .push(ParseDiagnostic::warning(line_no, format!("ignored {first_word}")));
            return Ok(());
        }
        if IGNORED_BLOCK_KEYWORDS.contains(&first_word.as_str()) {
            if line.ends_with('{') {
                self.scopes.push(Scope::Ignored(line_no));
            }
            self.diagnostics
                .push(ParseDiagnostic::warning(line_no, format!("ignored {first_word}")));
            return Ok(());
        }
        if IGNORED_LINE_KEYWORDS
            .iter()
            .any(|kw| first_word.starts_with(kw))
        {
            self.diagnostics
                .push(ParseDiagnostic::warning(line_no, format!("ignored directive: {line}")));
            return Ok(());
        }
        if line.starts_with("class") || line.starts_with("enum") || line.starts_with("abstract") {
            self.diagnostics
                .push(ParseDiagnostic::error(line_no, format!("malformed declaration: {line}")));
            return Ok(());
        }
        if let Some(caps) = MEMBER_SHORTHAND_RE.captures(line) {
            let name = unquote(caps.name("n").unwrap().as_str());
            let name = self.resolve(&name);
            let idx = self.class_index(&name);
            let member = caps.name("m").unwrap().as_str().to_string();
            self.member(line_no, idx, &member);
            return Ok(());
        }

        self.diagnostics
            .push(ParseDiagnostic::warning(line_no, format!("unrecognized line: {line}")));
        Ok(())
    }

    fn class_header(&mut self, line_no: usize, caps: &regex::Captures<'_>) {
        let name = unquote(caps.name("name").unwrap().as_str());
        let idx = self.class_index(&name);
        if let Some(alias) = caps.name("alias") {
            self.aliases.insert(unquote(alias.as_str()), name.clone());
        }
        match caps.name("kw").unwrap().as_str() {
            "enum" => self.classes[idx].is_enumeration = true,
            "interface" => self.classes[idx].stereotype = Some("interface".to_string()),
            _ => {}
        }
        if caps.name("abs").is_some() {
            self.classes[idx].is_abstract = true;
        }
        if let Some(stereo) = caps.name("stereo") {
            if !stereo.as_str().is_empty() {
                self.classes[idx].stereotype = Some(stereo.as_str().to_string());
            }
        }
        if let Some(rest) = caps.name("rest") {
            let rest = &rest.as_str()[1..];
            match rest.find('}') {
                Some(close) => {
                    let inline = rest[..close].trim();
                    if !inline.is_empty() {
                        self.member(line_no, idx, inline);
                    }
                }
                None => {
                    if !rest.trim().is_empty() {
                        self.member(line_no, idx, rest.trim());
                    }
                    self.scopes.push(Scope::ClassBody(idx, line_no));
                }
            }
        }
    }

    fn member(&mut self, line_no: usize, class_idx: usize, raw: &str) {
        if raw.contains('(') {
            self.classes[class_idx].operations.push(raw.trim().to_string());
            return;
        }
        let cleaned = MODIFIER_RE.replace_all(raw, "");
        let cleaned = cleaned.trim();
        let (visibility, rest) = match cleaned.chars().next().and_then(Visibility::from_marker) {
            Some(v) => (Some(v), cleaned[1..].trim()),
            None => (None, cleaned),
        };
        let (name, declared_type) = match rest.split_once(':') {
            Some((n, t)) => (n.trim(), Some(t.trim().to_string()).filter(|t| !t.is_empty())),
            None => (rest, None),
        };
        if name.is_empty() {
            self.diagnostics
                .push(ParseDiagnostic::warning(line_no, format!("empty member skipped: {raw}")));
            return;
        }
        self.classes[class_idx].attributes.push(UmlAttribute {
            name: name.to_string(),
            declared_type,
            visibility,
        });
    }

    fn relationship(&mut self, line_no: usize, caps: &regex::Captures<'_>) {
        let head_left = caps.name("hl").map(|m| m.as_str());
        let head_right = caps.name("hr").map(|m| m.as_str());
        // (kind, flipped): flipped means the right-hand class is the source
        // (the subclass for generalizations, the whole for aggregation and
        // composition, the arrow origin for directed associations).
        let (kind, flipped) = match (head_left, head_right) {
            (None, None) | (None, Some(">")) => (RelationshipKind::Association, false),
            (Some("<"), None) => (RelationshipKind::Association, true),
            (None, Some("|>")) => (RelationshipKind::Generalization, false),
            (Some("<|"), None) => (RelationshipKind::Generalization, true),
            (Some("*"), None) => (RelationshipKind::Composition, false),
            (None, Some("*")) => (RelationshipKind::Composition, true),
            (Some("o"), None) => (RelationshipKind::Aggregation, false),
            (None, Some("o")) => (RelationshipKind::Aggregation, true),
            _ => {
                self.diagnostics.push(ParseDiagnostic::error(
                    line_no,
                    "relationship with conflicting arrow heads",
                ));
                return;
            }
        };

        let left = self.resolve(&unquote(caps.name("l").unwrap().as_str()));
        let right = self.resolve(&unquote(caps.name("r").unwrap().as_str()));
        self.class_index(&left);
        self.class_index(&right);

        let left_mult = self.multiplicity(line_no, caps.name("lm").map(|m| m.as_str()));
        let right_mult = self.multiplicity(line_no, caps.name("rm").map(|m| m.as_str()));

        let (source, target, source_multiplicity, target_multiplicity) = if flipped {
            (right, left, right_mult, left_mult)
        } else {
            (left, right, left_mult, right_mult)
        };

        let label = caps
            .name("label")
            .map(|m| m.as_str().trim_matches(|c| c == '<' || c == '>' || c == ' ').to_string())
            .filter(|l| !l.is_empty());

        self.relationships.push(Relationship {
            source,
            target,
            kind,
            source_multiplicity,
            target_multiplicity,
            label,
        });
    }

    fn multiplicity(&mut self, line_no: usize, text: Option<&str>) -> Option<Multiplicity> {
        let text = text?;
        if text.trim().is_empty() {
            return None;
        }
        match Multiplicity::parse(text) {
            Some(m) => Some(m),
            None => {
                self.diagnostics.push(ParseDiagnostic::warning(
                    line_no,
                    format!("unparseable multiplicity \"{text}\""),
                ));
                None
            }
        }
    }

    fn resolve(&self, name: &str) -> String {
        self.aliases.get(name).cloned().unwrap_or_else(|| name.to_string())
    }

    fn class_index(&mut self, name: &str) -> usize {
        if let Some(idx) = self.index.get(name) {
            return *idx;
        }
        self.classes.push(UmlClass::new(name));
        let idx = self.classes.len() - 1;
        self.index.insert(name.to_string(), idx);
        idx
    }
}

fn unquote(name: &str) -> String {
    name.strip_prefix('"')
        .and_then(|n| n.strip_suffix('"'))
        .unwrap_or(name)
        .to_string()
}

fn is_member_separator(line: &str) -> bool {
    line.len() >= 2 && line.chars().all(|c| matches!(c, '-' | '.' | '_' | '='))
}
