//! Name normalization shared by every matching step.
//!
//! Matching across diagrams is case-insensitive, separator-insensitive and
//! plural-insensitive: `"Order_Details"`, `"order details"` and
//! `"Order Detail"` all canonicalize to `"order detail"`. Singularization is
//! a fixed suffix-rule table plus an irregular-noun list, so results are
//! reproducible without any external linguistic resources.

use std::collections::HashMap;
use std::sync::LazyLock;

/// Irregular plurals plus invariant forms that the suffix rules would mangle.
static IRREGULAR_NOUNS: LazyLock<HashMap<&'static str, &'static str>> = LazyLock::new(|| {
    HashMap::from([
        ("children", "child"),
        ("people", "person"),
        ("men", "man"),
        ("women", "woman"),
        ("mice", "mouse"),
        ("geese", "goose"),
        ("feet", "foot"),
        ("teeth", "tooth"),
        ("oxen", "ox"),
        ("indices", "index"),
        ("houses", "house"),
        ("movies", "movie"),
        ("cookies", "cookie"),
        ("series", "series"),
        ("species", "species"),
        ("news", "news"),
    ])
});

/// Canonicalize a class or attribute name for matching.
///
/// Lowercases, trims, collapses runs of whitespace/underscores/hyphens into
/// single spaces and singularizes the final word. Total and idempotent; the
/// empty string maps to itself.
pub fn normalize_name(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    let mut words: Vec<String> = lowered
        .split(|c: char| c.is_whitespace() || c == '_' || c == '-')
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect();
    if let Some(last) = words.last_mut() {
        *last = singularize(last);
    }
    words.join(" ")
}

/// Singularize one lowercase word.
///
/// The suffix rules are applied until a fixed point is reached, which is
/// what makes [`normalize_name`] idempotent: a second pass can never change
/// the final word again.
fn singularize(word: &str) -> String {
    if let Some(singular) = IRREGULAR_NOUNS.get(word) {
        return (*singular).to_string();
    }
    let mut current = word.to_string();
    loop {
        let next = singularize_step(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// One application of the rule table: `-ies` -> `-y`, `-ses` -> `-s`,
/// then strip a trailing `s` unless the word ends in `ss`, `us` or `is`.
fn singularize_step(word: &str) -> String {
    if let Some(stem) = word.strip_suffix("ies") {
        if !stem.is_empty() {
            return format!("{stem}y");
        }
    }
    if word.len() > 4 && word.ends_with("ses") {
        return word[..word.len() - 2].to_string();
    }
    if word.len() > 1
        && word.ends_with('s')
        && !word.ends_with("ss")
        && !word.ends_with("us")
        && !word.ends_with("is")
    {
        return word[..word.len() - 1].to_string();
    }
    word.to_string()
}
