//! Projection of full parses onto the reduced feature sets used when
//! collecting context statistics: each category keeps a fixed set of
//! attributes, closed classes additionally keep their root and
//! subcategorization, and everything else is dropped.

use super::PreprocessError;
use crate::model::{AmbiguousToken, Corpus, FeatureStructure, FeatureValue, STEM};
use std::collections::{BTreeMap, BTreeSet};

/// Per-category keep-lists. Closed-class categories implicitly keep `root`
/// and `subcat` in addition to any listed attributes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProjectionTemplate {
    pub keep: BTreeMap<String, Vec<String>>,
    pub closed: BTreeSet<String>,
}

impl ProjectionTemplate {
    /// Parse the template format: `closed: cat…` and `category: attr…`
    /// lines, `#` comments.
    pub fn parse(text: &str) -> Result<ProjectionTemplate, PreprocessError> {
        let mut t = ProjectionTemplate::default();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, rest) = line.split_once(':').ok_or(PreprocessError::Template {
                line: ln + 1,
                msg: "expected `name: …`".into(),
            })?;
            let items: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            let head = head.trim();
            if head == "closed" {
                t.closed.extend(items);
            } else {
                t.keep.entry(head.to_string()).or_default().extend(items);
            }
        }
        Ok(t)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if !self.closed.is_empty() {
            out.push_str("closed:");
            for c in &self.closed {
                out.push(' ');
                out.push_str(c);
            }
            out.push('\n');
        }
        for (cat, attrs) in &self.keep {
            out.push_str(cat);
            out.push(':');
            for a in attrs {
                out.push(' ');
                out.push_str(a);
            }
            out.push('\n');
        }
        out
    }

    /// Template for the first learning round: roots only on closed classes.
    pub fn coarse() -> ProjectionTemplate {
        ProjectionTemplate::parse(include_str!("../../data/template-coarse.txt"))
            .expect("built-in template must parse")
    }

    /// Template for the second learning round: open classes also keep roots.
    pub fn rooted() -> ProjectionTemplate {
        ProjectionTemplate::parse(include_str!("../../data/template-rooted.txt"))
            .expect("built-in template must parse")
    }

    fn kept_attrs(&self, cat: &str) -> Result<Vec<&str>, PreprocessError> {
        let listed = self.keep.get(cat);
        let closed = self.closed.contains(cat);
        if listed.is_none() && !closed {
            return Err(PreprocessError::MissingCategory(cat.to_string()));
        }
        let mut attrs: Vec<&str> = Vec::new();
        if closed {
            attrs.extend(["root", "subcat"]);
        }
        if let Some(list) = listed {
            for a in list {
                if !attrs.contains(&a.as_str()) {
                    attrs.push(a);
                }
            }
        }
        Ok(attrs)
    }
}

/// Reduce one parse to its template features; `stem` values are projected
/// recursively when kept. Projection is idempotent.
pub fn project(p: &FeatureStructure, t: &ProjectionTemplate) -> Result<FeatureStructure, PreprocessError> {
    let cat = p.cat().ok_or(PreprocessError::MissingCat)?.to_string();
    let kept = t.kept_attrs(&cat)?;
    let mut out = FeatureStructure::new();
    out.set_atom("cat", &cat);
    for (name, value) in p.iter() {
        if name == "cat" || !kept.contains(&name) {
            continue;
        }
        match value {
            FeatureValue::Atom(a) => out.set_atom(name, a.clone()),
            FeatureValue::Nested(inner) => {
                debug_assert_eq!(name, STEM);
                out.set(name, FeatureValue::Nested(Box::new(project(inner, t)?)));
            }
        }
    }
    Ok(out)
}

/// Project every parse of a token and drop duplicates that the reduction
/// collapses together.
pub fn project_token(token: &AmbiguousToken, t: &ProjectionTemplate) -> Result<AmbiguousToken, PreprocessError> {
    let mut out = token.clone();
    out.parses = Vec::new();
    for p in &token.parses {
        out.parses.push(project(p, t)?);
    }
    out.dedup_parses();
    Ok(out)
}

/// Project every non-marker token of a corpus; sentence markers pass through.
pub fn project_corpus(corpus: &Corpus, t: &ProjectionTemplate) -> Result<Corpus, PreprocessError> {
    let mut out = corpus.clone();
    for sentence in &mut out.sentences {
        for token in &mut sentence.tokens {
            if !token.is_marker() {
                *token = project_token(token, t)?;
            }
        }
    }
    Ok(out)
}
