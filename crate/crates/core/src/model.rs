//! Core data model: feature structures, constraints, tokens, sentences, corpora.
//!
//! A morphological parse is a `FeatureStructure`: an attribute→value map in
//! which every value is an atom except `stem`, which may nest another
//! structure (produced by derivational category conversions). A `Constraint`
//! is a pattern over such structures, matched by subsumption.

use std::fmt;

/// Attribute name under which a nested structure may appear.
pub const STEM: &str = "stem";

/// Surface of the sentence-initial marker token.
pub const BEGIN_SURFACE: &str = "@";
/// Surface of the sentence-final marker token.
pub const END_SURFACE: &str = "#";
/// Category atom of the sentence-initial marker.
pub const BEGIN_CAT: &str = "beginning_of_sentence";
/// Category atom of the sentence-final marker.
pub const END_CAT: &str = "end_of_sentence";

/// Canonical serialization rank of an attribute name. `cat` sorts first,
/// `stem` and `suffix` last; unknown attributes sort between the known
/// scalars and the stem block, alphabetically.
fn attr_rank(name: &str) -> u32 {
    match name {
        "cat" => 0,
        "root" => 1,
        "type" => 2,
        "sense" => 3,
        "voice" => 4,
        "tam1" => 5,
        "tam2" => 6,
        "copula" => 7,
        "agr" => 8,
        "poss" => 9,
        "case" => 10,
        "subcat" => 11,
        STEM => 100,
        "suffix" => 101,
        _ => 50,
    }
}

/// True for attribute names the model knows about; anything else is
/// preserved verbatim but reported as a warning by the corpus parser.
pub fn is_known_attr(name: &str) -> bool {
    attr_rank(name) != 50
}

fn attr_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    attr_rank(a).cmp(&attr_rank(b)).then_with(|| a.cmp(b))
}

/// Value of one attribute inside a `FeatureStructure`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureValue {
    Atom(String),
    Nested(Box<FeatureStructure>),
}

impl FeatureValue {
    pub fn atom(s: impl Into<String>) -> Self {
        FeatureValue::Atom(s.into())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            FeatureValue::Atom(a) => Some(a),
            FeatureValue::Nested(_) => None,
        }
    }

    pub fn as_nested(&self) -> Option<&FeatureStructure> {
        match self {
            FeatureValue::Atom(_) => None,
            FeatureValue::Nested(fs) => Some(fs),
        }
    }
}

/// One morphological parse in hierarchical form. Attributes are kept in
/// canonical order so that equality, ordering and serialization are all
/// deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureStructure {
    attrs: Vec<(String, FeatureValue)>,
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert or replace an attribute, keeping canonical order.
    pub fn set(&mut self, name: impl Into<String>, value: FeatureValue) {
        let name = name.into();
        match self.attrs.iter().position(|(n, _)| *n == name) {
            Some(i) => self.attrs[i].1 = value,
            None => {
                let at = self
                    .attrs
                    .iter()
                    .position(|(n, _)| attr_cmp(&name, n) == std::cmp::Ordering::Less)
                    .unwrap_or(self.attrs.len());
                self.attrs.insert(at, (name, value));
            }
        }
    }

    pub fn set_atom(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.set(name, FeatureValue::Atom(value.into()));
    }

    pub fn get(&self, name: &str) -> Option<&FeatureValue> {
        self.attrs.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn atom(&self, name: &str) -> Option<&str> {
        self.get(name).and_then(FeatureValue::as_atom)
    }

    pub fn remove(&mut self, name: &str) {
        self.attrs.retain(|(n, _)| n != name);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FeatureValue)> {
        self.attrs.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn cat(&self) -> Option<&str> {
        self.atom("cat")
    }

    pub fn stem(&self) -> Option<&FeatureStructure> {
        self.get(STEM).and_then(FeatureValue::as_nested)
    }

    /// True when the parse was produced by a category conversion.
    pub fn is_derived(&self) -> bool {
        self.stem().is_some()
    }

    /// Root of the innermost stem (the lexical root of a derived form), or
    /// the top-level root for underived parses.
    pub fn innermost_root(&self) -> Option<&str> {
        match self.stem() {
            Some(stem) => stem.innermost_root(),
            None => self.atom("root"),
        }
    }

    /// Total number of attributes, counting nested levels.
    pub fn attr_count_recursive(&self) -> usize {
        self.attrs
            .iter()
            .map(|(_, v)| match v {
                FeatureValue::Atom(_) => 1,
                FeatureValue::Nested(fs) => 1 + fs.attr_count_recursive(),
            })
            .sum()
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::format::serialize_parse(self))
    }
}

/// One item of an analyzer-output parse: a plain feature pair or a
/// category-conversion marker.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinearItem {
    Feature(String, String),
    /// `(target category, suffix atom)`; the suffix atom may be `none`.
    Conv(String, String),
}

/// A flat analyzer-output parse: feature pairs interleaved with conversion
/// markers, e.g. `[cat=verb][root=gel][sense=pos][conv=noun=yis]...`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearParse {
    pub items: Vec<LinearItem>,
}

impl LinearParse {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn feature(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.items.push(LinearItem::Feature(name.into(), value.into()));
        self
    }

    pub fn conv(mut self, cat: impl Into<String>, suffix: impl Into<String>) -> Self {
        self.items.push(LinearItem::Conv(cat.into(), suffix.into()));
        self
    }
}

/// Pattern value inside a `Constraint`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternValue {
    Atom(String),
    Nested(Box<Constraint>),
    /// The absence marker `stem:no` — matches parses *without* a stem.
    Absent,
}

/// A feature-structure pattern matched by subsumption: every listed
/// attribute must be present in the parse with an equal value (recursively
/// under `stem`). An empty pattern matches everything.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pattern: Vec<(String, PatternValue)>,
}

impl Constraint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: PatternValue) {
        let name = name.into();
        match self.pattern.iter().position(|(n, _)| *n == name) {
            Some(i) => self.pattern[i].1 = value,
            None => {
                let at = self
                    .pattern
                    .iter()
                    .position(|(n, _)| attr_cmp(&name, n) == std::cmp::Ordering::Less)
                    .unwrap_or(self.pattern.len());
                self.pattern.insert(at, (name, value));
            }
        }
    }

    pub fn set_atom(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.set(name, PatternValue::Atom(value.into()));
    }

    pub fn get(&self, name: &str) -> Option<&PatternValue> {
        self.pattern.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn remove(&mut self, name: &str) {
        self.pattern.retain(|(n, _)| n != name);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PatternValue)> {
        self.pattern.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }

    /// Total number of pattern attributes, counting nested levels; used as a
    /// specificity measure for deterministic tie-breaking.
    pub fn attr_count_recursive(&self) -> usize {
        self.pattern
            .iter()
            .map(|(_, v)| match v {
                PatternValue::Atom(_) | PatternValue::Absent => 1,
                PatternValue::Nested(c) => 1 + c.attr_count_recursive(),
            })
            .sum()
    }

    /// Build the most specific constraint matching exactly `p`'s attributes.
    pub fn from_structure(p: &FeatureStructure) -> Constraint {
        let mut c = Constraint::new();
        for (name, value) in p.iter() {
            match value {
                FeatureValue::Atom(a) => c.set_atom(name, a.clone()),
                FeatureValue::Nested(fs) => {
                    c.set(name, PatternValue::Nested(Box::new(Constraint::from_structure(fs))))
                }
            }
        }
        c
    }

    /// Subsumption test: does this pattern hold of parse `p`?
    pub fn subsumes(&self, p: &FeatureStructure) -> bool {
        self.pattern.iter().all(|(name, want)| match want {
            PatternValue::Atom(a) => p.atom(name) == Some(a.as_str()),
            PatternValue::Nested(c) => match p.get(name).and_then(FeatureValue::as_nested) {
                Some(inner) => c.subsumes(inner),
                None => false,
            },
            PatternValue::Absent => p.get(name).is_none(),
        })
    }
}

/// Normalize a surface form for `token:` comparisons: ASCII letters are
/// lowercased, everything else (including the uppercase-encoded special
/// characters inside roots) is left alone only when it is not ASCII.
pub fn normalize_surface(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_uppercase() { c.to_ascii_lowercase() } else { c })
        .collect()
}

/// A surface token with its (possibly still ambiguous) parse list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AmbiguousToken {
    pub surface: String,
    pub parses: Vec<FeatureStructure>,
    /// The analyzer had no entry; parses (if any) come from the guesser.
    pub unknown: bool,
    /// The token is a packed collocation group.
    pub collocation: bool,
}

impl AmbiguousToken {
    pub fn new(surface: impl Into<String>, parses: Vec<FeatureStructure>) -> Self {
        AmbiguousToken { surface: surface.into(), parses, unknown: false, collocation: false }
    }

    pub fn is_ambiguous(&self) -> bool {
        self.parses.len() > 1
    }

    pub fn is_marker(&self) -> bool {
        matches!(self.parses.first().and_then(|p| p.cat()), Some(BEGIN_CAT) | Some(END_CAT))
    }

    /// Remove exact duplicate parses, keeping first occurrences.
    pub fn dedup_parses(&mut self) -> usize {
        let before = self.parses.len();
        let mut seen: Vec<&FeatureStructure> = Vec::new();
        let mut keep = vec![false; self.parses.len()];
        for (i, p) in self.parses.iter().enumerate() {
            if !seen.contains(&p) {
                seen.push(p);
                keep[i] = true;
            }
        }
        let mut it = keep.iter();
        self.parses.retain(|_| *it.next().unwrap());
        before - self.parses.len()
    }
}

/// Marker token for sentence starts.
pub fn begin_marker() -> AmbiguousToken {
    let mut p = FeatureStructure::new();
    p.set_atom("cat", BEGIN_CAT);
    AmbiguousToken::new(BEGIN_SURFACE, vec![p])
}

/// Marker token for sentence ends.
pub fn end_marker() -> AmbiguousToken {
    let mut p = FeatureStructure::new();
    p.set_atom("cat", END_CAT);
    AmbiguousToken::new(END_SURFACE, vec![p])
}

/// A sentence: begin marker, body tokens, end marker.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<AmbiguousToken>,
}

impl Sentence {
    /// Wrap body tokens in sentence markers.
    pub fn from_body(body: Vec<AmbiguousToken>) -> Self {
        let mut tokens = Vec::with_capacity(body.len() + 2);
        tokens.push(begin_marker());
        tokens.extend(body);
        tokens.push(end_marker());
        Sentence { tokens }
    }

    /// Body tokens (without the markers).
    pub fn body(&self) -> &[AmbiguousToken] {
        let n = self.tokens.len();
        if n >= 2 { &self.tokens[1..n - 1] } else { &[] }
    }
}

/// A sequence of sentences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
    /// Free-form provenance note (input path etc.); not serialized.
    pub source: Option<String>,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        Corpus { sentences, source: None }
    }

    /// Body token count (markers excluded).
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.body().len()).sum()
    }

    /// Total parse count over body tokens.
    pub fn parse_count(&self) -> usize {
        self.sentences
            .iter()
            .map(|s| s.body().iter().map(|t| t.parses.len()).sum::<usize>())
            .sum()
    }

    /// Average parses per body token.
    pub fn ambiguity(&self) -> f64 {
        let n = self.token_count();
        if n == 0 { 0.0 } else { self.parse_count() as f64 / n as f64 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noun(root: &str, case: &str) -> FeatureStructure {
        let mut p = FeatureStructure::new();
        p.set_atom("cat", "noun");
        p.set_atom("root", root);
        p.set_atom("agr", "3SG");
        p.set_atom("poss", "NONE");
        p.set_atom("case", case);
        p
    }

    #[test]
    fn canonical_attribute_order_is_insertion_independent() {
        let mut a = FeatureStructure::new();
        a.set_atom("case", "abl");
        a.set_atom("cat", "noun");
        a.set_atom("root", "can");
        let mut b = FeatureStructure::new();
        b.set_atom("root", "can");
        b.set_atom("case", "abl");
        b.set_atom("cat", "noun");
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|(n, _)| n).collect::<Vec<_>>(), vec!["cat", "root", "case"]);
    }

    #[test]
    fn subsumption_matches_ablative_noun() {
        let mut c = Constraint::new();
        c.set_atom("case", "abl");
        assert!(c.subsumes(&noun("can", "abl")));
        assert!(!c.subsumes(&noun("can", "nom")));
    }

    #[test]
    fn empty_constraint_is_universal() {
        assert!(Constraint::new().subsumes(&noun("can", "abl")));
        assert!(Constraint::new().subsumes(&FeatureStructure::new()));
    }

    #[test]
    fn absence_marker_rejects_derived_parses() {
        let mut derived = FeatureStructure::new();
        derived.set_atom("cat", "adj");
        derived.set("stem", FeatureValue::Nested(Box::new(noun("gel", "loc"))));
        let mut c = Constraint::new();
        c.set("stem", PatternValue::Absent);
        assert!(!c.subsumes(&derived));
        assert!(c.subsumes(&noun("gel", "loc")));
    }

    #[test]
    fn nested_stem_constraint_recurses() {
        let mut derived = FeatureStructure::new();
        derived.set_atom("cat", "adj");
        derived.set("stem", FeatureValue::Nested(Box::new(noun("oda", "loc"))));
        let mut inner = Constraint::new();
        inner.set_atom("cat", "noun");
        let mut c = Constraint::new();
        c.set_atom("cat", "adj");
        c.set("stem", PatternValue::Nested(Box::new(inner)));
        assert!(c.subsumes(&derived));
    }

    #[test]
    fn innermost_root_descends_stems() {
        let mut inner = FeatureStructure::new();
        inner.set_atom("cat", "noun");
        inner.set_atom("root", "imkan");
        let mut mid = FeatureStructure::new();
        mid.set_atom("cat", "adj");
        mid.set("stem", FeatureValue::Nested(Box::new(inner)));
        let mut top = FeatureStructure::new();
        top.set_atom("cat", "verb");
        top.set("stem", FeatureValue::Nested(Box::new(mid)));
        assert_eq!(top.innermost_root(), Some("imkan"));
        assert!(top.is_derived());
    }

    #[test]
    fn dedup_keeps_first_occurrences() {
        let p = noun("ev", "nom");
        let q = noun("ev", "acc");
        let mut t = AmbiguousToken::new("ev", vec![p.clone(), q.clone(), p.clone()]);
        assert_eq!(t.dedup_parses(), 1);
        assert_eq!(t.parses, vec![p, q]);
    }
}
