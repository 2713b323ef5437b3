//! Text formats: the bracketed corpus format and the rule-file format.
//!
//! Both formats share one canonical serialization so that
//! `serialize(parse(text))` is byte-identical to `text` whenever `text` is
//! already canonical (one record per line, no interior spaces, canonical
//! attribute order, minimal quoting).

use crate::model::*;
use crate::rules::{ConstraintRule, Provenance, RuleKind};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("invalid rule at line {line}: {msg}")]
    Rule { line: usize, msg: String },
    #[error("invalid sentence at line {line}: {msg}")]
    Sentence { line: usize, msg: String },
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    Atom(String),
    Comment(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormatError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '%' => {
                // comment to end of line
                let mut body = String::new();
                chars.next();
                bump(c, &mut line, &mut col);
                while let Some(&d) = chars.peek() {
                    if d == '\n' {
                        break;
                    }
                    body.push(d);
                    chars.next();
                    bump(d, &mut line, &mut col);
                }
                out.push(Spanned { tok: Tok::Comment(body.trim().to_string()), line: tline, col: tcol });
            }
            '[' | ']' | ',' | ':' | '.' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let tok = match c {
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    _ => Tok::Dot,
                };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
            '\'' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let mut body = String::new();
                loop {
                    match chars.next() {
                        None => {
                            return Err(FormatError::Syntax {
                                line: tline,
                                col: tcol,
                                msg: "unterminated quoted atom".into(),
                            })
                        }
                        Some('\\') => {
                            bump('\\', &mut line, &mut col);
                            match chars.next() {
                                Some(e) => {
                                    bump(e, &mut line, &mut col);
                                    body.push(e);
                                }
                                None => {
                                    return Err(FormatError::Syntax {
                                        line: tline,
                                        col: tcol,
                                        msg: "dangling escape in quoted atom".into(),
                                    })
                                }
                            }
                        }
                        Some('\'') => {
                            bump('\'', &mut line, &mut col);
                            break;
                        }
                        Some(e) => {
                            bump(e, &mut line, &mut col);
                            body.push(e);
                        }
                    }
                }
                out.push(Spanned { tok: Tok::Atom(body), line: tline, col: tcol });
            }
            _ if c.is_alphanumeric() || c == '_' || c == '@' || c == '#' => {
                let mut body = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '@' || d == '#' {
                        body.push(d);
                        chars.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Atom(body), line: tline, col: tcol });
            }
            _ => {
                return Err(FormatError::Syntax {
                    line: tline,
                    col: tcol,
                    msg: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    Ok(out)
}

/// Quote an atom when it is not a plain lowercase token.
fn atom_text(a: &str) -> String {
    let plain = !a.is_empty()
        && a.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && a.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
    if plain || a == BEGIN_SURFACE || a == END_SURFACE {
        a.to_string()
    } else {
        let mut s = String::with_capacity(a.len() + 2);
        s.push('\'');
        for c in a.chars() {
            if c == '\'' || c == '\\' {
                s.push('\\');
            }
            s.push(c);
        }
        s.push('\'');
        s
    }
}

// ---------------------------------------------------------------------------
// Parser infrastructure
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    warnings: Vec<String>,
}

impl Parser {
    fn new(toks: Vec<Spanned>) -> Self {
        Parser { toks, pos: 0, warnings: Vec::new() }
    }

    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    /// Peek skipping comments (comments are only meaningful right after a
    /// rule terminator, where the caller inspects them explicitly).
    fn skip_comments(&mut self) {
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Comment(_))) {
            self.pos += 1;
        }
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .or_else(|| self.toks.last().map(|s| (s.line, s.col + 1)))
            .unwrap_or((1, 1))
    }

    fn err(&self, msg: impl Into<String>) -> FormatError {
        let (line, col) = self.here();
        FormatError::Syntax { line, col, msg: msg.into() }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), FormatError> {
        self.skip_comments();
        match self.peek() {
            Some(s) if s.tok == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn atom(&mut self, what: &str) -> Result<String, FormatError> {
        self.skip_comments();
        match self.peek().cloned() {
            Some(Spanned { tok: Tok::Atom(a), .. }) => {
                self.pos += 1;
                Ok(a)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn at(&mut self, want: &Tok) -> bool {
        self.skip_comments();
        self.peek().map(|s| &s.tok) == Some(want)
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.at(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn done(&mut self) -> bool {
        self.skip_comments();
        self.pos >= self.toks.len()
    }
}

// ---------------------------------------------------------------------------
// Corpus format
// ---------------------------------------------------------------------------

/// Parse a corpus file, returning warnings (unknown attributes, duplicate
/// parses) alongside the corpus.
pub fn parse_corpus_text_with_warnings(text: &str) -> Result<(Corpus, Vec<String>), FormatError> {
    let mut p = Parser::new(lex(text)?);
    let mut sentences = Vec::new();
    while !p.done() {
        sentences.push(parse_sentence(&mut p)?);
    }
    let warnings = std::mem::take(&mut p.warnings);
    Ok((Corpus::new(sentences), warnings))
}

/// Parse a corpus file, discarding warnings.
pub fn parse_corpus_text(text: &str) -> Result<Corpus, FormatError> {
    parse_corpus_text_with_warnings(text).map(|(c, _)| c)
}

fn parse_sentence(p: &mut Parser) -> Result<Sentence, FormatError> {
    let (line, _) = p.here();
    p.expect(Tok::LBracket, "`[` starting a sentence")?;
    let mut tokens = Vec::new();
    loop {
        tokens.push(parse_token(p)?);
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.expect(Tok::RBracket, "`]` closing a sentence")?;
    p.expect(Tok::Dot, "`.` terminating a sentence")?;
    let ok_begin = tokens.first().is_some_and(|t| {
        t.surface == BEGIN_SURFACE && t.parses.len() == 1 && t.parses[0].cat() == Some(BEGIN_CAT)
    });
    let ok_end = tokens.last().is_some_and(|t| {
        t.surface == END_SURFACE && t.parses.len() == 1 && t.parses[0].cat() == Some(END_CAT)
    });
    if tokens.len() < 2 || !ok_begin || !ok_end {
        return Err(FormatError::Sentence {
            line,
            msg: "sentence must start with the `@` marker and end with the `#` marker".into(),
        });
    }
    for t in &tokens[1..tokens.len() - 1] {
        if t.is_marker() {
            return Err(FormatError::Sentence {
                line,
                msg: "sentence markers may appear only at the edges".into(),
            });
        }
    }
    Ok(Sentence { tokens })
}

fn parse_token(p: &mut Parser) -> Result<AmbiguousToken, FormatError> {
    p.expect(Tok::LBracket, "`[` starting a token")?;
    let surface = p.atom("token surface")?;
    p.expect(Tok::Comma, "`,` after token surface")?;
    p.expect(Tok::LBracket, "`[` starting the parse list")?;
    let mut parses = Vec::new();
    if !p.at(&Tok::RBracket) {
        loop {
            parses.push(parse_structure(p)?);
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
    }
    p.expect(Tok::RBracket, "`]` closing the parse list")?;
    let mut token = AmbiguousToken::new(surface, parses);
    while p.eat(&Tok::Comma) {
        let flag = p.atom("token flag")?;
        match flag.as_str() {
            "unknown" => token.unknown = true,
            "colloc" => token.collocation = true,
            other => return Err(p.err(format!("unknown token flag `{other}`"))),
        }
    }
    p.expect(Tok::RBracket, "`]` closing the token")?;
    if token.dedup_parses() > 0 {
        p.warnings.push(format!("duplicate parses removed on token `{}`", token.surface));
    }
    if token.parses.is_empty() && !token.unknown {
        return Err(p.err(format!("token `{}` has no parses and no `unknown` flag", token.surface)));
    }
    Ok(token)
}

fn parse_structure(p: &mut Parser) -> Result<FeatureStructure, FormatError> {
    p.expect(Tok::LBracket, "`[` starting a parse")?;
    let mut fs = FeatureStructure::new();
    if !p.at(&Tok::RBracket) {
        loop {
            let name = p.atom("attribute name")?;
            p.expect(Tok::Colon, "`:` after attribute name")?;
            if p.at(&Tok::LBracket) {
                if name != STEM {
                    return Err(p.err(format!("only `stem` may nest a structure, found `{name}`")));
                }
                let inner = parse_structure(p)?;
                fs.set(name, FeatureValue::Nested(Box::new(inner)));
            } else {
                let value = p.atom("attribute value")?;
                if !is_known_attr(&name) {
                    p.warnings.push(format!("unknown attribute `{name}` preserved verbatim"));
                }
                fs.set(name, FeatureValue::Atom(value));
            }
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
    }
    p.expect(Tok::RBracket, "`]` closing a parse")?;
    Ok(fs)
}

/// Canonical text of one parse.
pub fn serialize_parse(p: &FeatureStructure) -> String {
    let mut s = String::from("[");
    for (i, (name, value)) in p.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(name);
        s.push(':');
        match value {
            FeatureValue::Atom(a) => s.push_str(&atom_text(a)),
            FeatureValue::Nested(fs) => s.push_str(&serialize_parse(fs)),
        }
    }
    s.push(']');
    s
}

fn serialize_token(t: &AmbiguousToken) -> String {
    let mut s = String::from("[");
    s.push_str(&atom_text(&t.surface));
    s.push_str(",[");
    for (i, p) in t.parses.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&serialize_parse(p));
    }
    s.push(']');
    if t.unknown {
        s.push_str(",unknown");
    }
    if t.collocation {
        s.push_str(",colloc");
    }
    s.push(']');
    s
}

/// Canonical text of a whole corpus: one sentence per line.
pub fn serialize_corpus(c: &Corpus) -> String {
    let mut out = String::new();
    for sent in &c.sentences {
        out.push('[');
        for (i, t) in sent.tokens.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&serialize_token(t));
        }
        out.push_str("].\n");
    }
    out
}

// ---------------------------------------------------------------------------
// Rule format
// ---------------------------------------------------------------------------

/// Parse a rule file: one rule per record, either the full contextual form
/// `[llc:…,lc:…,choose|delete:…,rc:…,rrc:…(,token:…)?].` or the context-free
/// form `[delete:[…](,token:…)?].`. A trailing `% score=… iter=…` comment
/// (as written for learned rules) is read back into the rule.
pub fn parse_rules(text: &str) -> Result<Vec<ConstraintRule>, FormatError> {
    let mut p = Parser::new(lex(text)?);
    let mut rules = Vec::new();
    while !p.done() {
        rules.push(parse_rule(&mut p)?);
    }
    Ok(rules)
}

fn parse_rule(p: &mut Parser) -> Result<ConstraintRule, FormatError> {
    let (line, _) = p.here();
    p.expect(Tok::LBracket, "`[` starting a rule")?;
    let mut slots: [Option<Option<Constraint>>; 4] = [None, None, None, None];
    let mut kind: Option<RuleKind> = None;
    let mut target: Option<Constraint> = None;
    let mut token: Option<String> = None;
    let mut saw_slot_keys = false;
    loop {
        let key = p.atom("rule key")?;
        p.expect(Tok::Colon, "`:` after rule key")?;
        match key.as_str() {
            "llc" | "lc" | "rc" | "rrc" => {
                saw_slot_keys = true;
                let idx = match key.as_str() {
                    "llc" => 0,
                    "lc" => 1,
                    "rc" => 2,
                    _ => 3,
                };
                if slots[idx].is_some() {
                    return Err(FormatError::Rule { line, msg: format!("duplicate slot `{key}`") });
                }
                slots[idx] = Some(parse_slot(p)?);
            }
            "choose" | "delete" => {
                if kind.is_some() {
                    return Err(FormatError::Rule { line, msg: "duplicate rule kind".into() });
                }
                kind = Some(if key == "choose" { RuleKind::Choose } else { RuleKind::Delete });
                let (c, tok) = parse_constraint(p)?;
                target = Some(c);
                if let Some(t) = tok {
                    token = Some(t);
                }
            }
            "token" => {
                token = Some(p.atom("token surface")?);
            }
            other => return Err(FormatError::Rule { line, msg: format!("unknown rule key `{other}`") }),
        }
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.expect(Tok::RBracket, "`]` closing a rule")?;
    p.expect(Tok::Dot, "`.` terminating a rule")?;
    let kind = kind.ok_or_else(|| FormatError::Rule { line, msg: "rule needs `choose:` or `delete:`".into() })?;
    let target = target.unwrap_or_default();
    if target.is_empty() && token.is_none() {
        return Err(FormatError::Rule { line, msg: "rule target is empty and no token condition given".into() });
    }
    if !saw_slot_keys && kind == RuleKind::Choose {
        return Err(FormatError::Rule {
            line,
            msg: "the context-free short form is only legal for delete rules".into(),
        });
    }
    let mut rule = ConstraintRule {
        kind,
        llc: slots[0].clone().flatten(),
        lc: slots[1].clone().flatten(),
        rc: slots[2].clone().flatten(),
        rrc: slots[3].clone().flatten(),
        target,
        token: token.map(|t| normalize_surface(&t)),
        provenance: Provenance::HandCrafted,
        score: None,
        iteration: None,
    };
    // a learned rule carries its score in a trailing comment
    if let Some(Spanned { tok: Tok::Comment(c), .. }) = p.peek().cloned() {
        if let Some((score, iter)) = parse_score_comment(&c) {
            p.pos += 1;
            rule.provenance = Provenance::Learned;
            rule.score = Some(score);
            rule.iteration = Some(iter);
        }
    }
    Ok(rule)
}

fn parse_score_comment(c: &str) -> Option<(f64, usize)> {
    let rest = c.trim().strip_prefix("score=")?;
    let (score, rest) = rest.split_once(' ')?;
    let iter = rest.trim().strip_prefix("iter=")?;
    Some((score.parse().ok()?, iter.parse().ok()?))
}

/// A context slot: `[]` (unconstrained) or `[[…constraint…]]`.
fn parse_slot(p: &mut Parser) -> Result<Option<Constraint>, FormatError> {
    p.expect(Tok::LBracket, "`[` starting a context slot")?;
    if p.eat(&Tok::RBracket) {
        return Ok(None);
    }
    let (c, tok) = parse_constraint(p)?;
    if tok.is_some() {
        return Err(p.err("`token:` is only legal in the target constraint"));
    }
    p.expect(Tok::RBracket, "`]` closing a context slot")?;
    Ok(Some(c))
}

/// A constraint pattern `[a:v,…]`; a `token:` pair inside is hoisted out.
fn parse_constraint(p: &mut Parser) -> Result<(Constraint, Option<String>), FormatError> {
    p.expect(Tok::LBracket, "`[` starting a constraint")?;
    let mut c = Constraint::new();
    let mut token = None;
    if !p.at(&Tok::RBracket) {
        loop {
            let name = p.atom("constraint attribute")?;
            p.expect(Tok::Colon, "`:` after constraint attribute")?;
            if name == "token" {
                token = Some(p.atom("token surface")?);
            } else if p.at(&Tok::LBracket) {
                if name != STEM {
                    return Err(p.err(format!("only `stem` may nest a constraint, found `{name}`")));
                }
                let (inner, tok) = parse_constraint(p)?;
                if tok.is_some() {
                    return Err(p.err("`token:` may not appear inside a stem constraint"));
                }
                c.set(name, PatternValue::Nested(Box::new(inner)));
            } else {
                let value = p.atom("constraint value")?;
                if name == STEM && value == "no" {
                    c.set(name, PatternValue::Absent);
                } else {
                    c.set_atom(name, value);
                }
            }
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
    }
    p.expect(Tok::RBracket, "`]` closing a constraint")?;
    Ok((c, token))
}

/// Canonical text of one constraint pattern.
pub fn serialize_constraint(c: &Constraint) -> String {
    let mut s = String::from("[");
    for (i, (name, value)) in c.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(name);
        s.push(':');
        match value {
            PatternValue::Atom(a) => s.push_str(&atom_text(a)),
            PatternValue::Nested(inner) => s.push_str(&serialize_constraint(inner)),
            PatternValue::Absent => s.push_str("no"),
        }
    }
    s.push(']');
    s
}

fn serialize_slot(slot: &Option<Constraint>) -> String {
    match slot {
        None => "[]".to_string(),
        Some(c) => format!("[{}]", serialize_constraint(c)),
    }
}

/// Canonical text of one rule (without trailing newline).
pub fn serialize_rule(r: &ConstraintRule) -> String {
    let kind = match r.kind {
        RuleKind::Choose => "choose",
        RuleKind::Delete => "delete",
    };
    let mut s = String::new();
    let context_free =
        r.llc.is_none() && r.lc.is_none() && r.rc.is_none() && r.rrc.is_none();
    if context_free && r.kind == RuleKind::Delete {
        write!(s, "[delete:{}", serialize_constraint(&r.target)).unwrap();
    } else {
        write!(
            s,
            "[llc:{},lc:{},{}:{},rc:{},rrc:{}",
            serialize_slot(&r.llc),
            serialize_slot(&r.lc),
            kind,
            serialize_constraint(&r.target),
            serialize_slot(&r.rc),
            serialize_slot(&r.rrc),
        )
        .unwrap();
    }
    if let Some(tok) = &r.token {
        write!(s, ",token:{}", atom_text(tok)).unwrap();
    }
    s.push_str("].");
    if let (Some(score), Some(iter)) = (r.score, r.iteration) {
        write!(s, " % score={score} iter={iter}").unwrap();
    }
    s
}

/// Canonical text of a rule list: one rule per line.
pub fn serialize_rules(rules: &[ConstraintRule]) -> String {
    let mut out = String::new();
    for r in rules {
        out.push_str(&serialize_rule(r));
        out.push('\n');
    }
    out
}
