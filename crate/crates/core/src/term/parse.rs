//! Recursive-descent parser for the instance / dispersion / graph DSL.
//!
//! ```text
//! system     := "instance" "{" "vars" idlist ";" "sig" sigs ";" ("eq" term "=" term ";")* "}"
//! dispersion := "dispersion" "{" "inputs" idlist ";" "sig" sigs ";" "outputs" termlist ";" "}"
//! graph      := "graph" "{" "nodes" idlist ";" "sources" idlist ";" ("edge" id "->" id ";")* "}"
//! sigs       := id "/" nat ("," id "/" nat)*
//! ```
//!
//! Constants are written `c()`. Comments run from `#` to the end of the line.
//! Identifier and signature lists may be empty.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{
    is_reserved_name, DispersionSpec, Equation, Signature, Symbol, Term, TermSystem,
    WellFormedError,
};
use crate::depgraph::DependencyGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] WellFormedError),
}

/// A parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn is_syntax(&self) -> bool {
        matches!(self.kind, ParseErrorKind::Syntax(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    System,
    Dispersion,
    Graph,
}

impl SourceKind {
    fn keyword(self) -> &'static str {
        match self {
            SourceKind::System => "instance",
            SourceKind::Dispersion => "dispersion",
            SourceKind::Graph => "graph",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    System(TermSystem),
    Dispersion(DispersionSpec),
    Graph(DependencyGraph),
}

impl Parsed {
    pub fn kind(&self) -> SourceKind {
        match self {
            Parsed::System(_) => SourceKind::System,
            Parsed::Dispersion(_) => SourceKind::Dispersion,
            Parsed::Graph(_) => SourceKind::Graph,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept generated names (`_z0`, `f@1`) so that pipeline output re-parses.
    pub allow_reserved: bool,
}

impl ParseOptions {
    pub fn internal() -> Self {
        ParseOptions {
            allow_reserved: true,
        }
    }

    pub fn parse(self, text: &str, kind: Option<SourceKind>) -> Result<Parsed, ParseError> {
        let tokens = lex(text)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            options: self,
        };
        let parsed = p.document(kind)?;
        p.expect_end()?;
        Ok(parsed)
    }
}

/// Parses `text`; when `kind` is `None` the leading keyword decides.
pub fn parse(text: &str, kind: Option<SourceKind>) -> Result<Parsed, ParseError> {
    ParseOptions::default().parse(text, kind)
}

pub fn parse_system(text: &str) -> Result<TermSystem, ParseError> {
    match parse(text, Some(SourceKind::System))? {
        Parsed::System(s) => Ok(s),
        _ => unreachable!(),
    }
}

pub fn parse_dispersion(text: &str) -> Result<DispersionSpec, ParseError> {
    match parse(text, Some(SourceKind::Dispersion))? {
        Parsed::Dispersion(d) => Ok(d),
        _ => unreachable!(),
    }
}

pub fn parse_graph(text: &str) -> Result<DependencyGraph, ParseError> {
    match parse(text, Some(SourceKind::Graph))? {
        Parsed::Graph(g) => Ok(g),
        _ => unreachable!(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(usize),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
    Slash,
    Arrow,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

fn invalid(pos: Pos, err: WellFormedError) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        kind: ParseErrorKind::Invalid(err),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '@' {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            Tok::Nat(s.parse().map_err(|_| syntax(pos, "number too large"))?)
        } else {
            bump(&mut chars);
            match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '=' => Tok::Eq,
                '/' => Tok::Slash,
                '-' if chars.peek() == Some(&'>') => {
                    bump(&mut chars);
                    Tok::Arrow
                }
                other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
            }
        };
        out.push((tok, pos));
    }
    out.push((Tok::End, Pos { line, column }));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, Pos)>,
    pos: usize,
    options: ParseOptions,
}

/// Scope used while parsing terms.
struct Scope<'a> {
    vars: &'a BTreeSet<String>,
    sig: &'a Signature,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn here(&self) -> Pos {
        self.tokens[self.pos].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.tokens[self.pos].clone();
        if t.0 != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, ParseError> {
        let (tok, pos) = self.next();
        if tok == want {
            Ok(pos)
        } else {
            Err(syntax(pos, format!("expected {want}, found {tok}")))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, ParseError> {
        let (tok, pos) = self.next();
        match tok {
            Tok::Ident(s) if s == kw => Ok(pos),
            other => Err(syntax(pos, format!("expected `{kw}`, found {other}"))),
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        let (tok, pos) = self.next();
        match tok {
            Tok::Ident(s) => {
                if !self.options.allow_reserved && is_reserved_name(&s) {
                    return Err(invalid(pos, WellFormedError::ReservedName(s)));
                }
                Ok((s, pos))
            }
            other => Err(syntax(
                pos,
                format!("expected an identifier, found {other}"),
            )),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.next() {
            (Tok::End, _) => Ok(()),
            (tok, pos) => Err(syntax(
                pos,
                format!("unexpected {tok} after the closing `}}`"),
            )),
        }
    }

    fn document(&mut self, kind: Option<SourceKind>) -> Result<Parsed, ParseError> {
        let pos = self.here();
        let kind = match (kind, self.peek()) {
            (Some(k), _) => k,
            (None, Tok::Ident(s)) if s == "instance" => SourceKind::System,
            (None, Tok::Ident(s)) if s == "dispersion" => SourceKind::Dispersion,
            (None, Tok::Ident(s)) if s == "graph" => SourceKind::Graph,
            (None, tok) => {
                return Err(syntax(
                    pos,
                    format!("expected `instance`, `dispersion` or `graph`, found {tok}"),
                ))
            }
        };
        self.keyword(kind.keyword())?;
        self.expect(Tok::LBrace)?;
        let parsed = match kind {
            SourceKind::System => Parsed::System(self.system_body(pos)?),
            SourceKind::Dispersion => Parsed::Dispersion(self.dispersion_body(pos)?),
            SourceKind::Graph => Parsed::Graph(self.graph_body(pos)?),
        };
        self.expect(Tok::RBrace)?;
        Ok(parsed)
    }

    /// `id ("," id)*` or nothing, up to the terminating `;`.
    fn idlist(&mut self) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() == Tok::Semi {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                return Ok(out);
            }
        }
    }

    fn distinct(
        ids: &[(String, Pos)],
        dup: fn(String) -> WellFormedError,
    ) -> Result<BTreeSet<String>, ParseError> {
        let mut set = BTreeSet::new();
        for (id, pos) in ids {
            if !set.insert(id.clone()) {
                return Err(invalid(*pos, dup(id.clone())));
            }
        }
        Ok(set)
    }

    fn sigs(&mut self, names: &BTreeSet<String>) -> Result<Signature, ParseError> {
        self.keyword("sig")?;
        let mut symbols: Vec<Symbol> = Vec::new();
        if *self.peek() != Tok::Semi {
            loop {
                let (name, pos) = self.ident()?;
                if symbols.iter().any(|s| s.name == name) {
                    return Err(invalid(pos, WellFormedError::DuplicateSymbol(name)));
                }
                if names.contains(&name) {
                    return Err(invalid(pos, WellFormedError::NameClash(name)));
                }
                self.expect(Tok::Slash)?;
                let arity = match self.next() {
                    (Tok::Nat(n), _) => n,
                    (tok, pos) => {
                        return Err(syntax(pos, format!("expected an arity, found {tok}")))
                    }
                };
                symbols.push(Symbol::new(name, arity));
                if *self.peek() == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::Semi)?;
        Ok(Signature::new(symbols).expect("duplicates rejected above"))
    }

    fn term(&mut self, scope: &Scope<'_>) -> Result<Term, ParseError> {
        let (name, pos) = self.ident()?;
        if *self.peek() != Tok::LParen {
            if !scope.vars.contains(&name) {
                let err = if scope.sig.contains(&name) {
                    WellFormedError::ArityMismatch {
                        expected: scope.sig.arity(&name).unwrap_or(0),
                        symbol: name,
                        found: 0,
                    }
                } else {
                    WellFormedError::UndeclaredVariable(name)
                };
                return Err(invalid(pos, err));
            }
            return Ok(Term::Var(name));
        }
        let open = self.expect(Tok::LParen)?;
        let Some(expected) = scope.sig.arity(&name) else {
            return Err(invalid(pos, WellFormedError::UnknownSymbol(name)));
        };
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.next();
        } else {
            loop {
                args.push(self.term(scope)?);
                match self.peek() {
                    Tok::Comma => {
                        self.next();
                    }
                    Tok::RParen => {
                        self.next();
                        break;
                    }
                    tok => {
                        return Err(syntax(
                            open,
                            format!(
                                "unmatched `(`: expected `,` or `)` but found {tok} at {}:{}",
                                self.here().line,
                                self.here().column
                            ),
                        ))
                    }
                }
            }
        }
        if args.len() != expected {
            return Err(invalid(
                pos,
                WellFormedError::ArityMismatch {
                    symbol: name,
                    expected,
                    found: args.len(),
                },
            ));
        }
        Ok(Term::App(name, args))
    }

    fn system_body(&mut self, start: Pos) -> Result<TermSystem, ParseError> {
        self.keyword("vars")?;
        let ids = self.idlist()?;
        let vars = Self::distinct(&ids, WellFormedError::DuplicateVariable)?;
        self.expect(Tok::Semi)?;
        let sig = self.sigs(&vars)?;
        let scope = Scope {
            vars: &vars,
            sig: &sig,
        };
        let mut equations = Vec::new();
        while matches!(self.peek(), Tok::Ident(s) if s == "eq") {
            self.next();
            let lhs = self.term(&scope)?;
            self.expect(Tok::Eq)?;
            let rhs = self.term(&scope)?;
            self.expect(Tok::Semi)?;
            equations.push(Equation::new(lhs, rhs));
        }
        let variables = ids.into_iter().map(|(s, _)| s).collect();
        TermSystem::build(variables, sig, equations, self.options.allow_reserved)
            .map_err(|e| invalid(start, e))
    }

    fn dispersion_body(&mut self, start: Pos) -> Result<DispersionSpec, ParseError> {
        self.keyword("inputs")?;
        let ids = self.idlist()?;
        let vars = Self::distinct(&ids, WellFormedError::DuplicateVariable)?;
        self.expect(Tok::Semi)?;
        let sig = self.sigs(&vars)?;
        let scope = Scope {
            vars: &vars,
            sig: &sig,
        };
        self.keyword("outputs")?;
        let mut outputs = vec![self.term(&scope)?];
        while *self.peek() == Tok::Comma {
            self.next();
            outputs.push(self.term(&scope)?);
        }
        self.expect(Tok::Semi)?;
        let inputs = ids.into_iter().map(|(s, _)| s).collect();
        DispersionSpec::build(inputs, sig, outputs, self.options.allow_reserved)
            .map_err(|e| invalid(start, e))
    }

    fn graph_body(&mut self, start: Pos) -> Result<DependencyGraph, ParseError> {
        self.keyword("nodes")?;
        let ids = self.idlist()?;
        let nodes = Self::distinct(&ids, WellFormedError::DuplicateVertex)?;
        self.expect(Tok::Semi)?;
        self.keyword("sources")?;
        let sources = self.idlist()?;
        for (s, pos) in &sources {
            if !nodes.contains(s) {
                return Err(invalid(*pos, WellFormedError::UnknownVertex(s.clone())));
            }
        }
        self.expect(Tok::Semi)?;
        let mut edges = Vec::new();
        while matches!(self.peek(), Tok::Ident(s) if s == "edge") {
            self.next();
            let (from, pos) = self.ident()?;
            if !nodes.contains(&from) {
                return Err(invalid(pos, WellFormedError::UnknownVertex(from)));
            }
            self.expect(Tok::Arrow)?;
            let (to, pos) = self.ident()?;
            if !nodes.contains(&to) {
                return Err(invalid(pos, WellFormedError::UnknownVertex(to)));
            }
            self.expect(Tok::Semi)?;
            edges.push((from, to));
        }
        DependencyGraph::from_names(
            ids.into_iter().map(|(s, _)| s).collect(),
            sources.into_iter().map(|(s, _)| s).collect(),
            edges,
        )
        .map_err(|e| invalid(start, e))
    }
}
