//! Terms, signatures, term-coding instances and dispersion specs.
//!
//! Every constructor validates well-formedness: symbol arities, variable
//! scoping and name uniqueness. Values are immutable after construction.

mod eval;
mod parse;
mod render;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{eval_term, satisfies, EvalError};
pub use parse::{
    parse, parse_dispersion, parse_graph, parse_system, ParseError, ParseErrorKind, ParseOptions,
    Parsed, SourceKind,
};
pub use render::render;

/// Well-formedness violations detected by constructors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WellFormedError {
    #[error("duplicate symbol `{0}` in signature")]
    DuplicateSymbol(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("`{0}` is declared both as a variable and as a symbol")]
    NameClash(String),
    #[error("unknown function symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has arity {expected} but is applied to {found} argument(s)")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("identifier `{0}` is reserved (user names may not start with `_` or contain `@`)")]
    ReservedName(String),
    #[error("a dispersion spec needs at least one input")]
    NoInputs,
    #[error("a dispersion spec needs at least one output")]
    NoOutputs,
    #[error("unknown graph vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate graph vertex `{0}`")]
    DuplicateVertex(String),
}

/// Names the pipeline generates: `_z<i>` auxiliaries and `f@<i>` copies.
pub fn is_reserved_name(name: &str) -> bool {
    name.starts_with('_') || name.contains('@')
}

/// A function symbol with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// Ordered list of symbols with unique names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, WellFormedError> {
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if !seen.insert(s.name.as_str()) {
                return Err(WellFormedError::DuplicateSymbol(s.name.clone()));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.arity)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }
}

/// A first-order term: a variable or a symbol applied to argument terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(symbol.into(), args)
    }

    /// Number of symbol occurrences (variables and function symbols alike).
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// An application whose arguments are all variables (depth at most one).
    pub fn is_flat_app(&self) -> bool {
        match self {
            Term::App(_, args) => args.iter().all(Term::is_var),
            Term::Var(_) => false,
        }
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::App(_, args) => args.iter().any(Term::contains_var),
        }
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Checks arities against `sig` and that every variable satisfies `is_var`.
    pub(crate) fn check(
        &self,
        sig: &Signature,
        is_var: &dyn Fn(&str) -> bool,
    ) -> Result<(), WellFormedError> {
        match self {
            Term::Var(v) => {
                if is_var(v) {
                    Ok(())
                } else {
                    Err(WellFormedError::UndeclaredVariable(v.clone()))
                }
            }
            Term::App(f, args) => {
                let expected = sig
                    .arity(f)
                    .ok_or_else(|| WellFormedError::UnknownSymbol(f.clone()))?;
                if expected != args.len() {
                    return Err(WellFormedError::ArityMismatch {
                        symbol: f.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(sig, is_var))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }
}

fn check_names<'a>(
    variables: impl IntoIterator<Item = &'a String>,
    sig: &Signature,
    allow_reserved: bool,
) -> Result<(), WellFormedError> {
    let mut seen = BTreeSet::new();
    for v in variables {
        if !seen.insert(v.as_str()) {
            return Err(WellFormedError::DuplicateVariable(v.clone()));
        }
        if sig.contains(v) {
            return Err(WellFormedError::NameClash(v.clone()));
        }
        if !allow_reserved && is_reserved_name(v) {
            return Err(WellFormedError::ReservedName(v.clone()));
        }
    }
    if !allow_reserved {
        if let Some(s) = sig.symbols().iter().find(|s| is_reserved_name(&s.name)) {
            return Err(WellFormedError::ReservedName(s.name.clone()));
        }
    }
    Ok(())
}

/// A term-coding instance: variables, signature and equations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSystem {
    variables: Vec<String>,
    signature: Signature,
    equations: Vec<Equation>,
}

impl TermSystem {
    /// Builds an instance from user-facing names (no reserved identifiers).
    pub fn new(
        variables: Vec<String>,
        signature: Signature,
        equations: Vec<Equation>,
    ) -> Result<Self, WellFormedError> {
        Self::build(variables, signature, equations, false)
    }

    /// Like [`TermSystem::new`] but admits generated names such as `_z0` or `f@1`.
    pub fn new_internal(
        variables: Vec<String>,
        signature: Signature,
        equations: Vec<Equation>,
    ) -> Result<Self, WellFormedError> {
        Self::build(variables, signature, equations, true)
    }

    fn build(
        variables: Vec<String>,
        signature: Signature,
        equations: Vec<Equation>,
        allow_reserved: bool,
    ) -> Result<Self, WellFormedError> {
        check_names(&variables, &signature, allow_reserved)?;
        let vars: BTreeSet<&str> = variables.iter().map(String::as_str).collect();
        let is_var = |v: &str| vars.contains(v);
        for eq in &equations {
            eq.lhs.check(&signature, &is_var)?;
            eq.rhs.check(&signature, &is_var)?;
        }
        Ok(TermSystem {
            variables,
            signature,
            equations,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Symbol occurrences over all equation sides plus the equation count.
    pub fn instance_size(&self) -> usize {
        self.equations
            .iter()
            .map(|e| e.lhs.size() + e.rhs.size() + 1)
            .sum()
    }
}

/// A tuple of output terms over a list of input variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispersionSpec {
    inputs: Vec<String>,
    signature: Signature,
    outputs: Vec<Term>,
}

impl DispersionSpec {
    pub fn new(
        inputs: Vec<String>,
        signature: Signature,
        outputs: Vec<Term>,
    ) -> Result<Self, WellFormedError> {
        Self::build(inputs, signature, outputs, false)
    }

    pub fn new_internal(
        inputs: Vec<String>,
        signature: Signature,
        outputs: Vec<Term>,
    ) -> Result<Self, WellFormedError> {
        Self::build(inputs, signature, outputs, true)
    }

    fn build(
        inputs: Vec<String>,
        signature: Signature,
        outputs: Vec<Term>,
        allow_reserved: bool,
    ) -> Result<Self, WellFormedError> {
        if inputs.is_empty() {
            return Err(WellFormedError::NoInputs);
        }
        if outputs.is_empty() {
            return Err(WellFormedError::NoOutputs);
        }
        check_names(&inputs, &signature, allow_reserved)?;
        let vars: BTreeSet<&str> = inputs.iter().map(String::as_str).collect();
        let is_var = |v: &str| vars.contains(v);
        for t in &outputs {
            t.check(&signature, &is_var)?;
        }
        Ok(DispersionSpec {
            inputs,
            signature,
            outputs,
        })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn outputs(&self) -> &[Term] {
        &self.outputs
    }

    /// Number of inputs `k`.
    pub fn k(&self) -> usize {
        self.inputs.len()
    }

    /// Number of outputs `r`.
    pub fn r(&self) -> usize {
        self.outputs.len()
    }

    pub fn instance_size(&self) -> usize {
        self.outputs.iter().map(Term::size).sum::<usize>() + self.outputs.len()
    }
}

/// A total function table over `[n]`, row-major with lexicographic argument tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Table {
    pub arity: usize,
    pub values: Vec<u32>,
}

impl Table {
    /// Row index of an argument tuple: `sum a_i * n^(arity-1-i)`.
    pub fn row(n: u32, args: &[u32]) -> usize {
        args.iter()
            .fold(0usize, |acc, &a| acc * n as usize + a as usize)
    }

    pub fn get(&self, n: u32, args: &[u32]) -> u32 {
        self.values[Table::row(n, args)]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpretationError {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("no table for symbol `{0}`")]
    MissingTable(String),
    #[error("table for `{0}` does not belong to the signature")]
    ExtraTable(String),
    #[error("table for `{symbol}` has {found} entries, expected {expected}")]
    TableLength {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("table for `{symbol}` has entry {value} outside [0, {n})")]
    EntryOutOfRange { symbol: String, value: u32, n: u32 },
}

/// Explicit function tables over the alphabet `[n]`, one per symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    n: u32,
    tables: BTreeMap<String, Table>,
}

impl Interpretation {
    pub fn new(
        n: u32,
        signature: &Signature,
        tables: BTreeMap<String, Table>,
    ) -> Result<Self, InterpretationError> {
        if n == 0 {
            return Err(InterpretationError::EmptyAlphabet);
        }
        for s in signature.symbols() {
            let t = tables
                .get(&s.name)
                .ok_or_else(|| InterpretationError::MissingTable(s.name.clone()))?;
            let expected = table_len(n, s.arity);
            if t.arity != s.arity || t.values.len() != expected {
                return Err(InterpretationError::TableLength {
                    symbol: s.name.clone(),
                    expected,
                    found: t.values.len(),
                });
            }
            if let Some(&value) = t.values.iter().find(|&&v| v >= n) {
                return Err(InterpretationError::EntryOutOfRange {
                    symbol: s.name.clone(),
                    value,
                    n,
                });
            }
        }
        if let Some(name) = tables.keys().find(|k| !signature.contains(k)) {
            return Err(InterpretationError::ExtraTable(name.clone()));
        }
        Ok(Interpretation { n, tables })
    }

    /// Builds tables from closures; handy for tests and examples.
    pub fn from_fns(
        n: u32,
        signature: &Signature,
        mut f: impl FnMut(&str, &[u32]) -> u32,
    ) -> Result<Self, InterpretationError> {
        let mut tables = BTreeMap::new();
        for s in signature.symbols() {
            let mut values = Vec::with_capacity(table_len(n, s.arity));
            for_each_tuple(n, s.arity, |args| values.push(f(&s.name, args)));
            tables.insert(
                s.name.clone(),
                Table {
                    arity: s.arity,
                    values,
                },
            );
        }
        Interpretation::new(n, signature, tables)
    }

    /// Skips validation; callers guarantee the tables fit the signature.
    pub(crate) fn from_parts(n: u32, tables: BTreeMap<String, Table>) -> Self {
        Interpretation { n, tables }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn table(&self, symbol: &str) -> Option<&Table> {
        self.tables.get(symbol)
    }

    pub fn tables(&self) -> &BTreeMap<String, Table> {
        &self.tables
    }
}

pub(crate) fn table_len(n: u32, arity: usize) -> usize {
    (n as usize).pow(arity as u32)
}

/// Calls `f` on every tuple of `[n]^len` in lexicographic order.
pub fn for_each_tuple(n: u32, len: usize, mut f: impl FnMut(&[u32])) {
    let mut digits = vec![0u32; len];
    if n == 0 && len > 0 {
        return;
    }
    loop {
        f(&digits);
        if !odometer_step(&mut digits, n) {
            break;
        }
    }
}

/// Advances a base-`n` counter (last digit fastest). Returns false on wrap-around.
pub(crate) fn odometer_step(digits: &mut [u32], n: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < n {
            return true;
        }
        *d = 0;
    }
    false
}

/// Values for a set of variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment(BTreeMap<String, u32>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, u32)>) -> Self {
        Assignment(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    /// Zips variable names with values in order.
    pub fn zip(vars: &[String], values: &[u32]) -> Self {
        Assignment(vars.iter().cloned().zip(values.iter().copied()).collect())
    }

    pub fn get(&self, var: &str) -> Option<u32> {
        self.0.get(var).copied()
    }

    pub fn set(&mut self, var: impl Into<String>, value: u32) {
        self.0.insert(var.into(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}
