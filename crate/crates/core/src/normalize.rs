//! Flattening, quotienting, collision removal, classification and
//! diversification of term-coding instances, plus the dispersion embedding.
//!
//! Every transformation here keeps the solution count of each interpretation
//! unchanged (diversification excepted), which the oracle tests check by
//! exhaustion.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::{DispersionSpec, Equation, Signature, Symbol, Term, TermSystem, WellFormedError};

/// `f(u_1, ..., u_k) = v` with variable arguments, `k >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalEquation {
    pub symbol: String,
    pub args: Vec<String>,
    pub defined: String,
}

impl NormalEquation {
    pub fn new(symbol: impl Into<String>, args: Vec<String>, defined: impl Into<String>) -> Self {
        NormalEquation {
            symbol: symbol.into(),
            args,
            defined: defined.into(),
        }
    }

    fn lhs_key(&self) -> (&str, &[String]) {
        (&self.symbol, &self.args)
    }

    pub fn to_equation(&self) -> Equation {
        Equation::new(
            Term::app(
                self.symbol.clone(),
                self.args.iter().cloned().map(Term::Var).collect(),
            ),
            Term::Var(self.defined.clone()),
        )
    }
}

/// A depth-one system, possibly carrying pending variable equalities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalSystem {
    pub variables: Vec<String>,
    pub signature: Signature,
    pub equations: Vec<NormalEquation>,
    pub var_equalities: Vec<(String, String)>,
    /// Auxiliary variable to the subterm it names.
    pub origin_map: BTreeMap<String, Term>,
}

impl NormalSystem {
    /// The system as an ordinary instance; equalities become `x = y` equations.
    pub fn to_term_system(&self) -> TermSystem {
        let mut equations: Vec<Equation> = self
            .equations
            .iter()
            .map(NormalEquation::to_equation)
            .collect();
        equations.extend(
            self.var_equalities
                .iter()
                .map(|(a, b)| Equation::new(Term::Var(a.clone()), Term::Var(b.clone()))),
        );
        TermSystem::new_internal(self.variables.clone(), self.signature.clone(), equations)
            .expect("normal systems are well formed")
    }

    pub fn is_normal(&self) -> bool {
        self.var_equalities.is_empty()
    }

    /// No two equations share `(symbol, args)` with different defined variables.
    pub fn is_collision_free(&self) -> bool {
        let mut seen: HashMap<(&str, &[String]), &str> = HashMap::new();
        for eq in &self.equations {
            if let Some(prev) = seen.insert(eq.lhs_key(), &eq.defined) {
                if prev != eq.defined {
                    return false;
                }
            }
        }
        true
    }

    /// Every symbol is used by exactly one equation.
    pub fn is_diversified(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.equations
            .iter()
            .all(|e| seen.insert(e.symbol.as_str()))
    }
}

/// Variables generated by flattening start with `_`.
pub fn is_auxiliary(name: &str) -> bool {
    name.starts_with('_')
}

/// Union-find over variable names. The representative of a class is its
/// minimum under (original before auxiliary, then lexicographic name).
#[derive(Debug, Clone, Default)]
pub struct UnionFind {
    parent: BTreeMap<String, String>,
}

fn rank_key(name: &str) -> (bool, &str) {
    (is_auxiliary(name), name)
}

impl UnionFind {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn find(&mut self, x: &str) -> String {
        let mut root = x.to_owned();
        while let Some(p) = self.parent.get(&root) {
            if *p == root {
                break;
            }
            root = p.clone();
        }
        // path compression
        let mut cur = x.to_owned();
        while cur != root {
            let next = self
                .parent
                .insert(cur.clone(), root.clone())
                .unwrap_or_else(|| root.clone());
            cur = next;
        }
        root
    }

    /// Merges the classes of `a` and `b`. Returns `(kept, absorbed)` roots if
    /// they were distinct.
    pub fn union(&mut self, a: &str, b: &str) -> Option<(String, String)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (keep, drop) = if rank_key(&ra) <= rank_key(&rb) {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent.insert(drop.clone(), keep.clone());
        self.parent
            .entry(keep.clone())
            .or_insert_with(|| keep.clone());
        Some((keep, drop))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeCause {
    Equality,
    Collision,
}

/// One variable identification performed by the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Merge {
    pub kept: String,
    pub merged: String,
    pub cause: MergeCause,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub defined: Vec<String>,
    pub sources: Vec<String>,
    pub is_normal: bool,
    pub is_collision_free: bool,
    pub is_fnf: bool,
    pub is_cfnf: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSummary {
    pub name: String,
    pub variables: usize,
    pub equations: usize,
    pub var_equalities: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub stages: Vec<StageSummary>,
    pub merges: Vec<Merge>,
    pub auxiliaries: Vec<String>,
    pub collisions: usize,
    pub classification: Classification,
}

fn summary(name: &str, n: &NormalSystem) -> StageSummary {
    StageSummary {
        name: name.to_owned(),
        variables: n.variables.len(),
        equations: n.equations.len(),
        var_equalities: n.var_equalities.len(),
    }
}

struct Flattener<'a> {
    taken: BTreeSet<String>,
    next: usize,
    memo: HashMap<&'a Term, String>,
    out: NormalSystem,
}

impl<'a> Flattener<'a> {
    fn fresh(&mut self) -> String {
        loop {
            let name = format!("_z{}", self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    /// Returns the variable standing for `t`, emitting equations post-order.
    fn name(&mut self, t: &'a Term) -> String {
        match t {
            Term::Var(v) => v.clone(),
            Term::App(f, args) => {
                if let Some(z) = self.memo.get(t) {
                    return z.clone();
                }
                let args = args.iter().map(|a| self.name(a)).collect();
                let z = self.fresh();
                self.out.variables.push(z.clone());
                self.out.origin_map.insert(z.clone(), t.clone());
                self.out
                    .equations
                    .push(NormalEquation::new(f.clone(), args, z.clone()));
                self.memo.insert(t, z.clone());
                z
            }
        }
    }

    fn direct(t: &Term, v: &str) -> Option<NormalEquation> {
        match t {
            Term::App(f, args) if t.is_flat_app() => Some(NormalEquation::new(
                f.clone(),
                args.iter()
                    .map(|a| match a {
                        Term::Var(x) => x.clone(),
                        Term::App(..) => unreachable!(),
                    })
                    .collect(),
                v,
            )),
            _ => None,
        }
    }
}

/// Flattens every equation to depth one, naming each distinct non-variable
/// subterm by a fresh `_z<i>` (post-order, left to right, lhs before rhs,
/// equations in order). Equations already of the shape `f(vars) = v` or
/// `v = f(vars)` are kept as they are.
pub fn flatten(system: &TermSystem) -> NormalSystem {
    let mut fl = Flattener {
        taken: system.variables().iter().cloned().collect(),
        next: 0,
        memo: HashMap::new(),
        out: NormalSystem {
            variables: system.variables().to_vec(),
            signature: system.signature().clone(),
            equations: Vec::new(),
            var_equalities: Vec::new(),
            origin_map: BTreeMap::new(),
        },
    };
    for eq in system.equations() {
        match (&eq.lhs, &eq.rhs) {
            (Term::Var(a), Term::Var(b)) => fl.out.var_equalities.push((a.clone(), b.clone())),
            (t, Term::Var(v)) | (Term::Var(v), t) if t.is_flat_app() => {
                let ne = Flattener::direct(t, v).expect("flat application");
                fl.out.equations.push(ne);
            }
            (lhs, rhs) => {
                let a = fl.name(lhs);
                let b = fl.name(rhs);
                fl.out.var_equalities.push((a, b));
            }
        }
    }
    fl.out
}

fn substitute(n: &NormalSystem, uf: &mut UnionFind) -> NormalSystem {
    let mut rep = |v: &String| uf.find(v);
    let equations = n
        .equations
        .iter()
        .map(|e| NormalEquation {
            symbol: e.symbol.clone(),
            args: e.args.iter().map(&mut rep).collect(),
            defined: rep(&e.defined),
        })
        .collect();
    let variables: Vec<String> = n
        .variables
        .iter()
        .filter(|v| uf.find(v) == **v)
        .cloned()
        .collect();
    let origin_map = n
        .origin_map
        .iter()
        .filter(|(v, _)| variables.contains(v))
        .map(|(v, t)| (v.clone(), t.clone()))
        .collect();
    NormalSystem {
        variables,
        signature: n.signature.clone(),
        equations,
        var_equalities: Vec::new(),
        origin_map,
    }
}

fn quotient_with_merges(n: &NormalSystem) -> (NormalSystem, Vec<Merge>) {
    let mut uf = UnionFind::new();
    let mut merges = Vec::new();
    for (a, b) in &n.var_equalities {
        if let Some((kept, merged)) = uf.union(a, b) {
            merges.push(Merge {
                kept,
                merged,
                cause: MergeCause::Equality,
            });
        }
    }
    (substitute(n, &mut uf), merges)
}

/// Replaces every variable by its class representative under the pending
/// equalities and drops the equalities.
pub fn quotient_vars(n: &NormalSystem) -> NormalSystem {
    quotient_with_merges(n).0
}

fn dedup(n: &mut NormalSystem) {
    let mut seen = BTreeSet::new();
    n.equations.retain(|e| seen.insert(e.clone()));
}

fn collision_with_merges(n: &NormalSystem) -> (NormalSystem, Vec<Merge>) {
    let (mut cur, mut merges) = quotient_with_merges(n);
    loop {
        let mut uf = UnionFind::new();
        let mut first: HashMap<(&str, &[String]), &str> = HashMap::new();
        let mut round = Vec::new();
        for eq in &cur.equations {
            match first.get(&eq.lhs_key()) {
                Some(&v) if v != eq.defined => {
                    if let Some((kept, merged)) = uf.union(v, &eq.defined) {
                        round.push(Merge {
                            kept,
                            merged,
                            cause: MergeCause::Collision,
                        });
                    }
                }
                Some(_) => {}
                None => {
                    first.insert(eq.lhs_key(), &eq.defined);
                }
            }
        }
        if round.is_empty() {
            dedup(&mut cur);
            return (cur, merges);
        }
        merges.extend(round);
        cur = substitute(&cur, &mut uf);
    }
}

/// Merges the right-hand sides of colliding equations, re-substituting until
/// no collision remains, and deletes duplicate equations.
pub fn collision_quotient(n: &NormalSystem) -> NormalSystem {
    collision_with_merges(n).0
}

/// Partitions variables into defined and source variables and sets the
/// normal-form flags.
pub fn classify(n: &NormalSystem) -> Classification {
    let mut count: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &n.equations {
        *count.entry(&e.defined).or_default() += 1;
    }
    let defined: Vec<String> = n
        .variables
        .iter()
        .filter(|v| count.contains_key(v.as_str()))
        .cloned()
        .collect();
    let sources = n
        .variables
        .iter()
        .filter(|v| !count.contains_key(v.as_str()))
        .cloned()
        .collect();
    let is_normal = n.is_normal();
    let is_fnf = is_normal && count.values().all(|&c| c == 1);
    let is_collision_free = n.is_collision_free();
    Classification {
        defined,
        sources,
        is_normal,
        is_collision_free,
        is_fnf,
        is_cfnf: is_fnf && is_collision_free,
    }
}

/// Gives equation `i` its own symbol `f@i` of the same arity.
pub fn diversify(n: &NormalSystem) -> NormalSystem {
    let mut symbols = Vec::with_capacity(n.equations.len());
    let equations = n
        .equations
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let name = format!("{}@{}", e.symbol, i);
            symbols.push(Symbol::new(name.clone(), e.args.len()));
            NormalEquation {
                symbol: name,
                args: e.args.clone(),
                defined: e.defined.clone(),
            }
        })
        .collect();
    NormalSystem {
        variables: n.variables.clone(),
        signature: Signature::new(symbols).expect("fresh names are distinct"),
        equations,
        var_equalities: n.var_equalities.clone(),
        origin_map: n.origin_map.clone(),
    }
}

/// Flatten, then quotient equalities and collisions to a joint fixpoint, then
/// classify.
pub fn pipeline(system: &TermSystem) -> (NormalSystem, PipelineReport) {
    let flat = flatten(system);
    let auxiliaries = flat
        .variables
        .iter()
        .filter(|v| !system.variables().contains(v))
        .cloned()
        .collect();
    let (quot, mut merges) = quotient_with_merges(&flat);
    let (cf, more) = collision_with_merges(&quot);
    let collisions = more.len();
    merges.extend(more);
    let stages = vec![
        summary("flatten", &flat),
        summary("quotient_vars", &quot),
        summary("collision_quotient", &cf),
    ];
    let classification = classify(&cf);
    (
        cf,
        PipelineReport {
            stages,
            merges,
            auxiliaries,
            collisions,
            classification,
        },
    )
}

fn fresh_name(base: String, taken: &mut BTreeSet<String>) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('_');
    }
    taken.insert(name.clone());
    name
}

/// The term-coding instance `y_i = t_i(x)`, `x_j = h_j(y)` whose optimum
/// equals the dispersion of `t`.
pub fn embed_dispersion(t: &DispersionSpec) -> TermSystem {
    let mut taken: BTreeSet<String> = t.inputs().iter().cloned().collect();
    taken.extend(t.signature().symbols().iter().map(|s| s.name.clone()));
    let ys: Vec<String> = (1..=t.r())
        .map(|i| fresh_name(format!("y{i}"), &mut taken))
        .collect();
    let hs: Vec<String> = (1..=t.k())
        .map(|j| fresh_name(format!("h{j}"), &mut taken))
        .collect();
    let mut symbols = t.signature().symbols().to_vec();
    symbols.extend(hs.iter().map(|h| Symbol::new(h.clone(), t.r())));
    let mut equations: Vec<Equation> = ys
        .iter()
        .zip(t.outputs())
        .map(|(y, ti)| Equation::new(Term::Var(y.clone()), ti.clone()))
        .collect();
    let y_terms: Vec<Term> = ys.iter().cloned().map(Term::Var).collect();
    equations.extend(
        t.inputs().iter().zip(&hs).map(|(x, h)| {
            Equation::new(Term::Var(x.clone()), Term::app(h.clone(), y_terms.clone()))
        }),
    );
    let mut variables = t.inputs().to_vec();
    variables.extend(ys);
    TermSystem::new_internal(
        variables,
        Signature::new(symbols).expect("fresh decoder names"),
        equations,
    )
    .expect("embedding is well formed")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadError {
    #[error("target output count {target} is below the current {current}")]
    TooFewOutputs { current: usize, target: usize },
    #[error("target input count {target} is below max(k, r') = {required}")]
    TooFewInputs { required: usize, target: usize },
    #[error(transparent)]
    Invalid(#[from] WellFormedError),
}

/// Appends `r' - r` projection outputs onto fresh inputs, then unused inputs
/// until there are at least `k'` inputs.
///
/// The fresh projection inputs never occur in the original outputs, so the
/// padded map is surjective exactly when the original one is. The result has
/// `max(k', k + r' - r)` inputs.
pub fn pad_dispersion(
    t: &DispersionSpec,
    r_target: usize,
    k_target: usize,
) -> Result<DispersionSpec, PadError> {
    if r_target < t.r() {
        return Err(PadError::TooFewOutputs {
            current: t.r(),
            target: r_target,
        });
    }
    let required = t.k().max(r_target);
    if k_target < required {
        return Err(PadError::TooFewInputs {
            required,
            target: k_target,
        });
    }
    let mut taken: BTreeSet<String> = t.inputs().iter().cloned().collect();
    taken.extend(t.signature().symbols().iter().map(|s| s.name.clone()));
    let mut inputs = t.inputs().to_vec();
    let mut outputs = t.outputs().to_vec();
    for i in t.r() + 1..=r_target {
        let x = fresh_name(format!("x{i}"), &mut taken);
        inputs.push(x.clone());
        outputs.push(Term::Var(x));
    }
    let mut j = r_target;
    while inputs.len() < k_target {
        j += 1;
        inputs.push(fresh_name(format!("x{j}"), &mut taken));
    }
    Ok(DispersionSpec::new_internal(
        inputs,
        t.signature().clone(),
        outputs,
    )?)
}
