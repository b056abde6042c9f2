//! Checks of the exact relations between solution counts, guessing games,
//! diversification and the dispersion embedding.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::depgraph::{dependency_graph, GuessingStrategy};
use crate::normalize::{classify, diversify, embed_dispersion, NormalSystem};
use crate::term::{for_each_tuple, table_len, DispersionSpec, Interpretation, Table};

use super::brute::{brute_dispersion, brute_guessing, brute_max_solutions};
use super::compiled::{CompiledDispersion, CompiledSystem};
use super::parallel::{self, Best};
use super::space::{scan_digits, space_size, InterpretationSpace};
use super::{checked_pow, count_solutions, rate, OracleError, OracleResult, Search};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinningEquality {
    pub solutions: OracleResult,
    pub winning: OracleResult<GuessingStrategy>,
    pub equal: bool,
}

/// Compares `S_n` of a diversified FNF system with the guessing optimum of
/// its dependency graph.
pub fn check_solutions_equal_winning(
    system: &NormalSystem,
    n: u32,
    search: &Search,
) -> Result<WinningEquality, OracleError> {
    if !system.is_diversified() {
        return Err(OracleError::NotDiversifiedFnf(
            "a symbol is shared by several equations".into(),
        ));
    }
    let graph =
        dependency_graph(system).map_err(|e| OracleError::NotDiversifiedFnf(e.to_string()))?;
    let solutions = brute_max_solutions(&system.to_term_system(), n, search)?;
    let winning = brute_guessing(&graph, n, search)?;
    Ok(WinningEquality {
        equal: solutions.value == winning.value,
        solutions,
        winning,
    })
}

/// `v` disjoint blocks of size `m = floor(n / v)` inside `[n]`, block `i`
/// being `i*m .. i*m + m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockEncoding {
    pub n: u32,
    pub v: usize,
    pub m: u32,
}

impl BlockEncoding {
    pub fn new(n: u32, v: usize) -> Result<Self, OracleError> {
        if v == 0 || v as u64 > u64::from(n) {
            return Err(OracleError::BlockCount { n, v });
        }
        Ok(BlockEncoding {
            n,
            v,
            m: n / v as u32,
        })
    }

    pub fn block(&self, i: usize) -> Range<u32> {
        let start = i as u32 * self.m;
        start..start + self.m
    }

    /// The bijection from `[m]` onto block `i`.
    pub fn embed(&self, i: usize, a: u32) -> u32 {
        i as u32 * self.m + a
    }

    /// Block and offset of `x`, or `None` for the leftover values past the
    /// last block.
    pub fn locate(&self, x: u32) -> Option<(usize, u32)> {
        let i = (x / self.m) as usize;
        (i < self.v).then_some((i, x % self.m))
    }
}

/// Builds an interpretation of the original symbols over `[n]` from one of
/// the diversified symbols over `[m]`: on arguments lying in the blocks of
/// some equation's argument variables, apply that equation's table through
/// the block bijections and land in the block of its defined variable;
/// everywhere else return 0.
pub fn lift_interpretation(
    system: &NormalSystem,
    diversified: &Interpretation,
    enc: &BlockEncoding,
) -> Result<Interpretation, OracleError> {
    if !classify(system).is_cfnf {
        return Err(OracleError::NotCfnf);
    }
    if enc.v != system.variables.len() {
        return Err(OracleError::LiftInput(format!(
            "encoding has {} blocks for {} variables",
            enc.v,
            system.variables.len()
        )));
    }
    if diversified.n() != enc.m {
        return Err(OracleError::LiftInput(format!(
            "alphabet size {} differs from block size {}",
            diversified.n(),
            enc.m
        )));
    }
    let block_of: BTreeMap<&str, usize> = system
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    struct Rule<'a> {
        args: Vec<usize>,
        defined: usize,
        table: &'a Table,
    }
    let mut rules: BTreeMap<&str, Vec<Rule>> = BTreeMap::new();
    for (i, e) in system.equations.iter().enumerate() {
        let name = format!("{}@{}", e.symbol, i);
        let table = diversified
            .table(&name)
            .ok_or_else(|| OracleError::LiftInput(format!("no table for `{name}`")))?;
        rules.entry(&e.symbol).or_default().push(Rule {
            args: e.args.iter().map(|a| block_of[a.as_str()]).collect(),
            defined: block_of[e.defined.as_str()],
            table,
        });
    }
    let mut tables = BTreeMap::new();
    for s in system.signature.symbols() {
        let mut values = Vec::with_capacity(table_len(enc.n, s.arity));
        let candidates = rules.get(s.name.as_str()).map_or(&[][..], Vec::as_slice);
        for_each_tuple(enc.n, s.arity, |args| {
            let located: Option<Vec<(usize, u32)>> = args.iter().map(|&a| enc.locate(a)).collect();
            let value = located.and_then(|loc| {
                candidates
                    .iter()
                    .find(|r| r.args.iter().zip(&loc).all(|(b, (lb, _))| b == lb))
                    .map(|r| {
                        let inner: Vec<u32> = loc.iter().map(|&(_, a)| a).collect();
                        enc.embed(r.defined, r.table.get(enc.m, &inner))
                    })
            });
            values.push(value.unwrap_or(0));
        });
        tables.insert(
            s.name.clone(),
            Table {
                arity: s.arity,
                values,
            },
        );
    }
    Ok(Interpretation::new(enc.n, &system.signature, tables)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub n: u32,
    pub v: usize,
    pub m: u32,
    /// `S_n` of the system.
    pub s_n: u64,
    /// `S_n` of its diversification.
    pub s_n_div: u64,
    pub upper_holds: bool,
    /// `S_m` of the diversification.
    pub s_m_div: u64,
    /// Solutions of the lifted interpretation at `n`, recounted directly.
    pub lifted_count: u64,
    pub lower_holds: bool,
    pub lift_witness: Interpretation,
}

/// Checks `S_m(div) <= S_n <= S_n(div)` for a CFNF system, with the lower
/// bound backed by an explicit lifted interpretation.
pub fn sandwich_check(
    system: &NormalSystem,
    n: u32,
    search: &Search,
) -> Result<SandwichReport, OracleError> {
    if !classify(system).is_cfnf {
        return Err(OracleError::NotCfnf);
    }
    let enc = BlockEncoding::new(n, system.variables.len())?;
    let original = system.to_term_system();
    let div = diversify(system);
    let div_system = div.to_term_system();
    let s_n = brute_max_solutions(&original, n, search)?.value;
    let s_n_div = brute_max_solutions(&div_system, n, search)?.value;
    let small = brute_max_solutions(&div_system, enc.m, search)?;
    let lifted = lift_interpretation(system, &small.witness, &enc)?;
    let lifted_count = count_solutions(&original, &lifted);
    Ok(SandwichReport {
        n,
        v: enc.v,
        m: enc.m,
        s_n,
        s_n_div,
        upper_holds: s_n <= s_n_div,
        s_m_div: small.value,
        lifted_count,
        lower_holds: s_n >= small.value && lifted_count >= small.value,
        lift_witness: lifted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingMode {
    /// Every interpretation of the embedded system was enumerated.
    Exhaustive,
    /// The original symbols were enumerated; decoders map each image point
    /// to its lexicographically least preimage.
    DecoderSynthesis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub mode: EmbeddingMode,
    pub dispersion: OracleResult,
    pub solutions: OracleResult,
    pub equal: bool,
}

/// Compares `Disp_n(t)` with `S_n` of the embedded system. Falls back to
/// decoder synthesis when the decoder tables make full enumeration too large.
pub fn check_embedding(
    t: &DispersionSpec,
    n: u32,
    search: &Search,
) -> Result<EmbeddingCheck, OracleError> {
    let dispersion = brute_dispersion(t, n, search)?;
    let gamma = embed_dispersion(t);
    let vars = gamma.variables().len() as u128;
    let exhaustive = space_size(gamma.signature(), n).is_some_and(|c| {
        c <= u128::from(search.budget.max_interpretations)
            && checked_pow(u128::from(n), vars)
                .and_then(|p| p.checked_mul(c))
                .is_some_and(|e| e <= u128::from(search.budget.max_evaluations))
    });
    let (mode, solutions) = if exhaustive {
        (
            EmbeddingMode::Exhaustive,
            brute_max_solutions(&gamma, n, search)?,
        )
    } else {
        (
            EmbeddingMode::DecoderSynthesis,
            synthesized_solutions(t, &gamma, n, search)?,
        )
    };
    Ok(EmbeddingCheck {
        mode,
        equal: dispersion.value == solutions.value,
        dispersion,
        solutions,
    })
}

fn synthesized_solutions(
    t: &DispersionSpec,
    gamma: &crate::term::TermSystem,
    n: u32,
    search: &Search,
) -> Result<OracleResult, OracleError> {
    let space = InterpretationSpace::new(t.signature(), n, &search.budget)?;
    let codes = checked_pow(u128::from(n), t.r() as u128);
    let decoder_entries = codes.and_then(|c| c.checked_mul(t.k() as u128));
    search.budget.admit_evaluations(decoder_entries)?;
    let per = checked_pow(u128::from(n), t.k() as u128)
        .zip(checked_pow(u128::from(n), gamma.variables().len() as u128))
        .and_then(|(a, b)| a.checked_add(b));
    let evaluations = search
        .budget
        .admit_evaluations(per.and_then(|p| p.checked_mul(u128::from(space.count()))))?;
    let codes = codes.expect("admitted above") as usize;
    let layout = InterpretationSpace::layout(gamma.signature(), n);
    let compiled_t = CompiledDispersion::new(t, &space);
    let compiled_gamma = CompiledSystem::new(gamma, &layout);
    let k = t.k();
    let full_tables = |digits: &[u32]| -> Vec<u32> {
        let mut decoders = vec![0u32; codes * k];
        let mut seen = vec![false; codes];
        compiled_t.for_each_image(digits, |x, code| {
            let c = code as usize;
            if !seen[c] {
                seen[c] = true;
                for (j, &xj) in x.iter().enumerate() {
                    decoders[j * codes + c] = xj;
                }
            }
        });
        let mut full = digits.to_vec();
        full.extend_from_slice(&decoders);
        full
    };
    let parts = parallel::run(space.count(), search.jobs, |a, b| {
        let mut best = None;
        scan_digits(&space, a, b, |i, digits| {
            Best::offer(&mut best, compiled_gamma.count(&full_tables(digits)), i);
            true
        });
        best
    });
    let best = Best::merge(parts).expect("interpretation spaces are never empty");
    let witness = layout.interpretation(&full_tables(&space.digits_at(best.index)));
    Ok(OracleResult {
        value: best.value,
        witness,
        witness_index: best.index,
        rate: rate(best.value, n),
        interpretations: space.count(),
        evaluations,
    })
}
