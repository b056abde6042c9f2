//! Terms lowered to a flat instruction list that reads function tables
//! straight out of an interpretation's digit vector.

use std::collections::HashMap;

use crate::term::{odometer_step, DispersionSpec, Term, TermSystem};

use super::space::InterpretationSpace;

#[derive(Debug, Clone)]
enum Op {
    Var(usize),
    App { offset: usize, args: Vec<usize> },
}

#[derive(Debug, Clone)]
struct Program {
    n: u32,
    ops: Vec<Op>,
}

impl Program {
    fn new(n: u32) -> Self {
        Program { n, ops: Vec::new() }
    }

    fn compile(
        &mut self,
        t: &Term,
        vars: &HashMap<&str, usize>,
        space: &InterpretationSpace,
        memo: &mut HashMap<Term, usize>,
    ) -> usize {
        if let Some(&id) = memo.get(t) {
            return id;
        }
        let op = match t {
            Term::Var(v) => Op::Var(vars[v.as_str()]),
            Term::App(f, args) => Op::App {
                offset: space.slot(f).expect("symbol in signature").offset,
                args: args
                    .iter()
                    .map(|a| self.compile(a, vars, space, memo))
                    .collect(),
            },
        };
        self.ops.push(op);
        memo.insert(t.clone(), self.ops.len() - 1);
        self.ops.len() - 1
    }

    #[inline]
    fn run(&self, tables: &[u32], env: &[u32], out: &mut [u32]) {
        let n = self.n as usize;
        for (i, op) in self.ops.iter().enumerate() {
            out[i] = match op {
                Op::Var(v) => env[*v],
                Op::App { offset, args } => {
                    let row = args
                        .iter()
                        .fold(0usize, |acc, &a| acc * n + out[a] as usize);
                    tables[offset + row]
                }
            };
        }
    }
}

fn var_index(names: &[String]) -> HashMap<&str, usize> {
    names
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect()
}

/// Solution counter for a term system over a fixed interpretation layout.
#[derive(Debug, Clone)]
pub struct CompiledSystem {
    program: Program,
    equations: Vec<(usize, usize)>,
    vars: usize,
}

impl CompiledSystem {
    pub fn new(system: &TermSystem, space: &InterpretationSpace) -> Self {
        let vars = var_index(system.variables());
        let mut program = Program::new(space.n());
        let mut memo = HashMap::new();
        let equations = system
            .equations()
            .iter()
            .map(|e| {
                (
                    program.compile(&e.lhs, &vars, space, &mut memo),
                    program.compile(&e.rhs, &vars, space, &mut memo),
                )
            })
            .collect();
        CompiledSystem {
            program,
            equations,
            vars: system.variables().len(),
        }
    }

    /// Number of assignments (variables in declaration order) that satisfy
    /// every equation under the tables in `tables`.
    pub fn count(&self, tables: &[u32]) -> u64 {
        let n = self.program.n;
        let mut env = vec![0u32; self.vars];
        let mut out = vec![0u32; self.program.ops.len()];
        let mut count = 0;
        loop {
            self.program.run(tables, &env, &mut out);
            if self.equations.iter().all(|&(l, r)| out[l] == out[r]) {
                count += 1;
            }
            if !odometer_step(&mut env, n) {
                return count;
            }
        }
    }
}

/// Evaluator for the output tuple of a dispersion spec.
#[derive(Debug, Clone)]
pub struct CompiledDispersion {
    program: Program,
    outputs: Vec<usize>,
    inputs: usize,
}

impl CompiledDispersion {
    pub fn new(t: &DispersionSpec, space: &InterpretationSpace) -> Self {
        let vars = var_index(t.inputs());
        let mut program = Program::new(space.n());
        let mut memo = HashMap::new();
        let outputs = t
            .outputs()
            .iter()
            .map(|o| program.compile(o, &vars, space, &mut memo))
            .collect();
        CompiledDispersion {
            program,
            outputs,
            inputs: t.inputs().len(),
        }
    }

    /// Calls `f(x, code)` for every input tuple `x` in lexicographic order,
    /// where `code` is the output tuple read as a base-`n` number.
    pub fn for_each_image(&self, tables: &[u32], mut f: impl FnMut(&[u32], u128)) {
        let n = self.program.n;
        let mut env = vec![0u32; self.inputs];
        let mut out = vec![0u32; self.program.ops.len()];
        loop {
            self.program.run(tables, &env, &mut out);
            let code = self
                .outputs
                .iter()
                .fold(0u128, |acc, &o| acc * u128::from(n) + u128::from(out[o]));
            f(&env, code);
            if !odometer_step(&mut env, n) {
                return;
            }
        }
    }
}

/// Distinct-value counter reused across interpretations. Codes below the
/// dense limit go through a stamp array; larger code spaces use a hash set.
pub(crate) struct ImageCounter {
    stamps: Vec<u32>,
    epoch: u32,
    sparse: Option<std::collections::HashSet<u128>>,
}

impl ImageCounter {
    const DENSE_LIMIT: u128 = 1 << 22;

    pub(crate) fn new(code_space: Option<u128>) -> Self {
        match code_space {
            Some(size) if size <= Self::DENSE_LIMIT => ImageCounter {
                stamps: vec![0; size as usize],
                epoch: 0,
                sparse: None,
            },
            _ => ImageCounter {
                stamps: Vec::new(),
                epoch: 0,
                sparse: Some(Default::default()),
            },
        }
    }

    pub(crate) fn reset(&mut self) {
        match &mut self.sparse {
            Some(set) => set.clear(),
            None => {
                self.epoch = self.epoch.wrapping_add(1);
                if self.epoch == 0 {
                    self.stamps.fill(0);
                    self.epoch = 1;
                }
            }
        }
    }

    /// Records `code`; returns true if it was not seen since the last reset.
    pub(crate) fn insert(&mut self, code: u128) -> bool {
        match &mut self.sparse {
            Some(set) => set.insert(code),
            None => {
                let slot = &mut self.stamps[code as usize];
                let fresh = *slot != self.epoch;
                *slot = self.epoch;
                fresh
            }
        }
    }
}
