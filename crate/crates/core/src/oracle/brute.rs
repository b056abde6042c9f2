use serde::{Deserialize, Serialize};

use crate::depgraph::{DependencyGraph, GuessingStrategy};
use crate::term::{odometer_step, DispersionSpec, Interpretation, Signature, Symbol, TermSystem};

use super::compiled::{CompiledDispersion, CompiledSystem, ImageCounter};
use super::parallel::{self, Best, FirstHit};
use super::space::{scan_digits, InterpretationIter, InterpretationSpace};
use super::{checked_pow, rate, OracleError, OracleResult, Search, SearchBudget};

/// Every interpretation of `signature` over `[n]` in index order.
pub fn enumerate_interpretations(
    signature: &Signature,
    n: u32,
    budget: &SearchBudget,
) -> Result<InterpretationIter, OracleError> {
    Ok(InterpretationSpace::new(signature, n, budget)?.iter())
}

fn per_interpretation(n: u32, vars: usize) -> Option<u128> {
    checked_pow(u128::from(n), vars as u128)
}

fn total(count: u64, per: Option<u128>) -> Option<u128> {
    per.and_then(|p| p.checked_mul(u128::from(count)))
}

/// Highest-scoring interpretation, ties broken by lowest index.
fn argmax(space: &InterpretationSpace, jobs: usize, score: impl Fn(&[u32]) -> u64 + Sync) -> Best {
    let parts = parallel::run(space.count(), jobs, |a, b| {
        let mut best = None;
        scan_digits(space, a, b, |i, digits| {
            Best::offer(&mut best, score(digits), i);
            true
        });
        best
    });
    Best::merge(parts).expect("interpretation spaces are never empty")
}

/// Exact `S_n`: the most satisfying assignments any interpretation admits.
pub fn brute_max_solutions(
    system: &TermSystem,
    n: u32,
    search: &Search,
) -> Result<OracleResult, OracleError> {
    let space = InterpretationSpace::new(system.signature(), n, &search.budget)?;
    let evaluations = search.budget.admit_evaluations(total(
        space.count(),
        per_interpretation(n, system.variables().len()),
    ))?;
    let compiled = CompiledSystem::new(system, &space);
    let best = argmax(&space, search.jobs, |digits| compiled.count(digits));
    Ok(OracleResult {
        value: best.value,
        witness: space.interpretation(&space.digits_at(best.index)),
        witness_index: best.index,
        rate: rate(best.value, n),
        interpretations: space.count(),
        evaluations,
    })
}

fn image_space(n: u32, r: usize) -> Option<u128> {
    checked_pow(u128::from(n), r as u128)
}

/// Exact `Disp_n`: the largest image of the output map over all interpretations.
pub fn brute_dispersion(
    t: &DispersionSpec,
    n: u32,
    search: &Search,
) -> Result<OracleResult, OracleError> {
    let space = InterpretationSpace::new(t.signature(), n, &search.budget)?;
    let evaluations = search
        .budget
        .admit_evaluations(total(space.count(), per_interpretation(n, t.k())))?;
    let compiled = CompiledDispersion::new(t, &space);
    let codes = image_space(n, t.r());
    let parts = parallel::run(space.count(), search.jobs, |a, b| {
        let mut counter = ImageCounter::new(codes);
        let mut best = None;
        scan_digits(&space, a, b, |i, digits| {
            counter.reset();
            let mut size = 0;
            compiled.for_each_image(digits, |_, code| size += u64::from(counter.insert(code)));
            Best::offer(&mut best, size, i);
            true
        });
        best
    });
    let best = Best::merge(parts).expect("interpretation spaces are never empty");
    Ok(OracleResult {
        value: best.value,
        witness: space.interpretation(&space.digits_at(best.index)),
        witness_index: best.index,
        rate: rate(best.value, n),
        interpretations: space.count(),
        evaluations,
    })
}

/// Outcome of a fixed-alphabet surjectivity search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfectCheck {
    pub perfect: bool,
    /// `n^r`, the image size a surjective map reaches.
    pub target: u128,
    /// Lowest-index surjective interpretation, if any.
    pub witness: Option<Interpretation>,
    pub witness_index: Option<u64>,
    /// Largest image seen; the exact dispersion when `perfect` is false.
    pub max_image: u64,
    /// Interpretations a sequential scan examines before deciding.
    pub interpretations_checked: u64,
    pub evaluations: u64,
}

/// Searches for a surjective interpretation, stopping at the first one. When
/// none exists the whole space has been scanned, which is the refutation.
pub fn check_perfect_fixed(
    t: &DispersionSpec,
    n: u32,
    search: &Search,
) -> Result<PerfectCheck, OracleError> {
    let space = InterpretationSpace::new(t.signature(), n, &search.budget)?;
    let per = per_interpretation(n, t.k());
    search.budget.admit_evaluations(total(space.count(), per))?;
    let per = per.expect("admitted above") as u64;
    let codes = image_space(n, t.r());
    let target = codes.unwrap_or(u128::MAX);
    let compiled = CompiledDispersion::new(t, &space);
    let hit = FirstHit::new();
    let parts = parallel::run(space.count(), search.jobs, |a, b| {
        let mut counter = ImageCounter::new(codes);
        let mut best = None;
        scan_digits(&space, a, b, |i, digits| {
            if hit.beaten(i) {
                return false;
            }
            counter.reset();
            let mut size = 0u64;
            compiled.for_each_image(digits, |_, code| size += u64::from(counter.insert(code)));
            Best::offer(&mut best, size, i);
            if u128::from(size) == target {
                hit.record(i);
                return false;
            }
            true
        });
        best
    });
    let checked = match hit.get() {
        Some(i) => i + 1,
        None => space.count(),
    };
    let max_image = match hit.get() {
        Some(_) => target as u64,
        None => Best::merge(parts).expect("full scan").value,
    };
    Ok(PerfectCheck {
        perfect: hit.get().is_some(),
        target,
        witness: hit.get().map(|i| space.interpretation(&space.digits_at(i))),
        witness_index: hit.get(),
        max_image,
        interpretations_checked: checked,
        evaluations: checked * per,
    })
}

/// Exact `W(G, S; n)`: each non-source vertex guesses its value from its
/// in-neighbours (in vertex order); counts configurations where all guesses
/// are right, maximized over strategies.
pub fn brute_guessing(
    g: &DependencyGraph,
    n: u32,
    search: &Search,
) -> Result<OracleResult<GuessingStrategy>, OracleError> {
    let guessers: Vec<(usize, Vec<usize>)> = g.guessers().map(|v| (v, g.in_neighbors(v))).collect();
    let signature = Signature::new(
        guessers
            .iter()
            .map(|(v, ins)| Symbol::new(g.vertices()[*v].clone(), ins.len()))
            .collect(),
    )
    .expect("vertex names are distinct");
    let space = InterpretationSpace::new(&signature, n, &search.budget)?;
    let evaluations = search
        .budget
        .admit_evaluations(total(space.count(), per_interpretation(n, g.len())))?;
    let plan: Vec<(usize, usize, Vec<usize>)> = guessers
        .iter()
        .zip(space.slots())
        .map(|((v, ins), slot)| (*v, slot.offset, ins.clone()))
        .collect();
    let size = g.len();
    let wins = |tables: &[u32]| {
        let mut config = vec![0u32; size];
        let mut count = 0;
        loop {
            let ok = plan.iter().all(|(v, offset, ins)| {
                let row = ins
                    .iter()
                    .fold(0usize, |acc, &u| acc * n as usize + config[u] as usize);
                tables[offset + row] == config[*v]
            });
            count += u64::from(ok);
            if !odometer_step(&mut config, n) {
                return count;
            }
        }
    };
    let best = argmax(&space, search.jobs, wins);
    let digits = space.digits_at(best.index);
    let witness = GuessingStrategy {
        n,
        tables: space
            .slots()
            .iter()
            .map(|s| (s.name.clone(), digits[s.offset..s.offset + s.len].to_vec()))
            .collect(),
    };
    Ok(OracleResult {
        value: best.value,
        witness,
        witness_index: best.index,
        rate: rate(best.value, n),
        interpretations: space.count(),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::count_solutions;
    use crate::term::{parse_dispersion, parse_graph, parse_system};

    fn sys(text: &str) -> TermSystem {
        parse_system(text).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let sig = Signature::new(vec![Symbol::new("f", 2)]).unwrap();
        let b = SearchBudget::default();
        assert_eq!(enumerate_interpretations(&sig, 2, &b).unwrap().count(), 16);
        assert_eq!(
            enumerate_interpretations(&sig, 3, &b).unwrap().count(),
            19683
        );
        let first = enumerate_interpretations(&sig, 2, &b)
            .unwrap()
            .nth(1)
            .unwrap();
        assert_eq!(first.table("f").unwrap().values, [0, 0, 0, 1]);
    }

    #[test]
    fn small_solution_counts() {
        let s = sys("instance { vars x, y; sig f/1; eq f(x) = y; }");
        assert_eq!(
            brute_max_solutions(&s, 2, &Search::default())
                .unwrap()
                .value,
            2
        );
        let s = sys("instance { vars x; sig f/1; eq f(x) = x; }");
        let r = brute_max_solutions(&s, 3, &Search::default()).unwrap();
        assert_eq!(r.value, 3);
        assert_eq!(r.witness.table("f").unwrap().values, [0, 1, 2]);
        assert_eq!(count_solutions(&s, &r.witness), 3);
    }

    #[test]
    fn dispersion_of_projection_and_shared_input() {
        let t = parse_dispersion("dispersion { inputs x, y; sig ; outputs x, y; }").unwrap();
        assert_eq!(
            brute_dispersion(&t, 2, &Search::default()).unwrap().value,
            4
        );
        let t =
            parse_dispersion("dispersion { inputs x; sig f/1, g/1; outputs f(x), g(x); }").unwrap();
        assert_eq!(
            brute_dispersion(&t, 3, &Search::default()).unwrap().value,
            3
        );
    }

    #[test]
    fn perfect_checks() {
        let t = parse_dispersion("dispersion { inputs x, y; sig f/2; outputs f(x, y); }").unwrap();
        let p = check_perfect_fixed(&t, 2, &Search::default()).unwrap();
        assert!(p.perfect);
        assert_eq!(p.witness_index, Some(1));
        assert_eq!(p.interpretations_checked, 2);
    }

    #[test]
    fn guessing_values() {
        let g = parse_graph(
            "graph { nodes a, b, c; sources ; edge a -> b; edge b -> c; edge c -> a; }",
        )
        .unwrap();
        let r = brute_guessing(&g, 2, &Search::default()).unwrap();
        assert_eq!(r.value, 2);
        assert_eq!(r.witness.winning_count(&g), 2);
        let g = parse_graph("graph { nodes s; sources s; }").unwrap();
        assert_eq!(brute_guessing(&g, 5, &Search::default()).unwrap().value, 5);
    }

    #[test]
    fn over_budget_refused() {
        let t = parse_dispersion(
            "dispersion { inputs x,y,z,w; sig f/2; outputs f(x,y), f(x,z), f(y,w), f(z,w); }",
        )
        .unwrap();
        let err = brute_dispersion(&t, 4, &Search::default()).unwrap_err();
        assert!(matches!(
            err,
            OracleError::Budget {
                quantity: "interpretations",
                ..
            }
        ));
    }
}
