//! Exhaustive ground truth over small alphabets.
//!
//! Every search computes the size of its space in closed form first and
//! refuses to start when that exceeds the [`SearchBudget`]. Interpretations
//! are scanned in index order (see [`InterpretationSpace`]); parallel runs
//! split that order into contiguous ranges and merge by best value, then
//! lowest index, so the reported witness does not depend on the job count.

mod brute;
mod compiled;
mod parallel;
mod space;
mod verify;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::{
    eval_term, for_each_tuple, satisfies, Assignment, DispersionSpec, Interpretation,
    InterpretationError, TermSystem,
};

pub use brute::{
    brute_dispersion, brute_guessing, brute_max_solutions, check_perfect_fixed,
    enumerate_interpretations, PerfectCheck,
};
pub use compiled::{CompiledDispersion, CompiledSystem};
pub use space::{space_size, InterpretationIter, InterpretationSpace, Slot};
pub use verify::{
    check_embedding, check_solutions_equal_winning, lift_interpretation, sandwich_check,
    BlockEncoding, EmbeddingCheck, EmbeddingMode, SandwichReport, WinningEquality,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("search refused: {required} {quantity} exceed the budget of {limit}")]
    Budget {
        quantity: &'static str,
        required: String,
        limit: u64,
    },
    #[error("expected a diversified system in functional normal form: {0}")]
    NotDiversifiedFnf(String),
    #[error("expected a collision-free system in functional normal form")]
    NotCfnf,
    #[error("block encoding needs 1 <= v <= n, got v = {v}, n = {n}")]
    BlockCount { n: u32, v: usize },
    #[error("diversified interpretation does not match: {0}")]
    LiftInput(String),
    #[error(transparent)]
    Interpretation(#[from] InterpretationError),
}

/// Upper limits on the size of an exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_evaluations: u64,
    pub max_interpretations: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_evaluations: 1 << 26,
            max_interpretations: 1 << 24,
        }
    }
}

fn describe(required: Option<u128>) -> String {
    required.map_or_else(|| "more than 2^128".to_owned(), |r| r.to_string())
}

impl SearchBudget {
    pub(crate) fn admit_interpretations(&self, count: Option<u128>) -> Result<u64, OracleError> {
        match count {
            Some(c) if c <= u128::from(self.max_interpretations) => Ok(c as u64),
            _ => Err(OracleError::Budget {
                quantity: "interpretations",
                required: describe(count),
                limit: self.max_interpretations,
            }),
        }
    }

    pub(crate) fn admit_evaluations(&self, count: Option<u128>) -> Result<u64, OracleError> {
        match count {
            Some(c) if c <= u128::from(self.max_evaluations) => Ok(c as u64),
            _ => Err(OracleError::Budget {
                quantity: "evaluations",
                required: describe(count),
                limit: self.max_evaluations,
            }),
        }
    }
}

/// Budget plus the number of worker threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Search {
    pub budget: SearchBudget,
    pub jobs: usize,
}

impl Default for Search {
    fn default() -> Self {
        Search {
            budget: SearchBudget::default(),
            jobs: 1,
        }
    }
}

impl Search {
    pub fn with_jobs(jobs: usize) -> Self {
        Search {
            jobs,
            ..Search::default()
        }
    }
}

/// An exact optimum together with the lowest-index interpretation attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult<W = Interpretation> {
    pub value: u64,
    pub witness: W,
    pub witness_index: u64,
    /// `ln value / ln n`, present when `n >= 2` and `value >= 1`.
    pub rate: Option<f64>,
    pub interpretations: u64,
    pub evaluations: u64,
}

pub(crate) fn rate(value: u64, n: u32) -> Option<f64> {
    (n >= 2 && value >= 1).then(|| (value as f64).ln() / f64::from(n).ln())
}

pub(crate) fn checked_pow(base: u128, exp: u128) -> Option<u128> {
    match base {
        0 => Some(u128::from(exp == 0)),
        1 => Some(1),
        _ => base.checked_pow(u32::try_from(exp).ok()?),
    }
}

/// Solutions of `system` under `interp`, counted with the tree-walking
/// evaluator. Slow; meant for re-checking witnesses.
pub fn count_solutions(system: &TermSystem, interp: &Interpretation) -> u64 {
    let mut count = 0;
    for_each_tuple(interp.n(), system.variables().len(), |values| {
        let a = Assignment::zip(system.variables(), values);
        if satisfies(system, interp, &a).expect("interpretation covers the system") {
            count += 1;
        }
    });
    count
}

/// Image size of the output map of `t` under `interp`, tree-walking.
pub fn image_size(t: &DispersionSpec, interp: &Interpretation) -> u64 {
    let mut image = BTreeSet::new();
    for_each_tuple(interp.n(), t.inputs().len(), |values| {
        let a = Assignment::zip(t.inputs(), values);
        let out: Vec<u32> = t
            .outputs()
            .iter()
            .map(|o| eval_term(o, interp, &a).expect("interpretation covers the output terms"))
            .collect();
        image.insert(out);
    });
    image.len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_admission() {
        let b = SearchBudget {
            max_evaluations: 100,
            max_interpretations: 10,
        };
        assert_eq!(b.admit_interpretations(Some(10)), Ok(10));
        assert!(b.admit_interpretations(Some(11)).is_err());
        let err = b.admit_evaluations(None).unwrap_err();
        assert_eq!(
            err.to_string(),
            "search refused: more than 2^128 evaluations exceed the budget of 100"
        );
    }

    #[test]
    fn pow_edge_cases() {
        assert_eq!(checked_pow(0, 0), Some(1));
        assert_eq!(checked_pow(0, 5), Some(0));
        assert_eq!(checked_pow(1, u128::MAX), Some(1));
        assert_eq!(checked_pow(2, 200), None);
        assert_eq!(checked_pow(3, 9), Some(19683));
    }

    #[test]
    fn rates() {
        assert!((rate(8, 2).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(rate(5, 1), None);
        assert_eq!(rate(0, 3), None);
    }
}
