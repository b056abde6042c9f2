use serde::{Deserialize, Serialize};

use crate::term::{odometer_step, table_len, Interpretation, Signature, Table};

use super::{checked_pow, OracleError, SearchBudget};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub name: String,
    pub arity: usize,
    pub offset: usize,
    pub len: usize,
}

/// All interpretations of a signature over `[n]`, indexed by the base-`n`
/// number whose digits are the concatenated tables (symbols in signature
/// order, rows in lexicographic order, last digit fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpretationSpace {
    n: u32,
    slots: Vec<Slot>,
    width: usize,
    count: u64,
}

/// Closed-form number of interpretations: the product of `n^(n^arity)`.
/// `None` when it does not fit in 128 bits.
pub fn space_size(signature: &Signature, n: u32) -> Option<u128> {
    let mut width: u128 = 0;
    for s in signature.symbols() {
        width = width.checked_add(checked_pow(u128::from(n), s.arity as u128)?)?;
    }
    checked_pow(u128::from(n), width)
}

impl InterpretationSpace {
    /// Fails when `n = 0` or the space is larger than the budget allows.
    pub fn new(signature: &Signature, n: u32, budget: &SearchBudget) -> Result<Self, OracleError> {
        if n == 0 {
            return Err(OracleError::EmptyAlphabet);
        }
        let count = budget.admit_interpretations(space_size(signature, n))?;
        Ok(InterpretationSpace {
            count,
            ..InterpretationSpace::layout(signature, n)
        })
    }

    /// The table layout without a budget check, for sampling spaces too large
    /// to enumerate. `count` saturates at `u64::MAX`.
    pub fn layout(signature: &Signature, n: u32) -> Self {
        let mut slots = Vec::with_capacity(signature.len());
        let mut offset = 0;
        for s in signature.symbols() {
            let len = table_len(n, s.arity);
            slots.push(Slot {
                name: s.name.clone(),
                arity: s.arity,
                offset,
                len,
            });
            offset += len;
        }
        InterpretationSpace {
            n,
            slots,
            width: offset,
            count: space_size(signature, n)
                .map_or(u64::MAX, |c| c.min(u128::from(u64::MAX)) as u64),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Total number of table entries.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, name: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.name == name)
    }

    /// Table digits of the interpretation with the given index.
    pub fn digits_at(&self, mut index: u64) -> Vec<u32> {
        let mut digits = vec![0u32; self.width];
        let n = u64::from(self.n);
        for d in digits.iter_mut().rev() {
            if index == 0 {
                break;
            }
            *d = (index % n) as u32;
            index /= n;
        }
        digits
    }

    pub fn index_of(&self, digits: &[u32]) -> u64 {
        digits
            .iter()
            .fold(0u64, |acc, &d| acc * u64::from(self.n) + u64::from(d))
    }

    pub fn interpretation(&self, digits: &[u32]) -> Interpretation {
        let tables = self
            .slots
            .iter()
            .map(|s| {
                (
                    s.name.clone(),
                    Table {
                        arity: s.arity,
                        values: digits[s.offset..s.offset + s.len].to_vec(),
                    },
                )
            })
            .collect();
        Interpretation::from_parts(self.n, tables)
    }

    /// Inverse of [`InterpretationSpace::interpretation`]; `None` if the
    /// interpretation does not cover this signature at this alphabet size.
    pub fn encode(&self, interp: &Interpretation) -> Option<Vec<u32>> {
        if interp.n() != self.n {
            return None;
        }
        let mut digits = Vec::with_capacity(self.width);
        for s in &self.slots {
            let t = interp.table(&s.name)?;
            if t.values.len() != s.len {
                return None;
            }
            digits.extend_from_slice(&t.values);
        }
        Some(digits)
    }

    /// Interpretations with indices in `start..end`, in order.
    pub fn range(&self, start: u64, end: u64) -> InterpretationIter {
        let end = end.min(self.count);
        InterpretationIter {
            space: self.clone(),
            digits: self.digits_at(start),
            next: start,
            end,
        }
    }

    pub fn iter(&self) -> InterpretationIter {
        self.range(0, self.count)
    }

    /// Visits the digit vector of every interpretation in index order without
    /// building tables; stops early when `f` returns false.
    pub fn scan(&self, mut f: impl FnMut(&[u32]) -> bool) {
        scan_digits(self, 0, self.count, |_, d| f(d));
    }
}

pub struct InterpretationIter {
    space: InterpretationSpace,
    digits: Vec<u32>,
    next: u64,
    end: u64,
}

impl Iterator for InterpretationIter {
    type Item = Interpretation;

    fn next(&mut self) -> Option<Interpretation> {
        if self.next >= self.end {
            return None;
        }
        let item = self.space.interpretation(&self.digits);
        self.next += 1;
        odometer_step(&mut self.digits, self.space.n);
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

/// Walks `start..end` calling `f(index, digits)`; stops early when `f`
/// returns false.
pub(crate) fn scan_digits(
    space: &InterpretationSpace,
    start: u64,
    end: u64,
    mut f: impl FnMut(u64, &[u32]) -> bool,
) {
    let mut digits = space.digits_at(start);
    for index in start..end {
        if !f(index, &digits) {
            return;
        }
        odometer_step(&mut digits, space.n);
    }
}
