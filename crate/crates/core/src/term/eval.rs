use thiserror::Error;

use super::{Assignment, Interpretation, Term, TermSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no table for symbol `{0}`")]
    MissingTable(String),
    #[error("no value bound to variable `{0}`")]
    MissingVariable(String),
    #[error(
        "symbol `{symbol}` has a table of arity {table} but is applied to {found} argument(s)"
    )]
    Arity {
        symbol: String,
        table: usize,
        found: usize,
    },
    #[error("variable `{var}` has value {value} outside the alphabet [0, {n})")]
    ValueOutOfRange { var: String, value: u32, n: u32 },
}

/// Evaluates `t` under interpretation `interp` and assignment `a`.
pub fn eval_term(t: &Term, interp: &Interpretation, a: &Assignment) -> Result<u32, EvalError> {
    match t {
        Term::Var(v) => {
            let value = a
                .get(v)
                .ok_or_else(|| EvalError::MissingVariable(v.clone()))?;
            if value >= interp.n() {
                return Err(EvalError::ValueOutOfRange {
                    var: v.clone(),
                    value,
                    n: interp.n(),
                });
            }
            Ok(value)
        }
        Term::App(f, args) => {
            let table = interp
                .table(f)
                .ok_or_else(|| EvalError::MissingTable(f.clone()))?;
            if table.arity != args.len() {
                return Err(EvalError::Arity {
                    symbol: f.clone(),
                    table: table.arity,
                    found: args.len(),
                });
            }
            let values = args
                .iter()
                .map(|u| eval_term(u, interp, a))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(table.get(interp.n(), &values))
        }
    }
}

/// True iff every equation of `system` holds at `a` under `interp`.
pub fn satisfies(
    system: &TermSystem,
    interp: &Interpretation,
    a: &Assignment,
) -> Result<bool, EvalError> {
    for eq in system.equations() {
        if eval_term(&eq.lhs, interp, a)? != eval_term(&eq.rhs, interp, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_system, Signature, Symbol};

    fn xor2() -> Interpretation {
        let sig = Signature::new(vec![Symbol::new("f", 2)]).unwrap();
        Interpretation::from_fns(2, &sig, |_, a| a[0] ^ a[1]).unwrap()
    }

    #[test]
    fn variable_case() {
        let sig = Signature::new(vec![]).unwrap();
        let i = Interpretation::from_fns(4, &sig, |_, _| 0).unwrap();
        let a = Assignment::from_pairs([("x", 3)]);
        assert_eq!(eval_term(&Term::var("x"), &i, &a), Ok(3));
    }

    #[test]
    fn table_lookup() {
        let t = Term::app("f", vec![Term::var("x"), Term::var("y")]);
        let a = Assignment::from_pairs([("x", 1), ("y", 1)]);
        assert_eq!(eval_term(&t, &xor2(), &a), Ok(0));
    }

    #[test]
    fn nested_recursion() {
        let t = Term::app(
            "f",
            vec![
                Term::app("f", vec![Term::var("x"), Term::var("y")]),
                Term::var("x"),
            ],
        );
        let a = Assignment::from_pairs([("x", 1), ("y", 0)]);
        assert_eq!(eval_term(&t, &xor2(), &a), Ok(0));
    }

    #[test]
    fn missing_bindings_are_errors() {
        let t = Term::app("g", vec![Term::var("x")]);
        let a = Assignment::from_pairs([("x", 0)]);
        assert_eq!(
            eval_term(&t, &xor2(), &a),
            Err(EvalError::MissingTable("g".into()))
        );
        let t = Term::app("f", vec![Term::var("x"), Term::var("z")]);
        assert_eq!(
            eval_term(&t, &xor2(), &a),
            Err(EvalError::MissingVariable("z".into()))
        );
    }

    #[test]
    fn satisfies_identity_and_constant() {
        let sys = parse_system("instance { vars x; sig f/1; eq f(x) = x; }").unwrap();
        let id = Interpretation::from_fns(2, sys.signature(), |_, a| a[0]).unwrap();
        let zero = Interpretation::from_fns(2, sys.signature(), |_, _| 0).unwrap();
        for x in 0..2 {
            let a = Assignment::from_pairs([("x", x)]);
            assert_eq!(satisfies(&sys, &id, &a), Ok(true));
        }
        let a = Assignment::from_pairs([("x", 1)]);
        assert_eq!(satisfies(&sys, &zero, &a), Ok(false));
    }

    #[test]
    fn empty_system_is_vacuously_satisfied() {
        let sys = parse_system("instance { vars x, y; sig f/1; }").unwrap();
        let i = Interpretation::from_fns(3, sys.signature(), |_, _| 2).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let a = Assignment::from_pairs([("x", x), ("y", y)]);
                assert_eq!(satisfies(&sys, &i, &a), Ok(true));
            }
        }
    }
}
