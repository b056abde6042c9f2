use proptest::prelude::*;

use termflow_core::corpus;
use termflow_core::normalize::{
    classify, collision_quotient, diversify, flatten, pipeline, quotient_vars, NormalSystem,
};
use termflow_core::oracle::{
    brute_max_solutions, count_solutions, CompiledSystem, InterpretationSpace, Search, SearchBudget,
};
use termflow_core::term::{
    eval_term, for_each_tuple, parse_system, render, Assignment, Equation, Interpretation,
    Signature, Symbol, Term, TermSystem,
};

fn signature() -> Signature {
    Signature::new(vec![
        Symbol::new("f", 2),
        Symbol::new("g", 1),
        Symbol::new("c", 0),
    ])
    .unwrap()
}

fn term(k: usize) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        4 => (0..k).prop_map(|i| Term::var(format!("x{i}"))),
        1 => Just(Term::app("c", vec![])),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Term::app("g", vec![a])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::app("f", vec![a, b])),
        ]
    })
    .boxed()
}

fn system() -> impl Strategy<Value = TermSystem> {
    (1usize..=3).prop_flat_map(|k| {
        prop::collection::vec((term(k), term(k)), 1..=3).prop_map(move |eqs| {
            TermSystem::new(
                (0..k).map(|i| format!("x{i}")).collect(),
                signature(),
                eqs.into_iter().map(|(l, r)| Equation::new(l, r)).collect(),
            )
            .unwrap()
        })
    })
}

fn interpretation() -> impl Strategy<Value = Interpretation> {
    (
        prop::collection::vec(0u32..2, 4),
        prop::collection::vec(0u32..2, 2),
        0u32..2,
    )
        .prop_map(|(f, g, c)| {
            Interpretation::from_fns(2, &signature(), |s, a| match s {
                "f" => f[(a[0] * 2 + a[1]) as usize],
                "g" => g[a[0] as usize],
                _ => c,
            })
            .unwrap()
        })
}

/// Solution counts of the original and every pipeline stage under one
/// interpretation.
fn stage_counts(s: &TermSystem, i: &Interpretation) -> [u64; 4] {
    let flat = flatten(s);
    let quot = quotient_vars(&flat);
    let cf = collision_quotient(&quot);
    [
        count_solutions(s, i),
        count_solutions(&flat.to_term_system(), i),
        count_solutions(&quot.to_term_system(), i),
        count_solutions(&cf.to_term_system(), i),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stages_preserve_solution_counts(s in system(), i in interpretation()) {
        let c = stage_counts(&s, &i);
        prop_assert!(c.iter().all(|&x| x == c[0]), "{:?} for {}", c, render(&s));
    }

    #[test]
    fn pipeline_is_normal_and_idempotent(s in system()) {
        let (n, report) = pipeline(&s);
        prop_assert!(n.is_normal());
        prop_assert!(n.is_collision_free());
        prop_assert!(report.classification.is_normal);
        let again = collision_quotient(&quotient_vars(&n));
        prop_assert_eq!(again.equations, n.equations.clone());
    }

    #[test]
    fn compiled_count_matches_tree_walk(s in system(), i in interpretation()) {
        let space = InterpretationSpace::new(s.signature(), 2, &SearchBudget::default()).unwrap();
        let compiled = CompiledSystem::new(&s, &space);
        prop_assert_eq!(compiled.count(&space.encode(&i).unwrap()), count_solutions(&s, &i));
    }

    #[test]
    fn eval_of_flattened_names_agrees(s in system(), i in interpretation()) {
        // each auxiliary equals the subterm it names on every solution
        let flat = flatten(&s);
        let sys = flat.to_term_system();
        let mut ok = true;
        for_each_tuple(2, sys.variables().len(), |vals| {
            let a = Assignment::zip(sys.variables(), vals);
            if termflow_core::term::satisfies(&sys, &i, &a).unwrap() {
                for (z, t) in &flat.origin_map {
                    ok &= eval_term(t, &i, &a).unwrap() == a.get(z).unwrap();
                }
            }
        });
        prop_assert!(ok);
    }

    #[test]
    fn diversification_never_loses_solutions(s in system()) {
        let n = pipeline(&s).0;
        let div = diversify(&n);
        prop_assume!(div.equations.len() <= 3 && div.variables.len() <= 6);
        let search = Search::default();
        let a = brute_max_solutions(&n.to_term_system(), 2, &search).unwrap().value;
        let b = brute_max_solutions(&div.to_term_system(), 2, &search).unwrap().value;
        prop_assert!(a <= b);
    }

    #[test]
    fn render_then_parse_round_trips(s in system()) {
        prop_assert_eq!(parse_system(&render(&s)).unwrap(), s);
    }
}

fn corpus_normal(name: &str) -> NormalSystem {
    pipeline(&parse_system(corpus::get(name).unwrap()).unwrap()).0
}

#[test]
fn corpus_classifications() {
    let expect = [
        ("diamond_embedding", true, true),
        ("index_coding", true, true),
        ("collision", true, true),
        ("cascade", true, true),
        ("one_eq", true, true),
        ("two_cycle_sys", true, true),
        ("three_cycle_sys", true, true),
        ("fixpoint", true, true),
    ];
    for (name, fnf, cfnf) in expect {
        let c = classify(&corpus_normal(name));
        assert_eq!((c.is_fnf, c.is_cfnf), (fnf, cfnf), "{name}");
    }
}

#[test]
fn collision_file_records_a_merge() {
    let (n, report) = pipeline(&parse_system(corpus::get("collision").unwrap()).unwrap());
    assert_eq!(report.collisions, 1);
    assert_eq!(n.variables, ["x", "y", "u"]);
}

#[test]
fn cascade_merges_twice() {
    let (n, report) = pipeline(&parse_system(corpus::get("cascade").unwrap()).unwrap());
    assert_eq!(report.collisions, 2);
    assert_eq!(n.variables, ["x", "y", "u"]);
    assert_eq!(n.equations.len(), 2);
}

#[test]
fn diversification_inequality_on_corpus() {
    let search = Search::default();
    for (name, s) in corpus::systems() {
        let n = pipeline(&s).0;
        let div = diversify(&n);
        let (Ok(a), Ok(b)) = (
            brute_max_solutions(&n.to_term_system(), 2, &search),
            brute_max_solutions(&div.to_term_system(), 2, &search),
        ) else {
            continue;
        };
        assert!(a.value <= b.value, "{name}");
    }
}
