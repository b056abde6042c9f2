//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::Xoshiro256PlusPlus;
use rand::{RngExt, SeedableRng};
use serde_json::Value;

use termflow_core::corpus;
use termflow_core::depgraph::dependency_graph;
use termflow_core::flownet::{decide_perfect_r1, dispersion_exponent};
use termflow_core::normalize::{
    classify, collision_quotient, diversify, flatten, pipeline, quotient_vars,
};
use termflow_core::oracle::{
    brute_dispersion, check_embedding, check_perfect_fixed, check_solutions_equal_winning,
    sandwich_check, CompiledSystem, InterpretationSpace, OracleError, Search, SearchBudget,
};
use termflow_core::term::{parse_dispersion, SourceKind, TermSystem};

const SAMPLES: usize = 4096;

fn corpus_file(name: &str) -> String {
    format!("{}/../core/corpus/{name}.tf", env!("CARGO_MANIFEST_DIR"))
}

fn termflow(args: &[&str]) -> (i32, String, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_termflow"))
        .args(args)
        .env_remove("TERMFLOW_BUDGET")
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 output"),
        elapsed,
    )
}

fn report(args: &[&str]) -> Result<(Value, Duration), String> {
    let (code, out, t) = termflow(args);
    if code != 0 {
        return Err(format!("`termflow {}` exited with {code}", args.join(" ")));
    }
    let v = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    Ok((v, t))
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn diamond_exponent() -> Result<String, String> {
    let file = corpus_file("diamond");
    let (v, t) = report(&["exponent", &file, "--certificate"])?;
    let d = &v["result"]["exponent"];
    let cut = v["result"]["min_cut"].as_array().map_or(0, Vec::len);
    ensure(d == 4, format!("D = {d}"))?;
    ensure(cut == 4, format!("cut has {cut} edges"))?;
    ensure(
        v["result"]["certificate_valid"] == true,
        "certificate does not verify",
    )?;
    ensure(t < Duration::from_millis(100), format!("took {}", ms(t)))?;
    Ok(format!("D = 4, 4-edge cut, {}", ms(t)))
}

fn diamond_imperfection() -> Result<String, String> {
    let file = corpus_file("diamond");
    let mut notes = Vec::new();
    for (n, tables, limit) in [("2", 16, 1), ("3", 19683, 30)] {
        let (v, t) = report(&["brute", "perfect", &file, "-n", n])?;
        let r = &v["result"];
        ensure(r["perfect"] == false, format!("n = {n} reported perfect"))?;
        ensure(
            r["interpretations_checked"] == tables,
            format!("n = {n} checked {}", r["interpretations_checked"]),
        )?;
        ensure(
            t < Duration::from_secs(limit),
            format!("n = {n} took {}", ms(t)),
        )?;
        notes.push(format!("n={n}: {tables} tables, {}", ms(t)));
    }
    Ok(notes.join("; "))
}

fn cut_upper_bound() -> Result<String, String> {
    let (mut checked, mut skipped) = (0, Vec::new());
    for (name, t) in corpus::dispersions() {
        let d = dispersion_exponent(&t).exponent;
        for n in [2u32, 3] {
            match brute_dispersion(&t, n, &Search::with_jobs(4)) {
                Ok(r) => {
                    let bound = u64::from(n).pow(d);
                    ensure(
                        r.value <= bound,
                        format!("{name} n={n}: {} > {n}^{d}", r.value),
                    )?;
                    checked += 1;
                }
                Err(OracleError::Budget { .. }) => skipped.push(format!("{name} n={n}")),
                Err(e) => return Err(format!("{name}: {e}")),
            }
        }
    }
    let mut msg = format!("{checked} (dispersion, n) pairs, 0 violations");
    if !skipped.is_empty() {
        msg += &format!("; over budget: {}", skipped.join(", "));
    }
    Ok(msg)
}

fn embedding_equality() -> Result<String, String> {
    let start = Instant::now();
    let mut notes = Vec::new();
    for name in ["identity", "single_f", "diamond"] {
        let t = parse_dispersion(corpus::get(name).unwrap()).unwrap();
        let r = check_embedding(&t, 2, &Search::with_jobs(4)).map_err(|e| e.to_string())?;
        ensure(
            r.equal,
            format!("{name}: {} vs {}", r.dispersion.value, r.solutions.value),
        )?;
        notes.push(format!("{name}={}", r.dispersion.value));
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), format!("took {}", ms(t)))?;
    Ok(format!("{} in {}", notes.join(", "), ms(t)))
}

/// Solution counts of the four pipeline stages under the given tables.
fn stage_counters(s: &TermSystem, space: &InterpretationSpace) -> Vec<CompiledSystem> {
    let flat = flatten(s);
    let quot = quotient_vars(&flat);
    let cf = collision_quotient(&quot);
    [
        s.clone(),
        flat.to_term_system(),
        quot.to_term_system(),
        cf.to_term_system(),
    ]
    .iter()
    .map(|sys| CompiledSystem::new(sys, space))
    .collect()
}

fn pipeline_preservation() -> Result<String, String> {
    let mut exhaustive = 0u64;
    let mut sampled = Vec::new();
    for (name, s) in corpus::systems() {
        let check = |digits: &[u32], counters: &[CompiledSystem]| {
            let counts: Vec<u64> = counters.iter().map(|c| c.count(digits)).collect();
            ensure(
                counts.iter().all(|&c| c == counts[0]),
                format!("{name}: {counts:?}"),
            )
        };
        match InterpretationSpace::new(s.signature(), 2, &SearchBudget::default()) {
            Ok(space) => {
                let counters = stage_counters(&s, &space);
                let mut result = Ok(());
                space.scan(|digits| {
                    result = check(digits, &counters);
                    result.is_ok()
                });
                result?;
                exhaustive += space.count();
            }
            Err(OracleError::Budget { .. }) => {
                let space = InterpretationSpace::layout(s.signature(), 2);
                let counters = stage_counters(&s, &space);
                let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x5eed);
                for _ in 0..SAMPLES {
                    let digits: Vec<u32> =
                        (0..space.width()).map(|_| rng.random_range(0..2)).collect();
                    check(&digits, &counters)?;
                }
                sampled.push(name);
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    let mut msg = format!("{exhaustive} interpretations enumerated, 0 mismatches");
    if !sampled.is_empty() {
        msg += &format!(
            "; sampled {SAMPLES} seeded interpretations (space too large to enumerate): {}",
            sampled.join(", ")
        );
    }
    Ok(msg)
}

fn guessing_equality() -> Result<String, String> {
    let (mut checked, mut skipped) = (Vec::new(), Vec::new());
    for (name, s) in corpus::systems() {
        let n = pipeline(&s).0;
        if dependency_graph(&n).is_err() {
            continue;
        }
        match check_solutions_equal_winning(&diversify(&n), 2, &Search::with_jobs(4)) {
            Ok(r) => {
                ensure(
                    r.equal,
                    format!(
                        "{name}: S = {} but W = {}",
                        r.solutions.value, r.winning.value
                    ),
                )?;
                checked.push(format!("{name}={}", r.solutions.value));
            }
            Err(OracleError::Budget { .. }) => skipped.push(name),
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    let mut msg = format!("equal on {}", checked.join(", "));
    if !skipped.is_empty() {
        msg += &format!("; over budget, not checked: {}", skipped.join(", "));
    }
    Ok(msg)
}

fn sandwich() -> Result<String, String> {
    let mut names = Vec::new();
    for (name, s) in corpus::systems() {
        let n = pipeline(&s).0;
        if !classify(&n).is_cfnf || n.variables.len() != 2 {
            continue;
        }
        for size in [2, 3] {
            let r = sandwich_check(&n, size, &Search::default()).map_err(|e| e.to_string())?;
            ensure(
                r.upper_holds,
                format!("{name} n={size}: {} > {}", r.s_n, r.s_n_div),
            )?;
        }
        let r = sandwich_check(&n, 4, &Search::default()).map_err(|e| e.to_string())?;
        ensure(
            r.lower_holds && r.s_n >= r.s_m_div && r.lifted_count >= r.s_m_div,
            format!(
                "{name}: S_4 = {}, S_2(div) = {}, lift = {}",
                r.s_n, r.s_m_div, r.lifted_count
            ),
        )?;
        names.push(format!(
            "{name} (S_4={} >= {}, lift {})",
            r.s_n, r.s_m_div, r.lifted_count
        ));
    }
    ensure(
        !names.is_empty(),
        "no two-variable CFNF systems in the corpus",
    )?;
    Ok(names.join(", "))
}

fn thresholds() -> Result<String, String> {
    let mut notes = Vec::new();
    for (name, d, want) in [
        ("diamond", "3", "yes"),
        ("diamond", "4", "no"),
        ("fg", "1", "no"),
    ] {
        let (v, _) = report(&["threshold", &corpus_file(name), "-d", d])?;
        let got = &v["result"]["answer"];
        ensure(got == want, format!("{name} d={d}: {got}"))?;
        notes.push(format!("{name} d={d} -> {want}"));
    }
    Ok(notes.join(", "))
}

fn r1_decision() -> Result<String, String> {
    let mut notes = Vec::new();
    for (name, t) in corpus::dispersions() {
        let Ok(syntactic) = decide_perfect_r1(&t) else {
            continue;
        };
        let brute = check_perfect_fixed(&t, 2, &Search::default())
            .map_err(|e| e.to_string())?
            .perfect;
        ensure(
            syntactic == brute,
            format!("{name}: syntactic {syntactic}, brute {brute}"),
        )?;
        notes.push(format!("{name}={syntactic}"));
    }
    ensure(!notes.is_empty(), "no r=1 specs in the corpus")?;
    Ok(notes.join(", "))
}

fn determinism() -> Result<String, String> {
    let mut runs: Vec<Vec<String>> = Vec::new();
    for (name, t) in corpus::dispersions() {
        let f = corpus_file(name);
        runs.push(vec!["exponent".into(), f.clone(), "--certificate".into()]);
        runs.push(vec!["threshold".into(), f.clone(), "-d".into(), "1".into()]);
        if t.k() <= 4 {
            runs.push(vec![
                "brute".into(),
                "disp".into(),
                f.clone(),
                "-n".into(),
                "2".into(),
            ]);
            runs.push(vec![
                "brute".into(),
                "perfect".into(),
                f,
                "-n".into(),
                "2".into(),
            ]);
        }
    }
    runs.push(vec![
        "brute".into(),
        "disp".into(),
        corpus_file("diamond"),
        "-n".into(),
        "3".into(),
    ]);
    runs.push(vec![
        "brute".into(),
        "embed".into(),
        corpus_file("diamond"),
        "-n".into(),
        "2".into(),
    ]);
    for name in corpus::names(SourceKind::System) {
        let f = corpus_file(name);
        runs.push(vec!["normalize".into(), f.clone(), "--diversify".into()]);
        runs.push(vec!["graph".into(), f.clone()]);
        if name != "diamond_embedding" {
            runs.push(vec![
                "brute".into(),
                "solve".into(),
                f.clone(),
                "-n".into(),
                "2".into(),
            ]);
            runs.push(vec![
                "brute".into(),
                "guess".into(),
                f,
                "-n".into(),
                "2".into(),
            ]);
        }
    }
    runs.push(vec![
        "brute".into(),
        "sandwich".into(),
        corpus_file("two_cycle_sys"),
        "-n".into(),
        "4".into(),
    ]);
    for name in corpus::names(SourceKind::Graph) {
        runs.push(vec![
            "brute".into(),
            "guess".into(),
            corpus_file(name),
            "-n".into(),
            "2".into(),
        ]);
    }
    let mut compared = 0;
    for args in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let with = |jobs: &str| {
            let mut a = vec!["--jobs", jobs];
            a.extend(&args);
            termflow(&a)
        };
        let (c1, first, _) = with("1");
        let (c2, again, _) = with("1");
        let (c8, parallel, _) = with("8");
        ensure(
            c1 == c2 && c1 == c8 && first == again && first == parallel,
            format!("output differs for `{}`", args.join(" ")),
        )?;
        compared += 1;
    }
    Ok(format!(
        "{compared} commands byte-identical across reruns and --jobs 1/8"
    ))
}

type Criterion = (u32, &'static str, fn() -> Result<String, String>);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "diamond exponent", diamond_exponent),
        (2, "diamond imperfection", diamond_imperfection),
        (3, "cut upper bound", cut_upper_bound),
        (4, "embedding equality", embedding_equality),
        (5, "pipeline preservation", pipeline_preservation),
        (6, "guessing equality", guessing_equality),
        (7, "diversification sandwich", sandwich),
        (8, "threshold decisions", thresholds),
        (9, "r=1 syntactic decision", r1_decision),
        (10, "determinism", determinism),
    ];
    let mut failed = 0;
    for (id, title, check) in criteria {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_owned()));
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {title}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {title}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
