use std::path::Path;

use serde_json::{json as j, Value};
use thiserror::Error;

use termflow_core::depgraph::{add_source_loops, dependency_graph, to_dot, DependencyGraph};
use termflow_core::flownet::{
    build_dag, build_network, decide_perfect_r1, decide_threshold, max_flow, CutCertificate,
};
use termflow_core::normalize::{diversify, pipeline};
use termflow_core::oracle::{
    brute_dispersion, brute_guessing, brute_max_solutions, check_embedding, check_perfect_fixed,
    check_solutions_equal_winning, sandwich_check, OracleError, Search, SearchBudget,
};
use termflow_core::term::{parse, render, DispersionSpec, Parsed, SourceKind, TermSystem};

use crate::report::{digest, json, object, Report, TOOL_VERSION};
use crate::BruteKind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Usage(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Budget(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Usage(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Budget { .. } => CliError::Budget(e.to_string()),
            OracleError::Interpretation(_) => CliError::Internal(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

/// A report plus the exit status to finish with.
pub struct Outcome {
    pub report: Report,
    pub exit: u8,
    pub note: Option<String>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome {
            report,
            exit: 0,
            note: None,
        }
    }
}

struct Input {
    path: String,
    digest: String,
    parsed: Parsed,
}

fn load(path: &Path, want: &[SourceKind]) -> Result<Input, CliError> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{shown}: {e}")))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Input(format!("{shown}: not valid UTF-8")))?;
    let parsed = parse(&text, None).map_err(|e| CliError::Input(format!("{shown}:{e}")))?;
    if !want.contains(&parsed.kind()) {
        let names: Vec<&str> = want.iter().map(|k| kind_name(*k)).collect();
        return Err(CliError::Input(format!(
            "{shown}: expected {}, found {}",
            names.join(" or "),
            kind_name(parsed.kind())
        )));
    }
    Ok(Input {
        path: shown,
        digest: digest(&bytes),
        parsed,
    })
}

fn kind_name(k: SourceKind) -> &'static str {
    match k {
        SourceKind::System => "an instance",
        SourceKind::Dispersion => "a dispersion spec",
        SourceKind::Graph => "a graph",
    }
}

fn system(input: &Input) -> &TermSystem {
    match &input.parsed {
        Parsed::System(s) => s,
        _ => unreachable!("kind checked on load"),
    }
}

fn dispersion(input: &Input) -> &DispersionSpec {
    match &input.parsed {
        Parsed::Dispersion(t) => t,
        _ => unreachable!("kind checked on load"),
    }
}

fn report(command: &str, input: &Input, parameters: Value, result: Value) -> Report {
    let mut parameters = parameters;
    parameters["file"] = j!(input.path);
    Report {
        command: command.to_owned(),
        input_digest: input.digest.clone(),
        parameters,
        result,
        tool_version: TOOL_VERSION,
        timing_ms: None,
    }
}

fn write_dot(path: &Path, text: &str) -> Result<Value, CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
    Ok(j!(path.display().to_string()))
}

fn graph_json(g: &DependencyGraph) -> Value {
    j!({
        "vertices": g.vertices(),
        "sources": g.source_names().collect::<Vec<_>>(),
        "edges": g.edge_names().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
    })
}

pub fn normalize(
    file: &Path,
    fnf_check: bool,
    with_diversified: bool,
    dot: Option<&Path>,
) -> Result<Outcome, CliError> {
    let input = load(file, &[SourceKind::System])?;
    let s = system(&input);
    let (n, rep) = pipeline(s);
    let c = &rep.classification;
    let graph = dependency_graph(&n).ok();
    let dot_written = match (dot, &graph) {
        (None, _) => None,
        (Some(path), Some(g)) => Some(write_dot(path, &to_dot(g))?),
        (Some(_), None) => {
            return Err(CliError::Precondition(
                "a dependency graph needs functional normal form".into(),
            ))
        }
    };
    let diversified = with_diversified.then(|| {
        let d = diversify(&n);
        j!({
            "system": render(&d.to_term_system()),
            "is_diversified": d.is_diversified(),
        })
    });
    let origins: serde_json::Map<String, Value> = n
        .origin_map
        .iter()
        .map(|(z, t)| (z.clone(), j!(t.to_string())))
        .collect();
    let result = object([
        ("input_size", Some(j!(s.instance_size()))),
        ("normal_form", Some(j!(render(&n.to_term_system())))),
        ("variables", Some(j!(n.variables))),
        (
            "equations",
            Some(j!(n
                .equations
                .iter()
                .map(|e| e.to_equation().to_string())
                .collect::<Vec<_>>())),
        ),
        ("auxiliaries", Some(j!(rep.auxiliaries))),
        ("origins", Some(Value::Object(origins))),
        ("stages", Some(json(&rep.stages))),
        ("merges", Some(json(&rep.merges))),
        ("collisions", Some(j!(rep.collisions))),
        ("classification", Some(json(c))),
        ("dependency_graph", graph.as_ref().map(graph_json)),
        ("diversified", diversified),
        ("dot", dot_written),
    ]);
    let params = j!({ "fnf_check": fnf_check, "diversify": with_diversified });
    let report = report("normalize", &input, params, result);
    if fnf_check && !c.is_fnf {
        return Ok(Outcome {
            report,
            exit: 3,
            note: Some("instance is not in functional normal form".into()),
        });
    }
    Ok(Outcome::ok(report))
}

pub fn exponent(file: &Path, certificate: bool, dot: Option<&Path>) -> Result<Outcome, CliError> {
    let input = load(file, &[SourceKind::Dispersion])?;
    let t = dispersion(&input);
    let dag = build_dag(t);
    let net = build_network(&dag);
    let r = max_flow(&net);
    let cut_ids: Vec<usize> = r.min_cut.iter().map(|c| c.edge).collect();
    let dot_written = dot
        .map(|p| write_dot(p, &net.to_dot(&cut_ids)))
        .transpose()?;
    let cert = certificate.then(|| CutCertificate::new(&net, &r));
    let result = object([
        ("exponent", Some(j!(r.exponent))),
        ("max_flow_value", Some(j!(r.max_flow_value))),
        ("k", Some(j!(t.k()))),
        ("r", Some(j!(t.r()))),
        ("instance_size", Some(j!(t.instance_size()))),
        (
            "dag",
            Some(j!({ "inputs": dag.input_count(), "operations": dag.apply_count() })),
        ),
        (
            "network",
            Some(j!({
                "nodes": net.nodes.len(),
                "edges": net.edges.len(),
                "infinity": net.infinity,
            })),
        ),
        ("min_cut", certificate.then(|| json(&r.min_cut))),
        ("certificate_valid", cert.as_ref().map(|c| j!(c.verify()))),
        ("certificate", cert.map(json)),
        ("dot", dot_written),
    ]);
    let params = j!({ "certificate": certificate });
    Ok(Outcome::ok(report("exponent", &input, params, result)))
}

pub fn threshold(file: &Path, d: u32) -> Result<Outcome, CliError> {
    let input = load(file, &[SourceKind::Dispersion])?;
    let decision = decide_threshold(dispersion(&input), d);
    let result = j!({
        "answer": if decision.yes { "yes" } else { "no" },
        "yes": decision.yes,
        "d": decision.d,
        "exponent": decision.exponent,
        "criterion": decision.criterion,
        "min_cut": decision.min_cut.iter().map(|c| c.label.clone()).collect::<Vec<_>>(),
    });
    Ok(Outcome::ok(report(
        "threshold",
        &input,
        j!({ "d": d }),
        result,
    )))
}

fn graph_of(input: &Input) -> Result<(DependencyGraph, &'static str), CliError> {
    match &input.parsed {
        Parsed::Graph(g) => Ok((g.clone(), "graph")),
        Parsed::System(s) => {
            let n = pipeline(s).0;
            dependency_graph(&n)
                .map(|g| (g, "instance"))
                .map_err(|e| CliError::Precondition(e.to_string()))
        }
        Parsed::Dispersion(_) => unreachable!("kind checked on load"),
    }
}

pub fn graph(file: &Path, loops: bool, dot: Option<&Path>) -> Result<Outcome, CliError> {
    let input = load(file, &[SourceKind::Graph, SourceKind::System])?;
    let (mut g, origin) = graph_of(&input)?;
    if loops {
        g = add_source_loops(&g);
    }
    let dot_written = dot.map(|p| write_dot(p, &to_dot(&g))).transpose()?;
    let mut result = graph_json(&g);
    result["from"] = j!(origin);
    result["guessers"] = j!(g.guessers().count());
    if let Some(p) = dot_written {
        result["dot"] = p;
    }
    Ok(Outcome::ok(report(
        "graph",
        &input,
        j!({ "loops": loops }),
        result,
    )))
}

pub fn brute(
    kind: BruteKind,
    file: &Path,
    n: u32,
    budget: SearchBudget,
    jobs: usize,
) -> Result<Outcome, CliError> {
    let search = Search { budget, jobs };
    let want: &[SourceKind] = match kind {
        BruteKind::Disp | BruteKind::Perfect | BruteKind::Embed => &[SourceKind::Dispersion],
        BruteKind::Solve | BruteKind::Sandwich => &[SourceKind::System],
        BruteKind::Guess => &[SourceKind::Graph, SourceKind::System],
    };
    let input = load(file, want)?;
    let result = match kind {
        BruteKind::Disp => {
            let t = dispersion(&input);
            let mut v = json(brute_dispersion(t, n, &search)?);
            v["bound"] = j!(format!("n^r = {}^{}", n, t.r()));
            v
        }
        BruteKind::Perfect => {
            let t = dispersion(&input);
            let mut v = json(check_perfect_fixed(t, n, &search)?);
            if let Ok(yes) = decide_perfect_r1(t) {
                v["syntactic_r1"] = j!(yes);
            }
            v
        }
        BruteKind::Solve => json(brute_max_solutions(system(&input), n, &search)?),
        BruteKind::Guess => match &input.parsed {
            Parsed::Graph(g) => json(brute_guessing(g, n, &search)?),
            _ => {
                let normal = pipeline(system(&input)).0;
                if !normal.is_normal() || dependency_graph(&normal).is_err() {
                    return Err(CliError::Precondition(
                        "instance is not in functional normal form".into(),
                    ));
                }
                json(check_solutions_equal_winning(
                    &diversify(&normal),
                    n,
                    &search,
                )?)
            }
        },
        BruteKind::Embed => json(check_embedding(dispersion(&input), n, &search)?),
        BruteKind::Sandwich => {
            let normal = pipeline(system(&input)).0;
            json(sandwich_check(&normal, n, &search)?)
        }
    };
    let params = j!({
        "n": n,
        "budget": {
            "max_evaluations": budget.max_evaluations,
            "max_interpretations": budget.max_interpretations,
        },
    });
    Ok(Outcome::ok(report(
        &format!("brute {}", kind.name()),
        &input,
        params,
        result,
    )))
}
