//! WebAssembly bindings for the browser demo.
//!
//! Every exported function takes source text and returns a JSON string. On
//! failure the JSON is `{"error": "..."}` so the page never has to catch a
//! JavaScript exception.

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use termflow_core::depgraph::dependency_graph;
use termflow_core::flownet::{build_dag, build_network, max_flow, DagNode, EdgeKind, FlowNetwork};
use termflow_core::normalize::{diversify, pipeline};
use termflow_core::oracle::{brute_dispersion, Search, SearchBudget};
use termflow_core::term::{parse_dispersion, parse_system, render};

/// Exhaustive searches in the page run on one thread, so they get a smaller
/// limit than the command-line tool.
pub const WEB_BUDGET: SearchBudget = SearchBudget {
    max_evaluations: 1 << 22,
    max_interpretations: 1 << 20,
};

#[derive(Debug, Serialize)]
struct PlacedNode {
    id: usize,
    label: String,
    kind: &'static str,
    layer: usize,
    slot: usize,
    /// Unit capacity of this node is part of the min cut.
    cut: bool,
    flow: u32,
}

#[derive(Debug, Serialize)]
struct PlacedEdge {
    from: usize,
    to: usize,
    flow: u32,
}

#[derive(Debug, Serialize)]
struct PlacedOutput {
    coordinate: usize,
    root: usize,
    cut: bool,
}

/// Flow analysis of a dispersion spec, laid out for drawing: DAG nodes are
/// assigned to layers by height, inputs on layer 0.
pub fn analyze_inner(source: &str) -> Result<Value, String> {
    let t = parse_dispersion(source).map_err(|e| e.to_string())?;
    let dag = build_dag(&t);
    let net = build_network(&dag);
    let result = max_flow(&net);

    let nodes = dag.nodes();
    let mut layer = vec![0usize; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        if let DagNode::Apply { children, .. } = node {
            layer[i] = 1 + children.iter().map(|&c| layer[c]).max().unwrap_or(0);
        }
    }
    let mut filled = vec![0usize; layer.iter().max().map_or(0, |m| m + 1)];

    let mut node_cut = vec![false; nodes.len()];
    let mut drain_cut = Vec::new();
    for c in &result.min_cut {
        let e = &net.edges[c.edge];
        match (c.kind, e.dag_node) {
            (EdgeKind::Bottleneck, Some(v)) => node_cut[v] = true,
            (EdgeKind::Drain, Some(v)) => drain_cut.push(v),
            _ => {}
        }
    }
    let mut node_flow = vec![0u32; nodes.len()];
    let mut edges = Vec::new();
    for (i, e) in net.edges.iter().enumerate() {
        match (e.kind, e.dag_node) {
            (EdgeKind::Bottleneck, Some(v)) => node_flow[v] = result.edge_flows[i],
            (EdgeKind::Wiring, _) => edges.push(PlacedEdge {
                from: FlowNetwork::dag_node_of(e.from).expect("wiring joins split nodes"),
                to: FlowNetwork::dag_node_of(e.to).expect("wiring joins split nodes"),
                flow: result.edge_flows[i],
            }),
            _ => {}
        }
    }

    let placed: Vec<PlacedNode> = nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let slot = filled[layer[i]];
            filled[layer[i]] += 1;
            PlacedNode {
                id: i,
                label: dag.label(i).to_owned(),
                kind: match node {
                    DagNode::Input(_) => "input",
                    DagNode::Apply { .. } => "apply",
                },
                layer: layer[i],
                slot,
                cut: node_cut[i],
                flow: node_flow[i],
            }
        })
        .collect();
    let outputs: Vec<PlacedOutput> = dag
        .outputs()
        .iter()
        .enumerate()
        .map(|(coordinate, &root)| PlacedOutput {
            coordinate,
            root,
            cut: drain_cut.contains(&root),
        })
        .collect();

    Ok(json!({
        "exponent": result.exponent,
        "k": t.k(),
        "r": t.r(),
        "full_rate": result.exponent as usize == t.r(),
        "nodes": placed,
        "edges": edges,
        "outputs": outputs,
        "layers": filled,
        "min_cut": result.min_cut.iter().map(|c| c.label.clone()).collect::<Vec<_>>(),
        "network": { "nodes": net.nodes.len(), "edges": net.edges.len() },
    }))
}

/// Exact maximum image size at alphabet size `n`, next to the bounds the
/// exponent gives.
pub fn brute_inner(source: &str, n: u32) -> Result<Value, String> {
    let t = parse_dispersion(source).map_err(|e| e.to_string())?;
    let search = Search {
        budget: WEB_BUDGET,
        jobs: 1,
    };
    let r = brute_dispersion(&t, n, &search).map_err(|e| e.to_string())?;
    let d = max_flow(&build_network(&build_dag(&t))).exponent;
    let tables: serde_json::Map<String, Value> = r
        .witness
        .tables()
        .iter()
        .map(|(name, table)| (name.clone(), json!(table.values)))
        .collect();
    Ok(json!({
        "n": n,
        "value": r.value,
        "exponent": d,
        "cut_bound": u64::from(n).checked_pow(d),
        "total": u64::from(n).checked_pow(t.r() as u32),
        "witness": tables,
        "witness_index": r.witness_index,
        "interpretations": r.interpretations,
    }))
}

/// Runs the normalization pipeline on an instance.
pub fn normalize_inner(source: &str) -> Result<Value, String> {
    let s = parse_system(source).map_err(|e| e.to_string())?;
    let (n, rep) = pipeline(&s);
    let graph = dependency_graph(&n).ok().map(|g| {
        json!({
            "vertices": g.vertices(),
            "sources": g.source_names().collect::<Vec<_>>(),
            "edges": g.edge_names().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
        })
    });
    Ok(json!({
        "normal_form": render(&n.to_term_system()),
        "diversified": render(&diversify(&n).to_term_system()),
        "stages": rep.stages,
        "merges": rep.merges,
        "collisions": rep.collisions,
        "classification": rep.classification,
        "dependency_graph": graph,
    }))
}

fn respond(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

#[wasm_bindgen]
pub fn analyze(source: &str) -> String {
    respond(analyze_inner(source))
}

#[wasm_bindgen]
pub fn brute(source: &str, n: u32) -> String {
    respond(brute_inner(source, n))
}

#[wasm_bindgen]
pub fn normalize(source: &str) -> String {
    respond(normalize_inner(source))
}

#[wasm_bindgen]
pub fn example(name: &str) -> String {
    termflow_core::corpus::get(name).unwrap_or("").to_owned()
}
