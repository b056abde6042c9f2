//! Compilation of a dispersion spec to a unit-capacity flow network, and the
//! exponent and decision procedures built on its max flow.
//!
//! Every DAG node, input or application, is split into an `in`/`out` pair
//! joined by a unit-capacity bottleneck. The min cut returned with the flow
//! is the one closest to the sink: the cut edges leave the set of nodes that
//! cannot reach the sink in the final residual graph. It is unique for a
//! given network, independent of the order in which paths were augmented.

mod dag;
mod maxflow;
mod network;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::DispersionSpec;

pub use dag::{build_dag, DagNode, TermDag};
pub use network::{build_network, EdgeKind, FlowNetwork, NetEdge, NetNode, NetNodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("the syntactic perfect-dispersion decision needs exactly one output, found {0}")]
    NotSingleOutput(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutEdge {
    pub edge: usize,
    pub kind: EdgeKind,
    pub label: String,
    pub capacity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentResult {
    pub exponent: u32,
    pub max_flow_value: u32,
    pub min_cut: Vec<CutEdge>,
    /// Flow on each network edge, indexed like `FlowNetwork::edges`.
    pub edge_flows: Vec<u32>,
}

/// Integral max flow from the super-source to the super-sink, with the
/// sink-side canonical min cut.
pub fn max_flow(net: &FlowNetwork) -> ExponentResult {
    let mut dinic = maxflow::Dinic::new(net);
    let value = dinic.run(net.source, net.sink);
    let edge_flows = dinic.edge_flows(net);
    let sink_side = dinic.sink_side(net.sink);
    let min_cut = net
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| !sink_side[e.from] && sink_side[e.to])
        .map(|(i, e)| CutEdge {
            edge: i,
            kind: e.kind,
            label: net.edge_label(i),
            capacity: e.capacity,
        })
        .collect();
    ExponentResult {
        exponent: value,
        max_flow_value: value,
        min_cut,
        edge_flows,
    }
}

pub fn dispersion_exponent(t: &DispersionSpec) -> ExponentResult {
    max_flow(&build_network(&build_dag(t)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdDecision {
    pub d: u32,
    pub yes: bool,
    pub criterion: String,
    pub exponent: u32,
    pub min_cut: Vec<CutEdge>,
}

/// Answers whether the image size eventually exceeds every function strictly
/// between `n^d` and `n^(d+1)`: yes exactly when `D >= d + 1`.
pub fn decide_threshold(t: &DispersionSpec, d: u32) -> ThresholdDecision {
    let r = dispersion_exponent(t);
    let yes = u64::from(r.exponent) > u64::from(d);
    ThresholdDecision {
        d,
        yes,
        criterion: format!("D >= d + 1: {} >= {}", r.exponent, u64::from(d) + 1),
        exponent: r.exponent,
        min_cut: r.min_cut,
    }
}

/// With a single output, some interpretation is surjective for every `n`
/// exactly when the output term mentions an input.
pub fn decide_perfect_r1(t: &DispersionSpec) -> Result<bool, FlowError> {
    match t.outputs() {
        [only] => Ok(only.contains_var()),
        outs => Err(FlowError::NotSingleOutput(outs.len())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateNode {
    pub id: usize,
    pub label: String,
    pub kind: NetNodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEdge {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    pub capacity: u32,
    pub flow: u32,
    pub saturated: bool,
    pub in_cut: bool,
}

/// Machine-checkable record of a max flow and its min cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCertificate {
    pub source: usize,
    pub sink: usize,
    pub infinity: u32,
    pub value: u32,
    pub nodes: Vec<CertificateNode>,
    pub edges: Vec<CertificateEdge>,
}

impl CutCertificate {
    pub fn new(net: &FlowNetwork, result: &ExponentResult) -> Self {
        let nodes = net
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| CertificateNode {
                id,
                label: n.label.clone(),
                kind: n.kind,
            })
            .collect();
        let edges = net
            .edges
            .iter()
            .enumerate()
            .map(|(id, e)| CertificateEdge {
                id,
                from: e.from,
                to: e.to,
                kind: e.kind,
                capacity: e.capacity,
                flow: result.edge_flows[id],
                saturated: result.edge_flows[id] == e.capacity,
                in_cut: result.min_cut.iter().any(|c| c.edge == id),
            })
            .collect();
        CutCertificate {
            source: net.source,
            sink: net.sink,
            infinity: net.infinity,
            value: result.max_flow_value,
            nodes,
            edges,
        }
    }

    /// Checks conservation, capacity bounds, that the cut edges are saturated
    /// and separate source from sink, and that cut capacity equals the value.
    pub fn verify(&self) -> bool {
        let mut balance = vec![0i64; self.nodes.len()];
        for e in &self.edges {
            if e.flow > e.capacity {
                return false;
            }
            balance[e.from] -= i64::from(e.flow);
            balance[e.to] += i64::from(e.flow);
        }
        let conserved = balance
            .iter()
            .enumerate()
            .all(|(v, &b)| v == self.source || v == self.sink || b == 0);
        if !conserved || balance[self.sink] != i64::from(self.value) {
            return false;
        }
        let cut: Vec<&CertificateEdge> = self.edges.iter().filter(|e| e.in_cut).collect();
        if cut.iter().any(|e| !e.saturated) {
            return false;
        }
        let capacity: u64 = cut.iter().map(|e| u64::from(e.capacity)).sum();
        if capacity != u64::from(self.value) {
            return false;
        }
        // the sink must be unreachable from the source once cut edges are removed
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.source];
        seen[self.source] = true;
        while let Some(u) = stack.pop() {
            for e in self.edges.iter().filter(|e| e.from == u && !e.in_cut) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        !seen[self.sink]
    }
}
