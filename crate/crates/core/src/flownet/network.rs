use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::dag::{DagNode, TermDag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetNodeKind {
    Source,
    Sink,
    /// Entry half of a split DAG node.
    In(usize),
    /// Exit half of a split DAG node.
    Out(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetNode {
    pub label: String,
    pub kind: NetNodeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// Super-source into an input node.
    Supply,
    /// Unit capacity between the halves of a DAG node.
    Bottleneck,
    /// Argument node into the application using it.
    Wiring,
    /// Output root into the super-sink.
    Drain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetEdge {
    pub from: usize,
    pub to: usize,
    pub capacity: u32,
    pub kind: EdgeKind,
    /// DAG node the edge belongs to (bottleneck and drain edges).
    pub dag_node: Option<usize>,
}

/// Capacitated network with node 0 the super-source and node 1 the super-sink.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowNetwork {
    pub nodes: Vec<NetNode>,
    pub edges: Vec<NetEdge>,
    pub source: usize,
    pub sink: usize,
    /// Finite stand-in for unbounded capacity: `r + 1`.
    pub infinity: u32,
}

impl FlowNetwork {
    pub fn in_node(dag_node: usize) -> usize {
        2 + 2 * dag_node
    }

    pub fn out_node(dag_node: usize) -> usize {
        3 + 2 * dag_node
    }

    /// The DAG node a split half belongs to; `None` for the source and sink.
    pub fn dag_node_of(net_node: usize) -> Option<usize> {
        net_node.checked_sub(2).map(|i| i / 2)
    }

    /// Number of split DAG nodes.
    pub fn split_nodes(&self) -> usize {
        (self.nodes.len() - 2) / 2
    }

    pub fn edge_label(&self, e: usize) -> String {
        let edge = &self.edges[e];
        match (edge.kind, edge.dag_node) {
            (EdgeKind::Bottleneck, Some(d)) => {
                format!("node:{}", self.nodes[Self::in_node(d)].label)
            }
            (EdgeKind::Drain, Some(d)) => format!("sink:{}", self.nodes[Self::out_node(d)].label),
            _ => format!(
                "{}->{}",
                self.nodes[edge.from].label, self.nodes[edge.to].label
            ),
        }
    }

    /// Graphviz rendering; `highlight` edges are drawn bold red.
    pub fn to_dot(&self, highlight: &[usize]) -> String {
        let mut out = String::from("digraph N {\n  rankdir=LR;\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let name = match n.kind {
                NetNodeKind::Source => "s".to_owned(),
                NetNodeKind::Sink => "t".to_owned(),
                NetNodeKind::In(_) => format!("{}:in", n.label),
                NetNodeKind::Out(_) => format!("{}:out", n.label),
            };
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", name.replace('"', "\\\""));
        }
        for (i, e) in self.edges.iter().enumerate() {
            let cap = if e.capacity >= self.infinity {
                "inf".to_owned()
            } else {
                e.capacity.to_string()
            };
            let style = if highlight.contains(&i) {
                ", color=red, penwidth=2"
            } else {
                ""
            };
            let _ = writeln!(out, "  n{} -> n{} [label=\"{cap}\"{style}];", e.from, e.to);
        }
        out.push_str("}\n");
        out
    }
}

/// Splits every DAG node into `in -> out` with capacity 1, wires arguments to
/// applications with unbounded capacity, feeds inputs from the super-source
/// and drains each distinct output root into the super-sink with capacity 1.
pub fn build_network(dag: &TermDag) -> FlowNetwork {
    let infinity = dag.outputs().len() as u32 + 1;
    let mut nodes = vec![
        NetNode {
            label: "s".into(),
            kind: NetNodeKind::Source,
        },
        NetNode {
            label: "t".into(),
            kind: NetNodeKind::Sink,
        },
    ];
    for i in 0..dag.nodes().len() {
        nodes.push(NetNode {
            label: dag.label(i).to_owned(),
            kind: NetNodeKind::In(i),
        });
        nodes.push(NetNode {
            label: dag.label(i).to_owned(),
            kind: NetNodeKind::Out(i),
        });
    }
    let mut edges = Vec::new();
    for (i, node) in dag.nodes().iter().enumerate() {
        match node {
            DagNode::Input(_) => edges.push(NetEdge {
                from: 0,
                to: FlowNetwork::in_node(i),
                capacity: infinity,
                kind: EdgeKind::Supply,
                dag_node: None,
            }),
            DagNode::Apply { children, .. } => {
                let mut seen = Vec::new();
                for &c in children {
                    if seen.contains(&c) {
                        continue;
                    }
                    seen.push(c);
                    edges.push(NetEdge {
                        from: FlowNetwork::out_node(c),
                        to: FlowNetwork::in_node(i),
                        capacity: infinity,
                        kind: EdgeKind::Wiring,
                        dag_node: None,
                    });
                }
            }
        }
        edges.push(NetEdge {
            from: FlowNetwork::in_node(i),
            to: FlowNetwork::out_node(i),
            capacity: 1,
            kind: EdgeKind::Bottleneck,
            dag_node: Some(i),
        });
    }
    for root in dag.distinct_roots() {
        edges.push(NetEdge {
            from: FlowNetwork::out_node(root),
            to: 1,
            capacity: 1,
            kind: EdgeKind::Drain,
            dag_node: Some(root),
        });
    }
    FlowNetwork {
        nodes,
        edges,
        source: 0,
        sink: 1,
        infinity,
    }
}
