use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::term::{DispersionSpec, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DagNode {
    Input(String),
    Apply {
        symbol: String,
        children: Vec<usize>,
    },
}

/// Output terms with identical subterms stored once. Children always precede
/// their parents, so node order is a topological order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDag {
    nodes: Vec<DagNode>,
    labels: Vec<String>,
    outputs: Vec<usize>,
}

impl TermDag {
    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    /// Root node of each output coordinate.
    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn input_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, DagNode::Input(_)))
            .count()
    }

    pub fn apply_count(&self) -> usize {
        self.nodes.len() - self.input_count()
    }

    /// Distinct roots in order of first attachment.
    pub fn distinct_roots(&self) -> Vec<usize> {
        let mut roots = Vec::new();
        for &o in &self.outputs {
            if !roots.contains(&o) {
                roots.push(o);
            }
        }
        roots
    }
}

/// Hash-conses the output terms. Inputs that no output mentions get no node.
pub fn build_dag(t: &DispersionSpec) -> TermDag {
    let mut dag = TermDag {
        nodes: Vec::new(),
        labels: Vec::new(),
        outputs: Vec::new(),
    };
    let mut inputs = HashMap::new();
    for x in t.inputs() {
        if t.outputs()
            .iter()
            .any(|o| o.variables().contains(&x.as_str()))
        {
            inputs.insert(x.as_str(), dag.nodes.len());
            dag.nodes.push(DagNode::Input(x.clone()));
            dag.labels.push(x.clone());
        }
    }
    let mut shared: HashMap<(String, Vec<usize>), usize> = HashMap::new();
    fn intern(
        t: &Term,
        dag: &mut TermDag,
        inputs: &HashMap<&str, usize>,
        shared: &mut HashMap<(String, Vec<usize>), usize>,
    ) -> usize {
        match t {
            Term::Var(v) => inputs[v.as_str()],
            Term::App(f, args) => {
                let children: Vec<usize> = args
                    .iter()
                    .map(|a| intern(a, dag, inputs, shared))
                    .collect();
                let key = (f.clone(), children);
                if let Some(&id) = shared.get(&key) {
                    return id;
                }
                let id = dag.nodes.len();
                dag.nodes.push(DagNode::Apply {
                    symbol: key.0.clone(),
                    children: key.1.clone(),
                });
                dag.labels.push(t.to_string());
                shared.insert(key, id);
                id
            }
        }
    }
    for o in t.outputs() {
        let root = intern(o, &mut dag, &inputs, &mut shared);
        dag.outputs.push(root);
    }
    dag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_dispersion;

    fn dag(text: &str) -> TermDag {
        build_dag(&parse_dispersion(text).unwrap())
    }

    #[test]
    fn diamond_nodes() {
        let d =
            dag("dispersion { inputs x,y,z,w; sig f/2; outputs f(x,y), f(x,z), f(y,w), f(z,w); }");
        assert_eq!(d.input_count(), 4);
        assert_eq!(d.apply_count(), 4);
        assert_eq!(d.outputs(), [4, 5, 6, 7]);
    }

    #[test]
    fn identical_outputs_share_a_root() {
        let d = dag("dispersion { inputs x; sig f/1; outputs f(x), f(x); }");
        assert_eq!(d.input_count(), 1);
        assert_eq!(d.apply_count(), 1);
        assert_eq!(d.outputs(), [1, 1]);
        assert_eq!(d.distinct_roots(), [1]);
    }

    #[test]
    fn shared_subterm() {
        let d = dag("dispersion { inputs x; sig f/1, g/1; outputs f(g(x)), g(x); }");
        assert_eq!(d.apply_count(), 2);
        assert_eq!(d.label(1), "g(x)");
        assert_eq!(d.outputs(), [2, 1]);
        assert_eq!(
            d.nodes()[2],
            DagNode::Apply {
                symbol: "f".into(),
                children: vec![1]
            }
        );
    }

    #[test]
    fn unused_inputs_get_no_node() {
        let d = dag("dispersion { inputs x, y; sig c/0; outputs c(); }");
        assert_eq!(d.input_count(), 0);
        assert_eq!(d.nodes().len(), 1);
    }
}
