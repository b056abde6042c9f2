//! Dependency digraphs of functional normal-form systems and the guessing
//! games played on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::{classify, NormalSystem};
use crate::term::WellFormedError;

/// A digraph on named vertices with a designated source set. Edges form a set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyGraph {
    vertices: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
    sources: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DepGraphError {
    #[error("system is not in functional normal form: {0}")]
    NotFnf(String),
}

impl DependencyGraph {
    pub fn from_names(
        vertices: Vec<String>,
        sources: Vec<String>,
        edges: Vec<(String, String)>,
    ) -> Result<Self, WellFormedError> {
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(WellFormedError::DuplicateVertex(v.clone()));
            }
        }
        let lookup = |name: &String| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| WellFormedError::UnknownVertex(name.clone()))
        };
        let sources = sources.iter().map(lookup).collect::<Result<_, _>>()?;
        let edges = edges
            .iter()
            .map(|(u, v)| Ok((lookup(u)?, lookup(v)?)))
            .collect::<Result<_, WellFormedError>>()?;
        Ok(DependencyGraph {
            vertices,
            edges,
            sources,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn sources(&self) -> &BTreeSet<usize> {
        &self.sources
    }

    pub fn is_source(&self, v: usize) -> bool {
        self.sources.contains(&v)
    }

    pub fn source_names(&self) -> impl Iterator<Item = &str> {
        self.sources.iter().map(|&i| self.vertices[i].as_str())
    }

    pub fn edge_names(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges
            .iter()
            .map(|&(u, v)| (self.vertices[u].as_str(), self.vertices[v].as_str()))
    }

    /// In-neighbours of `v` in vertex order.
    pub fn in_neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|&&(_, w)| w == v)
            .map(|&(u, _)| u)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Vertices that must guess, in vertex order.
    pub fn guessers(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|v| !self.sources.contains(v))
    }
}

/// Dependency graph of an FNF system: an edge from every argument variable
/// to the variable its equation defines; sources are the undefined variables.
pub fn dependency_graph(n: &NormalSystem) -> Result<DependencyGraph, DepGraphError> {
    let c = classify(n);
    if !c.is_fnf {
        let reason = if !c.is_normal {
            "pending variable equalities".to_owned()
        } else {
            let mut seen = BTreeSet::new();
            let dup = n
                .equations
                .iter()
                .find(|e| !seen.insert(e.defined.as_str()))
                .map(|e| e.defined.clone())
                .unwrap_or_default();
            format!("variable `{dup}` has more than one defining equation")
        };
        return Err(DepGraphError::NotFnf(reason));
    }
    let edges = n
        .equations
        .iter()
        .flat_map(|e| e.args.iter().map(move |u| (u.clone(), e.defined.clone())))
        .collect();
    Ok(
        DependencyGraph::from_names(n.variables.clone(), c.sources, edges)
            .expect("variables of a normal system are distinct"),
    )
}

/// Turns every source into a non-source with an identity self-loop.
pub fn add_source_loops(g: &DependencyGraph) -> DependencyGraph {
    let mut edges = g.edges.clone();
    edges.extend(g.sources.iter().map(|&s| (s, s)));
    DependencyGraph {
        vertices: g.vertices.clone(),
        edges,
        sources: BTreeSet::new(),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering; sources are drawn as filled boxes.
pub fn to_dot(g: &DependencyGraph) -> String {
    let mut out = String::from("digraph G {\n");
    for (i, v) in g.vertices.iter().enumerate() {
        if g.is_source(i) {
            let _ = writeln!(
                out,
                "  {} [shape=box, style=filled, fillcolor=lightgray];",
                quote(v)
            );
        } else {
            let _ = writeln!(out, "  {};", quote(v));
        }
    }
    for (u, v) in g.edge_names() {
        let _ = writeln!(out, "  {} -> {};", quote(u), quote(v));
    }
    out.push_str("}\n");
    out
}

/// Local guessing functions: for each non-source vertex a table indexed by
/// the values of its in-neighbours (in vertex order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessingStrategy {
    pub n: u32,
    pub tables: BTreeMap<String, Vec<u32>>,
}

impl GuessingStrategy {
    /// Number of configurations on which every guess is correct.
    pub fn winning_count(&self, g: &DependencyGraph) -> u64 {
        let guessers: Vec<(usize, Vec<usize>, &Vec<u32>)> = g
            .guessers()
            .map(|v| (v, g.in_neighbors(v), &self.tables[&g.vertices[v]]))
            .collect();
        let mut wins = 0;
        crate::term::for_each_tuple(self.n, g.len(), |config| {
            let ok = guessers.iter().all(|(v, ins, table)| {
                let args: Vec<u32> = ins.iter().map(|&u| config[u]).collect();
                table[crate::term::Table::row(self.n, &args)] == config[*v]
            });
            if ok {
                wins += 1;
            }
        });
        wins
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::pipeline;
    use crate::term::{parse_graph, parse_system};

    fn graph_of(text: &str) -> DependencyGraph {
        dependency_graph(&pipeline(&parse_system(text).unwrap()).0).unwrap()
    }

    #[test]
    fn binary_equation() {
        let g = graph_of("instance { vars x, y, z; sig f/2; eq f(x, y) = z; }");
        assert_eq!(g.edge_names().collect::<Vec<_>>(), [("x", "z"), ("y", "z")]);
        assert_eq!(g.source_names().collect::<Vec<_>>(), ["x", "y"]);
    }

    #[test]
    fn two_cycle_has_no_sources() {
        let g = graph_of("instance { vars x, y; sig f/1; eq f(x) = y; eq f(y) = x; }");
        assert_eq!(g.edge_count(), 2);
        assert!(g.sources().is_empty());
    }

    #[test]
    fn repeated_arguments_give_one_edge() {
        let g = graph_of("instance { vars x, y; sig f/2; eq f(x, x) = y; }");
        assert_eq!(g.edge_names().collect::<Vec<_>>(), [("x", "y")]);
    }

    #[test]
    fn non_fnf_rejected() {
        let n = pipeline(
            &parse_system("instance { vars x, y, z; sig f/1, g/1; eq f(x) = y; eq g(z) = y; }")
                .unwrap(),
        )
        .0;
        assert!(matches!(
            dependency_graph(&n),
            Err(DepGraphError::NotFnf(_))
        ));
    }

    #[test]
    fn source_loops() {
        let g = parse_graph("graph { nodes x; sources x; }").unwrap();
        let l = add_source_loops(&g);
        assert_eq!(l.edge_names().collect::<Vec<_>>(), [("x", "x")]);
        assert!(l.sources().is_empty());

        let g = parse_graph("graph { nodes a, b; sources ; edge a -> b; }").unwrap();
        assert_eq!(add_source_loops(&g), g);
    }

    #[test]
    fn dot_output() {
        let g = parse_graph("graph { nodes a, b; sources ; edge a -> b; edge b -> a; }").unwrap();
        assert_eq!(
            to_dot(&g),
            "digraph G {\n  \"a\";\n  \"b\";\n  \"a\" -> \"b\";\n  \"b\" -> \"a\";\n}\n"
        );
        let empty = parse_graph("graph { nodes ; sources ; }").unwrap();
        assert_eq!(to_dot(&empty), "digraph G {\n}\n");
        let s = parse_graph("graph { nodes s; sources s; }").unwrap();
        assert!(to_dot(&s).contains("\"s\" [shape=box"));
    }

    #[test]
    fn copy_strategy_on_two_cycle_wins_twice() {
        let g = parse_graph("graph { nodes a, b; sources ; edge a -> b; edge b -> a; }").unwrap();
        let s = GuessingStrategy {
            n: 2,
            tables: [("a".to_string(), vec![0, 1]), ("b".to_string(), vec![0, 1])].into(),
        };
        assert_eq!(s.winning_count(&g), 2);
    }
}
