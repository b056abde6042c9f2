//! Dinic's algorithm on the integer network, with the canonical min cut read
//! off the final residual graph.

use std::collections::VecDeque;

use super::network::FlowNetwork;

struct Arc {
    to: usize,
    cap: u32,
    /// Index of the paired reverse arc in `graph[to]`.
    rev: usize,
    /// Original edge id for forward arcs.
    edge: Option<usize>,
}

pub(crate) struct Dinic {
    graph: Vec<Vec<Arc>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    pub(crate) fn new(net: &FlowNetwork) -> Self {
        let mut graph: Vec<Vec<Arc>> = (0..net.nodes.len()).map(|_| Vec::new()).collect();
        for (id, e) in net.edges.iter().enumerate() {
            let (ri, rj) = (graph[e.to].len(), graph[e.from].len());
            graph[e.from].push(Arc {
                to: e.to,
                cap: e.capacity,
                rev: ri + usize::from(e.from == e.to),
                edge: Some(id),
            });
            graph[e.to].push(Arc {
                to: e.from,
                cap: 0,
                rev: rj,
                edge: None,
            });
        }
        let n = graph.len();
        Dinic {
            graph,
            level: vec![-1; n],
            iter: vec![0; n],
        }
    }

    fn bfs(&mut self, s: usize) {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for a in &self.graph[u] {
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: u32) -> u32 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.graph[u].len() {
            let i = self.iter[u];
            let (to, cap) = (self.graph[u][i].to, self.graph[u][i].cap);
            if cap > 0 && self.level[u] < self.level[to] {
                let d = self.dfs(to, t, pushed.min(cap));
                if d > 0 {
                    self.graph[u][i].cap -= d;
                    let rev = self.graph[u][i].rev;
                    self.graph[to][rev].cap += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    pub(crate) fn run(&mut self, s: usize, t: usize) -> u32 {
        let mut flow = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, u32::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }

    /// Flow on every original edge.
    pub(crate) fn edge_flows(&self, net: &FlowNetwork) -> Vec<u32> {
        let mut flows = vec![0; net.edges.len()];
        for arcs in &self.graph {
            for a in arcs {
                if let Some(id) = a.edge {
                    flows[id] = net.edges[id].capacity - a.cap;
                }
            }
        }
        flows
    }

    /// Nodes that can still reach `t` in the residual graph.
    pub(crate) fn sink_side(&self, t: usize) -> Vec<bool> {
        let n = self.graph.len();
        // residual arc u -> v exists iff some arc in graph[u] to v has cap > 0
        let mut into: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, arcs) in self.graph.iter().enumerate() {
            for a in arcs {
                if a.cap > 0 {
                    into[a.to].push(u);
                }
            }
        }
        let mut side = vec![false; n];
        side[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            for &u in &into[v] {
                if !side[u] {
                    side[u] = true;
                    queue.push_back(u);
                }
            }
        }
        side
    }
}
