//! Tarjan's strongly connected components and the condensation order.

use serde::{Deserialize, Serialize};

use super::digraph::Adjacency;

/// Strongly connected components listed in topological order of the
/// condensation (sources first). Members of each component are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccPartition {
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    dag_edges: Vec<(usize, usize)>,
}

impl SccPartition {
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    /// Direct edges `i -> j` between components, sorted.
    pub fn dag_edges(&self) -> &[(usize, usize)] {
        &self.dag_edges
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.component_of.len()
    }

    /// `closure[i * c + j]`: component `i` reaches component `j` through at
    /// least one dag edge.
    pub fn closure(&self) -> Vec<bool> {
        let c = self.components.len();
        let mut reach = vec![false; c * c];
        for &(i, j) in &self.dag_edges {
            reach[i * c + j] = true;
        }
        for k in 0..c {
            for i in 0..c {
                if reach[i * c + k] {
                    for j in 0..c {
                        if reach[k * c + j] {
                            reach[i * c + j] = true;
                        }
                    }
                }
            }
        }
        reach
    }
}

struct Tarjan<'a> {
    graph: &'a Adjacency,
    next_index: usize,
    index: Vec<Option<usize>>,
    lowlink: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    // emitted in reverse topological order
    sccs: Vec<Vec<usize>>,
}

impl Tarjan<'_> {
    fn strong_connect(&mut self, v: usize) {
        self.index[v] = Some(self.next_index);
        self.lowlink[v] = self.next_index;
        self.next_index += 1;
        self.stack.push(v);
        self.on_stack[v] = true;

        for w in self.graph.successors(v) {
            match self.index[w] {
                None => {
                    self.strong_connect(w);
                    self.lowlink[v] = self.lowlink[v].min(self.lowlink[w]);
                }
                Some(iw) if self.on_stack[w] => {
                    self.lowlink[v] = self.lowlink[v].min(iw);
                }
                Some(_) => {}
            }
        }

        if Some(self.lowlink[v]) == self.index[v] {
            let mut scc = Vec::new();
            loop {
                let w = self.stack.pop().expect("tarjan stack underflow");
                self.on_stack[w] = false;
                scc.push(w);
                if w == v {
                    break;
                }
            }
            scc.sort_unstable();
            self.sccs.push(scc);
        }
    }
}

pub fn tarjan_scc(graph: &Adjacency) -> SccPartition {
    let n = graph.len();
    let mut t = Tarjan {
        graph,
        next_index: 0,
        index: vec![None; n],
        lowlink: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        sccs: Vec::new(),
    };
    for v in 0..n {
        if t.index[v].is_none() {
            t.strong_connect(v);
        }
    }
    let mut components = t.sccs;
    components.reverse();

    let mut component_of = vec![0; n];
    for (c, members) in components.iter().enumerate() {
        for &v in members {
            component_of[v] = c;
        }
    }
    let mut dag_edges = Vec::new();
    for a in 0..n {
        for b in graph.successors(a) {
            let (ca, cb) = (component_of[a], component_of[b]);
            if ca != cb {
                dag_edges.push((ca, cb));
            }
        }
    }
    dag_edges.sort_unstable();
    dag_edges.dedup();

    SccPartition {
        components,
        component_of,
        dag_edges,
    }
}
