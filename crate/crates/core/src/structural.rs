//! Structural controllability for patterns with a full diagonal.
//!
//! With a self-loop on every state, a single input makes `(A, b)`
//! structurally controllable iff it feeds at least one state of every
//! strongly connected component that has no incoming edge from another
//! component (a non-top-linked SCC).

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::structure::{StructuralMatrix, StructuralVector};
use crate::{Error, Result};

/// Edge `(i, j)` means `x_i -> x_j`, present iff `A[j][i]` is a star.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDigraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

pub fn state_digraph(pattern: &StructuralMatrix) -> Result<StateDigraph> {
    if pattern.rows() != pattern.cols() {
        return Err(Error::NotSquare {
            rows: pattern.rows(),
            cols: pattern.cols(),
        });
    }
    let n = pattern.rows();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if pattern.is_star(j, i) {
                edges.push((i, j));
            }
        }
    }
    Ok(StateDigraph { n, edges })
}

impl StateDigraph {
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.binary_search(&(from, to)).is_ok()
    }
}

/// Condensation of a state digraph.
///
/// Components are sorted by their lowest vertex, and vertices within a
/// component ascend.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccDag {
    pub components: Vec<Vec<usize>>,
    /// Component index of each vertex.
    pub component_of: Vec<usize>,
    /// Deduplicated edges between distinct components.
    pub edges: Vec<(usize, usize)>,
    /// No incoming edge from another component.
    pub non_top_linked: Vec<bool>,
}

impl SccDag {
    pub fn non_top_linked_components(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.components
            .iter()
            .zip(&self.non_top_linked)
            .filter(|(_, &flag)| flag)
            .map(|(c, _)| c)
    }
}

pub fn scc_dag(g: &StateDigraph) -> SccDag {
    let mut graph = DiGraph::<(), ()>::with_capacity(g.n, g.edges.len());
    let nodes: Vec<_> = (0..g.n).map(|_| graph.add_node(())).collect();
    for &(i, j) in &g.edges {
        graph.add_edge(nodes[i], nodes[j], ());
    }
    let mut components: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|v| v.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    components.sort_by_key(|c| c[0]);

    let mut component_of = vec![0; g.n];
    for (k, c) in components.iter().enumerate() {
        for &v in c {
            component_of[v] = k;
        }
    }
    let mut edges: Vec<(usize, usize)> = g
        .edges
        .iter()
        .map(|&(i, j)| (component_of[i], component_of[j]))
        .filter(|(a, b)| a != b)
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let mut non_top_linked = vec![true; components.len()];
    for &(_, to) in &edges {
        non_top_linked[to] = false;
    }
    SccDag {
        components,
        component_of,
        edges,
        non_top_linked,
    }
}

fn require_full_diagonal(pattern: &StructuralMatrix) -> Result<()> {
    if pattern.rows() != pattern.cols() {
        return Err(Error::NotSquare {
            rows: pattern.rows(),
            cols: pattern.cols(),
        });
    }
    match (0..pattern.rows()).find(|&i| !pattern.is_star(i, i)) {
        Some(i) => Err(Error::MissingSelfLoops(i)),
        None => Ok(()),
    }
}

/// One star per non-top-linked SCC, at its lowest-index state.
pub fn solve_mscp(pattern: &StructuralMatrix) -> Result<StructuralVector> {
    solve_mscp_within(pattern, &StructuralVector::zeros(pattern.rows()))
}

/// Like [`solve_mscp`], but inside each non-top-linked SCC the lowest state
/// that is a star of `preferred` is used when there is one. The result is a
/// minimum solution dominated by `preferred` whenever such a solution exists.
pub fn solve_mscp_within(pattern: &StructuralMatrix, preferred: &StructuralVector) -> Result<StructuralVector> {
    require_full_diagonal(pattern)?;
    if preferred.len() != pattern.rows() {
        return Err(Error::DimensionMismatch(format!(
            "preferred pattern of length {} for {} states",
            preferred.len(),
            pattern.rows()
        )));
    }
    let dag = scc_dag(&state_digraph(pattern)?);
    let mut marks = vec![false; pattern.rows()];
    for component in dag.non_top_linked_components() {
        let pick = component
            .iter()
            .copied()
            .find(|&v| preferred.is_star(v))
            .unwrap_or(component[0]);
        marks[pick] = true;
    }
    Ok(StructuralVector::new(marks))
}

/// Every non-top-linked SCC contains a star of `input`.
pub fn is_structurally_controllable(pattern: &StructuralMatrix, input: &StructuralVector) -> Result<bool> {
    require_full_diagonal(pattern)?;
    if input.len() != pattern.rows() {
        return Err(Error::DimensionMismatch(format!(
            "input pattern of length {} for {} states",
            input.len(),
            pattern.rows()
        )));
    }
    let dag = scc_dag(&state_digraph(pattern)?);
    let result = dag
        .non_top_linked_components()
        .all(|c| c.iter().any(|&v| input.is_star(v)));
    Ok(result)
}
