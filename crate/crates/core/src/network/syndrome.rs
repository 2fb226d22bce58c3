//! Syndrome graphs: checks as vertices, shared observables as edges.

use std::collections::BTreeMap;

use super::{CheckGroup, NetworkError};
use crate::lattice::PeriodicSyndromeLattice;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeEdge {
    pub u: usize,
    /// `None` for a dangling (boundary) edge.
    pub v: Option<usize>,
    pub multiplicity: u32,
    /// Observable indices bundled into this edge; empty when the graph was
    /// not built from a network.
    pub observables: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SyndromeGraph {
    pub num_vertices: usize,
    pub edges: Vec<SyndromeEdge>,
}

/// Bundles every observable shared by two checks into one edge per check
/// pair; observables in a single check become dangling edges, one per check.
pub fn extract_syndrome_graph(checks: &CheckGroup) -> Result<SyndromeGraph, NetworkError> {
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); checks.num_observables];
    for (c, check) in checks.checks.iter().enumerate() {
        for &j in &check.decomposition {
            owners[j].push(c);
        }
    }
    let mut shared: BTreeMap<(usize, Option<usize>), Vec<usize>> = BTreeMap::new();
    for (j, own) in owners.iter().enumerate() {
        match own.as_slice() {
            [] => {}
            [a] => shared.entry((*a, None)).or_default().push(j),
            [a, b] => shared.entry((*a.min(b), Some(*a.max(b)))).or_default().push(j),
            _ => return Err(NetworkError::NotGraphRepresentable { observable: j, count: own.len() }),
        }
    }
    let edges = shared
        .into_iter()
        .map(|((u, v), observables)| SyndromeEdge { u, v, multiplicity: observables.len() as u32, observables })
        .collect();
    Ok(SyndromeGraph { num_vertices: checks.checks.len(), edges })
}

impl SyndromeGraph {
    pub fn from_lattice(lattice: &PeriodicSyndromeLattice) -> Self {
        let edges = lattice
            .edges()
            .iter()
            .map(|e| SyndromeEdge { u: e.u, v: Some(e.v), multiplicity: e.multiplicity, observables: Vec::new() })
            .collect();
        Self { num_vertices: lattice.num_vertices(), edges }
    }

    pub fn num_dangling(&self) -> usize {
        self.edges.iter().filter(|e| e.v.is_none()).map(|e| e.multiplicity as usize).sum()
    }

    /// Total multiplicity of edge endpoints at each vertex, dangling included.
    pub fn endpoint_counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_vertices];
        for e in &self.edges {
            out[e.u] += e.multiplicity as usize;
            if let Some(v) = e.v {
                out[v] += e.multiplicity as usize;
            }
        }
        out
    }

    /// Sorted multiplicities of the internal edges at each vertex.
    pub fn profiles(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.num_vertices];
        for e in &self.edges {
            if let Some(v) = e.v {
                out[e.u].push(e.multiplicity);
                out[v].push(e.multiplicity);
            }
        }
        for p in &mut out {
            p.sort_unstable();
        }
        out
    }

    /// Vertex sets of the connected components (internal edges only),
    /// each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.num_vertices).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            if let Some(v) = e.v {
                let (a, b) = (find(&mut parent, e.u), find(&mut parent, v));
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.num_vertices {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    /// Induced subgraph, vertices renumbered in the given order.
    pub fn subgraph(&self, vertices: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.num_vertices];
        for (i, &v) in vertices.iter().enumerate() {
            map[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| map[e.u] != usize::MAX && e.v.is_none_or(|v| map[v] != usize::MAX))
            .map(|e| SyndromeEdge { u: map[e.u], v: e.v.map(|v| map[v]), ..e.clone() })
            .collect();
        Self { num_vertices: vertices.len(), edges }
    }

    /// Number of internal edges per multiplicity.
    pub fn edge_classes(&self) -> BTreeMap<u32, usize> {
        let mut out = BTreeMap::new();
        for e in self.edges.iter().filter(|e| e.v.is_some()) {
            *out.entry(e.multiplicity).or_insert(0) += 1;
        }
        out
    }
}
