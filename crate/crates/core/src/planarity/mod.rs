//! Planarity decisions with checkable witnesses.
//!
//! A planar verdict carries a rotation system whose face count satisfies Euler's formula on
//! every component. A certified non-planar verdict carries a subdivision of `K5` or `K3,3`
//! found by greedy edge deletion down to a minimal non-planar subgraph.

mod lr;

use std::collections::HashMap;

use serde::Serialize;

use crate::graph::SimpleGraph;
use crate::invariants::connected_components;
use crate::Vertex;

/// Combinatorial embedding: the clockwise cyclic order of neighbors around each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub rotation: Vec<Vec<Vertex>>,
}

impl Embedding {
    /// Number of faces traced by the rotation system, counting one outer face per component
    /// (an isolated vertex counts as one face).
    pub fn face_count(&self) -> usize {
        let pos: Vec<HashMap<Vertex, usize>> = self
            .rotation
            .iter()
            .map(|r| r.iter().enumerate().map(|(i, &w)| (w, i)).collect())
            .collect();
        let mut seen: Vec<Vec<bool>> = self.rotation.iter().map(|r| vec![false; r.len()]).collect();
        let mut faces = 0;
        for v in 0..self.rotation.len() {
            if self.rotation[v].is_empty() {
                faces += 1;
                continue;
            }
            for i in 0..self.rotation[v].len() {
                if seen[v][i] {
                    continue;
                }
                faces += 1;
                let (mut a, mut ai) = (v, i);
                while !seen[a][ai] {
                    seen[a][ai] = true;
                    let b = self.rotation[a][ai] as usize;
                    // next half-edge leaves b counter-clockwise from the edge back to a
                    let back = pos[b][&(a as Vertex)];
                    let deg = self.rotation[b].len();
                    a = b;
                    ai = (back + deg - 1) % deg;
                }
            }
        }
        faces
    }

    /// The rotation is a permutation of each neighborhood and every component satisfies
    /// `V - E + F = 2`.
    pub fn is_planar_embedding_of(&self, graph: &SimpleGraph) -> bool {
        if self.rotation.len() != graph.vertex_count() {
            return false;
        }
        for v in graph.vertices() {
            let mut r = self.rotation[v as usize].clone();
            r.sort_unstable();
            if r != graph.neighbors(v) {
                return false;
            }
        }
        let components = connected_components(graph);
        let mut expected_faces = 0i64;
        for c in &components {
            let v = c.len() as i64;
            let e = c.iter().map(|&x| graph.degree(x)).sum::<usize>() as i64 / 2;
            expected_faces += 2 - v + e;
        }
        self.face_count() as i64 == expected_faces
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KuratowskiKind {
    #[serde(rename = "K5")]
    K5,
    #[serde(rename = "K3,3")]
    K33,
}

/// A subdivision of `K5` or `K3,3` inside the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KuratowskiWitness {
    pub kind: KuratowskiKind,
    pub branch_vertices: Vec<Vertex>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(Vertex, Vertex)>,
}

impl KuratowskiWitness {
    /// Classifies an edge set as a `K5` / `K3,3` subdivision, or `None` if it is neither.
    pub fn classify(n: usize, edges: &[(Vertex, Vertex)]) -> Option<(KuratowskiKind, Vec<Vertex>)> {
        let sub = SimpleGraph::from_edges(n, edges.iter().copied());
        if sub.edge_count() != edges.len() {
            return None;
        }
        let used: Vec<Vertex> = sub.vertices().filter(|&v| sub.degree(v) > 0).collect();
        let branch: Vec<Vertex> = used.iter().copied().filter(|&v| sub.degree(v) > 2).collect();
        if used.iter().any(|&v| sub.degree(v) == 1) {
            return None;
        }
        // smooth every path of degree-2 vertices between branch vertices
        let mut walked = 0;
        let mut pairs: Vec<(Vertex, Vertex)> = Vec::new();
        for &b in &branch {
            for &first in sub.neighbors(b) {
                let (mut prev, mut cur) = (b, first);
                walked += 1;
                while sub.degree(cur) == 2 {
                    let nb = sub.neighbors(cur);
                    let next = if nb[0] == prev { nb[1] } else { nb[0] };
                    prev = cur;
                    cur = next;
                    walked += 1;
                    if walked > 2 * edges.len() {
                        return None;
                    }
                }
                if cur == b {
                    return None;
                }
                if b < cur {
                    pairs.push((b, cur));
                }
            }
        }
        // every edge lies on exactly one smoothed path, traversed from both ends
        if walked != 2 * edges.len() {
            return None;
        }
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        let smoothed = SimpleGraph::from_edges(n, pairs.iter().copied());
        let is_k5 = branch.len() == 5 && pairs.len() == 10;
        if is_k5 && branch.iter().all(|&v| smoothed.degree(v) == 4) {
            return Some((KuratowskiKind::K5, branch));
        }
        if branch.len() == 6 && pairs.len() == 9 && branch.iter().all(|&v| smoothed.degree(v) == 3) {
            // bipartite with parts {b0} ∪ N(N(b0)) and N(b0)
            let side_a: Vec<Vertex> = smoothed.neighbors(branch[0]).to_vec();
            let side_b: Vec<Vertex> = branch.iter().copied().filter(|v| !side_a.contains(v)).collect();
            let complete = side_a.len() == 3
                && side_b.len() == 3
                && side_a.iter().all(|&a| side_b.iter().all(|&b| smoothed.has_edge(a, b)));
            if complete {
                return Some((KuratowskiKind::K33, branch));
            }
        }
        None
    }

    pub fn is_witness_in(&self, graph: &SimpleGraph) -> bool {
        self.edges.iter().all(|&(u, v)| graph.has_edge(u, v))
            && Self::classify(graph.vertex_count(), &self.edges).map(|(k, _)| k) == Some(self.kind)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Embedding(Embedding),
    Kuratowski(KuratowskiWitness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarityVerdict {
    pub planar: bool,
    pub witness: Option<Witness>,
}

impl PlanarityVerdict {
    pub fn kuratowski_kind(&self) -> Option<KuratowskiKind> {
        match &self.witness {
            Some(Witness::Kuratowski(k)) => Some(k.kind),
            _ => None,
        }
    }

    /// Checks the witness, if any, against `graph`.
    pub fn witness_holds(&self, graph: &SimpleGraph) -> bool {
        match (&self.witness, self.planar) {
            (None, _) => true,
            (Some(Witness::Embedding(e)), true) => e.is_planar_embedding_of(graph),
            (Some(Witness::Kuratowski(k)), false) => k.is_witness_in(graph),
            _ => false,
        }
    }
}

/// A component with at least three vertices and more than `3v - 6` edges.
fn too_dense(graph: &SimpleGraph) -> bool {
    connected_components(graph).iter().any(|c| {
        let v = c.len();
        let e = c.iter().map(|&x| graph.degree(x)).sum::<usize>() / 2;
        v >= 3 && e > 3 * v - 6
    })
}

/// Decides planarity; a planar verdict carries an embedding, a non-planar one no witness.
pub fn is_planar(graph: &SimpleGraph) -> PlanarityVerdict {
    if too_dense(graph) {
        return PlanarityVerdict {
            planar: false,
            witness: None,
        };
    }
    match lr::lr_planarity(graph) {
        Some(embedding) => PlanarityVerdict {
            planar: true,
            witness: Some(Witness::Embedding(embedding)),
        },
        None => PlanarityVerdict {
            planar: false,
            witness: None,
        },
    }
}

fn planar_edges(n: usize, edges: &[(Vertex, Vertex)]) -> bool {
    lr::lr_planarity(&SimpleGraph::from_edges(n, edges.iter().copied())).is_some()
}

/// Like [`is_planar`], but non-planar verdicts also carry a Kuratowski subdivision.
pub fn certify_planarity(graph: &SimpleGraph) -> PlanarityVerdict {
    let verdict = is_planar(graph);
    if verdict.planar {
        return verdict;
    }
    let n = graph.vertex_count();
    // some component is non-planar; shrink that one
    let component = connected_components(graph)
        .into_iter()
        .map(|c| graph.induced(&c).parent_edges())
        .find(|edges| !planar_edges(n, edges))
        .expect("a non-planar graph has a non-planar component");
    let mut kept = component;
    let mut i = 0;
    while i < kept.len() {
        let edge = kept.remove(i);
        if planar_edges(n, &kept) {
            kept.insert(i, edge);
            i += 1;
        }
    }
    let (kind, branch_vertices) =
        KuratowskiWitness::classify(n, &kept).expect("minimal non-planar graphs are Kuratowski subdivisions");
    let mut vertices: Vec<Vertex> = kept.iter().flat_map(|&(u, v)| [u, v]).collect();
    vertices.sort_unstable();
    vertices.dedup();
    PlanarityVerdict {
        planar: false,
        witness: Some(Witness::Kuratowski(KuratowskiWitness {
            kind,
            branch_vertices,
            vertices,
            edges: kept,
        })),
    }
}
