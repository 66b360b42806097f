//! Simple undirected graphs, the orbital network of a family, and graph file formats.

use std::fmt::Write as _;
use std::io::Write;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{FunctionalDigraph, Modulus, QuadraticFamily};
use crate::Vertex;

/// A finite simple graph on vertices `0..n` with sorted neighbor lists.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SimpleGraph {
    adj: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds from an edge list; loops are dropped and duplicates merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge ({u}, {v}) outside 0..{n}");
            if u != v {
                adj[u as usize].push(v);
                adj[v as usize].push(u);
            }
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        SimpleGraph {
            adj,
            edge_count: edge_count / 2,
        }
    }

    pub fn complete(n: usize) -> Self {
        let n32 = n as Vertex;
        Self::from_edges(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v))))
    }

    pub fn cycle(n: usize) -> Self {
        let n32 = n as Vertex;
        Self::from_edges(n, (0..n32).map(|u| (u, (u + 1) % n32)))
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.adj.len() as Vertex
    }

    /// Edges as `(min, max)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| {
                let u = u as Vertex;
                list.iter().copied().filter(move |&v| v > u).map(move |v| (u, v))
            })
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Induced subgraph on `vertices` (any order, duplicates ignored), relabelled by rank.
    pub fn induced(&self, vertices: &[Vertex]) -> InducedSubgraph {
        let mut keep = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let rank = |v: Vertex| keep.binary_search(&v).ok();
        let mut adj = Vec::with_capacity(keep.len());
        let mut edge_count = 0;
        for &v in &keep {
            let list: Vec<Vertex> = self
                .neighbors(v)
                .iter()
                .filter_map(|&w| rank(w).map(|r| r as Vertex))
                .collect();
            edge_count += list.len();
            adj.push(list);
        }
        InducedSubgraph {
            vertices: keep,
            graph: SimpleGraph {
                adj,
                edge_count: edge_count / 2,
            },
        }
    }

    /// The same graph under a vertex permutation: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> SimpleGraph {
        assert_eq!(perm.len(), self.vertex_count());
        SimpleGraph::from_edges(
            self.vertex_count(),
            self.edges().map(|(u, v)| (perm[u as usize], perm[v as usize])),
        )
    }
}

/// A vertex subset of a parent graph with the restricted adjacency. Vertex `i` of `graph`
/// is `vertices[i]` in the parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub vertices: Vec<Vertex>,
    pub graph: SimpleGraph,
}

impl InducedSubgraph {
    /// Edges in parent labels.
    pub fn parent_edges(&self) -> Vec<(Vertex, Vertex)> {
        self.graph
            .edges()
            .map(|(u, v)| (self.vertices[u as usize], self.vertices[v as usize]))
            .collect()
    }
}

/// The orbital network of a family: vertices `Z_n`, `{x, y}` an edge iff some generator
/// maps one onto the other and `x != y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitalGraph {
    family: QuadraticFamily,
    graph: SimpleGraph,
}

impl OrbitalGraph {
    pub fn family(&self) -> &QuadraticFamily {
        &self.family
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn export(&self, format: ExportFormat) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(format, &mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn write_to<W: Write>(&self, format: ExportFormat, mut out: W) -> std::io::Result<()> {
        let text = match format {
            ExportFormat::Dot => self.to_dot(),
            ExportFormat::Edgelist => self.to_edgelist(),
            ExportFormat::Json => {
                let mut s = serde_json::to_string(&self.document()).expect("plain data serializes");
                s.push('\n');
                s
            }
        };
        out.write_all(text.as_bytes())
    }

    fn to_dot(&self) -> String {
        let mut s = String::new();
        writeln!(s, "graph orbital {{").unwrap();
        writeln!(s, "  // n={} coeffs={}", self.family.n(), self.family.coeff_label()).unwrap();
        for v in self.graph.vertices() {
            writeln!(s, "  {v};").unwrap();
        }
        for (u, v) in self.graph.edges() {
            writeln!(s, "  {u} -- {v};").unwrap();
        }
        s.push_str("}\n");
        s
    }

    fn to_edgelist(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# n={} coeffs={}", self.family.n(), self.family.coeff_label()).unwrap();
        for (u, v) in self.graph.edges() {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }

    pub fn document(&self) -> GraphDocument {
        GraphDocument {
            n: self.family.n(),
            coeffs: self.family.coeffs().to_vec(),
            edges: self.graph.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    /// Reads the json format back, checking the edges against the family.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text)?;
        doc.into_graph()
    }
}

impl Deref for OrbitalGraph {
    type Target = SimpleGraph;

    fn deref(&self) -> &SimpleGraph {
        &self.graph
    }
}

/// The json graph file: `{"n": .., "coeffs": [..], "edges": [[u, v], ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: u64,
    pub coeffs: Vec<u64>,
    pub edges: Vec<[Vertex; 2]>,
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<OrbitalGraph> {
        let family = QuadraticFamily::new(Modulus::new(self.n)?, self.coeffs)?;
        let n = family.modulus().vertex_count();
        if let Some(e) = self.edges.iter().find(|[u, v]| *u as usize >= n || *v as usize >= n) {
            return Err(Error::InconsistentGraph(format!("edge {e:?} outside Z_{}", self.n)));
        }
        let graph = SimpleGraph::from_edges(n, self.edges.iter().map(|&[u, v]| (u, v)));
        let rebuilt = build_orbital_graph(&family);
        if rebuilt.graph != graph {
            return Err(Error::InconsistentGraph(format!(
                "edge set differs from the orbital network of {family}"
            )));
        }
        Ok(rebuilt)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Edgelist,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "edgelist" => Ok(ExportFormat::Edgelist),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::UnknownFormat(other.to_owned())),
        }
    }
}

pub fn build_orbital_graph(family: &QuadraticFamily) -> OrbitalGraph {
    let digraph = FunctionalDigraph::new(family.clone());
    orbital_graph_of(&digraph)
}

pub(crate) fn orbital_graph_of(digraph: &FunctionalDigraph) -> OrbitalGraph {
    let n = digraph.vertex_count();
    let edges = (0..n as Vertex).flat_map(|x| digraph.targets(x).iter().map(move |&y| (x, y)));
    OrbitalGraph {
        family: digraph.family().clone(),
        graph: SimpleGraph::from_edges(n, edges),
    }
}

/// Induced subgraph on the neighbors of `v`, `v` excluded.
pub fn unit_sphere(graph: &SimpleGraph, v: Vertex) -> InducedSubgraph {
    graph.induced(graph.neighbors(v))
}
