//! Undirected-graph invariants: components, clique counts, Euler characteristic, cycle rank,
//! diameter, degree statistics and the inductive dimension.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::branch::BranchStats;
use crate::graph::{build_orbital_graph, SimpleGraph};
use crate::planarity::{certify_planarity, KuratowskiKind};
use crate::ring::{FamilyId, FunctionalDigraph, QuadraticFamily};
use crate::scalar::DimensionScalar;
use crate::{Rational, Vertex};

/// Connected components, each sorted, ordered by smallest vertex.
pub fn connected_components(graph: &SimpleGraph) -> Vec<Vec<Vertex>> {
    let n = graph.vertex_count();
    let mut seen = vec![false; n];
    let mut parts = Vec::new();
    let mut stack = Vec::new();
    for root in graph.vertices() {
        if seen[root as usize] {
            continue;
        }
        seen[root as usize] = true;
        stack.push(root);
        let mut part = Vec::new();
        while let Some(v) = stack.pop() {
            part.push(v);
            for &w in graph.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        part.sort_unstable();
        parts.push(part);
    }
    parts
}

pub fn component_count(graph: &SimpleGraph) -> usize {
    connected_components(graph).len()
}

/// `c_k` = number of complete subgraphs on `k + 1` vertices; trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct CliqueVector(Vec<u64>);

impl CliqueVector {
    pub fn from_counts(mut counts: Vec<u64>) -> Self {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        CliqueVector(counts)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// Number of `K_{k+1}`; zero beyond the largest clique.
    pub fn count(&self, k: usize) -> u64 {
        self.0.get(k).copied().unwrap_or(0)
    }

    /// Number of complete subgraphs with `m` vertices.
    pub fn complete_subgraphs(&self, m: usize) -> u64 {
        if m == 0 {
            0
        } else {
            self.count(m - 1)
        }
    }

    pub fn triangles(&self) -> u64 {
        self.count(2)
    }

    pub fn tetrahedra(&self) -> u64 {
        self.count(3)
    }

    /// Largest `k` with `c_k > 0`.
    pub fn max_k(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

/// Clique counts together with the alternating sum accumulated during enumeration.
pub fn clique_census(graph: &SimpleGraph) -> (CliqueVector, i64) {
    fn extend(graph: &SimpleGraph, level: usize, cands: &[Vertex], counts: &mut Vec<u64>, chi: &mut i64) {
        if cands.is_empty() {
            return;
        }
        if counts.len() <= level {
            counts.resize(level + 1, 0);
        }
        let sign = if level.is_multiple_of(2) { 1 } else { -1 };
        for (i, &w) in cands.iter().enumerate() {
            counts[level] += 1;
            *chi += sign;
            let next: Vec<Vertex> = cands[i + 1..].iter().copied().filter(|&x| graph.has_edge(w, x)).collect();
            extend(graph, level + 1, &next, counts, chi);
        }
    }

    let mut counts = Vec::new();
    let mut chi = 0i64;
    let all: Vec<Vertex> = graph.vertices().collect();
    // each clique is reached once, through its vertices in increasing order
    if !all.is_empty() {
        counts.push(all.len() as u64);
        chi += all.len() as i64;
        for &v in &all {
            let higher: Vec<Vertex> = graph.neighbors(v).iter().copied().filter(|&w| w > v).collect();
            extend(graph, 1, &higher, &mut counts, &mut chi);
        }
    }
    (CliqueVector::from_counts(counts), chi)
}

pub fn clique_counts(graph: &SimpleGraph) -> CliqueVector {
    clique_census(graph).0
}

pub fn euler_characteristic(graph: &SimpleGraph) -> i64 {
    clique_counts(graph).euler_characteristic()
}

/// `|E| - |V| + b_0`, the first Betti number of the 1-skeleton.
pub fn cycle_rank(graph: &SimpleGraph) -> i64 {
    graph.edge_count() as i64 - graph.vertex_count() as i64 + component_count(graph) as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Diameter {
    Finite(u32),
    /// The graph is disconnected.
    Infinite,
}

impl Diameter {
    pub fn finite(self) -> Option<u32> {
        match self {
            Diameter::Finite(k) => Some(k),
            Diameter::Infinite => None,
        }
    }

    /// CSV encoding: `-1` for infinite.
    pub fn to_csv(self) -> i64 {
        match self {
            Diameter::Finite(k) => i64::from(k),
            Diameter::Infinite => -1,
        }
    }
}

impl fmt::Display for Diameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diameter::Finite(k) => write!(f, "{k}"),
            Diameter::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Diameter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Diameter::Finite(k) => s.serialize_u32(*k),
            Diameter::Infinite => s.serialize_str("inf"),
        }
    }
}

fn bfs_eccentricity(graph: &SimpleGraph, source: Vertex, dist: &mut [u32], queue: &mut VecDeque<Vertex>) -> (u32, usize) {
    dist.fill(u32::MAX);
    dist[source as usize] = 0;
    queue.clear();
    queue.push_back(source);
    let mut reached = 0;
    let mut ecc = 0;
    while let Some(v) = queue.pop_front() {
        reached += 1;
        let dv = dist[v as usize];
        ecc = ecc.max(dv);
        for &w in graph.neighbors(v) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dv + 1;
                queue.push_back(w);
            }
        }
    }
    (ecc, reached)
}

/// Largest shortest-path distance; `Infinite` when the graph is disconnected.
pub fn diameter(graph: &SimpleGraph) -> Diameter {
    let n = graph.vertex_count();
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut best = 0;
    for v in graph.vertices() {
        let (ecc, reached) = bfs_eccentricity(graph, v, &mut dist, &mut queue);
        if reached < n {
            return Diameter::Infinite;
        }
        best = best.max(ecc);
    }
    Diameter::Finite(best)
}

/// Inductive dimension evaluated in the scalar type `S`:
/// `dim(empty) = -1`, `dim(G) = 1 + mean over v of dim(S(v))`.
///
/// Spheres are memoized on their vertex set in the ambient graph for the duration of the
/// call.
pub fn inductive_dimension_in<S: DimensionScalar>(graph: &SimpleGraph) -> S {
    let all: Vec<Vertex> = graph.vertices().collect();
    let mut memo = HashMap::new();
    subset_dimension(graph, &all, &mut memo)
}

/// Exact inductive dimension.
pub fn inductive_dimension(graph: &SimpleGraph) -> Rational {
    inductive_dimension_in::<Rational>(graph)
}

fn subset_dimension<S: DimensionScalar>(graph: &SimpleGraph, subset: &[Vertex], memo: &mut HashMap<Vec<Vertex>, S>) -> S {
    if subset.is_empty() {
        return S::zero() - S::one();
    }
    if let Some(d) = memo.get(subset) {
        return d.clone();
    }
    let mut sum = S::zero();
    for &v in subset {
        let sphere = sorted_intersection(graph.neighbors(v), subset);
        sum = sum + subset_dimension(graph, &sphere, memo);
    }
    let dim = S::one() + sum / S::from_count(subset.len());
    memo.insert(subset.to_vec(), dim.clone());
    dim
}

fn sorted_intersection(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// degree -> number of vertices with that degree.
pub fn degree_histogram(graph: &SimpleGraph) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for v in graph.vertices() {
        *hist.entry(graph.degree(v)).or_insert(0) += 1;
    }
    debug_assert_eq!(hist.iter().map(|(d, c)| d * c).sum::<usize>(), 2 * graph.edge_count());
    hist
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// Everything known about one orbital network.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub family: FamilyId,
    pub n: u64,
    pub d: usize,
    pub vertices: usize,
    pub edges: usize,
    pub cliques: CliqueVector,
    pub chi: i64,
    pub components: usize,
    pub cycle_rank: i64,
    pub diameter: Diameter,
    #[serde(serialize_with = "serialize_rational")]
    pub dimension: Rational,
    pub dimension_decimal: f64,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub planar: Option<bool>,
    pub kuratowski: Option<KuratowskiKind>,
    pub branch: Option<BranchStats>,
}

/// Computes every invariant, including planarity (with witness type) and branch statistics.
pub fn analyze(family: &QuadraticFamily) -> InvariantReport {
    let digraph = FunctionalDigraph::new(family.clone());
    let graph = build_orbital_graph(family);
    let (cliques, chi) = clique_census(&graph);
    let components = component_count(&graph);
    let dimension = inductive_dimension(&graph);
    let verdict = certify_planarity(&graph);
    InvariantReport {
        family: family.into(),
        n: family.n(),
        d: family.arity(),
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        cliques,
        chi,
        components,
        cycle_rank: graph.edge_count() as i64 - graph.vertex_count() as i64 + components as i64,
        diameter: diameter(&graph),
        dimension_decimal: rational_to_f64(&dimension),
        dimension,
        degree_histogram: degree_histogram(&graph),
        planar: Some(verdict.planar),
        kuratowski: verdict.kuratowski_kind(),
        branch: Some(BranchStats::of(&digraph)),
    }
}

impl InvariantReport {
    pub fn is_consistent(&self) -> bool {
        self.chi == self.cliques.euler_characteristic()
            && self.cycle_rank == self.edges as i64 - self.vertices as i64 + self.components as i64
            && self.cliques.count(0) == self.vertices as u64
            && self.dimension_decimal == rational_to_f64(&self.dimension)
    }
}
