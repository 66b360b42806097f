//! Branches (forward orbits under the generator monoid) and what they say about reachability.
//!
//! The branch cover number is called "k-connected" in some of the literature on orbital
//! networks; it is unrelated to vertex connectivity.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::graph::SimpleGraph;
use crate::ring::FunctionalDigraph;
use crate::Vertex;

/// `x ~ y` iff `x != y` and their branches intersect.
pub fn branch_graph(digraph: &FunctionalDigraph) -> SimpleGraph {
    let n = digraph.vertex_count();
    let branches: Vec<_> = (0..n as Vertex).map(|x| digraph.branch_set(x)).collect();
    let mut edges = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if !branches[x].is_disjoint(&branches[y]) {
                edges.push((x as Vertex, y as Vertex));
            }
        }
    }
    SimpleGraph::from_edges(n, edges)
}

/// Strongly connected components of the functional digraph with the in/out degree of each
/// component in the condensation.
#[derive(Clone, Debug)]
pub struct Condensation {
    /// component index of each vertex
    pub component_of: Vec<usize>,
    pub components: Vec<Vec<Vertex>>,
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
}

impl Condensation {
    pub fn of(digraph: &FunctionalDigraph) -> Self {
        let n = digraph.vertex_count();
        let mut g = DiGraph::<(), ()>::with_capacity(n, n * digraph.arity());
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for x in 0..n as Vertex {
            for &y in digraph.targets(x) {
                g.add_edge(nodes[x as usize], nodes[y as usize], ());
            }
        }
        let mut components: Vec<Vec<Vertex>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<Vertex> = c.into_iter().map(|ix| ix.index() as Vertex).collect();
                c.sort_unstable();
                c
            })
            .collect();
        components.sort_unstable_by_key(|c| c[0]);
        let mut component_of = vec![0; n];
        for (i, c) in components.iter().enumerate() {
            for &v in c {
                component_of[v as usize] = i;
            }
        }
        let k = components.len();
        let mut in_degree = vec![0; k];
        let mut out_degree = vec![0; k];
        for x in 0..n as Vertex {
            let cx = component_of[x as usize];
            for &y in digraph.targets(x) {
                let cy = component_of[y as usize];
                if cx != cy {
                    out_degree[cx] += 1;
                    in_degree[cy] += 1;
                }
            }
        }
        Condensation {
            component_of,
            components,
            in_degree,
            out_degree,
        }
    }

    pub fn sources(&self) -> usize {
        self.in_degree.iter().filter(|&&k| k == 0).count()
    }

    pub fn sinks(&self) -> usize {
        self.out_degree.iter().filter(|&&k| k == 0).count()
    }
}

/// Every pair of branches intersects. Holds iff the condensation has a single sink: each
/// branch contains a sink component, and a sink component is its own branch.
pub fn positively_connected(digraph: &FunctionalDigraph) -> bool {
    Condensation::of(digraph).sinks() == 1
}

/// Minimal number of branches whose union is all of `Z_n`: one vertex from each source
/// component of the condensation is necessary and sufficient.
pub fn branch_cover_number(digraph: &FunctionalDigraph) -> usize {
    Condensation::of(digraph).sources()
}

/// Branch-structure summary reported alongside the undirected invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchStats {
    pub cover_number: usize,
    pub positively_connected: bool,
    pub garden_of_eden: usize,
    pub strong_components: usize,
}

impl BranchStats {
    pub fn of(digraph: &FunctionalDigraph) -> Self {
        let c = Condensation::of(digraph);
        BranchStats {
            cover_number: c.sources(),
            positively_connected: c.sinks() == 1,
            garden_of_eden: digraph.garden_of_eden().len(),
            strong_components: c.components.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::QuadraticFamily;

    fn digraph(n: u64, coeffs: &[u64]) -> FunctionalDigraph {
        FunctionalDigraph::new(QuadraticFamily::from_unsorted(n, coeffs.to_vec()).unwrap())
    }

    #[test]
    fn branch_graph_examples() {
        let b = branch_graph(&digraph(2, &[0]));
        assert_eq!(b.edge_count(), 0);

        let b = branch_graph(&digraph(3, &[0]));
        assert_eq!(b.edges().collect::<Vec<_>>(), vec![(1, 2)]);

        let b = branch_graph(&digraph(5, &[0]));
        assert_eq!(b.edges().collect::<Vec<_>>(), vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(b.degree(0), 0);
    }

    #[test]
    fn positive_connectivity_examples() {
        assert!(positively_connected(&digraph(2, &[1])));
        assert!(!positively_connected(&digraph(5, &[0])));
        assert!(!positively_connected(&digraph(311, &[57, 58, 213])));
    }

    #[test]
    fn cover_number_examples() {
        assert_eq!(branch_cover_number(&digraph(2, &[1])), 1);
        assert_eq!(branch_cover_number(&digraph(2, &[0])), 2);
        assert_eq!(branch_cover_number(&digraph(5, &[0])), 3);
    }

    #[test]
    fn sink_criterion_matches_complete_branch_graph() {
        for n in 2..=30u64 {
            for a in 0..n {
                for b in a..n {
                    let coeffs: Vec<u64> = if a == b { vec![a] } else { vec![a, b] };
                    let g = digraph(n, &coeffs);
                    let bg = branch_graph(&g);
                    let complete = bg.edge_count() as u64 == n * (n - 1) / 2;
                    assert_eq!(positively_connected(&g), complete, "n={n} {coeffs:?}");
                }
            }
        }
    }

    #[test]
    fn cover_number_bounds_garden_of_eden() {
        for n in 2..=40u64 {
            for a in 0..n {
                let g = digraph(n, &[a]);
                let stats = BranchStats::of(&g);
                assert!(stats.cover_number >= stats.garden_of_eden);
                assert!(stats.cover_number >= 1);
            }
        }
    }
}
