//! Slow, obviously-correct reference implementations used to cross-check the library.
#![allow(dead_code)]

use std::collections::HashMap;

use itertools::Itertools;
use orbnet::{FunctionalDigraph, QuadraticFamily, SimpleGraph};

pub fn family(n: u64, coeffs: &[u64]) -> QuadraticFamily {
    QuadraticFamily::from_unsorted(n, coeffs.to_vec()).unwrap()
}

/// Every nonempty coefficient set over `Z_n`, as families.
pub fn all_families(n: u64) -> impl Iterator<Item = QuadraticFamily> {
    (1u64..1 << n).map(move |mask| {
        let coeffs: Vec<u64> = (0..n).filter(|a| mask >> a & 1 == 1).collect();
        family(n, &coeffs)
    })
}

/// Graph given by adjacency bitmasks; only used for `n <= 32`.
pub fn adjacency_masks(graph: &SimpleGraph) -> Vec<u32> {
    graph
        .vertices()
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect()
}

/// Clique counts by testing every vertex subset: entry `k` is the number of `(k+1)`-cliques,
/// trailing zeros trimmed.
pub fn brute_force_cliques(graph: &SimpleGraph) -> Vec<u64> {
    let n = graph.vertex_count();
    assert!(n <= 20, "subset oracle is exponential");
    let adj = adjacency_masks(graph);
    let mut counts = vec![0u64; n + 1];
    for subset in 1u32..1 << n {
        let mut members = (0..n).filter(|&v| subset >> v & 1 == 1);
        let is_clique = members.all(|v| (adj[v] | 1 << v) & subset == subset);
        if is_clique {
            counts[subset.count_ones() as usize - 1] += 1;
        }
    }
    while counts.last() == Some(&0) {
        counts.pop();
    }
    counts
}

/// Forward orbit of every vertex as a bitmask, by plain iteration to a fixed point.
pub fn brute_force_branches(digraph: &FunctionalDigraph) -> Vec<u64> {
    let n = digraph.vertex_count();
    assert!(n <= 64);
    (0..n as u32)
        .map(|x| {
            let mut reach = 1u64 << x;
            loop {
                let mut next = reach;
                for v in 0..n as u32 {
                    if reach >> v & 1 == 1 {
                        for &w in digraph.targets(v) {
                            next |= 1 << w;
                        }
                    }
                }
                if next == reach {
                    return reach;
                }
                reach = next;
            }
        })
        .collect()
}

/// Smallest number of branches covering every vertex, by trying all subsets of each size.
pub fn brute_force_cover(digraph: &FunctionalDigraph) -> usize {
    let n = digraph.vertex_count();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut branches = brute_force_branches(digraph);
    branches.sort_unstable();
    branches.dedup();
    // a branch inside another never helps
    let maximal: Vec<u64> = branches
        .iter()
        .copied()
        .filter(|&b| !branches.iter().any(|&c| c != b && b & c == b))
        .collect();
    for k in 1..=maximal.len() {
        if maximal
            .iter()
            .combinations(k)
            .any(|sel| sel.iter().fold(0u64, |m, &&b| m | b) == full)
        {
            return k;
        }
    }
    unreachable!("the branches of all vertices cover the space")
}

/// Planarity by Wagner's theorem: search every contraction for a `K5` or `K3,3`
/// subgraph. Exponential; intended for at most 8 vertices.
pub struct MinorOracle {
    memo: HashMap<Vec<u8>, bool>,
}

impl Default for MinorOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl MinorOracle {
    pub fn new() -> Self {
        MinorOracle { memo: HashMap::new() }
    }

    pub fn is_planar(&mut self, graph: &SimpleGraph) -> bool {
        assert!(graph.vertex_count() <= 8);
        let adj: Vec<u8> = graph
            .vertices()
            .map(|v| graph.neighbors(v).iter().fold(0u8, |m, &w| m | 1 << w))
            .collect();
        !self.has_kuratowski_minor(adj)
    }

    fn has_kuratowski_minor(&mut self, adj: Vec<u8>) -> bool {
        let n = adj.len();
        let edges: u32 = adj.iter().map(|m| m.count_ones()).sum::<u32>() / 2;
        if n < 5 || edges < 9 {
            return false;
        }
        if let Some(&hit) = self.memo.get(&adj) {
            return hit;
        }
        let hit = contains_k5(&adj) || contains_k33(&adj) || {
            let mut found = false;
            'outer: for u in 0..n {
                for v in u + 1..n {
                    if adj[u] >> v & 1 == 1 && self.has_kuratowski_minor(contract(&adj, u, v)) {
                        found = true;
                        break 'outer;
                    }
                }
            }
            found
        };
        self.memo.insert(adj, hit);
        hit
    }
}

/// Merges `v` into `u` and removes `v`, shifting higher labels down.
fn contract(adj: &[u8], u: usize, v: usize) -> Vec<u8> {
    let squeeze = |m: u8| -> u8 {
        let low = m & ((1u8 << v) - 1);
        let high = if v + 1 >= 8 { 0 } else { m >> (v + 1) };
        low | high << v
    };
    let mut out = Vec::with_capacity(adj.len() - 1);
    for (x, &m) in adj.iter().enumerate() {
        if x == v {
            continue;
        }
        let mut m = m;
        if x == u {
            m |= adj[v];
        }
        if m >> v & 1 == 1 {
            m |= 1 << u;
        }
        m &= !(1 << x);
        m &= !(1 << v);
        out.push(squeeze(m));
    }
    out
}

fn contains_k5(adj: &[u8]) -> bool {
    (0..adj.len()).combinations(5).any(|s| {
        s.iter().all(|&a| s.iter().all(|&b| a == b || adj[a] >> b & 1 == 1))
    })
}

fn contains_k33(adj: &[u8]) -> bool {
    (0..adj.len()).combinations(6).any(|s| {
        // fix s[0] on the left side
        s[1..].iter().combinations(2).any(|rest| {
            let left = [s[0], *rest[0], *rest[1]];
            let right: Vec<usize> = s.iter().copied().filter(|x| !left.contains(x)).collect();
            left.iter().all(|&a| right.iter().all(|&b| adj[a] >> b & 1 == 1))
        })
    })
}

/// Distinct `n`-vertex graphs from an edge-presence mask over the lexicographic pair order.
pub fn graph_from_mask(n: usize, mask: u64) -> SimpleGraph {
    let pairs = (0..n as u32).tuple_combinations::<(u32, u32)>();
    let edges = pairs.enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e);
    SimpleGraph::from_edges(n, edges)
}
