//! Left-right planarity test (Brandes' formulation of the de Fraysseix–Rosenstiehl
//! criterion) with embedding construction. All three DFS passes are iterative.

use std::collections::HashMap;

use crate::graph::SimpleGraph;
use crate::Vertex;

use super::Embedding;

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Interval {
    low: usize,
    high: usize,
}

impl Interval {
    const EMPTY: Interval = Interval { low: NONE, high: NONE };

    fn is_empty(&self) -> bool {
        self.low == NONE && self.high == NONE
    }
}

#[derive(Clone, Copy, Debug)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState<'g> {
    graph: &'g SimpleGraph,
    height: Vec<usize>,
    parent_edge: Vec<usize>,
    roots: Vec<Vertex>,
    // per oriented edge, indexed like `graph.edges()`
    src: Vec<Vertex>,
    dst: Vec<Vertex>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<i64>,
    out_edges: Vec<Vec<usize>>,
    reference: Vec<usize>,
    side: Vec<i8>,
    lowpt_edge: Vec<usize>,
    stack_bottom: Vec<usize>,
    stack: Vec<ConflictPair>,
}

/// Returns a planar embedding, or `None` when the graph is not planar.
pub(crate) fn lr_planarity(graph: &SimpleGraph) -> Option<Embedding> {
    let mut state = LrState::new(graph);
    state.orient();
    for v in 0..graph.vertex_count() {
        let depth = &state.nesting_depth;
        state.out_edges[v].sort_by_key(|&e| depth[e]);
    }
    let roots = state.roots.clone();
    for root in roots {
        if !state.test(root) {
            return None;
        }
    }
    Some(state.embed())
}

impl<'g> LrState<'g> {
    fn new(graph: &'g SimpleGraph) -> Self {
        let n = graph.vertex_count();
        let m = graph.edge_count();
        LrState {
            graph,
            height: vec![NONE; n],
            parent_edge: vec![NONE; n],
            roots: Vec::new(),
            src: vec![0; m],
            dst: vec![0; m],
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting_depth: vec![0; m],
            out_edges: vec![Vec::new(); n],
            reference: vec![NONE; m],
            side: vec![1; m],
            lowpt_edge: vec![NONE; m],
            stack_bottom: vec![0; m],
            stack: Vec::new(),
        }
    }

    /// Orients every edge along a DFS and computes lowpoints and nesting depths.
    fn orient(&mut self) {
        let n = self.graph.vertex_count();
        let mut edge_ids: HashMap<(Vertex, Vertex), usize> = HashMap::with_capacity(self.graph.edge_count());
        for (i, e) in self.graph.edges().enumerate() {
            edge_ids.insert(e, i);
        }
        let id = |u: Vertex, v: Vertex| edge_ids[&(u.min(v), u.max(v))];
        let mut oriented = vec![false; self.graph.edge_count()];
        let mut next = vec![0usize; n];
        let mut dfs = Vec::new();

        for root in 0..n as Vertex {
            if self.height[root as usize] != NONE {
                continue;
            }
            self.height[root as usize] = 0;
            self.roots.push(root);
            dfs.push(root);
            while let Some(&v) = dfs.last() {
                let vi = v as usize;
                let Some(&w) = self.graph.neighbors(v).get(next[vi]) else {
                    dfs.pop();
                    continue;
                };
                let e = id(v, w);
                if !oriented[e] {
                    oriented[e] = true;
                    self.src[e] = v;
                    self.dst[e] = w;
                    self.out_edges[vi].push(e);
                    self.lowpt[e] = self.height[vi];
                    self.lowpt2[e] = self.height[vi];
                    if self.height[w as usize] == NONE {
                        // tree edge: finish it when we come back to v
                        self.parent_edge[w as usize] = e;
                        self.height[w as usize] = self.height[vi] + 1;
                        dfs.push(w);
                        continue;
                    }
                    // back edge to an ancestor
                    self.lowpt[e] = self.height[w as usize];
                    self.finish_edge(v, e);
                } else if self.src[e] == v {
                    // returning from the tree edge v -> w
                    self.finish_edge(v, e);
                }
                next[vi] += 1;
            }
        }
    }

    fn finish_edge(&mut self, v: Vertex, e: usize) {
        let h = self.height[v as usize];
        self.nesting_depth[e] = 2 * self.lowpt[e] as i64 + i64::from(self.lowpt2[e] < h);
        let pe = self.parent_edge[v as usize];
        if pe == NONE {
            return;
        }
        if self.lowpt[e] < self.lowpt[pe] {
            self.lowpt2[pe] = self.lowpt[pe].min(self.lowpt2[e]);
            self.lowpt[pe] = self.lowpt[e];
        } else if self.lowpt[e] > self.lowpt[pe] {
            self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt[e]);
        } else {
            self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt2[e]);
        }
    }

    fn conflicting(&self, interval: &Interval, edge: usize) -> bool {
        !interval.is_empty() && self.lowpt[interval.high] > self.lowpt[edge]
    }

    fn lowest(&self, pair: &ConflictPair) -> usize {
        if pair.left.is_empty() {
            return self.lowpt[pair.right.low];
        }
        if pair.right.is_empty() {
            return self.lowpt[pair.left.low];
        }
        self.lowpt[pair.left.low].min(self.lowpt[pair.right.low])
    }

    fn test(&mut self, root: Vertex) -> bool {
        let n = self.graph.vertex_count();
        let mut next = vec![0usize; n];
        let mut started = vec![false; self.src.len()];
        let mut dfs = vec![root];
        while let Some(&v) = dfs.last() {
            let vi = v as usize;
            let e = self.parent_edge[vi];
            let Some(&ei) = self.out_edges[vi].get(next[vi]) else {
                dfs.pop();
                if e != NONE {
                    self.remove_back_edges(e);
                }
                continue;
            };
            if !started[ei] {
                started[ei] = true;
                self.stack_bottom[ei] = self.stack.len();
                let w = self.dst[ei];
                if self.parent_edge[w as usize] == ei {
                    dfs.push(w);
                    continue;
                }
                self.lowpt_edge[ei] = ei;
                self.stack.push(ConflictPair {
                    left: Interval::EMPTY,
                    right: Interval { low: ei, high: ei },
                });
            }
            // integrate the return edges of ei
            if self.lowpt[ei] < self.height[vi] {
                if next[vi] == 0 {
                    self.lowpt_edge[e] = self.lowpt_edge[ei];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
            next[vi] += 1;
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = ConflictPair {
            left: Interval::EMPTY,
            right: Interval::EMPTY,
        };
        // merge return edges of ei into p.right
        while let Some(mut q) = self.stack.pop() {
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            if self.lowpt[q.right.low] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.reference[p.right.low] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.reference[q.right.low] = self.lowpt_edge[e];
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }
        // merge conflicting return edges of earlier siblings into p.left
        while let Some(top) = self.stack.last().copied() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().expect("checked non-empty");
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if p.right.low != NONE {
                self.reference[p.right.low] = q.right.high;
            }
            if q.right.low != NONE {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else {
                self.reference[p.left.low] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.src[e];
        let hu = self.height[u as usize];
        // drop entire conflict pairs returning to u
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != hu {
                break;
            }
            let p = self.stack.pop().expect("checked non-empty");
            if p.left.low != NONE {
                self.side[p.left.low] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            // trim left interval
            while p.left.high != NONE && self.dst[p.left.high] == u {
                p.left.high = self.reference[p.left.high];
            }
            if p.left.high == NONE && p.left.low != NONE {
                self.reference[p.left.low] = p.right.low;
                self.side[p.left.low] = -1;
                p.left.low = NONE;
            }
            // trim right interval
            while p.right.high != NONE && self.dst[p.right.high] == u {
                p.right.high = self.reference[p.right.high];
            }
            if p.right.high == NONE && p.right.low != NONE {
                self.reference[p.right.low] = p.left.low;
                self.side[p.right.low] = -1;
                p.right.low = NONE;
            }
            self.stack.push(p);
        }
        // side of e is the side of a highest return edge
        if self.lowpt[e] < hu {
            if let Some(top) = self.stack.last() {
                let hl = top.left.high;
                let hr = top.right.high;
                self.reference[e] = if hl != NONE && (hr == NONE || self.lowpt[hl] > self.lowpt[hr]) {
                    hl
                } else {
                    hr
                };
            }
        }
    }

    /// Resolves the reference chain of `e` into a final side.
    fn sign(&mut self, e: usize) -> i8 {
        let mut chain = Vec::new();
        let mut cur = e;
        while self.reference[cur] != NONE {
            chain.push(cur);
            cur = self.reference[cur];
        }
        for &x in chain.iter().rev() {
            let r = self.reference[x];
            self.side[x] *= self.side[r];
            self.reference[x] = NONE;
        }
        self.side[e]
    }

    fn embed(&mut self) -> Embedding {
        let n = self.graph.vertex_count();
        for e in 0..self.src.len() {
            let s = self.sign(e);
            self.nesting_depth[e] *= i64::from(s);
        }
        for v in 0..n {
            let depth = &self.nesting_depth;
            self.out_edges[v].sort_by_key(|&e| depth[e]);
        }
        let mut rot = Rotation::new(n);
        for v in 0..n {
            let mut prev = None;
            for &e in &self.out_edges[v] {
                let w = self.dst[e];
                rot.add_cw(v as Vertex, w, prev);
                prev = Some(w);
            }
        }
        let mut left_ref = vec![0 as Vertex; n];
        let mut right_ref = vec![0 as Vertex; n];
        let mut next = vec![0usize; n];
        for &root in &self.roots {
            let mut dfs = vec![root];
            while let Some(&v) = dfs.last() {
                let vi = v as usize;
                let Some(&e) = self.out_edges[vi].get(next[vi]) else {
                    dfs.pop();
                    continue;
                };
                next[vi] += 1;
                let w = self.dst[e];
                if self.parent_edge[w as usize] == e {
                    rot.add_first(w, v);
                    left_ref[vi] = w;
                    right_ref[vi] = w;
                    dfs.push(w);
                } else if self.side[e] == 1 {
                    rot.add_cw(w, v, Some(right_ref[w as usize]));
                } else {
                    rot.add_ccw(w, v, Some(left_ref[w as usize]));
                    left_ref[w as usize] = v;
                }
            }
        }
        rot.into_embedding()
    }
}

/// Half-edge rotation system under construction: cyclic clockwise/counter-clockwise links.
struct Rotation {
    links: HashMap<(Vertex, Vertex), (Vertex, Vertex)>,
    first: Vec<Option<Vertex>>,
}

impl Rotation {
    fn new(n: usize) -> Self {
        Rotation {
            links: HashMap::new(),
            first: vec![None; n],
        }
    }

    /// Inserts `w` clockwise right after `reference` around `v`.
    fn add_cw(&mut self, v: Vertex, w: Vertex, reference: Option<Vertex>) {
        let Some(r) = reference else {
            self.links.insert((v, w), (w, w));
            self.first[v as usize] = Some(w);
            return;
        };
        let (r_cw, r_ccw) = self.links[&(v, r)];
        self.links.insert((v, r), (w, r_ccw));
        self.links.insert((v, w), (r_cw, r));
        let (x_cw, _) = self.links[&(v, r_cw)];
        self.links.insert((v, r_cw), (x_cw, w));
    }

    /// Inserts `w` counter-clockwise right before `reference` around `v`.
    fn add_ccw(&mut self, v: Vertex, w: Vertex, reference: Option<Vertex>) {
        let Some(r) = reference else {
            self.links.insert((v, w), (w, w));
            self.first[v as usize] = Some(w);
            return;
        };
        let (_, r_ccw) = self.links[&(v, r)];
        self.add_cw(v, w, Some(r_ccw));
        if self.first[v as usize] == Some(r) {
            self.first[v as usize] = Some(w);
        }
    }

    fn add_first(&mut self, v: Vertex, w: Vertex) {
        let reference = self.first[v as usize];
        self.add_ccw(v, w, reference);
    }

    fn into_embedding(self) -> Embedding {
        let rotation = self
            .first
            .iter()
            .enumerate()
            .map(|(v, first)| {
                let v = v as Vertex;
                let mut order = Vec::new();
                if let Some(start) = *first {
                    let mut w = start;
                    loop {
                        order.push(w);
                        w = self.links[&(v, w)].0;
                        if w == start {
                            break;
                        }
                    }
                }
                order
            })
            .collect();
        Embedding { rotation }
    }
}
