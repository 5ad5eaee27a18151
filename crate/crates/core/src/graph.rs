//! Finite Serre graphs labelled over `X ⊔ X⁻¹`.
//!
//! Edges are stored by geometric edge: geometric edge `k` owns the directed
//! edges `2k` (positively oriented, labelled by a generator) and `2k + 1`
//! (its reverse, labelled by the inverse). The involution, the incidence
//! rules and the one-positive-per-orbit rule hold by construction.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::word::{Letter, ReducedWord};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeoEdge {
    pub tail: VertexId,
    pub head: VertexId,
    pub symbol: usize,
}

#[derive(Debug, Clone)]
pub struct LabeledGraph {
    symbols: usize,
    vertex_count: usize,
    edges: Vec<GeoEdge>,
    star: Vec<Vec<EdgeId>>,
}

impl PartialEq for LabeledGraph {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
            && self.vertex_count == other.vertex_count
            && self.edges == other.edges
    }
}

impl Eq for LabeledGraph {}

impl LabeledGraph {
    pub fn new(symbols: usize) -> Self {
        Self::with_vertices(symbols, 0)
    }

    pub fn with_vertices(symbols: usize, n: usize) -> Self {
        LabeledGraph {
            symbols,
            vertex_count: n,
            edges: Vec::new(),
            star: vec![Vec::new(); n],
        }
    }

    /// The one-vertex graph with one loop per generator.
    pub fn rose(symbols: usize) -> Self {
        let mut g = Self::with_vertices(symbols, 1);
        for x in 0..symbols {
            g.add_edge(0, 0, x);
        }
        g
    }

    pub fn from_edges(symbols: usize, vertex_count: usize, edges: &[GeoEdge]) -> Self {
        let mut g = Self::with_vertices(symbols, vertex_count);
        for e in edges {
            g.add_edge(e.tail, e.head, e.symbol);
        }
        g
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn geometric_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn geometric_edges(&self) -> &[GeoEdge] {
        &self.edges
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.vertex_count += 1;
        self.star.push(Vec::new());
        self.vertex_count - 1
    }

    /// Adds a positively-oriented edge `tail → head` labelled by generator `symbol`
    /// together with its reverse; returns the positive edge.
    pub fn add_edge(&mut self, tail: VertexId, head: VertexId, symbol: usize) -> EdgeId {
        assert!(tail < self.vertex_count && head < self.vertex_count);
        assert!(symbol < self.symbols, "symbol out of range");
        let k = self.edges.len();
        self.edges.push(GeoEdge { tail, head, symbol });
        self.star[tail].push(2 * k);
        self.star[head].push(2 * k + 1);
        2 * k
    }

    /// Adds an edge `from → to` carrying `letter`; returns that directed edge.
    pub fn add_letter_edge(&mut self, from: VertexId, to: VertexId, letter: Letter) -> EdgeId {
        if letter.inverted {
            let e = self.add_edge(to, from, letter.symbol);
            self.reverse(e)
        } else {
            self.add_edge(from, to, letter.symbol)
        }
    }

    pub fn reverse(&self, e: EdgeId) -> EdgeId {
        e ^ 1
    }

    pub fn is_positive(&self, e: EdgeId) -> bool {
        e & 1 == 0
    }

    pub fn geometric(&self, e: EdgeId) -> usize {
        e >> 1
    }

    pub fn src(&self, e: EdgeId) -> VertexId {
        let g = &self.edges[e >> 1];
        if e & 1 == 0 {
            g.tail
        } else {
            g.head
        }
    }

    pub fn dst(&self, e: EdgeId) -> VertexId {
        self.src(e ^ 1)
    }

    pub fn label(&self, e: EdgeId) -> Letter {
        Letter {
            symbol: self.edges[e >> 1].symbol,
            inverted: e & 1 == 1,
        }
    }

    /// Directed edges leaving `v`, in insertion order.
    pub fn star(&self, v: VertexId) -> &[EdgeId] {
        &self.star[v]
    }

    pub fn out_edge(&self, v: VertexId, letter: Letter) -> Option<EdgeId> {
        self.star[v].iter().copied().find(|&e| self.label(e) == letter)
    }

    pub fn is_immersion(&self) -> bool {
        let letters = 2 * self.symbols;
        let mut seen = vec![false; letters];
        for v in 0..self.vertex_count {
            seen.iter_mut().for_each(|s| *s = false);
            for &e in &self.star[v] {
                let i = self.label(e).index();
                if seen[i] {
                    return false;
                }
                seen[i] = true;
            }
        }
        true
    }

    pub fn is_covering(&self) -> bool {
        self.is_immersion()
            && self
                .star
                .iter()
                .all(|s| s.len() == 2 * self.symbols)
    }

    /// Connected components, as a component index per vertex plus the count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut count = 0;
        for root in 0..self.vertex_count {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = count;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for &e in &self.star[v] {
                    let u = self.dst(e);
                    if comp[u] == usize::MAX {
                        comp[u] = count;
                        stack.push(u);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Rank of the fundamental group, summed over components:
    /// geometric edges − vertices + components.
    pub fn rank(&self) -> usize {
        let (_, c) = self.components();
        self.edges.len() + c - self.vertex_count
    }

    /// Graph with the same vertices and only the first `k` geometric edges.
    pub fn truncate_edges(&self, k: usize) -> LabeledGraph {
        LabeledGraph::from_edges(self.symbols, self.vertex_count, &self.edges[..k])
    }

    pub fn relabel(&self, new_id: &[VertexId]) -> LabeledGraph {
        let mut edges: Vec<GeoEdge> = self
            .edges
            .iter()
            .map(|e| GeoEdge {
                tail: new_id[e.tail],
                head: new_id[e.head],
                symbol: e.symbol,
            })
            .collect();
        edges.sort_by_key(|e| (e.tail, e.symbol, e.head));
        LabeledGraph::from_edges(self.symbols, self.vertex_count, &edges)
    }

    /// Relabels vertices in BFS order from `roots` (then any remaining vertex by id),
    /// exploring each star in letter order. Edges come out sorted by
    /// `(tail, symbol, head)`. Returns the relabelled graph and the old → new map.
    pub fn canonical_relabel(&self, roots: &[VertexId]) -> (LabeledGraph, Vec<VertexId>) {
        let n = self.vertex_count;
        let mut new_id = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        let all_roots = roots.iter().copied().chain(0..n);
        for root in all_roots {
            if new_id[root] != usize::MAX {
                continue;
            }
            new_id[root] = next;
            next += 1;
            queue.push_back(root);
            while let Some(v) = queue.pop_front() {
                let mut out: Vec<EdgeId> = self.star[v].clone();
                out.sort_by_key(|&e| (self.label(e), e));
                for e in out {
                    let u = self.dst(e);
                    if new_id[u] == usize::MAX {
                        new_id[u] = next;
                        next += 1;
                        queue.push_back(u);
                    }
                }
            }
        }
        (self.relabel(&new_id), new_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub start: VertexId,
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn empty(start: VertexId) -> Self {
        Path {
            start,
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn end(&self, g: &LabeledGraph) -> VertexId {
        self.edges.last().map_or(self.start, |&e| g.dst(e))
    }

    pub fn label(&self, g: &LabeledGraph) -> Vec<Letter> {
        self.edges.iter().map(|&e| g.label(e)).collect()
    }

    pub fn is_closed(&self, g: &LabeledGraph) -> bool {
        self.end(g) == self.start
    }

    /// Checks composability in `g`.
    pub fn is_valid(&self, g: &LabeledGraph) -> bool {
        let mut at = self.start;
        for &e in &self.edges {
            if e >= g.edge_count() || g.src(e) != at {
                return false;
            }
            at = g.dst(e);
        }
        at < g.vertex_count() || self.edges.is_empty()
    }

    pub fn reversed(&self, g: &LabeledGraph) -> Path {
        Path {
            start: self.end(g),
            edges: self.edges.iter().rev().map(|&e| g.reverse(e)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdmissiblePair {
    pub e1: EdgeId,
    pub e2: EdgeId,
}

pub fn is_admissible(g: &LabeledGraph, p: AdmissiblePair) -> bool {
    p.e1 < g.edge_count()
        && p.e2 < g.edge_count()
        && p.e1 != p.e2
        && p.e2 != g.reverse(p.e1)
        && g.src(p.e1) == g.src(p.e2)
        && g.label(p.e1) == g.label(p.e2)
}

/// Every admissible pair `(e1, e2)` with `e1 < e2`, ordered by
/// `(source vertex, label, e1, e2)`.
pub fn admissible_pairs(g: &LabeledGraph) -> Vec<AdmissiblePair> {
    let mut pairs = Vec::new();
    for v in 0..g.vertex_count() {
        let mut out: Vec<(Letter, EdgeId)> = g.star(v).iter().map(|&e| (g.label(e), e)).collect();
        out.sort();
        for i in 0..out.len() {
            for j in i + 1..out.len() {
                if out[j].0 != out[i].0 {
                    break;
                }
                pairs.push(AdmissiblePair {
                    e1: out[i].1,
                    e2: out[j].1,
                });
            }
        }
    }
    pairs
}

/// The least admissible pair under `(source vertex, label, min edge id)`.
pub fn find_admissible_pair(g: &LabeledGraph) -> Option<AdmissiblePair> {
    for v in 0..g.vertex_count() {
        let mut out: Vec<(Letter, EdgeId)> = g.star(v).iter().map(|&e| (g.label(e), e)).collect();
        out.sort();
        if let Some(w) = out.windows(2).find(|w| w[0].0 == w[1].0) {
            return Some(AdmissiblePair {
                e1: w[0].1,
                e2: w[1].1,
            });
        }
    }
    None
}

pub fn fold(g: &LabeledGraph, p: AdmissiblePair) -> Result<LabeledGraph> {
    fold_tracked(g, p).map(|(h, _)| h)
}

/// Folds one admissible pair. The merged vertex and the merged geometric
/// edge keep the smaller id; the rest are compacted in order. Also returns
/// the old → new vertex map.
pub fn fold_tracked(g: &LabeledGraph, p: AdmissiblePair) -> Result<(LabeledGraph, Vec<VertexId>)> {
    if !is_admissible(g, p) {
        return Err(Error::NotAdmissible(p.e1, p.e2));
    }
    let (a, b) = (g.dst(p.e1), g.dst(p.e2));
    let (keep, gone) = (a.min(b), a.max(b));
    let n = g.vertex_count();
    let map: Vec<VertexId> = (0..n)
        .map(|v| {
            let v = if v == gone { keep } else { v };
            if a != b && v > gone {
                v - 1
            } else {
                v
            }
        })
        .collect();
    let drop_edge = g.geometric(p.e1).max(g.geometric(p.e2));
    let new_n = if a == b { n } else { n - 1 };
    let mut h = LabeledGraph::with_vertices(g.symbols(), new_n);
    for (k, e) in g.geometric_edges().iter().enumerate() {
        if k != drop_edge {
            h.add_edge(map[e.tail], map[e.head], e.symbol);
        }
    }
    Ok((h, map))
}

/// Folds until no admissible pair remains, always picking the least pair.
pub fn fold_all(g: &LabeledGraph) -> LabeledGraph {
    fold_all_tracked(g).0
}

pub fn fold_all_tracked(g: &LabeledGraph) -> (LabeledGraph, Vec<VertexId>) {
    let mut cur = g.clone();
    let mut map: Vec<VertexId> = (0..g.vertex_count()).collect();
    while let Some(p) = find_admissible_pair(&cur) {
        let (next, m) = fold_tracked(&cur, p).expect("least pair is admissible");
        map.iter_mut().for_each(|v| *v = m[*v]);
        cur = next;
    }
    (cur, map)
}

/// Folds to an immersion, letting `choose` pick which admissible pair to fold
/// at each step (it receives the full list from [`admissible_pairs`]).
pub fn fold_all_by<F>(g: &LabeledGraph, mut choose: F) -> (LabeledGraph, Vec<VertexId>)
where
    F: FnMut(&[AdmissiblePair]) -> usize,
{
    let mut cur = g.clone();
    let mut map: Vec<VertexId> = (0..g.vertex_count()).collect();
    loop {
        let pairs = admissible_pairs(&cur);
        if pairs.is_empty() {
            return (cur, map);
        }
        let p = pairs[choose(&pairs).min(pairs.len() - 1)];
        let (next, m) = fold_tracked(&cur, p).expect("listed pair is admissible");
        map.iter_mut().for_each(|v| *v = m[*v]);
        cur = next;
    }
}

/// Reads `w` from `v` in an immersion. `None` when some letter has no edge.
pub fn trace_path(g: &LabeledGraph, v: VertexId, w: &ReducedWord) -> Result<Option<Path>> {
    if !g.is_immersion() {
        return Err(Error::NotImmersion);
    }
    Ok(trace_unchecked(g, v, w))
}

/// Same as [`trace_path`] without the immersion check; on a non-immersion the
/// first matching edge in each star is used.
pub fn trace_unchecked(g: &LabeledGraph, v: VertexId, w: &[crate::word::Letter]) -> Option<Path> {
    let mut at = v;
    let mut edges = Vec::with_capacity(w.len());
    for &l in w {
        let e = g.out_edge(at, l)?;
        edges.push(e);
        at = g.dst(e);
    }
    Some(Path { start: v, edges })
}

/// Endpoint of reading `w` from `v`, if readable.
pub fn read_from(g: &LabeledGraph, v: VertexId, w: &[crate::word::Letter]) -> Option<VertexId> {
    let mut at = v;
    for &l in w {
        at = g.dst(g.out_edge(at, l)?);
    }
    Some(at)
}
