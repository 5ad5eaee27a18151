//! Stallings graphs of finitely generated subgroups.

use std::collections::VecDeque;

use crate::graph::{fold_all_tracked, read_from, trace_unchecked, LabeledGraph, Path, VertexId};
use crate::word::{free_reduce, reduce_product, Letter, ReducedWord, Word};

/// A connected immersion with a basepoint; `(S(H), v)` reads exactly the
/// reduced words of `H` as loops at `base`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedImmersion {
    pub graph: LabeledGraph,
    pub base: VertexId,
}

/// `S(H)_w`: the Stallings graph with a path labelled `w` glued so that it
/// ends at the basepoint `omega` and starts at `alpha`, then folded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttachedImmersion {
    pub graph: LabeledGraph,
    pub omega: VertexId,
    pub alpha: VertexId,
}

fn append_path(g: &mut LabeledGraph, from: VertexId, to: VertexId, w: &[Letter]) {
    let mut at = from;
    for (i, &l) in w.iter().enumerate() {
        let next = if i + 1 == w.len() { to } else { g.add_vertex() };
        g.add_letter_edge(at, next, l);
        at = next;
    }
}

/// Drops trivial generators and duplicates, keeping first occurrences.
pub fn normalize_generators(gens: &[Word]) -> Vec<ReducedWord> {
    let mut out: Vec<ReducedWord> = Vec::new();
    for g in gens {
        let r = free_reduce(g);
        if !r.is_identity() && !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Folds the wedge of generator cycles. The result is relabelled canonically
/// from the basepoint, so `base` is always vertex 0.
pub fn stallings_graph(symbols: usize, gens: &[Word]) -> PointedImmersion {
    let mut wedge = LabeledGraph::with_vertices(symbols, 1);
    for w in normalize_generators(gens) {
        append_path(&mut wedge, 0, 0, &w);
    }
    let (folded, map) = fold_all_tracked(&wedge);
    let (graph, relabel) = folded.canonical_relabel(&[map[0]]);
    PointedImmersion {
        graph,
        base: relabel[map[0]],
    }
}

impl PointedImmersion {
    pub fn new(symbols: usize, gens: &[Word]) -> Self {
        stallings_graph(symbols, gens)
    }

    pub fn symbols(&self) -> usize {
        self.graph.symbols()
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        contains(self, w)
    }

    /// Reduced path from the base reading `w`, if any.
    pub fn trace(&self, w: &ReducedWord) -> Option<Path> {
        trace_unchecked(&self.graph, self.base, w)
    }
}

/// Membership: a word lies in `H` iff its reduced form reads a loop at the base.
pub fn contains(h: &PointedImmersion, w: &[Letter]) -> bool {
    let r = free_reduce(w);
    read_from(&h.graph, h.base, &r) == Some(h.base)
}

pub fn attach_word(h: &PointedImmersion, w: &ReducedWord) -> AttachedImmersion {
    let mut g = h.graph.clone();
    let alpha = if w.is_empty() { h.base } else { g.add_vertex() };
    append_path(&mut g, alpha, h.base, w);
    let (folded, map) = fold_all_tracked(&g);
    let (graph, relabel) = folded.canonical_relabel(&[map[h.base]]);
    AttachedImmersion {
        graph,
        omega: relabel[map[h.base]],
        alpha: relabel[map[alpha]],
    }
}

impl AttachedImmersion {
    /// The attached graph read at `omega`.
    pub fn pointed(&self) -> PointedImmersion {
        PointedImmersion {
            graph: self.graph.clone(),
            base: self.omega,
        }
    }
}

/// BFS spanning tree from `root` (stars in letter order): tree label for each
/// vertex and a flag per geometric edge telling whether it is a tree edge.
pub(crate) fn spanning_tree(g: &LabeledGraph, root: VertexId) -> (Vec<Option<Vec<Letter>>>, Vec<bool>) {
    let mut words: Vec<Option<Vec<Letter>>> = vec![None; g.vertex_count()];
    let mut tree = vec![false; g.geometric_edge_count()];
    words[root] = Some(Vec::new());
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let mut out = g.star(v).to_vec();
        out.sort_by_key(|&e| (g.label(e), e));
        for e in out {
            let u = g.dst(e);
            if words[u].is_none() {
                let mut w = words[v].clone().unwrap();
                w.push(g.label(e));
                words[u] = Some(w);
                tree[g.geometric(e)] = true;
                queue.push_back(u);
            }
        }
    }
    (words, tree)
}

/// Free basis of `π₁(graph, base)`: one word per non-tree geometric edge.
pub fn subgroup_basis(h: &PointedImmersion) -> Vec<ReducedWord> {
    let g = &h.graph;
    let (words, tree) = spanning_tree(g, h.base);
    let mut basis = Vec::new();
    for (k, e) in g.geometric_edges().iter().enumerate() {
        if tree[k] {
            continue;
        }
        let (Some(to_tail), Some(to_head)) = (&words[e.tail], &words[e.head]) else {
            continue;
        };
        let back: Vec<Letter> = to_head.iter().rev().map(|l| l.inv()).collect();
        basis.push(reduce_product([
            to_tail.as_slice(),
            &[Letter::pos(e.symbol)],
            back.as_slice(),
        ]));
    }
    basis
}
