//! Completing immersions to coverings on the same vertex set.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, VertexId};
use crate::group::{Perm, XGroup};

/// A covering containing a source immersion. The source's geometric edges
/// are the first `original_edges` edges of `graph`, in their original order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringExpansion {
    pub graph: LabeledGraph,
    pub original_edges: usize,
}

impl CoveringExpansion {
    pub fn source(&self) -> LabeledGraph {
        self.graph.truncate_edges(self.original_edges)
    }

    pub fn is_original(&self, geometric: usize) -> bool {
        geometric < self.original_edges
    }

    /// `f_x` for every letter `x`: `v ↦ v·x`.
    pub fn transitions(&self) -> Vec<Perm> {
        transitions(&self.graph)
    }
}

/// Per-symbol vertices lacking an outgoing and an incoming positive edge, ascending.
fn gaps(h: &LabeledGraph) -> Vec<(Vec<VertexId>, Vec<VertexId>)> {
    let n = h.vertex_count();
    let mut has_out = vec![vec![false; n]; h.symbols()];
    let mut has_in = vec![vec![false; n]; h.symbols()];
    for e in h.geometric_edges() {
        has_out[e.symbol][e.tail] = true;
        has_in[e.symbol][e.head] = true;
    }
    (0..h.symbols())
        .map(|x| {
            let outs = (0..n).filter(|&v| !has_out[x][v]).collect();
            let ins = (0..n).filter(|&v| !has_in[x][v]).collect();
            (outs, ins)
        })
        .collect()
}

fn complete(h: &LabeledGraph, pairing: &[(Vec<VertexId>, Vec<VertexId>)]) -> CoveringExpansion {
    let mut graph = h.clone();
    for (x, (outs, ins)) in pairing.iter().enumerate() {
        for (&from, &to) in outs.iter().zip(ins) {
            graph.add_edge(from, to, x);
        }
    }
    CoveringExpansion {
        graph,
        original_edges: h.geometric_edge_count(),
    }
}

/// The canonical completion: for each symbol, vertices missing an outgoing
/// edge are joined positionally to vertices missing an incoming edge.
pub fn expand_to_cover(h: &LabeledGraph) -> Result<CoveringExpansion> {
    if !h.is_immersion() {
        return Err(Error::NotImmersion);
    }
    Ok(complete(h, &gaps(h)))
}

/// Number of distinct completions, `∏ₓ kₓ!`, saturating.
pub fn expansion_count(h: &LabeledGraph) -> Result<u128> {
    if !h.is_immersion() {
        return Err(Error::NotImmersion);
    }
    let mut total: u128 = 1;
    for (outs, _) in gaps(h) {
        for i in 1..=outs.len() as u128 {
            total = total.saturating_mul(i);
        }
    }
    Ok(total)
}

/// Every covering expansion of `h`, the canonical one first. Fails with a
/// cap error, carrying the exact count, when there are more than `cap`.
pub fn enumerate_expansions(h: &LabeledGraph, cap: usize) -> Result<Vec<CoveringExpansion>> {
    let total = expansion_count(h)?;
    if total > cap as u128 {
        return Err(Error::CapExceeded {
            what: "covering expansions",
            cap,
            order: Some(total),
        });
    }
    let gaps = gaps(h);
    let choices: Vec<Vec<Vec<VertexId>>> = gaps
        .iter()
        .map(|(_, ins)| ins.iter().copied().permutations(ins.len()).collect())
        .collect();
    let mut out = Vec::with_capacity(total as usize);
    for pick in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
        let pairing: Vec<_> = gaps
            .iter()
            .zip(pick)
            .map(|((outs, _), ins)| (outs.clone(), ins.clone()))
            .collect();
        out.push(complete(h, &pairing));
    }
    if out.is_empty() {
        // multi_cartesian_product of zero iterators is empty
        out.push(complete(h, &gaps));
    }
    Ok(out)
}

/// `f_x` for each symbol of a covering.
pub fn transitions(g: &LabeledGraph) -> Vec<Perm> {
    let mut images = vec![vec![0u32; g.vertex_count()]; g.symbols()];
    for e in g.geometric_edges() {
        images[e.symbol][e.tail] = e.head as u32;
    }
    images
        .into_iter()
        .map(|im| Perm::from_images(im).expect("a covering has bijective transitions"))
        .collect()
}

pub fn transition_group(c: &CoveringExpansion) -> XGroup {
    XGroup::new(c.transitions()).expect("transitions share the vertex set")
}
