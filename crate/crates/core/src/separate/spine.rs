//! Paths in Cayley graphs, their spans, spines and projection to immersions.
//!
//! Cayley graphs are never built here. A path is the sequence of group
//! elements it visits, and a span is the set of vertices and positively
//! oriented edges `(source, x)` a path crosses.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::graph::{LabeledGraph, Path};
use crate::group::FiniteGroup;
use crate::word::{is_reduced, Letter};

/// Positively oriented Cayley edge `source → source·x`.
pub type EdgeRef<E> = (E, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyPath<E> {
    /// `vertices.len() == label.len() + 1`.
    pub vertices: Vec<E>,
    pub label: Vec<Letter>,
}

impl<E: Clone + Ord> CayleyPath<E> {
    pub fn trace<G: FiniteGroup<Elem = E>>(g: &G, start: E, label: &[Letter]) -> Self {
        let mut vertices = Vec::with_capacity(label.len() + 1);
        vertices.push(start);
        for &l in label {
            let next = g.mul_letter(vertices.last().unwrap(), l);
            vertices.push(next);
        }
        CayleyPath {
            vertices,
            label: label.to_vec(),
        }
    }

    pub fn start(&self) -> &E {
        &self.vertices[0]
    }

    pub fn end(&self) -> &E {
        self.vertices.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        is_reduced(&self.label)
    }

    /// The edge crossed at step `i`, with whether it is crossed forwards.
    pub fn step(&self, i: usize) -> (EdgeRef<E>, bool) {
        let l = self.label[i];
        if l.inverted {
            ((self.vertices[i + 1].clone(), l.symbol), false)
        } else {
            ((self.vertices[i].clone(), l.symbol), true)
        }
    }

    pub fn reversed(&self) -> Self {
        CayleyPath {
            vertices: self.vertices.iter().rev().cloned().collect(),
            label: self.label.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    pub fn prefix(&self, len: usize) -> Self {
        CayleyPath {
            vertices: self.vertices[..=len].to_vec(),
            label: self.label[..len].to_vec(),
        }
    }

    /// Index of the first visit of `v`.
    pub fn first_visit(&self, v: &E) -> Option<usize> {
        self.vertices.iter().position(|u| u == v)
    }
}

/// The subgraph spanned by one or more paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSpan<E: Ord> {
    pub vertices: BTreeSet<E>,
    /// Edge to its head.
    pub edges: BTreeMap<EdgeRef<E>, E>,
}

impl<E: Clone + Ord> PathSpan<E> {
    pub fn of(path: &CayleyPath<E>) -> Self {
        let mut span = PathSpan {
            vertices: path.vertices.iter().cloned().collect(),
            edges: BTreeMap::new(),
        };
        for i in 0..path.len() {
            let (key, forward) = path.step(i);
            let head = if forward {
                path.vertices[i + 1].clone()
            } else {
                path.vertices[i].clone()
            };
            span.edges.insert(key, head);
        }
        span
    }

    pub fn contains_vertex(&self, v: &E) -> bool {
        self.vertices.contains(v)
    }

    pub fn contains_edge(&self, e: &EdgeRef<E>) -> bool {
        self.edges.contains_key(e)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        PathSpan {
            vertices: self.vertices.intersection(&other.vertices).cloned().collect(),
            edges: self
                .edges
                .iter()
                .filter(|(k, _)| other.edges.contains_key(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Outgoing steps per vertex, in letter order then target order.
    fn adjacency(&self) -> BTreeMap<E, Vec<(Letter, E)>> {
        let mut adj: BTreeMap<E, Vec<(Letter, E)>> = BTreeMap::new();
        for ((tail, x), head) in &self.edges {
            adj.entry(tail.clone()).or_default().push((Letter::pos(*x), head.clone()));
            adj.entry(head.clone()).or_default().push((Letter::neg(*x), tail.clone()));
        }
        for steps in adj.values_mut() {
            steps.sort();
        }
        adj
    }

    /// The connected component of `root`.
    pub fn component(&self, root: &E) -> Self {
        let adj = self.adjacency();
        let mut seen = BTreeSet::from([root.clone()]);
        let mut queue = VecDeque::from([root.clone()]);
        while let Some(v) = queue.pop_front() {
            for (_, u) in adj.get(&v).into_iter().flatten() {
                if seen.insert(u.clone()) {
                    queue.push_back(u.clone());
                }
            }
        }
        PathSpan {
            edges: self
                .edges
                .iter()
                .filter(|((t, _), _)| seen.contains(t))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            vertices: seen,
        }
    }

    /// A shortest path inside the span. Shortest paths never backtrack, so
    /// the result is reduced.
    pub fn shortest_path(&self, from: &E, to: &E) -> Option<CayleyPath<E>> {
        if !self.vertices.contains(from) || !self.vertices.contains(to) {
            return None;
        }
        let adj = self.adjacency();
        let mut parent: BTreeMap<E, (E, Letter)> = BTreeMap::new();
        let mut seen = BTreeSet::from([from.clone()]);
        let mut queue = VecDeque::from([from.clone()]);
        while let Some(v) = queue.pop_front() {
            if &v == to {
                break;
            }
            for (l, u) in adj.get(&v).into_iter().flatten() {
                if seen.insert(u.clone()) {
                    parent.insert(u.clone(), (v.clone(), *l));
                    queue.push_back(u.clone());
                }
            }
        }
        if !seen.contains(to) {
            return None;
        }
        let mut vertices = vec![to.clone()];
        let mut label = Vec::new();
        let mut at = to.clone();
        while &at != from {
            let (p, l) = parent[&at].clone();
            label.push(l);
            vertices.push(p.clone());
            at = p;
        }
        vertices.reverse();
        label.reverse();
        Some(CayleyPath { vertices, label })
    }
}

/// Why no spine exists: `Ω` is the component of the start in `Δ₁ ∩ Δ₂` and
/// misses the end, so the first path leaves `Ω` once more than it enters.
/// Every crossing uses a boundary edge of `Ω` lying outside `Δ₂`, so some
/// boundary edge carries a nonzero traversal count mod `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingCertificate<E: Ord> {
    pub omega: BTreeSet<E>,
    /// Steps of the first path leaving, resp. entering, `Ω`.
    pub out_steps: Vec<usize>,
    pub in_steps: Vec<usize>,
    /// Boundary edges with their signed traversal count by the first path.
    pub boundary: Vec<(EdgeRef<E>, i64)>,
    pub prime: u32,
    /// First boundary edge whose count is nonzero mod `p`, with that residue.
    pub witness: Option<(EdgeRef<E>, u32)>,
}

impl<E: Ord> CountingCertificate<E> {
    /// `|Ω_out| − |Ω_in| = 1` and a witness edge was found.
    pub fn is_consistent(&self) -> bool {
        self.out_steps.len() == self.in_steps.len() + 1 && self.witness.is_some()
    }
}

/// A reduced path from `eta1.start()` to `eta1.end()` inside `Δ₁ ∩ Δ₂`, or the
/// counting data showing why there is none.
pub fn common_spine<E: Clone + Ord>(
    delta1: &PathSpan<E>,
    delta2: &PathSpan<E>,
    eta1: &CayleyPath<E>,
    prime: u32,
) -> Result<CayleyPath<E>, CountingCertificate<E>> {
    let meet = delta1.intersect(delta2);
    if let Some(path) = meet.shortest_path(eta1.start(), eta1.end()) {
        return Ok(path);
    }
    let omega = if meet.contains_vertex(eta1.start()) {
        meet.component(eta1.start()).vertices
    } else {
        BTreeSet::new()
    };
    let mut out_steps = Vec::new();
    let mut in_steps = Vec::new();
    let mut counts: BTreeMap<EdgeRef<E>, i64> = BTreeMap::new();
    for i in 0..eta1.len() {
        let a = omega.contains(&eta1.vertices[i]);
        let b = omega.contains(&eta1.vertices[i + 1]);
        if a == b {
            continue;
        }
        let (key, forward) = eta1.step(i);
        if a {
            out_steps.push(i);
        } else {
            in_steps.push(i);
        }
        *counts.entry(key).or_default() += if forward { 1 } else { -1 };
    }
    let p = prime as i64;
    let boundary: Vec<_> = counts.into_iter().collect();
    let witness = boundary
        .iter()
        .find(|(_, c)| c.rem_euclid(p) != 0)
        .map(|(k, c)| (k.clone(), c.rem_euclid(p) as u32));
    Err(CountingCertificate {
        omega,
        out_steps,
        in_steps,
        boundary,
        prime,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectError {
    #[error("path to project is not reduced")]
    NotReduced,
    #[error("reference path is not reduced")]
    ReferenceNotReduced,
    #[error("paths start at different vertices")]
    DifferentStart,
    #[error("edge at step {0} is not crossed by the reference path")]
    EdgeNotCovered(usize),
    #[error("reference path in the immersion has a different label")]
    LabelMismatch,
    #[error("reference path in the immersion is not a valid path")]
    InvalidReference,
    #[error("projected edges do not compose at step {0}")]
    Disconnected(usize),
}

/// Carries `eta` along the correspondence between a Cayley path `eta_prime`
/// and a path `gamma_prime` of the same label: each edge of `eta` is crossed by
/// `eta_prime` at some step, and is sent to the edge `gamma_prime` uses there.
pub fn project_path<E: Clone + Ord + std::hash::Hash>(
    graph: &LabeledGraph,
    eta: &CayleyPath<E>,
    eta_prime: &CayleyPath<E>,
    gamma_prime: &Path,
) -> Result<Path, ProjectError> {
    if !eta.is_reduced() {
        return Err(ProjectError::NotReduced);
    }
    if !eta_prime.is_reduced() {
        return Err(ProjectError::ReferenceNotReduced);
    }
    if eta.start() != eta_prime.start() {
        return Err(ProjectError::DifferentStart);
    }
    if !gamma_prime.is_valid(graph) {
        return Err(ProjectError::InvalidReference);
    }
    if gamma_prime.label(graph) != eta_prime.label {
        return Err(ProjectError::LabelMismatch);
    }
    // Cayley edge -> the positively oriented graph edge over it.
    let mut over: HashMap<EdgeRef<E>, usize> = HashMap::new();
    for (i, &e) in gamma_prime.edges.iter().enumerate() {
        let (key, forward) = eta_prime.step(i);
        let positive = if forward { e } else { graph.reverse(e) };
        over.entry(key).or_insert(positive);
    }
    let mut edges = Vec::with_capacity(eta.len());
    let mut at = gamma_prime.start;
    for i in 0..eta.len() {
        let (key, forward) = eta.step(i);
        let &positive = over.get(&key).ok_or(ProjectError::EdgeNotCovered(i))?;
        let e = if forward { positive } else { graph.reverse(positive) };
        if graph.src(e) != at {
            return Err(ProjectError::Disconnected(i));
        }
        at = graph.dst(e);
        edges.push(e);
    }
    Ok(Path {
        start: gamma_prime.start,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::trace_unchecked;
    use crate::group::{Perm, XGroup};
    use crate::stallings::stallings_graph;
    use crate::word::Alphabet;

    fn ab() -> Alphabet {
        Alphabet::new("xy").unwrap()
    }

    fn w(s: &str) -> Vec<Letter> {
        ab().parse_word(s).unwrap().0
    }

    fn klein() -> XGroup {
        XGroup::new(vec![
            Perm::parse_cycles("(0 1)", 4).unwrap(),
            Perm::parse_cycles("(2 3)", 4).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn spine_of_identical_paths_is_the_path() {
        let g = klein();
        let p = CayleyPath::trace(&g, g.identity(), &w("xy"));
        let d = PathSpan::of(&p);
        let spine = common_spine(&d, &d, &p, 2).unwrap();
        assert_eq!(spine, p);
    }

    #[test]
    fn bigon_has_no_spine() {
        // xy and yx both run from 1 to xy in the Cayley square
        let g = klein();
        let p1 = CayleyPath::trace(&g, g.identity(), &w("xy"));
        let p2 = CayleyPath::trace(&g, p1.end().clone(), &w("XY"));
        let cert = common_spine(&PathSpan::of(&p1), &PathSpan::of(&p2), &p1, 2).unwrap_err();
        assert!(cert.is_consistent());
        assert_eq!(cert.omega.len(), 1);
        assert_eq!(cert.out_steps, vec![0]);
        assert!(cert.in_steps.is_empty());
    }

    #[test]
    fn spine_of_backtrack_is_the_edge() {
        let g = XGroup::new(vec![
            Perm::parse_cycles("(0 1 2)", 3).unwrap(),
            Perm::parse_cycles("(0 1)", 3).unwrap(),
        ])
        .unwrap();
        let p1 = CayleyPath::trace(&g, g.identity(), &w("x"));
        let p2 = CayleyPath::trace(&g, p1.end().clone(), &w("X"));
        let spine = common_spine(&PathSpan::of(&p1), &PathSpan::of(&p2), &p1, 2).unwrap();
        assert_eq!(spine.label, w("x"));
    }

    #[test]
    fn projection_examples() {
        let a = ab();
        let h = stallings_graph(2, &[a.parse_word("xyXY").unwrap(), a.parse_word("yy").unwrap()]);
        let g = klein();
        let label = w("xyXY");
        let eta_prime = CayleyPath::trace(&g, g.identity(), &label);
        let gamma_prime = trace_unchecked(&h.graph, h.base, &label).unwrap();
        assert_eq!(project_path(&h.graph, &eta_prime, &eta_prime, &gamma_prime).unwrap(), gamma_prime);
        let prefix = eta_prime.prefix(2);
        let projected = project_path(&h.graph, &prefix, &eta_prime, &gamma_prime).unwrap();
        assert_eq!(projected.edges, gamma_prime.edges[..2].to_vec());
        let stray = CayleyPath::trace(&g, g.identity(), &w("yy"));
        assert_eq!(
            project_path(&h.graph, &stray, &eta_prime, &gamma_prime),
            Err(ProjectError::EdgeNotCovered(1))
        );
        let other = CayleyPath::trace(&g, g.letter(Letter::pos(0)), &w("y"));
        assert_eq!(
            project_path(&h.graph, &other, &eta_prime, &gamma_prime),
            Err(ProjectError::DifferentStart)
        );
    }
}
