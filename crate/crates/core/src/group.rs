//! Finite `X`-generated groups.
//!
//! Groups act on the right: `v·(gh) = (v·g)·h`, so reading a word letter by
//! letter from a vertex of a covering moves it exactly as the transition
//! permutations do. Permutations store the image of every point.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::word::Letter;

/// Default cap on materialized elements.
pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycles())
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::Precondition(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn apply(&self, point: usize) -> usize {
        self.0[point] as usize
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Cycle notation with 0-based points, fixed points omitted; identity is `()`.
    pub fn cycles(&self) -> String {
        let mut out = String::new();
        let mut seen = vec![false; self.0.len()];
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            out.push('(');
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&i.to_string());
                first = false;
                i = self.0[i] as usize;
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    /// Sorted cycle lengths including fixed points.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.len()];
        let mut lens = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut i = start;
            let mut len = 0;
            while !seen[i] {
                seen[i] = true;
                len += 1;
                i = self.0[i] as usize;
            }
            lens.push(len);
        }
        lens.sort_unstable();
        lens
    }

    pub fn parse_cycles(text: &str, degree: usize) -> Result<Perm> {
        let bad = |m: &str| Error::Precondition(format!("bad cycle notation {text:?}: {m}"));
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut seen = vec![false; degree];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(inner) = rest.strip_prefix('(') else {
                return Err(bad("expected '('"));
            };
            let close = inner.find(')').ok_or_else(|| bad("missing ')'"))?;
            let points: Vec<usize> = inner[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad("bad point")))
                .collect::<Result<_>>()?;
            for (i, &p) in points.iter().enumerate() {
                if p >= degree || seen[p] {
                    return Err(bad("point out of range or repeated"));
                }
                seen[p] = true;
                images[p] = points[(i + 1) % points.len()] as u32;
            }
            rest = inner[close + 1..].trim_start();
        }
        Ok(Perm(images))
    }
}

/// A finite group generated by the images of the letters of `X`.
pub trait FiniteGroup {
    type Elem: Clone + Eq + Hash + Ord + fmt::Debug;

    fn symbols(&self) -> usize;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// `[ℓ]`, the value of a single letter.
    fn letter(&self, l: Letter) -> Self::Elem;

    fn mul_letter(&self, a: &Self::Elem, l: Letter) -> Self::Elem {
        self.mul(a, &self.letter(l))
    }

    /// `[w]`, multiplying letter values left to right.
    fn evaluate(&self, w: &[Letter]) -> Self::Elem {
        w.iter()
            .fold(self.identity(), |acc, &l| self.mul_letter(&acc, l))
    }

    /// Upper bound or exact order when known without enumeration.
    fn order_hint(&self) -> Option<u128> {
        None
    }
}

/// Permutation group given by one permutation per generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct XGroup {
    degree: usize,
    gens: Vec<Perm>,
    inv_gens: Vec<Perm>,
}

impl XGroup {
    pub fn new(gens: Vec<Perm>) -> Result<Self> {
        let degree = gens.first().map_or(0, |p| p.degree());
        if gens.is_empty() {
            return Err(Error::Precondition("group needs at least one generator".into()));
        }
        if gens.iter().any(|p| p.degree() != degree) {
            return Err(Error::Precondition("generators act on different carriers".into()));
        }
        let inv_gens = gens.iter().map(|p| p.inverse()).collect();
        Ok(XGroup {
            degree,
            gens,
            inv_gens,
        })
    }

    pub fn trivial(symbols: usize) -> Self {
        XGroup::new(vec![Perm::identity(1); symbols]).expect("valid")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn evaluate_word(&self, w: &[Letter]) -> Perm {
        self.evaluate(w)
    }

    /// Orbit of `point` under the generators.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut orbit = vec![point];
        let mut i = 0;
        while i < orbit.len() {
            let p = orbit[i];
            for g in &self.gens {
                let q = g.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                }
            }
            i += 1;
        }
        orbit
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    pub fn order(&self, cap: usize) -> Result<usize> {
        Ok(materialize(self, cap)?.len())
    }
}

impl FiniteGroup for XGroup {
    type Elem = Perm;

    fn symbols(&self) -> usize {
        self.gens.len()
    }

    fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        a.then(b)
    }

    fn inv(&self, a: &Perm) -> Perm {
        a.inverse()
    }

    fn letter(&self, l: Letter) -> Perm {
        if l.inverted {
            self.inv_gens[l.symbol].clone()
        } else {
            self.gens[l.symbol].clone()
        }
    }
}

/// `⟨(f¹ₓ, …, fⁿₓ) | x ∈ X⟩ ⊆ G₁ × ⋯ × Gₙ`, acting on the disjoint union of the carriers.
pub fn diagonal_subgroup(groups: &[XGroup]) -> Result<XGroup> {
    let first = groups
        .first()
        .ok_or_else(|| Error::Precondition("diagonal of an empty list".into()))?;
    let symbols = first.symbols();
    if let Some(g) = groups.iter().find(|g| g.symbols() != symbols) {
        return Err(Error::AlphabetMismatch {
            expected: symbols,
            found: g.symbols(),
        });
    }
    let gens = (0..symbols)
        .map(|x| {
            let mut images = Vec::new();
            let mut offset = 0u32;
            for g in groups {
                images.extend(g.gens[x].images().iter().map(|&i| i + offset));
                offset += g.degree() as u32;
            }
            Perm(images)
        })
        .collect();
    XGroup::new(gens)
}

/// Elements of a finite group enumerated by BFS from the identity over the
/// generators in alphabet order. Element ids are BFS discovery order and the
/// identity is id 0.
#[derive(Debug, Clone)]
pub struct GroupTable<E> {
    symbols: usize,
    elements: Vec<E>,
    index: HashMap<E, u32>,
    /// `step[g * 2k + letter.index()]` is the id of `g·letter`.
    step: Vec<u32>,
    /// BFS parent and the positive letter leading to each element.
    parent: Vec<(u32, u8)>,
}

pub fn materialize<G: FiniteGroup>(g: &G, cap: usize) -> Result<GroupTable<G::Elem>> {
    if let Some(order) = g.order_hint() {
        if order > cap as u128 {
            return Err(Error::CapExceeded {
                what: "group materialization",
                cap,
                order: Some(order),
            });
        }
    }
    let k = g.symbols();
    let mut elements = vec![g.identity()];
    let mut index = HashMap::from([(g.identity(), 0u32)]);
    let mut parent = vec![(0u32, 0u8)];
    let mut forward: Vec<u32> = Vec::new();
    let mut i = 0;
    while i < elements.len() {
        for x in 0..k {
            let next = g.mul_letter(&elements[i], Letter::pos(x));
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if elements.len() >= cap {
                        return Err(Error::CapExceeded {
                            what: "group materialization",
                            cap,
                            order: g.order_hint(),
                        });
                    }
                    let id = elements.len() as u32;
                    index.insert(next.clone(), id);
                    elements.push(next);
                    parent.push((i as u32, x as u8));
                    id
                }
            };
            forward.push(id);
        }
        i += 1;
    }
    let n = elements.len();
    let mut step = vec![0u32; n * 2 * k];
    for a in 0..n {
        for x in 0..k {
            let b = forward[a * k + x] as usize;
            step[a * 2 * k + 2 * x] = b as u32;
            step[b * 2 * k + 2 * x + 1] = a as u32;
        }
    }
    Ok(GroupTable {
        symbols: k,
        elements,
        index,
        step,
        parent,
    })
}

impl<E: Clone + Eq + Hash> GroupTable<E> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, id: u32) -> &E {
        &self.elements[id as usize]
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn id_of(&self, e: &E) -> Option<u32> {
        self.index.get(e).copied()
    }

    pub fn step(&self, id: u32, l: Letter) -> u32 {
        self.step[id as usize * 2 * self.symbols + l.index()]
    }

    /// Endpoint of reading `w` from `id` in the Cayley graph.
    pub fn walk(&self, id: u32, w: &[Letter]) -> u32 {
        w.iter().fold(id, |at, &l| self.step(at, l))
    }

    /// A word over positive letters evaluating to `id` (its BFS tree path).
    pub fn word_of(&self, id: u32) -> Vec<Letter> {
        let mut letters = Vec::new();
        let mut at = id as usize;
        while at != 0 {
            let (p, x) = self.parent[at];
            letters.push(Letter::pos(x as usize));
            at = p as usize;
        }
        letters.reverse();
        letters
    }

    /// The Cayley graph: vertex `g` for each element, edge `g → g·x`
    /// labelled `x`, geometric edge id `g·|X| + x`. The identity is vertex 0.
    pub fn cayley_graph(&self) -> LabeledGraph {
        let k = self.symbols;
        let mut graph = LabeledGraph::with_vertices(k, self.len());
        for g in 0..self.len() as u32 {
            for x in 0..k {
                graph.add_edge(g as usize, self.step(g, Letter::pos(x)) as usize, x);
            }
        }
        graph
    }

    /// Right regular representation: the group acting on its own elements.
    pub fn to_xgroup(&self) -> XGroup {
        let gens = (0..self.symbols)
            .map(|x| Perm((0..self.len() as u32).map(|g| self.step(g, Letter::pos(x))).collect()))
            .collect();
        XGroup::new(gens).expect("regular representation is valid")
    }
}

impl<E: Clone + Eq + Hash> FiniteGroup for GroupTable<E> {
    type Elem = u32;

    fn symbols(&self) -> usize {
        self.symbols
    }

    fn identity(&self) -> u32 {
        0
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.walk(*a, &self.word_of(*b))
    }

    fn inv(&self, a: &u32) -> u32 {
        let w = self.word_of(*a);
        w.iter().rev().fold(0, |at, &l| self.step(at, l.inv()))
    }

    fn letter(&self, l: Letter) -> u32 {
        self.step(0, l)
    }

    fn mul_letter(&self, a: &u32, l: Letter) -> u32 {
        self.step(*a, l)
    }

    fn order_hint(&self) -> Option<u128> {
        Some(self.len() as u128)
    }
}
