//! Automata for products of subgroups, with cancellation closure.
//!
//! After saturation, whenever `q` reaches `q'` reading `x x⁻¹` there is an
//! ε-move `q → q'`, so a reduced word lies in the rational subset iff the
//! saturated automaton accepts it literally.

use crate::stallings::PointedImmersion;
use crate::word::{free_reduce, Letter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    transitions: Vec<Vec<(Letter, usize)>>,
    /// `closure[q][r]`: `r` is reachable from `q` by ε-moves (reflexive).
    closure: Vec<Vec<bool>>,
    pub initial: usize,
    pub finals: Vec<usize>,
}

impl Nfa {
    pub fn new(states: usize, initial: usize) -> Self {
        let closure = (0..states).map(|q| (0..states).map(|r| q == r).collect()).collect();
        Nfa {
            transitions: vec![Vec::new(); states],
            closure,
            initial,
            finals: Vec::new(),
        }
    }

    /// Automaton accepting exactly the given (possibly unreduced) word.
    pub fn from_word(w: &[Letter]) -> Self {
        let mut a = Nfa::new(w.len() + 1, 0);
        for (i, &l) in w.iter().enumerate() {
            a.add_transition(i, l, i + 1);
        }
        a.finals.push(w.len());
        a
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn add_transition(&mut self, from: usize, l: Letter, to: usize) {
        if !self.transitions[from].contains(&(l, to)) {
            self.transitions[from].push((l, to));
        }
    }

    pub fn add_epsilon(&mut self, from: usize, to: usize) {
        if self.closure[from][to] {
            return;
        }
        let n = self.state_count();
        let sources: Vec<usize> = (0..n).filter(|&a| self.closure[a][from]).collect();
        let targets: Vec<usize> = (0..n).filter(|&b| self.closure[to][b]).collect();
        for &a in &sources {
            for &b in &targets {
                self.closure[a][b] = true;
            }
        }
    }

    pub fn has_epsilon(&self, from: usize, to: usize) -> bool {
        self.closure[from][to]
    }

    fn close(&self, set: &mut [bool]) {
        let seeds: Vec<usize> = (0..set.len()).filter(|&q| set[q]).collect();
        for q in seeds {
            for (r, &reach) in self.closure[q].iter().enumerate() {
                if reach {
                    set[r] = true;
                }
            }
        }
    }

    /// Literal acceptance: letters are read as given, ε-moves are free.
    pub fn accepts(&self, w: &[Letter]) -> bool {
        let n = self.state_count();
        let mut current = vec![false; n];
        current[self.initial] = true;
        self.close(&mut current);
        for &l in w {
            let mut next = vec![false; n];
            for q in (0..n).filter(|&q| current[q]) {
                for &(m, r) in &self.transitions[q] {
                    if m == l {
                        next[r] = true;
                    }
                }
            }
            self.close(&mut next);
            current = next;
        }
        self.finals.iter().any(|&f| current[f])
    }
}

/// `S(H₁) ⋯ S(Hₙ)` chained base to base by ε-moves; both orientations of each
/// edge are transitions.
pub fn product_automaton(hs: &[PointedImmersion]) -> Nfa {
    let total: usize = hs.iter().map(|h| h.graph.vertex_count()).sum();
    if hs.is_empty() {
        let mut a = Nfa::new(1, 0);
        a.finals.push(0);
        return a;
    }
    let mut a = Nfa::new(total, hs[0].base);
    let mut offset = 0;
    let mut prev_base: Option<usize> = None;
    for h in hs {
        let g = &h.graph;
        for e in 0..g.edge_count() {
            a.add_transition(offset + g.src(e), g.label(e), offset + g.dst(e));
        }
        let base = offset + h.base;
        if let Some(p) = prev_base {
            a.add_epsilon(p, base);
        }
        prev_base = Some(base);
        offset += g.vertex_count();
    }
    a.finals.push(prev_base.unwrap());
    a
}

/// Saturates with ε-moves across every `x x⁻¹` path until nothing changes.
pub fn cancellation_closure(a: &Nfa) -> Nfa {
    let mut out = a.clone();
    let n = out.state_count();
    loop {
        let mut added = Vec::new();
        for q in 0..n {
            for q1 in (0..n).filter(|&r| out.closure[q][r]) {
                for &(x, q2) in &out.transitions[q1] {
                    for q3 in (0..n).filter(|&r| out.closure[q2][r]) {
                        for &(y, q4) in &out.transitions[q3] {
                            if y == x.inv() && !out.closure[q][q4] {
                                added.push((q, q4));
                            }
                        }
                    }
                }
            }
        }
        if added.is_empty() {
            return out;
        }
        for (q, r) in added {
            out.add_epsilon(q, r);
        }
    }
}

/// Whether `w ∈ H₁⋯Hₙ`.
pub fn member_product(hs: &[PointedImmersion], w: &[Letter]) -> bool {
    cancellation_closure(&product_automaton(hs)).accepts(&free_reduce(w))
}
