//! Universal p-elementary extensions and their iterates.
//!
//! An element of `G^{Ab(p)}` is a pair `(v, g)` where `v` is a finitely
//! supported `Z/p`-combination of positively oriented Cayley edges of `G` and
//! `g ∈ G`. Multiplication is `(v₁, g₁)(v₂, g₂) = (v₁ + g₁·v₂, g₁g₂)` with `G`
//! acting on edge sources by left multiplication; the generator for `x` is
//! `(e_x, x)` with `e_x` the edge `1 → x`. Arithmetic is symbolic so huge
//! levels can still be evaluated on words.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::group::{materialize, FiniteGroup, GroupTable, Perm, XGroup, DEFAULT_CAP};
use crate::word::{Alphabet, Letter};

/// An element of some level of an [`ExtensionChain`]. Level 0 elements are
/// permutations of the base carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChainElement {
    Base(Perm),
    Ext(Box<ExtElement>),
}

/// The positively oriented Cayley edge `source → source·x` of the level below.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey {
    pub source: ChainElement,
    pub symbol: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElement {
    /// Sorted by key, no zero coefficients, coefficients in `0..p`.
    pub vector: Vec<(EdgeKey, u32)>,
    pub group: ChainElement,
}

impl ChainElement {
    /// Group part one level down. Level 0 elements project to themselves.
    pub fn project(&self) -> &ChainElement {
        match self {
            ChainElement::Base(_) => self,
            ChainElement::Ext(e) => &e.group,
        }
    }

    pub fn vector(&self) -> &[(EdgeKey, u32)] {
        match self {
            ChainElement::Base(_) => &[],
            ChainElement::Ext(e) => &e.vector,
        }
    }
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// `G₀ = G` and `Gᵢ = G_{i−1}^{Ab(pᵢ)}`.
#[derive(Debug, Clone)]
pub struct ExtensionChain {
    group: XGroup,
    primes: Vec<u32>,
    base_order: OnceLock<Option<usize>>,
}

/// One level of a chain, usable as a finite group.
#[derive(Debug, Clone, Copy)]
pub struct Level<'a> {
    chain: &'a ExtensionChain,
    depth: usize,
}

pub fn iterated_extension(g: &XGroup, primes: &[u32]) -> Result<ExtensionChain> {
    ExtensionChain::new(g.clone(), primes)
}

pub fn build_extension(g: &XGroup, p: u32) -> Result<ExtensionChain> {
    iterated_extension(g, &[p])
}

fn sort_merge(mut entries: Vec<(EdgeKey, u32)>, p: u32) -> Vec<(EdgeKey, u32)> {
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(EdgeKey, u32)> = Vec::with_capacity(entries.len());
    for (k, c) in entries {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 = (last.1 + c) % p,
            _ => out.push((k, c % p)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

fn bump(v: &mut Vec<(EdgeKey, u32)>, key: EdgeKey, delta: u32, p: u32) {
    match v.binary_search_by(|e| e.0.cmp(&key)) {
        Ok(i) => {
            v[i].1 = (v[i].1 + delta) % p;
            if v[i].1 == 0 {
                v.remove(i);
            }
        }
        Err(i) => {
            if delta % p != 0 {
                v.insert(i, (key, delta % p));
            }
        }
    }
}

impl ExtensionChain {
    pub fn new(group: XGroup, primes: &[u32]) -> Result<Self> {
        if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        Ok(ExtensionChain {
            group,
            primes: primes.to_vec(),
            base_order: OnceLock::new(),
        })
    }

    /// Same base with a different prime list.
    pub fn with_primes(&self, primes: &[u32]) -> Result<Self> {
        let chain = ExtensionChain::new(self.group.clone(), primes)?;
        if let Some(known) = self.base_order.get() {
            let _ = chain.base_order.set(*known);
        }
        Ok(chain)
    }

    /// `|G₀|`, enumerated once; `None` if it exceeds the default cap.
    pub fn base_order(&self) -> Option<usize> {
        *self
            .base_order
            .get_or_init(|| materialize(&self.group, DEFAULT_CAP).ok().map(|t| t.len()))
    }

    pub fn depth(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn symbols(&self) -> usize {
        self.group.symbols()
    }

    pub fn base_group(&self) -> &XGroup {
        &self.group
    }

    pub fn level(&self, depth: usize) -> Level<'_> {
        assert!(depth <= self.depth(), "level {depth} beyond chain depth {}", self.depth());
        Level { chain: self, depth }
    }

    pub fn top(&self) -> Level<'_> {
        self.level(self.depth())
    }

    /// `|G_d| = |G_{d−1}|·p^{|G_{d−1}|(|X|−1)+1}`, saturating. The kernel of
    /// `G^{Ab(p)} ↠ G` is the mod-p cycle space of the Cayley graph.
    /// `None` when `|G₀|` itself is beyond the default cap.
    pub fn predicted_order(&self, depth: usize) -> Option<u128> {
        let k = self.symbols() as u128;
        let mut order = self.base_order()? as u128;
        for &p in &self.primes[..depth] {
            let exponent = order.saturating_mul(k.saturating_sub(1)).saturating_add(1);
            let factor = if exponent >= 128 {
                u128::MAX
            } else {
                (p as u128).checked_pow(exponent as u32).unwrap_or(u128::MAX)
            };
            order = order.saturating_mul(factor);
        }
        Some(order)
    }

    /// Image of `e` (at `from`) at the lower level `to`.
    pub fn project(&self, e: &ChainElement, from: usize, to: usize) -> ChainElement {
        let mut at = e;
        for _ in to..from {
            at = at.project();
        }
        at.clone()
    }

    /// Image of `e` in `G₀`.
    pub fn base_perm<'e>(&self, e: &'e ChainElement) -> &'e Perm {
        let mut at = e;
        loop {
            match at {
                ChainElement::Base(p) => return p,
                ChainElement::Ext(x) => at = &x.group,
            }
        }
    }

    fn identity_at(&self, d: usize) -> ChainElement {
        if d == 0 {
            ChainElement::Base(Perm::identity(self.group.degree()))
        } else {
            ChainElement::Ext(Box::new(ExtElement {
                vector: Vec::new(),
                group: self.identity_at(d - 1),
            }))
        }
    }

    fn base_of(e: &ChainElement) -> &Perm {
        match e {
            ChainElement::Base(p) => p,
            ChainElement::Ext(_) => panic!("extension element used at level 0"),
        }
    }

    fn ext_of(e: &ChainElement) -> &ExtElement {
        match e {
            ChainElement::Ext(x) => x,
            ChainElement::Base(_) => panic!("base element used at an extension level"),
        }
    }

    fn act(&self, d: usize, g: &ChainElement, v: &[(EdgeKey, u32)]) -> Vec<(EdgeKey, u32)> {
        let moved = v
            .iter()
            .map(|(k, c)| {
                (
                    EdgeKey {
                        source: self.mul_at(d - 1, g, &k.source),
                        symbol: k.symbol,
                    },
                    *c,
                )
            })
            .collect();
        sort_merge(moved, self.primes[d - 1])
    }

    fn mul_at(&self, d: usize, a: &ChainElement, b: &ChainElement) -> ChainElement {
        if d == 0 {
            return ChainElement::Base(Self::base_of(a).then(Self::base_of(b)));
        }
        let (a, b) = (Self::ext_of(a), Self::ext_of(b));
        let p = self.primes[d - 1];
        let mut entries = a.vector.clone();
        entries.extend(self.act(d, &a.group, &b.vector));
        ChainElement::Ext(Box::new(ExtElement {
            vector: sort_merge(entries, p),
            group: self.mul_at(d - 1, &a.group, &b.group),
        }))
    }

    fn inv_at(&self, d: usize, a: &ChainElement) -> ChainElement {
        if d == 0 {
            return ChainElement::Base(Self::base_of(a).inverse());
        }
        let a = Self::ext_of(a);
        let p = self.primes[d - 1];
        let g_inv = self.inv_at(d - 1, &a.group);
        let moved = self.act(d, &g_inv, &a.vector);
        ChainElement::Ext(Box::new(ExtElement {
            vector: moved.into_iter().map(|(k, c)| (k, (p - c) % p)).collect(),
            group: g_inv,
        }))
    }

    fn mul_letter_at(&self, d: usize, a: &ChainElement, l: Letter) -> ChainElement {
        if d == 0 {
            return ChainElement::Base(Self::base_of(a).then(&self.group.letter(l)));
        }
        let a = Self::ext_of(a);
        let p = self.primes[d - 1];
        let next = self.mul_letter_at(d - 1, &a.group, l);
        let mut vector = a.vector.clone();
        if l.inverted {
            // crossing the edge next --x--> a.group backwards
            let key = EdgeKey {
                source: next.clone(),
                symbol: l.symbol,
            };
            bump(&mut vector, key, p - 1, p);
        } else {
            let key = EdgeKey {
                source: a.group.clone(),
                symbol: l.symbol,
            };
            bump(&mut vector, key, 1, p);
        }
        ChainElement::Ext(Box::new(ExtElement {
            vector,
            group: next,
        }))
    }

    /// `[w]` at the top level.
    pub fn evaluate(&self, w: &[Letter]) -> ChainElement {
        self.top().evaluate(w)
    }

    pub fn format_element(&self, depth: usize, e: &ChainElement, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        self.write_element(depth, e, alphabet, &mut out);
        out
    }

    fn write_element(&self, d: usize, e: &ChainElement, alphabet: &Alphabet, out: &mut String) {
        if d == 0 {
            out.push_str(&Self::base_of(e).cycles());
            return;
        }
        let x = Self::ext_of(e);
        out.push('<');
        for (i, (k, c)) in x.vector.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.write_element(d - 1, &k.source, alphabet, out);
            write!(out, ".{}={}", alphabet.symbol(k.symbol), c).unwrap();
        }
        out.push('|');
        self.write_element(d - 1, &x.group, alphabet, out);
        out.push('>');
    }

    /// Inverse of [`format_element`](Self::format_element). Rejects vectors
    /// not in normal form. Base permutations are only checked for degree.
    pub fn parse_element(&self, depth: usize, text: &str, alphabet: &Alphabet) -> Result<ChainElement> {
        let chars: Vec<char> = text.trim().chars().collect();
        let mut pos = 0;
        let e = self.parse_at(depth, &chars, &mut pos, alphabet)?;
        if pos != chars.len() {
            return Err(parse_error(text, pos, "trailing input"));
        }
        Ok(e)
    }

    fn parse_at(&self, d: usize, s: &[char], pos: &mut usize, alphabet: &Alphabet) -> Result<ChainElement> {
        let text: String = s.iter().collect();
        if d == 0 {
            let start = *pos;
            while *pos < s.len() && (s[*pos] == '(' || s[*pos] == ')' || s[*pos] == ' ' || s[*pos].is_ascii_digit()) {
                *pos += 1;
            }
            let cycles: String = s[start..*pos].iter().collect();
            if cycles.trim().is_empty() {
                return Err(parse_error(&text, start, "expected a permutation"));
            }
            return Ok(ChainElement::Base(Perm::parse_cycles(&cycles, self.group.degree())?));
        }
        let p = self.primes[d - 1];
        expect(s, pos, '<', &text)?;
        let mut vector = Vec::new();
        if s.get(*pos) != Some(&'|') {
            loop {
                let source = self.parse_at(d - 1, s, pos, alphabet)?;
                expect(s, pos, '.', &text)?;
                let symbol = s
                    .get(*pos)
                    .and_then(|&c| alphabet.index_of(c))
                    .ok_or_else(|| parse_error(&text, *pos, "expected a generator"))?;
                *pos += 1;
                expect(s, pos, '=', &text)?;
                let start = *pos;
                while *pos < s.len() && s[*pos].is_ascii_digit() {
                    *pos += 1;
                }
                let coef: u32 = s[start..*pos]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| parse_error(&text, start, "expected a coefficient"))?;
                if coef == 0 || coef >= p {
                    return Err(parse_error(&text, start, "coefficient out of range"));
                }
                vector.push((EdgeKey { source, symbol }, coef));
                match s.get(*pos) {
                    Some(',') => *pos += 1,
                    Some('|') => break,
                    _ => return Err(parse_error(&text, *pos, "expected ',' or '|'")),
                }
            }
        }
        expect(s, pos, '|', &text)?;
        let group = self.parse_at(d - 1, s, pos, alphabet)?;
        expect(s, pos, '>', &text)?;
        if !vector.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(parse_error(&text, *pos, "vector entries not sorted"));
        }
        Ok(ChainElement::Ext(Box::new(ExtElement { vector, group })))
    }
}

fn parse_error(text: &str, pos: usize, msg: &str) -> Error {
    Error::Precondition(format!("bad element {text:?} at offset {pos}: {msg}"))
}

fn expect(s: &[char], pos: &mut usize, c: char, text: &str) -> Result<()> {
    if s.get(*pos) == Some(&c) {
        *pos += 1;
        Ok(())
    } else {
        Err(parse_error(text, *pos, &format!("expected {c:?}")))
    }
}

impl<'a> Level<'a> {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn chain(&self) -> &'a ExtensionChain {
        self.chain
    }

    /// The level directly below; level 0 stays put.
    pub fn below(&self) -> Level<'a> {
        Level {
            chain: self.chain,
            depth: self.depth.saturating_sub(1),
        }
    }

    pub fn prime(&self) -> Option<u32> {
        self.depth.checked_sub(1).map(|i| self.chain.primes[i])
    }

    pub fn predicted_order(&self) -> Option<u128> {
        self.chain.predicted_order(self.depth)
    }
}

impl FiniteGroup for Level<'_> {
    type Elem = ChainElement;

    fn symbols(&self) -> usize {
        self.chain.symbols()
    }

    fn identity(&self) -> ChainElement {
        self.chain.identity_at(self.depth)
    }

    fn mul(&self, a: &ChainElement, b: &ChainElement) -> ChainElement {
        self.chain.mul_at(self.depth, a, b)
    }

    fn inv(&self, a: &ChainElement) -> ChainElement {
        self.chain.inv_at(self.depth, a)
    }

    fn letter(&self, l: Letter) -> ChainElement {
        self.chain.mul_letter_at(self.depth, &self.identity(), l)
    }

    fn mul_letter(&self, a: &ChainElement, l: Letter) -> ChainElement {
        self.chain.mul_letter_at(self.depth, a, l)
    }

    fn order_hint(&self) -> Option<u128> {
        if self.depth == 0 {
            None
        } else {
            self.predicted_order()
        }
    }
}

/// `w(e)` for every positively oriented Cayley edge `e = (source, x)` crossed
/// by the path of `w` from the identity; zero counts are dropped.
pub fn signed_traversals<G: FiniteGroup>(g: &G, w: &[Letter]) -> BTreeMap<(G::Elem, usize), i64> {
    let mut counts: BTreeMap<(G::Elem, usize), i64> = BTreeMap::new();
    let mut at = g.identity();
    for &l in w {
        let next = g.mul_letter(&at, l);
        if l.inverted {
            *counts.entry((next.clone(), l.symbol)).or_default() -= 1;
        } else {
            *counts.entry((at.clone(), l.symbol)).or_default() += 1;
        }
        at = next;
    }
    counts.retain(|_, c| *c != 0);
    counts
}

/// `(Σ [w(e)]_p e, [w]_{G_{d−1}})` assembled from traversal counts at level `d − 1`.
pub fn star_element(chain: &ExtensionChain, depth: usize, w: &[Letter]) -> ChainElement {
    assert!(depth >= 1);
    let below = chain.level(depth - 1);
    let p = chain.primes[depth - 1] as i64;
    let vector = signed_traversals(&below, w)
        .into_iter()
        .filter_map(|((source, symbol), c)| {
            let c = c.rem_euclid(p) as u32;
            (c != 0).then_some((EdgeKey { source, symbol }, c))
        })
        .collect();
    ChainElement::Ext(Box::new(ExtElement {
        vector,
        group: below.evaluate(w),
    }))
}

/// Whether the symbolic product of generators agrees with the traversal
/// count formula for `w` at level `depth`.
pub fn check_star(chain: &ExtensionChain, depth: usize, w: &[Letter]) -> bool {
    chain.level(depth).evaluate(w) == star_element(chain, depth, w)
}

/// Materializes level `depth` (capped, failing early with its exact order)
/// and returns its table and Cayley graph.
pub fn cayley_graph_ext(
    chain: &ExtensionChain,
    depth: usize,
    cap: usize,
) -> Result<(GroupTable<ChainElement>, LabeledGraph)> {
    let table = materialize(&chain.level(depth), cap)?;
    let graph = table.cayley_graph();
    Ok((table, graph))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{free_reduce, Word};

    fn ab() -> Alphabet {
        Alphabet::new("xy").unwrap()
    }

    fn w(s: &str) -> Word {
        ab().parse_word(s).unwrap()
    }

    fn klein() -> XGroup {
        XGroup::new(vec![
            Perm::parse_cycles("(0 1)", 4).unwrap(),
            Perm::parse_cycles("(2 3)", 4).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn trivial_group_one_symbol_gives_z2() {
        let chain = build_extension(&XGroup::trivial(1), 2).unwrap();
        let level = chain.top();
        let x = level.letter(Letter::pos(0));
        assert_ne!(x, level.identity());
        assert_eq!(level.mul(&x, &x), level.identity());
        assert_eq!(chain.predicted_order(1), Some(2));
        assert_eq!(materialize(&level, 100).unwrap().len(), 2);
    }

    #[test]
    fn generator_projects_and_squares() {
        let chain = build_extension(&klein(), 2).unwrap();
        let level = chain.top();
        let x = level.letter(Letter::pos(0));
        let base_x = chain.base_group().letter(Letter::pos(0));
        let one = Perm::identity(4);
        assert_eq!(x.project(), &ChainElement::Base(base_x.clone()));
        let sq = level.mul(&x, &x);
        let ext = match &sq {
            ChainElement::Ext(e) => e,
            _ => unreachable!(),
        };
        assert_eq!(ext.group, ChainElement::Base(one.clone()));
        let keys: Vec<_> = ext.vector.iter().map(|(k, c)| (k.source.clone(), k.symbol, *c)).collect();
        assert_eq!(
            keys,
            vec![(ChainElement::Base(one), 0, 1), (ChainElement::Base(base_x), 0, 1)]
        );
    }

    #[test]
    fn commutator_survives() {
        let chain = build_extension(&klein(), 2).unwrap();
        let c = chain.evaluate(&w("xyXY"));
        assert_eq!(c.project(), &ChainElement::Base(Perm::identity(4)));
        assert_eq!(c.vector().len(), 4);
        assert!(c.vector().iter().all(|(_, coef)| *coef == 1));
        assert_eq!(chain.evaluate(&w("xX")), chain.top().identity());
        assert_eq!(chain.evaluate(&[]), chain.top().identity());
    }

    #[test]
    fn traversal_examples() {
        let g = XGroup::new(vec![Perm::parse_cycles("(0 1)", 2).unwrap(), Perm::identity(2)]).unwrap();
        let x = g.letter(Letter::pos(0));
        let id = g.identity();
        let t = signed_traversals(&g, &w("x"));
        assert_eq!(t.into_iter().collect::<Vec<_>>(), vec![((id.clone(), 0), 1)]);
        assert!(signed_traversals(&g, &w("xX")).is_empty());
        let t = signed_traversals(&g, &w("xx"));
        assert_eq!(t.len(), 2);
        assert_eq!(t[&(id, 0)], 1);
        assert_eq!(t[&(x, 0)], 1);
    }

    #[test]
    fn star_identity_on_fixed_words() {
        let chain = iterated_extension(&klein(), &[2, 3]).unwrap();
        for s in ["x", "X", "xyXY", "xxyYXyx", "YYYxyxyX", "1"] {
            assert!(check_star(&chain, 1, &w(s)), "{s}");
            assert!(check_star(&chain, 2, &w(s)), "{s}");
        }
    }

    #[test]
    fn level_two_projects_to_base() {
        let chain = iterated_extension(&klein(), &[2, 2]).unwrap();
        for s in ["xyXY", "xyxyy", "YxYXX"] {
            let word = w(s);
            let top = chain.evaluate(&word);
            let base = chain.base_group().evaluate(&word);
            assert_eq!(chain.base_perm(&top), &base);
            assert_eq!(chain.project(&top, 2, 1), chain.level(1).evaluate(&word));
        }
    }

    #[test]
    fn empty_chain_is_base() {
        let chain = iterated_extension(&klein(), &[]).unwrap();
        let e = chain.evaluate(&w("xy"));
        assert_eq!(chain.base_perm(&e), &klein().evaluate(&w("xy")));
    }

    #[test]
    fn exact_order_by_enumeration() {
        let z2 = XGroup::new(vec![Perm::parse_cycles("(0 1)", 2).unwrap(), Perm::identity(2)]).unwrap();
        let chain = build_extension(&z2, 2).unwrap();
        // 2 · 2^(2·1 + 1)
        assert_eq!(chain.predicted_order(1), Some(16));
        let (table, graph) = cayley_graph_ext(&chain, 1, 1000).unwrap();
        assert_eq!(table.len(), 16);
        assert!(graph.is_covering());
        let err = cayley_graph_ext(&chain, 1, 10).unwrap_err();
        assert!(err.to_string().contains("order 16"));

        let chain = build_extension(&klein(), 3).unwrap();
        assert_eq!(chain.predicted_order(1), Some(4 * 3u128.pow(5)));
        assert_eq!(materialize(&chain.top(), 10_000).unwrap().len(), 4 * 243);
    }

    #[test]
    fn kernel_is_abelian() {
        let chain = build_extension(&klein(), 2).unwrap();
        let u = w("xyXY");
        let v = w("xxyxYX");
        assert!(chain.base_group().evaluate(&v).is_identity());
        assert_eq!(chain.evaluate(&u.concat(&v)), chain.evaluate(&v.concat(&u)));
    }

    #[test]
    fn inverse_and_reduction() {
        let chain = iterated_extension(&klein(), &[3, 2]).unwrap();
        let level = chain.top();
        for s in ["xyyXyx", "YXyyx", "xXyYxy"] {
            let word = w(s);
            let e = level.evaluate(&word);
            assert_eq!(level.mul(&e, &level.inv(&e)), level.identity());
            assert_eq!(level.evaluate(&free_reduce(&word)), e);
            assert_eq!(level.evaluate(&word.inverse()), level.inv(&e));
        }
    }

    #[test]
    fn element_text_round_trip() {
        let a = ab();
        let chain = iterated_extension(&klein(), &[2, 3]).unwrap();
        for s in ["1", "x", "xyXY", "yxYYxy"] {
            for d in 0..=2 {
                let e = chain.level(d).evaluate(&w(s));
                let text = chain.format_element(d, &e, &a);
                assert_eq!(chain.parse_element(d, &text, &a).unwrap(), e, "{text}");
            }
        }
        assert!(chain.parse_element(1, "<()|(0 1 7)>", &a).is_err());
        assert!(chain.parse_element(1, "<().x=2|()>", &a).is_err());
    }

    #[test]
    fn rejects_composite_prime() {
        assert!(build_extension(&klein(), 4).is_err());
    }
}
