//! Subgroup images in a top-level extension `K = V ⋊ B`, kept as
//! `(image in B, transversal, kernel subspace of V)` instead of as an element
//! list. The kernel is spanned by Schreier generators, so nothing of size
//! `|[H]_K|` is ever stored.

use std::collections::{BTreeMap, HashMap};

use super::{image_subgroup, ImageSubgroup};
use crate::error::{Error, Result};
use crate::extension::{ChainElement, EdgeKey, ExtensionChain};
use crate::group::FiniteGroup;
use crate::word::ReducedWord;

type Vector = Vec<(EdgeKey, u32)>;

fn inverse_mod(c: u32, p: u32) -> u32 {
    let (mut base, mut exp, mut acc) = (c as u64, p as u64 - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// A subspace of `(Z/p)^E` in echelon form. Keys are interned to integers;
/// each row's smallest id is its pivot with coefficient 1.
#[derive(Debug, Clone, Default)]
pub struct Span {
    prime: u32,
    ids: HashMap<EdgeKey, u32>,
    keys: Vec<EdgeKey>,
    rows: HashMap<u32, Vec<(u32, u32)>>,
}

impl Span {
    pub fn new(prime: u32) -> Self {
        Span {
            prime,
            ..Default::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// The echelon rows, as vectors over edge keys.
    pub fn basis(&self) -> impl Iterator<Item = Vector> + '_ {
        self.rows
            .values()
            .map(|row| row.iter().map(|&(id, c)| (self.keys[id as usize].clone(), c)).collect())
    }

    fn reduce(&self, mut v: BTreeMap<u32, u32>) -> BTreeMap<u32, u32> {
        let p = self.prime;
        let mut residue = BTreeMap::new();
        while let Some((id, c)) = v.pop_first() {
            let Some(row) = self.rows.get(&id) else {
                residue.insert(id, c);
                continue;
            };
            for &(other, r) in &row[1..] {
                let entry = v.entry(other).or_insert(0);
                *entry = (*entry + (p - c) * r) % p;
                if *entry == 0 {
                    v.remove(&other);
                }
            }
        }
        residue
    }

    pub fn contains(&self, v: &[(EdgeKey, u32)]) -> bool {
        let mut ids = BTreeMap::new();
        for (k, c) in v {
            match self.ids.get(k) {
                Some(&id) => ids.insert(id, *c),
                None => return false,
            };
        }
        self.reduce(ids).is_empty()
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[(EdgeKey, u32)]) -> bool {
        let mut ids = BTreeMap::new();
        for (k, c) in v {
            let next = self.keys.len() as u32;
            let id = *self.ids.entry(k.clone()).or_insert(next);
            if id == next {
                self.keys.push(k.clone());
            }
            ids.insert(id, *c);
        }
        let residue = self.reduce(ids);
        let Some((&pivot, &lead)) = residue.iter().next() else {
            return false;
        };
        let scale = inverse_mod(lead, self.prime);
        let row = residue.into_iter().map(|(k, c)| (k, c * scale % self.prime)).collect();
        self.rows.insert(pivot, row);
        true
    }
}

fn split(e: &ChainElement) -> (&[(EdgeKey, u32)], &ChainElement) {
    match e {
        ChainElement::Ext(x) => (&x.vector, &x.group),
        ChainElement::Base(_) => panic!("affine images live at an extension level"),
    }
}

/// `[H]_K` for `K` the top level of a chain of depth at least 1.
#[derive(Debug, Clone)]
pub struct AffineImage {
    /// `[H]` one level down, with generator paths.
    pub base: ImageSubgroup<ChainElement>,
    /// For each base element `b`, an element of `[H]_K` projecting to `b`.
    pub reps: Vec<ChainElement>,
    /// `[H]_K ∩ V`.
    pub kernel: Span,
}

impl AffineImage {
    /// |[H]_K| = |base|·p^dim, or `None` on overflow.
    pub fn order(&self) -> Option<u128> {
        let p = self.kernel.prime as u128;
        (self.base.len() as u128).checked_mul(p.checked_pow(self.kernel.dim() as u32)?)
    }

    pub fn contains<G: FiniteGroup<Elem = ChainElement>>(&self, k: &G, e: &ChainElement) -> bool {
        let (_, g) = split(e);
        let Some(i) = self.base.position(g) else { return false };
        let rest = k.mul(e, &k.inv(&self.reps[i]));
        self.kernel.contains(split(&rest).0)
    }
}

/// Enumerates the image one level down and at most `cap` Schreier generators.
pub fn affine_image(chain: &ExtensionChain, gens: &[ReducedWord], cap: usize) -> Result<AffineImage> {
    let depth = chain.depth();
    if depth == 0 {
        return Err(Error::Precondition("affine images need an extension level".into()));
    }
    let k = chain.top();
    let below = chain.level(depth - 1);
    let base = image_subgroup(&below, gens, cap / gens.len().max(1))?;
    let images: Vec<ChainElement> = gens.iter().map(|g| k.evaluate(g)).collect();
    let mut reps = Vec::with_capacity(base.len());
    reps.push(k.identity());
    for i in 1..base.len() {
        let (parent, j) = base.parent[i];
        reps.push(k.mul(&reps[parent], &images[j]));
    }
    let mut schreier = Vec::with_capacity(base.len() * images.len());
    for i in 0..base.len() {
        for img in &images {
            let b = below.mul(&base.elements()[i], split(img).1);
            let t = base.position(&b).expect("base image is closed");
            let s = k.mul(&k.mul(&reps[i], img), &k.inv(&reps[t]));
            if let ChainElement::Ext(x) = s {
                schreier.push(x.vector);
            }
        }
    }
    // short vectors first keeps the echelon rows sparse
    schreier.sort_by_key(|v| v.len());
    let mut kernel = Span::new(chain.primes()[depth - 1]);
    for v in &schreier {
        kernel.insert(v);
    }
    Ok(AffineImage { base, reps, kernel })
}

/// Whether `target ∈ A₁A₂`. Returns base indices `(i, j)` of a witness pair.
pub fn affine_product_member(
    chain: &ExtensionChain,
    a1: &AffineImage,
    a2: &AffineImage,
    target: &ChainElement,
) -> Option<(usize, usize)> {
    let k = chain.top();
    let below = k.below();
    let (_, gamma) = split(target);
    // a₁ = T₁(i)·l with l ∈ L₁, and L₁ is normal in A₁, so
    // a₁⁻¹w ∈ A₂ for some l iff T₁(i)⁻¹ w T₂(j)⁻¹ ∈ L₁ + L₂.
    let mut span = a2.kernel.clone();
    for row in a1.kernel.basis() {
        span.insert(&row);
    }
    for (i, g1) in a1.base.elements().iter().enumerate() {
        let g2 = below.mul(&below.inv(g1), gamma);
        let Some(j) = a2.base.position(&g2) else { continue };
        let y = k.mul(&k.mul(&k.inv(&a1.reps[i]), target), &k.inv(&a2.reps[j]));
        if span.contains(split(&y).0) {
            return Some((i, j));
        }
    }
    None
}
