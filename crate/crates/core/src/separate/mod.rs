//! Separating a word from a subgroup or a product of subgroups in a finite
//! quotient, and factorizing words that cannot be separated.

mod affine;
mod factorize;
mod spine;

use std::collections::{HashMap, HashSet};

pub use affine::{affine_image, affine_product_member, AffineImage, Span};
pub use factorize::{
    factorize, factorize_with, find_seeds, kernel_loop, normalized, scramble_seeds, FactorizeOptions, FactorizeReport, Factorization, Piece,
    SeedSource,
};
pub use spine::{common_spine, project_path, CayleyPath, CountingCertificate, EdgeRef, PathSpan, ProjectError};

use crate::cover::{expand_to_cover, transition_group, CoveringExpansion};
use crate::error::{Error, Result};
use crate::extension::{iterated_extension, ChainElement, ExtensionChain};
use crate::graph::LabeledGraph;
use crate::group::{diagonal_subgroup, FiniteGroup, Perm, XGroup};
use crate::stallings::{attach_word, normalize_generators, stallings_graph, AttachedImmersion, PointedImmersion};
use crate::word::{reduce_product, ReducedWord, Word};

/// `[H]_K` with, for every element, the generator sequence reaching it.
#[derive(Debug, Clone)]
pub struct ImageSubgroup<E> {
    generators: Vec<ReducedWord>,
    elements: Vec<E>,
    index: HashMap<E, usize>,
    parent: Vec<(usize, usize)>,
}

/// Closes the images of `gens` in `k` under right multiplication by them.
pub fn image_subgroup<G: FiniteGroup>(k: &G, gens: &[ReducedWord], cap: usize) -> Result<ImageSubgroup<G::Elem>> {
    let images: Vec<G::Elem> = gens.iter().map(|g| k.evaluate(g)).collect();
    let id = k.identity();
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut parent = vec![(0usize, usize::MAX)];
    let mut i = 0;
    while i < elements.len() {
        for (j, img) in images.iter().enumerate() {
            let next = k.mul(&elements[i], img);
            if index.contains_key(&next) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::CapExceeded {
                    what: "subgroup image",
                    cap,
                    order: None,
                });
            }
            index.insert(next.clone(), elements.len());
            elements.push(next);
            parent.push((i, j));
        }
        i += 1;
    }
    Ok(ImageSubgroup {
        generators: gens.to_vec(),
        elements,
        index,
        parent,
    })
}

impl<E: Clone + Eq + std::hash::Hash> ImageSubgroup<E> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn contains(&self, e: &E) -> bool {
        self.index.contains_key(e)
    }

    pub fn position(&self, e: &E) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Generator indices whose product is element `i`.
    pub fn generator_path(&self, i: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut at = i;
        while at != 0 {
            let (p, j) = self.parent[at];
            path.push(j);
            at = p;
        }
        path.reverse();
        path
    }

    /// A word of the subgroup evaluating to element `i`.
    pub fn witness(&self, i: usize) -> ReducedWord {
        let path = self.generator_path(i);
        reduce_product(path.iter().map(|&j| self.generators[j].letters()))
    }

    pub fn witness_of(&self, e: &E) -> Option<ReducedWord> {
        self.position(e).map(|i| self.witness(i))
    }
}

/// Certificate that `w ∉ H`: in the transition group `K` of a covering
/// expansion of `S(H)_w`, every generator of `H` fixes the base while `[w]_K`
/// does not.
#[derive(Debug, Clone)]
pub struct HallWitness {
    pub attached: AttachedImmersion,
    pub cover: CoveringExpansion,
    pub group: XGroup,
    pub generators: Vec<ReducedWord>,
    pub word: ReducedWord,
}

impl HallWitness {
    pub fn base(&self) -> usize {
        self.attached.omega
    }

    pub fn generator_images(&self) -> Vec<Perm> {
        self.generators.iter().map(|h| self.group.evaluate(h)).collect()
    }

    pub fn word_image(&self) -> Perm {
        self.group.evaluate(&self.word)
    }

    pub fn verify(&self) -> bool {
        let v = self.base();
        self.generator_images().iter().all(|p| p.apply(v) == v) && self.word_image().apply(v) != v
    }
}

pub fn hall_separator(symbols: usize, gens: &[Word], w: &Word) -> Result<HallWitness> {
    let h = stallings_graph(symbols, gens);
    let word = w.reduce();
    if h.contains(&word) {
        return Err(Error::Precondition("word lies in the subgroup".into()));
    }
    let attached = attach_word(&h, &word);
    let cover = expand_to_cover(&attached.graph)?;
    let group = transition_group(&cover);
    Ok(HallWitness {
        attached,
        cover,
        group,
        generators: normalize_generators(gens),
        word,
    })
}

/// The graphs `Γᵢ = S(Hᵢ)` for `i < n` and `Γₙ = S(Hₙ)_w`, their canonical
/// covering expansions and the diagonal `G` of the transition groups.
#[derive(Debug, Clone)]
pub struct ProductSetup {
    pub subgroups: Vec<PointedImmersion>,
    pub generators: Vec<Vec<ReducedWord>>,
    pub attached: AttachedImmersion,
    pub expansions: Vec<CoveringExpansion>,
    pub group: XGroup,
    pub word: ReducedWord,
}

impl ProductSetup {
    pub fn new(symbols: usize, hs: &[Vec<Word>], w: &Word) -> Result<Self> {
        if hs.is_empty() {
            return Err(Error::Precondition("need at least one subgroup".into()));
        }
        let subgroups: Vec<PointedImmersion> = hs.iter().map(|g| stallings_graph(symbols, g)).collect();
        let word = w.reduce();
        let attached = attach_word(subgroups.last().unwrap(), &word);
        let mut expansions = Vec::with_capacity(hs.len());
        for h in &subgroups[..hs.len() - 1] {
            expansions.push(expand_to_cover(&h.graph)?);
        }
        expansions.push(expand_to_cover(&attached.graph)?);
        let groups: Vec<XGroup> = expansions.iter().map(transition_group).collect();
        let group = diagonal_subgroup(&groups)?;
        Ok(ProductSetup {
            generators: hs.iter().map(|g| normalize_generators(g)).collect(),
            subgroups,
            attached,
            expansions,
            group,
            word,
        })
    }

    pub fn n(&self) -> usize {
        self.subgroups.len()
    }

    /// `Γᵢ`, zero-based.
    pub fn graph(&self, i: usize) -> &LabeledGraph {
        if i + 1 == self.n() {
            &self.attached.graph
        } else {
            &self.subgroups[i].graph
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationStatus {
    /// `[w]_K ∉ [H₁]_K⋯[Hₙ]_K`, checked by enumeration.
    Separated,
    /// `[w]_K` lies in the product image.
    NotSeparated,
    /// The product image was too large to enumerate.
    Partial,
}

#[derive(Debug, Clone)]
pub struct ProductWitness {
    pub setup: ProductSetup,
    pub chain: ExtensionChain,
    pub word_image: ChainElement,
    pub generator_images: Vec<Vec<ChainElement>>,
    /// `|[Hᵢ]_K|`, when computed and below `u128::MAX`.
    pub image_sizes: Vec<Option<u128>>,
    /// Size of `[H₁]_K⋯[H_{n−1}]_K`, when computed.
    pub product_size: Option<u128>,
    pub status: SeparationStatus,
}

/// Whether `target ∈ A₁⋯Aₙ`, enumerating the product of all but the last
/// factor. Returns the witness indices per factor when it is.
pub(crate) fn product_membership<G: FiniteGroup>(
    k: &G,
    images: &[ImageSubgroup<G::Elem>],
    target: &G::Elem,
    cap: usize,
) -> Result<(Option<Vec<usize>>, usize)> {
    let (last, rest) = images.split_last().expect("nonempty");
    let mut layer: Vec<(G::Elem, Vec<usize>)> = vec![(k.identity(), Vec::new())];
    for a in rest {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (s, path) in &layer {
            for (i, e) in a.elements().iter().enumerate() {
                let product = k.mul(s, e);
                if seen.insert(product.clone()) {
                    if next.len() >= cap {
                        return Err(Error::CapExceeded {
                            what: "product image",
                            cap,
                            order: None,
                        });
                    }
                    let mut p = path.clone();
                    p.push(i);
                    next.push((product, p));
                }
            }
        }
        layer = next;
    }
    let size = layer.len();
    for (s, path) in layer {
        let rest = k.mul(&k.inv(&s), target);
        if let Some(i) = last.position(&rest) {
            let mut p = path;
            p.push(i);
            return Ok((Some(p), size));
        }
    }
    Ok((None, size))
}

/// Elimination over Schreier generators is quadratic, so the two-factor route
/// spends `cap / SCHREIER_SHARE` of them.
pub const SCHREIER_SHARE: usize = 100;

type StatusParts = (SeparationStatus, Vec<Option<u128>>, Option<u128>);

/// Two factors: images kept as transversal plus kernel subspace, so only the
/// images one level down are enumerated (at most `cap` elements each).
fn affine_status(chain: &ExtensionChain, gens: &[Vec<ReducedWord>], target: &ChainElement, cap: usize) -> Result<StatusParts> {
    let mut images = Vec::new();
    for g in gens {
        match affine_image(chain, g, (cap / SCHREIER_SHARE).max(1)) {
            Ok(a) => images.push(a),
            Err(e) if e.is_cap() => return Ok((SeparationStatus::Partial, vec![None; gens.len()], None)),
            Err(e) => return Err(e),
        }
    }
    let sizes: Vec<Option<u128>> = images.iter().map(|a| a.order()).collect();
    let status = if affine_product_member(chain, &images[0], &images[1], target).is_some() {
        SeparationStatus::NotSeparated
    } else {
        SeparationStatus::Separated
    };
    Ok((status, sizes.clone(), sizes[0]))
}

/// Any number of factors, by listing every element of every image.
fn enumerated_status<G: FiniteGroup>(k: &G, gens: &[Vec<ReducedWord>], target: &G::Elem, cap: usize) -> Result<StatusParts> {
    let mut images = Vec::new();
    let mut sizes = Vec::new();
    for g in gens {
        match image_subgroup(k, g, cap) {
            Ok(img) => {
                sizes.push(Some(img.len() as u128));
                images.push(img);
            }
            Err(e) if e.is_cap() => sizes.push(None),
            Err(e) => return Err(e),
        }
    }
    if images.len() < gens.len() {
        return Ok((SeparationStatus::Partial, sizes, None));
    }
    Ok(match product_membership(k, &images, target, cap) {
        Ok((Some(_), size)) => (SeparationStatus::NotSeparated, sizes, Some(size as u128)),
        Ok((None, size)) => (SeparationStatus::Separated, sizes, Some(size as u128)),
        Err(e) if e.is_cap() => (SeparationStatus::Partial, sizes, None),
        Err(e) => return Err(e),
    })
}

/// Builds `K = G_{n−1}` over the diagonal `G` and checks by enumeration
/// whether `[w]_K` avoids the product of the subgroup images.
pub fn product_separator(
    symbols: usize,
    hs: &[Vec<Word>],
    w: &Word,
    primes: &[u32],
    cap: usize,
) -> Result<ProductWitness> {
    if primes.len() + 1 != hs.len() {
        return Err(Error::Precondition(format!(
            "{} subgroups need {} primes, got {}",
            hs.len(),
            hs.len().saturating_sub(1),
            primes.len()
        )));
    }
    let setup = ProductSetup::new(symbols, hs, w)?;
    let chain = iterated_extension(&setup.group, primes)?;
    let k = chain.top();
    let word_image = k.evaluate(&setup.word);
    let generator_images = setup
        .generators
        .iter()
        .map(|gens| gens.iter().map(|g| k.evaluate(g)).collect())
        .collect();
    let (status, image_sizes, product_size) = if setup.n() == 2 {
        affine_status(&chain, &setup.generators, &word_image, cap)?
    } else {
        enumerated_status(&k, &setup.generators, &word_image, cap)?
    };
    Ok(ProductWitness {
        setup,
        chain,
        word_image,
        generator_images,
        image_sizes,
        product_size,
        status,
    })
}
