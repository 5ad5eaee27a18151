//! Recovering a factorization `w = h₁⋯hₙ` from seeds that only multiply to
//! `w` in the finite quotient `K = G_{n−1}`.
//!
//! The problem is recast as pieces `(Γᵢ, sᵢ, eᵢ, wᵢ)`: a reduced path of label
//! `wᵢ` from `sᵢ` to `eᵢ` in `Γᵢ`, with `[w₁⋯w_m]` trivial at level `m − 1`.
//! The goal is new paths with the same endpoints whose labels multiply to 1
//! in `F`. Two pieces are joined along a common spine of their Cayley paths;
//! more pieces are cut at a vertex shared with a middle path and solved as
//! two smaller problems.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::extension::{ChainElement, ExtensionChain, Level};
use crate::graph::{trace_unchecked, LabeledGraph, Path, VertexId};
use crate::group::{FiniteGroup, DEFAULT_CAP};
use crate::stallings::{normalize_generators, PointedImmersion};
use crate::word::{free_reduce, reduce_product, Letter, ReducedWord, Word};

use super::spine::{common_spine, project_path, CayleyPath, PathSpan};
use super::{image_subgroup, product_membership, ProductSetup};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<ReducedWord>,
}

impl Factorization {
    /// Each factor lies in its subgroup and the product reduces to `w`.
    pub fn verify(&self, subgroups: &[PointedImmersion], w: &[Letter]) -> bool {
        self.factors.len() == subgroups.len()
            && self.factors.iter().zip(subgroups).all(|(h, s)| s.contains(h))
            && reduce_product(self.factors.iter().map(|h| h.letters())) == free_reduce(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSource {
    Given,
    Searched,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizeReport {
    pub seeds: SeedSource,
    pub seed_words: Vec<ReducedWord>,
    /// Problems of three or more pieces that were cut in two.
    pub cuts: usize,
    /// Two-piece problems joined along a spine.
    pub spines: usize,
}

#[derive(Debug, Clone)]
pub struct FactorizeOptions {
    /// `p₁, …, p_{n−1}`; all 2 when `None`.
    pub primes: Option<Vec<u32>>,
    pub cap: usize,
}

impl Default for FactorizeOptions {
    fn default() -> Self {
        FactorizeOptions {
            primes: None,
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub graph: usize,
    pub start: VertexId,
    pub end: VertexId,
    pub label: ReducedWord,
}

struct Solver<'a> {
    graphs: Vec<&'a LabeledGraph>,
    chain: &'a ExtensionChain,
    cuts: usize,
    spines: usize,
}

fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}

impl Solver<'_> {
    fn reference_path(&self, piece: &Piece) -> Result<Path> {
        let g = self.graphs[piece.graph];
        let path = trace_unchecked(g, piece.start, &piece.label)
            .ok_or_else(|| internal(format!("piece label does not read in graph {}", piece.graph)))?;
        if path.end(g) != piece.end {
            return Err(internal(format!("piece path in graph {} ends at the wrong vertex", piece.graph)));
        }
        Ok(path)
    }

    fn solve(&mut self, pieces: &[Piece]) -> Result<Vec<Path>> {
        let m = pieces.len();
        if m == 1 {
            let p = &pieces[0];
            return if p.start == p.end {
                Ok(vec![Path::empty(p.start)])
            } else {
                Err(internal("single piece with distinct endpoints"))
            };
        }
        let premise = self.chain.level(m - 1);
        let total = reduce_product(pieces.iter().map(|p| p.label.letters()));
        if premise.evaluate(&total) != premise.identity() {
            return Err(internal(format!("{m} pieces do not multiply to 1 at level {}", m - 1)));
        }
        let level = self.chain.level(m - 2);
        let prime = self.chain.primes()[m - 2];
        let gammas: Vec<Path> = pieces.iter().map(|p| self.reference_path(p)).collect::<Result<_>>()?;
        let mut etas: Vec<CayleyPath<ChainElement>> = Vec::with_capacity(m);
        let mut at = level.identity();
        for p in pieces {
            let eta = CayleyPath::trace(&level, at, &p.label);
            at = eta.end().clone();
            etas.push(eta);
        }
        if at != level.identity() {
            return Err(internal("Cayley paths do not close up"));
        }
        if m == 2 {
            self.join(pieces, &gammas, &etas, prime)
        } else {
            self.cut(pieces, &gammas, &etas, &level)
        }
    }

    fn join(
        &mut self,
        pieces: &[Piece],
        gammas: &[Path],
        etas: &[CayleyPath<ChainElement>],
        prime: u32,
    ) -> Result<Vec<Path>> {
        self.spines += 1;
        let d1 = PathSpan::of(&etas[0]);
        let d2 = PathSpan::of(&etas[1]);
        let spine = common_spine(&d1, &d2, &etas[0], prime).map_err(|cert| {
            internal(format!(
                "no common spine: |Ω| = {}, {} exits, {} entries",
                cert.omega.len(),
                cert.out_steps.len(),
                cert.in_steps.len()
            ))
        })?;
        let g1 = self.graphs[pieces[0].graph];
        let g2 = self.graphs[pieces[1].graph];
        let gamma1 = project_path(g1, &spine, &etas[0], &gammas[0]).map_err(|e| internal(e.to_string()))?;
        let gamma2 =
            project_path(g2, &spine.reversed(), &etas[1], &gammas[1]).map_err(|e| internal(e.to_string()))?;
        if gamma1.end(g1) != pieces[0].end || gamma2.end(g2) != pieces[1].end {
            return Err(internal("projected spine misses an endpoint"));
        }
        Ok(vec![gamma1, gamma2])
    }

    fn cut(
        &mut self,
        pieces: &[Piece],
        gammas: &[Path],
        etas: &[CayleyPath<ChainElement>],
        level: &Level<'_>,
    ) -> Result<Vec<Path>> {
        self.cuts += 1;
        let m = pieces.len();
        let spans: Vec<PathSpan<ChainElement>> = etas.iter().map(PathSpan::of).collect();
        let one = level.identity();
        let omega = spans[0].intersect(&spans[m - 1]).component(&one);
        let (j, g) = (1..m - 1)
            .find_map(|j| {
                spans[j]
                    .vertices
                    .iter()
                    .find(|v| omega.contains_vertex(v))
                    .map(|v| (j, v.clone()))
            })
            .ok_or_else(|| internal("no middle path meets the identity component"))?;

        // ζ: prefix of η_j up to its first visit of g
        let zeta_len = etas[j].first_visit(&g).expect("g lies on η_j");
        // η: prefix of η₁ ending at g inside Ω, else a shortest path in Ω
        let eta = (0..=etas[0].len())
            .find(|&k| {
                etas[0].vertices[k] == g && etas[0].vertices[..=k].iter().all(|v| omega.contains_vertex(v)) && {
                    let prefix = etas[0].prefix(k);
                    (0..k).all(|i| omega.contains_edge(&prefix.step(i).0))
                }
            })
            .map(|k| etas[0].prefix(k))
            .or_else(|| omega.shortest_path(&one, &g))
            .ok_or_else(|| internal("g unreachable inside the identity component"))?;

        let (g1, gm, gj) = (
            self.graphs[pieces[0].graph],
            self.graphs[pieces[m - 1].graph],
            self.graphs[pieces[j].graph],
        );
        let beta1 = project_path(g1, &eta, &etas[0], &gammas[0]).map_err(|e| internal(e.to_string()))?;
        let beta_m = project_path(gm, &eta, &etas[m - 1].reversed(), &gammas[m - 1].reversed(gm))
            .map_err(|e| internal(e.to_string()))?;
        let d = {
            let prefix = Path {
                start: gammas[j].start,
                edges: gammas[j].edges[..zeta_len].to_vec(),
            };
            prefix.end(gj)
        };
        let eta_label = ReducedWord::empty().mul(&eta.label);
        let zeta_label = free_reduce(&pieces[j].label[..zeta_len]);
        let zeta_rest = free_reduce(&pieces[j].label[zeta_len..]);

        let mut left = vec![Piece {
            graph: pieces[0].graph,
            start: beta1.end(g1),
            end: pieces[0].end,
            label: eta_label.inverse().mul(&pieces[0].label),
        }];
        left.extend(pieces[1..j].iter().cloned());
        left.push(Piece {
            graph: pieces[j].graph,
            start: pieces[j].start,
            end: d,
            label: zeta_label,
        });
        let mut right = vec![Piece {
            graph: pieces[j].graph,
            start: d,
            end: pieces[j].end,
            label: zeta_rest,
        }];
        right.extend(pieces[j + 1..m - 1].iter().cloned());
        right.push(Piece {
            graph: pieces[m - 1].graph,
            start: pieces[m - 1].start,
            end: beta_m.end(gm),
            label: pieces[m - 1].label.mul(&eta_label),
        });

        let left_paths = self.solve(&left)?;
        let right_paths = self.solve(&right)?;

        let concat = |a: &Path, b: &Path| Path {
            start: a.start,
            edges: a.edges.iter().chain(&b.edges).copied().collect(),
        };
        let mut out = Vec::with_capacity(m);
        out.push(concat(&beta1, &left_paths[0]));
        out.extend(left_paths[1..j].iter().cloned());
        out.push(concat(&left_paths[j], &right_paths[0]));
        out.extend(right_paths[1..right_paths.len() - 1].iter().cloned());
        out.push(concat(right_paths.last().unwrap(), &beta_m.reversed(gm)));

        let labels: Vec<Vec<Letter>> = out
            .iter()
            .zip(pieces)
            .map(|(p, piece)| p.label(self.graphs[piece.graph]))
            .collect();
        if !reduce_product(labels.iter().map(|l| l.as_slice())).is_identity() {
            return Err(internal("recombined paths do not multiply to 1"));
        }
        Ok(out)
    }
}

/// Words `hᵢ′ ∈ Hᵢ` with `[h₁′⋯hₙ′]_K = [w]_K`, by enumerating the subgroup
/// images in `K`. `None` when `[w]_K` is not in the product image.
pub fn find_seeds(setup: &ProductSetup, chain: &ExtensionChain, cap: usize) -> Result<Option<Vec<ReducedWord>>> {
    let k = chain.top();
    let images = setup
        .generators
        .iter()
        .map(|g| image_subgroup(&k, g, cap))
        .collect::<Result<Vec<_>>>()?;
    let target = k.evaluate(&setup.word);
    let (found, _) = product_membership(&k, &images, &target, cap)?;
    Ok(found.map(|idx| idx.iter().zip(&images).map(|(&i, img)| img.witness(i)).collect()))
}

/// A nontrivial `u ∈ H` with `[u]_K = 1`: a reduced loop at `(base, 1)` in the
/// product of `S(H)` with the Cayley graph of `K`, found by BFS over at most
/// `cap` states. Falls back to a power of a generator.
pub fn kernel_loop<G: FiniteGroup>(h: &PointedImmersion, k: &G, cap: usize) -> Option<ReducedWord> {
    let g = &h.graph;
    let start = (h.base, k.identity());
    let mut tree: HashMap<(VertexId, G::Elem), Vec<Letter>> = HashMap::from([(start.clone(), Vec::new())]);
    let mut queue = VecDeque::from([start]);
    while let Some((v, e)) = queue.pop_front() {
        let here = tree[&(v, e.clone())].clone();
        for l in Letter::all(g.symbols()) {
            let Some(edge) = g.out_edge(v, l) else { continue };
            let next = (g.dst(edge), k.mul_letter(&e, l));
            match tree.get(&next) {
                Some(there) => {
                    let mut w = here.clone();
                    w.push(l);
                    let u = free_reduce(&Word(w).concat(&Word(there.clone()).inverse()));
                    if !u.is_identity() {
                        return Some(u);
                    }
                }
                None if tree.len() < cap => {
                    let mut w = here.clone();
                    w.push(l);
                    tree.insert(next.clone(), w);
                    queue.push_back(next);
                }
                None => {}
            }
        }
    }
    for gen in crate::stallings::subgroup_basis(h) {
        let x = k.evaluate(&gen);
        let mut power = x.clone();
        let mut n = 1usize;
        while power != k.identity() && n < cap {
            power = k.mul(&power, &x);
            n += 1;
        }
        if power == k.identity() {
            let letters: Vec<Letter> = (0..n).flat_map(|_| gen.letters().iter().copied()).collect();
            return Some(free_reduce(&letters));
        }
    }
    None
}

/// Replaces `h₁′` by `h₁′u` for a kernel loop `u` of `H₁`, when one is found.
pub fn scramble_seeds(
    setup: &ProductSetup,
    chain: &ExtensionChain,
    seeds: &[ReducedWord],
    cap: usize,
) -> (Vec<ReducedWord>, bool) {
    let mut out = seeds.to_vec();
    match kernel_loop(&setup.subgroups[0], &chain.top(), cap) {
        Some(u) => {
            out[0] = out[0].mul(&u);
            (out, true)
        }
        None => (out, false),
    }
}

/// Writes `w = h₁⋯hₙ` with `hᵢ ∈ Hᵢ`, or returns `None` if no seeds exist
/// in `K`. Given seeds must lie in their subgroups and multiply to `[w]_K`.
pub fn factorize(
    symbols: usize,
    hs: &[Vec<Word>],
    w: &Word,
    seeds: Option<&[Word]>,
    options: &FactorizeOptions,
) -> Result<Option<(Factorization, FactorizeReport)>> {
    let setup = ProductSetup::new(symbols, hs, w)?;
    let n = setup.n();
    let primes = options.primes.clone().unwrap_or_else(|| vec![2; n - 1]);
    if primes.len() + 1 != n {
        return Err(Error::Precondition(format!("{n} subgroups need {} primes", n - 1)));
    }
    let chain = ExtensionChain::new(setup.group.clone(), &primes)?;
    factorize_with(&setup, &chain, seeds, options.cap)
}

/// [`factorize`] over a prepared setup and chain.
pub fn factorize_with(
    setup: &ProductSetup,
    chain: &ExtensionChain,
    seeds: Option<&[Word]>,
    cap: usize,
) -> Result<Option<(Factorization, FactorizeReport)>> {
    let n = setup.n();
    let k = chain.top();
    let (seed_words, source) = match seeds {
        Some(s) => {
            if s.len() != n {
                return Err(Error::Precondition(format!("expected {n} seeds, got {}", s.len())));
            }
            let reduced: Vec<ReducedWord> = s.iter().map(|x| x.reduce()).collect();
            for (i, (r, h)) in reduced.iter().zip(&setup.subgroups).enumerate() {
                if !h.contains(r) {
                    return Err(Error::Precondition(format!("seed {} is not in its subgroup", i + 1)));
                }
            }
            let product = reduce_product(reduced.iter().map(|r| r.letters()));
            if k.evaluate(&product) != k.evaluate(&setup.word) {
                return Err(Error::Precondition("seeds do not multiply to the word in K".into()));
            }
            (reduced, SeedSource::Given)
        }
        None => match find_seeds(setup, chain, cap)? {
            Some(found) => (found, SeedSource::Searched),
            None => return Ok(None),
        },
    };

    let mut pieces: Vec<Piece> = (0..n - 1)
        .map(|i| Piece {
            graph: i,
            start: setup.subgroups[i].base,
            end: setup.subgroups[i].base,
            label: seed_words[i].clone(),
        })
        .collect();
    pieces.push(Piece {
        graph: n - 1,
        start: setup.attached.omega,
        end: setup.attached.alpha,
        label: seed_words[n - 1].mul(&setup.word.inverse()),
    });
    let mut solver = Solver {
        graphs: (0..n).map(|i| setup.graph(i)).collect(),
        chain,
        cuts: 0,
        spines: 0,
    };
    let paths = solver.solve(&pieces)?;
    let mut factors: Vec<ReducedWord> = paths[..n - 1]
        .iter()
        .enumerate()
        .map(|(i, p)| free_reduce(&p.label(setup.graph(i))))
        .collect();
    let last = paths[n - 1].label(setup.graph(n - 1));
    factors.push(free_reduce(&last).mul(&setup.word));
    let result = Factorization { factors };
    if !result.verify(&setup.subgroups, &setup.word) {
        return Err(internal("factorization failed its final check"));
    }
    Ok(Some((
        result,
        FactorizeReport {
            seeds: source,
            seed_words,
            cuts: solver.cuts,
            spines: solver.spines,
        },
    )))
}

/// Normalized generators of every subgroup, as used by the setup.
pub fn normalized(hs: &[Vec<Word>]) -> Vec<Vec<ReducedWord>> {
    hs.iter().map(|g| normalize_generators(g)).collect()
}
