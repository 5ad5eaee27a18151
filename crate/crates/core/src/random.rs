//! Seeded random words, subgroups, graphs and permutation groups.
//!
//! Everything takes an explicit RNG; [`rng`] gives the reproducible one.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::graph::{GeoEdge, LabeledGraph};
use crate::group::{Perm, XGroup};
use crate::word::{free_reduce, Letter, ReducedWord, Word};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_letter<R: Rng>(rng: &mut R, symbols: usize) -> Letter {
    Letter::from_index(rng.gen_range(0..2 * symbols))
}

/// Uniform letters, not necessarily reduced.
pub fn random_word<R: Rng>(rng: &mut R, symbols: usize, len: usize) -> Word {
    Word((0..len).map(|_| random_letter(rng, symbols)).collect())
}

/// A uniformly random reduced word of exactly `len` letters.
pub fn random_reduced_word<R: Rng>(rng: &mut R, symbols: usize, len: usize) -> ReducedWord {
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let l = random_letter(rng, symbols);
        if out.last().is_some_and(|&p| p == l.inv()) {
            continue;
        }
        out.push(l);
    }
    free_reduce(&out)
}

/// `count` nontrivial reduced words with lengths in `1..=max_len`.
pub fn random_generators<R: Rng>(rng: &mut R, symbols: usize, count: usize, max_len: usize) -> Vec<Word> {
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            random_reduced_word(rng, symbols, len).into_word()
        })
        .collect()
}

/// A product of `factors` random generators or their inverses: an element of
/// the subgroup, as an unreduced word.
pub fn random_subgroup_word<R: Rng>(rng: &mut R, gens: &[Word], factors: usize) -> Word {
    let mut out = Word::empty();
    if gens.is_empty() {
        return out;
    }
    for _ in 0..factors {
        let g = gens.choose(rng).unwrap();
        let part = if rng.gen_bool(0.5) { g.clone() } else { g.inverse() };
        out = out.concat(&part);
    }
    out
}

/// A labelled graph with random geometric edges; generally not folded.
pub fn random_graph<R: Rng>(rng: &mut R, symbols: usize, vertices: usize, edges: usize) -> LabeledGraph {
    let edges: Vec<GeoEdge> = (0..edges)
        .map(|_| GeoEdge {
            tail: rng.gen_range(0..vertices),
            head: rng.gen_range(0..vertices),
            symbol: rng.gen_range(0..symbols),
        })
        .collect();
    LabeledGraph::from_edges(symbols, vertices, &edges)
}

pub fn random_perm<R: Rng>(rng: &mut R, degree: usize) -> Perm {
    let mut images: Vec<u32> = (0..degree as u32).collect();
    images.shuffle(rng);
    Perm::from_images(images).expect("a shuffle is a permutation")
}

/// The transition group of a uniformly random `degree`-sheeted covering of
/// the rose, redrawn until it is transitive (connected).
pub fn random_transitive_group<R: Rng>(rng: &mut R, symbols: usize, degree: usize) -> XGroup {
    loop {
        let g = XGroup::new((0..symbols).map(|_| random_perm(rng, degree)).collect()).expect("same degree");
        if g.is_transitive() {
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::is_reduced;

    #[test]
    fn seeded_runs_repeat() {
        let a = random_generators(&mut rng(7), 2, 4, 6);
        let b = random_generators(&mut rng(7), 2, 4, 6);
        assert_eq!(a, b);
    }

    #[test]
    fn reduced_words_have_requested_length() {
        let mut r = rng(1);
        for len in 0..20 {
            let w = random_reduced_word(&mut r, 3, len);
            assert_eq!(w.len(), len);
            assert!(is_reduced(&w));
        }
    }

    #[test]
    fn transitive_groups_are_transitive() {
        let mut r = rng(3);
        for d in 1..6 {
            let g = random_transitive_group(&mut r, 2, d);
            assert_eq!(g.degree(), d);
            assert!(g.is_transitive());
        }
    }
}
