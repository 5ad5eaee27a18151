use proptest::prelude::*;

use prodsep::extension::{check_star, ExtensionChain};
use prodsep::graph::{fold_all, fold_all_by, GeoEdge, LabeledGraph};
use prodsep::group::{Perm, XGroup};
use prodsep::rational::member_product;
use prodsep::separate::{affine_image, image_subgroup};
use prodsep::stallings::{stallings_graph, subgroup_basis};
use prodsep::word::{free_reduce, is_reduced, Letter, ReducedWord, Word};

fn letter(symbols: usize) -> impl Strategy<Value = Letter> {
    (0..2 * symbols).prop_map(Letter::from_index)
}

fn word(symbols: usize, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(symbols), 0..=max).prop_map(Word)
}

fn gens(symbols: usize) -> impl Strategy<Value = Vec<Word>> {
    prop::collection::vec(word(symbols, 5), 1..=3)
}

fn perm(degree: usize) -> impl Strategy<Value = Perm> {
    Just((0..degree as u32).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Perm::from_images(v).unwrap())
}

fn group() -> impl Strategy<Value = XGroup> {
    group_up_to(4)
}

fn group_up_to(degree: usize) -> impl Strategy<Value = XGroup> {
    (1usize..=degree).prop_flat_map(|d| prop::collection::vec(perm(d), 2)).prop_map(|g| XGroup::new(g).unwrap())
}

fn graph() -> impl Strategy<Value = LabeledGraph> {
    (1usize..=6).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 0usize..2), 0..=10).prop_map(move |es| {
            let es: Vec<GeoEdge> = es
                .into_iter()
                .map(|(tail, head, symbol)| GeoEdge { tail, head, symbol })
                .collect();
            LabeledGraph::from_edges(2, n, &es)
        })
    })
}

fn product(ws: &[ReducedWord]) -> ReducedWord {
    prodsep::word::reduce_product(ws.iter().map(|w| w.letters()))
}

proptest! {
    #[test]
    fn reduction_is_idempotent_and_inverts(w in word(3, 20)) {
        let r = free_reduce(&w);
        prop_assert!(is_reduced(&r));
        prop_assert_eq!(free_reduce(&r), r.clone());
        prop_assert!(free_reduce(&w.concat(&w.inverse())).is_identity());
    }

    #[test]
    fn subgroup_words_are_members(g in gens(2), picks in prop::collection::vec((0usize..3, any::<bool>()), 0..6)) {
        let h = stallings_graph(2, &g);
        prop_assert!(h.graph.is_immersion());
        let mut w = Word::empty();
        for (i, inv) in picks {
            let x = &g[i % g.len()];
            w = w.concat(if inv { x.inverse() } else { x.clone() }.letters());
        }
        prop_assert!(h.contains(&w.reduce()));
    }

    #[test]
    fn basis_generates_the_same_subgroup(g in gens(2)) {
        let h = stallings_graph(2, &g);
        let basis: Vec<Word> = subgroup_basis(&h).into_iter().map(Word::from).collect();
        let again = stallings_graph(2, &basis);
        prop_assert_eq!(again.graph, h.graph);
    }

    #[test]
    fn oracle_agrees_with_stallings(g in gens(2), w in word(2, 10)) {
        let h = stallings_graph(2, &g);
        prop_assert_eq!(member_product(std::slice::from_ref(&h), &w), h.contains(&w.reduce()));
    }

    #[test]
    fn oracle_is_reduction_invariant(g1 in gens(2), g2 in gens(2), w in word(2, 8)) {
        let hs = [stallings_graph(2, &g1), stallings_graph(2, &g2)];
        let r = free_reduce(&w);
        prop_assert_eq!(member_product(&hs, &w), member_product(&hs, &r));
    }

    #[test]
    fn fold_policies_agree(g in graph(), seed in any::<u64>()) {
        let (a, ma) = fold_all_by(&g, |_| 0);
        let mut state = seed;
        let (b, mb) = fold_all_by(&g, |pairs| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 33) as usize % pairs.len()
        });
        prop_assert!(a.is_immersion());
        let roots: Vec<usize> = (0..g.vertex_count()).collect();
        let ra: Vec<usize> = roots.iter().map(|&v| ma[v]).collect();
        let rb: Vec<usize> = roots.iter().map(|&v| mb[v]).collect();
        prop_assert_eq!(a.canonical_relabel(&ra).0, b.canonical_relabel(&rb).0);
        prop_assert_eq!(fold_all(&a), a);
    }

    #[test]
    fn star_identity(g in group(), w in word(2, 25), p in prop::sample::select(vec![2u32, 3, 5])) {
        let chain = ExtensionChain::new(g, &[p, 2]).unwrap();
        prop_assert!(check_star(&chain, 1, &w));
        prop_assert!(check_star(&chain, 2, &w));
    }

    #[test]
    fn extension_projects_to_base(g in group(), u in word(2, 12), v in word(2, 12)) {
        let chain = ExtensionChain::new(g.clone(), &[3]).unwrap();
        let k = chain.top();
        use prodsep::group::FiniteGroup;
        let uv = k.mul(&k.evaluate(&u), &k.evaluate(&v));
        prop_assert_eq!(uv.clone(), k.evaluate(&u.concat(&v)));
        prop_assert_eq!(chain.base_perm(&uv), &g.evaluate_word(&u.concat(&v)));
    }

    #[test]
    fn affine_images_have_enumerated_order(g in group_up_to(3), hs in gens(2)) {
        let chain = ExtensionChain::new(g, &[2]).unwrap();
        let reduced: Vec<ReducedWord> = hs.iter().map(|w| w.reduce()).filter(|w| !w.is_identity()).collect();
        let full = image_subgroup(&chain.top(), &reduced, 100_000).unwrap();
        let aff = affine_image(&chain, &reduced, 100_000).unwrap();
        prop_assert_eq!(aff.order(), Some(full.len() as u128));
    }

    #[test]
    fn products_of_members_are_in_the_product(g1 in gens(2), g2 in gens(2), i in 0usize..3, j in 0usize..3) {
        let hs = [stallings_graph(2, &g1), stallings_graph(2, &g2)];
        let a = g1[i % g1.len()].reduce();
        let b = g2[j % g2.len()].reduce();
        prop_assert!(member_product(&hs, &product(&[a, b])));
    }
}
