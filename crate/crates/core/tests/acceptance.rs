//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use prodsep::cover::enumerate_expansions;
use prodsep::dot::to_dot;
use prodsep::extension::{ChainElement, ExtensionChain};
use prodsep::graph::{fold_all_by, LabeledGraph};
use prodsep::group::{FiniteGroup, Perm, XGroup, DEFAULT_CAP};
use prodsep::random::{
    random_generators, random_graph, random_reduced_word, random_subgroup_word, random_transitive_group, rng,
};
use prodsep::rational::member_product;
use prodsep::separate::{
    factorize_with, hall_separator, image_subgroup, product_separator, scramble_seeds, ProductSetup, SeparationStatus,
};
use prodsep::stallings::{stallings_graph, PointedImmersion};
use prodsep::word::{free_reduce, reduce_product, Alphabet, Letter, ReducedWord, Word};
use rand::Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn xy() -> Alphabet {
    Alphabet::new("xy").unwrap()
}

fn parse(list: &[&str]) -> Vec<Word> {
    list.iter().map(|s| xy().parse_word(s).unwrap()).collect()
}

fn within(elapsed: Duration, limit: Duration, out: Outcome) -> Outcome {
    if out.ok && elapsed > limit {
        fail(format!("{} but took {elapsed:?} (limit {limit:?})", out.detail))
    } else {
        out
    }
}

/// Reads `w` from `v` with the generator permutations alone.
fn act(perms: &[Perm], v: usize, w: &[Letter]) -> usize {
    w.iter().fold(v, |v, l| {
        let p = &perms[l.symbol];
        if l.inverted {
            p.images().iter().position(|&u| u as usize == v).unwrap()
        } else {
            p.apply(v)
        }
    })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let h = stallings_graph(2, &parse(&["xyXY", "yxY"]));
    let elapsed = start.elapsed();
    let golden = include_str!("golden/wedge.dot");
    let dot = to_dot(&h.graph, &xy(), Some(h.base));
    let out = if h.graph.vertex_count() != 2 || h.graph.geometric_edge_count() != 3 {
        fail(format!(
            "{} vertices, {} edges",
            h.graph.vertex_count(),
            h.graph.geometric_edge_count()
        ))
    } else if dot != golden {
        fail(format!("DOT differs from golden:\n{dot}"))
    } else {
        pass("2 vertices, 3 edges, DOT matches golden")
    };
    within(elapsed, Duration::from_millis(1), out)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let h = stallings_graph(2, &parse(&["xyXY", "yy"]));
    let covers = enumerate_expansions(&h.graph, 1000);
    let elapsed = start.elapsed();
    let out = match covers {
        Ok(c) if c.len() == 2 && c.iter().all(|e| e.graph.is_covering()) => pass("2 coverings"),
        Ok(c) => fail(format!("{} expansions", c.len())),
        Err(e) => fail(e.to_string()),
    };
    within(elapsed, Duration::from_millis(10), out)
}

fn hall_case(symbols: usize, gens: &[Word], w: &Word) -> Result<(), String> {
    let wit = hall_separator(symbols, gens, w).map_err(|e| e.to_string())?;
    let perms = wit.group.generators();
    let v = wit.base();
    for g in gens {
        if act(perms, v, g) != v {
            return Err(format!("generator {g:?} moves the base"));
        }
    }
    if act(perms, v, w) == v {
        return Err("word fixes the base".into());
    }
    if !wit.cover.graph.is_covering() {
        return Err("expansion is not a covering".into());
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    if let Err(e) = hall_case(2, &parse(&["xyXY", "yy"]), &parse(&["xyX"])[0]) {
        return fail(format!("worked instance: {e}"));
    }
    let mut r = rng(3);
    let mut done = 0;
    while done < 200 {
        let symbols = r.gen_range(1..=3);
        let count = r.gen_range(1..=3);
        let gens = random_generators(&mut r, symbols, count, 6);
        let len = r.gen_range(1..=8);
        let w = random_reduced_word(&mut r, symbols, len);
        if stallings_graph(symbols, &gens).contains(&w) {
            continue;
        }
        if let Err(e) = hall_case(symbols, &gens, &w.as_word()) {
            return fail(format!("instance {done}: {e}"));
        }
        done += 1;
    }
    within(start.elapsed(), Duration::from_secs(30), pass("worked instance and 200 random instances separated"))
}

/// `(Σ [w(e)]_p e, [w]_G)` straight from the permutations, keyed by
/// `(source image list, symbol)`.
fn traversal_oracle(g: &XGroup, w: &[Letter], p: i64) -> (BTreeMap<(Vec<u32>, usize), u32>, Perm) {
    let gens = g.generators();
    let mut at = Perm::identity(g.degree());
    let mut counts: HashMap<(Vec<u32>, usize), i64> = HashMap::new();
    for l in w {
        let x = &gens[l.symbol];
        if l.inverted {
            let next = at.then(&x.inverse());
            *counts.entry((next.images().to_vec(), l.symbol)).or_default() -= 1;
            at = next;
        } else {
            *counts.entry((at.images().to_vec(), l.symbol)).or_default() += 1;
            at = at.then(x);
        }
    }
    let vector = counts
        .into_iter()
        .filter_map(|(k, c)| {
            let c = c.rem_euclid(p) as u32;
            (c != 0).then_some((k, c))
        })
        .collect();
    (vector, at)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut r = rng(4);
    for case in 0..500 {
        let symbols = r.gen_range(1..=3);
        let degree = r.gen_range(1..=4);
        let g = random_transitive_group(&mut r, symbols, degree);
        let order = g.order(DEFAULT_CAP).unwrap();
        if order > 24 {
            return fail(format!("case {case}: |G| = {order}"));
        }
        let p = [2u32, 3, 5][r.gen_range(0..3)];
        let len = r.gen_range(0..=30);
        let w = prodsep::random::random_word(&mut r, symbols, len);
        let chain = ExtensionChain::new(g.clone(), &[p]).unwrap();
        let got = chain.top().evaluate(&w);
        let (vector, perm) = traversal_oracle(&g, &w, p as i64);
        let ChainElement::Ext(ext) = &got else {
            return fail(format!("case {case}: not an extension element"));
        };
        let got_vector: BTreeMap<(Vec<u32>, usize), u32> = ext
            .vector
            .iter()
            .map(|(k, c)| (((chain.base_perm(&k.source)).images().to_vec(), k.symbol), *c))
            .collect();
        if got_vector != vector || chain.base_perm(&ext.group) != &perm {
            return fail(format!("case {case}: mismatch for {w:?}"));
        }
    }
    within(start.elapsed(), Duration::from_secs(30), pass("500 triples agree"))
}

fn random_subgroup<R: Rng>(r: &mut R, symbols: usize, max_gens: usize, max_len: usize) -> Vec<Word> {
    let count = r.gen_range(1..=max_gens);
    random_generators(r, symbols, count, max_len)
}

fn verify_factors(subs: &[PointedImmersion], factors: &[ReducedWord], w: &[Letter]) -> bool {
    factors.len() == subs.len()
        && factors.iter().zip(subs).all(|(h, s)| s.contains(h))
        && reduce_product(factors.iter().map(|h| h.letters())) == free_reduce(w)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut r = rng(5);
    let mut scrambled = 0;
    for case in 0..100 {
        let hs = vec![random_subgroup(&mut r, 2, 2, 4), random_subgroup(&mut r, 2, 2, 4)];
        let h1 = random_subgroup_word(&mut r, &hs[0], 2).reduce();
        let h2 = random_subgroup_word(&mut r, &hs[1], 2).reduce();
        let w = h1.mul(&h2);
        let setup = ProductSetup::new(2, &hs, &w.as_word()).unwrap();
        let chain = ExtensionChain::new(setup.group.clone(), &[2]).unwrap();
        let (seeds, s) = scramble_seeds(&setup, &chain, &[h1, h2], 10_000);
        scrambled += s as usize;
        let seeds: Vec<Word> = seeds.into_iter().map(Word::from).collect();
        match factorize_with(&setup, &chain, Some(&seeds), DEFAULT_CAP) {
            Ok(Some((f, _))) if verify_factors(&setup.subgroups, &f.factors, &w) => {}
            Ok(Some(_)) => return fail(format!("case {case}: factorization fails its invariants")),
            Ok(None) => return fail(format!("case {case}: no factorization")),
            Err(e) => return fail(format!("case {case}: {e}")),
        }
    }
    within(
        start.elapsed(),
        Duration::from_secs(300),
        pass(format!("100 factorizations verified ({scrambled} with scrambled seeds)")),
    )
}

/// Lists both images in full and checks that no `a₁` has `a₁⁻¹[w] ∈ A₂`.
fn enumerated_separation(wit: &prodsep::separate::ProductWitness) -> bool {
    let k = wit.chain.top();
    let a1 = image_subgroup(&k, &wit.setup.generators[0], 20_000).unwrap();
    let a2 = image_subgroup(&k, &wit.setup.generators[1], 20_000).unwrap();
    a1.elements()
        .iter()
        .all(|a| !a2.contains(&k.mul(&k.inv(a), &wit.word_image)))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut r = rng(6);
    let (mut separated, mut skipped, mut checked) = (0, 0, 0);
    while separated < 50 {
        let hs = vec![random_subgroup(&mut r, 2, 3, 4), random_subgroup(&mut r, 2, 3, 4)];
        let len = r.gen_range(1..=8);
        let w = random_reduced_word(&mut r, 2, len);
        let subs: Vec<PointedImmersion> = hs.iter().map(|g| stallings_graph(2, g)).collect();
        if member_product(&subs, &w) {
            continue;
        }
        match product_separator(2, &hs, &w.as_word(), &[2], DEFAULT_CAP) {
            Ok(wit) => match wit.status {
                SeparationStatus::Separated => {
                    separated += 1;
                    if wit.image_sizes.iter().all(|s| s.is_some_and(|s| s <= 20_000)) {
                        if !enumerated_separation(&wit) {
                            return fail(format!("enumeration finds [w]_K in the product for {hs:?}, {w:?}"));
                        }
                        checked += 1;
                    }
                }
                SeparationStatus::NotSeparated => {
                    return fail(format!("[w]_K lies in the product image for {hs:?}, {w:?}"))
                }
                SeparationStatus::Partial => skipped += 1,
            },
            Err(e) if e.is_cap() => skipped += 1,
            Err(e) => return fail(e.to_string()),
        }
        if skipped > 1000 {
            break;
        }
    }
    let total = separated + skipped;
    let rate = skipped as f64 / total as f64;
    let detail = format!(
        "{separated} separated ({checked} re-checked by enumeration), {skipped} skipped (skip rate {:.1}%)",
        100.0 * rate
    );
    let out = if separated == 50 && rate < 0.5 { pass(detail) } else { fail(detail) };
    within(start.elapsed(), Duration::from_secs(600), out)
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut r = rng(7);
    let mut done = 0;
    let mut cuts = 0;
    while done < 10 {
        let hs: Vec<Vec<Word>> = (0..3).map(|_| random_subgroup(&mut r, 2, 2, 3)).collect();
        let seeds: Vec<ReducedWord> = hs.iter().map(|g| random_subgroup_word(&mut r, g, 2).reduce()).collect();
        let w = reduce_product(seeds.iter().map(|s| s.letters()));
        let setup = ProductSetup::new(2, &hs, &w.as_word()).unwrap();
        let chain = ExtensionChain::new(setup.group.clone(), &[2, 2]).unwrap();
        if chain.predicted_order(1).is_none_or(|o| o > DEFAULT_CAP as u128) {
            continue;
        }
        let seeds: Vec<Word> = seeds.into_iter().map(Word::from).collect();
        match factorize_with(&setup, &chain, Some(&seeds), DEFAULT_CAP) {
            Ok(Some((f, report))) if verify_factors(&setup.subgroups, &f.factors, &w) => {
                if report.cuts == 0 {
                    return fail(format!("instance {done}: no cut performed"));
                }
                cuts += report.cuts;
            }
            Ok(_) => return fail(format!("instance {done}: factorization missing or invalid")),
            Err(e) => return fail(format!("instance {done}: {e}")),
        }
        done += 1;
    }
    within(
        start.elapsed(),
        Duration::from_secs(600),
        pass(format!("10 three-factor instances verified ({cuts} cuts)")),
    )
}

/// Reduced loops at the base of length at most `max`.
fn loops(h: &PointedImmersion, max: usize) -> Vec<Vec<Letter>> {
    fn go(h: &PointedImmersion, v: usize, word: &mut Vec<Letter>, max: usize, out: &mut Vec<Vec<Letter>>) {
        if v == h.base {
            out.push(word.clone());
        }
        if word.len() == max {
            return;
        }
        for l in Letter::all(h.graph.symbols()) {
            if word.last().is_some_and(|&p| p == l.inv()) {
                continue;
            }
            if let Some(e) = h.graph.out_edge(v, l) {
                word.push(l);
                go(h, h.graph.dst(e), word, max, out);
                word.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(h, h.base, &mut Vec::new(), max, &mut out);
    out
}

/// `w ∈ H₁H₂` by trying every `h₁` up to the length where a shortest
/// cancelling segment must appear: `|w| + |V₁|·|V₂|`.
fn exhaustive_member(h1: &PointedImmersion, h2: &PointedImmersion, w: &ReducedWord) -> bool {
    let bound = w.len() + h1.graph.vertex_count() * h2.graph.vertex_count();
    loops(h1, bound).iter().any(|a| {
        let rest = free_reduce(&Word(a.clone()).inverse().concat(w));
        h2.contains(&rest)
    })
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut r = rng(8);
    let mut members = 0;
    for case in 0..500 {
        let symbols = r.gen_range(1..=3);
        let gens = random_subgroup(&mut r, symbols, 3, 5);
        let w = if r.gen_bool(0.5) {
            random_subgroup_word(&mut r, &gens, 3)
        } else {
            let len = r.gen_range(0..=8);
            prodsep::random::random_word(&mut r, symbols, len)
        };
        let h = stallings_graph(symbols, &gens);
        let a = member_product(std::slice::from_ref(&h), &w);
        if a != h.contains(&w.reduce()) {
            return fail(format!("n = 1 case {case} disagrees"));
        }
        members += a as usize;
    }
    let mut pairs = 0;
    for case in 0..100 {
        let hs = [random_subgroup(&mut r, 2, 1, 2), random_subgroup(&mut r, 2, 1, 2)];
        let w = if r.gen_bool(0.5) {
            let a = random_subgroup_word(&mut r, &hs[0], 2);
            a.concat(&random_subgroup_word(&mut r, &hs[1], 2))
        } else {
            let len = r.gen_range(0..=4);
            random_reduced_word(&mut r, 2, len).into_word()
        };
        let subs: Vec<PointedImmersion> = hs.iter().map(|g| stallings_graph(2, g)).collect();
        let a = member_product(&subs, &w);
        if a != exhaustive_member(&subs[0], &subs[1], &w.reduce()) {
            return fail(format!("n = 2 case {case} disagrees"));
        }
        pairs += a as usize;
    }
    within(
        start.elapsed(),
        Duration::from_secs(60),
        pass(format!("500 n = 1 cases ({members} members), 100 n = 2 cases ({pairs} members)")),
    )
}

fn canonical(g: &LabeledGraph, map: &[usize], roots: &[usize]) -> LabeledGraph {
    let images: Vec<usize> = roots.iter().map(|&v| map[v]).collect();
    g.canonical_relabel(&images).0
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut r = rng(9);
    for case in 0..200 {
        let symbols = r.gen_range(1..=3);
        let vertices = r.gen_range(1..=8);
        let edges = r.gen_range(0..=12);
        let g = random_graph(&mut r, symbols, vertices, edges);
        let (labels, _) = g.components();
        let mut roots = Vec::new();
        for v in 0..vertices {
            if !labels[..v].contains(&labels[v]) {
                roots.push(v);
            }
        }
        let (a, ma) = fold_all_by(&g, |_| 0);
        let (b, mb) = fold_all_by(&g, |pairs| pairs.len() - 1);
        let mut coin = rng(case);
        let (c, mc) = fold_all_by(&g, |pairs| coin.gen_range(0..pairs.len()));
        if !a.is_immersion() || !b.is_immersion() || !c.is_immersion() {
            return fail(format!("case {case}: result is not an immersion"));
        }
        let ca = canonical(&a, &ma, &roots);
        if ca != canonical(&b, &mb, &roots) || ca != canonical(&c, &mc, &roots) {
            return fail(format!("case {case}: policies disagree"));
        }
    }
    within(start.elapsed(), Duration::from_secs(10), pass("200 graphs fold to isomorphic immersions"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("golden Stallings graph", criterion_1),
        ("covering expansions", criterion_2),
        ("Hall separation suite", criterion_3),
        ("traversal count identity", criterion_4),
        ("n = 2 factorization", criterion_5),
        ("n = 2 separator soundness", criterion_6),
        ("n = 3 smoke", criterion_7),
        ("oracle cross-validation", criterion_8),
        ("fold confluence", criterion_9),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let out = check();
        let tag = if out.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {n} ({name}): {} [{:.2?}]", out.detail, start.elapsed());
        failed += !out.ok as usize;
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
