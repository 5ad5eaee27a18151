use prodsep::cover::{enumerate_expansions, expansion_count, transition_group};
use prodsep::dot::to_dot;
use prodsep::separate::hall_separator;
use prodsep::stallings::{attach_word, stallings_graph};
use prodsep::word::{Alphabet, Word};

fn xy() -> Alphabet {
    Alphabet::new("xy").unwrap()
}

fn words(list: &[&str]) -> Vec<Word> {
    list.iter().map(|s| xy().parse_word(s).unwrap()).collect()
}

#[test]
fn wedge_matches_golden_dot() {
    let h = stallings_graph(2, &words(&["xyXY", "yxY"]));
    assert_eq!(h.base, 0);
    assert_eq!(to_dot(&h.graph, &xy(), Some(h.base)), include_str!("golden/wedge.dot"));
}

#[test]
fn attached_wedge_has_two_completions() {
    let h = stallings_graph(2, &words(&["xyXY", "yy"]));
    assert_eq!(h.graph.vertex_count(), 4);
    assert_eq!(expansion_count(&h.graph).unwrap(), 2);
    let covers = enumerate_expansions(&h.graph, 10).unwrap();
    assert_eq!(covers.len(), 2);
    assert_ne!(covers[0].graph, covers[1].graph);
    for c in &covers {
        assert!(c.graph.is_covering());
        assert_eq!(c.graph.vertex_count(), 4);
    }
}

#[test]
fn attached_graph_and_separator() {
    let gens = words(&["xyXY", "yy"]);
    let w = xy().parse_word("xyX").unwrap();
    let h = stallings_graph(2, &gens);
    let attached = attach_word(&h, &w.reduce());
    assert_eq!(attached.graph.vertex_count(), 6);
    assert_eq!(attached.graph.geometric_edge_count(), 7);
    let wit = hall_separator(2, &gens, &w).unwrap();
    assert!(wit.verify());
    let k = transition_group(&wit.cover);
    assert_eq!(k, wit.group);
    assert!(k.is_transitive());
}
