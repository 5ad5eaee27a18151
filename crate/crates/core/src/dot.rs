//! Graphviz output. One arrow per geometric edge, in its positive orientation.

use std::fmt::Write;

use crate::graph::{LabeledGraph, VertexId};
use crate::word::Alphabet;

pub fn to_dot(g: &LabeledGraph, alphabet: &Alphabet, base: Option<VertexId>) -> String {
    to_dot_named(g, alphabet, base, "G")
}

pub fn to_dot_named(g: &LabeledGraph, alphabet: &Alphabet, base: Option<VertexId>, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {name} {{").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for v in 0..g.vertex_count() {
        if Some(v) == base {
            writeln!(out, "  {v} [shape=doublecircle];").unwrap();
        } else {
            writeln!(out, "  {v};").unwrap();
        }
    }
    for e in g.geometric_edges() {
        writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            e.tail,
            e.head,
            alphabet.symbol(e.symbol)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
