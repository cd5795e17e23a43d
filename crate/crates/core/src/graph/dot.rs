use std::fmt::Write;

use super::InequalityGraph;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Renders the graph in DOT. Output is deterministic: vertices in file order,
/// edges by label.
pub fn export_dot(g: &InequalityGraph) -> String {
    let mut out = String::from("digraph inequalities {\n");
    if !g.vertices().is_empty() {
        out.push_str("    node [shape=box];\n");
    }
    for (i, id) in g.vertices().iter().enumerate() {
        writeln!(out, "    {} [label={}];", quote(id), quote(g.display(i))).unwrap();
    }
    for e in g.edges() {
        writeln!(
            out,
            "    {} -> {} [label={}, tooltip={}];",
            quote(&e.greater),
            quote(&e.lesser),
            quote(&e.label.to_string()),
            quote(&e.citation)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
