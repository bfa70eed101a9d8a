//! Graphviz rendering of a grammar.
//!
//! Nonterminals are boxes (the start symbol doubly outlined), terminals are
//! ellipses, and every rule is a small node with an edge from its lhs and
//! numbered edges to its right-hand-side symbols.

use std::fmt::Write as _;

use crate::grammar::{Grammar, Symbol};

fn quote(label: &str) -> String {
    let mut out = String::with_capacity(label.len() + 2);
    out.push('"');
    for c in label.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

pub fn export_dot(g: &Grammar) -> String {
    let mut out = String::from("digraph grammar {\n  rankdir=LR;\n");
    for (i, label) in g.nonterminals().iter().enumerate() {
        let extra = if i == g.start().index() { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  n{i} [label={}, shape=box{extra}];", quote(label));
    }
    for (i, label) in g.terminals().iter().enumerate() {
        let _ = writeln!(out, "  t{i} [label={}, shape=ellipse];", quote(label));
    }
    for r in 0..g.rules().len() {
        let _ = writeln!(out, "  r{r} [label=\"{}\", shape=circle, width=0.3, fontsize=10];", r + 1);
    }
    for (r, rule) in g.rules().iter().enumerate() {
        let _ = writeln!(out, "  n{} -> r{r};", rule.lhs.index());
        for (pos, s) in rule.rhs.symbols().into_iter().enumerate() {
            let target = match s {
                Symbol::T(t) => format!("t{}", t.index()),
                Symbol::N(n) => format!("n{}", n.index()),
            };
            let _ = writeln!(out, "  r{r} -> {target} [label=\"{}\"];", pos + 1);
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_grammar_text;

    fn count(dot: &str, pat: &str) -> usize {
        dot.lines().filter(|l| l.contains(pat)).count()
    }

    #[test]
    fn worked_example_shape() {
        let g = parse_grammar_text(include_str!("../tests/fixtures/worked_example.grammar")).unwrap();
        let dot = export_dot(&g);
        assert_eq!(count(&dot, "shape=box") + count(&dot, "shape=ellipse"), 6);
        assert_eq!(count(&dot, "shape=circle"), 5);
        assert_eq!(count(&dot, " -> "), 15);
        assert!(dot.contains("n2 [label=\"$\", shape=box, peripheries=2];"));
        assert_eq!(dot, export_dot(&g));
    }

    #[test]
    fn single_rule() {
        let g = parse_grammar_text("start: S\nterminals: a b\nnonterminals: S\nrules:\nS -> a b\n").unwrap();
        let dot = export_dot(&g);
        assert_eq!(count(&dot, "shape=box") + count(&dot, "shape=ellipse"), 3);
        assert_eq!(count(&dot, "shape=circle"), 1);
        assert_eq!(count(&dot, " -> "), 3);
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(quote("a\"b\\"), "\"a\\\"b\\\\\"");
    }
}
