//! Achievability and productivity of symbols and rules.

use std::collections::VecDeque;

use super::{Grammar, Nonterminal, Symbol};

/// Membership flags for symbols and rules of one grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub terminals: Vec<bool>,
    pub nonterminals: Vec<bool>,
    pub rules: Vec<bool>,
}

impl Closure {
    fn empty(g: &Grammar) -> Self {
        Closure {
            terminals: vec![false; g.terminals().len()],
            nonterminals: vec![false; g.nonterminals().len()],
            rules: vec![false; g.rules().len()],
        }
    }

    pub fn contains(&self, s: Symbol) -> bool {
        match s {
            Symbol::T(t) => self.terminals[t.index()],
            Symbol::N(n) => self.nonterminals[n.index()],
        }
    }

    pub fn contains_rule(&self, index: usize) -> bool {
        self.rules[index]
    }

    /// True when every symbol and rule is a member.
    pub fn is_complete(&self) -> bool {
        self.terminals
            .iter()
            .chain(&self.nonterminals)
            .chain(&self.rules)
            .all(|&b| b)
    }

    pub fn symbol_count(&self) -> usize {
        self.terminals
            .iter()
            .chain(&self.nonterminals)
            .filter(|&&b| b)
            .count()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.iter().filter(|&&b| b).count()
    }
}

/// Productive symbols and rules, computed as the least fixed point starting
/// from the terminals.
pub fn productive_closure(g: &Grammar) -> Closure {
    let mut c = Closure::empty(g);
    c.terminals.iter_mut().for_each(|t| *t = true);
    loop {
        let mut changed = false;
        for (i, rule) in g.rules().iter().enumerate() {
            if c.rules[i] {
                continue;
            }
            if rule
                .rhs
                .nonterminals()
                .iter()
                .all(|n| c.nonterminals[n.index()])
            {
                c.rules[i] = true;
                if !c.nonterminals[rule.lhs.index()] {
                    c.nonterminals[rule.lhs.index()] = true;
                }
                changed = true;
            }
        }
        if !changed {
            return c;
        }
    }
}

/// Achievable symbols and rules: breadth-first search from the start symbol.
pub fn achievable_closure(g: &Grammar) -> Closure {
    achievable_from(g, g.start())
}

pub(crate) fn achievable_from(g: &Grammar, root: Nonterminal) -> Closure {
    let mut c = Closure::empty(g);
    let mut queue = VecDeque::new();
    c.nonterminals[root.index()] = true;
    queue.push_back(root);
    while let Some(nt) = queue.pop_front() {
        for (i, rule) in g.rules().iter().enumerate() {
            if rule.lhs != nt {
                continue;
            }
            c.rules[i] = true;
            for s in rule.rhs.symbols() {
                match s {
                    Symbol::T(t) => c.terminals[t.index()] = true,
                    Symbol::N(n) => {
                        if !c.nonterminals[n.index()] {
                            c.nonterminals[n.index()] = true;
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub achievable: Closure,
    pub productive: Closure,
    pub consistent: bool,
}

impl ConsistencyReport {
    /// Labels of symbols that are not both achievable and productive.
    pub fn useless_symbols<'g>(&self, g: &'g Grammar) -> Vec<&'g str> {
        let terminals = (0..g.terminals().len()).map(|i| Symbol::T(super::Terminal(i as u32)));
        let nonterminals = (0..g.nonterminals().len()).map(|i| Symbol::N(Nonterminal(i as u32)));
        terminals
            .chain(nonterminals)
            .filter(|&s| !(self.achievable.contains(s) && self.productive.contains(s)))
            .map(|s| g.symbol_label(s))
            .collect()
    }
}

pub fn check_consistency(g: &Grammar) -> ConsistencyReport {
    let achievable = achievable_closure(g);
    let productive = productive_closure(g);
    let consistent = achievable.is_complete() && productive.is_complete();
    ConsistencyReport {
        achievable,
        productive,
        consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    fn worked_example() -> Grammar {
        parse_grammar_text(include_str!("../../tests/fixtures/worked_example.grammar")).unwrap()
    }

    fn grammar(text: &str) -> Grammar {
        parse_grammar_text(text).unwrap()
    }

    #[test]
    fn terminal_rule_is_self_productive() {
        let g = grammar("start: A\nterminals: a b\nnonterminals: A\nrules:\nA -> a b\n");
        let p = productive_closure(&g);
        assert!(p.is_complete());
    }

    #[test]
    fn unproductive_branch() {
        let g =
            grammar("start: A\nterminals: a b\nnonterminals: A B\nrules:\nA -> A B\nB -> a b\n");
        let p = productive_closure(&g);
        let a = g.nonterminal_by_label("A").unwrap();
        let b = g.nonterminal_by_label("B").unwrap();
        assert!(!p.contains(Symbol::N(a)));
        assert!(p.contains(Symbol::N(b)));
        assert!(p.contains(Symbol::T(Terminal(0))) && p.contains(Symbol::T(Terminal(1))));
        assert_eq!(p.rules, vec![false, true]);
    }

    #[test]
    fn worked_example_is_fully_productive_and_achievable() {
        let g = worked_example();
        assert!(productive_closure(&g).is_complete());
        assert!(achievable_closure(&g).is_complete());
        assert!(check_consistency(&g).consistent);
    }

    #[test]
    fn unreachable_rule() {
        let g =
            grammar("start: $\nterminals: a b\nnonterminals: $ C\nrules:\n$ -> a b\nC -> a b\n");
        let a = achievable_closure(&g);
        let c = g.nonterminal_by_label("C").unwrap();
        assert!(!a.contains(Symbol::N(c)));
        assert_eq!(a.rules, vec![true, false]);
        let report = check_consistency(&g);
        assert!(!report.consistent);
        assert_eq!(report.useless_symbols(&g), vec!["C"]);
    }

    #[test]
    fn two_step_reachability() {
        let g =
            grammar("start: $\nterminals: a b\nnonterminals: $ B\nrules:\n$ -> a B b\nB -> a b\n");
        assert!(achievable_closure(&g).is_complete());
    }

    #[test]
    fn start_choice_decides_consistency() {
        // Worked example after step 5: A reaches C through A -> C c, so A works as a start too.
        let step5 = "terminals: a b c\nnonterminals: A B C\nrules:\n\
             A -> a b\nB -> b c\nC -> A A\nA -> C c\nC -> B c\n";
        assert!(check_consistency(&grammar(&format!("start: A\n{step5}"))).consistent);
        let report_b = check_consistency(&grammar(&format!("start: B\n{step5}")));
        assert!(!report_b.consistent);
        assert!(report_b.productive.is_complete());

        // After step 4, B is still hanging and only reachable once C -> B c exists.
        let step4 = "start: A\nterminals: a b c\nnonterminals: A B C\nrules:\n\
             A -> a b\nB -> b c\nC -> A A\nA -> C c\n";
        let g = grammar(step4);
        let report = check_consistency(&g);
        assert!(!report.consistent);
        assert_eq!(report.useless_symbols(&g), vec!["B"]);
    }
}
