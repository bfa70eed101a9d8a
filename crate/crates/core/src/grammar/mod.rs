//! Grammar data types restricted to the four rule classes.
//!
//! Every rule has one of the shapes `A -> a B b`, `A -> a b`, `A -> B C`,
//! `A -> c E` or `A -> E c`. The shape is carried by [`Rhs`], so a rule's
//! class is always derived from its right-hand side and can never disagree
//! with it.

mod analysis;
mod text;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[cfg(test)]
pub(crate) use analysis::achievable_from;
pub use analysis::{
    achievable_closure, check_consistency, productive_closure, Closure, ConsistencyReport,
};
pub(crate) use text::write_header;
pub use text::{parse_grammar_text, serialize_grammar, RawGrammar, RawRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Terminal(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Nonterminal(pub u32);

impl Terminal {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Nonterminal {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    T(Terminal),
    N(Nonterminal),
}

/// The five concrete rule shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleClass {
    /// `A -> a B b`
    ParenWithNt,
    /// `A -> a b`
    ParenNoNt,
    /// `A -> B C`
    Branch,
    /// `A -> c E`
    IterLeft,
    /// `A -> E c`
    IterRight,
}

impl RuleClass {
    pub const ALL: [RuleClass; 5] = [
        RuleClass::ParenWithNt,
        RuleClass::ParenNoNt,
        RuleClass::Branch,
        RuleClass::IterLeft,
        RuleClass::IterRight,
    ];

    /// Number of nonterminals on the right-hand side.
    pub fn rhs_nt_arity(self) -> usize {
        self.kind().rhs_nt_arity()
    }

    pub fn kind(self) -> RuleKind {
        match self {
            RuleClass::ParenWithNt => RuleKind::ParenWith,
            RuleClass::ParenNoNt => RuleKind::ParenNo,
            RuleClass::Branch => RuleKind::Branch,
            RuleClass::IterLeft | RuleClass::IterRight => RuleKind::Iteration,
        }
    }
}

/// Rule classes as they are counted: both iteration orientations form one
/// class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    ParenWith,
    ParenNo,
    Iteration,
    Branch,
}

impl RuleKind {
    pub const ALL: [RuleKind; 4] = [
        RuleKind::ParenNo,
        RuleKind::ParenWith,
        RuleKind::Iteration,
        RuleKind::Branch,
    ];

    pub fn rhs_nt_arity(self) -> usize {
        match self {
            RuleKind::ParenNo => 0,
            RuleKind::ParenWith | RuleKind::Iteration => 1,
            RuleKind::Branch => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::ParenWith => "parenthesis with nonterminal",
            RuleKind::ParenNo => "parenthesis without nonterminal",
            RuleKind::Iteration => "iteration",
            RuleKind::Branch => "branch",
        }
    }
}

/// Per-kind rule counts, with iteration rules counted jointly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RuleCounts {
    pub paren_no: u32,
    pub paren_with: u32,
    pub iteration: u32,
    pub branch: u32,
}

impl RuleCounts {
    pub fn new(paren_no: u32, paren_with: u32, iteration: u32, branch: u32) -> Self {
        RuleCounts {
            paren_no,
            paren_with,
            iteration,
            branch,
        }
    }

    pub fn get(&self, kind: RuleKind) -> u32 {
        match kind {
            RuleKind::ParenNo => self.paren_no,
            RuleKind::ParenWith => self.paren_with,
            RuleKind::Iteration => self.iteration,
            RuleKind::Branch => self.branch,
        }
    }

    pub fn get_mut(&mut self, kind: RuleKind) -> &mut u32 {
        match kind {
            RuleKind::ParenNo => &mut self.paren_no,
            RuleKind::ParenWith => &mut self.paren_with,
            RuleKind::Iteration => &mut self.iteration,
            RuleKind::Branch => &mut self.branch,
        }
    }

    pub fn total(&self) -> u64 {
        self.paren_no as u64 + self.paren_with as u64 + self.iteration as u64 + self.branch as u64
    }

    /// Right-hand-side nonterminal slots over all counted rules.
    pub fn nonterminal_slots(&self) -> u64 {
        RuleKind::ALL
            .iter()
            .map(|&k| self.get(k) as u64 * k.rhs_nt_arity() as u64)
            .sum()
    }
}

/// Right-hand side of a rule; the variant is the rule's class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rhs {
    ParenWith(Terminal, Nonterminal, Terminal),
    ParenNo(Terminal, Terminal),
    Branch(Nonterminal, Nonterminal),
    IterLeft(Terminal, Nonterminal),
    IterRight(Nonterminal, Terminal),
}

impl Rhs {
    pub fn class(&self) -> RuleClass {
        match self {
            Rhs::ParenWith(..) => RuleClass::ParenWithNt,
            Rhs::ParenNo(..) => RuleClass::ParenNoNt,
            Rhs::Branch(..) => RuleClass::Branch,
            Rhs::IterLeft(..) => RuleClass::IterLeft,
            Rhs::IterRight(..) => RuleClass::IterRight,
        }
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        use Symbol::{N, T};
        match *self {
            Rhs::ParenWith(a, b, c) => vec![T(a), N(b), T(c)],
            Rhs::ParenNo(a, b) => vec![T(a), T(b)],
            Rhs::Branch(b, c) => vec![N(b), N(c)],
            Rhs::IterLeft(a, e) => vec![T(a), N(e)],
            Rhs::IterRight(e, a) => vec![N(e), T(a)],
        }
    }

    pub fn nonterminals(&self) -> Vec<Nonterminal> {
        match *self {
            Rhs::ParenWith(_, b, _) | Rhs::IterLeft(_, b) | Rhs::IterRight(b, _) => vec![b],
            Rhs::ParenNo(..) => vec![],
            Rhs::Branch(b, c) => vec![b, c],
        }
    }

    pub fn terminals(&self) -> Vec<Terminal> {
        match *self {
            Rhs::ParenWith(a, _, b) | Rhs::ParenNo(a, b) => vec![a, b],
            Rhs::IterLeft(a, _) | Rhs::IterRight(_, a) => vec![a],
            Rhs::Branch(..) => vec![],
        }
    }

    /// Determines the class of a right-hand side from its shape.
    pub fn classify(rhs: &[Symbol]) -> Result<Rhs, GrammarError> {
        use Symbol::{N, T};
        match *rhs {
            [T(a), N(b), T(c)] => Ok(Rhs::ParenWith(a, b, c)),
            [T(a), T(b)] => Ok(Rhs::ParenNo(a, b)),
            [N(b), N(c)] => Ok(Rhs::Branch(b, c)),
            [T(a), N(e)] => Ok(Rhs::IterLeft(a, e)),
            [N(e), T(a)] => Ok(Rhs::IterRight(e, a)),
            _ => Err(GrammarError::Shape {
                len: rhs.len(),
                pattern: shape_pattern(rhs),
            }),
        }
    }
}

fn shape_pattern(rhs: &[Symbol]) -> String {
    rhs.iter()
        .map(|s| match s {
            Symbol::T(_) => 't',
            Symbol::N(_) => 'N',
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub lhs: Nonterminal,
    pub rhs: Rhs,
}

impl Rule {
    pub fn new(lhs: Nonterminal, rhs: Rhs) -> Self {
        Rule { lhs, rhs }
    }

    pub fn class(&self) -> RuleClass {
        self.rhs.class()
    }
}

/// Classifies a rule given as a symbol sequence.
pub fn classify_rule(_lhs: Nonterminal, rhs: &[Symbol]) -> Result<RuleClass, GrammarError> {
    Rhs::classify(rhs).map(|r| r.class())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("right-hand side of length {len} ({pattern}) matches no rule class")]
    Shape { len: usize, pattern: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: undeclared symbol `{label}`")]
    UndeclaredSymbol { line: usize, label: String },
    #[error("duplicate rule `{rule}`")]
    DuplicateRule { rule: String },
    #[error("invalid grammar: {0}")]
    Validation(String),
    #[error("unknown terminal `{0}`")]
    UnknownTerminal(String),
}

/// A context-free grammar whose rules all belong to the four classes.
///
/// Symbols are indices into the two label tables. Values are validated on
/// construction and immutable afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    terminals: Vec<String>,
    nonterminals: Vec<String>,
    rules: Vec<Rule>,
    start: Nonterminal,
}

impl Grammar {
    pub fn new(
        terminals: Vec<String>,
        nonterminals: Vec<String>,
        rules: Vec<Rule>,
        start: Nonterminal,
    ) -> Result<Self, GrammarError> {
        validate_labels(&terminals, &nonterminals)?;
        if rules.is_empty() {
            return Err(GrammarError::Validation("grammar has no rules".into()));
        }
        if start.index() >= nonterminals.len() {
            return Err(GrammarError::Validation(
                "start symbol is not a declared nonterminal".into(),
            ));
        }
        let g = Grammar {
            terminals,
            nonterminals,
            rules,
            start,
        };
        let mut seen = HashSet::with_capacity(g.rules.len());
        for rule in &g.rules {
            let in_range = rule.lhs.index() < g.nonterminals.len()
                && rule.rhs.symbols().iter().all(|s| g.is_declared(*s));
            if !in_range {
                return Err(GrammarError::Validation(
                    "rule references an undeclared symbol".into(),
                ));
            }
            if !seen.insert(*rule) {
                return Err(GrammarError::DuplicateRule {
                    rule: g.display_rule(rule),
                });
            }
        }
        Ok(g)
    }

    fn is_declared(&self, s: Symbol) -> bool {
        match s {
            Symbol::T(t) => t.index() < self.terminals.len(),
            Symbol::N(n) => n.index() < self.nonterminals.len(),
        }
    }

    pub fn terminals(&self) -> &[String] {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> Nonterminal {
        self.start
    }

    pub fn terminal_label(&self, t: Terminal) -> &str {
        &self.terminals[t.index()]
    }

    pub fn nonterminal_label(&self, n: Nonterminal) -> &str {
        &self.nonterminals[n.index()]
    }

    pub fn symbol_label(&self, s: Symbol) -> &str {
        match s {
            Symbol::T(t) => self.terminal_label(t),
            Symbol::N(n) => self.nonterminal_label(n),
        }
    }

    pub fn terminal_by_label(&self, label: &str) -> Option<Terminal> {
        self.terminals
            .iter()
            .position(|l| l == label)
            .map(|i| Terminal(i as u32))
    }

    pub fn nonterminal_by_label(&self, label: &str) -> Option<Nonterminal> {
        self.nonterminals
            .iter()
            .position(|l| l == label)
            .map(|i| Nonterminal(i as u32))
    }

    pub fn rules_for(&self, lhs: Nonterminal) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(move |r| r.lhs == lhs)
    }

    pub fn rule_counts(&self) -> RuleCounts {
        let mut counts = RuleCounts::default();
        for rule in &self.rules {
            *counts.get_mut(rule.class().kind()) += 1;
        }
        counts
    }

    /// Terminals that occur on some right-hand side, in table order.
    pub fn used_terminals(&self) -> Vec<Terminal> {
        let mut used = vec![false; self.terminals.len()];
        for rule in &self.rules {
            for t in rule.rhs.terminals() {
                used[t.index()] = true;
            }
        }
        (0..self.terminals.len() as u32)
            .map(Terminal)
            .filter(|t| used[t.index()])
            .collect()
    }

    pub fn display_rule(&self, rule: &Rule) -> String {
        let rhs: Vec<&str> = rule
            .rhs
            .symbols()
            .iter()
            .map(|&s| self.symbol_label(s))
            .collect();
        format!("{} -> {}", self.nonterminal_label(rule.lhs), rhs.join(" "))
    }

    /// Parses a space-separated word over this grammar's terminals.
    pub fn tokenize(&self, word: &str) -> Result<Vec<Terminal>, GrammarError> {
        tokenize_with(&self.terminals, word)
    }

    pub fn render_word(&self, word: &[Terminal]) -> String {
        render_with(&self.terminals, word)
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_grammar(self))
    }
}

pub(crate) fn tokenize_with(
    terminals: &[String],
    word: &str,
) -> Result<Vec<Terminal>, GrammarError> {
    word.split_whitespace()
        .map(|tok| {
            terminals
                .iter()
                .position(|l| l == tok)
                .map(|i| Terminal(i as u32))
                .ok_or_else(|| GrammarError::UnknownTerminal(tok.to_string()))
        })
        .collect()
}

pub(crate) fn render_with(terminals: &[String], word: &[Terminal]) -> String {
    let labels: Vec<&str> = word.iter().map(|t| terminals[t.index()].as_str()).collect();
    labels.join(" ")
}

pub(crate) fn validate_labels(
    terminals: &[String],
    nonterminals: &[String],
) -> Result<(), GrammarError> {
    let mut seen = HashSet::new();
    for label in terminals.iter().chain(nonterminals) {
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(GrammarError::Validation(format!(
                "invalid symbol label `{label}`"
            )));
        }
        if label == "->" || label.starts_with('#') || label.ends_with(':') {
            return Err(GrammarError::Validation(format!(
                "reserved symbol label `{label}`"
            )));
        }
        // Labels must be unique across both kinds so rule lines stay unambiguous.
        if !seen.insert(label.as_str()) {
            return Err(GrammarError::Validation(format!(
                "symbol label `{label}` declared twice"
            )));
        }
    }
    Ok(())
}

/// Labels used by generated grammars: `a, b, …, z, a1, …` for terminals.
pub fn terminal_name(index: usize) -> String {
    indexed_name(b'a', index)
}

/// Labels used by generated grammars: `A, B, …, Z, A1, …` for nonterminals.
pub fn nonterminal_name(index: usize) -> String {
    indexed_name(b'A', index)
}

fn indexed_name(base: u8, index: usize) -> String {
    let letter = (base + (index % 26) as u8) as char;
    match index / 26 {
        0 => letter.to_string(),
        round => format!("{letter}{round}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: u32) -> Symbol {
        Symbol::T(Terminal(i))
    }

    fn n(i: u32) -> Symbol {
        Symbol::N(Nonterminal(i))
    }

    #[test]
    fn classify_examples() {
        let a = Nonterminal(0);
        assert_eq!(classify_rule(a, &[t(0), t(1)]), Ok(RuleClass::ParenNoNt));
        assert_eq!(
            classify_rule(Nonterminal(2), &[n(0), n(0)]),
            Ok(RuleClass::Branch)
        );
        assert_eq!(classify_rule(a, &[n(2), t(2)]), Ok(RuleClass::IterRight));
        assert_eq!(classify_rule(a, &[t(2), n(2)]), Ok(RuleClass::IterLeft));
        assert_eq!(
            classify_rule(a, &[t(0), n(1), t(1)]),
            Ok(RuleClass::ParenWithNt)
        );
        assert!(matches!(
            classify_rule(a, &[t(0), t(1), t(2)]),
            Err(GrammarError::Shape { .. })
        ));
        assert!(matches!(
            classify_rule(a, &[t(0)]),
            Err(GrammarError::Shape { .. })
        ));
        assert!(matches!(
            classify_rule(a, &[n(0)]),
            Err(GrammarError::Shape { .. })
        ));
        assert!(matches!(
            classify_rule(a, &[t(0), t(0), t(0), t(0)]),
            Err(GrammarError::Shape { .. })
        ));
    }

    #[test]
    fn arities() {
        let arity: Vec<usize> = RuleClass::ALL.iter().map(|c| c.rhs_nt_arity()).collect();
        assert_eq!(arity, vec![1, 0, 2, 1, 1]);
        assert_eq!(RuleClass::IterLeft.kind(), RuleClass::IterRight.kind());
    }

    #[test]
    fn empty_grammar_rejected() {
        let err = Grammar::new(vec!["a".into()], vec!["S".into()], vec![], Nonterminal(0));
        assert!(matches!(err, Err(GrammarError::Validation(_))));
    }

    #[test]
    fn duplicate_rule_rejected() {
        let r = Rule::new(Nonterminal(0), Rhs::ParenNo(Terminal(0), Terminal(0)));
        let err = Grammar::new(
            vec!["a".into()],
            vec!["S".into()],
            vec![r, r],
            Nonterminal(0),
        );
        assert!(matches!(err, Err(GrammarError::DuplicateRule { .. })));
    }

    #[test]
    fn out_of_range_symbols_rejected() {
        let r = Rule::new(Nonterminal(0), Rhs::ParenNo(Terminal(0), Terminal(3)));
        let err = Grammar::new(vec!["a".into()], vec!["S".into()], vec![r], Nonterminal(0));
        assert!(matches!(err, Err(GrammarError::Validation(_))));
        let r = Rule::new(Nonterminal(0), Rhs::ParenNo(Terminal(0), Terminal(0)));
        let err = Grammar::new(vec!["a".into()], vec!["S".into()], vec![r], Nonterminal(1));
        assert!(matches!(err, Err(GrammarError::Validation(_))));
    }

    #[test]
    fn labels_must_be_distinct_across_kinds() {
        let r = Rule::new(Nonterminal(0), Rhs::ParenNo(Terminal(0), Terminal(0)));
        let err = Grammar::new(vec!["S".into()], vec!["S".into()], vec![r], Nonterminal(0));
        assert!(err.is_err());
        let err = Grammar::new(
            vec!["a b".into()],
            vec!["S".into()],
            vec![r],
            Nonterminal(0),
        );
        assert!(err.is_err());
    }

    #[test]
    fn generated_names() {
        assert_eq!(terminal_name(0), "a");
        assert_eq!(terminal_name(25), "z");
        assert_eq!(terminal_name(26), "a1");
        assert_eq!(nonterminal_name(2), "C");
        assert_eq!(nonterminal_name(53), "B2");
    }

    #[test]
    fn tokenize_and_render() {
        let r = Rule::new(Nonterminal(0), Rhs::ParenNo(Terminal(0), Terminal(1)));
        let g = Grammar::new(
            vec!["a".into(), "b".into()],
            vec!["S".into()],
            vec![r],
            Nonterminal(0),
        )
        .unwrap();
        let w = g.tokenize(" a  b ").unwrap();
        assert_eq!(w, vec![Terminal(0), Terminal(1)]);
        assert_eq!(g.render_word(&w), "a b");
        assert_eq!(
            g.tokenize("x"),
            Err(GrammarError::UnknownTerminal("x".into()))
        );
    }
}
