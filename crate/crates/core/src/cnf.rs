//! Relaxed Chomsky normal form and CYK membership.
//!
//! Each rule class has a fixed rewrite: terminals get proxy nonterminals
//! `N_t -> t`, and `A -> a B b` is split as `A -> N_a X`, `X -> B N_b`.
//! Branch rules are already binary. The start symbol may occur on
//! right-hand sides.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::grammar::{
    render_with, tokenize_with, validate_labels, write_header, Grammar, GrammarError, Nonterminal,
    RawGrammar, Rhs, Symbol, Terminal,
};

/// Longest word [`enumerate_language`] accepts.
pub const MAX_ENUMERATION_LEN: usize = 12;

/// Sentential forms [`enumerate_language`] may visit by default.
pub const DEFAULT_ENUMERATION_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("unknown terminal `{0}`")]
    UnknownTerminal(String),
    #[error("rule `{0}` is not in normal form")]
    UnsupportedRule(String),
    #[error("maximum length {0} exceeds the enumeration limit of {MAX_ENUMERATION_LEN}")]
    LengthTooLarge(usize),
    #[error("enumeration visited more than {0} sentential forms")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// Size of the conversion relative to the source grammar.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CnfStats {
    /// Terminal proxies, one per used terminal.
    pub added_symbols: usize,
    /// Cluster nonterminals introduced by splitting `A -> a B b`.
    pub cluster_symbols: usize,
    /// Rules in the CNF grammar minus rules in the source grammar.
    pub added_rules: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CnfRule {
    Binary(Nonterminal, Nonterminal, Nonterminal),
    Term(Nonterminal, Terminal),
}

impl CnfRule {
    pub fn lhs(&self) -> Nonterminal {
        match *self {
            CnfRule::Binary(a, _, _) | CnfRule::Term(a, _) => a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfGrammar {
    terminals: Vec<String>,
    nonterminals: Vec<String>,
    rules: Vec<CnfRule>,
    start: Nonterminal,
    /// Populated by [`to_cnf`]; absent for grammars read from text.
    stats: Option<CnfStats>,
    by_left: Vec<Vec<(Nonterminal, Nonterminal)>>,
    by_terminal: Vec<Vec<Nonterminal>>,
}

impl CnfGrammar {
    pub fn new(
        terminals: Vec<String>,
        nonterminals: Vec<String>,
        rules: Vec<CnfRule>,
        start: Nonterminal,
    ) -> Result<Self, CnfError> {
        validate_labels(&terminals, &nonterminals)?;
        let nts = nonterminals.len();
        if start.index() >= nts {
            return Err(GrammarError::Validation(
                "start symbol is not a declared nonterminal".into(),
            )
            .into());
        }
        let mut by_left = vec![Vec::new(); nts];
        let mut by_terminal = vec![Vec::new(); terminals.len()];
        let mut seen = HashSet::new();
        for &rule in &rules {
            match rule {
                CnfRule::Binary(a, b, c) => {
                    if [a, b, c].iter().any(|n| n.index() >= nts) {
                        return Err(GrammarError::Validation(
                            "rule references an undeclared symbol".into(),
                        )
                        .into());
                    }
                    by_left[b.index()].push((c, a));
                }
                CnfRule::Term(a, t) => {
                    if a.index() >= nts || t.index() >= terminals.len() {
                        return Err(GrammarError::Validation(
                            "rule references an undeclared symbol".into(),
                        )
                        .into());
                    }
                    by_terminal[t.index()].push(a);
                }
            }
            if !seen.insert(rule) {
                return Err(GrammarError::DuplicateRule {
                    rule: display_cnf_rule(&terminals, &nonterminals, &rule),
                }
                .into());
            }
        }
        Ok(CnfGrammar {
            terminals,
            nonterminals,
            rules,
            start,
            stats: None,
            by_left,
            by_terminal,
        })
    }

    pub fn terminals(&self) -> &[String] {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn rules(&self) -> &[CnfRule] {
        &self.rules
    }

    pub fn start(&self) -> Nonterminal {
        self.start
    }

    pub fn stats(&self) -> Option<CnfStats> {
        self.stats
    }

    pub fn nonterminal_label(&self, n: Nonterminal) -> &str {
        &self.nonterminals[n.index()]
    }

    pub fn display_rule(&self, rule: &CnfRule) -> String {
        display_cnf_rule(&self.terminals, &self.nonterminals, rule)
    }

    pub fn tokenize(&self, word: &str) -> Result<Vec<Terminal>, CnfError> {
        tokenize_with(&self.terminals, word).map_err(|e| match e {
            GrammarError::UnknownTerminal(t) => CnfError::UnknownTerminal(t),
            other => other.into(),
        })
    }

    pub fn render_word(&self, word: &[Terminal]) -> String {
        render_with(&self.terminals, word)
    }
}

fn display_cnf_rule(terminals: &[String], nonterminals: &[String], rule: &CnfRule) -> String {
    match *rule {
        CnfRule::Binary(a, b, c) => {
            format!(
                "{} -> {} {}",
                nonterminals[a.index()],
                nonterminals[b.index()],
                nonterminals[c.index()]
            )
        }
        CnfRule::Term(a, t) => format!("{} -> {}", nonterminals[a.index()], terminals[t.index()]),
    }
}

/// Picks `base`, or `base` with primes appended, avoiding every taken label.
fn fresh_label(base: String, taken: &mut HashSet<String>) -> String {
    let mut label = base;
    while taken.contains(&label) {
        label.push('\'');
    }
    taken.insert(label.clone());
    label
}

pub fn to_cnf(g: &Grammar) -> CnfGrammar {
    let mut taken: HashSet<String> = g
        .terminals()
        .iter()
        .chain(g.nonterminals())
        .cloned()
        .collect();
    let mut nonterminals = g.nonterminals().to_vec();

    let mut proxy = vec![None; g.terminals().len()];
    let used = g.used_terminals();
    for &t in &used {
        proxy[t.index()] = Some(Nonterminal(nonterminals.len() as u32));
        nonterminals.push(fresh_label(
            format!("N_{}", g.terminal_label(t)),
            &mut taken,
        ));
    }
    let p = |t: Terminal| proxy[t.index()].expect("used terminal has a proxy");

    let mut rules = Vec::with_capacity(g.rules().len() * 2 + used.len());
    let mut clusters = 0;
    for rule in g.rules() {
        let a = rule.lhs;
        match rule.rhs {
            Rhs::Branch(b, c) => rules.push(CnfRule::Binary(a, b, c)),
            Rhs::ParenNo(x, y) => rules.push(CnfRule::Binary(a, p(x), p(y))),
            Rhs::IterLeft(x, e) => rules.push(CnfRule::Binary(a, p(x), e)),
            Rhs::IterRight(e, x) => rules.push(CnfRule::Binary(a, e, p(x))),
            Rhs::ParenWith(x, b, y) => {
                clusters += 1;
                let cluster = Nonterminal(nonterminals.len() as u32);
                nonterminals.push(fresh_label(format!("X_{clusters}"), &mut taken));
                rules.push(CnfRule::Binary(a, p(x), cluster));
                rules.push(CnfRule::Binary(cluster, b, p(y)));
            }
        }
    }
    for &t in &used {
        rules.push(CnfRule::Term(p(t), t));
    }

    let stats = CnfStats {
        added_symbols: used.len(),
        cluster_symbols: clusters,
        added_rules: rules.len() - g.rules().len(),
    };
    let mut c = CnfGrammar::new(g.terminals().to_vec(), nonterminals, rules, g.start())
        .expect("conversion of a valid grammar is valid");
    c.stats = Some(stats);
    c
}

pub fn serialize_cnf(c: &CnfGrammar) -> String {
    let mut out = String::new();
    write_header(
        &mut out,
        c.nonterminal_label(c.start),
        &c.terminals,
        &c.nonterminals,
    );
    for rule in &c.rules {
        out.push_str(&c.display_rule(rule));
        out.push('\n');
    }
    out
}

/// Reads a CNF grammar in the grammar text format. Every rule must be
/// `A -> B C` or `A -> t`.
pub fn parse_cnf_text(text: &str) -> Result<CnfGrammar, CnfError> {
    let raw = RawGrammar::parse(text)?;
    raw.check_labels()?;
    let start = raw.resolve_nonterminal(0, &raw.start)?;
    let mut rules = Vec::with_capacity(raw.rules.len());
    for r in &raw.rules {
        let lhs = raw.resolve_nonterminal(r.line, &r.lhs)?;
        let symbols = r
            .rhs
            .iter()
            .map(|l| raw.resolve(r.line, l))
            .collect::<Result<Vec<_>, _>>()?;
        let rule = match symbols[..] {
            [Symbol::N(b), Symbol::N(c)] => CnfRule::Binary(lhs, b, c),
            [Symbol::T(t)] => CnfRule::Term(lhs, t),
            _ => {
                return Err(CnfError::UnsupportedRule(format!(
                    "{} -> {} (line {})",
                    r.lhs,
                    r.rhs.join(" "),
                    r.line
                )))
            }
        };
        rules.push(rule);
    }
    CnfGrammar::new(raw.terminals, raw.nonterminals, rules, start)
}

/// Bottom-up recognition table. Cells hold nonterminal bitsets.
#[derive(Clone, Debug)]
pub struct CykTable {
    n: usize,
    words: usize,
    cells: Vec<u64>,
}

impl CykTable {
    fn offset(&self, start: usize, len: usize) -> usize {
        ((len - 1) * self.n + start) * self.words
    }

    fn cell(&self, start: usize, len: usize) -> &[u64] {
        let o = self.offset(start, len);
        &self.cells[o..o + self.words]
    }

    /// Whether `a` derives the `len` symbols starting at `start` (0-based).
    pub fn derives(&self, a: Nonterminal, start: usize, len: usize) -> bool {
        self.cell(start, len)[a.index() / 64] >> (a.index() % 64) & 1 == 1
    }

    /// Nonterminals deriving the given span, in index order.
    pub fn cell_members(&self, start: usize, len: usize) -> Vec<Nonterminal> {
        let cell = self.cell(start, len);
        (0..cell.len() * 64)
            .filter(|&i| cell[i / 64] >> (i % 64) & 1 == 1)
            .map(|i| Nonterminal(i as u32))
            .collect()
    }

    pub fn word_len(&self) -> usize {
        self.n
    }
}

pub fn cyk_table(c: &CnfGrammar, word: &[Terminal]) -> Result<CykTable, CnfError> {
    if let Some(t) = word.iter().find(|t| t.index() >= c.terminals.len()) {
        return Err(CnfError::UnknownTerminal(format!("#{}", t.0)));
    }
    let n = word.len();
    let words = c.nonterminals.len().div_ceil(64).max(1);
    let mut table = CykTable {
        n,
        words,
        cells: vec![0; n * n * words],
    };
    for (i, t) in word.iter().enumerate() {
        let o = table.offset(i, 1);
        for a in &c.by_terminal[t.index()] {
            table.cells[o + a.index() / 64] |= 1 << (a.index() % 64);
        }
    }
    let mut acc = vec![0u64; words];
    for len in 2..=n {
        for start in 0..=n - len {
            acc.iter_mut().for_each(|w| *w = 0);
            for split in 1..len {
                let left = table.cell(start, split);
                let right = table.cell(start + split, len - split);
                for (wi, &lw) in left.iter().enumerate() {
                    let mut bits = lw;
                    while bits != 0 {
                        let b = wi * 64 + bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        for &(cc, a) in &c.by_left[b] {
                            if right[cc.index() / 64] >> (cc.index() % 64) & 1 == 1 {
                                acc[a.index() / 64] |= 1 << (a.index() % 64);
                            }
                        }
                    }
                }
            }
            let o = table.offset(start, len);
            table.cells[o..o + words].copy_from_slice(&acc);
        }
    }
    Ok(table)
}

/// Membership test. The empty word is never accepted.
pub fn cyk_parse(c: &CnfGrammar, word: &[Terminal]) -> Result<bool, CnfError> {
    if word.is_empty() {
        return Ok(false);
    }
    Ok(cyk_table(c, word)?.derives(c.start, 0, word.len()))
}

/// Shortest terminal yield of each nonterminal, `None` if unproductive.
pub fn min_yield_lengths(g: &Grammar) -> Vec<Option<usize>> {
    let mut best: Vec<Option<usize>> = vec![None; g.nonterminals().len()];
    loop {
        let mut changed = false;
        for rule in g.rules() {
            let mut len = rule.rhs.terminals().len();
            let mut ok = true;
            for n in rule.rhs.nonterminals() {
                match best[n.index()] {
                    Some(l) => len += l,
                    None => ok = false,
                }
            }
            if ok && best[rule.lhs.index()].is_none_or(|b| len < b) {
                best[rule.lhs.index()] = Some(len);
                changed = true;
            }
        }
        if !changed {
            return best;
        }
    }
}

/// Every word of length at most `max_len` derivable from the start symbol.
pub fn enumerate_language(
    g: &Grammar,
    max_len: usize,
) -> Result<BTreeSet<Vec<Terminal>>, CnfError> {
    enumerate_language_with_budget(g, max_len, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_language_with_budget(
    g: &Grammar,
    max_len: usize,
    budget: usize,
) -> Result<BTreeSet<Vec<Terminal>>, CnfError> {
    if max_len > MAX_ENUMERATION_LEN {
        return Err(CnfError::LengthTooLarge(max_len));
    }
    let min_yield = min_yield_lengths(g);
    let mut words = BTreeSet::new();
    let start = vec![Symbol::N(g.start())];
    let mut seen: HashSet<Vec<Symbol>> = HashSet::new();
    let mut frontier = vec![start];
    // Leftmost expansion: each form is reached through a single path of
    // leftmost steps, but memoizing still removes repeats across rules.
    while let Some(form) = frontier.pop() {
        let Some(pos) = form.iter().position(|s| matches!(s, Symbol::N(_))) else {
            words.insert(
                form.iter()
                    .map(|s| match s {
                        Symbol::T(t) => *t,
                        Symbol::N(_) => unreachable!(),
                    })
                    .collect(),
            );
            continue;
        };
        let Symbol::N(nt) = form[pos] else {
            unreachable!()
        };
        for rule in g.rules_for(nt) {
            let mut next = Vec::with_capacity(form.len() + 2);
            next.extend_from_slice(&form[..pos]);
            next.extend(rule.rhs.symbols());
            next.extend_from_slice(&form[pos + 1..]);
            let mut bound = 0;
            let mut productive = true;
            for s in &next {
                match s {
                    Symbol::T(_) => bound += 1,
                    Symbol::N(n) => match min_yield[n.index()] {
                        Some(l) => bound += l,
                        None => productive = false,
                    },
                }
            }
            if !productive || bound > max_len {
                continue;
            }
            if seen.insert(next.clone()) {
                if seen.len() > budget {
                    return Err(CnfError::BudgetExceeded(budget));
                }
                frontier.push(next);
            }
        }
    }
    Ok(words)
}
