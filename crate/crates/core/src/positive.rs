//! Positive example sets.
//!
//! Two constructions: coverage sets read off walks in the graph of a
//! linearized grammar, and uniform sampling of derivation trees of a given
//! yield length by the recursive counting method.

use std::collections::VecDeque;

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

use crate::cnf::{cyk_parse, to_cnf};
use crate::examples::{ExampleMethod, ExampleSet};
use crate::grammar::{Grammar, Nonterminal, Rhs, Symbol, Terminal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PositiveError {
    #[error("nonterminal `{0}` derives no terminal string")]
    NoYield(String),
    #[error("the grammar has no word of length {0}")]
    EmptyLength(usize),
    #[error("maximum length must be at least 2, got {0}")]
    InvalidLength(usize),
}

/// Shortest terminal yield of every nonterminal; ties go to the
/// lexicographically smallest word.
pub fn shortest_yields(g: &Grammar) -> Vec<Option<Vec<Terminal>>> {
    let mut best: Vec<Option<Vec<Terminal>>> = vec![None; g.nonterminals().len()];
    let better = |cand: &Vec<Terminal>, cur: &Option<Vec<Terminal>>| match cur {
        None => true,
        Some(c) => (cand.len(), cand) < (c.len(), c),
    };
    loop {
        let mut changed = false;
        for rule in g.rules() {
            let mut word = Vec::new();
            let mut complete = true;
            for s in rule.rhs.symbols() {
                match s {
                    Symbol::T(t) => word.push(t),
                    Symbol::N(n) => match &best[n.index()] {
                        Some(w) => word.extend_from_slice(w),
                        None => complete = false,
                    },
                }
            }
            if complete && better(&word, &best[rule.lhs.index()]) {
                best[rule.lhs.index()] = Some(word);
                changed = true;
            }
        }
        if !changed {
            return best;
        }
    }
}

/// Where a linear rule came from: the source rule index, and for branch
/// rules the nonterminal that was replaced by its shortest yield.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Origin {
    pub rule: usize,
    pub substituted: Option<Nonterminal>,
}

/// `lhs -> left next right`, or `lhs -> left` when `next` is absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRule {
    pub lhs: Nonterminal,
    pub left: Vec<Terminal>,
    pub next: Option<Nonterminal>,
    pub right: Vec<Terminal>,
    pub origins: Vec<Origin>,
}

impl LinearRule {
    fn same_shape(&self, other: &LinearRule) -> bool {
        self.lhs == other.lhs && self.left == other.left && self.next == other.next && self.right == other.right
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearGrammar {
    pub rules: Vec<LinearRule>,
    pub start: Nonterminal,
    pub nonterminal_count: usize,
}

impl LinearGrammar {
    pub fn display_rule(&self, g: &Grammar, rule: &LinearRule) -> String {
        let mut parts: Vec<&str> = rule.left.iter().map(|&t| g.terminal_label(t)).collect();
        if let Some(n) = rule.next {
            parts.push(g.nonterminal_label(n));
        }
        parts.extend(rule.right.iter().map(|&t| g.terminal_label(t)));
        format!("{} -> {}", g.nonterminal_label(rule.lhs), parts.join(" "))
    }
}

/// Linearizes a grammar. Branch rules `A -> B C` become `A -> w(B) C` and
/// `A -> B w(C)` with `w` the shortest yield; identical linear rules are
/// merged and keep every origin.
pub fn to_linear(g: &Grammar) -> Result<LinearGrammar, PositiveError> {
    let yields = shortest_yields(g);
    let w = |n: Nonterminal| {
        yields[n.index()]
            .clone()
            .ok_or_else(|| PositiveError::NoYield(g.nonterminal_label(n).to_string()))
    };
    let mut rules: Vec<LinearRule> = Vec::new();
    let mut push = |rule: LinearRule| match rules.iter_mut().find(|r| r.same_shape(&rule)) {
        Some(existing) => existing.origins.extend(rule.origins),
        None => rules.push(rule),
    };
    for (i, rule) in g.rules().iter().enumerate() {
        let lhs = rule.lhs;
        let plain = Origin { rule: i, substituted: None };
        let linear = |left: Vec<Terminal>, next, right: Vec<Terminal>, origin| LinearRule {
            lhs,
            left,
            next,
            right,
            origins: vec![origin],
        };
        match rule.rhs {
            Rhs::ParenNo(a, b) => push(linear(vec![a, b], None, vec![], plain)),
            Rhs::ParenWith(a, b, c) => push(linear(vec![a], Some(b), vec![c], plain)),
            Rhs::IterLeft(c, e) => push(linear(vec![c], Some(e), vec![], plain)),
            Rhs::IterRight(e, c) => push(linear(vec![], Some(e), vec![c], plain)),
            Rhs::Branch(b, c) => {
                push(linear(w(b)?, Some(c), vec![], Origin { rule: i, substituted: Some(b) }));
                push(linear(vec![], Some(b), w(c)?, Origin { rule: i, substituted: Some(c) }));
            }
        }
    }
    Ok(LinearGrammar { rules, start: g.start(), nonterminal_count: g.nonterminals().len() })
}

/// Graph over nonterminals plus the sink Γ; one edge per linear rule.
#[derive(Clone, Debug)]
pub struct LinearGraph {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    /// `pred[s][v]`: last edge of a shortest walk from `s` to `v`.
    pred: Vec<Vec<Option<usize>>>,
}

impl LinearGraph {
    pub fn new(lin: &LinearGrammar) -> Self {
        let nodes = lin.nonterminal_count + 1;
        let sink = nodes - 1;
        let edges: Vec<(usize, usize)> =
            lin.rules.iter().map(|r| (r.lhs.index(), r.next.map_or(sink, |n| n.index()))).collect();
        let mut out = vec![Vec::new(); nodes];
        for (i, &(from, _)) in edges.iter().enumerate() {
            out[from].push(i);
        }
        let pred = (0..nodes)
            .map(|s| {
                let mut pred = vec![None; nodes];
                let mut seen = vec![false; nodes];
                seen[s] = true;
                let mut queue = VecDeque::from([s]);
                while let Some(u) = queue.pop_front() {
                    for &e in &out[u] {
                        let v = edges[e].1;
                        if !seen[v] {
                            seen[v] = true;
                            pred[v] = Some(e);
                            queue.push_back(v);
                        }
                    }
                }
                pred
            })
            .collect();
        LinearGraph { nodes, edges, pred }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn sink(&self) -> usize {
        self.nodes - 1
    }

    /// Edges of a shortest walk from `from` to `to`, empty when equal.
    pub fn shortest_walk(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut walk = Vec::new();
        let mut at = to;
        while at != from {
            let e = self.pred[from][at]?;
            walk.push(e);
            at = self.edges[e].0;
        }
        walk.reverse();
        Some(walk)
    }

    /// Shortest start-to-Γ walk through the given edges in order.
    pub fn walk_through(&self, start: usize, required: &[usize]) -> Option<Vec<usize>> {
        let mut walk = Vec::new();
        let mut at = start;
        for &e in required {
            let (from, to) = self.edges[e];
            walk.extend(self.shortest_walk(at, from)?);
            walk.push(e);
            at = to;
        }
        walk.extend(self.shortest_walk(at, self.sink())?);
        (walk.len() <= 4 * self.nodes).then_some(walk)
    }
}

/// Word spelled by a start-to-Γ walk: left parts in order, right parts in
/// reverse.
pub fn walk_word(lin: &LinearGrammar, walk: &[usize]) -> Vec<Terminal> {
    let mut word: Vec<Terminal> = walk.iter().flat_map(|&e| lin.rules[e].left.iter().copied()).collect();
    for &e in walk.iter().rev() {
        word.extend_from_slice(&lin.rules[e].right);
    }
    word
}

#[derive(Clone, Debug)]
pub struct OptimalSet {
    pub set: ExampleSet,
    pub linear: LinearGrammar,
    /// Walks (linear rule indices) behind each example, aligned with the set.
    /// A word reached again by a different walk keeps that walk too when it
    /// covers a rule no earlier walk did.
    pub witnesses: Vec<Vec<Vec<usize>>>,
}

/// Coverage set over all ordered sequences of one to three distinct linear
/// rules.
pub fn optimal_positive_set(g: &Grammar) -> Result<OptimalSet, PositiveError> {
    let linear = to_linear(g)?;
    let graph = LinearGraph::new(&linear);
    let cnf = to_cnf(g);
    let start = linear.start.index();
    let r = linear.rules.len();
    let mut set = ExampleSet::new("", ExampleMethod::Optimal);
    let mut witnesses: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut covered = vec![false; r];

    let mut consider = |required: &[usize]| {
        let Some(walk) = graph.walk_through(start, required) else { return };
        let word = walk_word(&linear, &walk);
        let fresh = walk.iter().any(|&e| !covered[e]);
        if let Some(i) = set.index_of(&word) {
            if fresh {
                walk.iter().for_each(|&e| covered[e] = true);
                witnesses[i].push(walk);
            }
            return;
        }
        if cyk_parse(&cnf, &word).unwrap_or(false) {
            walk.iter().for_each(|&e| covered[e] = true);
            set.insert(word);
            witnesses.push(vec![walk]);
        }
    };
    for a in 0..r {
        consider(&[a]);
    }
    for a in 0..r {
        for b in (0..r).filter(|&b| b != a) {
            consider(&[a, b]);
        }
    }
    for a in 0..r {
        for b in (0..r).filter(|&b| b != a) {
            for c in (0..r).filter(|&c| c != a && c != b) {
                consider(&[a, b, c]);
            }
        }
    }
    Ok(OptimalSet { set, linear, witnesses })
}

/// Number of derivation trees per nonterminal and yield length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    n_max: usize,
    counts: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Trees rooted at `x` with yield length `n`; zero beyond `n_max`.
    pub fn count(&self, x: Nonterminal, n: usize) -> BigUint {
        self.counts[x.index()].get(n).cloned().unwrap_or_default()
    }

    fn at(&self, x: Nonterminal, n: usize) -> &BigUint {
        &self.counts[x.index()][n]
    }

    /// Trees of yield length `n` whose root uses `rhs`.
    fn rule_count(&self, rhs: &Rhs, n: usize) -> BigUint {
        match *rhs {
            Rhs::ParenNo(..) => BigUint::from((n == 2) as u8),
            Rhs::ParenWith(_, b, _) if n >= 2 => self.at(b, n - 2).clone(),
            Rhs::IterLeft(_, e) | Rhs::IterRight(e, _) if n >= 1 => self.at(e, n - 1).clone(),
            Rhs::Branch(b, c) => (1..n).map(|k| self.at(b, k) * self.at(c, n - k)).sum(),
            _ => BigUint::zero(),
        }
    }
}

pub fn build_count_table(g: &Grammar, n_max: usize) -> CountTable {
    let mut table = CountTable { n_max, counts: vec![vec![BigUint::zero(); n_max + 1]; g.nonterminals().len()] };
    for n in 1..=n_max {
        for rule in g.rules() {
            let c = table.rule_count(&rule.rhs, n);
            table.counts[rule.lhs.index()][n] += c;
        }
    }
    table
}

/// A derivation tree: the rule applied at the root and one subtree per
/// right-hand-side nonterminal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivationTree {
    pub rule: usize,
    pub children: Vec<DerivationTree>,
}

impl DerivationTree {
    pub fn word(&self, g: &Grammar) -> Vec<Terminal> {
        let mut out = Vec::new();
        self.write_word(g, &mut out);
        out
    }

    fn write_word(&self, g: &Grammar, out: &mut Vec<Terminal>) {
        let mut children = self.children.iter();
        for s in g.rules()[self.rule].rhs.symbols() {
            match s {
                Symbol::T(t) => out.push(t),
                Symbol::N(_) => children.next().expect("one subtree per nonterminal").write_word(g, out),
            }
        }
    }
}

/// Picks an index with probability proportional to its weight.
fn weighted_index<R: Rng + ?Sized>(weights: &[BigUint], total: &BigUint, rng: &mut R) -> usize {
    let mut r = rng.gen_biguint_below(total);
    for (i, w) in weights.iter().enumerate() {
        if &r < w {
            return i;
        }
        r -= w;
    }
    unreachable!("weights sum to the total")
}

/// Uniformly random derivation tree rooted at `x` with yield length `n`.
pub fn sample_tree<R: Rng + ?Sized>(
    g: &Grammar,
    table: &CountTable,
    x: Nonterminal,
    n: usize,
    rng: &mut R,
) -> Option<DerivationTree> {
    if n > table.n_max {
        return None;
    }
    let total = table.at(x, n);
    if total.is_zero() {
        return None;
    }
    let candidates: Vec<usize> = (0..g.rules().len()).filter(|&i| g.rules()[i].lhs == x).collect();
    let weights: Vec<BigUint> = candidates.iter().map(|&i| table.rule_count(&g.rules()[i].rhs, n)).collect();
    let rule = candidates[weighted_index(&weights, total, rng)];
    let sub = |y, m, rng: &mut R| sample_tree(g, table, y, m, rng).expect("positive count has a tree");
    let children = match g.rules()[rule].rhs {
        Rhs::ParenNo(..) => vec![],
        Rhs::ParenWith(_, b, _) => vec![sub(b, n - 2, rng)],
        Rhs::IterLeft(_, e) | Rhs::IterRight(e, _) => vec![sub(e, n - 1, rng)],
        Rhs::Branch(b, c) => {
            let splits: Vec<BigUint> = (1..n).map(|k| table.at(b, k) * table.at(c, n - k)).collect();
            let total: BigUint = splits.iter().sum();
            let k = 1 + weighted_index(&splits, &total, rng);
            let left = sub(b, k, rng);
            vec![left, sub(c, n - k, rng)]
        }
    };
    Some(DerivationTree { rule, children })
}

/// `count` independent uniform trees from the start symbol.
pub fn sample_trees<R: Rng + ?Sized>(
    g: &Grammar,
    table: &CountTable,
    n: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<DerivationTree>, PositiveError> {
    if table.count(g.start(), n).is_zero() {
        return Err(PositiveError::EmptyLength(n));
    }
    Ok((0..count).map(|_| sample_tree(g, table, g.start(), n, rng).expect("count is positive")).collect())
}

/// Words of length `n` drawn through uniform derivation trees, deduplicated.
pub fn sample_uniform<R: Rng + ?Sized>(
    g: &Grammar,
    n: usize,
    count: usize,
    rng: &mut R,
) -> Result<ExampleSet, PositiveError> {
    let table = build_count_table(g, n);
    let mut set = ExampleSet::new("", ExampleMethod::Uniform);
    for tree in sample_trees(g, &table, n, count, rng)? {
        set.insert(tree.word(g));
    }
    Ok(set)
}

/// Union of `per_len` uniform draws for every length `2..=max_len` that has
/// words.
pub fn stratified_positive_set<R: Rng + ?Sized>(
    g: &Grammar,
    max_len: usize,
    per_len: usize,
    rng: &mut R,
) -> Result<ExampleSet, PositiveError> {
    if max_len < 2 {
        return Err(PositiveError::InvalidLength(max_len));
    }
    let table = build_count_table(g, max_len);
    let mut set = ExampleSet::new("", ExampleMethod::Uniform);
    for n in 2..=max_len {
        if table.count(g.start(), n).is_zero() {
            continue;
        }
        for tree in sample_trees(g, &table, n, per_len, rng)? {
            set.insert(tree.word(g));
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::enumerate_language;
    use crate::grammar::parse_grammar_text;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn worked_example() -> Grammar {
        parse_grammar_text(include_str!("../tests/fixtures/worked_example.grammar")).unwrap()
    }

    fn grammar(text: &str) -> Grammar {
        parse_grammar_text(text).unwrap()
    }

    fn words(g: &Grammar, set: &ExampleSet) -> Vec<String> {
        set.iter().map(|w| g.render_word(w)).collect()
    }

    fn rules(g: &Grammar, lin: &LinearGrammar) -> Vec<String> {
        lin.rules.iter().map(|r| lin.display_rule(g, r)).collect()
    }

    #[test]
    fn shortest_yield_ties_are_lexicographic() {
        let g = grammar("start: S\nterminals: a b\nnonterminals: S\nrules:\nS -> b a\nS -> a b\nS -> a S b\n");
        assert_eq!(shortest_yields(&g), vec![Some(vec![Terminal(0), Terminal(1)])]);
    }

    #[test]
    fn linearize_worked_example() {
        let g = worked_example();
        let lin = to_linear(&g).unwrap();
        assert_eq!(rules(&g, &lin), vec!["A -> a b", "B -> b c", "$ -> a b A", "$ -> A a b", "A -> $ c", "$ -> B c"]);
        assert_eq!(lin.rules[2].origins, vec![Origin { rule: 2, substituted: Some(Nonterminal(0)) }]);
    }

    #[test]
    fn linearize_branch_example() {
        let g = grammar("start: S\nterminals: a b c\nnonterminals: S B C\nrules:\nS -> B C\nB -> a b\nC -> b c\n");
        let lin = to_linear(&g).unwrap();
        assert_eq!(rules(&g, &lin), vec!["S -> a b C", "S -> B b c", "B -> a b", "C -> b c"]);
    }

    #[test]
    fn identical_linear_rules_merge() {
        let g = grammar("start: S\nterminals: a b\nnonterminals: S B C\nrules:\nS -> B C\nS -> C C\nB -> a b\nC -> a b\n");
        let lin = to_linear(&g).unwrap();
        let merged = lin.rules.iter().find(|r| lin.display_rule(&g, r) == "S -> a b C").unwrap();
        assert_eq!(merged.origins.len(), 2);
    }

    #[test]
    fn linear_without_branches_is_isomorphic() {
        let g = grammar("start: S\nterminals: a b\nnonterminals: S B\nrules:\nS -> a B b\nB -> a b\nS -> B a\n");
        let lin = to_linear(&g).unwrap();
        assert_eq!(lin.rules.len(), g.rules().len());
        for (l, r) in lin.rules.iter().zip(g.rules()) {
            assert_eq!(l.lhs, r.lhs);
            assert_eq!(l.next, r.rhs.nonterminals().first().copied());
            assert_eq!(l.left.len() + l.right.len(), r.rhs.terminals().len());
        }
    }

    #[test]
    fn graph_edges_match_rules() {
        let lin = to_linear(&worked_example()).unwrap();
        let graph = LinearGraph::new(&lin);
        assert_eq!(graph.edge_count(), lin.rules.len());
        assert_eq!(graph.node_count(), 4);
    }

    #[test]
    fn walk_word_nests_right_parts() {
        let g = grammar("start: S\nterminals: a b c\nnonterminals: S B\nrules:\nS -> a B b\nB -> c B\nB -> a c\n");
        let lin = to_linear(&g).unwrap();
        assert_eq!(g.render_word(&walk_word(&lin, &[0, 1, 2])), "a c a c b");
    }

    #[test]
    fn optimal_single_rule() {
        let g = grammar("start: S\nterminals: a b\nnonterminals: S\nrules:\nS -> a b\n");
        let opt = optimal_positive_set(&g).unwrap();
        assert_eq!(words(&g, &opt.set), vec!["a b"]);
    }

    #[test]
    fn optimal_worked_example() {
        let g = worked_example();
        let opt = optimal_positive_set(&g).unwrap();
        let cnf = to_cnf(&g);
        let r = opt.linear.rules.len();
        assert!(opt.set.len() <= 2 * r * r * r);
        for w in opt.set.iter() {
            assert!(cyk_parse(&cnf, w).unwrap());
        }
        let mut covered = vec![false; r];
        for walk in opt.witnesses.iter().flatten() {
            for &e in walk {
                covered[e] = true;
            }
        }
        assert!(covered.iter().all(|&c| c), "{covered:?}");
        assert_eq!(words(&g, &opt.set)[0], "a b a b");
    }

    #[test]
    fn count_examples() {
        let g = worked_example();
        let t = build_count_table(&g, 8);
        assert_eq!(t.count(g.start(), 3), BigUint::from(1u8));
        assert_eq!(t.count(g.start(), 4), BigUint::from(1u8));
        assert_eq!(t.count(g.start(), 2), BigUint::zero());
        assert_eq!(t.count(g.start(), 20), BigUint::zero());

        let s = grammar("start: S\nterminals: a b\nnonterminals: S\nrules:\nS -> a b\n");
        let t = build_count_table(&s, 6);
        for n in 0..=6 {
            assert_eq!(t.count(s.start(), n), BigUint::from((n == 2) as u8));
        }
    }

    #[test]
    fn counts_match_enumeration_for_unambiguous_grammar() {
        let g = grammar("start: S\nterminals: a b\nnonterminals: S\nrules:\nS -> a S b\nS -> a b\n");
        let t = build_count_table(&g, 10);
        let lang = enumerate_language(&g, 10).unwrap();
        for n in 0..=10 {
            let words = lang.iter().filter(|w| w.len() == n).count();
            assert_eq!(t.count(g.start(), n), BigUint::from(words));
        }
    }

    #[test]
    fn sampling_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = grammar("start: S\nterminals: a b\nnonterminals: S\nrules:\nS -> a b\n");
        assert_eq!(words(&s, &sample_uniform(&s, 2, 5, &mut rng).unwrap()), vec!["a b"]);
        assert_eq!(sample_uniform(&s, 3, 5, &mut rng), Err(PositiveError::EmptyLength(3)));

        let g = worked_example();
        assert_eq!(words(&g, &sample_uniform(&g, 3, 20, &mut rng).unwrap()), vec!["b c c"]);

        let p = grammar("start: S\nterminals: a b\nnonterminals: S\nrules:\nS -> a S b\nS -> a b\n");
        assert_eq!(words(&p, &sample_uniform(&p, 6, 50, &mut rng).unwrap()), vec!["a a a b b b"]);
    }

    #[test]
    fn stratified_worked_example() {
        let g = worked_example();
        let cnf = to_cnf(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let set = stratified_positive_set(&g, 4, 10, &mut rng).unwrap();
        let w = words(&g, &set);
        assert!(w.contains(&"b c c".to_string()) && w.contains(&"a b a b".to_string()));
        for word in set.iter() {
            assert!((2..=4).contains(&word.len()));
            assert!(cyk_parse(&cnf, word).unwrap());
        }
        let s = grammar("start: S\nterminals: a b\nnonterminals: S\nrules:\nS -> a b\n");
        assert_eq!(words(&s, &stratified_positive_set(&s, 3, 4, &mut rng).unwrap()), vec!["a b"]);
        assert_eq!(stratified_positive_set(&s, 1, 4, &mut rng), Err(PositiveError::InvalidLength(1)));
    }

    #[test]
    fn tree_sampling_is_uniform_within_five_sigma() {
        // Ambiguous grammar: S -> S S | a b has Catalan-many trees.
        let g = grammar("start: S\nterminals: a b\nnonterminals: S\nrules:\nS -> S S\nS -> a b\n");
        let n = 8;
        let t = build_count_table(&g, n);
        assert_eq!(t.count(g.start(), n), BigUint::from(5u8));
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let trees = sample_trees(&g, &t, n, 10_000, &mut rng).unwrap();
        let mut freq: HashMap<DerivationTree, usize> = HashMap::new();
        for tree in trees {
            *freq.entry(tree).or_default() += 1;
        }
        assert_eq!(freq.len(), 5);
        let (mean, p) = (2000.0, 0.2);
        let sigma = (10_000.0 * p * (1.0 - p) as f64).sqrt();
        for &c in freq.values() {
            assert!((c as f64 - mean).abs() < 5.0 * sigma, "{c}");
        }
    }
}
