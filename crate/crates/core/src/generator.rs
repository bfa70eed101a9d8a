//! Iterative construction of consistent grammars.
//!
//! Rules are added one at a time and every symbol is productive the moment it
//! is added. Parenthesis rules without nonterminals are seeded first; their
//! left-hand sides, except the newest, are *hanging* until some later rule
//! places them on its right-hand side. The remaining rules are added under
//! these constraints:
//!
//! * right-hand-side nonterminals are existing (hence productive) symbols;
//! * a rule that creates a new left-hand side must carry the most recently
//!   created nonterminal on its right-hand side, unless that nonterminal is a
//!   seeded left-hand side that was never used, in which case it becomes
//!   hanging instead;
//! * no duplicate rules;
//! * the number of hanging symbols never exceeds the right-hand-side
//!   nonterminal slots of the rules still to be added.
//!
//! When all rules are placed the most recently created nonterminal becomes the
//! start symbol, which makes every symbol achievable.
//!
//! Invariant kept between steps: every nonterminal is reachable from the most
//! recent nonterminal or from exactly one hanging symbol, and hanging symbols
//! never occur on a right-hand side.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::feasibility::{check_feasible, FeasibilityError, FeasibilityVerdict, GenerationParams};
use crate::grammar::{
    nonterminal_name, terminal_name, Grammar, GrammarError, Nonterminal, Rhs, Rule, RuleClass,
    RuleCounts, RuleKind, Terminal,
};

/// Restarts allowed before [`generate`] gives up.
pub const DEFAULT_RESTARTS: usize = 1_000;

/// Random proposals per rule class before falling back to enumerating every
/// admissible rule.
const PROPOSAL_ATTEMPTS: usize = 64;

/// Enumeration fallback is skipped above this many raw candidates.
const ENUMERATION_LIMIT: u128 = 4_000_000;

/// Label given to the start symbol.
pub const START_LABEL: &str = "$";

/// Source of the generator's random decisions.
///
/// Implemented for every [`Rng`]; tests can drive the generator with a fixed
/// script instead.
pub trait Choices {
    fn coin(&mut self) -> bool;
    /// Uniform index in `0..n`, `n >= 1`.
    fn below(&mut self, n: usize) -> usize;
}

impl<R: Rng + ?Sized> Choices for R {
    fn coin(&mut self) -> bool {
        self.gen_bool(0.5)
    }

    fn below(&mut self, n: usize) -> usize {
        self.gen_range(0..n)
    }
}

fn pick<C: Choices + ?Sized>(ch: &mut C, n: usize) -> usize {
    if n == 1 {
        0
    } else {
        ch.below(n)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerationError {
    #[error(transparent)]
    Domain(#[from] FeasibilityError),
    #[error("parameters are infeasible:\n{0}")]
    InfeasibleParams(FeasibilityVerdict),
    #[error("no admissible rule for any remaining class")]
    DeadEnd,
    #[error("generation dead-ended {restarts} times")]
    RetryExhausted { restarts: usize },
    #[error("build incomplete: {0}")]
    IncompleteBuild(&'static str),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// One added rule with the symbols it introduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub rule: Rule,
    pub new_nonterminal: Option<Nonterminal>,
    pub new_terminals: Vec<Terminal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationResult {
    pub params: GenerationParams,
    pub grammar: Grammar,
    pub trace: Vec<TraceStep>,
    /// Dead ends hit before the successful build.
    pub restarts: usize,
}

impl GenerationResult {
    /// Rebuilds the grammar from the trace alone.
    pub fn replay(&self) -> Result<Grammar, GenerationError> {
        replay_trace(&self.trace)
    }

    /// Step table: one row per added rule, then the start-symbol promotion.
    pub fn render_trace(&self) -> String {
        render_trace(&self.trace)
    }
}

pub fn replay_trace(trace: &[TraceStep]) -> Result<Grammar, GenerationError> {
    let mut terminals = 0u32;
    let mut nonterminals = 0u32;
    let mut last = None;
    let mut rules = Vec::with_capacity(trace.len());
    for step in trace {
        if let Some(n) = step.new_nonterminal {
            if n.0 != nonterminals {
                return Err(GenerationError::IncompleteBuild(
                    "trace creates nonterminals out of order",
                ));
            }
            nonterminals += 1;
            last = Some(n);
        }
        for t in &step.new_terminals {
            if t.0 != terminals {
                return Err(GenerationError::IncompleteBuild(
                    "trace creates terminals out of order",
                ));
            }
            terminals += 1;
        }
        rules.push(step.rule);
    }
    let start = last.ok_or(GenerationError::IncompleteBuild(
        "trace creates no nonterminal",
    ))?;
    Ok(labelled_grammar(terminals, nonterminals, rules, start)?)
}

fn labelled_grammar(
    terminals: u32,
    nonterminals: u32,
    rules: Vec<Rule>,
    start: Nonterminal,
) -> Result<Grammar, GrammarError> {
    let t_labels = (0..terminals as usize).map(terminal_name).collect();
    let nt_labels = (0..nonterminals as usize)
        .map(|i| {
            if i == start.index() {
                START_LABEL.to_string()
            } else {
                nonterminal_name(i)
            }
        })
        .collect();
    Grammar::new(t_labels, nt_labels, rules, start)
}

pub fn render_trace(trace: &[TraceStep]) -> String {
    let nt = |n: Nonterminal| nonterminal_name(n.index());
    let t = |t: Terminal| terminal_name(t.index());
    let mut rows = vec![(
        "step".to_string(),
        "rule".to_string(),
        "new symbols".to_string(),
    )];
    for s in trace {
        let rhs: Vec<String> = s
            .rule
            .rhs
            .symbols()
            .into_iter()
            .map(|sym| match sym {
                crate::grammar::Symbol::T(x) => t(x),
                crate::grammar::Symbol::N(x) => nt(x),
            })
            .collect();
        let mut created: Vec<String> = s.new_nonterminal.map(nt).into_iter().collect();
        created.extend(s.new_terminals.iter().map(|&x| t(x)));
        rows.push((
            s.step.to_string(),
            format!("{} -> {}", nt(s.rule.lhs), rhs.join(" ")),
            created.join(" "),
        ));
    }
    if let Some(start) = trace.iter().rev().find_map(|s| s.new_nonterminal) {
        rows.push((
            (trace.len() + 1).to_string(),
            format!("{} becomes start symbol {START_LABEL}", nt(start)),
            String::new(),
        ));
    }
    let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (a, b, c) in rows {
        let _ = writeln!(out, "{a:<w0$}  {b:<w1$}  {c}");
    }
    out.lines()
        .map(|l| l.trim_end().to_string() + "\n")
        .collect()
}

/// A validated candidate rule with the hanging set it would leave behind.
#[derive(Clone, Debug)]
struct Proposal {
    rule: Rule,
    new_lhs: bool,
    fresh_terminals: u32,
    hanging_after: Vec<Nonterminal>,
}

/// Partial grammar under construction.
#[derive(Clone, Debug)]
pub struct Builder {
    params: GenerationParams,
    terminal_count: u32,
    nonterminal_count: u32,
    rules: Vec<Rule>,
    rule_set: HashSet<Rule>,
    remaining: RuleCounts,
    hanging: Vec<Nonterminal>,
    last: Option<Nonterminal>,
    seeded: Vec<bool>,
    on_rhs: Vec<bool>,
    successors: Vec<Vec<Nonterminal>>,
    created_for: Vec<usize>,
    trace: Vec<TraceStep>,
}

impl Builder {
    /// Starts an empty build. The parameters are not checked for
    /// feasibility here; [`generate`] does that.
    pub fn new(params: GenerationParams) -> Self {
        Builder {
            params,
            terminal_count: 0,
            nonterminal_count: 0,
            rules: Vec::new(),
            rule_set: HashSet::new(),
            remaining: params.counts,
            hanging: Vec::new(),
            last: None,
            seeded: Vec::new(),
            on_rhs: Vec::new(),
            successors: Vec::new(),
            created_for: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn hanging(&self) -> &[Nonterminal] {
        &self.hanging
    }

    pub fn last_created(&self) -> Option<Nonterminal> {
        self.last
    }

    pub fn remaining(&self) -> RuleCounts {
        self.remaining
    }

    pub fn terminal_count(&self) -> u32 {
        self.terminal_count
    }

    pub fn nonterminal_count(&self) -> u32 {
        self.nonterminal_count
    }

    /// Index of the rule each nonterminal was created for.
    pub fn created_for(&self, n: Nonterminal) -> usize {
        self.created_for[n.index()]
    }

    /// Right-hand-side nonterminal slots left in the remaining quota.
    pub fn connection_budget(&self) -> u64 {
        self.remaining.nonterminal_slots()
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.trace
    }

    /// The rules so far as a grammar rooted at the most recent nonterminal,
    /// with provisional labels. `None` before the first rule.
    pub fn partial_grammar(&self) -> Option<Grammar> {
        let start = self.last?;
        let t_labels = (0..self.terminal_count as usize)
            .map(terminal_name)
            .collect();
        let nt_labels = (0..self.nonterminal_count as usize)
            .map(nonterminal_name)
            .collect();
        Grammar::new(t_labels, nt_labels, self.rules.clone(), start).ok()
    }

    /// Adds every parenthesis rule without nonterminal.
    pub fn seed_paren_no<C: Choices + ?Sized>(
        &mut self,
        ch: &mut C,
    ) -> Result<(), GenerationError> {
        while self.remaining.paren_no > 0 {
            self.add_rule(ch)?;
        }
        Ok(())
    }

    /// Adds one rule of a randomly chosen admissible class. Parenthesis rules
    /// without nonterminal are always placed before the other classes.
    pub fn add_rule<C: Choices + ?Sized>(&mut self, ch: &mut C) -> Result<Rule, GenerationError> {
        let mut kinds: Vec<RuleKind> = if self.remaining.paren_no > 0 {
            vec![RuleKind::ParenNo]
        } else {
            [RuleKind::ParenWith, RuleKind::Iteration, RuleKind::Branch]
                .into_iter()
                .filter(|&k| self.remaining.get(k) > 0)
                .collect()
        };
        if kinds.is_empty() {
            return Err(GenerationError::IncompleteBuild(
                "no rules remain to be added",
            ));
        }
        while !kinds.is_empty() {
            let i = pick(ch, kinds.len());
            if let Some(p) = self.propose(kinds[i], ch) {
                let rule = p.rule;
                self.apply(p);
                return Ok(rule);
            }
            kinds.remove(i);
        }
        Err(GenerationError::DeadEnd)
    }

    /// Promotes the most recent nonterminal to start symbol.
    pub fn finalize(self) -> Result<(Grammar, Vec<TraceStep>), GenerationError> {
        if self.remaining.total() > 0 {
            return Err(GenerationError::IncompleteBuild("rule quota not exhausted"));
        }
        if !self.hanging.is_empty() {
            return Err(GenerationError::IncompleteBuild("hanging symbols remain"));
        }
        let start = self
            .last
            .ok_or(GenerationError::IncompleteBuild("no nonterminal created"))?;
        let g = labelled_grammar(
            self.terminal_count,
            self.nonterminal_count,
            self.rules,
            start,
        )?;
        Ok((g, self.trace))
    }

    fn displaceable(&self, n: Nonterminal) -> bool {
        self.seeded[n.index()] && !self.on_rhs[n.index()]
    }

    fn reaches(&self, from: Nonterminal, to: Nonterminal) -> bool {
        let mut seen = vec![false; self.nonterminal_count as usize];
        let mut stack = vec![from];
        seen[from.index()] = true;
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            for &m in &self.successors[n.index()] {
                if !seen[m.index()] {
                    seen[m.index()] = true;
                    stack.push(m);
                }
            }
        }
        false
    }

    fn propose<C: Choices + ?Sized>(&self, kind: RuleKind, ch: &mut C) -> Option<Proposal> {
        for _ in 0..PROPOSAL_ATTEMPTS {
            if let Some(p) = self.random_proposal(kind, ch) {
                return Some(p);
            }
        }
        let all = self.enumerate(kind);
        if all.is_empty() {
            return None;
        }
        let i = pick(ch, all.len());
        all.into_iter().nth(i)
    }

    fn random_proposal<C: Choices + ?Sized>(&self, kind: RuleKind, ch: &mut C) -> Option<Proposal> {
        let class = match kind {
            RuleKind::ParenNo => RuleClass::ParenNoNt,
            RuleKind::ParenWith => RuleClass::ParenWithNt,
            RuleKind::Branch => RuleClass::Branch,
            RuleKind::Iteration => {
                if ch.coin() {
                    RuleClass::IterLeft
                } else {
                    RuleClass::IterRight
                }
            }
        };
        let n = self.nonterminal_count as usize;
        let can_create = self.nonterminal_count < self.params.max_nonterminals;
        let new_lhs = match (n, can_create) {
            (0, true) => true,
            (0, false) => return None,
            (_, true) => ch.coin(),
            (_, false) => false,
        };
        let lhs = if new_lhs {
            Nonterminal(n as u32)
        } else {
            Nonterminal(pick(ch, n) as u32)
        };

        let arity = kind.rhs_nt_arity();
        let mut rhs_nts = Vec::with_capacity(arity);
        let displaces = new_lhs && self.last.is_some_and(|l| self.displaceable(l));
        if new_lhs && !displaces {
            if let Some(l) = self.last {
                rhs_nts.push(l);
            }
        }
        let budget_after = (self.connection_budget() - arity as u64) as usize;
        let need = (self.hanging.len() + displaces as usize).saturating_sub(budget_after);
        for &h in self.hanging.iter().take(need) {
            rhs_nts.push(h);
        }
        if rhs_nts.len() > arity {
            return None;
        }
        while rhs_nts.len() < arity {
            if n == 0 {
                return None;
            }
            rhs_nts.push(Nonterminal(pick(ch, n) as u32));
        }
        if arity == 2 && rhs_nts[0] != rhs_nts[1] && ch.coin() {
            rhs_nts.swap(0, 1);
        }

        let terminal_slots = match class {
            RuleClass::ParenWithNt | RuleClass::ParenNoNt => 2,
            RuleClass::IterLeft | RuleClass::IterRight => 1,
            RuleClass::Branch => 0,
        };
        let mut next = self.terminal_count;
        let mut ts = Vec::with_capacity(terminal_slots);
        for _ in 0..terminal_slots {
            let can_fresh = next < self.params.max_terminals;
            let fresh = match (next, can_fresh) {
                (0, true) => true,
                (0, false) => return None,
                (_, true) => ch.coin(),
                (_, false) => false,
            };
            if fresh {
                ts.push(Terminal(next));
                next += 1;
            } else {
                ts.push(Terminal(pick(ch, next as usize) as u32));
            }
        }

        let rhs = match class {
            RuleClass::ParenWithNt => Rhs::ParenWith(ts[0], rhs_nts[0], ts[1]),
            RuleClass::ParenNoNt => Rhs::ParenNo(ts[0], ts[1]),
            RuleClass::Branch => Rhs::Branch(rhs_nts[0], rhs_nts[1]),
            RuleClass::IterLeft => Rhs::IterLeft(ts[0], rhs_nts[0]),
            RuleClass::IterRight => Rhs::IterRight(rhs_nts[0], ts[0]),
        };
        self.evaluate(Rule::new(lhs, rhs), new_lhs, next - self.terminal_count)
    }

    /// Checks a fully specified candidate against every construction
    /// constraint.
    fn evaluate(&self, rule: Rule, new_lhs: bool, fresh_terminals: u32) -> Option<Proposal> {
        if self.rule_set.contains(&rule) {
            return None;
        }
        let rhs_nts = rule.rhs.nonterminals();
        let mut hanging = self.hanging.clone();
        for h in &rhs_nts {
            if let Some(pos) = hanging.iter().position(|x| x == h) {
                // Using a hanging symbol only connects it if the lhs is not
                // inside its own subtree.
                if !new_lhs && self.reaches(*h, rule.lhs) {
                    return None;
                }
                hanging.remove(pos);
            }
        }
        if new_lhs {
            if let Some(l) = self.last {
                if !rhs_nts.contains(&l) {
                    if !self.displaceable(l) {
                        return None;
                    }
                    hanging.push(l);
                }
            }
        }
        let budget_after = self.connection_budget() - rule.class().rhs_nt_arity() as u64;
        if hanging.len() as u64 > budget_after {
            return None;
        }
        Some(Proposal {
            rule,
            new_lhs,
            fresh_terminals,
            hanging_after: hanging,
        })
    }

    /// Every admissible rule of the given kind, in a fixed order.
    fn enumerate(&self, kind: RuleKind) -> Vec<Proposal> {
        let n = self.nonterminal_count;
        let can_create = n < self.params.max_nonterminals;
        let lhs_options = n as u128 + can_create as u128;
        let t_options = (self.terminal_count as u128 + 2).max(1);
        let arity = kind.rhs_nt_arity() as u32;
        let raw = lhs_options * (n as u128).max(1).pow(arity) * t_options * t_options * 2;
        if raw > ENUMERATION_LIMIT {
            return Vec::new();
        }

        let mut lhs_choices: Vec<(Nonterminal, bool)> =
            (0..n).map(|i| (Nonterminal(i), false)).collect();
        if can_create {
            lhs_choices.push((Nonterminal(n), true));
        }
        let nts: Vec<Nonterminal> = (0..n).map(Nonterminal).collect();
        let pairs = self.terminal_sequences(2);
        let singles = self.terminal_sequences(1);

        let mut out = Vec::new();
        for &(lhs, new_lhs) in &lhs_choices {
            let mut push = |rhs: Rhs, fresh: u32| {
                if let Some(p) = self.evaluate(Rule::new(lhs, rhs), new_lhs, fresh) {
                    out.push(p);
                }
            };
            match kind {
                RuleKind::ParenNo => {
                    for (ts, fresh) in &pairs {
                        push(Rhs::ParenNo(ts[0], ts[1]), *fresh);
                    }
                }
                RuleKind::ParenWith => {
                    for &b in &nts {
                        for (ts, fresh) in &pairs {
                            push(Rhs::ParenWith(ts[0], b, ts[1]), *fresh);
                        }
                    }
                }
                RuleKind::Iteration => {
                    for &e in &nts {
                        for (ts, fresh) in &singles {
                            push(Rhs::IterLeft(ts[0], e), *fresh);
                            push(Rhs::IterRight(e, ts[0]), *fresh);
                        }
                    }
                }
                RuleKind::Branch => {
                    for &b in &nts {
                        for &c in &nts {
                            push(Rhs::Branch(b, c), 0);
                        }
                    }
                }
            }
        }
        out
    }

    /// Terminal sequences of the given length where each position picks an
    /// existing terminal or the next fresh one.
    fn terminal_sequences(&self, len: usize) -> Vec<(Vec<Terminal>, u32)> {
        let mut acc: Vec<(Vec<Terminal>, u32)> = vec![(Vec::new(), 0)];
        for _ in 0..len {
            let mut next = Vec::new();
            for (seq, fresh) in &acc {
                let available = self.terminal_count + fresh;
                for t in 0..available {
                    let mut s = seq.clone();
                    s.push(Terminal(t));
                    next.push((s, *fresh));
                }
                if available < self.params.max_terminals {
                    let mut s = seq.clone();
                    s.push(Terminal(available));
                    next.push((s, fresh + 1));
                }
            }
            acc = next;
        }
        acc
    }

    fn apply(&mut self, p: Proposal) {
        let rule = p.rule;
        let index = self.rules.len();
        let new_nonterminal = if p.new_lhs {
            let n = Nonterminal(self.nonterminal_count);
            self.nonterminal_count += 1;
            self.seeded.push(rule.class() == RuleClass::ParenNoNt);
            self.on_rhs.push(false);
            self.successors.push(Vec::new());
            self.created_for.push(index);
            self.last = Some(n);
            Some(n)
        } else {
            None
        };
        let new_terminals = (self.terminal_count..self.terminal_count + p.fresh_terminals)
            .map(Terminal)
            .collect();
        self.terminal_count += p.fresh_terminals;
        for n in rule.rhs.nonterminals() {
            self.on_rhs[n.index()] = true;
            self.successors[rule.lhs.index()].push(n);
        }
        *self.remaining.get_mut(rule.class().kind()) -= 1;
        self.hanging = p.hanging_after;
        self.rules.push(rule);
        self.rule_set.insert(rule);
        self.trace.push(TraceStep {
            step: index + 1,
            rule,
            new_nonterminal,
            new_terminals,
        });
    }
}

/// One build attempt without restarts or feasibility gate.
pub fn build_once<C: Choices + ?Sized>(
    params: GenerationParams,
    ch: &mut C,
) -> Result<(Grammar, Vec<TraceStep>), GenerationError> {
    let mut b = Builder::new(params);
    b.seed_paren_no(ch)?;
    while b.remaining().total() > 0 {
        b.add_rule(ch)?;
    }
    b.finalize()
}

/// Generates a consistent grammar with exactly the requested rule counts.
pub fn generate<C: Choices + ?Sized>(
    params: &GenerationParams,
    ch: &mut C,
) -> Result<GenerationResult, GenerationError> {
    generate_with_restarts(params, DEFAULT_RESTARTS, ch)
}

pub fn generate_with_restarts<C: Choices + ?Sized>(
    params: &GenerationParams,
    restarts: usize,
    ch: &mut C,
) -> Result<GenerationResult, GenerationError> {
    let verdict = check_feasible(params)?;
    if !verdict.feasible {
        return Err(GenerationError::InfeasibleParams(verdict));
    }
    for attempt in 0..=restarts {
        match build_once(*params, ch) {
            Ok((grammar, trace)) => {
                return Ok(GenerationResult {
                    params: *params,
                    grammar,
                    trace,
                    restarts: attempt,
                });
            }
            Err(GenerationError::DeadEnd) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GenerationError::RetryExhausted { restarts })
}
