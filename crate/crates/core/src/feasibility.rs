//! Feasibility of generation parameters and parameter acquisition from a
//! target rule count.
//!
//! The five constraints are evaluated in cleared-denominator integer form so
//! boundary cases are decided exactly:
//!
//! | id | constraint                        |
//! |----|-----------------------------------|
//! | C1 | `P- <= S_NT * S_T^2`              |
//! | C2 | `P- <= N_min * S_T^2`             |
//! | C3 | `P+ <= S_NT^2 * S_T^2`            |
//! | C4 | `I  <= 2 * S_NT^2 * S_T`          |
//! | C5 | `B  <= S_NT^3`                    |
//!
//! where `N_min = P+ + I + 2B + 1`.

use std::fmt;
use std::ops::RangeInclusive;

use rand::Rng;
use thiserror::Error;

pub use crate::grammar::{RuleCounts, RuleKind};

/// Attempts made by [`derive_params`] before giving up.
pub const DEFAULT_PARAM_ATTEMPTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GenerationParams {
    /// Maximum number of terminal symbols.
    pub max_terminals: u32,
    /// Maximum number of nonterminal symbols.
    pub max_nonterminals: u32,
    /// Exact number of rules per class.
    pub counts: RuleCounts,
}

impl GenerationParams {
    pub fn new(max_terminals: u32, max_nonterminals: u32, counts: RuleCounts) -> Self {
        GenerationParams {
            max_terminals,
            max_nonterminals,
            counts,
        }
    }

    pub fn validate(&self) -> Result<(), FeasibilityError> {
        if self.max_terminals == 0 {
            return Err(FeasibilityError::Domain(
                "maximum terminal count must be positive",
            ));
        }
        if self.max_nonterminals == 0 {
            return Err(FeasibilityError::Domain(
                "maximum nonterminal count must be positive",
            ));
        }
        if self.counts.paren_no == 0 {
            return Err(FeasibilityError::Domain(
                "at least one parenthesis rule without nonterminal is required",
            ));
        }
        Ok(())
    }
}

impl fmt::Display for GenerationParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.counts;
        write!(
            f,
            "S_T={} S_NT={} P-={} P+={} I={} B={}",
            self.max_terminals,
            self.max_nonterminals,
            c.paren_no,
            c.paren_with,
            c.iteration,
            c.branch
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeasibilityError {
    #[error("parameter out of domain: {0}")]
    Domain(&'static str),
    #[error("no feasible parameter set sampled in {attempts} attempts")]
    Unsatisfiable { attempts: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    C1,
    C2,
    C3,
    C4,
    C5,
}

impl Constraint {
    pub const ALL: [Constraint; 5] = [
        Constraint::C1,
        Constraint::C2,
        Constraint::C3,
        Constraint::C4,
        Constraint::C5,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            Constraint::C1 => "P- <= S_NT*S_T^2",
            Constraint::C2 => "P- <= (P+ + I + 2B + 1)*S_T^2",
            Constraint::C3 => "P+ <= S_NT^2*S_T^2",
            Constraint::C4 => "I <= 2*S_NT^2*S_T",
            Constraint::C5 => "B <= S_NT^3",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A violated constraint with both sides of its integer form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub constraint: Constraint,
    pub lhs: u128,
    pub rhs: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl fmt::Display for FeasibilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.feasible {
            return writeln!(f, "feasible");
        }
        writeln!(f, "infeasible")?;
        for v in &self.violations {
            writeln!(
                f,
                "  {} violated: {} ({} > {})",
                v.constraint,
                v.constraint.describe(),
                v.lhs,
                v.rhs
            )?;
        }
        Ok(())
    }
}

/// Maximum number of distinct rules of one kind over the given symbol counts.
pub fn class_capacity(kind: RuleKind, nonterminals: u32, terminals: u32) -> u128 {
    let n = nonterminals as u128;
    let t = terminals as u128;
    match kind {
        RuleKind::ParenWith => n * n * t * t,
        RuleKind::ParenNo => n * t * t,
        RuleKind::Iteration => 2 * n * n * t,
        RuleKind::Branch => n * n * n,
    }
}

/// Nonterminals that can be joined into one tree: one root plus every
/// right-hand-side nonterminal slot.
pub fn n_min_connect(paren_with: u32, iteration: u32, branch: u32) -> u64 {
    paren_with as u64 + iteration as u64 + 2 * branch as u64 + 1
}

pub fn check_feasible(p: &GenerationParams) -> Result<FeasibilityVerdict, FeasibilityError> {
    p.validate()?;
    let c = &p.counts;
    let t2 = (p.max_terminals as u128).pow(2);
    let n_min = n_min_connect(c.paren_with, c.iteration, c.branch) as u128;
    let (s_nt, s_t) = (p.max_nonterminals, p.max_terminals);
    let checks = [
        (
            Constraint::C1,
            c.paren_no as u128,
            class_capacity(RuleKind::ParenNo, s_nt, s_t),
        ),
        (Constraint::C2, c.paren_no as u128, n_min * t2),
        (
            Constraint::C3,
            c.paren_with as u128,
            class_capacity(RuleKind::ParenWith, s_nt, s_t),
        ),
        (
            Constraint::C4,
            c.iteration as u128,
            class_capacity(RuleKind::Iteration, s_nt, s_t),
        ),
        (
            Constraint::C5,
            c.branch as u128,
            class_capacity(RuleKind::Branch, s_nt, s_t),
        ),
    ];
    let violations: Vec<Violation> = checks
        .into_iter()
        .filter(|&(_, lhs, rhs)| lhs > rhs)
        .map(|(constraint, lhs, rhs)| Violation {
            constraint,
            lhs,
            rhs,
        })
        .collect();
    Ok(FeasibilityVerdict {
        feasible: violations.is_empty(),
        violations,
    })
}

/// Smallest `r >= 0` with `r^power * scale >= value`.
fn root_ceil(value: u128, scale: u128, power: u32) -> u128 {
    debug_assert!(scale > 0);
    let mut r = 0u128;
    while r.pow(power) * scale < value {
        r += 1;
    }
    r
}

/// Admissible range for the maximum terminal count.
pub fn terminal_bounds(counts: &RuleCounts) -> RangeInclusive<u32> {
    let n_min = n_min_connect(counts.paren_with, counts.iteration, counts.branch) as u128;
    let lower = root_ceil(counts.paren_no as u128, n_min, 2).max(1) as u32;
    let upper = 2 * counts.paren_no + 2 * counts.paren_with;
    lower..=upper
}

/// Admissible range for the maximum nonterminal count once the terminal
/// maximum is fixed. May be empty, in which case the draw is rejected.
pub fn nonterminal_bounds(counts: &RuleCounts, max_terminals: u32) -> RangeInclusive<u32> {
    let t = max_terminals as u128;
    let t2 = t * t;
    // Mean of the four per-class minima; the roots are taken as integer
    // ceilings and the mean as a rational ceiling.
    let roots = root_ceil(counts.paren_with as u128, t2, 2)
        + root_ceil(counts.iteration as u128, 2 * t, 2)
        + root_ceil(counts.branch as u128, 1, 3);
    let numerator = counts.paren_no as u128 + t2 * roots;
    let denominator = 4 * t2;
    let lower = numerator.div_ceil(denominator).max(1) as u32;

    let upper = if counts.branch + 1 >= counts.paren_no {
        counts.paren_no + counts.paren_with + counts.iteration + counts.branch
    } else {
        counts.paren_with + counts.iteration + 2 * counts.branch + 1
    };
    lower..=upper
}

/// Uniformly draws a rule split with at least one parenthesis rule without
/// nonterminal, summing to `total`.
pub fn sample_composition<R: Rng + ?Sized>(total: u32, rng: &mut R) -> RuleCounts {
    assert!(total >= 1);
    // Stars and bars: `total - 1` free units over four slots, bars at three
    // distinct positions among `total + 2`.
    let free = (total - 1) as usize;
    let mut bars = rand::seq::index::sample(rng, free + 3, 3).into_vec();
    bars.sort_unstable();
    let parts = [
        bars[0],
        bars[1] - bars[0] - 1,
        bars[2] - bars[1] - 1,
        free + 2 - bars[2],
    ];
    RuleCounts {
        paren_no: parts[0] as u32 + 1,
        paren_with: parts[1] as u32,
        iteration: parts[2] as u32,
        branch: parts[3] as u32,
    }
}

/// Draws symbol maxima for a fixed rule split. Returns `None` when the drawn
/// terminal maximum leaves an empty nonterminal range or the result fails the
/// feasibility check.
pub fn params_for_counts<R: Rng + ?Sized>(
    counts: RuleCounts,
    rng: &mut R,
) -> Option<GenerationParams> {
    let t_range = terminal_bounds(&counts);
    if t_range.is_empty() {
        return None;
    }
    let max_terminals = rng.gen_range(t_range);
    let nt_range = nonterminal_bounds(&counts, max_terminals);
    if nt_range.is_empty() {
        return None;
    }
    let max_nonterminals = rng.gen_range(nt_range);
    let params = GenerationParams::new(max_terminals, max_nonterminals, counts);
    match check_feasible(&params) {
        Ok(v) if v.feasible => Some(params),
        _ => None,
    }
}

/// Derives a complete parameter set for a grammar with `total_rules` rules.
pub fn derive_params<R: Rng + ?Sized>(
    total_rules: u32,
    rng: &mut R,
) -> Result<GenerationParams, FeasibilityError> {
    derive_params_with_budget(total_rules, DEFAULT_PARAM_ATTEMPTS, rng)
}

pub fn derive_params_with_budget<R: Rng + ?Sized>(
    total_rules: u32,
    attempts: usize,
    rng: &mut R,
) -> Result<GenerationParams, FeasibilityError> {
    if total_rules == 0 {
        return Err(FeasibilityError::Domain(
            "total rule count must be positive",
        ));
    }
    for _ in 0..attempts {
        let counts = sample_composition(total_rules, rng);
        if let Some(p) = params_for_counts(counts, rng) {
            return Ok(p);
        }
    }
    Err(FeasibilityError::Unsatisfiable { attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn params(s_t: u32, s_nt: u32, pn: u32, pw: u32, i: u32, b: u32) -> GenerationParams {
        GenerationParams::new(s_t, s_nt, RuleCounts::new(pn, pw, i, b))
    }

    #[test]
    fn capacities() {
        assert_eq!(class_capacity(RuleKind::ParenWith, 4, 3), 144);
        assert_eq!(class_capacity(RuleKind::Branch, 1, 1), 1);
        assert_eq!(class_capacity(RuleKind::Iteration, 2, 3), 24);
        assert_eq!(class_capacity(RuleKind::ParenNo, 4, 3), 36);
    }

    #[test]
    fn connection_bound() {
        assert_eq!(n_min_connect(0, 2, 1), 5);
        assert_eq!(n_min_connect(0, 0, 0), 1);
        assert_eq!(n_min_connect(1, 1, 1), 5);
    }

    #[test]
    fn feasibility_examples() {
        assert!(check_feasible(&params(3, 4, 2, 0, 2, 1)).unwrap().feasible);
        assert!(check_feasible(&params(1, 1, 1, 0, 0, 0)).unwrap().feasible);
        let v = check_feasible(&params(1, 1, 2, 0, 0, 0)).unwrap();
        assert!(!v.feasible);
        assert_eq!(
            v.violations[0],
            Violation {
                constraint: Constraint::C1,
                lhs: 2,
                rhs: 1
            }
        );
        // C2 fails as well: one root cannot absorb a second terminal-rule lhs.
        assert_eq!(v.violations[1].constraint, Constraint::C2);
        assert!(v.to_string().contains("C1 violated"));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            check_feasible(&params(1, 1, 0, 0, 0, 0)),
            Err(FeasibilityError::Domain(_))
        ));
        assert!(matches!(
            check_feasible(&params(0, 1, 1, 0, 0, 0)),
            Err(FeasibilityError::Domain(_))
        ));
        assert!(matches!(
            check_feasible(&params(1, 0, 1, 0, 0, 0)),
            Err(FeasibilityError::Domain(_))
        ));
    }

    #[test]
    fn terminal_bound_examples() {
        assert_eq!(terminal_bounds(&RuleCounts::new(2, 0, 2, 1)), 1..=4);
        assert_eq!(terminal_bounds(&RuleCounts::new(1, 0, 0, 0)), 1..=2);
        assert_eq!(terminal_bounds(&RuleCounts::new(4, 1, 0, 0)), 2..=10);
    }

    #[test]
    fn nonterminal_bound_examples() {
        assert_eq!(nonterminal_bounds(&RuleCounts::new(2, 0, 2, 1), 3), 1..=5);
        assert_eq!(nonterminal_bounds(&RuleCounts::new(1, 0, 0, 0), 1), 1..=1);
        assert_eq!(nonterminal_bounds(&RuleCounts::new(3, 0, 0, 0), 2), 1..=1);
    }

    #[test]
    fn derive_params_single_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = derive_params(1, &mut rng).unwrap();
            assert_eq!(p.counts, RuleCounts::new(1, 0, 0, 0));
            assert!((1..=2).contains(&p.max_terminals));
            assert_eq!(p.max_nonterminals, 1);
        }
    }

    #[test]
    fn derive_params_rejects_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(matches!(
            derive_params(0, &mut rng),
            Err(FeasibilityError::Domain(_))
        ));
    }

    #[test]
    fn worked_example_ranges() {
        let counts = RuleCounts::new(2, 0, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            if let Some(p) = params_for_counts(counts, &mut rng) {
                assert!((1..=4).contains(&p.max_terminals));
                assert!((1..=5).contains(&p.max_nonterminals));
            }
        }
    }

    #[test]
    fn composition_sampling_is_uniform() {
        // total = 4 leaves 3 free units over 4 slots: C(6, 3) = 20 compositions.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hist: HashMap<RuleCounts, usize> = HashMap::new();
        let draws = 40_000;
        for _ in 0..draws {
            let c = sample_composition(4, &mut rng);
            assert_eq!(c.total(), 4);
            assert!(c.paren_no >= 1);
            *hist.entry(c).or_default() += 1;
        }
        assert_eq!(hist.len(), 20);
        let expected = draws as f64 / 20.0;
        for (&c, &n) in &hist {
            let sigma = (expected * (1.0 - 1.0 / 20.0)).sqrt();
            assert!((n as f64 - expected).abs() < 5.0 * sigma, "{c:?}: {n}");
        }
    }

    proptest! {
        #[test]
        fn derived_params_are_feasible(total in 1u32..40, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = derive_params(total, &mut rng).unwrap();
            prop_assert_eq!(p.counts.total(), total as u64);
            prop_assert!(p.counts.paren_no >= 1);
            prop_assert!(check_feasible(&p).unwrap().feasible);
        }

        #[test]
        fn terminal_lower_bound_is_tight(pn in 1u32..200, pw in 0u32..20, i in 0u32..20, b in 0u32..20) {
            let counts = RuleCounts::new(pn, pw, i, b);
            let n_min = n_min_connect(pw, i, b);
            let l = *terminal_bounds(&counts).start() as u64;
            prop_assert!(l * l * n_min >= pn as u64);
            if l > 1 {
                prop_assert!((l - 1) * (l - 1) * n_min < pn as u64);
            }
        }

        #[test]
        fn integer_forms_match_real_forms(s_t in 1u32..=50, s_nt in 1u32..=50, pn in 1u32..=50, pw in 0u32..=50, i in 0u32..=50, b in 0u32..=50) {
            let p = params(s_t, s_nt, pn, pw, i, b);
            let v = check_feasible(&p).unwrap();
            let (t, n) = (s_t as f64, s_nt as f64);
            let n_min = n_min_connect(pw, i, b) as f64;
            let real = [
                pn as f64 / (t * t) - n,
                pn as f64 / (t * t) - n_min,
                (pw as f64 / (t * t)).sqrt() - n,
                (i as f64 / (2.0 * t)).sqrt() - n,
                (b as f64).cbrt() - n,
            ];
            for (k, margin) in real.iter().enumerate() {
                let violated = v.violations.iter().any(|x| x.constraint == Constraint::ALL[k]);
                // Only decide away from the boundary; at it the integer form is authoritative.
                if margin.abs() > 1e-9 {
                    prop_assert_eq!(violated, *margin > 0.0, "constraint {}", k + 1);
                }
            }
        }
    }
}
