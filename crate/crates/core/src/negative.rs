//! Negative example sets: rejection-sampled random words and edit-distance
//! mutations of positive examples. Every emitted word is checked with CYK.

use rand::Rng;
use thiserror::Error;

use crate::cnf::{cyk_parse, CnfError, CnfGrammar};
use crate::examples::{ExampleMethod, ExampleSet};
use crate::grammar::Terminal;

/// Candidate draws allowed per requested example.
pub const ATTEMPTS_PER_EXAMPLE: usize = 1_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NegativeError {
    #[error("invalid specification: {0}")]
    InvalidSpec(&'static str),
    #[error("the grammar declares no terminals")]
    EmptyAlphabet,
    #[error("no positive examples to mutate")]
    NoSources,
    #[error("attempt budget exhausted after {} of {requested} examples", partial.len())]
    Exhausted { requested: usize, partial: Box<ExampleSet> },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub count: usize,
    pub min_len: usize,
    pub max_len: usize,
}

impl RandomSpec {
    pub fn validate(&self) -> Result<(), NegativeError> {
        if self.count == 0 {
            return Err(NegativeError::InvalidSpec("count must be at least 1"));
        }
        if self.min_len == 0 {
            return Err(NegativeError::InvalidSpec("minimum length must be at least 1"));
        }
        if self.min_len > self.max_len {
            return Err(NegativeError::InvalidSpec("minimum length exceeds maximum length"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevenshteinSpec {
    pub count: usize,
    pub distance: usize,
}

impl LevenshteinSpec {
    pub fn validate(&self) -> Result<(), NegativeError> {
        if self.count == 0 {
            return Err(NegativeError::InvalidSpec("count must be at least 1"));
        }
        if self.distance == 0 {
            return Err(NegativeError::InvalidSpec("distance must be at least 1"));
        }
        Ok(())
    }
}

/// Edit distance with unit-cost insertion, deletion and substitution.
pub fn levenshtein_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn exhausted(requested: usize, set: ExampleSet) -> NegativeError {
    NegativeError::Exhausted { requested, partial: Box::new(set) }
}

/// `count` distinct words of uniform random length and symbols, none of
/// them accepted by the grammar.
pub fn random_negatives<R: Rng + ?Sized>(
    c: &CnfGrammar,
    spec: &RandomSpec,
    rng: &mut R,
) -> Result<ExampleSet, NegativeError> {
    spec.validate()?;
    let sigma = c.terminals().len();
    if sigma == 0 {
        return Err(NegativeError::EmptyAlphabet);
    }
    let mut set = ExampleSet::new("", ExampleMethod::Random);
    for _ in 0..spec.count * ATTEMPTS_PER_EXAMPLE {
        if set.len() == spec.count {
            return Ok(set);
        }
        let len = rng.gen_range(spec.min_len..=spec.max_len);
        let word: Vec<Terminal> = (0..len).map(|_| Terminal(rng.gen_range(0..sigma) as u32)).collect();
        if !set.contains(&word) && !cyk_parse(c, &word)? {
            set.insert(word);
        }
    }
    if set.len() == spec.count {
        Ok(set)
    } else {
        Err(exhausted(spec.count, set))
    }
}

/// Applies `d` random single-symbol edits. Substitutions always change the
/// symbol; edits may still cancel, so callers verify the distance.
pub fn mutate<R: Rng + ?Sized>(source: &[Terminal], d: usize, sigma: usize, rng: &mut R) -> Vec<Terminal> {
    let mut w = source.to_vec();
    for _ in 0..d {
        let can_substitute = !w.is_empty() && sigma >= 2;
        let ops = if w.is_empty() { 1 } else if can_substitute { 3 } else { 2 };
        match rng.gen_range(0..ops) {
            0 => {
                let pos = rng.gen_range(0..=w.len());
                w.insert(pos, Terminal(rng.gen_range(0..sigma) as u32));
            }
            1 => {
                w.remove(rng.gen_range(0..w.len()));
            }
            _ => {
                let pos = rng.gen_range(0..w.len());
                let shift = rng.gen_range(1..sigma) as u32;
                w[pos] = Terminal((w[pos].0 + shift) % sigma as u32);
            }
        }
    }
    w
}

/// `count` distinct words, each exactly `distance` edits from a positive
/// source drawn uniformly, and rejected by the grammar.
pub fn levenshtein_negatives<R: Rng + ?Sized>(
    c: &CnfGrammar,
    positives: &ExampleSet,
    spec: &LevenshteinSpec,
    rng: &mut R,
) -> Result<ExampleSet, NegativeError> {
    spec.validate()?;
    if positives.is_empty() {
        return Err(NegativeError::NoSources);
    }
    let sigma = c.terminals().len();
    if sigma == 0 {
        return Err(NegativeError::EmptyAlphabet);
    }
    let mut set = ExampleSet::new("", ExampleMethod::Levenshtein);
    set.distance = Some(spec.distance);
    for _ in 0..spec.count * ATTEMPTS_PER_EXAMPLE {
        if set.len() == spec.count {
            return Ok(set);
        }
        let source = positives.get(rng.gen_range(0..positives.len())).expect("index in range");
        let word = mutate(source, spec.distance, sigma, rng);
        if word.is_empty() || set.contains(&word) || levenshtein_distance(source, &word) != spec.distance {
            continue;
        }
        if !cyk_parse(c, &word)? {
            set.insert_with_source(word, source.clone());
        }
    }
    if set.len() == spec.count {
        Ok(set)
    } else {
        Err(exhausted(spec.count, set))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{to_cnf, CnfRule};
    use crate::grammar::{parse_grammar_text, Grammar, Nonterminal};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn worked_example() -> Grammar {
        parse_grammar_text(include_str!("../tests/fixtures/worked_example.grammar")).unwrap()
    }

    fn tok(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(levenshtein_distance(&tok("bcc"), &tok("bcc")), 0);
        assert_eq!(levenshtein_distance(&tok("bcc"), &tok("bc")), 1);
        assert_eq!(levenshtein_distance(&tok("abab"), &tok("bcc")), 3);
        assert_eq!(levenshtein_distance(&tok(""), &tok("abc")), 3);
        assert_eq!(levenshtein_distance(&tok("kitten"), &tok("sitting")), 3);
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(a in "[abc]{0,8}", b in "[abc]{0,8}", c in "[abc]{0,8}") {
            let (a, b, c) = (tok(&a), tok(&b), tok(&c));
            prop_assert_eq!(levenshtein_distance(&a, &a), 0);
            prop_assert_eq!(levenshtein_distance(&a, &b) == 0, a == b);
            prop_assert_eq!(levenshtein_distance(&a, &b), levenshtein_distance(&b, &a));
            prop_assert!(levenshtein_distance(&a, &c) <= levenshtein_distance(&a, &b) + levenshtein_distance(&b, &c));
        }
    }

    #[test]
    fn random_negatives_on_worked_example() {
        let g = worked_example();
        let c = to_cnf(&g);
        let spec = RandomSpec { count: 5, min_len: 1, max_len: 4 };
        let a = random_negatives(&c, &spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a.len(), 5);
        for w in a.iter() {
            assert!((1..=4).contains(&w.len()));
            assert!(!cyk_parse(&c, w).unwrap());
        }
        let b = random_negatives(&c, &spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert!(!cyk_parse(&c, &c.tokenize("a").unwrap()).unwrap());
    }

    #[test]
    fn universal_grammar_exhausts() {
        // S -> S S | a accepts every nonempty word over {a}.
        let c = CnfGrammar::new(
            vec!["a".into()],
            vec!["S".into()],
            vec![CnfRule::Binary(Nonterminal(0), Nonterminal(0), Nonterminal(0)), CnfRule::Term(Nonterminal(0), Terminal(0))],
            Nonterminal(0),
        )
        .unwrap();
        let spec = RandomSpec { count: 2, min_len: 1, max_len: 3 };
        match random_negatives(&c, &spec, &mut ChaCha8Rng::seed_from_u64(0)) {
            Err(NegativeError::Exhausted { requested: 2, partial }) => assert!(partial.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        let c = to_cnf(&worked_example());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let bad = RandomSpec { count: 1, min_len: 3, max_len: 2 };
        assert!(matches!(random_negatives(&c, &bad, &mut rng), Err(NegativeError::InvalidSpec(_))));
        let mut pos = ExampleSet::new("", ExampleMethod::Optimal);
        pos.insert(c.tokenize("b c c").unwrap());
        let zero = LevenshteinSpec { count: 1, distance: 0 };
        assert!(matches!(levenshtein_negatives(&c, &pos, &zero, &mut rng), Err(NegativeError::InvalidSpec(_))));
        let empty = ExampleSet::new("", ExampleMethod::Optimal);
        let spec = LevenshteinSpec { count: 1, distance: 1 };
        assert_eq!(levenshtein_negatives(&c, &empty, &spec, &mut rng), Err(NegativeError::NoSources));
    }

    #[test]
    fn levenshtein_negatives_from_bcc() {
        let c = to_cnf(&worked_example());
        let mut pos = ExampleSet::new("", ExampleMethod::Optimal);
        let bcc = c.tokenize("b c c").unwrap();
        pos.insert(bcc.clone());
        let spec = LevenshteinSpec { count: 6, distance: 1 };
        let set = levenshtein_negatives(&c, &pos, &spec, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        assert_eq!(set.len(), 6);
        assert_eq!(set.distance, Some(1));
        for (w, src) in set.iter().zip(set.sources().unwrap()) {
            assert_eq!(src, &bcc);
            assert_eq!(levenshtein_distance(src, w), 1);
            assert!(!cyk_parse(&c, w).unwrap());
        }
    }

    #[test]
    fn mutation_respects_alphabet() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let w = mutate(&[Terminal(0), Terminal(1)], 3, 2, &mut rng);
            assert!(w.iter().all(|t| t.0 < 2));
            assert!(levenshtein_distance(&[Terminal(0), Terminal(1)], &w) <= 3);
        }
        // A one-letter alphabet cannot substitute.
        let w = mutate(&[Terminal(0)], 5, 1, &mut rng);
        assert!(w.iter().all(|t| t.0 == 0));
    }
}
