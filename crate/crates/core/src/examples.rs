//! Example sets and their text format.
//!
//! ```text
//! # grammar: grammar.txt
//! # kind: negative
//! # method: levenshtein
//! # seed: 7
//! # distance: 1
//! b c
//! a c c
//! ```

use std::fmt;
use std::str::FromStr;

use indexmap::IndexSet;
use thiserror::Error;

use crate::grammar::{render_with, tokenize_with, Terminal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleKind {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleMethod {
    Optimal,
    Uniform,
    Random,
    Levenshtein,
}

impl ExampleKind {
    pub fn name(self) -> &'static str {
        match self {
            ExampleKind::Positive => "positive",
            ExampleKind::Negative => "negative",
        }
    }
}

impl ExampleMethod {
    pub fn name(self) -> &'static str {
        match self {
            ExampleMethod::Optimal => "optimal",
            ExampleMethod::Uniform => "uniform",
            ExampleMethod::Random => "random",
            ExampleMethod::Levenshtein => "levenshtein",
        }
    }

    pub fn kind(self) -> ExampleKind {
        match self {
            ExampleMethod::Optimal | ExampleMethod::Uniform => ExampleKind::Positive,
            ExampleMethod::Random | ExampleMethod::Levenshtein => ExampleKind::Negative,
        }
    }
}

impl fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for ExampleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleKind {
    type Err = ExampleSetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(ExampleKind::Positive),
            "negative" => Ok(ExampleKind::Negative),
            _ => Err(ExampleSetError::Header(format!("unknown kind `{s}`"))),
        }
    }
}

impl FromStr for ExampleMethod {
    type Err = ExampleSetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "optimal" => Ok(ExampleMethod::Optimal),
            "uniform" => Ok(ExampleMethod::Uniform),
            "random" => Ok(ExampleMethod::Random),
            "levenshtein" => Ok(ExampleMethod::Levenshtein),
            _ => Err(ExampleSetError::Header(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExampleSetError {
    #[error("bad header: {0}")]
    Header(String),
    #[error("line {line}: unknown terminal `{token}`")]
    UnknownTerminal { line: usize, token: String },
    #[error("line {0}: duplicate example")]
    Duplicate(usize),
}

/// Distinct examples in insertion order, with optional per-example sources.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleSet {
    pub grammar: String,
    pub method: ExampleMethod,
    pub seed: Option<u64>,
    pub distance: Option<usize>,
    examples: IndexSet<Vec<Terminal>>,
    sources: Vec<Vec<Terminal>>,
}

impl ExampleSet {
    pub fn new(grammar: impl Into<String>, method: ExampleMethod) -> Self {
        ExampleSet {
            grammar: grammar.into(),
            method,
            seed: None,
            distance: None,
            examples: IndexSet::new(),
            sources: Vec::new(),
        }
    }

    pub fn kind(&self) -> ExampleKind {
        self.method.kind()
    }

    /// Adds a word; returns false if it was already present.
    pub fn insert(&mut self, word: Vec<Terminal>) -> bool {
        self.examples.insert(word)
    }

    /// Adds a word together with the example it was derived from.
    pub fn insert_with_source(&mut self, word: Vec<Terminal>, source: Vec<Terminal>) -> bool {
        debug_assert_eq!(self.examples.len(), self.sources.len());
        let added = self.examples.insert(word);
        if added {
            self.sources.push(source);
        }
        added
    }

    pub fn contains(&self, word: &[Terminal]) -> bool {
        self.examples.contains(word)
    }

    pub fn index_of(&self, word: &[Terminal]) -> Option<usize> {
        self.examples.get_index_of(word)
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<Terminal>> {
        self.examples.iter()
    }

    pub fn get(&self, i: usize) -> Option<&Vec<Terminal>> {
        self.examples.get_index(i)
    }

    /// Sources aligned with the examples, when recorded.
    pub fn sources(&self) -> Option<&[Vec<Terminal>]> {
        (!self.sources.is_empty()).then_some(self.sources.as_slice())
    }

    pub fn to_text(&self, terminals: &[String]) -> String {
        let mut out = format!(
            "# grammar: {}\n# kind: {}\n# method: {}\n",
            self.grammar,
            self.kind(),
            self.method
        );
        if let Some(seed) = self.seed {
            out.push_str(&format!("# seed: {seed}\n"));
        }
        if let Some(d) = self.distance {
            out.push_str(&format!("# distance: {d}\n"));
        }
        for w in &self.examples {
            out.push_str(&render_with(terminals, w));
            out.push('\n');
        }
        out
    }

    /// Recorded sources, one per line and aligned with the examples.
    pub fn sources_to_text(&self, terminals: &[String]) -> String {
        self.sources.iter().map(|w| render_with(terminals, w) + "\n").collect()
    }

    pub fn parse(text: &str, terminals: &[String]) -> Result<Self, ExampleSetError> {
        let mut grammar = None;
        let mut kind = None;
        let mut method = None;
        let mut seed = None;
        let mut distance = None;
        let mut examples = IndexSet::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if let Some(comment) = line.strip_prefix('#') {
                let Some((key, value)) = comment.split_once(':') else { continue };
                let value = value.trim();
                let bad = |what: &str| ExampleSetError::Header(format!("line {line_no}: invalid {what} `{value}`"));
                match key.trim() {
                    "grammar" => grammar = Some(value.to_string()),
                    "kind" => kind = Some(value.parse::<ExampleKind>()?),
                    "method" => method = Some(value.parse::<ExampleMethod>()?),
                    "seed" => seed = Some(value.parse().map_err(|_| bad("seed"))?),
                    "distance" => distance = Some(value.parse().map_err(|_| bad("distance"))?),
                    _ => {}
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let word = tokenize_with(terminals, line).map_err(|e| ExampleSetError::UnknownTerminal {
                line: line_no,
                token: match e {
                    crate::grammar::GrammarError::UnknownTerminal(t) => t,
                    other => other.to_string(),
                },
            })?;
            if !examples.insert(word) {
                return Err(ExampleSetError::Duplicate(line_no));
            }
        }
        let method = method.ok_or_else(|| ExampleSetError::Header("missing `# method:` line".into()))?;
        let kind = kind.ok_or_else(|| ExampleSetError::Header("missing `# kind:` line".into()))?;
        if kind != method.kind() {
            return Err(ExampleSetError::Header(format!("method {method} does not produce {kind} examples")));
        }
        Ok(ExampleSet {
            grammar: grammar.unwrap_or_default(),
            method,
            seed,
            distance,
            examples,
            sources: Vec::new(),
        })
    }

    /// Attaches sources read back from a sources file.
    pub fn set_sources(&mut self, sources: Vec<Vec<Terminal>>) -> Result<(), ExampleSetError> {
        if sources.len() != self.examples.len() {
            return Err(ExampleSetError::Header(format!(
                "{} sources for {} examples",
                sources.len(),
                self.examples.len()
            )));
        }
        self.sources = sources;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels() -> Vec<String> {
        ["a", "b", "c"].map(String::from).to_vec()
    }

    #[test]
    fn round_trip() {
        let mut set = ExampleSet::new("grammar.txt", ExampleMethod::Levenshtein);
        set.seed = Some(7);
        set.distance = Some(1);
        assert!(set.insert_with_source(vec![Terminal(1), Terminal(2)], vec![Terminal(1), Terminal(2), Terminal(2)]));
        assert!(!set.insert_with_source(vec![Terminal(1), Terminal(2)], vec![Terminal(0)]));
        set.insert_with_source(vec![Terminal(0), Terminal(2), Terminal(2)], vec![Terminal(1), Terminal(2), Terminal(2)]);
        let text = set.to_text(&labels());
        assert_eq!(
            text,
            "# grammar: grammar.txt\n# kind: negative\n# method: levenshtein\n# seed: 7\n# distance: 1\nb c\na c c\n"
        );
        let mut back = ExampleSet::parse(&text, &labels()).unwrap();
        assert_eq!(back.sources(), None);
        back.set_sources(set.sources().unwrap().to_vec()).unwrap();
        assert_eq!(back, set);
        assert_eq!(set.sources_to_text(&labels()), "b c c\nb c c\n");
    }

    #[test]
    fn parse_errors() {
        let l = labels();
        assert!(matches!(ExampleSet::parse("# kind: positive\na b\n", &l), Err(ExampleSetError::Header(_))));
        assert!(matches!(
            ExampleSet::parse("# kind: positive\n# method: random\n", &l),
            Err(ExampleSetError::Header(_))
        ));
        assert_eq!(
            ExampleSet::parse("# kind: positive\n# method: uniform\na q\n", &l),
            Err(ExampleSetError::UnknownTerminal { line: 3, token: "q".into() })
        );
        assert_eq!(
            ExampleSet::parse("# kind: positive\n# method: uniform\na b\na  b\n", &l),
            Err(ExampleSetError::Duplicate(4))
        );
    }

    #[test]
    fn insertion_order_kept() {
        let mut set = ExampleSet::new("g", ExampleMethod::Uniform);
        set.insert(vec![Terminal(2)]);
        set.insert(vec![Terminal(0)]);
        set.insert(vec![Terminal(2)]);
        assert_eq!(set.len(), 2);
        assert_eq!(set.get(0), Some(&vec![Terminal(2)]));
        assert_eq!(set.kind(), ExampleKind::Positive);
    }
}
