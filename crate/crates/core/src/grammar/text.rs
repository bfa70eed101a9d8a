//! Line-oriented grammar file format.
//!
//! ```text
//! # optional comments
//! start: $
//! terminals: a b c
//! nonterminals: A B $
//! rules:
//! A -> a b
//! $ -> A A
//! ```

use super::{validate_labels, Grammar, GrammarError, Nonterminal, Rhs, Rule, Symbol, Terminal};

/// A grammar file split into its sections, before any shape checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawGrammar {
    pub start: String,
    pub terminals: Vec<String>,
    pub nonterminals: Vec<String>,
    pub rules: Vec<RawRule>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRule {
    pub line: usize,
    pub lhs: String,
    pub rhs: Vec<String>,
}

fn format_err(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Format {
        line,
        message: message.into(),
    }
}

impl RawGrammar {
    pub fn parse(text: &str) -> Result<Self, GrammarError> {
        let mut start = None;
        let mut terminals = None;
        let mut nonterminals = None;
        let mut rules = Vec::new();
        let mut in_rules = false;

        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if in_rules {
                let (lhs, rhs) = line
                    .split_once("->")
                    .ok_or_else(|| format_err(line_no, "expected `LHS -> symbols`"))?;
                let lhs: Vec<&str> = lhs.split_whitespace().collect();
                if lhs.len() != 1 {
                    return Err(format_err(
                        line_no,
                        "left-hand side must be a single nonterminal",
                    ));
                }
                let rhs: Vec<String> = rhs.split_whitespace().map(str::to_string).collect();
                if rhs.is_empty() || rhs.len() > 3 {
                    return Err(format_err(
                        line_no,
                        format!(
                            "right-hand side of length {} matches no rule class",
                            rhs.len()
                        ),
                    ));
                }
                rules.push(RawRule {
                    line: line_no,
                    lhs: lhs[0].to_string(),
                    rhs,
                });
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| format_err(line_no, "expected `key: value` header"))?;
            let values: Vec<String> = value.split_whitespace().map(str::to_string).collect();
            let slot = match key.trim() {
                "start" => {
                    if values.len() != 1 {
                        return Err(format_err(line_no, "`start` takes exactly one label"));
                    }
                    if start.replace(values[0].clone()).is_some() {
                        return Err(format_err(line_no, "duplicate `start` header"));
                    }
                    continue;
                }
                "terminals" => &mut terminals,
                "nonterminals" => &mut nonterminals,
                "rules" => {
                    if !values.is_empty() {
                        return Err(format_err(line_no, "`rules:` must be on its own line"));
                    }
                    in_rules = true;
                    continue;
                }
                other => return Err(format_err(line_no, format!("unknown header `{other}`"))),
            };
            if slot.replace(values).is_some() {
                return Err(format_err(
                    line_no,
                    format!("duplicate `{}` header", key.trim()),
                ));
            }
        }

        let last = text.lines().count();
        if !in_rules {
            return Err(format_err(last, "missing `rules:` section"));
        }
        Ok(RawGrammar {
            start: start.ok_or_else(|| format_err(last, "missing `start` header"))?,
            terminals: terminals.ok_or_else(|| format_err(last, "missing `terminals` header"))?,
            nonterminals: nonterminals
                .ok_or_else(|| format_err(last, "missing `nonterminals` header"))?,
            rules,
        })
    }

    pub(crate) fn resolve(&self, line: usize, label: &str) -> Result<Symbol, GrammarError> {
        if let Some(i) = self.terminals.iter().position(|l| l == label) {
            return Ok(Symbol::T(Terminal(i as u32)));
        }
        if let Some(i) = self.nonterminals.iter().position(|l| l == label) {
            return Ok(Symbol::N(Nonterminal(i as u32)));
        }
        Err(GrammarError::UndeclaredSymbol {
            line,
            label: label.to_string(),
        })
    }

    pub(crate) fn resolve_nonterminal(
        &self,
        line: usize,
        label: &str,
    ) -> Result<Nonterminal, GrammarError> {
        match self.resolve(line, label)? {
            Symbol::N(n) => Ok(n),
            Symbol::T(_) => Err(format_err(
                line,
                format!("`{label}` is a terminal, expected a nonterminal"),
            )),
        }
    }

    pub(crate) fn check_labels(&self) -> Result<(), GrammarError> {
        validate_labels(&self.terminals, &self.nonterminals)
    }
}

pub fn parse_grammar_text(text: &str) -> Result<Grammar, GrammarError> {
    let raw = RawGrammar::parse(text)?;
    raw.check_labels()?;
    let start = raw.resolve_nonterminal(0, &raw.start)?;
    let mut rules = Vec::with_capacity(raw.rules.len());
    let mut seen = std::collections::HashSet::new();
    for r in &raw.rules {
        let lhs = raw.resolve_nonterminal(r.line, &r.lhs)?;
        let symbols = r
            .rhs
            .iter()
            .map(|l| raw.resolve(r.line, l))
            .collect::<Result<Vec<_>, _>>()?;
        let rhs = Rhs::classify(&symbols).map_err(|e| format_err(r.line, e.to_string()))?;
        let rule = Rule::new(lhs, rhs);
        if !seen.insert(rule) {
            return Err(GrammarError::DuplicateRule {
                rule: format!("{} -> {} (line {})", r.lhs, r.rhs.join(" "), r.line),
            });
        }
        rules.push(rule);
    }
    Grammar::new(raw.terminals, raw.nonterminals, rules, start)
}

pub(crate) fn write_header(
    out: &mut String,
    start: &str,
    terminals: &[String],
    nonterminals: &[String],
) {
    out.push_str("start: ");
    out.push_str(start);
    out.push('\n');
    out.push_str("terminals:");
    for t in terminals {
        out.push(' ');
        out.push_str(t);
    }
    out.push('\n');
    out.push_str("nonterminals:");
    for n in nonterminals {
        out.push(' ');
        out.push_str(n);
    }
    out.push_str("\nrules:\n");
}

pub fn serialize_grammar(g: &Grammar) -> String {
    let mut out = String::new();
    write_header(
        &mut out,
        g.nonterminal_label(g.start()),
        g.terminals(),
        g.nonterminals(),
    );
    for rule in g.rules() {
        out.push_str(&g.display_rule(rule));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::RuleClass;

    const WORKED_EXAMPLE: &str = include_str!("../../tests/fixtures/worked_example.grammar");

    #[test]
    fn worked_example_fixture() {
        let g = parse_grammar_text(WORKED_EXAMPLE).unwrap();
        assert_eq!(g.rules().len(), 5);
        assert_eq!(g.terminals().len(), 3);
        assert_eq!(g.nonterminals().len(), 3);
        assert_eq!(g.nonterminal_label(g.start()), "$");
        let classes: Vec<RuleClass> = g.rules().iter().map(|r| r.class()).collect();
        assert_eq!(
            classes,
            vec![
                RuleClass::ParenNoNt,
                RuleClass::ParenNoNt,
                RuleClass::Branch,
                RuleClass::IterRight,
                RuleClass::IterRight
            ]
        );
    }

    #[test]
    fn serialize_is_parse_inverse() {
        let g = parse_grammar_text(WORKED_EXAMPLE).unwrap();
        let text = serialize_grammar(&g);
        assert_eq!(parse_grammar_text(&text).unwrap(), g);
        // Fixture body without the comment line is already canonical.
        let body: String = WORKED_EXAMPLE.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert_eq!(text, body);
    }

    #[test]
    fn whitespace_is_insignificant() {
        let g = parse_grammar_text(
            "  start:   S \nterminals: a   b\n nonterminals:S\nrules:\n  S->a   b  \n",
        )
        .unwrap();
        assert_eq!(g.display_rule(&g.rules()[0]), "S -> a b");
    }

    #[test]
    fn long_rule_is_format_error() {
        let err = parse_grammar_text(
            "start: A\nterminals: a b c d\nnonterminals: A\nrules:\nA -> a b c d\n",
        )
        .unwrap_err();
        assert!(
            matches!(err, GrammarError::Format { line: 5, .. }),
            "{err:?}"
        );
        let err =
            parse_grammar_text("start: A\nterminals: a b c\nnonterminals: A\nrules:\nA -> a b c\n")
                .unwrap_err();
        assert!(
            matches!(err, GrammarError::Format { line: 5, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn undeclared_symbol() {
        let err = parse_grammar_text("start: A\nterminals: a\nnonterminals: A\nrules:\nA -> a z\n")
            .unwrap_err();
        assert_eq!(
            err,
            GrammarError::UndeclaredSymbol {
                line: 5,
                label: "z".into()
            }
        );
    }

    #[test]
    fn duplicate_rule() {
        let err = parse_grammar_text(
            "start: A\nterminals: a\nnonterminals: A\nrules:\nA -> a a\nA -> a  a\n",
        )
        .unwrap_err();
        assert!(matches!(err, GrammarError::DuplicateRule { .. }));
    }

    #[test]
    fn missing_sections() {
        assert!(matches!(
            parse_grammar_text("start: A\nterminals: a\nnonterminals: A\n"),
            Err(GrammarError::Format { .. })
        ));
        assert!(matches!(
            parse_grammar_text("terminals: a\nnonterminals: A\nrules:\nA -> a a\n"),
            Err(GrammarError::Format { .. })
        ));
        assert!(matches!(
            parse_grammar_text("start: A\nbogus: 1\nrules:\n"),
            Err(GrammarError::Format { line: 2, .. })
        ));
        assert!(matches!(
            parse_grammar_text("start: A\nterminals: a\nnonterminals: A\nrules:\nA a a\n"),
            Err(GrammarError::Format { line: 5, .. })
        ));
    }

    #[test]
    fn terminal_start_rejected() {
        assert!(
            parse_grammar_text("start: a\nterminals: a\nnonterminals: A\nrules:\nA -> a a\n")
                .is_err()
        );
    }
}
