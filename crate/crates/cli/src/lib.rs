//! Benchmark-kit pipeline behind the `gramgen` binary.
//!
//! A run derives or takes generation parameters, builds (or loads) a
//! consistent grammar, converts it to CNF and writes the requested example
//! sets into one output directory. A single seed reproduces the whole
//! directory byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use gramgen::cnf::{cyk_parse, parse_cnf_text, serialize_cnf, to_cnf, CnfError, CnfGrammar};
use gramgen::dot::export_dot;
use gramgen::examples::{ExampleKind, ExampleMethod, ExampleSet, ExampleSetError};
use gramgen::feasibility::{
    check_feasible, derive_params, FeasibilityError, FeasibilityVerdict, GenerationParams,
};
use gramgen::generator::{generate, render_trace, GenerationError};
use gramgen::grammar::{
    check_consistency, parse_grammar_text, serialize_grammar, Grammar, GrammarError,
};
use gramgen::negative::{
    levenshtein_distance, levenshtein_negatives, random_negatives, LevenshteinSpec, NegativeError,
    RandomSpec,
};
use gramgen::positive::{optimal_positive_set, stratified_positive_set, PositiveError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const GRAMMAR_FILE: &str = "grammar.txt";
pub const CNF_FILE: &str = "grammar.cnf.txt";
pub const DOT_FILE: &str = "grammar.dot";
pub const POS_OPTIMAL_FILE: &str = "pos_optimal.txt";
pub const POS_UNIFORM_FILE: &str = "pos_uniform.txt";
pub const NEG_RANDOM_FILE: &str = "neg_random.txt";
pub const NEG_LEV_FILE: &str = "neg_levenshtein.txt";
pub const NEG_LEV_SOURCES_FILE: &str = "neg_levenshtein.sources.txt";
pub const REPORT_FILE: &str = "report.txt";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parameters are infeasible:\n{0}")]
    Infeasible(FeasibilityVerdict),
    #[error("grammar is not consistent; useless symbols: {}", .0.join(" "))]
    Inconsistent(Vec<String>),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error(transparent)]
    Positive(#[from] PositiveError),
    #[error(transparent)]
    Negative(#[from] NegativeError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

impl CliError {
    /// 1 for infeasible parameters or failed verdicts, 2 for usage, IO and
    /// format problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) | CliError::Inconsistent(_) => 1,
            CliError::Generation(GenerationError::InfeasibleParams(_)) => 1,
            CliError::Negative(NegativeError::Exhausted { .. }) => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, e: impl ToString) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

pub fn load_grammar(path: &Path) -> Result<Grammar, CliError> {
    parse_grammar_text(&read(path)?).map_err(|e| format_err(path, e))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Explicit(GenerationParams),
    RuleCount(u32),
    Load(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniformOptions {
    pub max_len: usize,
    pub per_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    pub out: PathBuf,
    pub pos_optimal: bool,
    pub pos_uniform: Option<UniformOptions>,
    pub neg_random: Option<RandomSpec>,
    pub neg_lev: Option<LevenshteinSpec>,
}

impl RunConfig {
    pub fn new(mode: Mode, seed: u64, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            mode,
            seed,
            out: out.into(),
            pos_optimal: false,
            pos_uniform: None,
            neg_random: None,
            neg_lev: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Mode::Explicit(p) = &self.mode {
            p.validate()?;
        }
        if let Mode::RuleCount(0) = self.mode {
            return Err(CliError::Usage("--rules must be at least 1".into()));
        }
        if let Some(u) = self.pos_uniform {
            if u.max_len < 2 || u.per_len == 0 {
                return Err(CliError::Usage(
                    "uniform sampling needs max length >= 2 and per-length >= 1".into(),
                ));
            }
        }
        if let Some(r) = &self.neg_random {
            r.validate()?;
        }
        if let Some(l) = &self.neg_lev {
            l.validate()?;
        }
        Ok(())
    }
}

/// Independent per-stage seeds drawn from the master seed in a fixed order,
/// so enabling one stage never shifts another stage's randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageSeeds {
    pub params: u64,
    pub generation: u64,
    pub pos_optimal: u64,
    pub pos_uniform: u64,
    pub neg_random: u64,
    pub neg_lev: u64,
}

impl StageSeeds {
    pub fn derive(seed: u64) -> Self {
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        StageSeeds {
            params: master.gen(),
            generation: master.gen(),
            pos_optimal: master.gen(),
            pos_uniform: master.gen(),
            neg_random: master.gen(),
            neg_lev: master.gen(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSummary {
    pub method: ExampleMethod,
    pub path: PathBuf,
    pub size: usize,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub grammar_path: PathBuf,
    pub cnf_path: PathBuf,
    pub dot_path: PathBuf,
    pub report_path: PathBuf,
    pub sets: Vec<SetSummary>,
    pub params: Option<GenerationParams>,
    pub verdict: Option<FeasibilityVerdict>,
    pub trace: Option<String>,
    pub restarts: usize,
    /// Wall-clock time of the run; kept out of report.txt so output stays
    /// reproducible.
    pub elapsed: Duration,
}

impl RunReport {
    /// Every file the run wrote, in writing order.
    pub fn files(&self) -> Vec<&Path> {
        let mut files = vec![
            self.grammar_path.as_path(),
            self.cnf_path.as_path(),
            self.dot_path.as_path(),
        ];
        files.extend(self.sets.iter().map(|s| s.path.as_path()));
        files.push(self.report_path.as_path());
        files
    }
}

struct Built {
    grammar: Grammar,
    params: Option<GenerationParams>,
    verdict: Option<FeasibilityVerdict>,
    trace: Option<String>,
    restarts: usize,
}

fn build_grammar(config: &RunConfig, seeds: &StageSeeds) -> Result<Built, CliError> {
    let params = match &config.mode {
        Mode::Load(path) => {
            let grammar = load_grammar(path)?;
            let report = check_consistency(&grammar);
            if !report.consistent {
                let useless = report
                    .useless_symbols(&grammar)
                    .into_iter()
                    .map(String::from)
                    .collect();
                return Err(CliError::Inconsistent(useless));
            }
            return Ok(Built {
                grammar,
                params: None,
                verdict: None,
                trace: None,
                restarts: 0,
            });
        }
        Mode::Explicit(p) => *p,
        Mode::RuleCount(total) => {
            derive_params(*total, &mut ChaCha8Rng::seed_from_u64(seeds.params))?
        }
    };
    let verdict = check_feasible(&params)?;
    if !verdict.feasible {
        return Err(CliError::Infeasible(verdict));
    }
    let result = generate(&params, &mut ChaCha8Rng::seed_from_u64(seeds.generation))?;
    Ok(Built {
        grammar: result.grammar,
        params: Some(params),
        verdict: Some(verdict),
        trace: Some(render_trace(&result.trace)),
        restarts: result.restarts,
    })
}

fn finish_set(mut set: ExampleSet, seed: u64) -> ExampleSet {
    set.grammar = GRAMMAR_FILE.to_string();
    set.seed = Some(seed);
    set
}

pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    let started = Instant::now();
    config.validate()?;
    let seeds = StageSeeds::derive(config.seed);
    let built = build_grammar(config, &seeds)?;
    let g = &built.grammar;
    let cnf = to_cnf(g);

    fs::create_dir_all(&config.out).map_err(io_err(&config.out))?;
    let out = |name: &str| config.out.join(name);
    let labels = g.terminals();

    let grammar_path = out(GRAMMAR_FILE);
    write(&grammar_path, &serialize_grammar(g))?;
    let cnf_path = out(CNF_FILE);
    write(&cnf_path, &serialize_cnf(&cnf))?;
    let dot_path = out(DOT_FILE);
    write(&dot_path, &export_dot(g))?;

    let mut sets = Vec::new();
    let mut positives = ExampleSet::new(GRAMMAR_FILE, ExampleMethod::Optimal);
    let mut emit = |set: &ExampleSet, name: &str| -> Result<(), CliError> {
        let path = out(name);
        write(&path, &set.to_text(labels))?;
        sets.push(SetSummary {
            method: set.method,
            path,
            size: set.len(),
        });
        Ok(())
    };

    if config.pos_optimal {
        let set = finish_set(optimal_positive_set(g)?.set, config.seed);
        emit(&set, POS_OPTIMAL_FILE)?;
        set.iter().for_each(|w| {
            positives.insert(w.clone());
        });
    }
    if let Some(u) = config.pos_uniform {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds.pos_uniform);
        let set = finish_set(
            stratified_positive_set(g, u.max_len, u.per_len, &mut rng)?,
            config.seed,
        );
        emit(&set, POS_UNIFORM_FILE)?;
        set.iter().for_each(|w| {
            positives.insert(w.clone());
        });
    }
    if let Some(spec) = &config.neg_random {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds.neg_random);
        let set = finish_set(random_negatives(&cnf, spec, &mut rng)?, config.seed);
        emit(&set, NEG_RANDOM_FILE)?;
    }
    if let Some(spec) = &config.neg_lev {
        if positives.is_empty() {
            positives = optimal_positive_set(g)?.set;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seeds.neg_lev);
        let set = finish_set(
            levenshtein_negatives(&cnf, &positives, spec, &mut rng)?,
            config.seed,
        );
        emit(&set, NEG_LEV_FILE)?;
        write(&out(NEG_LEV_SOURCES_FILE), &set.sources_to_text(labels))?;
    }

    let report_path = out(REPORT_FILE);
    let report = RunReport {
        grammar_path,
        cnf_path,
        dot_path,
        report_path,
        sets,
        params: built.params,
        verdict: built.verdict,
        trace: built.trace,
        restarts: built.restarts,
        elapsed: Duration::ZERO,
    };
    write(
        &report.report_path,
        &render_report(config, &report, g, &cnf),
    )?;
    Ok(RunReport {
        elapsed: started.elapsed(),
        ..report
    })
}

fn render_report(config: &RunConfig, report: &RunReport, g: &Grammar, cnf: &CnfGrammar) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "seed: {}", config.seed);
    let mode = match &config.mode {
        Mode::Explicit(_) => "explicit parameters".to_string(),
        Mode::RuleCount(n) => format!("rule count {n}"),
        Mode::Load(p) => format!("loaded from {}", p.display()),
    };
    let _ = writeln!(s, "mode: {mode}");
    if let Some(p) = &report.params {
        let _ = writeln!(s, "parameters: {p}");
    }
    if let Some(v) = &report.verdict {
        let _ = writeln!(
            s,
            "feasibility: {}",
            if v.feasible { "feasible" } else { "infeasible" }
        );
        let _ = writeln!(s, "restarts: {}", report.restarts);
    }
    let counts = g.rule_counts();
    let _ = writeln!(
        s,
        "grammar: {GRAMMAR_FILE} ({} rules: {} paren-no, {} paren-with, {} iteration, {} branch; {} terminals, {} nonterminals)",
        g.rules().len(),
        counts.paren_no,
        counts.paren_with,
        counts.iteration,
        counts.branch,
        g.terminals().len(),
        g.nonterminals().len()
    );
    let _ = writeln!(s, "consistent: {}", check_consistency(g).consistent);
    if let Some(st) = cnf.stats() {
        let _ = writeln!(
            s,
            "cnf: {CNF_FILE} ({} rules; {} proxy symbols, {} cluster symbols, {} added rules)",
            cnf.rules().len(),
            st.added_symbols,
            st.cluster_symbols,
            st.added_rules
        );
    }
    let _ = writeln!(s, "dot: {DOT_FILE}");
    for set in &report.sets {
        let name = set
            .path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let _ = writeln!(
            s,
            "set: {name} ({} {}, {} examples)",
            set.method.kind(),
            set.method,
            set.size
        );
    }
    if let Some(trace) = &report.trace {
        s.push_str("\ngeneration trace:\n");
        s.push_str(trace);
    }
    s
}

/// `--max-len`, `--min-len` and `--count` belong to whichever set flag
/// precedes them. They are renamed to unambiguous options
/// (`--pos-max-len`, `--neg-random-count`, ...) before argument parsing.
pub fn rewrite_scoped_flags<I: IntoIterator<Item = String>>(args: I) -> Vec<String> {
    let mut scope = "";
    let mut out = Vec::new();
    let mut passthrough = false;
    for arg in args {
        if passthrough || !arg.starts_with("--") {
            out.push(arg);
            continue;
        }
        if arg == "--" {
            passthrough = true;
            out.push(arg);
            continue;
        }
        let (name, value) = match arg.split_once('=') {
            Some((n, v)) => (n, Some(v)),
            None => (arg.as_str(), None),
        };
        if matches!(
            name,
            "--pos-uniform" | "--neg-random" | "--neg-lev" | "--pos-optimal"
        ) {
            scope = match name {
                "--pos-uniform" => "pos-uniform",
                "--neg-random" => "neg-random",
                "--neg-lev" => "neg-lev",
                _ => "",
            };
        }
        let renamed = match (scope, name) {
            ("pos-uniform", "--max-len") => Some("--pos-max-len"),
            ("neg-random", "--count") => Some("--neg-random-count"),
            ("neg-random", "--min-len") => Some("--neg-min-len"),
            ("neg-random", "--max-len") => Some("--neg-max-len"),
            ("neg-lev", "--count") => Some("--lev-count"),
            _ => None,
        };
        out.push(match (renamed, value) {
            (Some(r), Some(v)) => format!("{r}={v}"),
            (Some(r), None) => r.to_string(),
            (None, _) => arg.clone(),
        });
    }
    out
}

/// Loads a grammar in either the four-class format or CNF.
pub fn load_any_cnf(path: &Path) -> Result<CnfGrammar, CliError> {
    let text = read(path)?;
    match parse_grammar_text(&text) {
        Ok(g) => Ok(to_cnf(&g)),
        Err(first) => parse_cnf_text(&text).map_err(|_| format_err(path, first)),
    }
}

/// CYK membership of a space-separated word.
pub fn parse_query(path: &Path, word: &str) -> Result<bool, CliError> {
    let cnf = load_any_cnf(path)?;
    let tokens = cnf.tokenize(word)?;
    Ok(cyk_parse(&cnf, &tokens)?)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn read_set(path: &Path, labels: &[String]) -> Result<ExampleSet, CliError> {
    ExampleSet::parse(&read(path)?, labels).map_err(|e: ExampleSetError| format_err(path, e))
}

/// Re-checks an output directory: the grammar is consistent, the CNF file
/// matches a fresh conversion, positives parse, negatives do not, and
/// edit-distance negatives sit at the recorded distance from their sources.
pub fn audit(dir: &Path) -> Result<AuditReport, CliError> {
    let g = load_grammar(&dir.join(GRAMMAR_FILE))?;
    let cnf = to_cnf(&g);
    let mut report = AuditReport::default();

    let consistency = check_consistency(&g);
    if !consistency.consistent {
        report.failures.push(format!(
            "{GRAMMAR_FILE}: useless symbols {}",
            consistency.useless_symbols(&g).join(" ")
        ));
    }
    let cnf_path = dir.join(CNF_FILE);
    if cnf_path.exists() {
        let stored = parse_cnf_text(&read(&cnf_path)?).map_err(|e| format_err(&cnf_path, e))?;
        if stored.rules() != cnf.rules() || stored.nonterminals() != cnf.nonterminals() {
            report.failures.push(format!(
                "{CNF_FILE}: differs from the conversion of {GRAMMAR_FILE}"
            ));
        }
    }

    let labels = g.terminals();
    for name in [
        POS_OPTIMAL_FILE,
        POS_UNIFORM_FILE,
        NEG_RANDOM_FILE,
        NEG_LEV_FILE,
    ] {
        let path = dir.join(name);
        if !path.exists() {
            continue;
        }
        let mut set = read_set(&path, labels)?;
        if set.method == ExampleMethod::Levenshtein {
            let src_path = dir.join(NEG_LEV_SOURCES_FILE);
            let sources = read(&src_path)?
                .lines()
                .map(|l| g.tokenize(l))
                .collect::<Result<Vec<_>, GrammarError>>()
                .map_err(|e| format_err(&src_path, e))?;
            set.set_sources(sources)
                .map_err(|e| format_err(&src_path, e))?;
        }
        let expect = set.kind() == ExampleKind::Positive;
        for (i, w) in set.iter().enumerate() {
            report.checked += 1;
            if cyk_parse(&cnf, w)? != expect {
                report.failures.push(format!(
                    "{name}: `{}` should be {}",
                    g.render_word(w),
                    set.kind()
                ));
            }
            if let (Some(sources), Some(d)) = (set.sources(), set.distance) {
                let dist = levenshtein_distance(&sources[i], w);
                if dist != d {
                    report.failures.push(format!(
                        "{name}: `{}` is at distance {dist} from its source, expected {d}",
                        g.render_word(w)
                    ));
                }
            }
        }
    }
    Ok(report)
}
