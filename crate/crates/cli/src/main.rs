use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gramgen::feasibility::{GenerationParams, RuleCounts};
use gramgen::negative::{LevenshteinSpec, RandomSpec};
use gramgen_cli::{
    audit, load_grammar, parse_query, rewrite_scoped_flags, run, CliError, Mode, RunConfig,
    UniformOptions,
};

#[derive(Parser)]
#[command(
    name = "gramgen",
    version,
    about = "Random consistent grammar benchmark generator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate (or load) a grammar and write the benchmark kit.
    Gen(GenArgs),
    /// Decide membership of a space-separated word.
    Parse { grammar: PathBuf, word: String },
    /// Print the grammar as a Graphviz digraph.
    Dot { grammar: PathBuf },
    /// Re-verify every file of an output directory.
    Audit { dir: PathBuf },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["rules", "max_t", "grammar"]))]
struct GenArgs {
    /// Total rule count; parameters are derived at random.
    #[arg(long, conflicts_with_all = ["max_t", "grammar"])]
    rules: Option<u32>,
    #[arg(long, default_value_t = 0, requires = "max_t")]
    paren_no: u32,
    #[arg(long, default_value_t = 0, requires = "max_t")]
    paren_with: u32,
    #[arg(long, default_value_t = 0, requires = "max_t")]
    iter: u32,
    #[arg(long, default_value_t = 0, requires = "max_t")]
    branch: u32,
    /// Maximum number of terminals (explicit mode).
    #[arg(long, requires = "max_nt", conflicts_with = "grammar")]
    max_t: Option<u32>,
    /// Maximum number of nonterminals (explicit mode).
    #[arg(long, requires = "max_t")]
    max_nt: Option<u32>,
    /// Load an existing grammar instead of generating one.
    #[arg(long)]
    grammar: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,

    #[arg(long)]
    pos_optimal: bool,
    #[arg(long)]
    pos_uniform: bool,
    /// Written `--max-len` after `--pos-uniform`.
    #[arg(long, default_value_t = 10, requires = "pos_uniform")]
    pos_max_len: usize,
    #[arg(long, default_value_t = 10, requires = "pos_uniform")]
    per_len: usize,

    #[arg(long)]
    neg_random: bool,
    /// Written `--count` after `--neg-random`.
    #[arg(long, default_value_t = 100, requires = "neg_random")]
    neg_random_count: usize,
    /// Written `--min-len` after `--neg-random`.
    #[arg(long, default_value_t = 1, requires = "neg_random")]
    neg_min_len: usize,
    /// Written `--max-len` after `--neg-random`.
    #[arg(long, default_value_t = 10, requires = "neg_random")]
    neg_max_len: usize,

    #[arg(long)]
    neg_lev: bool,
    /// Written `--count` after `--neg-lev`.
    #[arg(long, default_value_t = 100, requires = "neg_lev")]
    lev_count: usize,
    #[arg(long, default_value_t = 1, requires = "neg_lev")]
    distance: usize,
}

impl GenArgs {
    fn config(&self) -> RunConfig {
        let mode = if let Some(n) = self.rules {
            Mode::RuleCount(n)
        } else if let Some(path) = &self.grammar {
            Mode::Load(path.clone())
        } else {
            let counts = RuleCounts::new(self.paren_no, self.paren_with, self.iter, self.branch);
            Mode::Explicit(GenerationParams::new(
                self.max_t.unwrap_or(0),
                self.max_nt.unwrap_or(0),
                counts,
            ))
        };
        let mut config = RunConfig::new(mode, self.seed, &self.out);
        config.pos_optimal = self.pos_optimal;
        config.pos_uniform = self.pos_uniform.then_some(UniformOptions {
            max_len: self.pos_max_len,
            per_len: self.per_len,
        });
        config.neg_random = self.neg_random.then_some(RandomSpec {
            count: self.neg_random_count,
            min_len: self.neg_min_len,
            max_len: self.neg_max_len,
        });
        config.neg_lev = self.neg_lev.then_some(LevenshteinSpec {
            count: self.lev_count,
            distance: self.distance,
        });
        config
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(rewrite_scoped_flags(std::env::args()));
    match cli.command {
        Command::Gen(args) => match run(&args.config()) {
            Ok(report) => {
                for path in report.files() {
                    println!("{}", path.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Parse { grammar, word } => match parse_query(&grammar, &word) {
            Ok(true) => {
                println!("member");
                ExitCode::SUCCESS
            }
            Ok(false) => {
                println!("non-member");
                ExitCode::from(1)
            }
            Err(e) => fail(&e),
        },
        Command::Dot { grammar } => match load_grammar(&grammar) {
            Ok(g) => {
                print!("{}", gramgen::dot::export_dot(&g));
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Audit { dir } => match audit(&dir) {
            Ok(report) => {
                for f in &report.failures {
                    println!("FAIL {f}");
                }
                println!(
                    "{} examples checked, {} failures",
                    report.checked,
                    report.failures.len()
                );
                if report.passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => fail(&e),
        },
    }
}
