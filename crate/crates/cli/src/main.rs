mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use termflow_core::oracle::SearchBudget;

use commands::CliError;

/// Normal forms, dispersion exponents and exhaustive oracles for term-coding
/// instances.
#[derive(Debug, Parser)]
#[command(name = "termflow", version)]
struct Cli {
    /// Worker threads for exhaustive searches. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Add wall-clock time to the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Flatten, quotient and classify an instance.
    Normalize {
        file: PathBuf,
        /// Exit with status 3 unless the result is in functional normal form.
        #[arg(long)]
        fnf_check: bool,
        /// Include the diversified system.
        #[arg(long)]
        diversify: bool,
        /// Write the dependency graph in DOT format to this path.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Compute the dispersion exponent of a dispersion spec by max flow.
    Exponent {
        file: PathBuf,
        /// Include the min-cut witness and the full flow certificate.
        #[arg(long)]
        certificate: bool,
        /// Write the flow network in DOT format to this path.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Exhaustive search over all interpretations at a fixed alphabet size.
    Brute {
        #[arg(value_enum)]
        kind: BruteKind,
        file: PathBuf,
        /// Alphabet size.
        #[arg(short = 'n', long = "alphabet")]
        n: u32,
        /// Search limit as EVALS or EVALS:INTERPS (integers or 2^k).
        #[arg(long, value_name = "LIMIT")]
        budget: Option<String>,
    },
    /// Decide whether the image size eventually exceeds n^d.
    Threshold {
        file: PathBuf,
        #[arg(short = 'd')]
        d: u32,
    },
    /// Show the dependency graph of a graph file or an FNF instance.
    Graph {
        file: PathBuf,
        /// Replace every source by a self-loop.
        #[arg(long)]
        loops: bool,
        /// Write the graph in DOT format to this path.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BruteKind {
    /// Maximum image size of a dispersion spec.
    Disp,
    /// Maximum solution count of an instance.
    Solve,
    /// Guessing-game optimum of a graph, or of an FNF instance's graph.
    Guess,
    /// Whether some interpretation is surjective.
    Perfect,
    /// Dispersion against the optimum of its embedding instance.
    Embed,
    /// Diversification bounds for a CFNF instance.
    Sandwich,
}

impl BruteKind {
    pub fn name(self) -> &'static str {
        match self {
            BruteKind::Disp => "disp",
            BruteKind::Solve => "solve",
            BruteKind::Guess => "guess",
            BruteKind::Perfect => "perfect",
            BruteKind::Embed => "embed",
            BruteKind::Sandwich => "sandwich",
        }
    }
}

fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let value = match s.split_once('^') {
        Some((base, exp)) => {
            let base: u64 = base
                .trim()
                .parse()
                .map_err(|_| format!("bad number `{s}`"))?;
            let exp: u32 = exp
                .trim()
                .parse()
                .map_err(|_| format!("bad exponent `{s}`"))?;
            base.checked_pow(exp)
                .ok_or_else(|| format!("`{s}` overflows"))?
        }
        None => s.parse().map_err(|_| format!("bad number `{s}`"))?,
    };
    if value == 0 {
        return Err("budget limits must be positive".into());
    }
    Ok(value)
}

/// Parses `EVALS` or `EVALS:INTERPS`; a missing interpretation limit keeps
/// the default.
pub fn parse_budget(s: &str) -> Result<SearchBudget, String> {
    let mut budget = SearchBudget::default();
    match s.split_once(':') {
        Some((e, i)) => {
            budget.max_evaluations = parse_count(e)?;
            budget.max_interpretations = parse_count(i)?;
        }
        None => budget.max_evaluations = parse_count(s)?,
    }
    Ok(budget)
}

/// `--budget` wins over `TERMFLOW_BUDGET`, which wins over the defaults.
fn resolve_budget(flag: Option<&str>) -> Result<SearchBudget, CliError> {
    if let Some(s) = flag {
        return parse_budget(s).map_err(|e| CliError::Usage(format!("--budget: {e}")));
    }
    match std::env::var("TERMFLOW_BUDGET") {
        Ok(s) if !s.trim().is_empty() => {
            parse_budget(&s).map_err(|e| CliError::Usage(format!("TERMFLOW_BUDGET: {e}")))
        }
        _ => Ok(SearchBudget::default()),
    }
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    match cli.command {
        Command::Normalize {
            file,
            fnf_check,
            diversify,
            dot,
        } => commands::normalize(&file, fnf_check, diversify, dot.as_deref()),
        Command::Exponent {
            file,
            certificate,
            dot,
        } => commands::exponent(&file, certificate, dot.as_deref()),
        Command::Brute {
            kind,
            file,
            n,
            budget,
        } => {
            let budget = resolve_budget(budget.as_deref())?;
            commands::brute(kind, &file, n, budget, cli.jobs)
        }
        Command::Threshold { file, d } => commands::threshold(&file, d),
        Command::Graph { file, loops, dot } => commands::graph(&file, loops, dot.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let timing = cli.timing;
    let start = Instant::now();
    match run(cli) {
        Ok(mut outcome) => {
            if timing {
                outcome.report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            print!("{}", outcome.report.to_json());
            if let Some(note) = &outcome.note {
                eprintln!("termflow: {note}");
            }
            ExitCode::from(outcome.exit)
        }
        Err(e) => {
            eprintln!("termflow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_strings() {
        let b = parse_budget("1000").unwrap();
        assert_eq!(b.max_evaluations, 1000);
        assert_eq!(
            b.max_interpretations,
            SearchBudget::default().max_interpretations
        );
        let b = parse_budget("2^30:2^10").unwrap();
        assert_eq!(
            (b.max_evaluations, b.max_interpretations),
            (1 << 30, 1 << 10)
        );
        assert!(parse_budget("0").is_err());
        assert!(parse_budget("abc").is_err());
        assert!(parse_budget("2^99").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
