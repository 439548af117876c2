//! Command line front end: JSON in, JSON or CSV out.
//!
//! Inputs are file paths or "-" for standard input. Standard output carries
//! only the payload; diagnostics go to standard error. Exit codes: 0 on
//! success, 2 on unreadable or invalid input (the message names the field),
//! 1 on internal failure.

use std::fs;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use poisson_trinomial::io::{self, ModelOrPmf};
use poisson_trinomial::matchup::{MatchupInstance, SearchStrategy};
use poisson_trinomial::parity::{factor_poisson_binomial, split_parity, structure_report, Parity};
use poisson_trinomial::verify::{
    run_matchup_suite, run_structure_suite, Family, GeneratorConfig, SuiteReport, MATCHUP_N_CAP,
    MATCHUP_N_MIN,
};

#[derive(Parser)]
#[command(
    name = "ptri",
    version,
    about = "Sums of {0, 1/2, 1}-scored trials: pmfs, parity structure, lineup optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the pmf of the doubled score 2X as JSON.
    Pmf {
        /// Model JSON path, or - for standard input.
        input: String,
    },
    /// Print moments, conditional laws, modes, and gap distances as JSON.
    Summary {
        /// Model JSON path, or - for standard input.
        input: String,
        /// Emit the parity coefficient table as CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Print the parity decomposition (p and q coefficients) as JSON.
    Decompose {
        /// Model or pmf JSON path, or - for standard input.
        input: String,
    },
    /// Factor both parity parts into Bernoulli success probabilities.
    Factor {
        /// Model or pmf JSON path, or - for standard input.
        input: String,
    },
    /// Decide or search for tail-optimal lineups of a match-play instance.
    Optimize {
        /// Instance JSON path, or - for standard input.
        input: String,
        /// How to optimize: the threshold theorem, exhaustive enumeration,
        /// or adjacent-swap local search.
        #[arg(long, value_enum, default_value_t = Strategy::Theorem)]
        strategy: Strategy,
        /// Override the instance threshold k (half-integer: "3", "2.5", "5/2").
        #[arg(long)]
        k: Option<String>,
        /// Emit the per-ordering tail table as CSV instead of JSON (n <= 6).
        #[arg(long)]
        csv: bool,
    },
    /// Run the seeded verification suites and print their reports as JSON.
    ///
    /// Failures are data: the exit code stays 0 and the report carries them.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per suite.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Trial family: general, no-tie, tie-heavy, boundary, degenerate.
        /// The matchup suite draws its own parameters and ignores this.
        #[arg(long, default_value = "general")]
        family: String,
        #[arg(long, value_enum, default_value_t = SuiteChoice::All)]
        suite: SuiteChoice,
        /// Write the JSON report array here instead of standard output.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Theorem,
    Exhaustive,
    Local,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteChoice {
    Structure,
    Matchup,
    All,
}

enum CliError {
    /// Unreadable or invalid input; exit 2.
    Usage(String),
    /// The computation itself failed; exit 1.
    Internal(String),
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pmf { input } => cmd_pmf(&input),
        Command::Summary { input, csv } => cmd_summary(&input, csv),
        Command::Decompose { input } => cmd_decompose(&input),
        Command::Factor { input } => cmd_factor(&input),
        Command::Optimize {
            input,
            strategy,
            k,
            csv,
        } => cmd_optimize(&input, strategy, k.as_deref(), csv),
        Command::Verify {
            seed,
            count,
            n_min,
            n_max,
            family,
            suite,
            json_out,
        } => cmd_verify(seed, count, n_min, n_max, &family, suite, json_out),
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Usage(format!("cannot read standard input: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))
    }
}

fn cmd_pmf(input: &str) -> Result<(), CliError> {
    let text = read_input(input)?;
    let (model, _) = io::parse_model(&text).map_err(usage)?;
    println!("{}", io::to_json_string_17(&model.pmf()));
    Ok(())
}

fn cmd_summary(input: &str, csv: bool) -> Result<(), CliError> {
    let text = read_input(input)?;
    let (model, _) = io::parse_model(&text).map_err(usage)?;
    if csv {
        print!("{}", io::coefficients_csv(&split_parity(&model.pmf())));
    } else {
        println!("{}", io::to_json_string_17(&structure_report(&model)));
    }
    Ok(())
}

/// Both decompose and factor accept a model or an already-computed pmf, so
/// `pmf` output pipes straight back in.
fn read_pmf_input(input: &str) -> Result<poisson_trinomial::HalfLatticePMF, CliError> {
    let text = read_input(input)?;
    match io::parse_model_or_pmf(&text).map_err(usage)? {
        ModelOrPmf::Model(model, _) => Ok(model.pmf()),
        ModelOrPmf::Pmf(pmf) => Ok(pmf),
    }
}

fn cmd_decompose(input: &str) -> Result<(), CliError> {
    let pmf = read_pmf_input(input)?;
    println!("{}", io::to_json_string_17(&split_parity(&pmf)));
    Ok(())
}

fn cmd_factor(input: &str) -> Result<(), CliError> {
    let pmf = read_pmf_input(input)?;
    let decomp = split_parity(&pmf);
    let side = |parity: Parity, coeffs: &[f64], norm: f64| -> Result<Value, CliError> {
        if norm <= 0.0 {
            return Ok(Value::Null);
        }
        let f = factor_poisson_binomial(coeffs)
            .map_err(|e| CliError::Internal(format!("{parity} part: {e}")))?;
        Ok(json!({
            "success_probs": f.success_probs,
            "residual": f.residual,
        }))
    };
    let out = json!({
        "even": side(Parity::Even, &decomp.p_coeffs, decomp.p_norm)?,
        "odd": side(Parity::Odd, &decomp.q_coeffs, decomp.q_norm)?,
    });
    println!("{}", io::to_json_string_17(&out));
    Ok(())
}

fn cmd_optimize(
    input: &str,
    strategy: Strategy,
    k: Option<&str>,
    csv: bool,
) -> Result<(), CliError> {
    let text = read_input(input)?;
    let (parsed, _) = io::parse_instance(&text).map_err(usage)?;
    let instance: MatchupInstance = match k {
        Some(token) => {
            let k2 = io::parse_threshold(token).map_err(usage)?;
            parsed.with_threshold(k2).map_err(usage)?
        }
        None => parsed,
    };
    if csv {
        print!("{}", io::ordering_tails_csv(&instance).map_err(usage)?);
        return Ok(());
    }

    let verdict = instance.optimize_by_theorem();
    let n = instance.n();
    let (best, tail) = match strategy {
        Strategy::Theorem => match verdict.decision.predicted_lineup(n) {
            Some(lineup) => {
                let tail = instance
                    .tail_probability(&lineup)
                    .expect("predicted lineup is valid");
                (vec![lineup], Some(tail))
            }
            None => (Vec::new(), None),
        },
        Strategy::Exhaustive => {
            let outcome = instance
                .optimize_search(&SearchStrategy::Exhaustive)
                .map_err(usage)?;
            (outcome.best, Some(outcome.tail))
        }
        Strategy::Local => {
            let outcome = instance
                .optimize_search(&SearchStrategy::LocalSearch { start: None })
                .map_err(usage)?;
            (outcome.best, Some(outcome.tail))
        }
    };
    let out = json!({
        "mu": verdict.mu,
        "decision": serde_json::to_value(&verdict.decision).expect("decision serializes"),
        "best_orderings": io::orderings_one_based(&best),
        "tail": tail,
    });
    println!("{}", io::to_json_string_17(&out));
    Ok(())
}

fn cmd_verify(
    seed: u64,
    count: usize,
    n_min: usize,
    n_max: usize,
    family: &str,
    suite: SuiteChoice,
    json_out: Option<PathBuf>,
) -> Result<(), CliError> {
    let family: Family = family.parse().map_err(usage)?;
    let mut reports: Vec<SuiteReport> = Vec::new();
    if suite == SuiteChoice::Structure || suite == SuiteChoice::All {
        let config = GeneratorConfig {
            seed,
            count,
            n_min,
            n_max,
            family,
        };
        reports.push(run_structure_suite(&config).map_err(usage)?);
    }
    if suite == SuiteChoice::Matchup || suite == SuiteChoice::All {
        // The matchup suite lives on n in [2, 7]; the requested range is
        // clamped into it so `--suite all` works with one range.
        let clamped_min = n_min.max(MATCHUP_N_MIN);
        let clamped_max = n_max.min(MATCHUP_N_CAP);
        if clamped_min > clamped_max {
            return Err(CliError::Usage(format!(
                "matchup suite needs an n range intersecting [{MATCHUP_N_MIN}, {MATCHUP_N_CAP}], \
                 got [{n_min}, {n_max}]"
            )));
        }
        let config = GeneratorConfig {
            seed,
            count,
            n_min: clamped_min,
            n_max: clamped_max,
            family,
        };
        reports.push(run_matchup_suite(&config).map_err(usage)?);
    }
    for report in &reports {
        eprintln!(
            "{}: {} cases, {} failures",
            report.suite,
            report.cases_run,
            report.failures.len()
        );
    }
    let payload = io::to_json_string_17(&reports);
    match json_out {
        Some(path) => {
            fs::write(&path, payload + "\n")
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{payload}"),
    }
    Ok(())
}
