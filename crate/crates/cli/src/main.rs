//! `metrogain` — compute metrological gains of bipartite quantum states,
//! rerun the library's headline experiments, and survey random states.
//!
//! Three subcommands:
//! - `gain`: optimize the gain of one state (from a named family or a JSON
//!   state file) and print gain, Fisher information, separable bound, the
//!   bound weights, and the iteration count.
//! - `reproduce`: rerun registered experiments with frozen configurations
//!   and report value / expected / tolerance / pass per experiment; the exit
//!   code is zero only if every selected experiment passes.
//! - `survey`: evaluate many random states and emit a CSV of gains, with a
//!   fixed-Hamiltonian column and a fully optimized column.
//!
//! Every command is deterministic given `--seed`. The worker-thread count
//! honors the `METROGAIN_THREADS` environment variable.

mod reproduce;
mod source;
mod survey;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use metrogain::optimizer::see_saw;
use metrogain::states::RandomSeed;
use metrogain::{C2Policy, SeeSawConfig};

use crate::source::StateSource;

#[derive(Parser)]
#[command(
    name = "metrogain",
    version,
    about = "Metrological gain of bipartite quantum states",
    after_help = "Runtime guidance: a single 3x3 optimization takes well under a second; \
                  a 500-sample 3x3 mixed survey finishes within minutes. Set \
                  METROGAIN_THREADS to cap the worker-thread count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the metrological gain of a single state.
    Gain(GainArgs),
    /// Rerun registered experiments and check their expected values.
    Reproduce(reproduce::ReproduceArgs),
    /// Evaluate random states and print a CSV of their gains.
    Survey(survey::SurveyArgs),
}

#[derive(Args)]
struct GainArgs {
    #[command(flatten)]
    source: StateSource,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// See-saw flags shared by `gain` and `survey`.
#[derive(Args, Clone)]
struct SolverArgs {
    /// Random restarts of the see-saw.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Iteration cap per restart.
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Relative convergence tolerance on the Fisher information.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Second bound weight: `auto` rebalances it, `fixed:<v>` pins it.
    #[arg(long, default_value = "auto", value_parser = parse_c2)]
    c2: C2Flag,
    /// Seed for the deterministic restart generator.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, Debug)]
enum C2Flag {
    Auto,
    Fixed(f64),
}

fn parse_c2(s: &str) -> Result<C2Flag, String> {
    if s == "auto" {
        return Ok(C2Flag::Auto);
    }
    if let Some(v) = s.strip_prefix("fixed:") {
        let v: f64 = v
            .parse()
            .map_err(|_| format!("invalid fixed bound value {v:?}"))?;
        if !v.is_finite() || v < 0.0 {
            return Err(format!("fixed bound must be finite and non-negative, got {v}"));
        }
        return Ok(C2Flag::Fixed(v));
    }
    Err(format!("expected `auto` or `fixed:<value>`, got {s:?}"))
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl SolverArgs {
    fn to_config(&self) -> SeeSawConfig {
        SeeSawConfig {
            trials: self.trials,
            steps: self.steps,
            tol: self.tol,
            c2: match self.c2 {
                C2Flag::Auto => C2Policy::Analytic,
                C2Flag::Fixed(v) => C2Policy::Fixed(v),
            },
            damping: 0.3,
            seed: RandomSeed(self.seed),
        }
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "trials": self.trials,
            "steps": self.steps,
            "tol": self.tol,
            "c2": match self.c2 {
                C2Flag::Auto => "auto".to_string(),
                C2Flag::Fixed(v) => format!("fixed:{v}"),
            },
            "seed": self.seed,
        })
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("METROGAIN_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // A second build_global is harmless: the first pool wins.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring METROGAIN_THREADS={raw:?} (want a positive integer)"),
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gain(args) => cmd_gain(&args),
        Command::Reproduce(args) => reproduce::run(&args),
        Command::Survey(args) => survey::run(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_gain(args: &GainArgs) -> Result<ExitCode, String> {
    let (state, described) = args.source.resolve()?;
    let cfg = args.solver.to_config();
    let result = see_saw(&state, &cfg).map_err(|e| e.to_string())?;
    let c1 = result.hamiltonian.c1();
    let c2 = result.hamiltonian.c2();
    match args.format {
        Format::Json => {
            let payload = serde_json::json!({
                "schema": "metrogain.gain/1",
                "source": described,
                "config": args.solver.describe(),
                "gain": result.gain,
                "qfi": result.qfi,
                "separable_bound": result.sep_bound,
                "c1": c1,
                "c2": c2,
                "iterations": result.iterations,
                // Strict usefulness up to solver roundoff: a state whose true
                // gain is exactly one can land a few ulps above it.
                "useful": result.gain > 1.0 + 1e-9,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&payload).expect("finite fields serialize")
            );
        }
        Format::Csv => {
            println!("gain,qfi,separable_bound,c1,c2,iterations");
            println!(
                "{},{},{},{},{},{}",
                result.gain, result.qfi, result.sep_bound, c1, c2, result.iterations
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
