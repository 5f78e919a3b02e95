//! The `survey` subcommand: optimize many random states and emit a CSV of
//! the gains, one row per sample.

use std::process::ExitCode;

use clap::{Args, ValueEnum};
use rayon::prelude::*;

use metrogain::activation::{named_hamiltonian, HamiltonianId};
use metrogain::metrology::gain_for_hamiltonian;
use metrogain::optimizer::see_saw;
use metrogain::states::{random_mixed, random_pure, RandomSeed};

use crate::SolverArgs;

#[derive(Args)]
pub struct SurveyArgs {
    /// Local dimensions as AxB, e.g. 3x3.
    #[arg(long, default_value = "3x3")]
    pub dims: String,
    /// Number of random states to evaluate.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Whether to sample pure states or full-rank mixed states.
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Kind {
    Pure,
    Mixed,
}

pub fn run(args: &SurveyArgs) -> Result<ExitCode, String> {
    let (da, db) = parse_dims(&args.dims)?;
    if args.count == 0 {
        return Err("--count must be at least 1".into());
    }
    if da != db {
        return Err(format!(
            "the fixed-Hamiltonian column needs equal local dimensions, got {da}x{db}"
        ));
    }
    let fixed_h = named_hamiltonian(&HamiltonianId::MaxEntangledDiag { d: da })
        .map_err(|e| e.to_string())?;

    // The fixed column scores every sample against one reference Hamiltonian;
    // the optimized column reruns the full see-saw per sample. Samples are
    // seeded independently, so the CSV bytes depend only on the flags.
    let cfg = args.solver.to_config();
    let base_seed = args.solver.seed;
    let rows: Result<Vec<(f64, f64)>, String> = (0..args.count)
        .into_par_iter()
        .map(|i| {
            let seed = RandomSeed(base_seed.wrapping_add(i as u64));
            let state = match args.kind {
                Kind::Pure => random_pure(&[da, db], seed),
                Kind::Mixed => random_mixed(&[da, db], seed),
            }
            .map_err(|e| e.to_string())?;
            let fixed = gain_for_hamiltonian(&state, &fixed_h)
                .map_err(|e| e.to_string())?
                .gain;
            let optimized = see_saw(&state, &cfg).map_err(|e| e.to_string())?.gain;
            Ok((fixed, optimized))
        })
        .collect();

    let mut out = String::from("sample,gain_fixed,gain_opt\n");
    for (i, (fixed, optimized)) in rows?.iter().enumerate() {
        out.push_str(&format!("{i},{fixed},{optimized}\n"));
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn parse_dims(raw: &str) -> Result<(usize, usize), String> {
    let mut parts = raw.split('x');
    let parse = |s: Option<&str>| -> Result<usize, String> {
        s.and_then(|v| v.parse::<usize>().ok())
            .filter(|&v| v >= 2)
            .ok_or_else(|| format!("--dims must look like 3x3 with parts >= 2, got {raw:?}"))
    };
    let da = parse(parts.next())?;
    let db = parse(parts.next())?;
    if parts.next().is_some() {
        return Err(format!("--dims must have exactly two parts, got {raw:?}"));
    }
    Ok((da, db))
}
