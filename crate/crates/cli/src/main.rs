use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ldilp::dp::{EtaPolicy, Mode};
use ldilp_cli::bench::{
    parse_delta_range, parse_k_range, run_bench, BenchOptions, CSV_HEADER, DEFAULT_DELTA_STEPS,
};
use ldilp_cli::generate::{generate, GenOptions};
use ldilp_cli::io::InstanceFile;
use ldilp_cli::solve::{parse_eta, run_solve, SolveOptions};
use ldilp_cli::CliError;

/// Exact ILP solver for `max c^T x, A x = b, x >= 0` integral, with few rows.
#[derive(Parser)]
#[command(name = "ldilp", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance file (`-` reads standard input) and print a result.
    Solve(SolveArgs),
    /// Print a seeded random instance.
    Generate(GenArgs),
    /// Time both modes over a generated family and print CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Optimize,
    Feasibility,
}

#[derive(Args)]
struct SolveArgs {
    path: PathBuf,
    #[arg(long, value_enum, default_value = "optimize")]
    mode: ModeArg,
    /// `safe`, `aggressive` or a positive integer.
    #[arg(long, default_value = "safe", value_parser = parse_eta)]
    eta: EtaPolicy,
    /// Fixed number of levels instead of the proximity-based choice.
    #[arg(long)]
    rho: Option<u32>,
    /// Re-run with doubled eta and require agreement (default for aggressive).
    #[arg(long, conflicts_with = "no_escalate")]
    escalate: bool,
    #[arg(long)]
    no_escalate: bool,
    /// Compare against exhaustive search; exit 3 on disagreement.
    #[arg(long)]
    oracle_check: bool,
    /// Report level sizes and wall time.
    #[arg(long)]
    stats: bool,
    /// Accepted for uniformity; solving is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    max_entry: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Plant a solution so the instance is feasible.
    #[arg(long)]
    feasible: bool,
    /// Positive first row, so the feasible region is bounded.
    #[arg(long)]
    bounded: bool,
    #[arg(long)]
    comment: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    /// `a..b` inclusive, or a single k.
    #[arg(long, default_value = "2")]
    k_range: String,
    /// `lo..hi` in geometric steps, or a comma list.
    #[arg(long, default_value = "4..40")]
    delta_range: String,
    /// Number of steps of a `lo..hi` delta range.
    #[arg(long, default_value_t = DEFAULT_DELTA_STEPS)]
    delta_steps: usize,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "safe", value_parser = parse_eta)]
    eta: EtaPolicy,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Solve(a) => {
            let text = read_input(&a.path)?;
            let opts = SolveOptions {
                mode: match a.mode {
                    ModeArg::Optimize => Mode::Optimize,
                    ModeArg::Feasibility => Mode::Feasibility,
                },
                eta: a.eta,
                rho: a.rho,
                escalate: match (a.escalate, a.no_escalate) {
                    (true, _) => Some(true),
                    (_, true) => Some(false),
                    _ => None,
                },
                oracle_check: a.oracle_check,
                stats: a.stats,
            };
            println!("{}", run_solve(&text, &opts)?.to_json());
        }
        Cmd::Generate(a) => {
            let inst = generate(&GenOptions {
                k: a.k,
                n: a.n,
                max_entry: a.max_entry,
                seed: a.seed,
                feasible: a.feasible,
                bounded: a.bounded,
            })?;
            println!(
                "{}",
                InstanceFile::from_instance(&inst, a.comment).to_json()
            );
        }
        Cmd::Bench(a) => {
            let opts = BenchOptions {
                ks: parse_k_range(&a.k_range).map_err(CliError::Malformed)?,
                deltas: parse_delta_range(&a.delta_range, a.delta_steps)
                    .map_err(CliError::Malformed)?,
                repetitions: a.repetitions,
                seed: a.seed,
                eta: a.eta,
            };
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{CSV_HEADER}");
            run_bench(&opts, |row| {
                let _ = writeln!(out, "{}", row.csv());
                let _ = out.flush();
            })?;
        }
    }
    Ok(())
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
    Ok(text)
}
