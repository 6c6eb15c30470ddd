//! Benchmark harness: solves the [`bench_instance`] family in both modes
//! and reports one CSV row per run.

use std::time::Instant;

use ldilp::dp::{self, DpConfig, EtaPolicy, Mode};
use ldilp::problem::SolveResult;
use ldilp::{BigInt, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::generate::bench_instance;
use crate::CliError;

pub const CSV_HEADER: &str = "k,delta,eta,rho,max_level,opt_ms,feas_ms";

/// Default number of geometric steps of a `lo..hi` delta range.
pub const DEFAULT_DELTA_STEPS: usize = 5;

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub ks: Vec<usize>,
    /// Target subdeterminant sizes `d` of the generator.
    pub deltas: Vec<i64>,
    pub repetitions: usize,
    pub seed: u64,
    pub eta: EtaPolicy,
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub k: usize,
    /// `Delta-hat`, the subdeterminant bound the solver used.
    pub delta_hat: BigInt,
    pub eta: u64,
    pub rho: u32,
    /// Largest level over both modes.
    pub max_level: usize,
    pub opt_ms: f64,
    pub feas_ms: f64,
    /// `|det B'|` of the preconditioner.
    pub precond_delta: Rational,
}

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3},{:.3}",
            self.k, self.delta_hat, self.eta, self.rho, self.max_level, self.opt_ms, self.feas_ms
        )
    }

    /// `max_j |B_j| <= (8 eta + 3)^k delta`.
    pub fn within_state_bound(&self) -> bool {
        let bound = dp::state_space_bound(self.k, self.eta, &self.precond_delta);
        Rational::from_integer(BigInt::from(self.max_level)) <= bound
    }
}

/// `a..b` (inclusive) or a single value.
pub fn parse_k_range(s: &str) -> Result<Vec<usize>, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| format!("invalid k {t:?}"))
    };
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(format!("empty range {s:?}"));
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![parse(s)?]),
    }
}

/// A comma list `8,16,32`, or `lo..hi` split into `steps` geometrically
/// spaced integers (duplicates after rounding are dropped).
pub fn parse_delta_range(s: &str, steps: usize) -> Result<Vec<i64>, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<i64>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| format!("invalid delta {t:?}"))
    };
    if let Some((a, b)) = s.split_once("..") {
        let (lo, hi) = (parse(a)?, parse(b)?);
        if lo > hi || steps == 0 {
            return Err(format!("empty range {s:?}"));
        }
        if steps == 1 || lo == hi {
            return Ok(vec![lo]);
        }
        let ratio = (hi as f64 / lo as f64).powf(1.0 / (steps - 1) as f64);
        let mut out: Vec<i64> = (0..steps)
            .map(|i| (lo as f64 * ratio.powi(i as i32)).round() as i64)
            .collect();
        out[steps - 1] = hi;
        out.dedup();
        return Ok(out);
    }
    s.split(',').map(parse).collect()
}

/// Runs every `(k, d, repetition)` triple in order and hands each row to
/// `on_row` as soon as it is measured.
pub fn run_bench(
    opts: &BenchOptions,
    mut on_row: impl FnMut(&BenchRow),
) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::new();
    for &k in &opts.ks {
        for (di, &d) in opts.deltas.iter().enumerate() {
            for rep in 0..opts.repetitions {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(((k as u64) << 40) | ((di as u64) << 20) | rep as u64);
                let inst = bench_instance(k, d, &mut rng);
                let cfg = DpConfig::default().with_eta(opts.eta);
                let (opt, opt_ms) = timed(|| dp::solve_detailed(&inst, &cfg))?;
                let feas_cfg = cfg.clone().with_mode(Mode::Feasibility);
                let (feas, feas_ms) = timed(|| dp::solve(&inst, &feas_cfg))?;
                let precond_delta = opt
                    .preconditioner
                    .as_ref()
                    .map(|p| p.delta.clone())
                    .unwrap_or_default();
                let row = BenchRow {
                    k,
                    delta_hat: dp::delta_bound(&inst)?,
                    eta: opt.result.stats.eta,
                    rho: opt.result.stats.rho,
                    max_level: max_level(&opt.result).max(max_level(&feas)),
                    opt_ms,
                    feas_ms,
                    precond_delta,
                };
                on_row(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

fn max_level(r: &SolveResult) -> usize {
    r.stats.max_level()
}

fn timed<T>(f: impl FnOnce() -> ldilp::Result<T>) -> Result<(T, f64), CliError> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64() * 1e3))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
