//! The `solve` command without process plumbing.

use ldilp::dp::{self, DpConfig, EtaPolicy, Mode, RhoPolicy};

use crate::check::oracle_check;
use crate::io::{parse_instance, ResultFile};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub mode: Mode,
    pub eta: EtaPolicy,
    pub rho: Option<u32>,
    /// `None` escalates exactly for the aggressive policy.
    pub escalate: Option<bool>,
    pub oracle_check: bool,
    pub stats: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: Mode::Optimize,
            eta: EtaPolicy::Safe,
            rho: None,
            escalate: None,
            oracle_check: false,
            stats: false,
        }
    }
}

impl SolveOptions {
    pub fn config(&self) -> DpConfig {
        let escalate = self.escalate.unwrap_or(self.eta == EtaPolicy::Aggressive);
        let rho = self.rho.map_or(RhoPolicy::Proximity, RhoPolicy::Explicit);
        DpConfig::default()
            .with_mode(self.mode)
            .with_eta(self.eta)
            .with_rho(rho)
            .with_escalate(escalate)
    }
}

/// `safe`, `aggressive` or a positive integer.
pub fn parse_eta(s: &str) -> Result<EtaPolicy, String> {
    match s {
        "safe" => Ok(EtaPolicy::Safe),
        "aggressive" => Ok(EtaPolicy::Aggressive),
        _ => match s.parse::<u64>() {
            Ok(v) if v > 0 => Ok(EtaPolicy::Explicit(v)),
            _ => Err(format!(
                "expected safe, aggressive or a positive integer, got {s:?}"
            )),
        },
    }
}

/// Parses, solves, optionally cross-checks, and returns the verified result.
pub fn run_solve(text: &str, opts: &SolveOptions) -> Result<ResultFile, CliError> {
    let inst = parse_instance(text)?;
    let res = dp::solve(&inst, &opts.config())?;
    let file = ResultFile::new(&inst, &res, opts.stats)?;
    if opts.oracle_check {
        oracle_check(&inst, opts.mode, &res)?;
    }
    Ok(file)
}
