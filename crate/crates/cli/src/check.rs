//! Cross-check of a solver result against exhaustive search.

use ldilp::dp::Mode;
use ldilp::oracle::{ilp_brute, lp_l1_radius, OracleBudget};
use ldilp::problem::{IlpInstance, SolveResult, Status};

use crate::CliError;

/// Search radius tried first when the feasible region is unbounded.
const OPEN_RADIUS: u64 = 16;

/// Compares `res` with [`ilp_brute`].
///
/// When the linear relaxation is bounded, its `l1` radius makes the search
/// complete and status and objective must agree exactly. Otherwise the
/// search covers a ball only, and the one decidable disagreement is a
/// solver claiming infeasibility while the ball holds a point.
pub fn oracle_check(inst: &IlpInstance, mode: Mode, res: &SolveResult) -> Result<(), CliError> {
    match lp_l1_radius(inst)? {
        Some(r) => {
            let truth = ilp_brute(inst, &OracleBudget::new(r))?;
            let expected = match (mode, truth.status) {
                (_, Status::Infeasible) => (Status::Infeasible, None),
                (Mode::Optimize, _) => (Status::Optimal, truth.objective),
                (Mode::Feasibility, _) => (Status::Feasible, None),
            };
            if (res.status, res.objective) != expected {
                return Err(CliError::OracleMismatch(format!(
                    "solver: {} {:?}, exhaustive search: {} {:?}",
                    res.status.as_str(),
                    res.objective,
                    expected.0.as_str(),
                    expected.1
                )));
            }
        }
        None => {
            let mut radius = OPEN_RADIUS;
            let truth = loop {
                match ilp_brute(inst, &OracleBudget::new(radius)) {
                    Err(ldilp::Error::BudgetExceeded(_)) if radius > 1 => radius /= 2,
                    other => break other?,
                }
            };
            if truth.status.has_solution() && !res.status.has_solution() {
                return Err(CliError::OracleMismatch(format!(
                    "solver reports infeasible but {:?} is feasible",
                    truth.x.unwrap_or_default()
                )));
            }
        }
    }
    Ok(())
}
