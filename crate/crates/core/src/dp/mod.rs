//! Divide-and-conquer dynamic program over windows of right-hand sides.
//!
//! Level `i` of the program answers, for every integer vector `u` in the
//! window `b / 2^(rho - i) + 4 eta B' [-1, 1]^k`, the best objective of a
//! nonnegative integer `x` with `A x = u` that splits into two halves lying
//! in the previous window. The root level holds `b` itself. The number of
//! levels comes from a proximity bound around an optimal LP vertex, after
//! shifting the variables so that the remaining solution is short.

mod table;
mod window;

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::expbound::exp_lower;
use crate::linalg::RatMatrix;
use crate::precond::{self, LdPreconditioner};
use crate::problem::{IlpInstance, SolveResult, SolveStats, Status};
use crate::simplex::solve_lp;
use crate::{Error, Result};

pub use table::{AuditReport, DpRun};
pub use window::{build_window, WindowBounds, WindowGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Optimize,
    Feasibility,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaPolicy {
    /// `ceil(2 sqrt(k))`, a bound on the hereditary discrepancy of any
    /// matrix whose columns have Euclidean norm at most one.
    Safe,
    /// `max(1, ceil(2 sqrt(ln(k + 2))))`; checked by escalation.
    Aggressive,
    Explicit(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoPolicy {
    /// Derived from a proximity bound; shifts variables near the LP vertex.
    Proximity,
    /// Fixed number of levels without any shift.
    Explicit(u32),
}

#[derive(Clone, Debug)]
pub struct DpConfig {
    pub mode: Mode,
    pub eta_policy: EtaPolicy,
    pub rho_policy: RhoPolicy,
    /// Re-run with doubled eta and require the same status and objective.
    pub escalate: bool,
    /// Accuracy of the preconditioner's ellipsoid.
    pub precond_eps: BigRational,
    pub c_chi: u64,
    pub c_rho: u64,
    /// Cap on the number of states in one level.
    pub max_states: usize,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig {
            mode: Mode::Optimize,
            eta_policy: EtaPolicy::Safe,
            rho_policy: RhoPolicy::Proximity,
            escalate: false,
            precond_eps: BigRational::new(BigInt::one(), BigInt::from(8)),
            c_chi: 3,
            c_rho: 6,
            max_states: 20_000_000,
        }
    }
}

impl DpConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_eta(mut self, policy: EtaPolicy) -> Self {
        self.eta_policy = policy;
        self
    }

    pub fn with_rho(mut self, policy: RhoPolicy) -> Self {
        self.rho_policy = policy;
        self
    }

    pub fn with_escalate(mut self, escalate: bool) -> Self {
        self.escalate = escalate;
        self
    }
}

/// Smallest `m >= 1` with `m^2 >= 4k` (safe) or `e^{m^2 / 4} >= k + 2`
/// (aggressive).
pub fn choose_eta(k: usize, policy: EtaPolicy) -> Result<u64> {
    match policy {
        EtaPolicy::Explicit(0) => Err(Error::NonPositiveInput),
        EtaPolicy::Explicit(e) => Ok(e),
        EtaPolicy::Safe => Ok((1..)
            .find(|&m: &u64| m * m >= 4 * k as u64)
            .expect("unbounded search")),
        EtaPolicy::Aggressive => {
            let target = BigRational::from_integer(BigInt::from(k + 2));
            Ok((1..)
                .find(|&m: &u64| {
                    exp_lower(&BigRational::new(BigInt::from(m * m), BigInt::from(4))) >= target
                })
                .expect("unbounded search"))
        }
    }
}

/// Levels, variable shift and shifted instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoChoice {
    pub rho: u32,
    pub shift: Vec<i64>,
    pub shifted: IlpInstance,
    /// Proximity radius; zero for an explicit policy.
    pub chi: BigInt,
}

/// `chi = ceil(c_chi k^2 D D^(1/k))` for `D = delta_bound`, shift
/// `y_i = max(0, ceil(v_i) - chi)` for the LP vertex `v`, and the smallest
/// `rho` with `(6/5)^rho >= c_rho k chi`.
pub fn choose_rho(
    inst: &IlpInstance,
    lp_vertex: &[BigRational],
    delta_bound: &BigInt,
    policy: RhoPolicy,
    c_chi: u64,
    c_rho: u64,
) -> Result<RhoChoice> {
    if !delta_bound.is_positive() {
        return Err(Error::NonPositiveInput);
    }
    if let RhoPolicy::Explicit(rho) = policy {
        if rho == 0 {
            return Err(Error::NonPositiveInput);
        }
        return Ok(RhoChoice {
            rho,
            shift: vec![0; inst.n()],
            shifted: inst.clone(),
            chi: BigInt::zero(),
        });
    }
    let k = inst.k() as u32;
    let base = BigInt::from(c_chi) * BigInt::from(k * k) * delta_bound;
    // chi^k >= base^k * D: the k-th root rounded up.
    let target = Pow::pow(&base, k) * delta_bound;
    let mut chi = target.nth_root(k);
    if Pow::pow(&chi, k) < target {
        chi += 1;
    }
    let shift: Vec<i64> = lp_vertex
        .iter()
        .map(|v| {
            let s = v.ceil().to_integer() - &chi;
            if s.is_positive() {
                s.to_i64()
                    .ok_or_else(|| Error::Overflow("variable shift".into()))
            } else {
                Ok(0)
            }
        })
        .collect::<Result<_>>()?;
    let ay = inst.apply(&shift);
    let b: Vec<i64> = inst.b().iter().zip(&ay).map(|(b, a)| b - a).collect();
    let shifted = inst.with_rhs(b);

    let bound = BigInt::from(c_rho) * BigInt::from(k) * &chi;
    let (mut six, mut five) = (BigInt::one(), BigInt::one());
    let mut rho = 0u32;
    while six < &bound * &five || rho == 0 {
        six *= 6;
        five *= 5;
        rho += 1;
    }
    Ok(RhoChoice {
        rho,
        shift,
        shifted,
        chi,
    })
}

/// Exact `Delta(A)` when there are few `k`-subsets, otherwise the product of
/// the `k` largest column norms (Hadamard), rounded up.
pub fn delta_bound(inst: &IlpInstance) -> Result<BigInt> {
    let (n, k) = (inst.n(), inst.k());
    if binomial(n as u64, k as u64) <= 5000 {
        return precond::delta_exact(&inst.a_int());
    }
    let mut norms: Vec<BigInt> = (0..n)
        .map(|j| {
            let sq: i64 = inst.column(j).iter().map(|v| v * v).sum();
            let r = BigInt::from(sq).sqrt();
            if &r * &r < BigInt::from(sq) {
                r + 1
            } else {
                r
            }
        })
        .collect();
    norms.sort_unstable_by(|a, b| b.cmp(a));
    Ok(norms.into_iter().take(k).product())
}

/// Everything a run produced, for inspection by tests and tools.
#[derive(Debug)]
pub struct DpDetail {
    pub result: SolveResult,
    pub preconditioner: Option<LdPreconditioner>,
    pub rho: Option<RhoChoice>,
    /// Tables of the main run; absent when the LP decided the instance.
    pub run: Option<DpRun>,
}

pub fn solve(inst: &IlpInstance, cfg: &DpConfig) -> Result<SolveResult> {
    solve_detailed(inst, cfg).map(|d| d.result)
}

pub fn solve_detailed(inst: &IlpInstance, cfg: &DpConfig) -> Result<DpDetail> {
    let start = Instant::now();
    let mut detail = solve_once(inst, cfg, None)?;
    if cfg.escalate && detail.run.is_some() {
        let eta = detail.result.stats.eta;
        let other = solve_once(inst, cfg, Some(2 * eta))?;
        let (a, b) = (&detail.result, &other.result);
        if a.status != b.status || a.objective != b.objective {
            return Err(Error::EscalationMismatch(format!(
                "eta {eta}: {} {:?}, eta {}: {} {:?}",
                a.status.as_str(),
                a.objective,
                2 * eta,
                b.status.as_str(),
                b.objective
            )));
        }
    }
    detail.result.stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(detail)
}

fn solve_once(inst: &IlpInstance, cfg: &DpConfig, eta_override: Option<u64>) -> Result<DpDetail> {
    let k = inst.k();
    let n = inst.n();
    let zero_obj = vec![BigRational::zero(); n];
    let lp_obj = match cfg.mode {
        Mode::Optimize => inst.c_rat(),
        Mode::Feasibility => zero_obj.clone(),
    };
    let a = inst.a_rat();
    let b = inst.b_rat();
    let (lp, mode) = match solve_lp(&a, &b, &lp_obj) {
        Ok(lp) => (lp, cfg.mode),
        Err(Error::LpInfeasible) => {
            // Preconditioner and eta are still reported for the record.
            let pre = precond::build(&inst.a_int(), &cfg.precond_eps)?;
            let eta = eta_override.map_or_else(|| choose_eta(k, cfg.eta_policy), Ok)?;
            return Ok(decided(Status::Infeasible, eta, pre));
        }
        // Unbounded relaxation: the ILP is unbounded iff it is feasible.
        Err(Error::LpUnbounded) => (solve_lp(&a, &b, &zero_obj)?, Mode::Feasibility),
        Err(e) => return Err(e),
    };
    let delta_hat = delta_bound(inst)?;
    let rho = choose_rho(
        inst,
        &lp.x,
        &delta_hat,
        cfg.rho_policy,
        cfg.c_chi,
        cfg.c_rho,
    )?;
    let pre = precond::build(&inst.a_int(), &cfg.precond_eps)?;
    let eta = match eta_override {
        Some(e) => e,
        None => choose_eta(k, cfg.eta_policy)?,
    };
    let shifted = &rho.shifted;
    let geom = WindowGeometry::new(&pre, shifted.b(), eta)?;
    let mut run = DpRun::execute(shifted, geom, rho.rho, mode, cfg.max_states)?;

    let root = run.root(shifted.b());
    let (status, objective, x) = match root {
        None => (Status::Infeasible, None, None),
        Some((_, ref z)) => {
            let x: Vec<i64> = z.iter().zip(&rho.shift).map(|(a, b)| a + b).collect();
            if !inst.is_feasible(&x) {
                return Err(Error::InvalidWitness(format!(
                    "{x:?} does not satisfy A x = b, x >= 0"
                )));
            }
            match (cfg.mode, mode) {
                (Mode::Optimize, Mode::Optimize) => {
                    (Status::Optimal, Some(inst.objective(&x)), Some(x))
                }
                (Mode::Optimize, Mode::Feasibility) => (Status::Unbounded, None, Some(x)),
                _ => (Status::Feasible, None, Some(x)),
            }
        }
    };
    if let (Some(obj), Some((value, _))) = (objective, root) {
        let shift_obj = inst.objective(&rho.shift);
        if obj != value + shift_obj {
            return Err(Error::InvalidWitness(format!(
                "witness objective {obj} but table holds {}",
                value + shift_obj
            )));
        }
    }
    let stats = SolveStats {
        eta,
        rho: rho.rho,
        delta: Some(pre.delta.clone()),
        level_sizes: run.level_sizes(),
        computed_levels: run.computed_tables(),
        shift_y: rho.shift.clone(),
        wall_ms: 0.0,
    };
    Ok(DpDetail {
        result: SolveResult {
            status,
            objective,
            x,
            stats,
        },
        preconditioner: Some(pre),
        rho: Some(rho),
        run: Some(run),
    })
}

fn decided(status: Status, eta: u64, pre: LdPreconditioner) -> DpDetail {
    let stats = SolveStats {
        eta,
        delta: Some(pre.delta.clone()),
        ..SolveStats::default()
    };
    DpDetail {
        result: SolveResult {
            status,
            objective: None,
            x: None,
            stats,
        },
        preconditioner: Some(pre),
        rho: None,
        run: None,
    }
}

/// `(8 eta + 3)^k delta`, the reference size of one window.
pub fn state_space_bound(k: usize, eta: u64, delta: &BigRational) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(8 * eta + 3));
    Pow::pow(&base, k as u32) * delta
}

/// Builds a window geometry around `b` for an explicit `B'`, bypassing the
/// ellipsoid construction. Used to test windows on hand-picked matrices.
pub fn geometry_for(
    b_prime: &RatMatrix,
    b: &[i64],
    eta: u64,
) -> Result<(LdPreconditioner, WindowGeometry)> {
    let pre = LdPreconditioner::from_b_prime(b_prime)?;
    let geom = WindowGeometry::new(&pre, b, eta)?;
    Ok((pre, geom))
}

#[cfg(test)]
mod tests;
