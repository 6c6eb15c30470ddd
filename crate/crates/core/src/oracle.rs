//! Exhaustive reference implementations. Nothing here depends on the
//! dynamic program.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::linalg::{clear_denominators, det_int, IntMatrix, RatMatrix};
use crate::problem::{IlpInstance, SolveResult, SolveStats, Status};
use crate::simplex::solve_lp;
use crate::{Error, Result};

/// Largest number of columns accepted by [`herdisc_brute`].
pub const HERDISC_MAX_COLS: usize = 12;
/// Largest number of columns accepted by [`disc_brute`].
pub const DISC_MAX_COLS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    /// Only `x` with `|x|_1 <= max_l1` are searched.
    pub max_l1: u64,
    /// Cap on the number of enumerated candidates or subsets.
    pub max_subsets: u64,
}

impl OracleBudget {
    pub fn new(max_l1: u64) -> Self {
        OracleBudget {
            max_l1,
            max_subsets: 50_000_000,
        }
    }
}

/// Exhaustive search over `x >= 0` with `|x|_1 <= max_l1`.
///
/// A nonsingular `k x k` column set `B` is fixed; the remaining coordinates
/// `x_N` range over every composition with `|x_N|_1 <= max_l1`, and
/// `x_B = A_B^{-1} (b - A_N x_N)` is the only completion, accepted when it is
/// integral, nonnegative and keeps `|x|_1 <= max_l1`. Returns `Optimal` with
/// the first best point in enumeration order, or `Infeasible` when the ball
/// holds no solution.
pub fn ilp_brute(inst: &IlpInstance, budget: &OracleBudget) -> Result<SolveResult> {
    let (k, n) = (inst.k(), inst.n());
    let basis = first_basis(inst)?;
    let free: Vec<usize> = (0..n).filter(|j| !basis.contains(j)).collect();
    let count = binomial(budget.max_l1 + free.len() as u64, free.len() as u64);
    if count.map_or(true, |c| c > budget.max_subsets) {
        return Err(Error::BudgetExceeded(format!(
            "{} free variables with l1 bound {}",
            free.len(),
            budget.max_l1
        )));
    }

    // x_B = adj(A_B) r / det(A_B), all in i128.
    let ab = inst.a_int().select_columns(&basis);
    let det = det_int(&ab)?
        .to_i128()
        .ok_or_else(|| Error::Overflow("basis determinant".into()))?;
    let adj = adjugate(&ab)?;

    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut x_n = vec![0i64; free.len()];
    let mut x = vec![0i64; n];
    let b: Vec<i128> = inst.b().iter().map(|&v| v as i128).collect();
    let mut visit = |x_n: &[i64], used: u64| {
        let mut r = b.clone();
        for (&j, &v) in free.iter().zip(x_n) {
            if v != 0 {
                for i in 0..k {
                    r[i] -= inst.a()[i][j] as i128 * v as i128;
                }
            }
        }
        let mut l1 = used as i128;
        for (row, &j) in basis.iter().enumerate() {
            let num: i128 = (0..k).map(|i| adj[row][i] * r[i]).sum();
            if num % det != 0 {
                return;
            }
            let v = num / det;
            if v < 0 {
                return;
            }
            l1 += v;
            x[j] = v as i64;
        }
        if l1 > budget.max_l1 as i128 {
            return;
        }
        for (&j, &v) in free.iter().zip(x_n) {
            x[j] = v;
        }
        let obj = inst.objective(&x);
        if best.as_ref().map_or(true, |(o, _)| obj > *o) {
            best = Some((obj, x.clone()));
        }
    };
    for total in 0..=budget.max_l1 {
        compositions(&mut x_n, total, &mut |xs| visit(xs, total));
    }

    let stats = SolveStats::default();
    Ok(match best {
        Some((obj, x)) => SolveResult {
            status: Status::Optimal,
            objective: Some(obj),
            x: Some(x),
            stats,
        },
        None => SolveResult {
            status: Status::Infeasible,
            objective: None,
            x: None,
            stats,
        },
    })
}

/// `floor(max 1^T x)` over the linear relaxation: a complete search radius
/// whenever the feasible region is bounded. `None` when the region is
/// unbounded, `Some(0)` when it is empty.
pub fn lp_l1_radius(inst: &IlpInstance) -> Result<Option<u64>> {
    let ones = vec![BigRational::from_integer(BigInt::from(1)); inst.n()];
    match solve_lp(&inst.a_rat(), &inst.b_rat(), &ones) {
        Ok(s) => Ok(Some(
            s.objective
                .floor()
                .to_integer()
                .to_u64()
                .unwrap_or(u64::MAX),
        )),
        Err(Error::LpInfeasible) => Ok(Some(0)),
        Err(Error::LpUnbounded) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `max_{I} min_{z in {-1,1}^I} |M_I z|_inf` over all column subsets.
pub fn herdisc_brute(m: &RatMatrix) -> Result<BigRational> {
    let n = m.cols();
    if n > HERDISC_MAX_COLS {
        return Err(Error::BudgetExceeded(format!("herdisc over {n} columns")));
    }
    let (mi, d) = clear_denominators(m);
    let cols = int_columns(&mi)?;
    // Walk all z in {-1, 0, 1}^n; the zero pattern is the subset.
    let subsets = 1usize << n;
    let mut disc = vec![i128::MAX; subsets];
    disc[0] = 0;
    let total = 3usize.pow(n as u32);
    let k = m.rows();
    for code in 1..total {
        let mut c = code;
        let mut mask = 0usize;
        let mut acc = vec![0i128; k];
        for (j, col) in cols.iter().enumerate() {
            let digit = c % 3;
            c /= 3;
            if digit == 0 {
                continue;
            }
            mask |= 1 << j;
            for i in 0..k {
                if digit == 1 {
                    acc[i] += col[i];
                } else {
                    acc[i] -= col[i];
                }
            }
        }
        let norm = acc.iter().map(|v| v.abs()).max().unwrap_or(0);
        if norm < disc[mask] {
            disc[mask] = norm;
        }
    }
    let best = disc.into_iter().max().unwrap_or(0);
    Ok(BigRational::new(BigInt::from(best), d))
}

/// `min_{z in {-1,1}^n} |M z|_inf`.
pub fn disc_brute(m: &RatMatrix) -> Result<BigRational> {
    let n = m.cols();
    if n > DISC_MAX_COLS {
        return Err(Error::BudgetExceeded(format!("disc over {n} columns")));
    }
    if n == 0 {
        return Ok(BigRational::zero());
    }
    let (mi, d) = clear_denominators(m);
    let cols = int_columns(&mi)?;
    let k = m.rows();
    let mut best = i128::MAX;
    // z and -z give the same norm, so the first sign is fixed to +1.
    for signs in 0..(1usize << (n - 1)) {
        let mut acc = cols[0].clone();
        for (j, col) in cols.iter().enumerate().skip(1) {
            let neg = signs >> (j - 1) & 1 == 1;
            for i in 0..k {
                if neg {
                    acc[i] -= col[i];
                } else {
                    acc[i] += col[i];
                }
            }
        }
        best = best.min(acc.iter().map(|v| v.abs()).max().unwrap_or(0));
    }
    Ok(BigRational::new(BigInt::from(best), d))
}

fn int_columns(m: &IntMatrix) -> Result<Vec<Vec<i128>>> {
    (0..m.cols())
        .map(|j| {
            m.column(j)
                .iter()
                .map(|v| {
                    v.to_i128()
                        .ok_or_else(|| Error::Overflow("matrix entry".into()))
                })
                .collect()
        })
        .collect()
}

/// First `k`-subset of columns, in lexicographic order, with nonzero
/// determinant.
fn first_basis(inst: &IlpInstance) -> Result<Vec<usize>> {
    let (k, n) = (inst.k(), inst.n());
    let a = inst.a_int();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !det_int(&a.select_columns(&idx))?.is_zero() {
            return Ok(idx);
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return Err(Error::RankDeficient {
                rank: 0,
                expected: k,
            });
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `adj(M)` with `M adj(M) = det(M) I`, by cofactors.
fn adjugate(m: &IntMatrix) -> Result<Vec<Vec<i128>>> {
    let k = m.rows();
    let mut adj = vec![vec![0i128; k]; k];
    if k == 1 {
        adj[0][0] = 1;
        return Ok(adj);
    }
    for i in 0..k {
        for j in 0..k {
            let rows: Vec<Vec<BigInt>> = (0..k)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..k)
                        .filter(|&c| c != j)
                        .map(|c| m.get(r, c).clone())
                        .collect()
                })
                .collect();
            let minor = det_int(&IntMatrix::from_rows(rows)?)?;
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            // adj is the transpose of the cofactor matrix
            adj[j][i] = sign
                * minor
                    .to_i128()
                    .ok_or_else(|| Error::Overflow("cofactor".into()))?;
        }
    }
    Ok(adj)
}

/// Calls `f` on every vector of nonnegative integers of the same length as
/// `buf` with entries summing to `total`, in stars-and-bars order.
fn compositions(buf: &mut [i64], total: u64, f: &mut dyn FnMut(&[i64])) {
    let len = buf.len();
    if len == 0 {
        if total == 0 {
            f(buf);
        }
        return;
    }
    buf.iter_mut().for_each(|v| *v = 0);
    buf[len - 1] = total as i64;
    loop {
        f(buf);
        // The last slot holds the remainder. Clear the rightmost nonzero
        // slot p >= 1, carry one unit into p - 1 and the rest into the
        // remainder; this is the lexicographic successor of the prefix.
        let Some(p) = (1..len).rev().find(|&p| buf[p] > 0) else {
            return;
        };
        let moved = buf[p];
        buf[p] = 0;
        buf[p - 1] += 1;
        buf[len - 1] += moved - 1;
    }
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}
