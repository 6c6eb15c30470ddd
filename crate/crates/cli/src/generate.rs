//! Seeded instance generators. Every sampler resamples `A` until it has full
//! row rank, and the output depends only on the options and the seed.

use ldilp::problem::IlpInstance;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenOptions {
    pub k: usize,
    pub n: usize,
    pub max_entry: i64,
    pub seed: u64,
    /// Sample `x >= 0` and set `b = A x`.
    pub feasible: bool,
    /// Make the first row strictly positive so the feasible region is a
    /// polytope.
    pub bounded: bool,
}

/// Largest coordinate of the planted solution of a feasible instance.
const PLANTED_MAX: i64 = 3;

pub fn generate(opts: &GenOptions) -> Result<IlpInstance, CliError> {
    let (k, n, m) = (opts.k, opts.n, opts.max_entry);
    if k == 0 || n < k {
        return Err(CliError::Malformed(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if m < 1 {
        return Err(CliError::Malformed("--max-entry must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let a = full_rank(k, &mut rng, |rng, i| {
        (0..n)
            .map(|_| {
                if opts.bounded && i == 0 {
                    rng.gen_range(1..=m)
                } else {
                    rng.gen_range(-m..=m)
                }
            })
            .collect()
    });
    let b = if opts.feasible {
        let x: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=PLANTED_MAX)).collect();
        mat_vec(&a, &x)
    } else {
        let r = m * n as i64;
        (0..k).map(|_| rng.gen_range(-r..=r)).collect()
    };
    let c = (0..n).map(|_| rng.gen_range(-m..=m)).collect();
    Ok(IlpInstance::new(a, b, c)?)
}

/// One instance of the cross-checking family.
#[derive(Clone, Debug)]
pub struct OracleCase {
    pub instance: IlpInstance,
    /// `b = A x` for a planted `x >= 0`.
    pub planted: bool,
}

/// Seeded family with `k` cycling through 1, 2, 3, `k < n <= 7` and
/// `|A_ij| <= 4`. The first row is positive, so every instance has a
/// bounded feasible region and the exhaustive search is complete. Entry
/// ranges shrink with `k` to keep the whole family fast:
/// `k = 1` uses `1..=4`; `k = 2` uses `1..=4` then `-4..=4`; `k = 3` uses a
/// row of ones and two `0/1` rows. Three in four instances are planted; the
/// rest perturb a planted right-hand side and may be infeasible.
pub fn oracle_family(count: usize, seed: u64) -> Vec<OracleCase> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let k = 1 + i % 3;
            let n = rng.gen_range(k + 1..=7);
            let a = full_rank(k, &mut rng, |rng, row| {
                (0..n)
                    .map(|_| match (k, row) {
                        (3, 0) => 1,
                        (3, _) => rng.gen_range(0..=1),
                        (_, 0) => rng.gen_range(1..=4),
                        _ => rng.gen_range(-4..=4),
                    })
                    .collect()
            });
            let x: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
            let mut b = mat_vec(&a, &x);
            let planted = i % 4 != 3;
            if !planted {
                for v in b.iter_mut() {
                    *v += rng.gen_range(-1..=1);
                }
            }
            let c = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
            OracleCase {
                instance: IlpInstance::new(a, b, c).expect("full rank by construction"),
                planted,
            }
        })
        .collect()
}

/// Benchmark family whose subdeterminants grow linearly in `d`: a row of
/// ones, `k - 2` rows of `0/1` entries and a last row with `0` and `d` in
/// its first two columns and uniform entries of `[0, d]` elsewhere. For
/// `k = 1` the single row is `1, d` followed by entries of `[1, d]`. There
/// are `k + 3` columns and `b = A x` for a planted `x` in `[0, 2d]^n`, so
/// the upper levels sit deep inside the cone spanned by the columns, where
/// reachable right-hand sides are dense.
pub fn bench_instance(k: usize, d: i64, rng: &mut ChaCha8Rng) -> IlpInstance {
    let n = k + 3;
    let a = full_rank(k, rng, |rng, row| {
        (0..n)
            .map(|j| {
                if row + 1 < k {
                    if row == 0 {
                        1
                    } else {
                        rng.gen_range(0..=1)
                    }
                } else {
                    // With k = 1 this is the only row and must stay positive.
                    let low = i64::from(k == 1);
                    match j {
                        0 => low,
                        1 => d,
                        _ => rng.gen_range(low..=d),
                    }
                }
            })
            .collect()
    });
    let x: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=2 * d)).collect();
    let b = mat_vec(&a, &x);
    let c = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
    IlpInstance::new(a, b, c).expect("full rank by construction")
}

/// Draws `k` rows with `row(rng, i)` until the matrix has rank `k`.
fn full_rank(
    k: usize,
    rng: &mut ChaCha8Rng,
    mut row: impl FnMut(&mut ChaCha8Rng, usize) -> Vec<i64>,
) -> Vec<Vec<i64>> {
    loop {
        let a: Vec<Vec<i64>> = (0..k).map(|i| row(rng, i)).collect();
        let n = a[0].len();
        if IlpInstance::new(a.clone(), vec![0; k], vec![0; n]).is_ok() {
            return a;
        }
    }
}

fn mat_vec(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}
