//! Approximate minimum-volume enclosing ellipsoid of a centrally symmetric
//! point set, with an exact rational certificate.
//!
//! The primal problem is `min -ln det W` subject to `a^T W a <= 1` for every
//! point `a`; its dual is `max ln det(sum_i c_i a_i a_i^T)` over `c >= 0`
//! with `sum_i c_i = k`. For any feasible pair, `det(W) * det(S) <= 1`
//! where `S = sum_i c_i a_i a_i^T`, so `-ln(det W det S)` bounds the
//! distance of `W` from the optimum.
//!
//! Weights are found by Khachiyan's coordinate ascent in floating point. The
//! result is then rationalized: `S` is formed exactly, `W = S^{-1} / s` with
//! `s = max_i a_i^T S^{-1} a_i`, which makes feasibility exact and gives
//! `det(W) det(S) = s^{-k}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::expbound::exp_lower;
use crate::linalg::{det, inverse, ldl, quadratic_form, rank_rat, RatMatrix};
use crate::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Fixed-point scale used when rationalizing the float weights.
const WEIGHT_BITS: u32 = 30;

/// The centrally symmetric set `{+a_i, -a_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<BigRational>>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<BigRational>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidShape("point set of dimension zero".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimMismatch(p.len(), dim));
        }
        if points.len() < dim {
            return Err(Error::DegeneratePoints);
        }
        let m = RatMatrix::from_rows(points.clone())?;
        if rank_rat(&m) < dim {
            return Err(Error::DegeneratePoints);
        }
        Ok(PointSet { dim, points })
    }

    /// The columns of `m` as points.
    pub fn from_columns(m: &RatMatrix) -> Result<Self> {
        PointSet::new(m.rows(), (0..m.cols()).map(|j| m.column(j)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<BigRational>] {
        &self.points
    }

    /// `sum_i c_i a_i a_i^T`.
    pub fn moment_matrix(&self, c: &[BigRational]) -> RatMatrix {
        let k = self.dim;
        let mut s = RatMatrix::zeros(k, k);
        for (a, ci) in self.points.iter().zip(c) {
            if ci.is_zero() {
                continue;
            }
            for r in 0..k {
                if a[r].is_zero() {
                    continue;
                }
                let car = ci * &a[r];
                for q in 0..k {
                    let v = s.get(r, q) + &car * &a[q];
                    s.set(r, q, v);
                }
            }
        }
        s
    }

    /// `max_i a_i^T w a_i`.
    pub fn max_form(&self, w: &RatMatrix) -> BigRational {
        self.points
            .iter()
            .map(|a| quadratic_form(w, a).expect("dimensions checked"))
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

/// Feasible primal solution together with the dual weights certifying it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalEllipsoid {
    pub w_hat: RatMatrix,
    pub dual_weights: Vec<BigRational>,
    /// Upper bound on `-ln det W_hat - ln det S`, namely `1/P - 1` for the
    /// certificate product `P = det(W_hat) det(S)`.
    pub gap_bound: BigRational,
    pub iterations: usize,
}

impl RationalEllipsoid {
    /// `det(W_hat) * det(S)`. Lies in `(0, 1]` for any feasible pair.
    pub fn certificate_product(&self, pts: &PointSet) -> BigRational {
        let s = pts.moment_matrix(&self.dual_weights);
        det(&self.w_hat).expect("square") * det(&s).expect("square")
    }

    /// Re-checks everything exactly: feasibility of `W_hat`, validity of the
    /// dual weights, weak duality, and a gap of at most `2 eps`.
    pub fn certify(&self, pts: &PointSet, eps: &BigRational) -> bool {
        let k = BigRational::from_integer(pts.dim().into());
        if self.dual_weights.len() != pts.points().len()
            || self.dual_weights.iter().any(Signed::is_negative)
            || self.dual_weights.iter().sum::<BigRational>() != k
        {
            return false;
        }
        if pts.max_form(&self.w_hat) > BigRational::one() {
            return false;
        }
        let p = self.certificate_product(pts);
        let two_eps = eps * BigRational::from_integer(2.into());
        p.is_positive() && p <= BigRational::one() && p >= exp_lower(&-two_eps)
    }
}

/// Upper triangular `C` with `a^T C^T C a <= 1` for every point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularFactor {
    pub c: RatMatrix,
    pub eps: BigRational,
}

impl TriangularFactor {
    pub fn det(&self) -> BigRational {
        (0..self.c.rows()).fold(BigRational::one(), |acc, i| acc * self.c.get(i, i))
    }
}

pub fn solve_mvee(pts: &PointSet, eps: &BigRational) -> Result<RationalEllipsoid> {
    solve_mvee_with(pts, eps, DEFAULT_MAX_ITER)
}

pub fn solve_mvee_with(
    pts: &PointSet,
    eps: &BigRational,
    max_iter: usize,
) -> Result<RationalEllipsoid> {
    if !eps.is_positive() {
        return Err(Error::NonPositiveInput);
    }
    let k = pts.dim();
    let n = pts.points().len();
    let a: Vec<Vec<f64>> = pts
        .points()
        .iter()
        .map(|p| p.iter().map(|v| v.to_f64().unwrap_or(0.0)).collect())
        .collect();
    let kf = k as f64;
    let target = 1.0 + eps.to_f64().unwrap_or(1.0).min(1.0) / kf;

    let mut u = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    loop {
        let Some(xinv) = float_inverse(&float_moment(&a, &u, k)) else {
            break;
        };
        let (j, kappa) = a.iter().map(|p| float_form(&xinv, p)).enumerate().fold(
            (0, f64::MIN),
            |best, (i, m)| if m > best.1 { (i, m) } else { best },
        );
        if kappa / kf <= target || iterations >= max_iter {
            break;
        }
        let beta = (kappa / kf - 1.0) / (kappa - 1.0);
        for w in u.iter_mut() {
            *w *= 1.0 - beta;
        }
        u[j] += beta;
        iterations += 1;
    }

    let two_eps = eps * BigRational::from_integer(2.into());
    let floor_p = exp_lower(&-two_eps);
    let mut bits = WEIGHT_BITS;
    loop {
        let c = rationalize_weights(&u, k, bits);
        let s = pts.moment_matrix(&c);
        if let Ok(s_inv) = inverse(&s) {
            let scale = pts.max_form(&s_inv);
            let w_hat = s_inv.scale(&scale.recip());
            let p = BigRational::one() / num_traits::pow(scale, k);
            if p >= floor_p {
                let gap_bound = p.recip() - BigRational::one();
                return Ok(RationalEllipsoid {
                    w_hat,
                    dual_weights: c,
                    gap_bound,
                    iterations,
                });
            }
            if iterations >= max_iter {
                return Err(Error::MveeNotConverged(iterations));
            }
        }
        if bits >= 4 * WEIGHT_BITS {
            return Err(Error::MveeNotConverged(iterations));
        }
        bits += WEIGHT_BITS;
    }
}

/// Factor `C = D' L` from `W_hat = L^T D L`, where each `D'_ii` is a rational
/// lower approximation of `sqrt(D_ii)` within the factor `e^{-eps/k}`.
pub fn round_to_triangular(
    e: &RationalEllipsoid,
    pts: &PointSet,
    eps: &BigRational,
) -> Result<TriangularFactor> {
    if !eps.is_positive() {
        return Err(Error::NonPositiveInput);
    }
    let k = pts.dim();
    let f = ldl(&e.w_hat)?;
    let rho = exp_lower(&-(eps / BigRational::from_integer(k.into())));
    let mut c = f.l.clone();
    for i in 0..k {
        let di = rational_sqrt_lower(&f.d[i], &rho)?;
        for j in i..k {
            let v = c.get(i, j) * &di;
            c.set(i, j, v);
        }
    }
    let ctc = c.transpose().mul(&c)?;
    if pts.max_form(&ctc) > BigRational::one() {
        // D'^2 <= D makes this impossible; kept as a hard check.
        return Err(Error::InvalidShape(
            "rounded factor lost containment".into(),
        ));
    }
    Ok(TriangularFactor {
        c,
        eps: eps.clone(),
    })
}

/// Rational `r` with `rho sqrt(x) <= r <= sqrt(x)`.
pub fn rational_sqrt_lower(x: &BigRational, rho: &BigRational) -> Result<BigRational> {
    if !x.is_positive() || !rho.is_positive() || rho >= &BigRational::one() {
        return Err(Error::NonPositiveInput);
    }
    let (p, q) = (x.numer(), x.denom());
    let pq = p * q;
    let target = rho * rho * x;
    let mut m = 0u32;
    loop {
        // sqrt(x) = sqrt(p q 4^m) / (q 2^m); flooring the integer root
        // keeps the estimate below sqrt(x).
        let root = (&pq << (2 * m)).sqrt();
        let r = BigRational::new(root, q << m);
        if &r * &r >= target {
            return Ok(r);
        }
        m += 4;
    }
}

fn rationalize_weights(u: &[f64], k: usize, bits: u32) -> Vec<BigRational> {
    let scale = (bits as f64).exp2();
    let ints: Vec<BigInt> = u
        .iter()
        .map(|&w| BigInt::from_f64((w.max(0.0) * scale).round()).unwrap_or_default())
        .collect();
    let total: BigInt = ints.iter().sum();
    let total = if total.is_zero() {
        BigInt::one()
    } else {
        total
    };
    ints.into_iter()
        .map(|q| BigRational::new(q * BigInt::from(k), total.clone()))
        .collect()
}

fn float_moment(a: &[Vec<f64>], u: &[f64], k: usize) -> Vec<Vec<f64>> {
    let mut x = vec![vec![0.0; k]; k];
    for (p, &w) in a.iter().zip(u) {
        for r in 0..k {
            for q in 0..k {
                x[r][q] += w * p[r] * p[q];
            }
        }
    }
    x
}

fn float_form(m: &[Vec<f64>], p: &[f64]) -> f64 {
    let k = p.len();
    (0..k)
        .map(|r| p[r] * (0..k).map(|q| m[r][q] * p[q]).sum::<f64>())
        .sum()
}

fn float_inverse(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let k = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| f64::from(i == j)).collect())
        .collect();
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..k {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..k {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for j in 0..k {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn pts(rows: &[Vec<i64>]) -> PointSet {
        let points = rows
            .iter()
            .map(|r| r.iter().map(|&v| rat(v, 1)).collect())
            .collect();
        PointSet::new(rows[0].len(), points).unwrap()
    }

    fn close(m: &RatMatrix, expect: &[f64], tol: f64) -> bool {
        m.entries()
            .iter()
            .zip(expect)
            .all(|(a, b)| (a.to_f64().unwrap() - b).abs() <= tol)
    }

    #[test]
    fn unit_basis_gives_unit_ball() {
        let p = pts(&[vec![1, 0], vec![0, 1]]);
        let eps = rat(1, 10);
        let e = solve_mvee(&p, &eps).unwrap();
        assert!(e.certify(&p, &eps));
        assert!(close(&e.w_hat, &[1.0, 0.0, 0.0, 1.0], 0.1));
    }

    #[test]
    fn axis_aligned_ellipse() {
        let p = pts(&[vec![2, 0], vec![0, 1]]);
        let eps = rat(1, 10);
        let e = solve_mvee(&p, &eps).unwrap();
        assert!(e.certify(&p, &eps));
        assert!(close(&e.w_hat, &[0.25, 0.0, 0.0, 1.0], 0.1));
    }

    #[test]
    fn random_points_certificate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rows: Vec<Vec<i64>> = (0..6)
                .map(|_| (0..3).map(|_| rng.gen_range(-5..=5)).collect())
                .collect();
            let Ok(p) = PointSet::new(
                3,
                rows.iter()
                    .map(|r| r.iter().map(|&v| rat(v, 1)).collect())
                    .collect(),
            ) else {
                continue;
            };
            let eps = rat(1, 4);
            let e = solve_mvee(&p, &eps).unwrap();
            assert!(e.certify(&p, &eps));
            // weak duality as a float sanity check on the logs
            let s = p.moment_matrix(&e.dual_weights);
            let dual = det(&s).unwrap().to_f64().unwrap().ln();
            let primal = -det(&e.w_hat).unwrap().to_f64().unwrap().ln();
            assert!(dual <= primal + 1e-9);
            assert!(primal - dual <= 0.5 + 1e-9);
        }
    }

    #[test]
    fn degenerate_points_rejected() {
        let points = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        assert_eq!(PointSet::new(2, points), Err(Error::DegeneratePoints));
    }

    #[test]
    fn sqrt_lower_examples() {
        let r = rational_sqrt_lower(&rat(4, 1), &rat(9, 10)).unwrap();
        assert!(r >= rat(18, 10) && r <= rat(2, 1));
        let x = rat(2, 1);
        let rho = rat(99, 100);
        let r = rational_sqrt_lower(&x, &rho).unwrap();
        assert!(&r * &r <= x && &x * &rho * &rho <= &r * &r);
        let r = rational_sqrt_lower(&rat(1, 9), &rat(1, 2)).unwrap();
        assert!(r >= rat(1, 6) && r <= rat(1, 3));
        assert_eq!(
            rational_sqrt_lower(&rat(0, 1), &rat(1, 2)),
            Err(Error::NonPositiveInput)
        );
        assert_eq!(
            rational_sqrt_lower(&rat(-1, 1), &rat(1, 2)),
            Err(Error::NonPositiveInput)
        );
    }

    #[test]
    fn rounding_identity_and_diagonal() {
        let p = pts(&[vec![1, 0], vec![0, 1]]);
        let e = RationalEllipsoid {
            w_hat: RatMatrix::identity(2),
            dual_weights: vec![rat(1, 1), rat(1, 1)],
            gap_bound: rat(0, 1),
            iterations: 0,
        };
        let eps = rat(1, 2);
        let f = round_to_triangular(&e, &p, &eps).unwrap();
        let lo = exp_lower(&-(&eps / rat(2, 1)));
        for i in 0..2 {
            assert!(f.c.get(i, i) >= &lo && f.c.get(i, i) <= &rat(1, 1));
        }

        let e = RationalEllipsoid {
            w_hat: RatMatrix::from_i64_rows(&[vec![4, 0], vec![0, 1]]).unwrap(),
            dual_weights: vec![rat(1, 1), rat(1, 1)],
            gap_bound: rat(0, 1),
            iterations: 0,
        };
        // (1,0) is outside the ellipse of diag(4,1), so use (1/2,0)
        let p2 = PointSet::new(
            2,
            vec![vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]],
        )
        .unwrap();
        let f = round_to_triangular(&e, &p2, &eps).unwrap();
        assert!(f.c.get(0, 0) <= &rat(2, 1) && f.c.get(0, 0) >= &(rat(2, 1) * &lo));
        assert!(f.c.get(1, 1) <= &rat(1, 1) && f.c.get(1, 1) >= &lo);
        assert!(f.c.get(0, 1).is_zero());
    }

    #[test]
    fn rounded_determinant_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let k = rng.gen_range(1..=4);
            let n = rng.gen_range(k..=8);
            let rows: Vec<Vec<BigRational>> = (0..n)
                .map(|_| (0..k).map(|_| rat(rng.gen_range(-4..=4), 1)).collect())
                .collect();
            let Ok(p) = PointSet::new(k, rows) else {
                continue;
            };
            let eps = rat(1, 3);
            let e = solve_mvee(&p, &eps).unwrap();
            assert!(e.certify(&p, &eps));
            let f = round_to_triangular(&e, &p, &eps).unwrap();
            assert!(f.c.is_upper_triangular());
            let ctc = f.c.transpose().mul(&f.c).unwrap();
            assert!(p.max_form(&ctc) <= rat(1, 1));
            let ratio = f.det() * f.det() / det(&e.w_hat).unwrap();
            assert!(ratio <= rat(1, 1));
            assert!(ratio >= exp_lower(&-(rat(2, 1) * &eps)));
        }
    }
}
