//! Preconditioners `B'` with `|det B'|` close to `Delta(A)` and all columns
//! of `B'^{-1} A` inside the unit ball.
//!
//! Pipeline: pick a large-volume basis `A_S` of the columns, take the
//! minimum-volume enclosing ellipsoid of the columns of `A_S^{-1} A`, round
//! its shape matrix to an upper triangular factor `C`, and set
//! `B' = A_S C^{-1}`. Since `C^T C` defines an ellipsoid containing every
//! column, `B'^{-1} A = C A_S^{-1} A` has unit-bounded columns.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::expbound::exp_lower;
use crate::linalg::{det_int, hnf, inverse, rank, IntMatrix, RatMatrix};
use crate::mvee::{round_to_triangular, solve_mvee, PointSet};
use crate::{Error, Result};

/// Dyadic precisions tried when simplifying the triangular factor.
const COARSEN_BITS: [u32; 6] = [6, 8, 12, 16, 24, 32];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSelection {
    pub indices: Vec<usize>,
    pub det_abs: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdPreconditioner {
    pub basis: BasisSelection,
    /// Upper triangular factor with `B' = A_S C^{-1}`.
    pub c: RatMatrix,
    pub b_prime: RatMatrix,
    /// `|det B'|`.
    pub delta: BigRational,
    /// `B'^{-1} A`.
    pub m: RatMatrix,
    /// `B' = u h_enum` with `u` unimodular.
    pub u: IntMatrix,
    pub h_enum: RatMatrix,
    pub eps: BigRational,
}

/// Greedy volume maximization followed by single-column swaps until no swap
/// increases `|det A_S|`. Local optimality under swaps makes the result a
/// `k!`-approximation of `Delta(A)`.
pub fn select_basis(a: &IntMatrix) -> Result<BasisSelection> {
    let (k, n) = (a.rows(), a.cols());
    let r = rank(a);
    if r < k {
        return Err(Error::RankDeficient {
            rank: r,
            expected: k,
        });
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(BigInt, usize)> = None;
        for j in (0..n).filter(|j| !chosen.contains(j)) {
            let mut cols = chosen.clone();
            cols.push(j);
            let g = gram_det(&a.select_columns(&cols));
            if g.is_positive() && best.as_ref().map_or(true, |(v, _)| &g > v) {
                best = Some((g, j));
            }
        }
        let (_, j) = best.ok_or(Error::RankDeficient {
            rank: chosen.len(),
            expected: k,
        })?;
        chosen.push(j);
    }

    let mut current = det_int(&a.select_columns(&chosen))?.abs();
    'search: loop {
        for p in 0..k {
            for q in (0..n).filter(|q| !chosen.contains(q)) {
                let mut cand = chosen.clone();
                cand[p] = q;
                let d = det_int(&a.select_columns(&cand))?.abs();
                if d > current {
                    chosen = cand;
                    current = d;
                    continue 'search;
                }
            }
        }
        break;
    }
    Ok(BasisSelection {
        indices: chosen,
        det_abs: BigRational::from_integer(current),
    })
}

/// `Delta(A)`: the largest `|det|` over all `k x k` column submatrices.
pub fn delta_exact(a: &IntMatrix) -> Result<BigInt> {
    let (k, n) = (a.rows(), a.cols());
    let r = rank(a);
    if r < k {
        return Err(Error::RankDeficient {
            rank: r,
            expected: k,
        });
    }
    let mut best = BigInt::zero();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let d = det_int(&a.select_columns(&idx))?.abs();
        if d > best {
            best = d;
        }
        // next k-subset in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return Ok(best);
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Builds the preconditioner. `eps` controls the ellipsoid accuracy; the
/// determinant loss of the whole construction stays within `e^{2 eps}` of
/// the exact ellipsoid.
pub fn build(a: &IntMatrix, eps: &BigRational) -> Result<LdPreconditioner> {
    if !eps.is_positive() {
        return Err(Error::NonPositiveInput);
    }
    let k = a.rows();
    let basis = select_basis(a)?;
    let a_rat = a.to_rational();
    let a_s = a_rat.select_columns(&basis.indices);
    let a_bar = inverse(&a_s)?.mul(&a_rat)?;
    let pts = PointSet::from_columns(&a_bar)?;

    // Split eps: the ellipsoid gap is at most eps by the stopping rule, the
    // square-root rounding costs eps/2 and simplification eps/4.
    let two = BigRational::from_integer(2.into());
    let half = eps / &two;
    let quarter = &half / &two;
    let ell = solve_mvee(&pts, eps)?;
    let tri = round_to_triangular(&ell, &pts, &half)?;
    let c = coarsen(&tri.c, &pts, &quarter);

    let b = inverse(&c)?;
    let b_prime = a_s.mul(&b)?;
    let det_c = (0..k).fold(BigRational::one(), |acc, i| acc * c.get(i, i));
    let delta = &basis.det_abs / det_c;
    let m = c.mul(&a_bar)?;
    let f = hnf(&b_prime)?;
    Ok(LdPreconditioner {
        basis,
        c,
        b_prime,
        delta,
        m,
        u: f.u,
        h_enum: f.h,
        eps: eps.clone(),
    })
}

impl LdPreconditioner {
    /// Wraps a given nonsingular `B'` with its triangular form. `M` and `C`
    /// are left empty; only window geometry is meaningful.
    pub fn from_b_prime(b_prime: &RatMatrix) -> Result<Self> {
        let k = b_prime.rows();
        if !b_prime.is_square() {
            return Err(Error::InvalidShape("B' must be square".into()));
        }
        let delta = crate::linalg::det(b_prime)?.abs();
        if delta.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let f = hnf(b_prime)?;
        Ok(LdPreconditioner {
            basis: BasisSelection {
                indices: Vec::new(),
                det_abs: delta.clone(),
            },
            c: RatMatrix::identity(k),
            b_prime: b_prime.clone(),
            delta,
            m: RatMatrix::zeros(k, 0),
            u: f.u,
            h_enum: f.h,
            eps: BigRational::zero(),
        })
    }

    pub fn k(&self) -> usize {
        self.b_prime.rows()
    }

    /// Largest squared Euclidean norm over the columns of `M`.
    pub fn max_column_norm_sq(&self) -> BigRational {
        (0..self.m.cols())
            .map(|j| self.m.column(j).iter().map(|v| v * v).sum::<BigRational>())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn min_h_diagonal(&self) -> BigRational {
        (0..self.k())
            .map(|i| self.h_enum.get(i, i).clone())
            .min()
            .expect("k >= 1")
    }
}

/// Replaces `C` by a dyadic upper triangular matrix with small denominators,
/// shrunk so that containment still holds exactly, provided the determinant
/// drops by at most `e^{-budget}`. Keeps `C` unchanged otherwise.
fn coarsen(c: &RatMatrix, pts: &PointSet, budget: &BigRational) -> RatMatrix {
    let k = c.rows();
    let det_c = (0..k).fold(BigRational::one(), |acc, i| acc * c.get(i, i));
    let floor = exp_lower(&-budget.clone()) * &det_c;
    for bits in COARSEN_BITS {
        let scale = BigInt::one() << bits;
        let mut d = RatMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let x = c.get(i, j) * BigRational::from_integer(scale.clone());
                let v = if i == j { x.floor() } else { x.round() };
                d.set(i, j, v / BigRational::from_integer(scale.clone()));
            }
        }
        if (0..k).any(|i| !d.get(i, i).is_positive()) {
            continue;
        }
        let ctc = d.transpose().mul(&d).expect("square");
        let s = pts.max_form(&ctc);
        if s > BigRational::one() {
            // lambda = isqrt(floor(4^bits / s)) / 2^bits has lambda^2 <= 1/s
            let q = (BigRational::from_integer(&scale * &scale) / &s)
                .floor()
                .to_integer();
            let lambda = BigRational::new(q.sqrt(), scale.clone());
            d = d.scale(&lambda);
        }
        let det_d = (0..k).fold(BigRational::one(), |acc, i| acc * d.get(i, i));
        if det_d >= floor {
            return d;
        }
    }
    c.clone()
}

/// `det(G^T G)` for the column matrix `G`: the squared volume of the
/// parallelepiped spanned by its columns.
fn gram_det(g: &IntMatrix) -> BigInt {
    det_int(&g.transpose().mul(g).expect("shapes agree")).expect("square")
}
