//! Exact two-phase primal simplex for `max c^T x, A x = b, x >= 0` with
//! Bland's rule, so termination does not depend on degeneracy.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::RatMatrix;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    /// An optimal basic solution.
    pub x: Vec<BigRational>,
    pub objective: BigRational,
    /// Indices of the basic columns, one per row.
    pub basis: Vec<usize>,
    /// Optimal dual: `A^T y >= c` with equality on the basis.
    pub y: Vec<BigRational>,
}

struct Tableau {
    /// `rows x (cols + 1)`, the last column holds the right-hand side.
    t: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `obj^T x` over the columns allowed by `usable`.
    fn optimize(&mut self, obj: &[BigRational], usable: &dyn Fn(usize) -> bool) -> Result<()> {
        loop {
            // reduced cost of column j: obj_j - sum_r obj_{basis r} t[r][j]
            let entering = (0..self.cols).filter(|&j| usable(j)).find(|&j| {
                let mut rc = obj[j].clone();
                for (r, row) in self.t.iter().enumerate() {
                    if !row[j].is_zero() {
                        rc -= &obj[self.basis[r]] * &row[j];
                    }
                }
                rc.is_positive()
            });
            let Some(c) = entering else {
                return Ok(());
            };
            let rhs = self.cols;
            let mut best: Option<(BigRational, usize, usize)> = None;
            for (r, row) in self.t.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[rhs] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((b, _, bv)) => ratio < *b || (ratio == *b && self.basis[r] < *bv),
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, r, _)) = best else {
                return Err(Error::LpUnbounded);
            };
            self.pivot(r, c);
        }
    }
}

pub fn solve_lp(a: &RatMatrix, b: &[BigRational], c: &[BigRational]) -> Result<LpSolution> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimMismatch(b.len(), m));
    }
    if c.len() != n {
        return Err(Error::DimMismatch(c.len(), n));
    }
    // Columns: n structural, then m artificials.
    let cols = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i].is_negative() {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        let mut row: Vec<BigRational> = (0..n).map(|j| a.get(i, j) * &sign).collect();
        row.extend((0..m).map(|r| {
            if r == i {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        }));
        row.push(&b[i] * &sign);
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        cols,
    };

    let phase1: Vec<BigRational> = (0..cols)
        .map(|j| {
            if j < n {
                BigRational::zero()
            } else {
                -BigRational::one()
            }
        })
        .collect();
    tab.optimize(&phase1, &|_| true)?;
    if tab
        .t
        .iter()
        .zip(&tab.basis)
        .any(|(row, &bv)| bv >= n && !row[cols].is_zero())
    {
        return Err(Error::LpInfeasible);
    }
    // Drive remaining artificials out of the basis; rows without a
    // structural nonzero are redundant and dropped.
    let mut r = 0;
    while r < tab.t.len() {
        if tab.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[r][j].is_zero()) {
                tab.pivot(r, j);
            } else {
                tab.t.remove(r);
                tab.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    let mut obj: Vec<BigRational> = c.to_vec();
    obj.extend((0..m).map(|_| BigRational::zero()));
    tab.optimize(&obj, &|j| j < n)?;

    let mut x = vec![BigRational::zero(); n];
    for (row, &bv) in tab.t.iter().zip(&tab.basis) {
        x[bv] = row[cols].clone();
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    let basis = tab.basis.clone();
    let y = dual_from_basis(a, c, &basis).unwrap_or_else(|| vec![BigRational::zero(); m]);
    Ok(LpSolution {
        x,
        objective,
        basis,
        y,
    })
}

/// Solves `A_B^T y = c_B`; `None` when rows were dropped as redundant.
fn dual_from_basis(a: &RatMatrix, c: &[BigRational], basis: &[usize]) -> Option<Vec<BigRational>> {
    if basis.len() != a.rows() {
        return None;
    }
    let ab = a.select_columns(basis);
    let inv = crate::linalg::inverse(&ab.transpose()).ok()?;
    let cb: Vec<BigRational> = basis.iter().map(|&j| c[j].clone()).collect();
    inv.mul_vec(&cb).ok()
}
