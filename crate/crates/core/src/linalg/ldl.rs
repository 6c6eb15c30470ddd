use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::RatMatrix;
use crate::{Error, Result};

/// `m = l^T diag(d) l` with `l` unit upper triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdlResult {
    pub l: RatMatrix,
    pub d: Vec<BigRational>,
}

impl LdlResult {
    pub fn reconstruct(&self) -> RatMatrix {
        let dl = RatMatrix::diagonal(&self.d)
            .mul(&self.l)
            .expect("square factors");
        self.l.transpose().mul(&dl).expect("square factors")
    }
}

/// Exact LDL factorization of a symmetric positive-definite matrix.
pub fn ldl(m: &RatMatrix) -> Result<LdlResult> {
    if !m.is_square() {
        return Err(Error::InvalidShape("LDL of a non-square matrix".into()));
    }
    let n = m.rows();
    for i in 0..n {
        for j in 0..i {
            if m.get(i, j) != m.get(j, i) {
                return Err(Error::InvalidShape("LDL of a non-symmetric matrix".into()));
            }
        }
    }
    // Work with the lower factor `low = l^T`, i.e. m = low * D * low^T.
    let mut low = RatMatrix::identity(n);
    let mut d: Vec<BigRational> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = m.get(j, j).clone();
        for p in 0..j {
            let ljp = low.get(j, p);
            dj -= ljp * ljp * &d[p];
        }
        if !dj.is_positive() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        for i in j + 1..n {
            let mut v = m.get(i, j).clone();
            for p in 0..j {
                v -= low.get(i, p) * low.get(j, p) * &d[p];
            }
            if !v.is_zero() {
                low.set(i, j, v / &dj);
            }
        }
        d.push(dj);
    }
    Ok(LdlResult {
        l: low.transpose(),
        d,
    })
}
