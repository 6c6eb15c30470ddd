use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{IntMatrix, RatMatrix};
use crate::{Error, Result};

/// Factorization `m = u * h` of a nonsingular square matrix.
///
/// `u` is unimodular; `h` is upper triangular with a positive diagonal and
/// every entry above the diagonal reduced into `[0, h_jj)` of its column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnfResult {
    pub u: IntMatrix,
    pub h: RatMatrix,
}

/// Hermite normal form of a rational nonsingular matrix.
///
/// Denominators are cleared with their lcm `d`, the integer form of `d * m`
/// is computed, and `h` is divided by `d` again. `u` does not change under
/// the scaling.
pub fn hnf(m: &RatMatrix) -> Result<HnfResult> {
    if !m.is_square() {
        return Err(Error::InvalidShape("HNF of a non-square matrix".into()));
    }
    let (scaled, d) = super::clear_denominators(m);
    let (u, h) = hnf_int(&scaled)?;
    let inv_d = BigRational::new(BigInt::one(), d);
    let h = h.map(|x| BigRational::from_integer(x.clone()) * &inv_d);
    Ok(HnfResult { u, h })
}

/// Integer Hermite normal form by row operations with extended-gcd pivots.
/// Returns `(u, h)` with `m = u * h`.
pub fn hnf_int(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    if !m.is_square() {
        return Err(Error::InvalidShape("HNF of a non-square matrix".into()));
    }
    let n = m.rows();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(n);

    for j in 0..n {
        for i in j + 1..n {
            if h.get(i, j).is_zero() {
                continue;
            }
            let a = h.get(j, j).clone();
            let b = h.get(i, j).clone();
            let (g, s, t) = ext_gcd(&a, &b);
            let (ag, bg) = (&a / &g, &b / &g);
            // rows (j, i) <- E (rows j, i) with E = [[s, t], [-b/g, a/g]], det E = 1
            for c in 0..n {
                let hj = h.get(j, c).clone();
                let hi = h.get(i, c).clone();
                h.set(j, c, &s * &hj + &t * &hi);
                h.set(i, c, &ag * &hi - &bg * &hj);
            }
            // columns (j, i) of u <- u E^{-1}, E^{-1} = [[a/g, -t], [b/g, s]]
            for r in 0..n {
                let uj = u.get(r, j).clone();
                let ui = u.get(r, i).clone();
                u.set(r, j, &uj * &ag + &ui * &bg);
                u.set(r, i, &ui * &s - &uj * &t);
            }
        }
        if h.get(j, j).is_zero() {
            return Err(Error::SingularMatrix);
        }
        if h.get(j, j).is_negative() {
            for c in 0..n {
                let v = -h.get(j, c);
                h.set(j, c, v);
            }
            for r in 0..n {
                let v = -u.get(r, j);
                u.set(r, j, v);
            }
        }
    }

    for j in 0..n {
        let pivot = h.get(j, j).clone();
        for i in 0..j {
            let q = h.get(i, j).div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            for c in j..n {
                let v = h.get(i, c) - &q * h.get(j, c);
                h.set(i, c, v);
            }
            for r in 0..n {
                let v = u.get(r, j) + &q * u.get(r, i);
                u.set(r, j, v);
            }
        }
    }
    Ok((u, h))
}

/// `(g, s, t)` with `s a + t b = g = gcd(a, b) >= 0`.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{det, det_int, RatMatrix};
    use proptest::prelude::*;

    fn check_invariants(m: &RatMatrix, r: &HnfResult, integer_input: bool) {
        assert_eq!(&r.u.to_rational().mul(&r.h).unwrap(), m);
        assert_eq!(det_int(&r.u).unwrap().abs(), BigInt::one());
        assert!(r.h.is_upper_triangular());
        let n = m.rows();
        for j in 0..n {
            assert!(r.h.get(j, j).is_positive());
            if integer_input {
                for i in 0..j {
                    assert!(!r.h.get(i, j).is_negative());
                    assert!(r.h.get(i, j) < r.h.get(j, j));
                }
            }
        }
    }

    #[test]
    fn identity_is_its_own_hnf() {
        let id = RatMatrix::identity(3);
        let r = hnf(&id).unwrap();
        assert_eq!(r.u, IntMatrix::identity(3));
        assert_eq!(r.h, id);
    }

    #[test]
    fn permutation_matrix() {
        let m = RatMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        let r = hnf(&m).unwrap();
        check_invariants(&m, &r, true);
        assert_eq!(r.h, RatMatrix::identity(2));
    }

    #[test]
    fn determinant_ten() {
        let m = RatMatrix::from_i64_rows(&[vec![4, 1], vec![2, 3]]).unwrap();
        let r = hnf(&m).unwrap();
        check_invariants(&m, &r, true);
        assert_eq!(
            r.h.get(0, 0) * r.h.get(1, 1),
            BigRational::from_integer(10.into())
        );
        // the first pivot is the gcd of the first column
        assert_eq!(r.h.get(0, 0), &BigRational::from_integer(2.into()));
    }

    #[test]
    fn singular_is_rejected() {
        let m = RatMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(hnf(&m), Err(Error::SingularMatrix));
    }

    #[test]
    fn rational_input_keeps_diagonal_product() {
        let m = RatMatrix::from_rows(vec![
            vec![
                BigRational::new(1.into(), 2.into()),
                BigRational::new(1.into(), 3.into()),
            ],
            vec![
                BigRational::new((-2).into(), 5.into()),
                BigRational::from_integer(3.into()),
            ],
        ])
        .unwrap();
        let r = hnf(&m).unwrap();
        check_invariants(&m, &r, false);
        let prod = (0..2).fold(BigRational::one(), |acc, i| acc * r.h.get(i, i));
        assert_eq!(prod, det(&m).unwrap().abs());
    }

    proptest! {
        #[test]
        fn random_integer_matrices(n in 1usize..=4, seed in proptest::collection::vec(-9i64..=9, 16)) {
            let rows: Vec<Vec<i64>> = (0..n).map(|i| seed[i * n..(i + 1) * n].to_vec()).collect();
            let m = RatMatrix::from_i64_rows(&rows).unwrap();
            prop_assume!(!det(&m).unwrap().is_zero());
            let r = hnf(&m).unwrap();
            check_invariants(&m, &r, true);
        }
    }
}
