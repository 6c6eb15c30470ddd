//! Exact dense linear algebra over arbitrary-precision integers and rationals.
//!
//! Matrices are small (a handful of rows), so everything is a plain row-major
//! `Vec`. Integer determinants and ranks use fraction-free (Bareiss)
//! elimination; rational matrices use ordinary Gaussian elimination since
//! `BigRational` keeps every entry in lowest terms anyway.

mod hnf;
mod ldl;

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

pub use hnf::{hnf, hnf_int, HnfResult};
pub use ldl::{ldl, LdlResult};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<BigRational>;

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidShape("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i)).all(|j| self.get(i, j).is_zero()))
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + Add<Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimMismatch(self.cols, rhs.rows));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j).clone() + a * rhs.get(l, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::DimMismatch(self.cols, v.len()));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect())
    }
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| BigRational::from_integer(x.clone()))
    }
}

impl RatMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Ok(IntMatrix::from_i64_rows(rows)?.to_rational())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        self.map(|x| x * s)
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.data
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

/// Exact determinant of an integer matrix by Bareiss elimination.
pub fn det_int(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::InvalidShape(
            "determinant of a non-square matrix".into(),
        ));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for p in 0..n {
        if a.get(p, p).is_zero() {
            match (p + 1..n).find(|&r| !a.get(r, p).is_zero()) {
                Some(r) => {
                    a.swap_rows(p, r);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in p + 1..n {
            for j in p + 1..n {
                let v = (a.get(i, j) * a.get(p, p) - a.get(i, p) * a.get(p, j)) / &prev;
                a.set(i, j, v);
            }
        }
        prev = a.get(p, p).clone();
    }
    Ok(sign * a.get(n - 1, n - 1))
}

/// Exact rank of an integer matrix by fraction-free elimination.
pub fn rank(m: &IntMatrix) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !a.get(r, col).is_zero()) else {
            continue;
        };
        a.swap_rows(rank, piv);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = (a.get(i, j) * a.get(rank, col) - a.get(i, col) * a.get(rank, j)) / &prev;
                a.set(i, j, v);
            }
            a.set(i, col, BigInt::zero());
        }
        prev = a.get(rank, col).clone();
        rank += 1;
    }
    rank
}

/// Rank of a rational matrix (rows scaled to integers first).
pub fn rank_rat(m: &RatMatrix) -> usize {
    rank(&clear_denominators(m).0)
}

/// Returns `(d * m, d)` where `d` is the lcm of all denominators of `m`.
pub fn clear_denominators(m: &RatMatrix) -> (IntMatrix, BigInt) {
    let d = m.denominator_lcm();
    let scaled = m.map(|x| (x * BigRational::from_integer(d.clone())).to_integer());
    (scaled, d)
}

/// Exact determinant of a rational matrix by Gaussian elimination.
pub fn det(m: &RatMatrix) -> Result<BigRational> {
    if !m.is_square() {
        return Err(Error::InvalidShape(
            "determinant of a non-square matrix".into(),
        ));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut acc = BigRational::one();
    for p in 0..n {
        let Some(piv) = (p..n).find(|&r| !a.get(r, p).is_zero()) else {
            return Ok(BigRational::zero());
        };
        if piv != p {
            a.swap_rows(p, piv);
            acc = -acc;
        }
        let pv = a.get(p, p).clone();
        acc *= &pv;
        for i in p + 1..n {
            if a.get(i, p).is_zero() {
                continue;
            }
            let f = a.get(i, p) / &pv;
            for j in p..n {
                let v = a.get(i, j) - &f * a.get(p, j);
                a.set(i, j, v);
            }
        }
    }
    Ok(acc)
}

/// Exact inverse by Gauss-Jordan elimination.
pub fn inverse(m: &RatMatrix) -> Result<RatMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidShape("inverse of a non-square matrix".into()));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = RatMatrix::identity(n);
    for p in 0..n {
        let piv = (p..n)
            .find(|&r| !a.get(r, p).is_zero())
            .ok_or(Error::SingularMatrix)?;
        a.swap_rows(p, piv);
        inv.swap_rows(p, piv);
        let pv = a.get(p, p).clone();
        for j in 0..n {
            let v = a.get(p, j) / &pv;
            a.set(p, j, v);
            let v = inv.get(p, j) / &pv;
            inv.set(p, j, v);
        }
        for i in 0..n {
            if i == p || a.get(i, p).is_zero() {
                continue;
            }
            let f = a.get(i, p).clone();
            for j in 0..n {
                let v = a.get(i, j) - &f * a.get(p, j);
                a.set(i, j, v);
                let v = inv.get(i, j) - &f * inv.get(p, j);
                inv.set(i, j, v);
            }
        }
    }
    Ok(inv)
}

/// `x^T m x` for a square rational matrix.
pub fn quadratic_form(m: &RatMatrix, x: &[BigRational]) -> Result<BigRational> {
    let mx = m.mul_vec(x)?;
    Ok(x.iter()
        .zip(&mx)
        .fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}
