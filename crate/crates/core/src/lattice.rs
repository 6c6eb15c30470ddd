//! Integer points of parallelepipeds `r + H [0, 1)^n` with `H` upper
//! triangular.
//!
//! Writing `x = r + H t`, the last coordinate only depends on `t_n`, the one
//! before on `t_{n-1}, t_n`, and so on. Once the coordinates after `i` are
//! fixed, `x_i` ranges over the integers of `[tau_i, tau_i + H_ii)` with
//! `tau_i = r_i + sum_{j > i} H_ij t_j`, which gives a digit-by-digit
//! enumeration with no rejected candidates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::RatMatrix;
use crate::{Error, Result};

/// Whether the faces `t_i = 1` belong to the parallelepiped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    HalfOpen,
    Closed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parallelepiped {
    h: RatMatrix,
    r: Vec<BigRational>,
    closure: Closure,
}

impl Parallelepiped {
    pub fn new(h: RatMatrix, r: Vec<BigRational>, closure: Closure) -> Result<Self> {
        if !h.is_square() || !h.is_upper_triangular() {
            return Err(Error::InvalidShape(
                "parallelepiped matrix must be upper triangular".into(),
            ));
        }
        if (0..h.rows()).any(|i| !h.get(i, i).is_positive()) {
            return Err(Error::InvalidShape(
                "parallelepiped diagonal must be positive".into(),
            ));
        }
        if r.len() != h.rows() {
            return Err(Error::DimMismatch(r.len(), h.rows()));
        }
        Ok(Parallelepiped { h, r, closure })
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn h(&self) -> &RatMatrix {
        &self.h
    }

    pub fn offset(&self) -> &[BigRational] {
        &self.r
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    /// Lazily enumerates the integer points, the last coordinate varying
    /// slowest.
    pub fn points(&self) -> PointIter<'_> {
        let n = self.dim();
        PointIter {
            p: self,
            x: vec![BigInt::zero(); n],
            hi: vec![BigInt::zero(); n],
            tau: vec![BigRational::zero(); n],
            t: vec![BigRational::zero(); n],
            started: false,
            done: false,
        }
    }

    /// Solves `H t = x - r` by back substitution and tests `t` against the
    /// unit cube.
    pub fn contains(&self, x: &[BigInt]) -> Result<bool> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimMismatch(x.len(), n));
        }
        let mut t = vec![BigRational::zero(); n];
        for i in (0..n).rev() {
            let mut v = BigRational::from_integer(x[i].clone()) - &self.r[i];
            for j in i + 1..n {
                v -= self.h.get(i, j) * &t[j];
            }
            v /= self.h.get(i, i);
            let inside = match self.closure {
                Closure::HalfOpen => !v.is_negative() && v < BigRational::one(),
                Closure::Closed => !v.is_negative() && v <= BigRational::one(),
            };
            if !inside {
                return Ok(false);
            }
            t[i] = v;
        }
        Ok(true)
    }
}

/// Convenience wrapper over [`Parallelepiped::points`].
pub fn enumerate_points(p: &Parallelepiped) -> PointIter<'_> {
    p.points()
}

pub struct PointIter<'a> {
    p: &'a Parallelepiped,
    x: Vec<BigInt>,
    hi: Vec<BigInt>,
    tau: Vec<BigRational>,
    t: Vec<BigRational>,
    started: bool,
    done: bool,
}

impl PointIter<'_> {
    fn init_level(&mut self, i: usize) {
        let n = self.p.dim();
        let mut tau = self.p.r[i].clone();
        for j in i + 1..n {
            tau += self.p.h.get(i, j) * &self.t[j];
        }
        let top = &tau + self.p.h.get(i, i);
        self.x[i] = tau.ceil().to_integer();
        self.hi[i] = match self.p.closure {
            Closure::HalfOpen => top.ceil().to_integer() - 1,
            Closure::Closed => top.floor().to_integer(),
        };
        self.tau[i] = tau;
    }

    fn set_t(&mut self, i: usize) {
        self.t[i] =
            (BigRational::from_integer(self.x[i].clone()) - &self.tau[i]) / self.p.h.get(i, i);
    }

    /// Moves to the next point, starting either by initializing level `i`
    /// or by incrementing it. Levels above `i` are left untouched.
    fn search(&mut self, mut i: usize, mut init: bool) -> bool {
        let n = self.p.dim();
        loop {
            if init {
                self.init_level(i);
            } else {
                self.x[i].inc();
            }
            if self.x[i] <= self.hi[i] {
                self.set_t(i);
                if i == 0 {
                    return true;
                }
                i -= 1;
                init = true;
            } else {
                if i + 1 == n {
                    return false;
                }
                i += 1;
                init = false;
            }
        }
    }
}

impl Iterator for PointIter<'_> {
    type Item = Vec<BigInt>;

    fn next(&mut self) -> Option<Vec<BigInt>> {
        if self.done {
            return None;
        }
        let n = self.p.dim();
        let found = if !self.started {
            self.started = true;
            if n == 0 {
                self.done = true;
                return Some(Vec::new());
            }
            self.search(n - 1, true)
        } else {
            self.search(0, false)
        };
        if found {
            Some(self.x.clone())
        } else {
            self.done = true;
            None
        }
    }
}
