use num_bigint::BigInt;
use num_rational::BigRational;

use crate::linalg::{rank, IntMatrix, RatMatrix};
use crate::{Error, Result};

/// `max c^T x` subject to `A x = b`, `x >= 0` integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpInstance {
    a: Vec<Vec<i64>>,
    b: Vec<i64>,
    c: Vec<i64>,
}

impl IlpInstance {
    /// Validates shapes and full row rank.
    pub fn new(a: Vec<Vec<i64>>, b: Vec<i64>, c: Vec<i64>) -> Result<Self> {
        let k = a.len();
        if k == 0 {
            return Err(Error::InvalidShape(
                "instance needs at least one row".into(),
            ));
        }
        let n = a[0].len();
        if let Some(row) = a.iter().find(|r| r.len() != n) {
            return Err(Error::DimMismatch(row.len(), n));
        }
        if b.len() != k {
            return Err(Error::DimMismatch(b.len(), k));
        }
        if c.len() != n {
            return Err(Error::DimMismatch(c.len(), n));
        }
        let inst = IlpInstance { a, b, c };
        let r = rank(&inst.a_int());
        if r < k {
            return Err(Error::RankDeficient {
                rank: r,
                expected: k,
            });
        }
        Ok(inst)
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn a(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    pub fn c(&self) -> &[i64] {
        &self.c
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.a.iter().map(|row| row[j]).collect()
    }

    pub fn a_int(&self) -> IntMatrix {
        IntMatrix::from_i64_rows(&self.a).expect("rows validated")
    }

    pub fn a_rat(&self) -> RatMatrix {
        RatMatrix::from_i64_rows(&self.a).expect("rows validated")
    }

    pub fn b_rat(&self) -> Vec<BigRational> {
        self.b
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect()
    }

    pub fn c_rat(&self) -> Vec<BigRational> {
        self.c
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect()
    }

    /// Same matrix and objective with a new right-hand side.
    pub fn with_rhs(&self, b: Vec<i64>) -> Self {
        assert_eq!(b.len(), self.k());
        IlpInstance {
            a: self.a.clone(),
            b,
            c: self.c.clone(),
        }
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.a
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, v)| a * v).sum())
            .collect()
    }

    pub fn objective(&self, x: &[i64]) -> i64 {
        self.c.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// `A x = b` and `x >= 0`.
    pub fn is_feasible(&self, x: &[i64]) -> bool {
        x.len() == self.n() && x.iter().all(|&v| v >= 0) && self.apply(x) == self.b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Feasible,
    Infeasible,
    Unbounded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
        }
    }

    /// Whether the instance has an integer point.
    pub fn has_solution(self) -> bool {
        !matches!(self, Status::Infeasible)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub eta: u64,
    pub rho: u32,
    pub delta: Option<BigRational>,
    /// Number of stored states at each level, from the leaves to the root.
    pub level_sizes: Vec<usize>,
    /// Number of levels whose table was computed rather than reused.
    pub computed_levels: usize,
    pub shift_y: Vec<i64>,
    pub wall_ms: f64,
}

impl SolveStats {
    pub fn max_level(&self) -> usize {
        self.level_sizes.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    pub objective: Option<i64>,
    pub x: Option<Vec<i64>>,
    pub stats: SolveStats,
}
