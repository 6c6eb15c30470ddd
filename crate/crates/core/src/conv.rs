//! Boolean convolution of finitely supported 0/1 functions on `Z^k`, i.e.
//! the sumset of their supports.
//!
//! The fast path maps a vector `x` with `|x|_inf <= L` to the integer
//! `phi(x) = sum_i (x_i + L) q^i` with `q = 4L + 1`. Digits of
//! `phi(x) + phi(y)` are `x_i + y_i + 2L`, which lie in `[0, 4L]`, so no
//! carries occur and the Boolean convolution becomes a one-dimensional
//! sumset of codes. The convolution itself uses one radix `4 L_i + 1` per
//! axis, which is carry-free for the same reason. That sumset is computed by hashing, or by FFT over the
//! dense code range when the range is small compared to the number of pairs.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rustc_hash::FxHashSet;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Largest dense code range handed to the FFT backend.
pub const DENSE_LIMIT: u64 = 1 << 24;

/// Codes must fit `u64` with room for the sum of two of them.
const NATIVE_LIMIT: u128 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseBoolFn {
    dim: usize,
    support: Vec<Vec<i64>>,
    bound: u64,
}

impl SparseBoolFn {
    /// Builds a function from its support; duplicates are removed and the
    /// support is kept sorted.
    pub fn new(dim: usize, mut support: Vec<Vec<i64>>) -> Result<Self> {
        if let Some(p) = support.iter().find(|p| p.len() != dim) {
            return Err(Error::DimMismatch(p.len(), dim));
        }
        support.sort_unstable();
        support.dedup();
        let bound = support
            .iter()
            .flatten()
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0);
        Ok(SparseBoolFn {
            dim,
            support,
            bound,
        })
    }

    pub fn delta(dim: usize) -> Self {
        SparseBoolFn {
            dim,
            support: vec![vec![0; dim]],
            bound: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[Vec<i64>] {
        &self.support
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.support
            .binary_search_by(|p| p.as_slice().cmp(x))
            .is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Auto,
    Sparse,
    Dense,
}

/// The definition: all sums `y + z` over the two supports.
pub fn convolve_naive(a: &SparseBoolFn, b: &SparseBoolFn) -> Result<SparseBoolFn> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch(a.dim, b.dim));
    }
    let mut out = FxHashSet::default();
    for y in &a.support {
        for z in &b.support {
            out.insert(y.iter().zip(z).map(|(p, q)| p + q).collect::<Vec<i64>>());
        }
    }
    SparseBoolFn::new(a.dim, out.into_iter().collect())
}

/// `phi(x) = sum_i (x_i + L) q^i` with `q = 4L + 1`.
pub fn encode_base_q(x: &[i64], bound: u64) -> Result<BigInt> {
    if x.iter().any(|v| v.unsigned_abs() > bound) {
        return Err(Error::OutOfRange(x.to_vec(), bound));
    }
    let q = BigInt::from(4 * bound + 1);
    let l = BigInt::from(bound);
    Ok(x.iter()
        .rev()
        .fold(BigInt::zero(), |acc, &v| acc * &q + BigInt::from(v) + &l))
}

/// Inverse of the digit map with digit offset `offset`: digit `i` of `code`
/// in base `q = 4L + 1`, minus `offset`.
pub fn decode_base_q(code: &BigInt, bound: u64, dim: usize, offset: i64) -> Vec<i64> {
    let q = BigInt::from(4 * bound + 1);
    let mut rest = code.clone();
    (0..dim)
        .map(|_| {
            let d = &rest % &q;
            rest = &rest / &q;
            d.to_i64().expect("digit fits") - offset
        })
        .collect()
}

pub fn convolve_encoded(a: &SparseBoolFn, b: &SparseBoolFn) -> Result<SparseBoolFn> {
    convolve_encoded_with(a, b, Backend::Auto)
}

/// Convolution through the carry-free encoding with a chosen sumset
/// backend. A dense request falls back to hashing when the code range is
/// too large to allocate.
pub fn convolve_encoded_with(
    a: &SparseBoolFn,
    b: &SparseBoolFn,
    backend: Backend,
) -> Result<SparseBoolFn> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch(a.dim, b.dim));
    }
    let k = a.dim;
    if a.is_empty() || b.is_empty() {
        return SparseBoolFn::new(k, Vec::new());
    }
    // Mixed radix with q_i = 4 L_i + 1 per axis is carry-free digit by digit
    // and keeps the code range small for elongated supports.
    let bounds: Vec<u64> = (0..k)
        .map(|i| {
            a.support
                .iter()
                .chain(&b.support)
                .map(|x| x[i].unsigned_abs())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let radices: Vec<u128> = bounds.iter().map(|&l| 4 * u128::from(l) + 1).collect();
    let range = radices
        .iter()
        .try_fold(1u128, |acc, &q| acc.checked_mul(q))
        .filter(|&r| r <= NATIVE_LIMIT);
    let Some(range) = range else {
        return convolve_big(a, b, a.bound.max(b.bound));
    };
    let radices: Vec<u64> = radices.into_iter().map(|q| q as u64).collect();
    let range = range as u64;
    let enc = |f: &SparseBoolFn| -> Vec<u64> {
        f.support
            .iter()
            .map(|x| encode_mixed(x, &bounds, &radices))
            .collect()
    };
    let ea = enc(a);
    let eb = if a == b { ea.clone() } else { enc(b) };

    // The sum of two codes lies in [0, 2 * range).
    let span = 2 * range;
    let pairs = ea.len() as f64 * eb.len() as f64;
    let fft_cost = span as f64 * (span as f64).log2().max(1.0);
    let dense = match backend {
        Backend::Sparse => false,
        Backend::Dense => span <= DENSE_LIMIT,
        Backend::Auto => span <= DENSE_LIMIT && pairs > fft_cost,
    };
    let sums = if dense {
        sumset_fft(&ea, &eb, span as usize, a == b)
    } else {
        sumset_hash(&ea, &eb)
    };
    let support = sums
        .into_iter()
        .map(|s| decode_mixed(s, &bounds, &radices))
        .collect();
    SparseBoolFn::new(k, support)
}

/// `sum_i (x_i + L_i) prod_{l < i} q_l`.
fn encode_mixed(x: &[i64], bounds: &[u64], radices: &[u64]) -> u64 {
    x.iter()
        .zip(bounds)
        .zip(radices)
        .rev()
        .fold(0u64, |acc, ((&v, &l), &q)| acc * q + (v + l as i64) as u64)
}

/// Decodes a sum of two codes: digit `i` carries the offset `2 L_i`.
fn decode_mixed(mut code: u64, bounds: &[u64], radices: &[u64]) -> Vec<i64> {
    bounds
        .iter()
        .zip(radices)
        .map(|(&l, &q)| {
            let d = code % q;
            code /= q;
            d as i64 - 2 * l as i64
        })
        .collect()
}

fn sumset_hash(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = FxHashSet::default();
    for &x in a {
        for &y in b {
            out.insert(x + y);
        }
    }
    out.into_iter().collect()
}

/// Support of the product of the two 0/1 indicator polynomials. Products
/// of 0/1 vectors have integer coefficients bounded by the shorter support,
/// so rounding at 1/2 is exact for the sizes admitted here.
fn sumset_fft(a: &[u64], b: &[u64], span: usize, square: bool) -> Vec<u64> {
    let n = smooth_len(span);
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut fa = vec![Complex::new(0.0, 0.0); n];
    for &x in a {
        fa[x as usize].re = 1.0;
    }
    fwd.process(&mut fa);
    if square {
        for x in fa.iter_mut() {
            *x = *x * *x;
        }
    } else {
        let mut fb = vec![Complex::new(0.0, 0.0); n];
        for &y in b {
            fb[y as usize].re = 1.0;
        }
        fwd.process(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= y;
        }
    }
    inv.process(&mut fa);
    let scale = 1.0 / n as f64;
    fa.iter()
        .enumerate()
        .filter(|(_, v)| v.re * scale > 0.5)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Smallest `2^a 3^b >= len`; such lengths transform about as fast as
/// powers of two.
fn smooth_len(len: usize) -> usize {
    let mut best = len.next_power_of_two();
    let mut p3 = 1usize;
    while p3 < best {
        let mut n = p3;
        while n < len {
            n *= 2;
        }
        best = best.min(n);
        p3 *= 3;
    }
    best
}

/// Arbitrary-precision path for code ranges beyond the native width.
fn convolve_big(a: &SparseBoolFn, b: &SparseBoolFn, bound: u64) -> Result<SparseBoolFn> {
    let k = a.dim;
    let enc = |f: &SparseBoolFn| -> Result<Vec<BigInt>> {
        f.support.iter().map(|x| encode_base_q(x, bound)).collect()
    };
    let (ea, eb) = (enc(a)?, enc(b)?);
    let mut sums = FxHashSet::default();
    for x in &ea {
        for y in &eb {
            sums.insert(x + y);
        }
    }
    let offset = 2 * bound as i64;
    let support = sums
        .iter()
        .map(|s| decode_base_q(s, bound, k, offset))
        .collect();
    SparseBoolFn::new(k, support)
}
