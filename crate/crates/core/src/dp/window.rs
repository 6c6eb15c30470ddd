//! Windows `b / 2^j + 4 eta B' [-1, 1]^k` and the integer encodings used by
//! the dynamic program.
//!
//! With `N = d B'^{-1}` integral, `x` lies in the window for `j` iff every
//! coordinate of `N x` lies in
//! `[ceil((N b)_i / 2^j) - 4 eta d, floor((N b)_i / 2^j) + 4 eta d]`.
//! `N x` is linear in `x`, so the test for a sum of two states only adds
//! their stored images.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::lattice::{Closure, Parallelepiped};
use crate::linalg::{inverse, RatMatrix};
use crate::precond::LdPreconditioner;
use crate::{Error, Result};

/// Shift cap for `2^j`; `|N b|` is far below `2^100` for any encodable box.
const MAX_SHIFT: u32 = 100;
/// Bound on the volume of the global key box.
const KEY_LIMIT: u128 = 1 << 62;
/// Bound on `|N x|` over the key box, so that sums of two images fit `i64`.
const IMAGE_LIMIT: i128 = 1 << 61;

/// Exact window geometry in machine integers.
#[derive(Clone, Debug)]
pub struct WindowGeometry {
    k: usize,
    n_mat: Vec<Vec<i128>>,
    nb: Vec<i128>,
    radius: i128,
    lo: Vec<i64>,
    hi: Vec<i64>,
    b: Vec<i64>,
    /// Half-widths of the coordinate box of a window.
    reach: Vec<i64>,
    strides: Vec<u64>,
    zero_key: u64,
}

/// Integer bounds on `N x` describing one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowBounds {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl WindowBounds {
    pub fn contains_image(&self, w: &[i64]) -> bool {
        w.iter()
            .zip(&self.lo)
            .zip(&self.hi)
            .all(|((v, l), h)| l <= v && v <= h)
    }
}

impl WindowGeometry {
    pub fn new(pre: &LdPreconditioner, b: &[i64], eta: u64) -> Result<Self> {
        let k = pre.k();
        if b.len() != k {
            return Err(Error::DimMismatch(b.len(), k));
        }
        let b_inv = inverse(&pre.b_prime)?;
        let d = b_inv.denominator_lcm();
        let overflow = |what: &str| Error::Overflow(format!("window {what} exceeds 128 bits"));
        let n_mat: Vec<Vec<i128>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        (b_inv.get(i, j) * BigRational::from_integer(d.clone()))
                            .to_integer()
                            .to_i128()
                            .ok_or_else(|| overflow("matrix"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let d = d.to_i128().ok_or_else(|| overflow("denominator"))?;
        let radius = (4 * eta as i128)
            .checked_mul(d)
            .ok_or_else(|| overflow("radius"))?;
        let nb = mat_vec(&n_mat, b).ok_or_else(|| overflow("center"))?;

        // Coordinate box covering every window: centers run from 0 to b.
        let four_eta = BigRational::from_integer(BigInt::from(4 * eta));
        let mut lo = Vec::with_capacity(k);
        let mut hi = Vec::with_capacity(k);
        let mut reach = Vec::with_capacity(k);
        for i in 0..k {
            let r: BigRational = (0..k)
                .map(|l| pre.b_prime.get(i, l).abs())
                .sum::<BigRational>()
                * &four_eta;
            let r = r
                .ceil()
                .to_integer()
                .to_i64()
                .ok_or_else(|| overflow("box"))?;
            reach.push(r);
            lo.push(b[i].min(0) - r - 1);
            hi.push(b[i].max(0) + r + 1);
        }
        let mut strides = Vec::with_capacity(k);
        let mut vol: u128 = 1;
        for i in 0..k {
            strides.push(vol as u64);
            vol = vol.saturating_mul((hi[i] - lo[i] + 1) as u128);
            if vol > KEY_LIMIT {
                return Err(Error::Overflow(
                    "state box too large for 64-bit keys".into(),
                ));
            }
        }
        let image_max: i128 = n_mat
            .iter()
            .map(|row| {
                row.iter()
                    .zip(lo.iter().zip(&hi))
                    .map(|(a, (l, h))| a.abs() * (*l as i128).abs().max(*h as i128))
                    .sum()
            })
            .max()
            .unwrap_or(0);
        if image_max > IMAGE_LIMIT {
            return Err(overflow("image"));
        }
        let zero_key = (0..k).map(|i| (-lo[i]) as u64 * strides[i]).sum();
        Ok(WindowGeometry {
            k,
            n_mat,
            nb,
            radius,
            lo,
            hi,
            b: b.to_vec(),
            reach,
            strides,
            zero_key,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Bounds on `N x` for the window of index `j`.
    pub fn bounds(&self, j: u32) -> WindowBounds {
        let p = 1i128 << j.min(MAX_SHIFT);
        // Clamping keeps the test exact: images never leave [-2^61, 2^61].
        let clamp = |v: i128| v.clamp(-2 * IMAGE_LIMIT, 2 * IMAGE_LIMIT) as i64;
        let lo = self
            .nb
            .iter()
            .map(|v| clamp(Integer::div_ceil(v, &p) - self.radius))
            .collect();
        let hi = self
            .nb
            .iter()
            .map(|v| clamp(Integer::div_floor(v, &p) + self.radius))
            .collect();
        WindowBounds { lo, hi }
    }

    /// `N x`.
    /// Integer bounding box of the window for `j`, in state coordinates.
    pub fn coordinate_box(&self, j: u32) -> (Vec<i64>, Vec<i64>) {
        let p = 1i64 << j.min(62);
        let lo = (0..self.k)
            .map(|i| Integer::div_floor(&self.b[i], &p) - self.reach[i])
            .collect();
        let hi = (0..self.k)
            .map(|i| Integer::div_ceil(&self.b[i], &p) + self.reach[i])
            .collect();
        (lo, hi)
    }

    /// `N x`; exact for every `x` in the key box.
    pub fn image(&self, x: &[i64]) -> Vec<i64> {
        mat_vec(&self.n_mat, x)
            .expect("states are small")
            .into_iter()
            .map(|v| v as i64)
            .collect()
    }

    pub fn contains(&self, j: u32, x: &[i64]) -> bool {
        self.in_box(x) && self.bounds(j).contains_image(&self.image(x))
    }

    pub fn in_box(&self, x: &[i64]) -> bool {
        x.iter()
            .zip(&self.lo)
            .zip(&self.hi)
            .all(|((v, l), h)| l <= v && v <= h)
    }

    /// Mixed-radix key. Linear on the box: `key(x + y) = key(x) + key(y) -
    /// key(0)` whenever all three points lie in the box.
    pub fn encode(&self, x: &[i64]) -> u64 {
        debug_assert!(self.in_box(x));
        x.iter()
            .zip(&self.lo)
            .zip(&self.strides)
            .map(|((v, l), s)| (v - l) as u64 * s)
            .sum()
    }

    pub fn decode(&self, mut key: u64) -> Vec<i64> {
        let mut x = vec![0i64; self.k];
        for i in (0..self.k).rev() {
            let q = key / self.strides[i];
            key -= q * self.strides[i];
            x[i] = q as i64 + self.lo[i];
        }
        x
    }

    pub fn zero_key(&self) -> u64 {
        self.zero_key
    }
}

fn mat_vec(m: &[Vec<i128>], x: &[i64]) -> Option<Vec<i128>> {
    m.iter()
        .map(|row| {
            row.iter().zip(x).try_fold(0i128, |acc, (a, &v)| {
                acc.checked_add(a.checked_mul(v as i128)?)
            })
        })
        .collect()
}

/// All integer points of `b / 2^j + 4 eta B' [-1, 1]^k`, enumerated through
/// the triangular form `B' = U H`: with `x = U z`, the points `z` fill the
/// closed parallelepiped `U^{-1} (b / 2^j - 4 eta B' 1) + 8 eta H [0, 1]^k`.
pub fn build_window(
    j: u32,
    pre: &LdPreconditioner,
    b: &[i64],
    eta: u64,
) -> Result<Vec<Vec<BigInt>>> {
    let k = pre.k();
    if b.len() != k {
        return Err(Error::DimMismatch(b.len(), k));
    }
    let scale = BigRational::new(BigInt::one(), BigInt::one() << j);
    let four_eta = BigRational::from_integer(BigInt::from(4 * eta));
    let row_sums: Vec<BigRational> = (0..k)
        .map(|i| (0..k).map(|l| pre.b_prime.get(i, l).clone()).sum())
        .collect();
    let corner: Vec<BigRational> = (0..k)
        .map(|i| BigRational::from_integer(BigInt::from(b[i])) * &scale - &four_eta * &row_sums[i])
        .collect();
    let u = pre.u.to_rational();
    let u_inv = inverse(&u)?;
    let r = u_inv.mul_vec(&corner)?;
    let h: RatMatrix = pre
        .h_enum
        .scale(&(&four_eta * BigRational::from_integer(BigInt::from(2))));
    let p = Parallelepiped::new(h, r, Closure::Closed)?;
    let pts = p
        .points()
        .map(|z| {
            let zr: Vec<BigRational> = z.into_iter().map(BigRational::from_integer).collect();
            u.mul_vec(&zr)
                .map(|x| x.into_iter().map(|v| v.to_integer()).collect())
        })
        .collect::<Result<Vec<Vec<BigInt>>>>()?;
    Ok(pts)
}
