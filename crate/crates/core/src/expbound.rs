//! Rational enclosures of `exp(x)` so that inequalities involving `e^x` can
//! be decided exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Relative width of the enclosure; `2^-PRECISION_BITS`.
const PRECISION_BITS: u32 = 64;

/// Rational `l` with `l <= exp(x)`.
pub fn exp_lower(x: &BigRational) -> BigRational {
    if x.is_negative() {
        exp_upper(&-x).recip()
    } else {
        taylor(x).0
    }
}

/// Rational `u` with `exp(x) <= u`.
pub fn exp_upper(x: &BigRational) -> BigRational {
    if x.is_negative() {
        exp_lower(&-x).recip()
    } else {
        taylor(x).1
    }
}

/// Partial Taylor sum `s` of `exp(x)` for `x >= 0`, and `s` plus a bound on
/// the tail. Terms are added until the next one is negligible and smaller
/// than half the previous, at which point the tail is dominated by a
/// geometric series.
fn taylor(x: &BigRational) -> (BigRational, BigRational) {
    let tiny = BigRational::new(BigInt::one(), BigInt::one() << PRECISION_BITS);
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    let mut i = 1u64;
    loop {
        term = term * x / BigRational::from_integer(i.into());
        i += 1;
        let ratio = x / BigRational::from_integer(i.into());
        let small = &term <= &(&tiny * &sum);
        if small && ratio < BigRational::new(1.into(), 2.into()) {
            // tail = term * (x/i + x^2/(i(i+1)) + ...) <= term * r / (1 - r)
            let one = BigRational::one();
            let tail = &term * &ratio / (&one - &ratio);
            sum += &term;
            let upper = &sum + tail;
            return (sum, upper);
        }
        sum += &term;
        if term.is_zero() {
            return (sum.clone(), sum);
        }
    }
}
