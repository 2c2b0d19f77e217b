//! Closed intervals with exact rational endpoints.
//!
//! Endpoints are kept small by rounding outward onto the dyadic grid
//! `2^-bits` after each composite operation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{BigRational, NumericError};

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

pub(crate) fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn floor_ratio(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

fn ceil_ratio(x: &BigRational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Largest dyadic `m / 2^bits` not exceeding `x`.
pub(crate) fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let scale = pow2(bits);
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(floor_ratio(&scaled), scale)
}

/// Smallest dyadic `m / 2^bits` not below `x`.
pub(crate) fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let scale = pow2(bits);
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(ceil_ratio(&scaled), scale)
}

/// Smallest `k` with `|x| <= 2^k`; `i64::MIN` for zero.
pub(crate) fn magnitude_bits(x: &BigRational) -> i64 {
    if x.is_zero() {
        return i64::MIN;
    }
    let n = x.numer().abs();
    let d = x.denom();
    // 2^(bn-1) <= n < 2^bn and 2^(bd-1) <= d < 2^bd, so n/d < 2^(bn-bd+1)
    let k = n.bits() as i64 - d.bits() as i64 + 1;
    // tighten by one step when possible
    let bound = if k >= 1 {
        BigRational::from_integer(pow2((k - 1) as u32))
    } else {
        BigRational::new(BigInt::one(), pow2((1 - k) as u32))
    };
    if x.abs() <= bound {
        k - 1
    } else {
        k
    }
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn into_bounds(self) -> (BigRational, BigRational) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Sign of every member, if they all agree and none is zero.
    pub fn strict_sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Upper bound on `|x|` for every member.
    pub fn abs_max(&self) -> BigRational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    /// Lower bound on `|x|` for every member (zero when the interval straddles zero).
    pub fn abs_min(&self) -> BigRational {
        if self.contains_zero() {
            BigRational::zero()
        } else if self.lo.is_positive() {
            self.lo.clone()
        } else {
            self.hi.abs()
        }
    }

    /// Smallest `k` with every member bounded by `2^k` in absolute value.
    pub fn magnitude_bits(&self) -> i64 {
        magnitude_bits(&self.abs_max())
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        (lo <= hi).then(|| Interval::new(lo.clone(), hi.clone()))
    }

    pub fn round_outward(&self, bits: u32) -> Interval {
        Interval {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn scale(&self, k: &BigRational) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn square(&self) -> Interval {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        let hi = if a > b { a.clone() } else { b.clone() };
        let lo = if self.contains_zero() {
            BigRational::zero()
        } else if a < b {
            a
        } else {
            b
        };
        Interval { lo, hi }
    }

    pub fn recip(&self) -> Result<Interval, NumericError> {
        if self.contains_zero() {
            return Err(NumericError::DivisionByZero);
        }
        Ok(Interval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    /// Outward-rounded square root on the grid `2^-bits`.
    ///
    /// Negative lower endpoints are clamped to zero; an interval lying
    /// entirely below zero is an error.
    pub fn sqrt(&self, bits: u32) -> Result<Interval, NumericError> {
        if self.hi.is_negative() {
            return Err(NumericError::NegativeSqrt);
        }
        let four_pow = BigRational::from_integer(pow2(2 * bits));
        let lo = if self.lo.is_positive() {
            floor_ratio(&(&self.lo * &four_pow)).sqrt()
        } else {
            BigInt::zero()
        };
        let hi_scaled = ceil_ratio(&(&self.hi * &four_pow));
        let mut hi = hi_scaled.sqrt();
        if &hi * &hi < hi_scaled {
            hi += 1;
        }
        let den = pow2(bits);
        Ok(Interval {
            lo: BigRational::new(lo, den.clone()),
            hi: BigRational::new(hi, den),
        })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Enclosure of `atan(y)` for `|y| <= 1/2` via the alternating Taylor series.
fn atan_series(y: &BigRational, bits: u32) -> Interval {
    let work = bits + 16;
    let y_int = Interval::point(y.clone());
    let y_sq = y_int.square().round_outward(work);
    let mut power = y_int.round_outward(work);
    let mut sum = Interval::point(BigRational::zero());
    let tol = BigRational::new(BigInt::one(), pow2(bits + 4));
    let mut k: i64 = 0;
    loop {
        let term = power.scale(&rat(1, 2 * k + 1));
        if term.abs_max() < tol {
            // remainder of an alternating series is bounded by its first omitted term
            let slack = term.abs_max();
            sum = Interval::new(&sum.lo - &slack, &sum.hi + &slack);
            return sum.round_outward(bits + 2);
        }
        sum = if k % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
        sum = sum.round_outward(work);
        power = power.mul(&y_sq).round_outward(work);
        k += 1;
    }
}

/// Enclosure of pi with width at most `2^-bits`.
pub fn pi_interval(bits: u32) -> Interval {
    // pi = 16 atan(1/5) - 4 atan(1/239)
    let work = bits + 8;
    let a = atan_series(&rat(1, 5), work).scale(&rat(16, 1));
    let b = atan_series(&rat(1, 239), work).scale(&rat(4, 1));
    a.sub(&b).round_outward(bits + 2)
}

/// Enclosure of `atan(x)` for an exact rational `x`, width at most `2^-bits`.
pub fn atan_rational(x: &BigRational, bits: u32) -> Interval {
    if x.is_negative() {
        return atan_rational(&-x, bits).neg();
    }
    let half = rat(1, 2);
    let work = bits + 4;
    if x > &BigRational::one() {
        // atan(x) = pi/2 - atan(1/x)
        let half_pi = pi_interval(work).scale(&half);
        return half_pi.sub(&atan_rational(&x.recip(), work)).round_outward(bits + 2);
    }
    if x > &half {
        // atan(x) = atan(1/2) + atan((x - 1/2) / (1 + x/2))
        let y = (x - &half) / (BigRational::one() + x * &half);
        return atan_series(&half, work)
            .add(&atan_series(&y, work))
            .round_outward(bits + 2);
    }
    atan_series(x, bits)
}
