//! Real numbers with certified comparison.
//!
//! A [`RealScalar`] is exact (rational or quadratic surd) whenever the
//! operands allow it. Mixed fields, transcendental constants and inputs known
//! only to finite precision fall back to an interval-backed value that can be
//! re-evaluated at any precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::{atan_rational, pi_interval, Interval};
use super::{BigRational, NumericError, QuadSurd};

/// Refinement policy for certified comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    /// Precision of the first enclosure, in bits.
    pub start_bits: u32,
    /// Hard cap; comparisons that need more are reported as unresolved.
    pub max_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: 64,
            max_bits: 4096,
        }
    }
}

impl Precision {
    pub fn with_max_bits(max_bits: u32) -> Self {
        Precision {
            start_bits: 64.min(max_bits.max(1)),
            max_bits: max_bits.max(1),
        }
    }

    /// Number of doublings from `start_bits` until the cap is reached.
    pub fn budget(&self) -> u32 {
        let mut bits = self.start_bits.max(1);
        let mut steps = 0;
        while bits < self.max_bits {
            bits = bits.saturating_mul(2);
            steps += 1;
        }
        steps
    }

    fn bits_at(&self, step: u32) -> u32 {
        let shifted = (self.start_bits.max(1) as u64) << step.min(32);
        shifted.min(self.max_bits as u64) as u32
    }
}

/// Source of enclosures for an interval-backed real.
pub trait Approximator: Send + Sync + fmt::Debug {
    /// An enclosure of the value, of width at most `2^-bits` when the source
    /// can refine that far.
    fn approx(&self, bits: u32) -> Result<Interval, NumericError>;
}

#[derive(Debug)]
struct Memo {
    source: Box<dyn Approximator>,
    /// Finest enclosure computed so far and the precision it was asked for.
    best: Mutex<Option<(u32, Interval)>>,
}

/// An interval-backed real: a shared refinement procedure that remembers
/// its finest enclosure, so nested expressions are not re-evaluated.
#[derive(Clone, Debug)]
pub struct IntervalReal {
    source: Arc<Memo>,
}

impl IntervalReal {
    pub fn new(source: impl Approximator + 'static) -> Self {
        IntervalReal {
            source: Arc::new(Memo {
                source: Box::new(source),
                best: Mutex::new(None),
            }),
        }
    }

    /// A known enclosure that cannot be refined further (decimal input).
    pub fn fixed(lo: BigRational, hi: BigRational) -> Self {
        Self::new(Fixed(Interval::new(lo, hi)))
    }

    pub fn approx(&self, bits: u32) -> Result<Interval, NumericError> {
        let memo = &self.source;
        if let Some((b, iv)) = memo.best.lock().expect("enclosure cache poisoned").as_ref() {
            if *b >= bits {
                return Ok(iv.clone());
            }
        }
        let iv = memo.source.approx(bits)?;
        let mut best = memo.best.lock().expect("enclosure cache poisoned");
        if best.as_ref().is_none_or(|(b, _)| *b < bits) {
            *best = Some((bits, iv.clone()));
        }
        Ok(iv)
    }
}

/// A real scalar: exact rational, exact quadratic surd, or interval-backed.
#[derive(Clone, Debug)]
pub enum RealScalar {
    Rational(BigRational),
    Surd(QuadSurd),
    Interval(IntervalReal),
}

impl From<BigRational> for RealScalar {
    fn from(x: BigRational) -> Self {
        RealScalar::Rational(x)
    }
}

impl From<QuadSurd> for RealScalar {
    fn from(s: QuadSurd) -> Self {
        match s.to_rational() {
            Some(x) => RealScalar::Rational(x),
            None => RealScalar::Surd(s),
        }
    }
}

impl From<i64> for RealScalar {
    fn from(n: i64) -> Self {
        RealScalar::Rational(BigRational::from_integer(n.into()))
    }
}

impl From<&BigInt> for RealScalar {
    fn from(n: &BigInt) -> Self {
        RealScalar::Rational(BigRational::from_integer(n.clone()))
    }
}

#[derive(Debug)]
struct Fixed(Interval);

impl Approximator for Fixed {
    fn approx(&self, _bits: u32) -> Result<Interval, NumericError> {
        Ok(self.0.clone())
    }
}

#[derive(Debug)]
struct Sum(RealScalar, RealScalar);

impl Approximator for Sum {
    fn approx(&self, bits: u32) -> Result<Interval, NumericError> {
        let a = self.0.approx(bits + 2)?;
        let b = self.1.approx(bits + 2)?;
        Ok(a.add(&b).round_outward(bits + 2))
    }
}

#[derive(Debug)]
struct Negated(RealScalar);

impl Approximator for Negated {
    fn approx(&self, bits: u32) -> Result<Interval, NumericError> {
        Ok(self.0.approx(bits)?.neg())
    }
}

fn extra_bits(mag: i64) -> u32 {
    if mag <= 0 {
        0
    } else {
        mag.min(u32::MAX as i64 / 4) as u32
    }
}

#[derive(Debug)]
struct Product(RealScalar, RealScalar);

impl Approximator for Product {
    fn approx(&self, bits: u32) -> Result<Interval, NumericError> {
        // width(ab) <= |a| w_b + |b| w_a + w_a w_b
        let a0 = self.0.approx(2)?;
        let b0 = self.1.approx(2)?;
        let ka = extra_bits(a0.magnitude_bits());
        let kb = extra_bits(b0.magnitude_bits());
        let a = self.0.approx(bits + kb + 3)?;
        let b = self.1.approx(bits + ka + 3)?;
        let a = a.intersect(&a0).unwrap_or(a);
        let b = b.intersect(&b0).unwrap_or(b);
        Ok(a.mul(&b).round_outward(bits + 3))
    }
}

#[derive(Debug)]
struct Reciprocal {
    inner: RealScalar,
    max_bits: u32,
}

impl Approximator for Reciprocal {
    fn approx(&self, bits: u32) -> Result<Interval, NumericError> {
        let mut probe = 8u32;
        let coarse = loop {
            let i = self.inner.approx(probe)?;
            if !i.contains_zero() {
                break i;
            }
            if probe >= self.max_bits.max(bits) {
                return Err(NumericError::Unresolved { bits: probe });
            }
            probe = probe.saturating_mul(2).min(self.max_bits.max(bits));
        };
        // |1/a - 1/b| <= |a - b| / m^2 where m bounds |x| from below
        let m = coarse.abs_min();
        let km = extra_bits(-super::interval::magnitude_bits(&m) + 1);
        let fine = self.inner.approx(bits + 2 * km + 2)?;
        let fine = fine.intersect(&coarse).unwrap_or(coarse);
        Ok(fine.recip()?.round_outward(bits + 2))
    }
}

#[derive(Debug)]
struct SquareRoot(RealScalar);

impl Approximator for SquareRoot {
    fn approx(&self, bits: u32) -> Result<Interval, NumericError> {
        // sqrt(h) - sqrt(l) <= sqrt(h - l)
        let i = self.0.approx(2 * bits + 6)?;
        i.sqrt(bits + 2)
    }
}

#[derive(Debug)]
struct Pi;

impl Approximator for Pi {
    fn approx(&self, bits: u32) -> Result<Interval, NumericError> {
        Ok(pi_interval(bits))
    }
}

#[derive(Debug)]
struct Arctan(RealScalar);

impl Approximator for Arctan {
    fn approx(&self, bits: u32) -> Result<Interval, NumericError> {
        // atan is increasing and 1-Lipschitz
        let i = self.0.approx(bits + 2)?;
        let lo = atan_rational(i.lo(), bits + 2);
        let hi = atan_rational(i.hi(), bits + 2);
        Ok(Interval::new(lo.lo().clone(), hi.hi().clone()))
    }
}

impl RealScalar {
    pub fn zero() -> Self {
        RealScalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        RealScalar::Rational(BigRational::one())
    }

    pub fn pi() -> Self {
        RealScalar::Interval(IntervalReal::new(Pi))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        RealScalar::Rational(BigRational::new(n.into(), d.into()))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, RealScalar::Interval(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            RealScalar::Rational(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_surd(&self) -> Option<QuadSurd> {
        match self {
            RealScalar::Rational(x) => Some(QuadSurd::from_rational(x)),
            RealScalar::Surd(s) => Some(s.clone()),
            RealScalar::Interval(_) => None,
        }
    }

    /// An enclosure of width at most `2^-bits` (best effort for fixed inputs).
    pub fn approx(&self, bits: u32) -> Result<Interval, NumericError> {
        match self {
            RealScalar::Rational(x) => Ok(Interval::point(x.clone())),
            RealScalar::Surd(s) => Ok(s.value_interval(bits)),
            RealScalar::Interval(i) => i.approx(bits),
        }
    }

    fn lazy(source: impl Approximator + 'static) -> Self {
        RealScalar::Interval(IntervalReal::new(source))
    }

    fn exact_binary(
        &self,
        other: &RealScalar,
        op: impl Fn(&QuadSurd, &QuadSurd) -> Option<QuadSurd>,
    ) -> Option<RealScalar> {
        let a = self.as_surd()?;
        let b = other.as_surd()?;
        op(&a, &b).map(RealScalar::from)
    }

    pub fn square(&self) -> RealScalar {
        self * self
    }

    pub fn abs(&self) -> RealScalar {
        match self {
            RealScalar::Rational(x) => RealScalar::Rational(x.abs()),
            RealScalar::Surd(s) if s.signum() == Ordering::Less => RealScalar::Surd(s.neg()),
            RealScalar::Surd(_) => self.clone(),
            RealScalar::Interval(_) => self.square().sqrt(),
        }
    }

    /// Quotient; exact divisors that are zero are rejected immediately,
    /// interval divisors fail lazily when they cannot be separated from zero.
    pub fn div(&self, other: &RealScalar) -> Result<RealScalar, NumericError> {
        self.div_with(other, Precision::default())
    }

    pub fn div_with(&self, other: &RealScalar, prec: Precision) -> Result<RealScalar, NumericError> {
        if let (Some(a), Some(b)) = (self.as_surd(), other.as_surd()) {
            if let Some(q) = a.checked_div(&b) {
                return q.map(RealScalar::from);
            }
        }
        Ok(self * &other.recip_with(prec)?)
    }

    pub fn recip_with(&self, prec: Precision) -> Result<RealScalar, NumericError> {
        match self.as_surd() {
            Some(s) => s.recip().map(RealScalar::from),
            None => Ok(RealScalar::lazy(Reciprocal {
                inner: self.clone(),
                max_bits: prec.max_bits,
            })),
        }
    }

    /// Non-negative square root; exact for perfect-square rationals and for
    /// rationals whose square root is a surd.
    pub fn sqrt(&self) -> RealScalar {
        if let RealScalar::Rational(x) = self {
            if !x.is_negative() {
                // √(n/d) = √(n d) / d
                if let Ok(s) = QuadSurd::new(
                    BigInt::zero(),
                    BigInt::one(),
                    x.numer() * x.denom(),
                    x.denom().clone(),
                ) {
                    return RealScalar::from(s);
                }
            }
        }
        RealScalar::lazy(SquareRoot(self.clone()))
    }

    pub fn atan(&self) -> RealScalar {
        if let RealScalar::Rational(x) = self {
            if x.is_zero() {
                return RealScalar::zero();
            }
        }
        RealScalar::lazy(Arctan(self.clone()))
    }

    /// Floor of the value; exact for exact variants, certified by refinement
    /// otherwise.
    pub fn floor_with(&self, prec: Precision) -> Result<BigInt, NumericError> {
        match self {
            RealScalar::Rational(x) => Ok(x.floor().to_integer()),
            RealScalar::Surd(s) => Ok(s.floor()),
            RealScalar::Interval(_) => {
                for step in 0..=prec.budget() {
                    let bits = prec.bits_at(step);
                    let i = self.approx(bits)?;
                    let lo = i.lo().floor().to_integer();
                    let hi = i.hi().floor().to_integer();
                    if lo == hi {
                        return Ok(lo);
                    }
                    if bits >= prec.max_bits {
                        break;
                    }
                }
                Err(NumericError::Unresolved {
                    bits: prec.max_bits,
                })
            }
        }
    }

    /// Decimal rendering of an approximation, `digits` places after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let bits = (digits as f64 * 3.33).ceil() as u32 + 16;
        let mid = match self.approx(bits) {
            Ok(i) => i.midpoint(),
            Err(_) => return "nan".to_string(),
        };
        format_decimal(&mid, digits)
    }

    /// Rough floating-point view, for display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        self.approx(64)
            .ok()
            .and_then(|i| i.midpoint().to_f64())
            .unwrap_or(f64::NAN)
    }
}

pub(crate) fn format_decimal(x: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = x * BigRational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let neg = rounded.is_negative();
    let abs = rounded.abs();
    let int_part = &abs / &scale;
    let frac_part = &abs % &scale;
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{:0>width$}",
            frac_part.to_string(),
            width = digits
        )
    }
}

impl Add for &RealScalar {
    type Output = RealScalar;
    fn add(self, other: &RealScalar) -> RealScalar {
        self.exact_binary(other, |a, b| a.checked_add(b))
            .unwrap_or_else(|| RealScalar::lazy(Sum(self.clone(), other.clone())))
    }
}

impl Sub for &RealScalar {
    type Output = RealScalar;
    fn sub(self, other: &RealScalar) -> RealScalar {
        self.exact_binary(other, |a, b| a.checked_sub(b))
            .unwrap_or_else(|| RealScalar::lazy(Sum(self.clone(), -other)))
    }
}

impl Mul for &RealScalar {
    type Output = RealScalar;
    fn mul(self, other: &RealScalar) -> RealScalar {
        self.exact_binary(other, |a, b| a.checked_mul(b))
            .unwrap_or_else(|| RealScalar::lazy(Product(self.clone(), other.clone())))
    }
}

impl Neg for &RealScalar {
    type Output = RealScalar;
    fn neg(self) -> RealScalar {
        match self {
            RealScalar::Rational(x) => RealScalar::Rational(-x),
            RealScalar::Surd(s) => RealScalar::Surd(s.neg()),
            RealScalar::Interval(_) => RealScalar::lazy(Negated(self.clone())),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RealScalar {
            type Output = RealScalar;
            fn $m(self, other: RealScalar) -> RealScalar {
                (&self).$m(&other)
            }
        }
        impl $tr<&RealScalar> for RealScalar {
            type Output = RealScalar;
            fn $m(self, other: &RealScalar) -> RealScalar {
                (&self).$m(other)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RealScalar {
    type Output = RealScalar;
    fn neg(self) -> RealScalar {
        -&self
    }
}

impl fmt::Display for RealScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealScalar::Rational(x) => write!(f, "{x}"),
            RealScalar::Surd(s) => write!(f, "{s}"),
            RealScalar::Interval(i) => match i.approx(64) {
                Ok(e) => write!(f, "{}", format_decimal(&e.midpoint(), 12)),
                Err(e) => write!(f, "<{e}>"),
            },
        }
    }
}

/// Certified comparison of `x` and `y`.
///
/// Exact representations in a common field are compared exactly. Otherwise the
/// difference is enclosed at `prec.start_bits`, then at doubled precision for
/// up to `budget` further steps (never beyond `prec.max_bits`). `Equal` is
/// only ever returned from an exact comparison.
pub fn compare_certified(
    x: &RealScalar,
    y: &RealScalar,
    budget: u32,
    prec: Precision,
) -> Result<Ordering, NumericError> {
    if let (Some(a), Some(b)) = (x.as_surd(), y.as_surd()) {
        if let Some(o) = a.checked_cmp(&b) {
            return Ok(o);
        }
    }
    let diff = x - y;
    let mut last = prec.start_bits;
    for step in 0..=budget {
        let bits = prec.bits_at(step);
        last = bits;
        if let Some(o) = diff.approx(bits)?.strict_sign() {
            return Ok(o);
        }
        if bits >= prec.max_bits {
            break;
        }
    }
    Err(NumericError::Unresolved { bits: last })
}

/// [`compare_certified`] with the full refinement budget of `prec`.
pub fn cmp_real(x: &RealScalar, y: &RealScalar, prec: Precision) -> Result<Ordering, NumericError> {
    compare_certified(x, y, prec.budget(), prec)
}

/// Certified `x < y`.
pub fn certify_lt(x: &RealScalar, y: &RealScalar, prec: Precision) -> Result<bool, NumericError> {
    Ok(cmp_real(x, y, prec)? == Ordering::Less)
}

/// Rational enclosure bounds of a real at `bits`, convenience for callers that
/// need an integer window around the value.
pub fn dyadic_bracket(x: &RealScalar, bits: u32) -> Result<(BigRational, BigRational), NumericError> {
    Ok(x.approx(bits)?.into_bounds())
}

#[cfg(test)]
fn unit_bits(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), super::interval::pow2(bits))
}
