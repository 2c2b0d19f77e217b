//! Exact quadratic irrationals `(p + q√d) / r`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::interval::{pow2, Interval};
use super::{BigRational, NumericError};

/// The number `(p + q√d) / r` in canonical form: `r > 0`, `d` square-free,
/// `gcd(p, q, r) = 1`. A rational value has `q = 0` and `d = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    r: BigInt,
}

/// Trial division bound for [`square_free_split`].
const TRIAL_LIMIT: u32 = 1 << 16;

/// Splits `n > 0` into `(s, f)` with `n = s^2 * f`.
///
/// `f` is square-free unless `n` has a repeated prime factor above
/// `TRIAL_LIMIT` and the cofactor left after trial division is not a square.
fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        if p > BigInt::from(TRIAL_LIMIT) {
            let root = rest.sqrt();
            if &root * &root == rest {
                return (square * root, free);
            }
            break;
        }
        let mut count = 0u32;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            count += 1;
        }
        for _ in 0..count / 2 {
            square *= &p;
        }
        if count % 2 == 1 {
            free *= &p;
        }
        p += 1;
    }
    (square, free * rest)
}

impl QuadSurd {
    /// Builds `(p + q√d) / r`, extracting square factors from `d`.
    pub fn new(p: BigInt, q: BigInt, d: BigInt, r: BigInt) -> Result<Self, NumericError> {
        if r.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        if d.is_negative() {
            return Err(NumericError::NegativeSqrt);
        }
        let (p, q, d) = if d.is_zero() || q.is_zero() {
            (p, BigInt::zero(), BigInt::one())
        } else {
            let (s, f) = square_free_split(&d);
            if f.is_one() {
                (p + q * s, BigInt::zero(), BigInt::one())
            } else {
                (p, q * s, f)
            }
        };
        Ok(Self::canonical(p, q, d, r))
    }

    pub fn from_rational(x: &BigRational) -> Self {
        QuadSurd {
            p: x.numer().clone(),
            q: BigInt::zero(),
            d: BigInt::one(),
            r: x.denom().clone(),
        }
    }

    /// `√n` for a non-negative integer `n`.
    pub fn sqrt_of(n: i64) -> Result<Self, NumericError> {
        Self::new(BigInt::zero(), BigInt::one(), BigInt::from(n), BigInt::one())
    }

    /// `d` is already square-free.
    fn canonical(mut p: BigInt, mut q: BigInt, d: BigInt, mut r: BigInt) -> Self {
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        let d = if q.is_zero() { BigInt::one() } else { d };
        QuadSurd { p, q, d, r }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.p.clone(), self.r.clone()))
    }

    /// Both values live in a common field `Q(√d)`.
    pub fn compatible(&self, other: &QuadSurd) -> bool {
        self.is_rational() || other.is_rational() || self.d == other.d
    }

    fn common_d(&self, other: &QuadSurd) -> BigInt {
        if self.is_rational() {
            other.d.clone()
        } else {
            self.d.clone()
        }
    }

    pub fn checked_add(&self, other: &QuadSurd) -> Option<QuadSurd> {
        if !self.compatible(other) {
            return None;
        }
        let d = self.common_d(other);
        Some(Self::canonical(
            &self.p * &other.r + &other.p * &self.r,
            &self.q * &other.r + &other.q * &self.r,
            d,
            &self.r * &other.r,
        ))
    }

    pub fn checked_sub(&self, other: &QuadSurd) -> Option<QuadSurd> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &QuadSurd) -> Option<QuadSurd> {
        if !self.compatible(other) {
            return None;
        }
        let d = self.common_d(other);
        Some(Self::canonical(
            &self.p * &other.p + &self.q * &other.q * &d,
            &self.p * &other.q + &other.p * &self.q,
            d,
            &self.r * &other.r,
        ))
    }

    pub fn neg(&self) -> QuadSurd {
        QuadSurd {
            p: -&self.p,
            q: -&self.q,
            d: self.d.clone(),
            r: self.r.clone(),
        }
    }

    /// Multiplicative inverse via the conjugate.
    pub fn recip(&self) -> Result<QuadSurd, NumericError> {
        // (p + q√d)(p - q√d) = p^2 - q^2 d, nonzero unless the value is zero
        let norm = &self.p * &self.p - &self.q * &self.q * &self.d;
        if norm.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        Ok(Self::canonical(
            &self.r * &self.p,
            -(&self.r * &self.q),
            self.d.clone(),
            norm,
        ))
    }

    pub fn checked_div(&self, other: &QuadSurd) -> Option<Result<QuadSurd, NumericError>> {
        if !self.compatible(other) {
            return None;
        }
        Some(other.recip().map(|inv| self.checked_mul(&inv).expect("compatible")))
    }

    pub fn square(&self) -> QuadSurd {
        self.checked_mul(self).expect("a surd is compatible with itself")
    }

    /// Exact sign of the value.
    pub fn signum(&self) -> Ordering {
        let sp = self.p.sign();
        let sq = self.q.sign();
        use num_bigint::Sign::*;
        match (sp, sq) {
            (NoSign, NoSign) => Ordering::Equal,
            (Plus, NoSign) | (NoSign, Plus) | (Plus, Plus) => Ordering::Greater,
            (Minus, NoSign) | (NoSign, Minus) | (Minus, Minus) => Ordering::Less,
            _ => {
                // opposite signs: the larger of p^2 and q^2 d wins
                let pp = &self.p * &self.p;
                let qq = &self.q * &self.q * &self.d;
                let p_wins = pp > qq;
                match (p_wins, sp) {
                    (true, Plus) | (false, Minus) => Ordering::Greater,
                    _ => Ordering::Less,
                }
            }
        }
    }

    /// Exact comparison; `None` when the fields differ.
    pub fn checked_cmp(&self, other: &QuadSurd) -> Option<Ordering> {
        self.checked_sub(other).map(|d| d.signum())
    }

    /// `floor(q√d)` computed with integer square roots.
    fn floor_root_part(&self) -> BigInt {
        let qq_d = &self.q * &self.q * &self.d;
        let s = qq_d.sqrt();
        if self.q.is_negative() {
            if &s * &s == qq_d {
                -s
            } else {
                -s - 1
            }
        } else {
            s
        }
    }

    pub fn floor(&self) -> BigInt {
        (&self.p + self.floor_root_part()).div_floor(&self.r)
    }

    /// Enclosure with width at most `2^-bits`.
    pub fn value_interval(&self, bits: u32) -> Interval {
        if self.is_rational() {
            return Interval::point(BigRational::new(self.p.clone(), self.r.clone()));
        }
        let scale = pow2(bits);
        // floor(q√d · 2^bits) from the integer square root of q^2 d 4^bits
        let radicand = &self.q * &self.q * &self.d * &scale * &scale;
        let s = radicand.sqrt();
        let (lo_root, hi_root) = if self.q.is_negative() {
            (-(&s + BigInt::one()), -s)
        } else {
            (s.clone(), s + BigInt::one())
        };
        let den = &self.r * &scale;
        let base = &self.p * &scale;
        Interval::new(
            BigRational::new(&base + lo_root, den.clone()),
            BigRational::new(base + hi_root, den),
        )
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            if self.r.is_one() {
                return write!(f, "{}", self.p);
            }
            return write!(f, "{}/{}", self.p, self.r);
        }
        let sign = if self.q.is_negative() { '-' } else { '+' };
        write!(f, "({}{}{}*sqrt({}))", self.p, sign, self.q.abs(), self.d)?;
        if !self.r.is_one() {
            write!(f, "/{}", self.r)?;
        }
        Ok(())
    }
}
