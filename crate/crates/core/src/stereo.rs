//! Stereographic parametrization of rational points on the circle (`n = 1`)
//! and the 2-sphere (`n = 2`).
//!
//! A parameter `t = (b_1/q, …, b_n/q)` maps to the point
//! `(2 b_j q, q² − |b|²) / (q² + |b|²)`, reduced to lowest terms. The
//! antipode `(0, …, 0, −1)` is the image of the parameter at infinity
//! (`q = 0`).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::numeric::{cmp_real, BigRational, Precision, RealScalar};
use crate::{Error, Result};

fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::zero(), |g, v| g.gcd(v))
}

fn check_dim(n: usize) -> Result<()> {
    if n == 1 || n == 2 {
        Ok(())
    } else {
        Err(Error::precondition(format!("dimension {n} is not supported")))
    }
}

/// Parameter vector `(b_1, …, b_n) / q` with `gcd(q, b) = 1` and `q >= 1`,
/// or the parameter at infinity (`q = 0`, `gcd(b) = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StereoParam {
    #[serde(serialize_with = "crate::export::ser_bigints")]
    b: Vec<BigInt>,
    #[serde(serialize_with = "crate::export::ser_bigint")]
    q: BigInt,
}

impl StereoParam {
    /// Normalizes signs (`q >= 0`) and common factors.
    pub fn new(b: Vec<BigInt>, q: BigInt) -> Result<Self> {
        check_dim(b.len())?;
        let (mut b, mut q) = if q.is_negative() {
            (b.into_iter().map(|x| -x).collect::<Vec<_>>(), -q)
        } else {
            (b, q)
        };
        let g = gcd_all(b.iter().chain(std::iter::once(&q)));
        if g.is_zero() {
            return Err(Error::precondition("parameter (0, …, 0) / 0"));
        }
        if !g.is_one() {
            b.iter_mut().for_each(|x| *x /= &g);
            q /= &g;
        }
        if q.is_zero() {
            // every direction at infinity names the same point; keep the sign canonical
            if b.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                b.iter_mut().for_each(|x| *x = -&*x);
            }
        }
        Ok(StereoParam { b, q })
    }

    pub fn from_ints(b: &[i64], q: i64) -> Result<Self> {
        Self::new(b.iter().map(|&x| x.into()).collect(), q.into())
    }

    /// The one-dimensional parameter `t`.
    pub fn from_ratio(t: &BigRational) -> Self {
        StereoParam {
            b: vec![t.numer().clone()],
            q: t.denom().clone(),
        }
    }

    /// Parameter with common denominator from rational coordinates.
    pub fn from_ratios(t: &[BigRational]) -> Result<Self> {
        let den = t.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let b = t
            .iter()
            .map(|x| x.numer() * (&den / x.denom()))
            .collect();
        Self::new(b, den)
    }

    pub fn at_infinity(n: usize) -> Result<Self> {
        check_dim(n)?;
        let mut b = vec![BigInt::zero(); n];
        b[0] = BigInt::one();
        Ok(StereoParam { b, q: BigInt::zero() })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[BigInt] {
        &self.b
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn is_at_infinity(&self) -> bool {
        self.q.is_zero()
    }

    /// `|b|²`
    pub fn norm_sq(&self) -> BigInt {
        self.b.iter().map(|x| x * x).sum()
    }

    pub fn as_ratios(&self) -> Option<Vec<BigRational>> {
        (!self.is_at_infinity()).then(|| {
            self.b
                .iter()
                .map(|x| BigRational::new(x.clone(), self.q.clone()))
                .collect()
        })
    }
}

impl fmt::Display for StereoParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.b {
            write!(f, "{b} ")?;
        }
        write!(f, "{}", self.q)
    }
}

/// A rational point `(A_1, …, A_{n+1}) / Q` with `Σ A_i² = Q²` and
/// `gcd(Q, A) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SpherePoint {
    #[serde(serialize_with = "crate::export::ser_bigints")]
    coords: Vec<BigInt>,
    #[serde(serialize_with = "crate::export::ser_bigint")]
    denom: BigInt,
}

impl SpherePoint {
    pub fn new(coords: Vec<BigInt>, denom: BigInt) -> Result<Self> {
        check_dim(coords.len().saturating_sub(1))?;
        if !denom.is_positive() {
            return Err(Error::precondition("point denominator must be positive"));
        }
        let norm: BigInt = coords.iter().map(|a| a * a).sum();
        if norm != &denom * &denom {
            return Err(Error::precondition("coordinates are not on the unit sphere"));
        }
        if !gcd_all(coords.iter().chain(std::iter::once(&denom))).is_one() {
            return Err(Error::precondition("point is not in lowest terms"));
        }
        Ok(SpherePoint { coords, denom })
    }

    /// Reduces `(coords, denom)` to lowest terms with a positive denominator.
    pub fn from_raw(coords: Vec<BigInt>, denom: BigInt) -> Result<Self> {
        let mut g = gcd_all(coords.iter().chain(std::iter::once(&denom)));
        if g.is_zero() {
            return Err(Error::precondition("zero point"));
        }
        if denom.is_negative() {
            g = -g;
        }
        Self::new(coords.iter().map(|a| a / &g).collect(), denom / g)
    }

    pub fn from_ints(coords: &[i64], denom: i64) -> Result<Self> {
        Self::new(coords.iter().map(|&a| a.into()).collect(), denom.into())
    }

    /// `(0, …, 0, −1)` on the sphere of dimension `n`.
    pub fn antipode(n: usize) -> Self {
        let mut coords = vec![BigInt::zero(); n + 1];
        coords[n] = -BigInt::one();
        SpherePoint {
            coords,
            denom: BigInt::one(),
        }
    }

    /// Sphere dimension `n` (the point has `n + 1` coordinates).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn is_antipode(&self) -> bool {
        self.denom.is_one()
            && self.coords[self.dim()] == -BigInt::one()
            && self.coords[..self.dim()].iter().all(Zero::is_zero)
    }

    pub fn ratios(&self) -> Vec<BigRational> {
        self.coords
            .iter()
            .map(|a| BigRational::new(a.clone(), self.denom.clone()))
            .collect()
    }

    pub fn as_reals(&self) -> Vec<RealScalar> {
        self.ratios().into_iter().map(RealScalar::Rational).collect()
    }
}

impl Ord for SpherePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.denom
            .cmp(&other.denom)
            .then_with(|| self.coords.cmp(&other.coords))
    }
}

impl PartialOrd for SpherePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `A_1 … A_{n+1} Q`, space separated.
impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.coords {
            write!(f, "{a} ")?;
        }
        write!(f, "{}", self.denom)
    }
}

/// Image of a parameter on the sphere, in lowest terms.
pub fn forward(p: &StereoParam) -> SpherePoint {
    if p.is_at_infinity() {
        return SpherePoint::antipode(p.dim());
    }
    let q = &p.q;
    let qq = q * q;
    let bb = p.norm_sq();
    let mut coords: Vec<BigInt> = p.b.iter().map(|b| BigInt::from(2) * b * q).collect();
    coords.push(&qq - &bb);
    SpherePoint::from_raw(coords, qq + bb).expect("parametrized point lies on the sphere")
}

/// Reduced denominator of the circle point with parameter `b/q`:
/// `q² + b²` when `b` and `q` have different parity, `(q² + b²)/2` otherwise.
pub fn reduced_denominator_n1(b: &BigInt, q: &BigInt) -> Result<BigInt> {
    if !q.is_positive() || !b.gcd(q).is_one() {
        return Err(Error::precondition("need gcd(b, q) = 1 and q >= 1"));
    }
    let sum = q * q + b * b;
    if b.is_odd() == q.is_odd() {
        Ok(sum / 2)
    } else {
        Ok(sum)
    }
}

/// Upper bound `q + (b₁² + b₂²)/q` for the reduced denominator of the
/// 2-sphere point with parameter `(b₁, b₂)/q` when `q | b₁² + b₂²`.
pub fn denominator_bound_n2(b1: &BigInt, b2: &BigInt, q: &BigInt) -> Result<BigRational> {
    if !q.is_positive() {
        return Err(Error::precondition("q must be positive"));
    }
    let bb = b1 * b1 + b2 * b2;
    if !bb.is_multiple_of(q) {
        return Err(Error::precondition("b1^2 + b2^2 is not divisible by q"));
    }
    if !b1.gcd(b2).gcd(q).is_one() {
        return Err(Error::precondition("gcd(q, b1, b2) must be 1"));
    }
    let bound = BigRational::from_integer(q + &bb / q);
    let point = forward(&StereoParam::new(vec![b1.clone(), b2.clone()], q.clone())?);
    // q divides every raw coordinate, so at least that factor cancels
    assert!(BigRational::from_integer(point.denom().clone()) <= bound);
    Ok(bound)
}

/// Parameter of a rational sphere point; the antipode has no finite parameter.
pub fn inverse(x: &SpherePoint) -> Result<StereoParam> {
    if x.is_antipode() {
        return Err(Error::AtInfinity);
    }
    let n = x.dim();
    // β_j = A_j / (Q + A_{n+1})
    let den = x.denom() + &x.coords()[n];
    StereoParam::new(x.coords()[..n].to_vec(), den)
}

/// Parameter `β_j = α_j / (1 + α_{n+1})` of a real sphere point.
pub fn inverse_real(alpha: &[RealScalar], prec: Precision) -> Result<Vec<RealScalar>> {
    check_dim(alpha.len().saturating_sub(1))?;
    let n = alpha.len() - 1;
    let den = &RealScalar::one() + &alpha[n];
    if cmp_real(&den, &RealScalar::zero(), prec)? == Ordering::Equal {
        return Err(Error::AtInfinity);
    }
    alpha[..n]
        .iter()
        .map(|a| a.div_with(&den, prec).map_err(Error::from))
        .collect()
}

/// Image of a real parameter vector on the sphere.
pub fn forward_real(beta: &[RealScalar]) -> Result<Vec<RealScalar>> {
    check_dim(beta.len())?;
    let norm = beta
        .iter()
        .fold(RealScalar::zero(), |acc, b| &acc + &b.square());
    let den = &RealScalar::one() + &norm;
    let two = RealScalar::from(2);
    let mut out = Vec::with_capacity(beta.len() + 1);
    for b in beta {
        out.push((&two * b).div(&den)?);
    }
    out.push((&RealScalar::one() - &norm).div(&den)?);
    Ok(out)
}

/// Squared Euclidean distance `Σ (α_i − A_i/Q)²`.
pub fn chord_distance_sq(x: &SpherePoint, alpha: &[RealScalar]) -> Result<RealScalar> {
    if alpha.len() != x.coords().len() {
        return Err(Error::precondition("dimension mismatch"));
    }
    Ok(x
        .as_reals()
        .iter()
        .zip(alpha)
        .fold(RealScalar::zero(), |acc, (c, a)| &acc + &(a - c).square()))
}

/// Certifies, on the circle, that the chord between the images of `beta` and
/// `t` is at most `2|atan β − atan t|`, which in turn is at most
/// `2|β − t| / (1 + m²)` with `m` the smaller of `|β|, |t|` (zero when the
/// signs differ).
pub fn angle_bound_check(beta: &RealScalar, t: &BigRational, prec: Precision) -> Result<bool> {
    let t_real = RealScalar::Rational(t.clone());
    if beta.is_exact() && cmp_real(beta, &t_real, prec)? == Ordering::Equal {
        return Ok(true);
    }
    let img_beta = forward_real(std::slice::from_ref(beta))?;
    let img_t = forward(&StereoParam::from_ratio(t));
    let chord_sq = chord_distance_sq(&img_t, &img_beta)?;

    let two = RealScalar::from(2);
    let angle = &two * &(&beta.atan() - &t_real.atan());
    let angle_sq = angle.square();

    let same_sign = match (cmp_real(beta, &RealScalar::zero(), prec)?, t.signum()) {
        (Ordering::Greater, s) => s.is_positive(),
        (Ordering::Less, s) => s.is_negative(),
        _ => false,
    };
    let m = if same_sign {
        let tb = RealScalar::Rational(t.abs());
        let bb = beta.abs();
        if cmp_real(&bb, &tb, prec)? == Ordering::Less {
            bb
        } else {
            tb
        }
    } else {
        RealScalar::zero()
    };
    let linear = (&two * &(beta - &t_real)).div(&(&RealScalar::one() + &m.square()))?;
    let linear_sq = linear.square();

    let first = cmp_real(&chord_sq, &angle_sq, prec)? != Ordering::Greater;
    let second = cmp_real(&angle_sq, &linear_sq, prec)? != Ordering::Greater;
    Ok(first && second)
}
