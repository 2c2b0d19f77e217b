//! Continued fractions: certified expansion, convergents, mediants, parity
//! selection and classification of fractions against an expansion.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numeric::{cmp_real, BigRational, Interval, Precision, QuadSurd, RealScalar};
use crate::{Error, Result};

/// How an expansion continues past its stored terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// The value is rational and every quotient is stored.
    Finite,
    /// Quotients from `start` repeat with period `len`.
    Periodic { start: usize, len: usize },
    /// Only a certified prefix is known.
    Truncated,
}

/// `[a0; a1, a2, …]` with `a_i >= 1` for `i >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFExpansion {
    terms: Vec<BigInt>,
    tail: Tail,
}

impl CFExpansion {
    pub fn new(terms: Vec<BigInt>, tail: Tail) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::precondition("expansion needs a0"));
        }
        if terms[1..].iter().any(|a| !a.is_positive()) {
            return Err(Error::precondition("partial quotients must be positive"));
        }
        if let Tail::Periodic { start, len } = tail {
            if start == 0 || len == 0 || start + len != terms.len() {
                return Err(Error::precondition("period must cover the stored terms after a0"));
            }
        }
        Ok(CFExpansion { terms, tail })
    }

    pub fn a0(&self) -> &BigInt {
        &self.terms[0]
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// The stored terms (one full period for periodic expansions).
    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    /// Quotient `a_i`, unrolling the period when there is one.
    pub fn quotient(&self, i: usize) -> Option<&BigInt> {
        if i < self.terms.len() {
            return Some(&self.terms[i]);
        }
        match self.tail {
            Tail::Periodic { start, len } => Some(&self.terms[start + (i - start) % len]),
            _ => None,
        }
    }

    /// Exact value of a finite or periodic expansion.
    pub fn value(&self) -> Option<RealScalar> {
        match self.tail {
            Tail::Finite => {
                let c = convergents(self, self.terms.len() - 1).ok()?;
                let last = c.last()?;
                Some(RealScalar::Rational(last.ratio()))
            }
            Tail::Periodic { start, len } => {
                // purely periodic part y = [c0; …, c_{L-1}, y] solves
                // q' y² + (q'' − p') y − p'' = 0 with p'/q', p''/q'' its last two convergents
                let period = CFExpansion::new(self.terms[start..].to_vec(), Tail::Truncated).ok()?;
                let (pp, qp, ppp, qpp) = last_two(&period, len);
                let b = &qpp - &pp;
                let disc = &b * &b + BigInt::from(4) * &qp * &ppp;
                let y = QuadSurd::new(-b, BigInt::one(), disc, BigInt::from(2) * &qp).ok()?;
                let y = RealScalar::from(y);
                if start == 0 {
                    return Some(y);
                }
                let head = CFExpansion::new(self.terms[..start].to_vec(), Tail::Truncated).ok()?;
                let (p1, q1, p2, q2) = last_two(&head, start);
                let num = &(&RealScalar::from(&p1) * &y) + &RealScalar::from(&p2);
                let den = &(&RealScalar::from(&q1) * &y) + &RealScalar::from(&q2);
                num.div(&den).ok()
            }
            Tail::Truncated => None,
        }
    }
}

/// `(p_{k-1}, q_{k-1}, p_{k-2}, q_{k-2})` over the first `k` stored terms.
fn last_two(cf: &CFExpansion, k: usize) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    for a in &cf.terms[..k] {
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    (p1, q1, p2, q2)
}

impl fmt::Display for CFExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.terms[0])?;
        let rest = &self.terms[1..];
        if rest.is_empty() && self.tail != Tail::Truncated {
            return write!(f, "]");
        }
        write!(f, "; ")?;
        let period_start = match self.tail {
            Tail::Periodic { start, .. } => Some(start),
            _ => None,
        };
        for (k, a) in rest.iter().enumerate() {
            let i = k + 1;
            if i > 1 {
                write!(f, ", ")?;
            }
            if Some(i) == period_start {
                write!(f, "(")?;
            }
            write!(f, "{a}")?;
        }
        match self.tail {
            Tail::Periodic { .. } => write!(f, ")]"),
            Tail::Truncated if rest.is_empty() => write!(f, "...]"),
            Tail::Truncated => write!(f, ", ...]"),
            Tail::Finite => write!(f, "]"),
        }
    }
}

impl FromStr for CFExpansion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::precondition(format!("malformed continued fraction {s:?}"));
        let body: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = body
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (head, rest) = match body.split_once(';') {
            Some((h, r)) => (h, Some(r)),
            None => (body, None),
        };
        let mut terms = vec![head.parse::<BigInt>().map_err(|_| bad())?];
        let mut tail = Tail::Finite;
        if let Some(rest) = rest {
            let mut period_start = None;
            let mut closed = false;
            for item in rest.split(',') {
                if closed {
                    return Err(bad());
                }
                if item == "..." {
                    tail = Tail::Truncated;
                    closed = true;
                    continue;
                }
                let mut item = item;
                if let Some(i) = item.strip_prefix('(') {
                    if period_start.is_some() {
                        return Err(bad());
                    }
                    period_start = Some(terms.len());
                    item = i;
                }
                if let Some(i) = item.strip_suffix(')') {
                    period_start.ok_or_else(bad)?;
                    closed = true;
                    item = i;
                }
                terms.push(item.parse().map_err(|_| bad())?);
            }
            if let Some(start) = period_start {
                if !closed {
                    return Err(bad());
                }
                tail = Tail::Periodic {
                    start,
                    len: terms.len() - start,
                };
            }
        }
        CFExpansion::new(terms, tail)
    }
}

fn floor_ratio(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

fn expand_rational(x: &BigRational) -> Vec<BigInt> {
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    let mut out = Vec::new();
    while !d.is_zero() {
        let (a, r) = n.div_mod_floor(&d);
        out.push(a);
        n = std::mem::replace(&mut d, r);
    }
    out
}

/// Exact expansion of an irrational surd with period detection.
fn expand_surd(s: &QuadSurd) -> CFExpansion {
    // write x = (P + √D) / Q with Q | D − P²
    let r = s.r();
    let d_big = s.q() * s.q() * s.d() * r * r;
    let (mut p, mut q) = if s.q().is_positive() {
        (s.p() * r, r * r)
    } else {
        (-(s.p() * r), -(r * r))
    };
    let root = d_big.sqrt();
    let mut terms = Vec::new();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    loop {
        let i = terms.len();
        if i >= 1 {
            if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
                return CFExpansion {
                    tail: Tail::Periodic { start, len: i - start },
                    terms,
                };
            }
            seen.insert((p.clone(), q.clone()), i);
        }
        // floor((P + √D)/Q); √D is irrational so the fractional part never lands on an integer
        let a = if q.is_positive() {
            (&p + &root).div_floor(&q)
        } else {
            (&p + &root + BigInt::one()).div_floor(&q)
        };
        let p_next = &a * &q - &p;
        let q_next = (&d_big - &p_next * &p_next) / &q;
        terms.push(a);
        p = p_next;
        q = q_next;
    }
}

/// Quotients of `[lo, hi]` shared by every member, or `None` when the
/// interval is a single rational point.
fn common_quotients(enclosure: &Interval, limit: usize) -> Option<Vec<BigInt>> {
    if enclosure.is_point() {
        return None;
    }
    let (mut lo, mut hi) = (enclosure.lo().clone(), enclosure.hi().clone());
    let mut out = Vec::new();
    while out.len() < limit {
        let a = floor_ratio(&lo);
        if floor_ratio(&hi) != a {
            break;
        }
        let a_rat = BigRational::from_integer(a.clone());
        if lo == a_rat {
            break;
        }
        out.push(a);
        // x ↦ 1/(x − a) reverses the order
        let new_lo = (&hi - &a_rat).recip();
        let new_hi = (&lo - &a_rat).recip();
        lo = new_lo;
        hi = new_hi;
    }
    Some(out)
}

/// The first `count` terms `a0 … a_{count-1}` of `x`.
///
/// Rationals return their whole expansion (tail `Finite`, possibly shorter
/// than `count`) and surds their full periodic form. Interval-backed values
/// are refined until `count` terms agree across the enclosure.
pub fn expand(x: &RealScalar, count: usize, prec: Precision) -> Result<CFExpansion> {
    if count == 0 {
        return Err(Error::precondition("count must be at least 1"));
    }
    match x {
        RealScalar::Rational(r) => Ok(CFExpansion {
            terms: expand_rational(r),
            tail: Tail::Finite,
        }),
        RealScalar::Surd(s) => Ok(expand_surd(s)),
        RealScalar::Interval(_) => {
            for step in 0..=prec.budget() {
                let bits = (prec.start_bits.max(1) as u64) << step.min(32);
                let bits = bits.min(prec.max_bits as u64) as u32;
                let enclosure = x.approx(bits)?;
                match common_quotients(&enclosure, count) {
                    None => {
                        return Ok(CFExpansion {
                            terms: expand_rational(enclosure.lo()),
                            tail: Tail::Finite,
                        })
                    }
                    Some(terms) if terms.len() >= count => {
                        return Ok(CFExpansion {
                            terms,
                            tail: Tail::Truncated,
                        })
                    }
                    Some(_) if bits >= prec.max_bits => break,
                    Some(_) => {}
                }
            }
            Err(crate::NumericError::Unresolved {
                bits: prec.max_bits,
            }
            .into())
        }
    }
}

/// Indexed access to partial quotients, possibly computed on demand.
pub trait Quotients {
    /// `Ok(None)` past the end of a finite expansion.
    fn quotient(&self, i: usize) -> Result<Option<BigInt>>;
}

impl Quotients for CFExpansion {
    fn quotient(&self, i: usize) -> Result<Option<BigInt>> {
        match CFExpansion::quotient(self, i) {
            Some(a) => Ok(Some(a.clone())),
            None if self.tail == Tail::Truncated => Err(Error::precondition(format!(
                "expansion only certifies {} terms",
                self.terms.len()
            ))),
            None => Ok(None),
        }
    }
}

/// Expansion of a real extended on demand; readers share the certified prefix.
#[derive(Debug)]
pub struct LazyExpansion {
    value: RealScalar,
    prec: Precision,
    known: Mutex<CFExpansion>,
}

impl LazyExpansion {
    pub fn new(value: RealScalar, prec: Precision) -> Result<Self> {
        let initial = expand(&value, 16, prec)?;
        Ok(LazyExpansion {
            value,
            prec,
            known: Mutex::new(initial),
        })
    }

    pub fn value(&self) -> &RealScalar {
        &self.value
    }

    /// Snapshot of what has been certified so far.
    pub fn snapshot(&self) -> CFExpansion {
        self.known.lock().expect("expansion cache poisoned").clone()
    }
}

impl Quotients for LazyExpansion {
    fn quotient(&self, i: usize) -> Result<Option<BigInt>> {
        let mut known = self.known.lock().expect("expansion cache poisoned");
        if known.tail == Tail::Truncated && i >= known.terms.len() {
            *known = expand(&self.value, (2 * (i + 1)).max(16), self.prec)?;
        }
        Ok(CFExpansion::quotient(&known, i).cloned())
    }
}

/// Convergent `p_ν / q_ν = [a0; a1, …, a_ν]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Convergent {
    pub index: usize,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

impl fmt::Display for Convergent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Streams convergents of any quotient source in index order.
pub struct ConvergentIter<'a, S: Quotients + ?Sized> {
    source: &'a S,
    index: usize,
    prev: (BigInt, BigInt),
    prev2: (BigInt, BigInt),
    done: bool,
}

pub fn convergent_iter<S: Quotients + ?Sized>(source: &S) -> ConvergentIter<'_, S> {
    ConvergentIter {
        source,
        index: 0,
        prev: (BigInt::one(), BigInt::zero()),
        prev2: (BigInt::zero(), BigInt::one()),
        done: false,
    }
}

impl<S: Quotients + ?Sized> Iterator for ConvergentIter<'_, S> {
    type Item = Result<Convergent>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let a = match self.source.quotient(self.index) {
            Ok(Some(a)) => a,
            Ok(None) => {
                self.done = true;
                return None;
            }
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        let p = &a * &self.prev.0 + &self.prev2.0;
        let q = &a * &self.prev.1 + &self.prev2.1;
        self.prev2 = std::mem::replace(&mut self.prev, (p.clone(), q.clone()));
        let c = Convergent {
            index: self.index,
            p,
            q,
        };
        self.index += 1;
        Some(Ok(c))
    }
}

/// Convergents `0..=upto`.
pub fn convergents(cf: &impl Quotients, upto: usize) -> Result<Vec<Convergent>> {
    let out: Vec<Convergent> = convergent_iter(cf).take(upto + 1).collect::<Result<_>>()?;
    if out.len() != upto + 1 {
        return Err(Error::precondition(format!(
            "expansion has only {} convergents",
            out.len()
        )));
    }
    Ok(out)
}

fn cross(a: &BigRational, b: &BigRational) -> BigInt {
    a.numer() * b.denom() - b.numer() * a.denom()
}

fn require_unimodular(a: &BigRational, b: &BigRational) -> Result<()> {
    if cross(a, b).abs().is_one() {
        Ok(())
    } else {
        Err(Error::precondition(format!("{a} and {b} are not a unimodular pair")))
    }
}

/// `(p₁ + p₂) / (q₁ + q₂)` of a unimodular pair.
pub fn mediant(a: &BigRational, b: &BigRational) -> Result<BigRational> {
    require_unimodular(a, b)?;
    Ok(BigRational::new(
        a.numer() + b.numer(),
        a.denom() + b.denom(),
    ))
}

/// Which candidate [`parity_select`] returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityPick {
    Previous,
    Current,
    Mediant,
}

/// Of a unimodular pair and its mediant, the first whose numerator and
/// denominator are both odd. One always exists: an odd determinant rules out
/// both fractions being `(odd, even)` or both `(even, odd)`.
pub fn parity_select(prev: &BigRational, cur: &BigRational) -> Result<(ParityPick, BigRational)> {
    require_unimodular(prev, cur)?;
    let both_odd = |x: &BigRational| x.numer().is_odd() && x.denom().is_odd();
    if both_odd(prev) {
        return Ok((ParityPick::Previous, prev.clone()));
    }
    if both_odd(cur) {
        return Ok((ParityPick::Current, cur.clone()));
    }
    let m = mediant(prev, cur)?;
    debug_assert!(both_odd(&m));
    Ok((ParityPick::Mediant, m))
}

/// Position of a fraction relative to an expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FractionClass {
    Convergent(usize),
    /// `(p_{ν−1} + p_ν) / (q_{ν−1} + q_ν)` for `ν >= 1`.
    Mediant(usize),
    /// Neither; `fatou_gap` reports the certified `|β − b/q| >= 1/q²`.
    Other { fatou_gap: bool },
}

pub fn classify_fraction(
    cf: &impl Quotients,
    beta: &RealScalar,
    frac: &BigRational,
    prec: Precision,
) -> Result<FractionClass> {
    let q = frac.denom();
    let mut prev: Option<Convergent> = None;
    for c in convergent_iter(cf) {
        let c = c?;
        if c.p == *frac.numer() && c.q == *q {
            return Ok(FractionClass::Convergent(c.index));
        }
        if let Some(pc) = &prev {
            if &(&pc.q + &c.q) == q && &(&pc.p + &c.p) == frac.numer() {
                return Ok(FractionClass::Mediant(c.index));
            }
        }
        // later convergents and mediants have larger denominators
        if c.index >= 1 && &c.q > q {
            break;
        }
        prev = Some(c);
    }
    let gap = (beta - &RealScalar::Rational(frac.clone())).abs();
    let bound = RealScalar::Rational(BigRational::new(BigInt::one(), q * q));
    let fatou_gap = cmp_real(&gap, &bound, prec)? != std::cmp::Ordering::Less;
    Ok(FractionClass::Other { fatou_gap })
}

/// True iff the explicit period is the single quotient 1.
pub fn is_golden_tail(cf: &CFExpansion) -> Result<bool> {
    match cf.tail {
        Tail::Periodic { start, len } => Ok(cf.terms[start..start + len].iter().all(One::is_one)),
        _ => Err(Error::NotPeriodic),
    }
}
