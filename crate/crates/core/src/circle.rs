//! Rational points on S¹ close to a real point, generated from convergents and
//! one-step mediants of its stereographic parameter.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::contfrac::{convergent_iter, mediant, Convergent, FractionClass, LazyExpansion};
use crate::numeric::{certify_lt, cmp_real, BigRational, Precision, QuadSurd, RealScalar};
use crate::oracle;
use crate::stereo::{chord_distance_sq, forward, forward_real, inverse, inverse_real, SpherePoint, StereoParam};
use crate::{Error, NumericError, Result};

/// Factor applied to the distance in [`ApproxRecord::normalized`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// The distance itself.
    Raw,
    /// `Q · dist`.
    TimesQ,
    /// `√(Q T) · dist`.
    TimesSqrtQT(BigInt),
}

impl Normalization {
    /// Multiplier of `dist²` giving `normalized²`.
    fn weight(&self, q: &BigInt) -> BigInt {
        match self {
            Normalization::Raw => BigInt::one(),
            Normalization::TimesQ => q * q,
            Normalization::TimesSqrtQT(t) => q * t,
        }
    }
}

/// A rational point together with its certified distance to a target.
#[derive(Clone, Debug)]
pub struct ApproxRecord {
    pub point: SpherePoint,
    /// `Σ (α_i − A_i/Q)²`.
    pub dist_sq: RealScalar,
    pub normalized: RealScalar,
    /// Convergent or mediant that produced the point, when there is one.
    pub origin: Option<FractionClass>,
    /// Stereographic parameter of the point (absent for the antipode).
    pub param: Option<StereoParam>,
}

impl ApproxRecord {
    pub fn new(point: SpherePoint, alpha: &[RealScalar], mode: &Normalization) -> Result<Self> {
        let dist_sq = chord_distance_sq(&point, alpha)?;
        let key = &RealScalar::from(&mode.weight(point.denom())) * &dist_sq;
        let param = inverse(&point).ok();
        Ok(ApproxRecord {
            point,
            dist_sq,
            normalized: key.sqrt(),
            origin: None,
            param,
        })
    }

    pub fn q(&self) -> &BigInt {
        self.point.denom()
    }

    /// `normalized²`, exact whenever `dist_sq` is.
    pub fn key(&self, mode: &Normalization) -> RealScalar {
        &RealScalar::from(&mode.weight(self.q())) * &self.dist_sq
    }

    pub fn dist(&self) -> RealScalar {
        self.dist_sq.sqrt()
    }
}

/// Fails unless `Σ α_i² = 1` holds exactly or cannot be refuted at the
/// available precision.
pub fn check_on_sphere(alpha: &[RealScalar], prec: Precision) -> Result<()> {
    let norm = alpha.iter().fold(RealScalar::zero(), |acc, a| &acc + &a.square());
    match cmp_real(&norm, &RealScalar::one(), prec) {
        Ok(Ordering::Equal) | Err(NumericError::Unresolved { .. }) => Ok(()),
        Ok(_) => Err(Error::precondition("target is not on the unit sphere")),
        Err(e) => Err(e.into()),
    }
}

/// Reduced point with the given rational coordinates.
pub(crate) fn point_from_ratios(coords: &[BigRational]) -> Result<SpherePoint> {
    let den = coords.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let nums = coords
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    SpherePoint::from_raw(nums, den)
}

/// The exact rational point when every coordinate of `alpha` is rational.
pub(crate) fn exact_hit(alpha: &[RealScalar]) -> Result<Option<SpherePoint>> {
    let ratios: Option<Vec<BigRational>> = alpha.iter().map(|a| a.as_rational().cloned()).collect();
    ratios.map(|r| point_from_ratios(&r)).transpose()
}

#[derive(Clone, Copy, Debug)]
pub struct CircleOptions {
    pub prec: Precision,
    /// Candidates examined before giving up with [`Error::Exhausted`].
    pub max_candidates: usize,
}

impl Default for CircleOptions {
    fn default() -> Self {
        CircleOptions {
            prec: Precision::default(),
            max_candidates: 4096,
        }
    }
}

fn check_circle_target(alpha: &[RealScalar], prec: Precision) -> Result<()> {
    if alpha.len() != 2 {
        return Err(Error::precondition("target must have two coordinates"));
    }
    check_on_sphere(alpha, prec)
}

fn candidate(t: &BigRational, origin: FractionClass, alpha: &[RealScalar]) -> Result<ApproxRecord> {
    let param = StereoParam::from_ratio(t);
    let mut rec = ApproxRecord::new(forward(&param), alpha, &Normalization::TimesQ)?;
    rec.origin = Some(origin);
    rec.param = Some(param);
    Ok(rec)
}

/// Convergent and mediant candidates in expansion order, each paired with the
/// denominator `q_ν` of the latest convergent.
fn for_each_candidate(
    alpha: &[RealScalar],
    prec: Precision,
    mut visit: impl FnMut(ApproxRecord, &Convergent) -> Result<bool>,
) -> Result<()> {
    let beta = inverse_real(alpha, prec)?.remove(0);
    let cf = LazyExpansion::new(beta, prec)?;
    let mut prev: Option<Convergent> = None;
    for c in convergent_iter(&cf) {
        let c = c?;
        if let Some(p) = &prev {
            let m = mediant(&p.ratio(), &c.ratio())?;
            if !visit(candidate(&m, FractionClass::Mediant(c.index), alpha)?, &c)? {
                return Ok(());
            }
        }
        if !visit(candidate(&c.ratio(), FractionClass::Convergent(c.index), alpha)?, &c)? {
            return Ok(());
        }
        prev = Some(c);
    }
    Ok(())
}

/// Up to `count` distinct rational points `A/Q` on S¹ with certified
/// `Q · |α − A/Q| < (1 + ε)/√2`, in strictly increasing `Q`.
///
/// A rational target yields only its exact hit.
pub fn approx_circle(
    alpha: &[RealScalar],
    eps: &BigRational,
    count: usize,
    opts: &CircleOptions,
) -> Result<Vec<ApproxRecord>> {
    if !eps.is_positive() {
        return Err(Error::precondition("epsilon must be positive"));
    }
    if count == 0 {
        return Err(Error::precondition("count must be positive"));
    }
    check_circle_target(alpha, opts.prec)?;
    if let Some(point) = exact_hit(alpha)? {
        return Ok(vec![ApproxRecord::new(point, alpha, &Normalization::TimesQ)?]);
    }
    // Q² · dist² < (1 + ε)² / 2
    let one_eps = BigRational::one() + eps;
    let threshold = RealScalar::Rational(&one_eps * &one_eps / BigInt::from(2));

    let mut out: Vec<ApproxRecord> = Vec::new();
    let mut pending: Vec<ApproxRecord> = Vec::new();
    let mut seen: BTreeSet<SpherePoint> = BTreeSet::new();
    let mut examined = 0usize;
    let flush = |pending: &mut Vec<ApproxRecord>, out: &mut Vec<ApproxRecord>, below: Option<&BigInt>| {
        pending.sort_by(|a, b| a.point.cmp(&b.point));
        let keep = pending
            .iter()
            .position(|r| below.is_some_and(|b| &(BigInt::from(2) * r.q()) >= b))
            .unwrap_or(pending.len());
        for rec in pending.drain(..keep) {
            if out.len() < count && out.last().is_none_or(|l| l.q() < rec.q()) {
                out.push(rec);
            }
        }
    };
    for_each_candidate(alpha, opts.prec, |rec, conv| {
        examined += 1;
        if seen.insert(rec.point.clone()) && certify_lt(&rec.key(&Normalization::TimesQ), &threshold, opts.prec)? {
            pending.push(rec);
        }
        // later candidates have denominator at least q_ν, hence Q >= q_ν²/2
        flush(&mut pending, &mut out, Some(&(&conv.q * &conv.q)));
        if out.len() >= count {
            return Ok(false);
        }
        if examined >= opts.max_candidates {
            return Err(Error::Exhausted {
                found: out.len(),
                wanted: count,
            });
        }
        Ok(true)
    })?;
    flush(&mut pending, &mut out, None);
    Ok(out)
}

/// One unfiltered record per convergent `ν = 0..=upto`.
pub fn convergent_trace(alpha: &[RealScalar], upto: usize, prec: Precision) -> Result<Vec<ApproxRecord>> {
    check_circle_target(alpha, prec)?;
    let mut out = Vec::with_capacity(upto + 1);
    for_each_candidate(alpha, prec, |rec, _| {
        let Some(FractionClass::Convergent(nu)) = rec.origin else {
            return Ok(true);
        };
        out.push(rec);
        Ok(nu < upto)
    })?;
    Ok(out)
}

/// Image on S¹ of `β = (17 + √2)/41 = [0; 2, 4, (2)]`.
pub fn sharpness_target() -> Vec<RealScalar> {
    let beta = QuadSurd::new(17.into(), 1.into(), 2.into(), 41.into()).expect("valid surd");
    forward_real(&[RealScalar::from(beta)]).expect("one-dimensional parameter")
}

#[derive(Clone, Debug)]
pub struct SharpnessReport {
    pub q_min: u64,
    pub q_max: u64,
    /// Minimum of `Q · dist` over all rational points with `Q_min <= Q <= Q_max`.
    pub global_min: ApproxRecord,
    /// Convergent and mediant images with `Q` in range.
    pub subsequence: Vec<ApproxRecord>,
    pub subsequence_min: Option<ApproxRecord>,
}

/// Compares the exhaustive minimum of `Q · dist` against [`sharpness_target`]
/// with the values along its convergents and mediants.
pub fn sharpness_experiment(q_min: u64, q_max: u64, prec: Precision) -> Result<SharpnessReport> {
    let alpha = sharpness_target();
    let mode = Normalization::TimesQ;
    let global_min = oracle::best_approximation(&alpha, q_min, q_max, &mode, prec)?;
    let (lo, hi) = (BigInt::from(q_min), BigInt::from(q_max));
    let mut subsequence = Vec::new();
    for_each_candidate(&alpha, prec, |rec, conv| {
        if rec.q() >= &lo && rec.q() <= &hi && !subsequence.iter().any(|r: &ApproxRecord| r.point == rec.point) {
            subsequence.push(rec);
        }
        Ok(&conv.q * &conv.q <= BigInt::from(2) * &hi)
    })?;
    subsequence.sort_by(|a, b| a.point.cmp(&b.point));
    let mut subsequence_min: Option<ApproxRecord> = None;
    for rec in &subsequence {
        let better = match &subsequence_min {
            None => true,
            Some(b) => cmp_real(&rec.key(&mode), &b.key(&mode), prec)? == Ordering::Less,
        };
        if better {
            subsequence_min = Some(rec.clone());
        }
    }
    Ok(SharpnessReport {
        q_min,
        q_max,
        global_min,
        subsequence,
        subsequence_min,
    })
}
