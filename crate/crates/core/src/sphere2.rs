//! Approximation on S² through lattice points `(q, A, b₁, b₂)` with
//! `qA = b₁² + b₂²`, and the quadratic-form apparatus behind them.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::circle::{check_on_sphere, exact_hit, ApproxRecord, Normalization};
use crate::numeric::{certify_lt, cmp_real, BigRational, NumericError, Precision, RealScalar};
use crate::stereo::{forward, inverse_real, SpherePoint, StereoParam};
use crate::{Error, Result};

/// `f(z, y, x₁, x₂) = zy − x₁² − x₂²`.
pub fn f_eval(w: &[BigRational; 4]) -> BigRational {
    &w[0] * &w[1] - &w[2] * &w[2] - &w[3] * &w[3]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformKind {
    /// `diag(t, 1/t, 1, 1)`.
    Gt(BigRational),
    /// Rows `(1,0,0,0)`, `(|β|², 1, −2β₁, −2β₂)`, `(−β₁,0,1,0)`, `(−β₂,0,0,1)`.
    Rbeta(BigRational, BigRational),
}

/// Exact 4×4 rational matrix preserving `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transform4 {
    kind: TransformKind,
    m: [[BigRational; 4]; 4],
}

fn ratio_int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl Transform4 {
    pub fn g_t(t: BigRational) -> Result<Self> {
        if !t.is_positive() {
            return Err(Error::precondition("t must be positive"));
        }
        let mut m: [[BigRational; 4]; 4] = Default::default();
        m[0][0] = t.clone();
        m[1][1] = t.recip();
        m[2][2] = BigRational::one();
        m[3][3] = BigRational::one();
        Ok(Transform4 {
            kind: TransformKind::Gt(t),
            m,
        })
    }

    pub fn r_beta(b1: BigRational, b2: BigRational) -> Self {
        let z = BigRational::zero;
        let one = BigRational::one;
        let two = ratio_int(2);
        let m = [
            [one(), z(), z(), z()],
            [&b1 * &b1 + &b2 * &b2, one(), -(&two * &b1), -(&two * &b2)],
            [-b1.clone(), z(), one(), z()],
            [-b2.clone(), z(), z(), one()],
        ];
        Transform4 {
            kind: TransformKind::Rbeta(b1, b2),
            m,
        }
    }

    pub fn kind(&self) -> &TransformKind {
        &self.kind
    }

    pub fn matrix(&self) -> &[[BigRational; 4]; 4] {
        &self.m
    }

    pub fn apply(&self, w: &[BigRational; 4]) -> [BigRational; 4] {
        std::array::from_fn(|i| (0..4).fold(BigRational::zero(), |acc, j| acc + &self.m[i][j] * &w[j]))
    }

    /// Determinant by exact Gaussian elimination.
    #[allow(clippy::needless_range_loop)]
    pub fn determinant(&self) -> BigRational {
        let mut a = self.m.clone();
        let mut det = BigRational::one();
        for col in 0..4 {
            let Some(pivot) = (col..4).find(|&r| !a[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= &a[col][col];
            for r in col + 1..4 {
                let factor = &a[r][col] / &a[col][col];
                for c in col..4 {
                    let sub = &factor * &a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
        det
    }
}

/// Bodies of the lattice-point argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    /// `|f(w)| < 1`.
    P,
    /// `|ξ| < 1` and `η² + (x₁² + x₂²)/γ² < 1` with `ξ = (z+y)/2`, `η = (z−y)/2`.
    K(BigRational),
}

/// Exact strict membership test.
pub fn membership(w: &[BigRational; 4], body: &Body) -> bool {
    let one = BigRational::one();
    match body {
        Body::P => f_eval(w).abs() < one,
        Body::K(gamma) => {
            let half = BigRational::new(1.into(), 2.into());
            let xi = (&w[0] + &w[1]) * &half;
            let eta = (&w[0] - &w[1]) * &half;
            let x = (&w[2] * &w[2] + &w[3] * &w[3]) / (gamma * gamma);
            xi.abs() < one && &eta * &eta + x < one
        }
    }
}

/// `vol K(γ) = (16π/3)·γ²`.
pub fn k_volume(gamma: &BigRational) -> RealScalar {
    let scale = RealScalar::Rational(BigRational::new(16.into(), 3.into()) * gamma * gamma);
    &scale * &RealScalar::pi()
}

/// Certified `vol K(γ) > 16`, equivalently `γ² > 3/π`.
pub fn volume_exceeds_16(gamma: &BigRational, prec: Precision) -> Result<bool> {
    Ok(certify_lt(&RealScalar::from(16), &k_volume(gamma), prec)?)
}

/// `√(3/π)`.
pub fn minkowski_gamma() -> RealScalar {
    RealScalar::from(3).div(&RealScalar::pi()).expect("π is nonzero").sqrt()
}

/// Lattice point `(q, A, b₁, b₂)` with `qA = b₁² + b₂²` and `Δ = Σ(qβ_i − b_i)²`.
#[derive(Clone, Debug)]
pub struct LatticeSolution {
    pub q: BigInt,
    pub b: [BigInt; 2],
    pub a: BigInt,
    pub delta: RealScalar,
}

impl LatticeSolution {
    fn new(q: BigInt, b: [BigInt; 2], beta: &[RealScalar]) -> Self {
        let a = (&b[0] * &b[0] + &b[1] * &b[1]) / &q;
        let delta = delta_of(&q, &b, beta);
        LatticeSolution { q, b, a, delta }
    }

    /// `qA = b₁² + b₂²` and `q >= 1`.
    pub fn invariants_hold(&self) -> bool {
        self.q.is_positive() && &self.q * &self.a == &self.b[0] * &self.b[0] + &self.b[1] * &self.b[1]
    }

    /// `(b₁/q, b₂/q)` in lowest terms.
    pub fn reduced(&self) -> StereoParam {
        StereoParam::new(self.b.to_vec(), self.q.clone()).expect("q is positive")
    }

    /// `L = q|β|² + A − 2b₁β₁ − 2b₂β₂`, which equals `Δ/q`.
    pub fn l_value(&self, beta: &[RealScalar]) -> RealScalar {
        let q = RealScalar::from(&self.q);
        let norm = &beta[0].square() + &beta[1].square();
        let two = RealScalar::from(2);
        let mut l = &(&q * &norm) + &RealScalar::from(&self.a);
        for (b, x) in self.b.iter().zip(beta) {
            l = &l - &(&two * &(&RealScalar::from(b) * x));
        }
        l
    }
}

fn delta_of(q: &BigInt, b: &[BigInt; 2], beta: &[RealScalar]) -> RealScalar {
    let q = RealScalar::from(q);
    b.iter().zip(beta).fold(RealScalar::zero(), |acc, (b, x)| {
        &acc + &(&(&q * x) - &RealScalar::from(b)).square()
    })
}

/// `qβ` scaled by `2^bits` as integer brackets, for candidate windows.
struct Scaled {
    bits: u32,
    beta: [(i128, i128); 2],
}

impl Scaled {
    const BITS: u32 = 40;

    fn new(beta: &[RealScalar], q_max: u64) -> Result<Self> {
        if q_max > 1 << 40 {
            return Err(Error::precondition("T exceeds 2^40"));
        }
        let bits = Self::BITS;
        let scale = BigRational::from_integer(BigInt::one() << bits);
        let mut out = [(0i128, 0i128); 2];
        for (slot, x) in out.iter_mut().zip(beta) {
            let iv = x.approx(bits + 8)?;
            let lo = (iv.lo() * &scale).floor().to_integer();
            let hi = (iv.hi() * &scale).ceil().to_integer();
            let limit = BigInt::one() << (bits + 30);
            if lo.abs() >= limit || hi.abs() >= limit {
                return Err(Error::precondition("|β_i| must be below 2^30"));
            }
            *slot = (lo.to_i128().expect("bounded"), hi.to_i128().expect("bounded"));
        }
        Ok(Scaled { bits, beta: out })
    }

    /// Integers `b` with possibly `|qβ_i − b| < r` for an integer radius `r`.
    fn window(&self, i: usize, q: i64, r: i64) -> std::ops::RangeInclusive<i64> {
        let (lo, hi) = self.beta[i];
        let q = q as i128;
        let from = (q * lo) >> self.bits;
        let to = ((q * hi) >> self.bits) + 1;
        (from as i64 - r)..=(to as i64 + r)
    }

    /// Bracket of `Δ · 2^(2 bits)`.
    fn delta(&self, q: i64, b: [i64; 2]) -> (i128, i128) {
        let q = q as i128;
        let (mut lo, mut hi) = (0i128, 0i128);
        for ((l, h), &b) in self.beta.iter().zip(&b) {
            let bs = (b as i128) << self.bits;
            let (dl, dh) = (q * l - bs, q * h - bs);
            let sq_hi = (dl * dl).max(dh * dh);
            let sq_lo = if dl <= 0 && dh >= 0 { 0 } else { (dl * dl).min(dh * dh) };
            lo += sq_lo;
            hi += sq_hi;
        }
        (lo, hi)
    }

    /// False only when `q/t + tΔ/q >= 2` holds on the whole bracket, which
    /// rules out `|ξ| < 1` for the image in `K(γ)`.
    fn may_lie_in_k(&self, q: i64, t: i64, b: [i64; 2]) -> bool {
        // Δ · 2^bits, rounded down
        let lo = self.delta(q, b).0 >> self.bits;
        let (q, t) = (q as i128, t as i128);
        let lhs = (q * q)
            .checked_shl(self.bits)
            .zip(t.checked_mul(t).and_then(|tt| tt.checked_mul(lo)))
            .and_then(|(a, b)| a.checked_add(b));
        let rhs = (2 * q * t).checked_shl(self.bits);
        match (lhs, rhs) {
            (Some(l), Some(r)) => l < r,
            _ => true,
        }
    }
}

fn check_beta(beta: &[RealScalar]) -> Result<()> {
    if beta.len() != 2 {
        return Err(Error::precondition("β must have two coordinates"));
    }
    Ok(())
}

/// Result of a certified comparison that may be unresolved.
fn certified(r: std::result::Result<bool, NumericError>, unresolved: &mut bool) -> Result<bool> {
    match r {
        Ok(v) => Ok(v),
        Err(NumericError::Unresolved { .. }) => {
            *unresolved = true;
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

/// A vector `(b₁/q, b₂/q)` with `1 <= q <= T`, certified
/// `Σ(qβ_i − b_i)² < 4q/T` and `b₁² + b₂² ≡ 0 (mod q)`.
///
/// The smallest `q` admitting a solution wins; within it the smallest `Δ`,
/// then the lexicographically smallest `(b₁, b₂)`.
pub fn dirichlet_search(beta: &[RealScalar], t: u64, prec: Precision) -> Result<LatticeSolution> {
    check_beta(beta)?;
    if t == 0 {
        return Err(Error::precondition("T must be at least 1"));
    }
    let scaled = Scaled::new(beta, t)?;
    let unit = 1i128 << (2 * scaled.bits);
    let mut unresolved = false;
    for q in 1..=t as i64 {
        // 4q/T <= 4, so |qβ_i − b_i| < 2
        let bound_num = 4 * q as i128;
        let mut found: Vec<LatticeSolution> = Vec::new();
        for b1 in scaled.window(0, q, 2) {
            for b2 in scaled.window(1, q, 2) {
                if (b1 as i128 * b1 as i128 + b2 as i128 * b2 as i128) % q as i128 != 0 {
                    continue;
                }
                // Δ·T < 4q on the bracket
                let (lo, hi) = scaled.delta(q, [b1, b2]);
                if lo.checked_mul(t as i128).is_none_or(|v| v >= bound_num * unit) {
                    continue;
                }
                let b = [BigInt::from(b1), BigInt::from(b2)];
                let ok = if hi.checked_mul(t as i128).is_some_and(|v| v < bound_num * unit) {
                    true
                } else {
                    let delta = delta_of(&BigInt::from(q), &b, beta);
                    let bound = RealScalar::Rational(BigRational::new((4 * q).into(), t.into()));
                    certified(certify_lt(&delta, &bound, prec), &mut unresolved)?
                };
                if ok {
                    found.push(LatticeSolution::new(BigInt::from(q), b, beta));
                }
            }
        }
        if found.is_empty() {
            continue;
        }
        // windows are scanned in lexicographic order, so only strictly smaller Δ replaces
        let mut best = found.remove(0);
        for s in found {
            if let Ok(Ordering::Less) = cmp_real(&s.delta, &best.delta, prec) {
                best = s;
            }
        }
        return Ok(best);
    }
    if unresolved {
        return Err(NumericError::Unresolved { bits: prec.max_bits }.into());
    }
    unreachable!("a solution with q <= T always exists")
}

/// `q < 2t` and `Δ < 2q/t` for `t = T/2`.
pub fn satisfies_chain(s: &LatticeSolution, t: u64, prec: Precision) -> Result<bool> {
    if s.q >= BigInt::from(t) {
        return Ok(false);
    }
    let bound = RealScalar::Rational(BigRational::new(BigInt::from(4) * &s.q, t.into()));
    Ok(certify_lt(&s.delta, &bound, prec)?)
}

/// Exact membership of `G_t⁻¹ R_β (q, A, b)` in `K(γ)`: with `u = q/t`,
/// `|u + tΔ/q| < 2` and `((u − tΔ/q)/2)² + Δ/γ² < 1`.
fn in_k(s: &LatticeSolution, t: &BigRational, gamma: &BigRational, prec: Precision, unresolved: &mut bool) -> Result<bool> {
    let u = RealScalar::Rational(BigRational::from_integer(s.q.clone()) / t);
    let v = (&RealScalar::Rational(t.clone()) * &s.delta)
        .div(&RealScalar::from(&s.q))
        .map_err(Error::from)?;
    let xi2 = &u + &v;
    if !certified(certify_lt(&xi2, &RealScalar::from(2), prec), unresolved)? {
        return Ok(false);
    }
    let eta = (&u - &v).div(&RealScalar::from(2)).map_err(Error::from)?;
    let g2 = RealScalar::Rational(gamma * gamma);
    let rest = s.delta.div(&g2).map_err(Error::from)?;
    certified(certify_lt(&(&eta.square() + &rest), &RealScalar::one(), prec), unresolved)
}

/// Options for the escalating sweep behind [`solutions_stream`].
#[derive(Clone, Copy, Debug)]
pub struct StreamOptions {
    pub prec: Precision,
    /// First `t`; each round doubles it.
    pub t_start: u64,
    /// Largest `t` tried before [`Error::Exhausted`].
    pub t_max: u64,
}

impl Default for StreamOptions {
    fn default() -> Self {
        StreamOptions {
            prec: Precision::default(),
            t_start: 5,
            t_max: 1 << 22,
        }
    }
}

fn require_irrational(beta: &[RealScalar]) -> Result<()> {
    if beta.iter().all(|b| b.as_rational().is_some()) {
        return Err(Error::precondition("β must not be rational"));
    }
    Ok(())
}

fn require_gamma(gamma: &BigRational, prec: Precision) -> Result<()> {
    if !gamma.is_positive() || !volume_exceeds_16(gamma, prec)? {
        return Err(Error::precondition("γ² must exceed 3/π"));
    }
    Ok(())
}

/// Visits solutions with certified `Δ < γ²` and `(iii)`, each new as a
/// reduced vector, found as lattice points in `R_β⁻¹ G_t K(γ)` for
/// `t = t_start, 2 t_start, …`. Stops when `visit` returns false.
fn sweep_solutions(
    beta: &[RealScalar],
    gamma: &BigRational,
    opts: &StreamOptions,
    mut visit: impl FnMut(LatticeSolution) -> Result<bool>,
) -> Result<usize> {
    let mut seen: HashSet<StereoParam> = HashSet::new();
    let radius = gamma.ceil().to_integer().to_i64().unwrap_or(i64::MAX).max(1);
    let mut t = opts.t_start.max(2);
    let scaled = Scaled::new(beta, 2 * opts.t_max)?;
    let mut unresolved = false;
    while t <= opts.t_max {
        let t_rat = BigRational::from_integer(t.into());
        // q < 2t from |ξ| < 1
        for q in 1..2 * t as i64 {
            for b1 in scaled.window(0, q, radius) {
                for b2 in scaled.window(1, q, radius) {
                    if (b1 as i128 * b1 as i128 + b2 as i128 * b2 as i128) % q as i128 != 0 {
                        continue;
                    }
                    if !scaled.may_lie_in_k(q, t as i64, [b1, b2]) {
                        continue;
                    }
                    let s = LatticeSolution::new(BigInt::from(q), [b1.into(), b2.into()], beta);
                    if seen.contains(&s.reduced()) || !in_k(&s, &t_rat, gamma, opts.prec, &mut unresolved)? {
                        continue;
                    }
                    seen.insert(s.reduced());
                    if !visit(s)? {
                        return Ok(seen.len());
                    }
                }
            }
        }
        t *= 2;
    }
    if unresolved {
        return Err(NumericError::Unresolved { bits: opts.prec.max_bits }.into());
    }
    Ok(seen.len())
}

/// `count` solutions, distinct as reduced vectors, with certified `Δ < γ²`
/// and `b₁² + b₂² ≡ 0 (mod q)`.
pub fn solutions_stream(
    beta: &[RealScalar],
    gamma: &BigRational,
    count: usize,
    opts: &StreamOptions,
) -> Result<Vec<LatticeSolution>> {
    check_beta(beta)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    require_irrational(beta)?;
    require_gamma(gamma, opts.prec)?;
    let mut out = Vec::with_capacity(count);
    sweep_solutions(beta, gamma, opts, |s| {
        out.push(s);
        Ok(out.len() < count)
    })?;
    if out.len() < count {
        return Err(Error::Exhausted {
            found: out.len(),
            wanted: count,
        });
    }
    Ok(out)
}

/// Image on S² of the parameter `(b₁/q, b₂/q)`; its denominator is at most `q + A`.
pub fn lift_to_sphere(s: &LatticeSolution) -> Result<SpherePoint> {
    if !s.invariants_hold() {
        return Err(Error::precondition("need q >= 1 and qA = b1^2 + b2^2"));
    }
    let point = forward(&s.reduced());
    assert!(point.denom() <= &(&s.q + &s.a), "denominator exceeds q + A");
    Ok(point)
}

/// Result of [`approx_sphere_dirichlet`].
#[derive(Clone, Debug)]
pub struct SphereDirichlet {
    /// Normalized by `√(QT)`.
    pub record: ApproxRecord,
    /// `None` for an exact hit.
    pub solution: Option<LatticeSolution>,
    /// Bound passed to [`dirichlet_search`].
    pub search_t: u64,
}

fn check_sphere_target(alpha: &[RealScalar], prec: Precision) -> Result<()> {
    if alpha.len() != 3 {
        return Err(Error::precondition("target must have three coordinates"));
    }
    check_on_sphere(alpha, prec)
}

/// A rational point with `Q <= T` near `α`, lifted from [`dirichlet_search`]
/// at `T' = ⌊T / (1 + |β|²)⌋`, lowered until the lift has `Q <= T`.
pub fn approx_sphere_dirichlet(alpha: &[RealScalar], t: u64, prec: Precision) -> Result<SphereDirichlet> {
    if t == 0 {
        return Err(Error::precondition("T must be at least 1"));
    }
    check_sphere_target(alpha, prec)?;
    let mode = Normalization::TimesSqrtQT(t.into());
    let t_big = BigInt::from(t);
    if let Some(point) = exact_hit(alpha)? {
        if point.denom() <= &t_big {
            return Ok(SphereDirichlet {
                record: ApproxRecord::new(point, alpha, &mode)?,
                solution: None,
                search_t: t,
            });
        }
    }
    let beta = inverse_real(alpha, prec)?;
    let norm = &beta[0].square() + &beta[1].square();
    let norm_hi = norm.approx(32)?.hi().clone();
    let scaled = BigRational::from_integer(t.into()) / (BigRational::one() + norm_hi);
    let mut search_t = scaled.floor().to_integer().to_u64().unwrap_or(0);
    while search_t >= 1 {
        let s = dirichlet_search(&beta, search_t, prec)?;
        let point = lift_to_sphere(&s)?;
        let q = point.denom().to_u64().unwrap_or(u64::MAX);
        if q <= t {
            let mut record = ApproxRecord::new(point, alpha, &mode)?;
            record.param = Some(s.reduced());
            return Ok(SphereDirichlet {
                record,
                solution: Some(s),
                search_t,
            });
        }
        search_t = (search_t - 1).min(((search_t as u128 * t as u128) / q as u128) as u64);
    }
    Err(Error::precondition("T is too small for this target"))
}

/// A rational `γ` with `√(3/π) < γ < √(3/π) + ε/2`.
pub fn stream_gamma(eps: &BigRational, prec: Precision) -> Result<BigRational> {
    let g = minkowski_gamma();
    let mut bits = prec.start_bits;
    loop {
        let iv = g.approx(bits)?;
        let gamma = iv.hi() + eps / BigInt::from(4);
        if gamma < (iv.lo() + eps / BigInt::from(2)) {
            return Ok(gamma);
        }
        if bits >= prec.max_bits {
            return Err(NumericError::Unresolved { bits }.into());
        }
        bits = (bits * 2).min(prec.max_bits);
    }
}

/// `count` distinct rational points on S² with certified
/// `Q · dist < 2√(3/π) + ε`, lifted from [`solutions_stream`].
pub fn approx_sphere_stream(
    alpha: &[RealScalar],
    eps: &BigRational,
    count: usize,
    opts: &StreamOptions,
) -> Result<Vec<ApproxRecord>> {
    if !eps.is_positive() {
        return Err(Error::precondition("epsilon must be positive"));
    }
    check_sphere_target(alpha, opts.prec)?;
    if alpha.iter().all(|a| a.as_rational().is_some()) {
        return Err(Error::precondition("target must not be rational"));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let beta = inverse_real(alpha, opts.prec)?;
    let gamma = stream_gamma(eps, opts.prec)?;
    require_gamma(&gamma, opts.prec)?;
    // (Q · dist)² < (2√(3/π) + ε)²
    let bound = &(&RealScalar::from(2) * &minkowski_gamma()) + &RealScalar::Rational(eps.clone());
    let bound_sq = bound.square();
    let mode = Normalization::TimesQ;
    let mut out: Vec<ApproxRecord> = Vec::new();
    sweep_solutions(&beta, &gamma, opts, |s| {
        let point = lift_to_sphere(&s)?;
        if out.iter().any(|r| r.point == point) {
            return Ok(true);
        }
        let mut rec = ApproxRecord::new(point, alpha, &mode)?;
        rec.param = Some(s.reduced());
        if certify_lt(&rec.key(&mode), &bound_sq, opts.prec)? {
            out.push(rec);
        }
        Ok(out.len() < count)
    })?;
    if out.len() < count {
        return Err(Error::Exhausted {
            found: out.len(),
            wanted: count,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::QuadSurd;
    use crate::stereo::forward_real;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn w(v: [(i64, i64); 4]) -> [BigRational; 4] {
        v.map(|(n, d)| r(n, d))
    }

    fn p() -> Precision {
        Precision::default()
    }

    fn surd_beta() -> Vec<RealScalar> {
        // (√2/2, 1/2)
        vec![
            RealScalar::from(QuadSurd::new(0.into(), 1.into(), 2.into(), 2.into()).unwrap()),
            RealScalar::ratio(1, 2),
        ]
    }

    #[test]
    fn form_examples() {
        assert_eq!(f_eval(&w([(1, 1), (1, 1), (0, 1), (0, 1)])), r(1, 1));
        assert_eq!(f_eval(&w([(1, 1), (2, 1), (1, 1), (1, 1)])), r(0, 1));
        assert_eq!(f_eval(&w([(2, 1), (3, 1), (1, 1), (2, 1)])), r(1, 1));
    }

    #[test]
    fn transform_examples() {
        let g = Transform4::g_t(r(3, 1)).unwrap();
        let v = w([(1, 1), (2, 1), (1, 1), (1, 1)]);
        assert_eq!(g.apply(&v), w([(3, 1), (2, 3), (1, 1), (1, 1)]));
        assert_eq!(f_eval(&g.apply(&v)), f_eval(&v));
        let id = Transform4::r_beta(r(0, 1), r(0, 1));
        assert_eq!(id.apply(&v), v);
        let rb = Transform4::r_beta(r(3, 10), r(7, 10));
        let g4 = w([(5, 1), (2, 1), (1, 1), (3, 1)]);
        let out = rb.apply(&g4);
        assert_eq!(out[2], r(1, 1) - r(5, 1) * r(3, 10));
        // second row gives L = Δ/q = (1/2)/5
        assert_eq!(out[1], r(1, 10));
        assert_eq!(g.determinant(), r(1, 1));
        assert_eq!(rb.determinant(), r(1, 1));
        assert!(Transform4::g_t(r(0, 1)).is_err());
    }

    #[test]
    fn membership_examples() {
        let gamma = r(49, 50);
        let zero = w([(0, 1); 4]);
        assert!(membership(&zero, &Body::K(gamma.clone())) && membership(&zero, &Body::P));
        let edge = w([(1, 1), (1, 1), (0, 1), (0, 1)]);
        assert!(!membership(&edge, &Body::K(gamma.clone())) && !membership(&edge, &Body::P));
        let inside = [r(1, 2), r(-1, 2), &gamma / BigInt::from(2), r(0, 1)];
        assert!(membership(&inside, &Body::K(gamma)));
    }

    #[test]
    fn volume_threshold() {
        // √(3/π) ≈ 0.9772050
        assert!(volume_exceeds_16(&r(98, 100), p()).unwrap());
        assert!(!volume_exceeds_16(&r(97, 100), p()).unwrap());
        assert!(volume_exceeds_16(&r(977206, 1000000), p()).unwrap());
        assert!(!volume_exceeds_16(&r(977205, 1000000), p()).unwrap());
    }

    #[test]
    fn dirichlet_examples() {
        let third = [RealScalar::ratio(1, 3), RealScalar::ratio(1, 3)];
        let s = dirichlet_search(&third, 10, p()).unwrap();
        assert_eq!((s.q.clone(), s.b.clone()), (1.into(), [0.into(), 0.into()]));
        assert_eq!(s.delta.as_rational().unwrap(), &r(2, 9));

        let beta = [RealScalar::ratio(3, 10), RealScalar::ratio(7, 10)];
        let s = dirichlet_search(&beta, 25, p()).unwrap();
        assert_eq!((s.q.clone(), s.b.clone(), s.a.clone()), (5.into(), [1.into(), 3.into()], 2.into()));
        assert_eq!(s.delta.as_rational().unwrap(), &r(1, 2));

        let ints = [RealScalar::from(4), RealScalar::from(-7)];
        let s = dirichlet_search(&ints, 1000, p()).unwrap();
        assert_eq!((s.q.clone(), s.b.clone()), (1.into(), [4.into(), (-7).into()]));
        assert!(s.delta.as_rational().unwrap().is_zero());
        assert!(dirichlet_search(&ints, 0, p()).is_err());
    }

    #[test]
    fn dirichlet_matches_brute_force() {
        // every q and every pair, no windows
        for (n1, n2, d) in [(1, 2, 7), (5, 3, 11), (13, 29, 31), (2, 9, 97)] {
            let beta = [RealScalar::ratio(n1, d), RealScalar::ratio(n2, d)];
            for t in [1u64, 3, 10, 50, 200] {
                let s = dirichlet_search(&beta, t, p()).unwrap();
                let mut want = None;
                'outer: for q in 1..=t as i64 {
                    let mut best: Option<(BigRational, i64, i64)> = None;
                    for b1 in -5..=(q + 5) {
                        for b2 in -5..=(q + 5) {
                            if (b1 * b1 + b2 * b2) % q != 0 {
                                continue;
                            }
                            let delta = (r(q * n1, d) - r(b1, 1)).pow(2) + (r(q * n2, d) - r(b2, 1)).pow(2);
                            if delta < r(4 * q, t as i64) && best.as_ref().is_none_or(|b| delta < b.0) {
                                best = Some((delta, b1, b2));
                            }
                        }
                    }
                    if let Some((_, b1, b2)) = best {
                        want = Some((q, b1, b2));
                        break 'outer;
                    }
                }
                let (q, b1, b2) = want.unwrap();
                assert_eq!((s.q.clone(), s.b.clone()), (q.into(), [b1.into(), b2.into()]), "{n1}/{d} {n2}/{d} T={t}");
            }
        }
    }

    #[test]
    fn solutions_satisfy_chain_and_identity() {
        let beta = surd_beta();
        for t in [10u64, 100, 1000, 5000] {
            let s = dirichlet_search(&beta, t, p()).unwrap();
            assert!(s.invariants_hold());
            assert!(satisfies_chain(&s, t, p()).unwrap());
            let l = s.l_value(&beta);
            let dq = s.delta.div(&RealScalar::from(&s.q)).unwrap();
            assert_eq!(cmp_real(&l, &dq, p()).unwrap(), Ordering::Equal);
        }
    }

    #[test]
    fn lift_examples() {
        let beta = [RealScalar::zero(), RealScalar::zero()];
        let mk = |q: i64, b1: i64, b2: i64| LatticeSolution::new(q.into(), [b1.into(), b2.into()], &beta);
        assert_eq!(lift_to_sphere(&mk(5, 1, 2)).unwrap().to_string(), "1 2 2 3");
        assert_eq!(lift_to_sphere(&mk(1, 0, 0)).unwrap().to_string(), "0 0 1 1");
        // raw (10, 30, 25 − 10, 35) shares the factor 5
        assert_eq!(lift_to_sphere(&mk(5, 1, 3)).unwrap().to_string(), "2 6 3 7");
        let mut bad = mk(5, 1, 2);
        bad.a = 2.into();
        assert!(lift_to_sphere(&bad).is_err());
    }

    #[test]
    fn stream_examples() {
        let beta = surd_beta();
        let gamma = r(98, 100);
        let sols = solutions_stream(&beta, &gamma, 10, &StreamOptions::default()).unwrap();
        assert_eq!(sols.len(), 10);
        let g2 = RealScalar::Rational(&gamma * &gamma);
        let distinct: HashSet<StereoParam> = sols.iter().map(|s| s.reduced()).collect();
        assert_eq!(distinct.len(), 10);
        for s in &sols {
            assert!(s.invariants_hold());
            assert!(certify_lt(&s.delta, &g2, p()).unwrap());
        }
        let rational = [RealScalar::ratio(1, 2), RealScalar::ratio(1, 3)];
        assert!(solutions_stream(&rational, &gamma, 3, &StreamOptions::default()).is_err());
        assert!(solutions_stream(&rational, &gamma, 0, &StreamOptions::default()).unwrap().is_empty());
        assert!(solutions_stream(&beta, &r(97, 100), 3, &StreamOptions::default()).is_err());
    }

    #[test]
    fn sphere_dirichlet_examples() {
        let north = [RealScalar::zero(), RealScalar::zero(), RealScalar::one()];
        let rec = approx_sphere_dirichlet(&north, 7, p()).unwrap();
        assert!(rec.record.dist_sq.as_rational().unwrap().is_zero());
        let twothirds = [RealScalar::ratio(2, 3), RealScalar::ratio(2, 3), RealScalar::ratio(-1, 3)];
        let rec = approx_sphere_dirichlet(&twothirds, 3, p()).unwrap();
        assert_eq!(rec.record.point.to_string(), "2 2 -1 3");

        let alpha = forward_real(&surd_beta()).unwrap();
        let t = 10_000u64;
        let rec = approx_sphere_dirichlet(&alpha, t, p()).unwrap();
        assert!(rec.record.q() <= &BigInt::from(t));
        assert!(certify_lt(&rec.record.normalized, &RealScalar::ratio(42, 10), p()).unwrap());
        assert!(satisfies_chain(rec.solution.as_ref().unwrap(), rec.search_t, p()).unwrap());

        let south = [RealScalar::zero(), RealScalar::zero(), RealScalar::from(-1)];
        // the antipode is rational with Q = 1, so it is its own exact hit
        assert!(approx_sphere_dirichlet(&south, 5, p()).unwrap().record.point.is_antipode());
    }

    #[test]
    fn sphere_stream_examples() {
        let alpha = forward_real(&surd_beta()).unwrap();
        let eps = r(1, 10);
        let recs = approx_sphere_stream(&alpha, &eps, 10, &StreamOptions::default()).unwrap();
        assert_eq!(recs.len(), 10);
        // 2√(3/π) + 0.1 ≈ 2.0544
        for rec in &recs {
            assert!(certify_lt(&rec.normalized, &RealScalar::ratio(20545, 10000), p()).unwrap());
        }
        let one = approx_sphere_stream(&alpha, &eps, 1, &StreamOptions::default()).unwrap();
        assert_eq!(one.len(), 1);
        let rational = [RealScalar::ratio(2, 3), RealScalar::ratio(2, 3), RealScalar::ratio(-1, 3)];
        assert!(approx_sphere_stream(&rational, &eps, 3, &StreamOptions::default()).is_err());
        let gamma = stream_gamma(&eps, p()).unwrap();
        assert!(volume_exceeds_16(&gamma, p()).unwrap());
        assert!(certify_lt(&RealScalar::Rational(gamma), &(&minkowski_gamma() + &RealScalar::Rational(r(1, 20))), p()).unwrap());
    }

    fn small_rational() -> impl Strategy<Value = BigRational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| r(n, d))
    }

    proptest! {
        #[test]
        fn transforms_preserve_the_form(
            v in proptest::array::uniform4(small_rational()),
            t in (1i64..40, 1i64..40),
            b in (small_rational(), small_rational()),
        ) {
            let g = Transform4::g_t(r(t.0, t.1)).unwrap();
            let rb = Transform4::r_beta(b.0, b.1);
            prop_assert_eq!(f_eval(&g.apply(&v)), f_eval(&v));
            prop_assert_eq!(f_eval(&rb.apply(&v)), f_eval(&v));
            prop_assert_eq!(g.determinant(), r(1, 1));
            prop_assert_eq!(rb.determinant(), r(1, 1));
        }

        #[test]
        fn k_lies_in_p(v in proptest::array::uniform4((-99i64..100, 1i64..100)), g in 1i64..100) {
            let v = v.map(|(n, d)| r(n, d));
            let gamma = r(g, 100);
            if membership(&v, &Body::K(gamma)) {
                prop_assert!(membership(&v, &Body::P));
            }
            // zy = ((z + y)² − (z − y)²)/4
            let lhs = &v[0] * &v[1];
            let rhs = ((&v[0] + &v[1]).pow(2) - (&v[0] - &v[1]).pow(2)) / BigInt::from(4);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
