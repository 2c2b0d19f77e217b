//! Exhaustive enumeration of rational points on S¹ and S², and brute-force
//! best approximations over them.
//!
//! Two independent generators exist per sphere: the direct sweep over
//! `ΣA_i² = Q²` (trusted) and the stereographic parameter sweep.

use std::cmp::Ordering;
use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::circle::{check_on_sphere, ApproxRecord, Normalization};
use crate::numeric::{cmp_real, BigRational, Precision, RealScalar};
use crate::stereo::SpherePoint;
use crate::{Error, Result};

/// A rational point `(A_1, …, A_N) / Q` in machine integers.
pub type RawPoint<const N: usize> = ([i64; N], i64);

fn to_sphere_point<const N: usize>(p: &RawPoint<N>) -> SpherePoint {
    let coords = p.0.iter().map(|&a| BigInt::from(a)).collect();
    SpherePoint::new(coords, BigInt::from(p.1)).expect("enumerated point is reduced and on the sphere")
}

fn sort_points<const N: usize>(mut v: Vec<RawPoint<N>>) -> Vec<RawPoint<N>> {
    // same order as `SpherePoint`: denominator, then coordinates
    v.sort_unstable_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    v.dedup();
    v
}

fn check_range(q_min: u64, q_max: u64) -> Result<()> {
    if q_min == 0 || q_min > q_max {
        return Err(Error::precondition("need 1 <= Q_min <= Q_max"));
    }
    if q_max > 1 << 30 {
        return Err(Error::precondition("Q_max exceeds 2^30"));
    }
    Ok(())
}

/// All sign choices of every point in `base`.
fn sign_variants<const N: usize>(base: [i64; N], out: &mut Vec<[i64; N]>) {
    for mask in 0u32..(1 << N) {
        let mut c = base;
        let mut redundant = false;
        for (i, x) in c.iter_mut().enumerate() {
            if mask >> i & 1 == 1 {
                if *x == 0 {
                    redundant = true;
                }
                *x = -*x;
            }
        }
        if !redundant {
            out.push(c);
        }
    }
}

/// Nonnegative `a <= b` with `a² + b² = target`, by two pointers.
fn two_squares(target: i64, min_a: i64, mut visit: impl FnMut(i64, i64)) {
    let mut a = min_a;
    let mut b = (target as f64).sqrt() as i64 + 1;
    while b * b > target {
        b -= 1;
    }
    while a <= b {
        let s = a * a + b * b;
        match s.cmp(&target) {
            Ordering::Equal => {
                visit(a, b);
                a += 1;
                b -= 1;
            }
            Ordering::Less => a += 1,
            Ordering::Greater => b -= 1,
        }
    }
}

/// Circle points with denominator exactly `q`, from `A₁² + A₂² = Q²`.
fn direct_circle_at(q: i64) -> Vec<RawPoint<2>> {
    let mut out = Vec::new();
    let mut coords = Vec::new();
    two_squares(q * q, 0, |a, b| {
        if a.gcd(&b) == 1 {
            sign_variants([a, b], &mut coords);
            sign_variants([b, a], &mut coords);
        }
    });
    out.extend(coords.into_iter().map(|c| (c, q)));
    out
}

/// Sphere points with denominator exactly `q`, from `A₁² + A₂² + A₃² = Q²`.
fn direct_sphere_at(q: i64) -> Vec<RawPoint<3>> {
    let qq = q * q;
    let mut coords = Vec::new();
    let mut a1 = 0;
    while 3 * a1 * a1 <= qq {
        two_squares(qq - a1 * a1, a1, |a2, a3| {
            if a1.gcd(&a2).gcd(&a3) == 1 {
                for perm in [[a1, a2, a3], [a1, a3, a2], [a2, a1, a3], [a2, a3, a1], [a3, a1, a2], [a3, a2, a1]] {
                    sign_variants(perm, &mut coords);
                }
            }
        });
        a1 += 1;
    }
    coords.into_iter().map(|c| (c, q)).collect()
}

/// Trusted enumeration of S¹ points with `Q_min <= Q <= Q_max`.
pub fn direct_circle(q_min: u64, q_max: u64) -> Result<Vec<RawPoint<2>>> {
    check_range(q_min, q_max)?;
    let all = (q_min as i64..=q_max as i64)
        .into_par_iter()
        .flat_map_iter(direct_circle_at)
        .collect();
    Ok(sort_points(all))
}

/// Trusted enumeration of S² points with `Q_min <= Q <= Q_max`.
pub fn direct_sphere(q_min: u64, q_max: u64) -> Result<Vec<RawPoint<3>>> {
    check_range(q_min, q_max)?;
    let all = (q_min as i64..=q_max as i64)
        .into_par_iter()
        .flat_map_iter(direct_sphere_at)
        .collect();
    Ok(sort_points(all))
}

/// Reduces `(coords, den)` by the gcd of all entries; returns the factor removed.
fn reduce<const N: usize>(mut coords: [i64; N], mut den: i64) -> (RawPoint<N>, i64) {
    let g = coords.iter().fold(den, |g, &c| g.gcd(&c));
    for c in &mut coords {
        *c /= g;
    }
    den /= g;
    ((coords, den), g)
}

/// S¹ points with `Q_min <= Q <= Q_max` as images of parameters `b/q`.
///
/// The removed gcd divides 2, so `Q >= (q² + b²)/2` and the sweep over
/// `q² + b² <= 2·Q_max` is complete.
pub fn param_circle(q_min: u64, q_max: u64) -> Result<Vec<RawPoint<2>>> {
    check_range(q_min, q_max)?;
    let limit = 2 * q_max as i64;
    let mut qs = Vec::new();
    let mut q = 1i64;
    while q * q <= limit {
        qs.push(q);
        q += 1;
    }
    let mut all: Vec<RawPoint<2>> = qs
        .into_par_iter()
        .flat_map_iter(|q| {
            let mut out = Vec::new();
            let mut b = 0i64;
            while q * q + b * b <= limit {
                for b in if b == 0 { vec![0] } else { vec![b, -b] } {
                    if b.gcd(&q) != 1 {
                        continue;
                    }
                    let (p, g) = reduce([2 * b * q, q * q - b * b], q * q + b * b);
                    assert!(2 % g == 0, "removed factor {g} does not divide 2");
                    if (q_min as i64..=q_max as i64).contains(&p.1) {
                        out.push(p);
                    }
                }
                b += 1;
            }
            out
        })
        .collect();
    if q_min == 1 {
        all.push(([0, -1], 1));
    }
    Ok(sort_points(all))
}

/// S² points with `Q_min <= Q <= Q_max` as images of parameters `(b₁, b₂)/q`.
///
/// The removed gcd `g` divides `2q`: an odd prime power `p^k | g` forces
/// `p | q` and, since `p` cannot divide both `b_j`, `p^k | q` from
/// `p^k | 2 b_j q`; for `p = 2`, some `b_j` odd gives `2^(k−1) | q`, and both
/// `b_j` even make `q² + |b|²` odd. Hence `Q >= (q² + |b|²)/(2q)` and the
/// sweep over `q² + |b|² <= 2q·Q_max` is complete.
pub fn param_sphere(q_min: u64, q_max: u64) -> Result<Vec<RawPoint<3>>> {
    check_range(q_min, q_max)?;
    let qm = q_max as i64;
    let mut all: Vec<RawPoint<3>> = (1..=2 * qm)
        .into_par_iter()
        .flat_map_iter(|q| {
            let mut out = Vec::new();
            let limit = 2 * q * qm - q * q;
            let mut b1 = 0i64;
            while b1 * b1 <= limit {
                let mut b2 = 0i64;
                while b1 * b1 + b2 * b2 <= limit {
                    for s1 in if b1 == 0 { vec![0] } else { vec![b1, -b1] } {
                        for s2 in if b2 == 0 { vec![0] } else { vec![b2, -b2] } {
                            if q.gcd(&s1).gcd(&s2) != 1 {
                                continue;
                            }
                            let bb = s1 * s1 + s2 * s2;
                            let (p, g) = reduce([2 * s1 * q, 2 * s2 * q, q * q - bb], q * q + bb);
                            assert!((2 * q) % g == 0, "removed factor {g} does not divide 2q");
                            if (q_min as i64..=qm).contains(&p.1) {
                                out.push(p);
                            }
                        }
                    }
                    b2 += 1;
                }
                b1 += 1;
            }
            out
        })
        .collect();
    if q_min == 1 {
        all.push(([0, 0, -1], 1));
    }
    Ok(sort_points(all))
}

/// All S¹ points with `Q <= Q_max` (direct sweep).
pub fn enumerate_circle(q_max: u64) -> Result<Vec<SpherePoint>> {
    Ok(direct_circle(1, q_max)?.iter().map(to_sphere_point).collect())
}

/// All S² points with `Q <= Q_max` (direct sweep).
pub fn enumerate_sphere(q_max: u64) -> Result<Vec<SpherePoint>> {
    Ok(direct_sphere(1, q_max)?.iter().map(to_sphere_point).collect())
}

/// Outcome of comparing both generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub n: usize,
    pub q_max: u64,
    pub direct: usize,
    pub param: usize,
    pub only_direct: Vec<String>,
    pub only_param: Vec<String>,
}

impl Agreement {
    pub fn agrees(&self) -> bool {
        self.only_direct.is_empty() && self.only_param.is_empty()
    }
}

fn diff<const N: usize>(n: usize, q_max: u64, a: &[RawPoint<N>], b: &[RawPoint<N>]) -> Agreement {
    let show = |p: &RawPoint<N>| line_of(&p.0, p.1);
    let only = |x: &[RawPoint<N>], y: &[RawPoint<N>]| {
        x.iter()
            .filter(|p| y.binary_search_by(|q| q.1.cmp(&p.1).then_with(|| q.0.cmp(&p.0))).is_err())
            .map(show)
            .collect()
    };
    Agreement {
        n,
        q_max,
        direct: a.len(),
        param: b.len(),
        only_direct: only(a, b),
        only_param: only(b, a),
    }
}

/// Compares the direct and parametrized enumerations of `S^n` up to `Q_max`.
pub fn dual_generation(n: usize, q_max: u64) -> Result<Agreement> {
    match n {
        1 => Ok(diff(1, q_max, &direct_circle(1, q_max)?, &param_circle(1, q_max)?)),
        2 => Ok(diff(2, q_max, &direct_sphere(1, q_max)?, &param_sphere(1, q_max)?)),
        _ => Err(Error::precondition("only S^1 and S^2 are supported")),
    }
}

fn line_of(coords: &[i64], q: i64) -> String {
    let mut s = String::new();
    for c in coords {
        s.push_str(&c.to_string());
        s.push(' ');
    }
    s.push_str(&q.to_string());
    s
}

/// Cache file for the enumeration of `S^n` up to `Q_max`.
pub fn cache_path(dir: &Path, n: usize, q_max: u64) -> PathBuf {
    dir.join(format!("s{n}_q{q_max}.txt"))
}

/// Writes points as sorted lines `A1 A2 [A3] Q`.
pub fn write_points(path: &Path, points: &[SpherePoint]) -> io::Result<()> {
    let mut sorted: Vec<&SpherePoint> = points.iter().collect();
    sorted.sort();
    let mut w = BufWriter::new(fs::File::create(path)?);
    for p in sorted {
        writeln!(w, "{p}")?;
    }
    w.flush()
}

pub fn read_points(path: &Path) -> Result<Vec<SpherePoint>> {
    let file = fs::File::open(path).map_err(|e| Error::precondition(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for line in io::BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::precondition(e.to_string()))?;
        let mut nums: Vec<BigInt> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::precondition(format!("bad cache line {line:?}"))))
            .collect::<Result<_>>()?;
        let q = nums.pop().ok_or_else(|| Error::precondition("empty cache line"))?;
        out.push(SpherePoint::new(nums, q)?);
    }
    Ok(out)
}

/// Enumeration of `S^n` up to `Q_max`, read from or written to `dir`.
pub fn cached_enumeration(dir: &Path, n: usize, q_max: u64) -> Result<Vec<SpherePoint>> {
    let path = cache_path(dir, n, q_max);
    if path.exists() {
        return read_points(&path);
    }
    let points = match n {
        1 => enumerate_circle(q_max)?,
        2 => enumerate_sphere(q_max)?,
        _ => return Err(Error::precondition("only S^1 and S^2 are supported")),
    };
    write_points(&path, &points).map_err(|e| Error::precondition(format!("{}: {e}", path.display())))?;
    Ok(points)
}

/// Integer window `[lo, hi]` around `x · 2^bits`.
fn scaled_bracket(x: &RealScalar, bits: u32) -> Result<(i128, i128)> {
    let iv = x.approx(bits)?;
    let scale = BigRational::from_integer(BigInt::from(1) << bits);
    let lo = (iv.lo() * &scale).floor().to_integer();
    let hi = (iv.hi() * &scale).ceil().to_integer();
    match (lo.to_i128(), hi.to_i128()) {
        (Some(l), Some(h)) => Ok((l, h)),
        _ => Err(Error::precondition("coordinate out of range")),
    }
}

/// Per-point bracket of `N = Q² − 2Q·(A·α) + Q²|α|²`, which equals `Q²·dist²`,
/// in units of `2^-bits`.
struct Window {
    bits: u32,
    alpha: Vec<(i128, i128)>,
    norm: (i128, i128),
}

impl Window {
    fn new(alpha: &[RealScalar], q_max: u64) -> Result<Self> {
        // |A·α| <= 1.01 Q, so every term stays below 4·Q²·2^bits
        let qbits = 64 - q_max.leading_zeros();
        let bits = 124u32.saturating_sub(2 * qbits);
        if bits < 32 {
            return Err(Error::precondition("Q_max too large for the bracket filter"));
        }
        let norm = alpha.iter().fold(RealScalar::zero(), |acc, a| &acc + &a.square());
        Ok(Window {
            bits,
            alpha: alpha.iter().map(|a| scaled_bracket(a, bits)).collect::<Result<_>>()?,
            norm: scaled_bracket(&norm, bits)?,
        })
    }

    fn bracket(&self, coords: &[i64], q: i64) -> (i128, i128) {
        let (mut dot_lo, mut dot_hi) = (0i128, 0i128);
        for (&a, &(lo, hi)) in coords.iter().zip(&self.alpha) {
            let a = a as i128;
            if a >= 0 {
                dot_lo += a * lo;
                dot_hi += a * hi;
            } else {
                dot_lo += a * hi;
                dot_hi += a * lo;
            }
        }
        let q = q as i128;
        let base = (q * q) << self.bits;
        (
            base - 2 * q * dot_hi + q * q * self.norm.0,
            base - 2 * q * dot_lo + q * q * self.norm.1,
        )
    }
}

/// Key bounds `N / Q^k` for the chosen normalization (`N = Q²·dist²`).
fn key_bound(n: i128, q: i64, mode: &Normalization, bits: u32) -> BigRational {
    let den = match mode {
        Normalization::Raw => BigInt::from(q) * BigInt::from(q),
        Normalization::TimesQ => BigInt::from(1),
        Normalization::TimesSqrtQT(_) => BigInt::from(q),
    };
    BigRational::new(BigInt::from(n), den << bits)
}

struct Group<const N: usize> {
    q: i64,
    lo: i128,
    hi: i128,
    members: Vec<([i64; N], i128)>,
}

fn best_at<const N: usize>(points: Vec<RawPoint<N>>, w: &Window) -> Option<Group<N>> {
    let q = points.first()?.1;
    let mut scored: Vec<([i64; N], (i128, i128))> =
        points.into_iter().map(|(c, _)| (c, w.bracket(&c, q))).collect();
    let hi = scored.iter().map(|s| s.1 .1).min()?;
    scored.retain(|s| s.1 .0 <= hi);
    let lo = scored.iter().map(|s| s.1 .0).min()?;
    Some(Group {
        q,
        lo,
        hi,
        members: scored.into_iter().map(|(c, (l, _))| (c, l)).collect(),
    })
}

fn minimize<const N: usize>(
    alpha: &[RealScalar],
    q_min: u64,
    q_max: u64,
    mode: &Normalization,
    prec: Precision,
    at: fn(i64) -> Vec<RawPoint<N>>,
) -> Result<ApproxRecord> {
    check_range(q_min, q_max)?;
    check_on_sphere(alpha, prec)?;
    let w = Window::new(alpha, q_max)?;
    let groups: Vec<Group<N>> = (q_min as i64..=q_max as i64)
        .into_par_iter()
        .filter_map(|q| best_at(at(q), &w))
        .collect();
    let best_hi = groups
        .iter()
        .map(|g| key_bound(g.hi, g.q, mode, w.bits))
        .min()
        .ok_or_else(|| Error::precondition("no rational points in range"))?;
    let mut finalists: Vec<(i64, [i64; N])> = Vec::new();
    for g in &groups {
        if key_bound(g.lo, g.q, mode, w.bits) > best_hi {
            continue;
        }
        for (c, lo) in &g.members {
            if key_bound(*lo, g.q, mode, w.bits) <= best_hi {
                finalists.push((g.q, *c));
            }
        }
    }
    // tie-break order: smaller Q, then lexicographic A
    finalists.sort();
    let mut best: Option<ApproxRecord> = None;
    for (q, c) in finalists {
        let rec = ApproxRecord::new(to_sphere_point(&(c, q)), alpha, mode)?;
        best = match best {
            Some(b) if cmp_real(&rec.key(mode), &b.key(mode), prec)? != Ordering::Less => Some(b),
            _ => Some(rec),
        };
    }
    Ok(best.expect("the best group has a finalist"))
}

/// Exact minimizer of the normalized distance to `α` over all rational points
/// with `Q_min <= Q <= Q_max`; ties go to the smaller `Q`, then to the
/// lexicographically smaller `A`.
pub fn best_approximation(
    alpha: &[RealScalar],
    q_min: u64,
    q_max: u64,
    mode: &Normalization,
    prec: Precision,
) -> Result<ApproxRecord> {
    match alpha.len() {
        2 => minimize(alpha, q_min, q_max, mode, prec, direct_circle_at),
        3 => minimize(alpha, q_min, q_max, mode, prec, direct_sphere_at),
        _ => Err(Error::precondition("only S^1 and S^2 are supported")),
    }
}

/// Number of points per denominator, for counting checks.
pub fn count_by_denominator<const N: usize>(points: &[RawPoint<N>]) -> Vec<(i64, usize)> {
    let mut out: Vec<(i64, usize)> = Vec::new();
    for p in points {
        match out.last_mut() {
            Some((q, c)) if *q == p.1 => *c += 1,
            _ => out.push((p.1, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::QuadSurd;
    use num_traits::Zero;
    use crate::stereo::forward_real;
    use std::collections::BTreeSet;

    fn pts<const N: usize>(v: &[RawPoint<N>]) -> BTreeSet<String> {
        v.iter().map(|p| line_of(&p.0, p.1)).collect()
    }

    #[test]
    fn small_circle_sets() {
        let one = direct_circle(1, 1).unwrap();
        assert_eq!(pts(&one), ["-1 0 1", "0 -1 1", "0 1 1", "1 0 1"].iter().map(|s| s.to_string()).collect());
        assert_eq!(direct_circle(1, 4).unwrap().len(), 4);
        let five = pts(&direct_circle(1, 5).unwrap());
        for s in ["3 4 5", "-3 4 5", "3 -4 5", "-3 -4 5", "4 3 5", "-4 -3 5"] {
            assert!(five.contains(s), "{s}");
        }
        assert_eq!(five.len(), 12);
    }

    #[test]
    fn small_sphere_sets() {
        assert_eq!(direct_sphere(1, 1).unwrap().len(), 6);
        assert_eq!(direct_sphere(1, 2).unwrap().len(), 6);
        let three = pts(&direct_sphere(1, 3).unwrap());
        for s in ["1 2 2 3", "-2 1 -2 3", "2 -2 -1 3"] {
            assert!(three.contains(s), "{s}");
        }
        // 6 axis points plus 3 positions × 8 signs for (1, 2, 2)
        assert_eq!(three.len(), 30);
    }

    #[test]
    fn generators_agree() {
        for q in [1, 2, 5, 25, 130] {
            assert!(dual_generation(1, q).unwrap().agrees(), "S1 {q}");
        }
        for q in [1, 3, 9, 20] {
            assert!(dual_generation(2, q).unwrap().agrees(), "S2 {q}");
        }
        assert_eq!(pts(&direct_circle(40, 90).unwrap()), pts(&param_circle(40, 90).unwrap()));
        assert_eq!(pts(&direct_sphere(7, 15).unwrap()), pts(&param_sphere(7, 15).unwrap()));
    }

    #[test]
    fn enumerated_points_are_primitive() {
        for (c, q) in direct_sphere(1, 25).unwrap() {
            assert_eq!(c.iter().map(|a| a * a).sum::<i64>(), q * q);
            assert_eq!(c.iter().fold(q, |g, a| g.gcd(a)), 1);
        }
    }

    #[test]
    fn counts_are_monotone() {
        let mut last = 0;
        for q in 1..40 {
            let n = direct_circle(1, q).unwrap().len();
            assert!(n >= last);
            last = n;
        }
        let counts = count_by_denominator(&direct_circle(1, 30).unwrap());
        assert_eq!(counts[0], (1, 4));
        assert!(counts.contains(&(25, 8)));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let first = cached_enumeration(dir.path(), 2, 9).unwrap();
        let text = fs::read_to_string(cache_path(dir.path(), 2, 9)).unwrap();
        assert!(text.starts_with("-1 0 0 1\n"));
        let again = cached_enumeration(dir.path(), 2, 9).unwrap();
        assert_eq!(first, again);
    }

    #[test]
    fn trivial_best_approximations() {
        let p = Precision::default();
        let north = [RealScalar::zero(), RealScalar::one()];
        let rec = best_approximation(&north, 1, 50, &Normalization::TimesQ, p).unwrap();
        assert_eq!(rec.point.to_string(), "0 1 1");
        assert_eq!(rec.dist_sq.as_rational().unwrap(), &BigRational::zero());
        let pole = [RealScalar::zero(), RealScalar::zero(), RealScalar::one()];
        let rec = best_approximation(&pole, 1, 10, &Normalization::TimesSqrtQT(100.into()), p).unwrap();
        assert_eq!(rec.point.to_string(), "0 0 1 1");
        assert!(rec.normalized.as_rational().unwrap().is_zero());
    }

    #[test]
    fn best_matches_naive_scan() {
        let p = Precision::default();
        let beta = RealScalar::from(QuadSurd::new(17.into(), 1.into(), 2.into(), 41.into()).unwrap());
        let alpha = forward_real(&[beta]).unwrap();
        for mode in [Normalization::Raw, Normalization::TimesQ, Normalization::TimesSqrtQT(50.into())] {
            let fast = best_approximation(&alpha, 3, 200, &mode, p).unwrap();
            let mut naive: Option<ApproxRecord> = None;
            for (c, q) in direct_circle(3, 200).unwrap() {
                let rec = ApproxRecord::new(to_sphere_point(&(c, q)), &alpha, &mode).unwrap();
                // points arrive in (Q, A) order, so only strict improvements replace
                let better = match &naive {
                    None => true,
                    Some(b) => cmp_real(&rec.key(&mode), &b.key(&mode), p).unwrap() == Ordering::Less,
                };
                if better {
                    naive = Some(rec);
                }
            }
            assert_eq!(fast.point, naive.unwrap().point, "{mode:?}");
        }
    }

    #[test]
    fn ties_prefer_smaller_q_then_lexicographic() {
        // (1, 0) is equidistant from (0, 1) and (0, −1)
        let east = [RealScalar::one(), RealScalar::zero()];
        let rec = best_approximation(&east, 2, 30, &Normalization::Raw, Precision::default()).unwrap();
        // nearest points come in the conjugate pair (A1, ±A2); the negative one sorts first
        assert!(rec.point.coords()[1] < BigInt::zero());
        assert!(rec.point.denom() >= &BigInt::from(2));
    }
}
