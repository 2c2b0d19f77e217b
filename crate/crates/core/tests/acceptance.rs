//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sphere_approx::circle::{convergent_trace, sharpness_experiment};
use sphere_approx::contfrac::{convergents, parity_select};
use sphere_approx::numeric::{certify_lt, cmp_real};
use sphere_approx::oracle::dual_generation;
use sphere_approx::sphere2::{
    approx_sphere_dirichlet, approx_sphere_stream, dirichlet_search, f_eval, membership,
    satisfies_chain, solutions_stream, Body, StreamOptions,
};
use sphere_approx::stereo::{chord_distance_sq, forward, forward_real, reduced_denominator_n1};
use sphere_approx::{
    approx_circle, BigRational, CFExpansion, CircleOptions, Precision, QuadSurd, RealScalar,
    SpherePoint, StereoParam, Tail, Transform4,
};

type Outcome = Result<String, String>;

const SQUARE_FREE: [i64; 17] = [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23, 29, 31];

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn real(n: i64, d: i64) -> RealScalar {
    RealScalar::Rational(rat(n, d))
}

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn ok_or_fail<T, E: std::fmt::Display>(r: Result<T, E>, ctx: &str) -> Result<T, String> {
    r.map_err(|e| format!("{ctx}: {e}"))
}

/// `(p + q√d)/r` with a square-free `d` and `q != 0`.
fn random_surd(rng: &mut ChaCha8Rng) -> QuadSurd {
    let d = SQUARE_FREE[rng.gen_range(0..SQUARE_FREE.len())];
    let mut q = rng.gen_range(1..=6i64);
    if rng.gen_bool(0.5) {
        q = -q;
    }
    let p = rng.gen_range(-30..=30i64);
    let r = rng.gen_range(1..=30i64);
    QuadSurd::new(p.into(), q.into(), d.into(), r.into()).expect("nonzero denominator")
}

/// A surd reduced into `[0, 1)`.
fn random_unit_surd(rng: &mut ChaCha8Rng) -> QuadSurd {
    let s = random_surd(rng);
    let shift = QuadSurd::from_rational(&BigRational::from_integer(s.floor()));
    s.checked_sub(&shift).expect("rational shift")
}

fn random_unit_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let den = rng.gen_range(1..=1_000_000i64);
    rat(rng.gen_range(0..=den), den)
}

fn random_circle_target(rng: &mut ChaCha8Rng) -> Vec<RealScalar> {
    forward_real(&[RealScalar::from(random_surd(rng))]).expect("one parameter")
}

fn random_sphere_target(rng: &mut ChaCha8Rng) -> Vec<RealScalar> {
    let beta = [RealScalar::from(random_surd(rng)), RealScalar::from(random_surd(rng))];
    forward_real(&beta).expect("two parameters")
}

/// Certified `Q² · |α − A/Q|² < bound`, recomputed from the point.
fn q2_dist2_below(point: &SpherePoint, alpha: &[RealScalar], weight: &BigInt, bound: &RealScalar, prec: Precision) -> Result<bool, String> {
    let d2 = ok_or_fail(chord_distance_sq(point, alpha), "distance")?;
    let key = &RealScalar::from(weight) * &d2;
    ok_or_fail(certify_lt(&key, bound, prec), "certification")
}

/// Certified `Σ (qβ_i − b_i)²`.
fn delta_of(q: &BigInt, b: &[BigInt; 2], beta: &[RealScalar]) -> RealScalar {
    let qr = RealScalar::from(q);
    let mut sum = RealScalar::zero();
    for (bi, x) in b.iter().zip(beta) {
        let e = &(&qr * x) - &RealScalar::from(bi);
        sum = &sum + &e.square();
    }
    sum
}

fn denominator_parity_law() -> Outcome {
    let mut checked = 0u64;
    for q in 1..=200i64 {
        for b in -200..=200i64 {
            if b.gcd(&q) != 1 {
                continue;
            }
            let n = q * q + b * b;
            let expected = if (b - q) % 2 != 0 { n } else { n / 2 };
            let point = forward(&StereoParam::from_ints(&[b], q).map_err(|e| e.to_string())?);
            let formula = ok_or_fail(reduced_denominator_n1(&b.into(), &q.into()), "formula")?;
            if *point.denom() != BigInt::from(expected) || formula != BigInt::from(expected) {
                return fail(format!("(b, q) = ({b}, {q}): got {} / {formula}, want {expected}", point.denom()));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} coprime pairs"))
}

fn parity_select_pairs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pairs = 0u64;
    for _ in 0..100 {
        let mut terms = vec![BigInt::from(rng.gen_range(-5..=5i64))];
        for _ in 1..40 {
            let a = if rng.gen_bool(0.8) { rng.gen_range(1..=4i64) } else { rng.gen_range(5..=1000i64) };
            terms.push(a.into());
        }
        let cf = ok_or_fail(CFExpansion::new(terms, Tail::Finite), "expansion")?;
        let cs = ok_or_fail(convergents(&cf, 39), "convergents")?;
        let fracs: Vec<BigRational> = cs.iter().map(|c| c.ratio()).collect();
        for i in 0..fracs.len() {
            for j in i + 1..fracs.len() {
                let (x, y) = (&fracs[i], &fracs[j]);
                let det = x.numer() * y.denom() - y.numer() * x.denom();
                if !det.abs().is_one() {
                    continue;
                }
                let (_, pick) = ok_or_fail(parity_select(x, y), "parity_select")?;
                if !(pick.numer().is_odd() && pick.denom().is_odd()) {
                    return fail(format!("pair ({x}, {y}) selected {pick}"));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} unimodular pairs"))
}

fn circle_records() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = CircleOptions {
        prec: Precision::with_max_bits(512),
        ..CircleOptions::default()
    };
    let bound = real(121, 200);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let alpha = random_circle_target(&mut rng);
        let recs = ok_or_fail(approx_circle(&alpha, &rat(1, 10), 20, &opts), &format!("trial {trial}"))?;
        if recs.len() < 20 {
            return fail(format!("trial {trial}: {} records", recs.len()));
        }
        for w in recs.windows(2) {
            if w[0].q() >= w[1].q() {
                return fail(format!("trial {trial}: Q not increasing"));
            }
        }
        for rec in &recs {
            let q2 = rec.q() * rec.q();
            if !q2_dist2_below(&rec.point, &alpha, &q2, &bound, opts.prec)? {
                return fail(format!("trial {trial}: {} not certified", rec.point));
            }
            worst = worst.max(rec.normalized.to_f64());
        }
    }
    Ok(format!("50 targets x 20 records, max Q*dist {worst:.4} < {:.4}", 1.1 / 2f64.sqrt()))
}

fn golden_limit() -> Outcome {
    let prec = Precision::default();
    let beta = QuadSurd::new((-1).into(), 1.into(), 5.into(), 2.into()).expect("surd");
    let alpha = ok_or_fail(forward_real(&[RealScalar::from(beta)]), "target")?;
    let trace = ok_or_fail(convergent_trace(&alpha, 40, prec), "trace")?;
    if trace.len() != 41 {
        return fail(format!("{} convergents", trace.len()));
    }
    let inv_sqrt5 = RealScalar::from(QuadSurd::new(0.into(), 1.into(), 5.into(), 5.into()).expect("surd"));
    let hi = &inv_sqrt5 + &real(2, 100);
    let lo = &inv_sqrt5 - &real(2, 100);
    let mut min = &trace[0];
    for rec in &trace[1..] {
        if ok_or_fail(cmp_real(&rec.normalized, &min.normalized, prec), "compare")?.is_lt() {
            min = rec;
        }
    }
    if !ok_or_fail(certify_lt(&min.normalized, &hi, prec), "upper")? {
        return fail(format!("min {} above bound", min.normalized.to_decimal(6)));
    }
    for (nu, rec) in trace.iter().enumerate().skip(20) {
        if !ok_or_fail(certify_lt(&lo, &rec.normalized, prec), "lower")? {
            return fail(format!("nu = {nu}: {} below bound", rec.normalized.to_decimal(6)));
        }
    }
    Ok(format!("min Q*dist {} (1/sqrt5 = {})", min.normalized.to_decimal(6), inv_sqrt5.to_decimal(6)))
}

fn sharpness() -> Outcome {
    let prec = Precision::default();
    let report = ok_or_fail(sharpness_experiment(1000, 20000, prec), "oracle")?;
    let m = &report.global_min.normalized;
    if !ok_or_fail(certify_lt(&real(69, 100), m, prec), "lower")? {
        return fail(format!("a point beats 0.69: {} at {}", m.to_decimal(6), report.global_min.point));
    }
    if !ok_or_fail(certify_lt(m, &real(72, 100), prec), "upper")? {
        return fail(format!("min {} above 0.72", m.to_decimal(6)));
    }
    Ok(format!("min Q*dist {} at Q = {}", m.to_decimal(6), report.global_min.q()))
}

fn dirichlet_trials() -> Outcome {
    let prec = Precision::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let bounds = [10u64, 100, 1000, 10000];
    for trial in 0..1000 {
        let t = bounds[trial % 4];
        let beta: Vec<RealScalar> = (0..2)
            .map(|_| {
                if trial % 2 == 0 {
                    RealScalar::Rational(random_unit_rational(&mut rng))
                } else {
                    RealScalar::from(random_unit_surd(&mut rng))
                }
            })
            .collect();
        let s = ok_or_fail(dirichlet_search(&beta, t, prec), &format!("trial {trial}"))?;
        if s.q < BigInt::one() || s.q > BigInt::from(t) {
            return fail(format!("trial {trial}: q = {} outside [1, {t}]", s.q));
        }
        let delta = delta_of(&s.q, &s.b, &beta);
        let bound = RealScalar::Rational(BigRational::new(BigInt::from(4) * &s.q, t.into()));
        if !ok_or_fail(certify_lt(&delta, &bound, prec), "delta")? {
            return fail(format!("trial {trial}: delta not below 4q/T"));
        }
        let norm = &s.b[0] * &s.b[0] + &s.b[1] * &s.b[1];
        if !(&norm % &s.q).is_zero() || &s.q * &s.a != norm {
            return fail(format!("trial {trial}: q does not divide |b|^2"));
        }
    }
    Ok("1000 trials".into())
}

fn stream_solutions() -> Outcome {
    let opts = StreamOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gamma = rat(98, 100);
    let bound = real(9604, 10000);
    let mut largest_q = BigInt::zero();
    for trial in 0..20 {
        let beta = [RealScalar::from(random_surd(&mut rng)), RealScalar::from(random_surd(&mut rng))];
        let sols = ok_or_fail(solutions_stream(&beta, &gamma, 10, &opts), &format!("trial {trial}"))?;
        if sols.len() < 10 {
            return fail(format!("trial {trial}: {} solutions", sols.len()));
        }
        let mut seen = HashSet::new();
        for s in &sols {
            let key = (BigRational::new(s.b[0].clone(), s.q.clone()), BigRational::new(s.b[1].clone(), s.q.clone()));
            if !seen.insert(key) {
                return fail(format!("trial {trial}: repeated solution"));
            }
            if !s.invariants_hold() {
                return fail(format!("trial {trial}: q does not divide |b|^2"));
            }
            if !ok_or_fail(certify_lt(&delta_of(&s.q, &s.b, &beta), &bound, opts.prec), "delta")? {
                return fail(format!("trial {trial}: delta not below 0.9604"));
            }
            largest_q = largest_q.max(s.q.clone());
        }
    }
    Ok(format!("20 targets x 10 solutions, largest q {largest_q}"))
}

fn sphere_stream_records() -> Outcome {
    let opts = StreamOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let c = &RealScalar::from(2) * &RealScalar::from(3).div(&RealScalar::pi()).expect("π").sqrt();
    let bound = (&c + &real(1, 10)).square();
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let alpha = random_sphere_target(&mut rng);
        let recs = ok_or_fail(approx_sphere_stream(&alpha, &rat(1, 10), 10, &opts), &format!("trial {trial}"))?;
        if recs.len() < 10 {
            return fail(format!("trial {trial}: {} records", recs.len()));
        }
        let distinct: HashSet<_> = recs.iter().map(|r| r.point.clone()).collect();
        if distinct.len() != recs.len() {
            return fail(format!("trial {trial}: repeated point"));
        }
        for rec in &recs {
            let q2 = rec.q() * rec.q();
            if !q2_dist2_below(&rec.point, &alpha, &q2, &bound, opts.prec)? {
                return fail(format!("trial {trial}: {} not certified", rec.point));
            }
            worst = worst.max(rec.normalized.to_f64());
        }
    }
    Ok(format!("20 targets x 10 records, max Q*dist {worst:.4}"))
}

fn sphere_dirichlet_records() -> Outcome {
    let prec = Precision::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = 10_000u64;
    let bound = real(441, 25);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let alpha = random_sphere_target(&mut rng);
        let out = ok_or_fail(approx_sphere_dirichlet(&alpha, t, prec), &format!("trial {trial}"))?;
        let rec = &out.record;
        if *rec.q() > BigInt::from(t) {
            return fail(format!("trial {trial}: Q = {} above T", rec.q()));
        }
        let qt = rec.q() * BigInt::from(t);
        if !q2_dist2_below(&rec.point, &alpha, &qt, &bound, prec)? {
            return fail(format!("trial {trial}: sqrt(QT)*dist not below 4.2"));
        }
        let Some(s) = &out.solution else {
            return fail(format!("trial {trial}: no lattice solution"));
        };
        if !ok_or_fail(satisfies_chain(s, out.search_t, prec), "chain")? {
            return fail(format!("trial {trial}: chain fails at T = {}", out.search_t));
        }
        worst = worst.max(rec.normalized.to_f64());
    }
    Ok(format!("20 targets, max sqrt(QT)*dist {worst:.4}"))
}

fn random_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> BigRational {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn apparatus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let one = BigRational::one();
    for i in 0..10_000 {
        let w: [BigRational; 4] = std::array::from_fn(|_| random_rational(&mut rng, 1000, 97));
        let t = rat(rng.gen_range(1..=1000), rng.gen_range(1..=1000));
        let g = ok_or_fail(Transform4::g_t(t), "G_t")?;
        let r = Transform4::r_beta(random_rational(&mut rng, 100, 60), random_rational(&mut rng, 100, 60));
        let f = f_eval(&w);
        if f_eval(&g.apply(&w)) != f || f_eval(&r.apply(&w)) != f {
            return fail(format!("sample {i}: f not invariant"));
        }
        if g.determinant() != one || r.determinant() != one {
            return fail(format!("sample {i}: determinant differs from 1"));
        }
    }
    let k = Body::K(rat(98, 100));
    let mut inside = 0;
    let mut drawn = 0;
    while inside < 10_000 {
        drawn += 1;
        let w: [BigRational; 4] = std::array::from_fn(|_| rat(rng.gen_range(-9999..=9999), 10_000));
        let w = [&w[0] + &w[1], &w[0] - &w[1], w[2].clone(), w[3].clone()];
        if !membership(&w, &k) {
            continue;
        }
        inside += 1;
        if f_eval(&w).abs() >= one || !membership(&w, &Body::P) {
            return fail(format!("point {w:?} of K(0.98) outside P"));
        }
    }
    Ok(format!("10000 invariance samples, 10000 points of K(0.98) from {drawn} draws"))
}

fn oracle_equivalence() -> Outcome {
    let mut parts = Vec::new();
    for (n, q_max) in [(1usize, 500u64), (2, 60)] {
        let a = ok_or_fail(dual_generation(n, q_max), "dual generation")?;
        if !a.agrees() {
            return fail(format!(
                "S^{n}: direct {} vs param {}, e.g. {:?} / {:?}",
                a.direct,
                a.param,
                a.only_direct.first(),
                a.only_param.first()
            ));
        }
        parts.push(format!("S^{n} Q <= {q_max}: {} points", a.direct));
    }
    Ok(parts.join(", "))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "reduced denominator parity law", limit: Duration::from_secs(5), run: denominator_parity_law },
        Criterion { id: 2, name: "parity_select on unimodular pairs", limit: Duration::from_secs(5), run: parity_select_pairs },
        Criterion { id: 3, name: "approx_circle records below 1.1/sqrt2", limit: Duration::from_secs(120), run: circle_records },
        Criterion { id: 4, name: "golden ratio convergent limit", limit: Duration::from_secs(10), run: golden_limit },
        Criterion { id: 5, name: "sharpness over 1000 <= Q <= 20000", limit: Duration::from_secs(300), run: sharpness },
        Criterion { id: 6, name: "dirichlet_search (i) (ii) (iii)", limit: Duration::from_secs(180), run: dirichlet_trials },
        Criterion { id: 7, name: "solutions_stream at gamma = 0.98", limit: Duration::from_secs(120), run: stream_solutions },
        Criterion { id: 8, name: "approx_sphere_stream below 2sqrt(3/pi)+0.1", limit: Duration::from_secs(180), run: sphere_stream_records },
        Criterion { id: 9, name: "approx_sphere_dirichlet at T = 10^4", limit: Duration::from_secs(60), run: sphere_dirichlet_records },
        Criterion { id: 10, name: "quadratic form, bodies and determinants", limit: Duration::from_secs(30), run: apparatus },
        Criterion { id: 11, name: "oracle dual generation", limit: Duration::from_secs(120), run: oracle_equivalence },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(detail) if elapsed <= c.limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; over time limit")),
            Err(msg) => ("FAIL", msg),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {:>2} {status} [{:>7.2}s / {}s] {}: {detail}",
            c.id,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            c.name
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
