//! Invariant suites behind `verify`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sphere_approx::contfrac::{convergents, parity_select};
use sphere_approx::numeric::certify_lt;
use sphere_approx::oracle::dual_generation;
use sphere_approx::sphere2::{dirichlet_search, f_eval, membership, Body};
use sphere_approx::stereo::{forward, inverse, reduced_denominator_n1};
use sphere_approx::{BigRational, CFExpansion, Precision, RealScalar, StereoParam, Tail, Transform4};

use crate::args::{GlobalOpts, VerifyArgs};
use crate::output::{lines, render};
use crate::CliError;

#[derive(Serialize)]
struct VerifyRow {
    suite: &'static str,
    cases: usize,
    status: &'static str,
    detail: String,
}

type Suite = fn(&mut ChaCha8Rng, usize, Precision) -> Result<(usize, Option<String>), CliError>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn small_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> BigRational {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn parity_law(_: &mut ChaCha8Rng, _: usize, _: Precision) -> Result<(usize, Option<String>), CliError> {
    let mut cases = 0;
    for q in 1..=100i64 {
        for b in -100..=100i64 {
            if b.gcd(&q) != 1 {
                continue;
            }
            cases += 1;
            let n = q * q + b * b;
            let want = BigInt::from(if (b - q) % 2 != 0 { n } else { n / 2 });
            let got = forward(&StereoParam::from_ints(&[b], q)?);
            if *got.denom() != want || reduced_denominator_n1(&b.into(), &q.into())? != want {
                return Ok((cases, Some(format!("(b, q) = ({b}, {q})"))));
            }
        }
    }
    Ok((cases, None))
}

fn round_trip(rng: &mut ChaCha8Rng, samples: usize, _: Precision) -> Result<(usize, Option<String>), CliError> {
    for i in 0..samples {
        let n = if i % 2 == 0 { 1 } else { 2 };
        let b: Vec<i64> = (0..n).map(|_| rng.gen_range(-500..=500)).collect();
        let p = StereoParam::from_ints(&b, rng.gen_range(1..=500))?;
        let x = forward(&p);
        if inverse(&x)? != p {
            return Ok((i + 1, Some(format!("parameter {p}"))));
        }
    }
    Ok((samples, None))
}

fn parity_pairs(rng: &mut ChaCha8Rng, samples: usize, _: Precision) -> Result<(usize, Option<String>), CliError> {
    let mut pairs = 0;
    for _ in 0..samples.div_ceil(40).max(1) {
        let mut terms = vec![BigInt::from(rng.gen_range(-5..=5i64))];
        terms.extend((1..40).map(|_| BigInt::from(rng.gen_range(1..=50i64))));
        let cf = CFExpansion::new(terms, Tail::Finite)?;
        let cs = convergents(&cf, 39)?;
        for w in cs.windows(2) {
            let (_, pick) = parity_select(&w[0].ratio(), &w[1].ratio())?;
            pairs += 1;
            if !(pick.numer().is_odd() && pick.denom().is_odd()) {
                return Ok((pairs, Some(format!("pair {}, {}", w[0], w[1]))));
            }
        }
    }
    Ok((pairs, None))
}

fn form_invariance(rng: &mut ChaCha8Rng, samples: usize, _: Precision) -> Result<(usize, Option<String>), CliError> {
    let one = BigRational::one();
    for i in 0..samples {
        let w: [BigRational; 4] = std::array::from_fn(|_| small_rational(rng, 1000, 97));
        let t = rat(rng.gen_range(1..=1000), rng.gen_range(1..=1000));
        let g = Transform4::g_t(t)?;
        let r = Transform4::r_beta(small_rational(rng, 100, 60), small_rational(rng, 100, 60));
        let f = f_eval(&w);
        if f_eval(&g.apply(&w)) != f || f_eval(&r.apply(&w)) != f || g.determinant() != one || r.determinant() != one {
            return Ok((i + 1, Some(format!("sample {i}"))));
        }
    }
    Ok((samples, None))
}

fn body_inclusion(rng: &mut ChaCha8Rng, samples: usize, _: Precision) -> Result<(usize, Option<String>), CliError> {
    let k = Body::K(rat(98, 100));
    let mut inside = 0;
    while inside < samples {
        let v: [BigRational; 4] = std::array::from_fn(|_| rat(rng.gen_range(-9999..=9999), 10_000));
        let w = [&v[0] + &v[1], &v[0] - &v[1], v[2].clone(), v[3].clone()];
        if !membership(&w, &k) {
            continue;
        }
        inside += 1;
        if !membership(&w, &Body::P) {
            return Ok((inside, Some(format!("point {w:?}"))));
        }
    }
    Ok((samples, None))
}

fn dirichlet(rng: &mut ChaCha8Rng, samples: usize, prec: Precision) -> Result<(usize, Option<String>), CliError> {
    let trials = (samples / 10).max(1);
    for i in 0..trials {
        let beta = [
            RealScalar::Rational(rat(rng.gen_range(0..=10_000), 10_000)),
            RealScalar::Rational(rat(rng.gen_range(0..=10_000), 10_000)),
        ];
        let t = rng.gen_range(1..=1000u64);
        let s = dirichlet_search(&beta, t, prec)?;
        let bound = RealScalar::Rational(BigRational::new(BigInt::from(4) * &s.q, t.into()));
        let norm = &s.b[0] * &s.b[0] + &s.b[1] * &s.b[1];
        let ok = s.q.is_positive()
            && s.q <= BigInt::from(t)
            && certify_lt(&s.delta, &bound, prec)?
            && (norm % &s.q) == BigInt::from(0);
        if !ok {
            return Ok((i + 1, Some(format!("T = {t}, q = {}", s.q))));
        }
    }
    Ok((trials, None))
}

fn oracle(_: &mut ChaCha8Rng, _: usize, _: Precision) -> Result<(usize, Option<String>), CliError> {
    let mut points = 0;
    for (n, q_max) in [(1, 200), (2, 30)] {
        let a = dual_generation(n, q_max)?;
        points += a.direct;
        if !a.agrees() {
            return Ok((points, Some(format!("S^{n} up to {q_max}"))));
        }
    }
    Ok((points, None))
}

/// Runs every suite; returns the rendered report and the number of failures.
pub fn run(g: &GlobalOpts, args: &VerifyArgs) -> Result<(String, usize), CliError> {
    let suites: [(&'static str, Suite); 7] = [
        ("denominator-parity", parity_law),
        ("param-round-trip", round_trip),
        ("parity-select", parity_pairs),
        ("form-invariance", form_invariance),
        ("k-inside-p", body_inclusion),
        ("dirichlet", dirichlet),
        ("dual-generation", oracle),
    ];
    let prec = Precision::with_max_bits(g.precision);
    let mut rows = Vec::new();
    for (i, (name, suite)) in suites.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed.wrapping_add(i as u64));
        let (cases, failure) = suite(&mut rng, args.samples, prec)?;
        rows.push(VerifyRow {
            suite: name,
            cases,
            status: if failure.is_some() { "FAIL" } else { "PASS" },
            detail: failure.unwrap_or_default(),
        });
    }
    let failures = rows.iter().filter(|r| r.status == "FAIL").count();
    let body = render(g.format, &rows, || {
        lines(rows.iter().map(|r| {
            let detail = if r.detail.is_empty() { String::new() } else { format!(": {}", r.detail) };
            format!("{} {} ({} cases){detail}", r.status, r.suite, r.cases)
        }))
    })?;
    Ok((body, failures))
}
