use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sphere_approx::contfrac::expand;
use sphere_approx::oracle::{enumerate_circle, enumerate_sphere};
use sphere_approx::sphere2::dirichlet_search;
use sphere_approx::{Precision, QuadSurd, RealScalar};

fn surd(p: i64, q: i64, d: i64, r: i64) -> RealScalar {
    RealScalar::from(QuadSurd::new(p.into(), q.into(), d.into(), r.into()).expect("surd"))
}

fn bench_dirichlet(c: &mut Criterion) {
    let beta = [surd(0, 1, 2, 2), surd(-1, 1, 5, 2)];
    let prec = Precision::default();
    let mut group = c.benchmark_group("dirichlet_search");
    for t in [100u64, 10_000, 1_000_000] {
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| dirichlet_search(black_box(&beta), t, prec).expect("solution"))
        });
    }
    group.finish();
}

fn bench_surd_cf(c: &mut Criterion) {
    let prec = Precision::default();
    let mut group = c.benchmark_group("surd_expansion");
    for (name, x) in [
        ("sqrt2", surd(0, 1, 2, 1)),
        ("(17+sqrt2)/41", surd(17, 1, 2, 41)),
        ("sqrt_94", surd(0, 1, 94, 1)),
        ("(3+sqrt_1019)/7", surd(3, 1, 1019, 7)),
    ] {
        group.bench_function(name, |b| b.iter(|| expand(black_box(&x), 1, prec).expect("expansion")));
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_enumeration");
    group.sample_size(10);
    for q_max in [1_000u64, 10_000] {
        group.bench_with_input(BenchmarkId::new("circle", q_max), &q_max, |b, &q| {
            b.iter(|| enumerate_circle(q).expect("points"))
        });
    }
    for q_max in [30u64, 100] {
        group.bench_with_input(BenchmarkId::new("sphere", q_max), &q_max, |b, &q| {
            b.iter(|| enumerate_sphere(q).expect("points"))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_dirichlet, bench_surd_cf, bench_oracle);
criterion_main!(benches);
