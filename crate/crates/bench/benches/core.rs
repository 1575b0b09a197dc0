use std::hint::black_box;

use cochain_core::approx::{
    check, seed_spherical_candidate, CertifiedApproximator, SearchConfig, Target, Witness, WitnessKind,
};
use cochain_core::chains::fdiam;
use cochain_core::codec::{pair, seq_decode, seq_encode, unpair};
use cochain_core::effsets::SetSpec;
use cochain_core::rational::{pow2, rat};
use cochain_core::{Ball, Point, Space};
use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigUint;

fn codec(c: &mut Criterion) {
    let (x, y) = (BigUint::from(u64::MAX), BigUint::from(12_345_678u64));
    c.bench_function("pair_u64_sized", |b| b.iter(|| unpair(&pair(black_box(&x), black_box(&y)))));
    let s: Vec<BigUint> = (0..8u64).map(BigUint::from).collect();
    c.bench_function("seq_round_trip_8", |b| b.iter(|| seq_decode(&seq_encode(black_box(&s)).unwrap())));
}

fn ring(n: usize) -> Vec<Ball> {
    (0..n as i64)
        .map(|j| {
            let t = rat(2 * j - n as i64, n as i64);
            let den = rat(1, 1) + &t * &t;
            let p = Point::new(vec![(rat(1, 1) - &t * &t) / &den, rat(2, 1) * &t / &den]);
            Ball::new(p, pow2(-4)).unwrap()
        })
        .collect()
}

fn diameter(c: &mut Criterion) {
    let space = Space::euclidean(2).unwrap();
    let balls = ring(32);
    c.bench_function("fdiam_upper_20_ring32", |b| b.iter(|| fdiam(&space, black_box(&balls)).upper(20)));
}

fn circle(c: &mut Criterion) {
    let spec = SetSpec::named("circle").unwrap();
    let witness = Witness::builtin(&spec).unwrap();
    let space = Space::euclidean(2).unwrap();
    let set = spec.build(&space).unwrap();
    let Witness::Sphere(w) = &witness else { unreachable!() };
    let chain = seed_spherical_candidate(w, 8, &rat(1, 16)).unwrap();
    let target =
        Target { space: &space, kind: WitnessKind::Sphere, set: &*set, boundary: None, sets: witness.sets(), k: 1 };
    c.bench_function("check_circle_seed_m8", |b| b.iter(|| check(&target, black_box(&chain), 16, None).unwrap()));

    let mut group = c.benchmark_group("certify");
    group.sample_size(10);
    let search = CertifiedApproximator::new(&space, set.clone(), witness.clone(), SearchConfig::default()).unwrap();
    for k in [1, 2] {
        group.bench_function(format!("circle_k{k}"), |b| b.iter(|| search.certify(k).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, codec, diameter, circle);
criterion_main!(benches);
