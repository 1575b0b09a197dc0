mod common;

use cochain_core::chains::{fdiam, is_proper, Chain};
use cochain_core::rational::{int, pow2, rat, Rational};
use cochain_core::space::{
    closed_union_in_union, closed_unions_disjoint, point_in_open_ball, point_in_open_union, HilbertCube,
};
use cochain_core::{Ball, Point, Space, Verdict};
use common::*;
use num_bigint::BigUint;
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spaces() -> Vec<Space> {
    vec![
        Space::euclidean(1).unwrap(),
        Space::euclidean(2).unwrap(),
        Space::euclidean(3).unwrap(),
        Space::hilbert_cube(),
    ]
}

/// `|F - d| < 2^-k`, checked on squares for `ℝⁿ` and exactly in `I^∞`.
fn within(space: &Space, a: &Point, b: &Point, f: &Rational, k: u32) -> bool {
    let e = pow2(-(k as i64));
    match space.spec() {
        cochain_core::SpaceSpec::HilbertCube => (f - HilbertCube.dist(a, b)).abs() < e,
        _ => {
            let d2 = dist_sq(a, b);
            let lo = f - &e;
            let hi = f + &e;
            (lo.is_negative() || &lo * &lo < d2) && d2 < &hi * &hi
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn triangle_slack(which in 0usize..4, i in any::<u32>(), j in any::<u32>(), l in any::<u32>(), k in 0u32..30) {
        let space = &spaces()[which];
        let p = |x: u32| space.dense_point(&BigUint::from(x));
        let (a, b, c) = (p(i), p(j), p(l));
        let lhs = space.dist_approx(&a, &b, k);
        let rhs = space.dist_approx(&a, &c, k + 2) + space.dist_approx(&c, &b, k + 2) + int(3) * pow2(-(k as i64) - 1);
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn distance_approximations_meet_their_contract(which in 0usize..4, i in any::<u64>(), j in any::<u64>(), k in 0u32..40) {
        let space = &spaces()[which];
        let (a, b) = (space.dense_point(&BigUint::from(i)), space.dense_point(&BigUint::from(j)));
        let f = space.dist_approx(&a, &b, k);
        prop_assert!(within(space, &a, &b, &f, k));
        prop_assert_eq!(f, space.dist_approx(&b, &a, k));
    }

    #[test]
    fn dense_points_have_indices(which in 0usize..4, i in any::<u64>()) {
        let space = &spaces()[which];
        let p = space.dense_point(&BigUint::from(i));
        let j = space.point_index(&p).unwrap();
        prop_assert_eq!(space.dense_point(&j), p);
    }
}

/// Once `Yes`, always `Yes`, and never before the reported stage.
fn monotone(verdict: impl Fn(u32) -> Verdict, top: u32) -> bool {
    let vs: Vec<Verdict> = (0..=top).map(&verdict).collect();
    match vs.iter().position(Verdict::is_yes) {
        None => true,
        Some(first) => vs[first..].iter().all(Verdict::is_yes) && vs[first].stage().is_some_and(|s| s <= first as u32),
    }
}

#[test]
fn verdicts_are_monotone_in_fuel() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let r2 = Space::euclidean(2).unwrap();
    for _ in 0..100 {
        let b = random_ball(&mut rng, 2, 1.0, 1.0, 10);
        let p = point_in_box(&mut rng, 2, 1.5, 12);
        assert!(monotone(|t| point_in_open_ball(&*r2, &p, &b, t), 24));

        let j: Vec<Ball> = (0..4).map(|_| random_ball(&mut rng, 2, 1.0, 1.0, 8)).collect();
        assert!(monotone(|t| point_in_open_union(&*r2, &p, &j, t), 24));

        let a = vec![random_ball(&mut rng, 2, 0.5, 0.4, 8)];
        assert!(monotone(|t| closed_union_in_union(&r2, &a, &j, t).unwrap(), 8));

        let chain = Chain::from_cell_balls(1, 1, vec![vec![a[0].clone()], vec![j[0].clone()]]).unwrap();
        let eps = dyadic_in(&mut rng, 0.01, 0.5, 10);
        assert!(monotone(|t| is_proper(&r2, &chain.all(), &eps, t), 20));

        let q = dyadic_in(&mut rng, 0.5, 6.0, 8);
        let d = fdiam(&r2, &j);
        assert!(monotone(|t| d.less_than(&q, t), 30));
    }
}

fn hilbert_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new((0..rng.gen_range(1..=4)).map(|_| dyadic_in(rng, 0.0, 1.0, 8)).collect()).trimmed()
}

#[test]
fn hilbert_cube_verdicts_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let h = Space::hilbert_cube();
    let mut yes = 0;
    for _ in 0..500 {
        let ball = |rng: &mut ChaCha8Rng| Ball::new(hilbert_point(rng), dyadic_in(rng, 1.0 / 64.0, 0.3, 8)).unwrap();
        let a: Vec<Ball> = (0..rng.gen_range(1..=3)).map(|_| ball(&mut rng)).collect();
        let b: Vec<Ball> = (0..rng.gen_range(1..=3)).map(|_| ball(&mut rng)).collect();
        let v = closed_unions_disjoint(&h, &a, &b, 20).unwrap();
        let truth =
            a.iter().all(|p| b.iter().all(|q| HilbertCube.dist(p.center(), q.center()) > p.radius() + q.radius()));
        if v.is_yes() {
            yes += 1;
            assert!(truth, "{a:?} {b:?}");
        }
        assert!(monotone(|t| closed_unions_disjoint(&h, &a, &b, t).unwrap(), 12));

        let p = hilbert_point(&mut rng);
        if point_in_open_ball(&*h, &p, &a[0], 30).is_yes() {
            assert!(HilbertCube.dist(&p, a[0].center()) < *a[0].radius());
        }
    }
    assert!(yes > 50);
}

#[test]
fn hilbert_distance_examples() {
    let h = Space::hilbert_cube();
    let e1 = Point::new(vec![int(1)]);
    let e12 = Point::new(vec![int(1), int(1)]);
    let zero = Point::origin(1);
    assert_eq!(HilbertCube.dist(&e1, &zero), rat(1, 2));
    assert_eq!(HilbertCube.dist(&e12, &zero), rat(3, 4));
    for k in 0..20 {
        assert!(within(&h, &e12, &zero, &h.dist_approx(&e12, &zero, k), k));
    }
}
