//! Independent dense-sample check of an approximation against a builtin
//! shape.
//!
//! Outward excess: `max d(x, S)` over random points `x` of the union (and an
//! analytic per-ball upper bound `d(c, S) + r`). Coverage: exact rational
//! samples of `S` that are not strictly inside some ball.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::effsets::Geometry;
use crate::rational::{to_f64, Rational};
use crate::space::{Ball, BallIndex, Space};

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    /// Largest sampled `d(x, S)` over points of the union.
    pub outward_sampled: f64,
    /// Largest `d(c, S) + r` over the balls; an upper bound for the excess.
    pub outward_upper: f64,
    /// Points of `S` found outside the union.
    pub coverage_misses: usize,
    pub samples: usize,
    pub bound: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.coverage_misses == 0 && self.outward_sampled <= self.bound && self.outward_upper <= self.bound
    }
}

/// Sample `samples` points on each side with a generator seeded by `seed`.
pub fn verify_approximation(
    space: &Space,
    set: &Geometry,
    balls: &[Ball],
    bound: &Rational,
    samples: usize,
    seed: u64,
) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outward_upper = balls.iter().map(|b| set.ball_excess_upper(b)).fold(0.0, f64::max);
    let mut outward_sampled = 0.0f64;
    if !balls.is_empty() {
        for _ in 0..samples {
            let b = &balls[rng.gen_range(0..balls.len())];
            let x = point_in_ball(b, &mut rng);
            outward_sampled = outward_sampled.max(set.dist_upper(&x));
        }
    }
    let index = BallIndex::new(&**space, balls);
    let ex = space.exact();
    let mut coverage_misses = 0;
    for _ in 0..samples {
        let y = set.sample(&mut rng);
        let p = space.project(&y);
        let inside = index.query(&p, &p, |id| match ex {
            Some(ex) => ex.cmp_dist(&y, balls[id].center(), balls[id].radius()) == Ordering::Less,
            None => {
                let d: f64 = y
                    .approx()
                    .iter()
                    .zip(balls[id].center().approx())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d < balls[id].radius_f64()
            }
        });
        if !inside {
            coverage_misses += 1;
        }
    }
    OracleReport { outward_sampled, outward_upper, coverage_misses, samples, bound: to_f64(bound) }
}

/// A point of the closed ball, half of the time on its boundary sphere.
fn point_in_ball(b: &Ball, rng: &mut impl Rng) -> Vec<f64> {
    let c = b.center().approx();
    let r = b.radius_f64();
    let d = c.len();
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || norm > 1.0 {
            continue;
        }
        let scale = if rng.gen_bool(0.5) { r / norm } else { r };
        return c.iter().zip(&v).map(|(ci, vi)| ci + scale * vi).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::Point;

    fn circle() -> Geometry {
        Geometry::Sphere { center: Point::new(vec![int(0), int(0)]), radius: int(1) }
    }

    /// Balls of radius `t` centered on the circle at 256 equally spaced
    /// angles, snapped to `2^-40`.
    fn thickened(t: Rational) -> Vec<Ball> {
        (0..256)
            .map(|i| {
                let a = i as f64 / 256.0 * std::f64::consts::TAU;
                Ball::new(Point::from_f64(&[a.cos(), a.sin()], 40), t.clone()).unwrap()
            })
            .collect()
    }

    #[test]
    fn thickened_circle_passes() {
        let space = Space::euclidean(2).unwrap();
        let r = verify_approximation(&space, &circle(), &thickened(rat(1, 16)), &rat(1, 8), 10_000, 0);
        assert!(r.passed(), "{r:?}");
        assert!(r.outward_sampled > 0.05);
    }

    #[test]
    fn missing_cap_is_reported() {
        let space = Space::euclidean(2).unwrap();
        let balls: Vec<Ball> = thickened(rat(1, 16)).into_iter().filter(|b| b.center().coord_f64(1) < 0.9).collect();
        let r = verify_approximation(&space, &circle(), &balls, &rat(1, 8), 10_000, 0);
        assert!(r.coverage_misses > 0);
        assert!(!r.passed());
    }

    #[test]
    fn excess_over_the_bound_fails() {
        let space = Space::euclidean(2).unwrap();
        let r = verify_approximation(&space, &circle(), &thickened(rat(1, 4)), &rat(1, 8), 2_000, 1);
        assert!(r.outward_sampled > 0.125 && !r.passed());
    }
}
