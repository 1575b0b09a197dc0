//! Random instances and independent exact oracles shared by the integration
//! tests. Everything here works on squared rationals and never calls the
//! library's own predicates.

#![allow(dead_code)]

use cochain_core::rational::{int, pow2, rat, to_f64, Rational};
use cochain_core::{Ball, Point};
use num_traits::{Signed, Zero};
use rand::Rng;

/// A dyadic rational in `[lo, hi]` with denominator `2^bits`.
pub fn dyadic_in(rng: &mut impl Rng, lo: f64, hi: f64, bits: u32) -> Rational {
    let scale = (1i64 << bits) as f64;
    let a = (lo * scale).ceil() as i64;
    let b = (hi * scale).floor() as i64;
    rat(rng.gen_range(a..=b.max(a)), 1i64 << bits)
}

pub fn point_in_box(rng: &mut impl Rng, n: usize, half: f64, bits: u32) -> Point {
    Point::new((0..n).map(|_| dyadic_in(rng, -half, half, bits)).collect())
}

pub fn ball(center: Point, r: Rational) -> Ball {
    Ball::new(center, r).expect("positive radius")
}

pub fn random_ball(rng: &mut impl Rng, n: usize, half: f64, rmax: f64, bits: u32) -> Ball {
    let r = dyadic_in(rng, rmax / 64.0, rmax, bits);
    let r = if r.is_zero() { pow2(-(bits as i64)) } else { r };
    ball(point_in_box(rng, n, half, bits), r)
}

pub fn dist_sq(a: &Point, b: &Point) -> Rational {
    a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sign of `d(a, b) - r` when floats settle it with room to spare.
fn float_sign(a: &Point, b: &Point, r: &Rational) -> Option<std::cmp::Ordering> {
    let gap = dist_f64(a, b) - cochain_core::rational::to_f64(r);
    (gap.is_finite() && gap.abs() > 1e-9).then(|| gap.partial_cmp(&0.0).unwrap())
}

/// `d(a, b) < r`.
pub fn closer_than(a: &Point, b: &Point, r: &Rational) -> bool {
    match float_sign(a, b, r) {
        Some(o) => o.is_lt(),
        None => r.is_positive() && dist_sq(a, b) < r * r,
    }
}

/// `d(a, b) > r`.
pub fn farther_than(a: &Point, b: &Point, r: &Rational) -> bool {
    match float_sign(a, b, r) {
        Some(o) => o.is_gt(),
        None => r.is_negative() || dist_sq(a, b) > r * r,
    }
}

pub fn dist_f64(a: &Point, b: &Point) -> f64 {
    a.approx().iter().zip(b.approx()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Exact points of the closed ball: `angles` points of its boundary (from
/// the rational parametrization of the circle, per coordinate plane) and a
/// grid of interior points.
pub fn ball_points(b: &Ball, angles: usize, grid: usize) -> Vec<Point> {
    let c = b.center();
    let n = c.dim();
    let r = b.radius();
    let mut out = vec![c.clone()];
    for i in 0..n {
        for j in i + 1..n {
            for a in 0..angles {
                // t runs over [-1, 1]; (1 - t^2, 2t) / (1 + t^2) covers half
                // the circle, the sign flip the rest.
                let t = rat(2 * a as i64 - angles as i64, angles as i64);
                let den = int(1) + &t * &t;
                let (x, y) = ((int(1) - &t * &t) / &den, int(2) * &t / &den);
                for s in [1, -1] {
                    let mut v = c.coords().to_vec();
                    v[i] += r * &x * int(s);
                    v[j] += r * &y * int(s);
                    out.push(Point::new(v));
                }
            }
        }
        for s in [1, -1] {
            let mut v = c.coords().to_vec();
            v[i] += r * int(s);
            out.push(Point::new(v));
        }
    }
    if n == 2 {
        for gx in 0..=grid {
            for gy in 0..=grid {
                let u = rat(2 * gx as i64 - grid as i64, grid.max(1) as i64);
                let v = rat(2 * gy as i64 - grid as i64, grid.max(1) as i64);
                if &u * &u + &v * &v <= int(1) {
                    out.push(Point::new(vec![c.coord(0) + r * u, c.coord(1) + r * v]));
                }
            }
        }
    }
    out
}

/// `p` lies in some open ball of `j`.
pub fn in_open_union(p: &Point, j: &[Ball]) -> bool {
    j.iter().any(|b| closer_than(p, b.center(), b.radius()))
}

/// `B̂(c, r) ⊆ B(c', r')`, exactly.
pub fn ball_inside(inner: &Ball, outer: &Ball) -> bool {
    closer_than(inner.center(), outer.center(), &(outer.radius() - inner.radius()))
}

/// Exact diameter test `diam(∪ B̂_i) <= u` in `ℝⁿ`: the diameter is the
/// largest of `2 r_i` and `d(c_i, c_j) + r_i + r_j`.
pub fn diameter_at_most(balls: &[Ball], u: &Rational) -> bool {
    balls.iter().enumerate().all(|(i, a)| {
        int(2) * a.radius() <= *u
            && balls[i + 1..].iter().all(|b| {
                let room = u - a.radius() - b.radius();
                !room.is_negative() && dist_sq(a.center(), b.center()) <= &room * &room
            })
    })
}

pub fn f(q: &Rational) -> f64 {
    to_f64(q)
}

/// One line of the acceptance summary.
pub struct Outcome {
    pub ok: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(ok: bool, detail: impl Into<String>) -> Outcome {
        Outcome { ok, detail: detail.into() }
    }
}
