//! Geometry of the built-in shapes in `ℝⁿ`.
//!
//! `closed_ball_misses` is the exact test behind the complement
//! enumerators; everything else here serves the independent test oracles.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::{dyadic, filtered_sign, int, to_f64, Rational, FILTER_REL};
use crate::space::{Ball, Point};

const SAMPLE_BITS: u32 = 30;

#[derive(Clone, Debug)]
pub enum Geometry {
    /// `{x : |x - c| = R}` in `ℝⁿ`, `n = dim(c)`.
    Sphere { center: Point, radius: Rational },
    /// `{x : |x - c| <= R}`.
    Ball { center: Point, radius: Rational },
    /// Axis-aligned `{(x/a)^2 + (y/b)^2 = 1}` around `center`.
    Ellipse { center: Point, a: Rational, b: Rational },
    /// `[lo, lo + side]ⁿ`.
    Square { lo: Point, side: Rational },
    /// Topological boundary of `[lo, lo + side]²`.
    SquareOutline { lo: Point, side: Rational },
    /// Closed upper half of a circle, `y >= c_y`.
    UpperArc { center: Point, radius: Rational },
}

fn gt(approx: f64, scale: f64, exact: impl FnOnce() -> Rational) -> bool {
    filtered_sign(approx, FILTER_REL * scale + 1e-300, exact) == Ordering::Greater
}

fn lt(approx: f64, scale: f64, exact: impl FnOnce() -> Rational) -> bool {
    filtered_sign(approx, FILTER_REL * scale + 1e-300, exact) == Ordering::Less
}

fn dist_sq(p: &Point, c: &Point) -> Rational {
    (0..c.dim())
        .map(|i| {
            let d = p.coord(i) - c.coord(i);
            &d * &d
        })
        .sum()
}

fn dist_sq_f64(p: &Point, c: &Point) -> (f64, f64) {
    let mut s = 0.0;
    let mut m = 0.0;
    for i in 0..c.dim() {
        let (x, y) = (p.coord_f64(i), c.coord_f64(i));
        s += (x - y) * (x - y);
        m += (x.abs() + y.abs()).powi(2);
    }
    (s, m)
}

/// Squared distance from `p` to the box `[lo, lo + side]ⁿ`.
fn box_gap_sq(p: &Point, lo: &Point, side: &Rational) -> Rational {
    (0..lo.dim())
        .map(|i| {
            let (a, x) = (lo.coord(i), p.coord(i));
            let b = &a + side;
            let g = if x < a {
                a - x
            } else if x > b {
                x - b
            } else {
                Rational::zero()
            };
            &g * &g
        })
        .sum()
}

fn box_gap_sq_f64(p: &Point, lo: &Point, side: f64) -> (f64, f64) {
    let mut s = 0.0;
    let mut m = 0.0;
    for i in 0..lo.dim() {
        let (a, x) = (lo.coord_f64(i), p.coord_f64(i));
        let b = a + side;
        let g = if x < a {
            a - x
        } else if x > b {
            x - b
        } else {
            0.0
        };
        s += g * g;
        m += (a.abs() + side.abs() + x.abs()).powi(2);
    }
    (s, m)
}

/// Exact: the closed ball `B[p, r]` misses the sphere `|x - c| = R`.
fn sphere_misses(p: &Point, r: &Rational, c: &Point, big_r: &Rational) -> bool {
    let (d2, m) = dist_sq_f64(p, c);
    let (rf, bf) = (to_f64(r), to_f64(big_r));
    let scale = m + (rf + bf).powi(2);
    let outside = gt(d2 - (bf + rf).powi(2), scale, || {
        let s = big_r + r;
        dist_sq(p, c) - &s * &s
    });
    outside
        || (big_r > r
            && lt(d2 - (bf - rf).powi(2), scale, || {
                let s = big_r - r;
                dist_sq(p, c) - &s * &s
            }))
}

fn inside_with_margin(p: &Point, r: &Rational, lo: &Point, side: &Rational) -> bool {
    (0..lo.dim()).all(|i| {
        let (a, x) = (lo.coord(i), p.coord(i));
        &x - r > a && &x + r < a + side
    })
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Sphere { center, .. } | Geometry::Ball { center, .. } => center.dim(),
            Geometry::Square { lo, .. } => lo.dim(),
            Geometry::Ellipse { .. } | Geometry::SquareOutline { .. } | Geometry::UpperArc { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |q: &Rational, what: &str| {
            if q.is_positive() {
                Ok(())
            } else {
                Err(Error::ShapeParams(format!("{what} must be positive")))
            }
        };
        let dim = |p: &Point, want: Option<usize>| match want {
            Some(n) if p.dim() != n => Err(Error::ShapeParams(format!("expected {n} coordinates, got {}", p.dim()))),
            _ if p.dim() == 0 => Err(Error::ShapeParams("empty coordinate list".into())),
            _ => Ok(()),
        };
        match self {
            Geometry::Sphere { center, radius } | Geometry::Ball { center, radius } => {
                dim(center, None)?;
                positive(radius, "radius")
            }
            Geometry::UpperArc { center, radius } => {
                dim(center, Some(2))?;
                positive(radius, "radius")
            }
            Geometry::Ellipse { center, a, b } => {
                dim(center, Some(2))?;
                positive(a, "a")?;
                positive(b, "b")
            }
            Geometry::Square { lo, side } => {
                dim(lo, None)?;
                positive(side, "side")
            }
            Geometry::SquareOutline { lo, side } => {
                dim(lo, Some(2))?;
                positive(side, "side")
            }
        }
    }

    /// A closed ball containing the set.
    pub fn bounding_ball(&self) -> Ball {
        let one = Rational::one();
        let (c, r) = match self {
            Geometry::Sphere { center, radius }
            | Geometry::Ball { center, radius }
            | Geometry::UpperArc { center, radius } => (center.clone(), radius + &one),
            Geometry::Ellipse { center, a, b } => (center.clone(), a.clone().max(b.clone()) + &one),
            Geometry::Square { lo, side } | Geometry::SquareOutline { lo, side } => {
                let half = side / int(2);
                let c = Point::new(lo.coords().iter().map(|x| x + &half).collect());
                // half diagonal is side * sqrt(n) / 2 <= side * n / 2
                (c, side * int(lo.dim() as i64) / int(2))
            }
        };
        Ball::new(c, r).expect("positive by validation")
    }

    /// Exact test that the closed ball misses the set.
    pub fn closed_ball_misses(&self, b: &Ball) -> bool {
        let (p, r) = (b.center(), b.radius());
        match self {
            Geometry::Sphere { center, radius } => sphere_misses(p, r, center, radius),
            Geometry::Ball { center, radius } => {
                let (d2, m) = dist_sq_f64(p, center);
                let s = to_f64(radius) + b.radius_f64();
                gt(d2 - s * s, m + s * s, || {
                    let s = radius + r;
                    dist_sq(p, center) - &s * &s
                })
            }
            Geometry::Ellipse { center, a, b: bb } => {
                // (x, y) -> (x / a, y / b) is (1 / min(a, b))-Lipschitz and
                // maps the ellipse onto the unit circle.
                let u = Point::new(vec![(p.coord(0) - center.coord(0)) / a, (p.coord(1) - center.coord(1)) / bb]);
                let s = a.clone().min(bb.clone());
                sphere_misses(&u, &(r / s), &Point::origin(2), &Rational::one())
            }
            Geometry::Square { lo, side } => {
                let (g, m) = box_gap_sq_f64(p, lo, to_f64(side));
                let rf = b.radius_f64();
                gt(g - rf * rf, m + rf * rf, || box_gap_sq(p, lo, side) - r * r)
            }
            Geometry::SquareOutline { lo, side } => {
                let (g, m) = box_gap_sq_f64(p, lo, to_f64(side));
                let rf = b.radius_f64();
                gt(g - rf * rf, m + rf * rf, || box_gap_sq(p, lo, side) - r * r) || inside_with_margin(p, r, lo, side)
            }
            Geometry::UpperArc { center, radius } => {
                sphere_misses(p, r, center, radius) || p.coord(1) + r < center.coord(1)
            }
        }
    }

    /// Exact test that the open ball meets the set, where one is available.
    pub fn open_ball_meets(&self, b: &Ball) -> Option<bool> {
        let (p, r) = (b.center(), b.radius());
        match self {
            Geometry::Sphere { center, radius } => {
                let d2 = dist_sq(p, center);
                let s = radius + r;
                let t = radius - r;
                Some(d2 < &s * &s && (r > radius || d2 > &t * &t))
            }
            Geometry::Ball { center, radius } => {
                let s = radius + r;
                Some(dist_sq(p, center) < &s * &s)
            }
            Geometry::Square { lo, side } => Some(box_gap_sq(p, lo, side) < r * r),
            Geometry::SquareOutline { lo, side } => {
                let within = (0..2).all(|i| {
                    let (a, x) = (lo.coord(i), p.coord(i));
                    &x - r >= a && &x + r <= a + side
                });
                Some(box_gap_sq(p, lo, side) < r * r && !within)
            }
            Geometry::Ellipse { .. } | Geometry::UpperArc { .. } => None,
        }
    }

    /// Exact membership, where one is available.
    pub fn contains(&self, p: &Point) -> Option<bool> {
        match self {
            Geometry::Sphere { center, radius } => Some(dist_sq(p, center) == radius * radius),
            Geometry::Ball { center, radius } => Some(dist_sq(p, center) <= radius * radius),
            Geometry::Ellipse { center, a, b } => {
                let u = (p.coord(0) - center.coord(0)) / a;
                let v = (p.coord(1) - center.coord(1)) / b;
                Some(&u * &u + &v * &v == Rational::one())
            }
            Geometry::Square { lo, side } => Some(box_gap_sq(p, lo, side).is_zero()),
            Geometry::SquareOutline { lo, side } => {
                Some(box_gap_sq(p, lo, side).is_zero() && !inside_with_margin(p, &Rational::zero(), lo, side))
            }
            Geometry::UpperArc { center, radius } => {
                Some(dist_sq(p, center) == radius * radius && p.coord(1) >= center.coord(1))
            }
        }
    }

    /// Distance from `x` to the set, from above up to rounding.
    pub fn dist_upper(&self, x: &[f64]) -> f64 {
        let norm = |c: &Point| -> f64 {
            (0..c.dim()).map(|i| (x.get(i).copied().unwrap_or(0.0) - c.coord_f64(i)).powi(2)).sum::<f64>().sqrt()
        };
        match self {
            Geometry::Sphere { center, radius } => (norm(center) - to_f64(radius)).abs(),
            Geometry::Ball { center, radius } => (norm(center) - to_f64(radius)).max(0.0),
            Geometry::Ellipse { center, a, b } => {
                ellipse_dist(x[0] - center.coord_f64(0), x[1] - center.coord_f64(1), to_f64(a), to_f64(b))
            }
            Geometry::Square { lo, side } => {
                let s = to_f64(side);
                (0..lo.dim())
                    .map(|i| {
                        let a = lo.coord_f64(i);
                        let v = x[i];
                        (a - v).max(v - a - s).max(0.0).powi(2)
                    })
                    .sum::<f64>()
                    .sqrt()
            }
            Geometry::SquareOutline { lo, side } => {
                let s = to_f64(side);
                let inner = (0..2).all(|i| x[i] > lo.coord_f64(i) && x[i] < lo.coord_f64(i) + s);
                if inner {
                    (0..2)
                        .map(|i| (x[i] - lo.coord_f64(i)).min(lo.coord_f64(i) + s - x[i]))
                        .fold(f64::INFINITY, f64::min)
                } else {
                    Geometry::Square { lo: lo.clone(), side: side.clone() }.dist_upper(x)
                }
            }
            Geometry::UpperArc { center, radius } => {
                let (cx, cy, r) = (center.coord_f64(0), center.coord_f64(1), to_f64(radius));
                if x[1] >= cy {
                    (norm(center) - r).abs()
                } else {
                    let d0 = ((x[0] - cx - r).powi(2) + (x[1] - cy).powi(2)).sqrt();
                    let d1 = ((x[0] - cx + r).powi(2) + (x[1] - cy).powi(2)).sqrt();
                    d0.min(d1)
                }
            }
        }
    }

    /// Upper bound on `sup_{x ∈ B[c, r]} d(x, S)`, using that `d(·, S)` is
    /// 1-Lipschitz.
    pub fn ball_excess_upper(&self, b: &Ball) -> f64 {
        self.dist_upper(b.center().approx()) + b.radius_f64()
    }

    /// A random point of the set with exact rational coordinates.
    pub fn sample(&self, rng: &mut impl Rng) -> Point {
        match self {
            Geometry::Sphere { center, radius } if center.dim() == 2 => {
                let (u, v) = unit_circle_point(rng.gen_range(0.0..2.0 * PI));
                offset(center, &[u * radius, v * radius])
            }
            Geometry::Sphere { center, radius } => {
                let n = center.dim();
                let dir = sphere_point(rng, n);
                offset(center, &dir.iter().map(|t| t * radius).collect::<Vec<_>>())
            }
            Geometry::Ball { center, radius } => loop {
                let n = center.dim();
                let d: Vec<Rational> = (0..n).map(|_| dyadic(rng.gen_range(-1.0..1.0), SAMPLE_BITS) * radius).collect();
                let p = offset(center, &d);
                if dist_sq(&p, center) <= radius * radius {
                    return p;
                }
            },
            Geometry::Ellipse { center, a, b } => {
                let (u, v) = unit_circle_point(rng.gen_range(0.0..2.0 * PI));
                offset(center, &[u * a, v * b])
            }
            Geometry::Square { lo, side } => {
                let d: Vec<Rational> =
                    (0..lo.dim()).map(|_| dyadic(rng.gen_range(0.0..1.0), SAMPLE_BITS) * side).collect();
                offset(lo, &d)
            }
            Geometry::SquareOutline { lo, side } => {
                let t = dyadic(rng.gen_range(0.0..1.0), SAMPLE_BITS) * side;
                let edge = rng.gen_range(0..4);
                let fixed = if edge % 2 == 0 { Rational::zero() } else { side.clone() };
                let d = if edge < 2 { [fixed, t] } else { [t, fixed] };
                offset(lo, &d)
            }
            Geometry::UpperArc { center, radius } => {
                let (u, v) = unit_circle_point(rng.gen_range(0.0..PI));
                offset(center, &[u * radius, v * radius])
            }
        }
    }
}

fn offset(base: &Point, d: &[Rational]) -> Point {
    Point::new(d.iter().enumerate().map(|(i, x)| base.coord(i) + x).collect())
}

/// A rational point of the unit circle near angle `theta`, from the
/// parametrization `t ↦ ((1 - t²)/(1 + t²), 2t/(1 + t²))` with `t = tan(θ/2)`.
fn unit_circle_point(theta: f64) -> (Rational, Rational) {
    // Use the chart around the antipode when tan(θ/2) would be large.
    let flip = theta.cos() < 0.0;
    let phi = if flip { theta - PI } else { theta };
    let t = dyadic((phi / 2.0).tan(), SAMPLE_BITS);
    let t2 = &t * &t;
    let den = Rational::one() + &t2;
    let x = (Rational::one() - &t2) / &den;
    let y = (int(2) * &t) / den;
    if flip {
        (-x, -y)
    } else {
        (x, y)
    }
}

/// A rational point of the unit sphere in `ℝⁿ` by inverse stereographic
/// projection of a dyadic point, from the pole farthest from it.
fn sphere_point(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0f64..1.0)).collect();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
    let x: Vec<f64> = g.iter().map(|v| v / norm).collect();
    let last = x[n - 1];
    let sign = if last > 0.0 { -1.0 } else { 1.0 };
    // project from pole sign * e_n
    let u: Vec<Rational> = x[..n - 1].iter().map(|v| dyadic(v / (1.0 - sign * last), SAMPLE_BITS)).collect();
    let s: Rational = u.iter().map(|v| v * v).sum();
    let den = Rational::one() + &s;
    let mut out: Vec<Rational> = u.iter().map(|v| int(2) * v / &den).collect();
    let z = (&s - Rational::one()) / &den;
    out.push(if sign > 0.0 { z } else { -z });
    out
}

/// Distance from `(x, y)` to the ellipse `(X/a)² + (Y/b)² = 1` as the
/// distance to an explicit nearby point of it.
fn ellipse_dist(x: f64, y: f64, a: f64, b: f64) -> f64 {
    let f = |t: f64| ((a * t.cos() - x).powi(2) + (b * t.sin() - y).powi(2)).sqrt();
    let steps = 512;
    let mut best = 0.0;
    let mut best_d = f64::INFINITY;
    for s in 0..steps {
        let t = 2.0 * PI * s as f64 / steps as f64;
        let d = f(t);
        if d < best_d {
            best_d = d;
            best = t;
        }
    }
    let mut lo = best - 2.0 * PI / steps as f64;
    let mut hi = best + 2.0 * PI / steps as f64;
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    best_d.min(f(0.5 * (lo + hi)))
}
