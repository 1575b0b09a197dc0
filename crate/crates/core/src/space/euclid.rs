//! `ℝⁿ` with the Euclidean metric.
//!
//! `α_j` decodes `j` by iterated unpairing into `n` signed-rational indices,
//! `j = pair(a_1, pair(a_2, .. a_n))`. Distances are compared on squares, so
//! no square root is ever taken exactly; `dist_approx` uses an integer square
//! root at `k + 1` bits.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use super::ball::{Ball, Point};
use super::region::DyadicBox;
use super::{ExactMetric, Metric, Proj, SpaceSpec};
use crate::codec::{pair, signed_rational_at, signed_rational_index, unpair};
use crate::error::{Error, Result};
use crate::rational::{filtered_sign, pow2, sqrt_lower, Rational, FILTER_REL};

#[derive(Clone, Copy, Debug)]
pub struct Euclidean {
    n: usize,
}

impl Euclidean {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        Ok(Euclidean { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist_sq(&self, a: &Point, b: &Point) -> Rational {
        (0..self.n)
            .map(|i| {
                let d = a.coord(i) - b.coord(i);
                &d * &d
            })
            .sum()
    }
}

/// `sum_i t_i^2` with `t_i` from `terms`, computed in `f64` together with a
/// bound on its rounding error.
#[inline]
fn sq_sum_f64(terms: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    // Each term is (value, magnitude scale for the error bound).
    let mut s = 0.0;
    let mut m = 0.0;
    for (t, scale) in terms {
        s += t * t;
        m += scale * scale;
    }
    (s, m)
}

impl Metric for Euclidean {
    fn spec(&self) -> SpaceSpec {
        SpaceSpec::Euclidean { n: self.n }
    }

    fn arity(&self) -> Option<usize> {
        Some(self.n)
    }

    fn dense_point(&self, j: &BigUint) -> Point {
        let mut coords = Vec::with_capacity(self.n);
        let mut rest = j.clone();
        for _ in 1..self.n {
            let (a, r) = unpair(&rest);
            coords.push(signed_rational_at(&a));
            rest = r;
        }
        coords.push(signed_rational_at(&rest));
        Point::new(coords)
    }

    fn point_index(&self, p: &Point) -> Result<BigUint> {
        self.check_point(p)?;
        let idx: Vec<BigUint> = p.coords().iter().map(signed_rational_index).collect();
        let mut acc = idx[self.n - 1].clone();
        for a in idx[..self.n - 1].iter().rev() {
            acc = pair(a, &acc);
        }
        Ok(acc)
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.n {
            return Err(Error::PointArity { expected: self.n, got: p.dim() });
        }
        Ok(())
    }

    fn dist_approx(&self, a: &Point, b: &Point, k: u32) -> Rational {
        sqrt_lower(&self.dist_sq(a, b), k + 1)
    }

    fn project(&self, p: &Point) -> Proj {
        let mut out = [0.0; 3];
        for (d, o) in out.iter_mut().enumerate().take(self.n.min(3)) {
            *o = p.coord_f64(d);
        }
        out
    }

    fn projection_dims(&self) -> usize {
        self.n.min(3)
    }

    fn exact(&self) -> Option<&dyn ExactMetric> {
        Some(self)
    }

    fn compact_closed_balls(&self) -> bool {
        true
    }
}

impl ExactMetric for Euclidean {
    fn cmp_dist(&self, a: &Point, b: &Point, r: &Rational) -> Ordering {
        let (s, m) = sq_sum_f64((0..self.n).map(|i| {
            let (x, y) = (a.coord_f64(i), b.coord_f64(i));
            (x - y, x.abs() + y.abs())
        }));
        let rf = crate::rational::to_f64(r);
        let approx = s - rf * rf;
        let err = FILTER_REL * (m + rf * rf) + 1e-300;
        filtered_sign(approx, err, || self.dist_sq(a, b) - r * r)
    }

    fn dist_f64(&self, a: &Point, b: &Point) -> f64 {
        (0..self.n)
            .map(|i| {
                let d = a.coord_f64(i) - b.coord_f64(i);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    fn interpolate(&self, a: &Point, b: &Point, t: &Rational) -> Point {
        Point::new(
            (0..self.n)
                .map(|i| {
                    let x = a.coord(i);
                    let y = b.coord(i);
                    &x + t * (y - &x)
                })
                .collect(),
        )
    }

    fn root_boxes(&self, balls: &[Ball]) -> Vec<DyadicBox> {
        if balls.is_empty() {
            return Vec::new();
        }
        let mut lo: Vec<Rational> = Vec::with_capacity(self.n);
        let mut hi: Vec<Rational> = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let l = balls.iter().map(|b| b.center().coord(i) - b.radius()).min().unwrap();
            let h = balls.iter().map(|b| b.center().coord(i) + b.radius()).max().unwrap();
            lo.push(l);
            hi.push(h);
        }
        let extent = (0..self.n).map(|i| &hi[i] - &lo[i]).max().unwrap();
        let ef = crate::rational::to_f64(&extent).max(f64::MIN_POSITIVE);
        let mut level = -(ef.log2().ceil() as i32);
        while pow2(-(level as i64)) < extent {
            level -= 1;
        }
        while level < 60 && pow2(-(level as i64 + 1)) >= extent {
            level += 1;
        }
        let scale = pow2(level as i64);
        let ranges: Vec<(i64, i64)> = (0..self.n)
            .map(|i| {
                let a = floor_i64(&(&lo[i] * &scale));
                let b = floor_i64(&(&hi[i] * &scale));
                (a, b)
            })
            .collect();
        let mut out = Vec::new();
        let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            out.push(DyadicBox::uniform(cur.clone(), level));
            let mut d = 0;
            loop {
                if d == self.n {
                    return out;
                }
                cur[d] += 1;
                if cur[d] <= ranges[d].1 {
                    break;
                }
                cur[d] = ranges[d].0;
                d += 1;
            }
        }
    }

    fn split(&self, b: &DyadicBox) -> Vec<DyadicBox> {
        let mut out = vec![b.clone()];
        for axis in 0..self.n {
            out = out.iter().flat_map(|c| c.halves(axis)).collect();
        }
        out
    }

    fn box_misses_ball(&self, b: &DyadicBox, ball: &Ball) -> bool {
        let c = ball.center();
        let (s, m) = sq_sum_f64((0..self.n).map(|i| {
            let (lo, hi) = b.interval_f64(i);
            let x = c.coord_f64(i);
            let gap = if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            };
            (gap, lo.abs().max(hi.abs()) + x.abs())
        }));
        let r = ball.radius_f64();
        let err = FILTER_REL * (m + r * r) + 1e-300;
        filtered_sign(s - r * r, err, || {
            let mut acc = Rational::zero();
            for i in 0..self.n {
                let (lo, hi) = b.interval(i);
                let x = c.coord(i);
                let gap = if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    Rational::zero()
                };
                acc += &gap * &gap;
            }
            acc - ball.radius() * ball.radius()
        }) == Ordering::Greater
    }

    fn box_in_ball(&self, b: &DyadicBox, ball: &Ball) -> bool {
        let c = ball.center();
        let (s, m) = sq_sum_f64((0..self.n).map(|i| {
            let (lo, hi) = b.interval_f64(i);
            let x = c.coord_f64(i);
            ((x - lo).abs().max((x - hi).abs()), lo.abs().max(hi.abs()) + x.abs())
        }));
        let r = ball.radius_f64();
        let err = FILTER_REL * (m + r * r) + 1e-300;
        filtered_sign(s - r * r, err, || {
            let mut acc = Rational::zero();
            for i in 0..self.n {
                let (lo, hi) = b.interval(i);
                let x = c.coord(i);
                let far = (&x - lo).abs().max((&x - hi).abs());
                acc += &far * &far;
            }
            acc - ball.radius() * ball.radius()
        }) == Ordering::Less
    }

    fn box_bounds(&self, b: &DyadicBox) -> (Proj, Proj) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for d in 0..self.n.min(3) {
            let (l, h) = b.interval_f64(d);
            lo[d] = l;
            hi[d] = h;
        }
        (lo, hi)
    }
}

fn floor_i64(q: &Rational) -> i64 {
    let f: BigInt = q.floor().to_integer();
    i64::try_from(f).expect("box coordinate exceeds i64")
}
