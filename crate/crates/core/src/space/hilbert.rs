//! The Hilbert cube `[0, 1]^∞` with `d(x, y) = Σ_{i≥1} 2^-i |x_i - y_i|`.
//!
//! Dense points are the eventually-zero rational sequences: `α_j` is the
//! sequence code `j` with every entry read through the enumeration of
//! `Q ∩ [0, 1]`. Distances between such points are finite sums and hence
//! exact rationals; `dist_approx` still truncates after `k + 1` terms so
//! that it only ever inspects a prefix.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};

use super::ball::{Ball, Point};
use super::region::DyadicBox;
use super::{ExactMetric, Metric, Proj, SpaceSpec};
use crate::codec::{seq_encode, seq_prefix, unit_rational_at, unit_rational_index};
use crate::error::{Error, Result};
use crate::rational::{filtered_sign, pow2, Rational, FILTER_REL};

#[derive(Clone, Copy, Debug, Default)]
pub struct HilbertCube;

fn weight(i: usize) -> Rational {
    pow2(-(i as i64 + 1))
}

fn weight_f64(i: usize) -> f64 {
    2f64.powi(-(i as i32 + 1))
}

impl HilbertCube {
    /// Exact distance between eventually-zero points.
    pub fn dist(&self, a: &Point, b: &Point) -> Rational {
        let len = a.dim().max(b.dim());
        (0..len).map(|i| weight(i) * (a.coord(i) - b.coord(i)).abs()).sum()
    }

    fn min_dist(&self, b: &DyadicBox, c: &Point) -> Rational {
        (0..b.axes())
            .map(|i| {
                let (lo, hi) = b.interval(i);
                let x = c.coord(i);
                let gap = if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    Rational::zero()
                };
                weight(i) * gap
            })
            .sum()
    }

    fn max_dist(&self, b: &DyadicBox, c: &Point) -> Rational {
        let l = b.axes();
        let m = l.max(c.dim());
        let mut acc = Rational::zero();
        for i in 0..m {
            let x = c.coord(i);
            let far = if i < l {
                let (lo, hi) = b.interval(i);
                (&x - lo).abs().max((&x - hi).abs())
            } else {
                (&x).max(&(Rational::one() - &x)).clone()
            };
            acc += weight(i) * far;
        }
        acc + pow2(-(m as i64))
    }

    fn min_dist_f64(&self, b: &DyadicBox, c: &Point) -> (f64, f64) {
        let mut s = 0.0;
        let mut m = 0.0;
        for i in 0..b.axes() {
            let (lo, hi) = b.interval_f64(i);
            let x = c.coord_f64(i);
            let gap = if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            };
            s += weight_f64(i) * gap;
            m += weight_f64(i) * (hi.abs() + x.abs());
        }
        (s, m)
    }

    fn max_dist_f64(&self, b: &DyadicBox, c: &Point) -> (f64, f64) {
        let l = b.axes();
        let m_len = l.max(c.dim());
        let mut s = 0.0;
        let mut m = 0.0;
        for i in 0..m_len {
            let x = c.coord_f64(i);
            let far = if i < l {
                let (lo, hi) = b.interval_f64(i);
                (x - lo).abs().max((x - hi).abs())
            } else {
                x.max(1.0 - x)
            };
            s += weight_f64(i) * far;
            m += weight_f64(i) * (1.0 + x.abs());
        }
        (s + 2f64.powi(-(m_len as i32)), m + 1.0)
    }
}

impl Metric for HilbertCube {
    fn spec(&self) -> SpaceSpec {
        SpaceSpec::HilbertCube
    }

    fn arity(&self) -> Option<usize> {
        None
    }

    fn dense_point(&self, j: &BigUint) -> Point {
        Point::new(seq_prefix(j).iter().map(unit_rational_at).collect()).trimmed()
    }

    fn point_index(&self, p: &Point) -> Result<BigUint> {
        self.check_point(p)?;
        let t = p.trimmed();
        if t.dim() == 0 {
            return Ok(BigUint::zero());
        }
        let idx = t.coords().iter().map(unit_rational_index).collect::<Result<Vec<_>>>()?;
        seq_encode(&idx)
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        for c in p.coords() {
            if c.is_negative() || c > &Rational::one() {
                return Err(Error::OutsideSpace(format!("{p:?} leaves [0, 1]^∞")));
            }
        }
        Ok(())
    }

    fn dist_approx(&self, a: &Point, b: &Point, k: u32) -> Rational {
        let t = (k as usize + 1).min(a.dim().max(b.dim()));
        (0..t).map(|i| weight(i) * (a.coord(i) - b.coord(i)).abs()).sum()
    }

    fn project(&self, p: &Point) -> Proj {
        [p.coord_f64(0) * 0.5, p.coord_f64(1) * 0.25, p.coord_f64(2) * 0.125]
    }

    fn projection_dims(&self) -> usize {
        3
    }

    fn exact(&self) -> Option<&dyn ExactMetric> {
        Some(self)
    }

    fn compact_closed_balls(&self) -> bool {
        true
    }
}

impl ExactMetric for HilbertCube {
    fn cmp_dist(&self, a: &Point, b: &Point, r: &Rational) -> Ordering {
        let len = a.dim().max(b.dim());
        let mut s = 0.0;
        let mut m = 0.0;
        for i in 0..len {
            let (x, y) = (a.coord_f64(i), b.coord_f64(i));
            s += weight_f64(i) * (x - y).abs();
            m += weight_f64(i) * (x.abs() + y.abs());
        }
        let rf = crate::rational::to_f64(r);
        filtered_sign(s - rf, FILTER_REL * (m + rf) + 1e-300, || self.dist(a, b) - r)
    }

    fn dist_f64(&self, a: &Point, b: &Point) -> f64 {
        let len = a.dim().max(b.dim());
        (0..len).map(|i| weight_f64(i) * (a.coord_f64(i) - b.coord_f64(i)).abs()).sum()
    }

    fn interpolate(&self, a: &Point, b: &Point, t: &Rational) -> Point {
        let len = a.dim().max(b.dim());
        Point::new(
            (0..len)
                .map(|i| {
                    let x = a.coord(i);
                    &x + t * (b.coord(i) - &x)
                })
                .collect(),
        )
        .trimmed()
    }

    fn root_boxes(&self, _balls: &[Ball]) -> Vec<DyadicBox> {
        vec![DyadicBox { lo: Vec::new(), level: Vec::new() }]
    }

    /// Halve the coordinate with the largest weighted width, opening a new
    /// coordinate when the untouched tail is widest.
    fn split(&self, b: &DyadicBox) -> Vec<DyadicBox> {
        let l = b.axes();
        // weighted width of axis i is 2^-(i + 1 + level_i); the tail has 2^-(l + 1)
        let mut best = l;
        let mut best_exp = -(l as i64 + 1);
        for i in 0..l {
            let e = -(i as i64 + 1 + b.level[i] as i64);
            if e > best_exp || (e == best_exp && best == l) {
                best = i;
                best_exp = e;
            }
        }
        let mut base = b.clone();
        if best == l {
            base.lo.push(0);
            base.level.push(0);
        }
        base.halves(best).to_vec()
    }

    fn box_misses_ball(&self, b: &DyadicBox, ball: &Ball) -> bool {
        let (s, m) = self.min_dist_f64(b, ball.center());
        let r = ball.radius_f64();
        filtered_sign(s - r, FILTER_REL * (m + r) + 1e-300, || self.min_dist(b, ball.center()) - ball.radius())
            == Ordering::Greater
    }

    fn box_in_ball(&self, b: &DyadicBox, ball: &Ball) -> bool {
        let (s, m) = self.max_dist_f64(b, ball.center());
        let r = ball.radius_f64();
        filtered_sign(s - r, FILTER_REL * (m + r) + 1e-300, || self.max_dist(b, ball.center()) - ball.radius())
            == Ordering::Less
    }

    fn box_bounds(&self, b: &DyadicBox) -> (Proj, Proj) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for d in 0..3 {
            let w = weight_f64(d);
            let (l, h) = if d < b.axes() { b.interval_f64(d) } else { (0.0, 1.0) };
            lo[d] = l * w;
            hi[d] = h * w;
        }
        (lo, hi)
    }
}
