//! Bucket grid over projected ball centers.
//!
//! Every space supplies a projection to at most three `f64` coordinates that
//! is 1-Lipschitz per coordinate, so a ball `B(c, r)` projects into the box
//! `p(c) ± r`. Candidate lists are conservative; callers still run the exact
//! predicates.

use std::collections::HashMap;

use super::ball::Ball;
use super::Metric;

pub type Proj = [f64; 3];

pub struct BallIndex {
    cell: f64,
    reach: f64,
    dims: usize,
    centers: Vec<Proj>,
    radii: Vec<f64>,
    buckets: HashMap<[i64; 3], Vec<u32>>,
    big: Vec<u32>,
}

impl BallIndex {
    /// Index `balls`; ids in callbacks are positions in this slice.
    pub fn new(space: &dyn Metric, balls: &[Ball]) -> Self {
        let dims = space.projection_dims();
        let centers: Vec<Proj> = balls.iter().map(|b| space.project(b.center())).collect();
        let radii: Vec<f64> = balls.iter().map(|b| b.radius_f64() * (1.0 + 1e-9)).collect();
        let mut sorted: Vec<f64> = radii.iter().copied().filter(|r| r.is_finite()).collect();
        sorted.sort_by(f64::total_cmp);
        let median = sorted.get(sorted.len() / 2).copied().unwrap_or(1.0).max(1e-12);
        let reach = 4.0 * median;
        let cell = 2.0 * reach;
        let mut buckets: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
        let mut big = Vec::new();
        for (id, (c, r)) in centers.iter().zip(&radii).enumerate() {
            if *r > reach || !c.iter().all(|v| v.is_finite()) {
                big.push(id as u32);
            } else {
                buckets.entry(key(c, cell, dims)).or_default().push(id as u32);
            }
        }
        BallIndex { cell, reach, dims, centers, radii, buckets, big }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Visit balls whose projected box meets `[lo, hi]`, stopping early when
    /// `visit` returns `true`. Returns whether it stopped early.
    pub fn query(&self, lo: &Proj, hi: &Proj, mut visit: impl FnMut(usize) -> bool) -> bool {
        let overlaps = |id: usize| {
            let c = &self.centers[id];
            let r = self.radii[id];
            (0..self.dims).all(|d| c[d] + r >= lo[d] && c[d] - r <= hi[d])
        };
        for &id in &self.big {
            if overlaps(id as usize) && visit(id as usize) {
                return true;
            }
        }
        let mut from = [0i64; 3];
        let mut to = [0i64; 3];
        for d in 0..self.dims {
            let a = ((lo[d] - self.reach) / self.cell).floor();
            let b = ((hi[d] + self.reach) / self.cell).floor();
            if !(a.is_finite() && b.is_finite()) || b - a > 4096.0 {
                return self.scan(lo, hi, visit);
            }
            from[d] = a as i64;
            to[d] = b as i64;
        }
        let span: i64 = (0..self.dims).map(|d| to[d] - from[d] + 1).product();
        if span as usize > self.buckets.len() {
            return self.scan(lo, hi, visit);
        }
        let mut k = from;
        loop {
            if let Some(ids) = self.buckets.get(&k) {
                for &id in ids {
                    if overlaps(id as usize) && visit(id as usize) {
                        return true;
                    }
                }
            }
            let mut d = 0;
            loop {
                if d == self.dims {
                    return false;
                }
                k[d] += 1;
                if k[d] <= to[d] {
                    break;
                }
                k[d] = from[d];
                d += 1;
            }
        }
    }

    fn scan(&self, lo: &Proj, hi: &Proj, mut visit: impl FnMut(usize) -> bool) -> bool {
        for ids in self.buckets.values() {
            for &id in ids {
                let c = &self.centers[id as usize];
                let r = self.radii[id as usize];
                if (0..self.dims).all(|d| c[d] + r >= lo[d] && c[d] - r <= hi[d]) && visit(id as usize) {
                    return true;
                }
            }
        }
        false
    }

    /// Projected box of ball `id`.
    pub fn ball_box(&self, id: usize) -> (Proj, Proj) {
        let c = self.centers[id];
        let r = self.radii[id];
        (c.map(|v| v - r), c.map(|v| v + r))
    }
}

fn key(c: &Proj, cell: f64, dims: usize) -> [i64; 3] {
    let mut k = [0i64; 3];
    for d in 0..dims {
        k[d] = (c[d] / cell).floor() as i64;
    }
    k
}
