//! Candidate chains from the grid construction.
//!
//! Every piece (the cell box for cells, each facet of `G^m(a)` for spheres)
//! is cut into `K^d` sub-boxes, `K ∈ {1, 2, 4, 8, 16}` the smallest value
//! giving radii at most `δ`; pieces whose hull ball is wider than their
//! image start at `K = 2`. Each sub-box is sampled on a 5-point-per-axis
//! grid and covered by one ball around the bounding-box midpoint of the
//! images, with radius `(max distance + g/8)·17/16` where `g` is the largest
//! gap between neighbouring samples.
//! Centers are snapped to `2^-32` and radii rounded up.
//!
//! Interior entries of a spherical chain repeat its first ball; they are
//! never read by the boundary conditions.

use rayon::prelude::*;

use super::grid::{boundary_facets, cell_box_f64};
use super::sampler::Sampler;
use super::witness::{CellWitness, SphereWitness};
use crate::chains::Chain;
use crate::codec::unflatten;
use crate::error::{Error, Result};
use crate::rational::{dyadic, pow2, to_f64, Rational};
use crate::space::{Ball, Point};

const SAMPLES_PER_AXIS: usize = 5;
const SNAP_BITS: u32 = 32;
const MAX_SPLIT: usize = 16;

#[derive(Clone, Debug)]
pub(crate) struct Hull {
    center: Vec<f64>,
    radius: f64,
}

/// Float seeding result before snapping.
pub(crate) struct Hulls {
    n: usize,
    m: usize,
    cells: Vec<Vec<Hull>>,
    sphere: bool,
}

impl Hulls {
    /// Largest floating-point formal diameter over the cells that matter.
    pub(crate) fn fmesh(&self) -> f64 {
        self.cells
            .iter()
            .filter(|c| !c.is_empty())
            .map(|c| {
                let rmax = c.iter().map(|h| h.radius).fold(0.0, f64::max);
                let mut dmax = 0.0f64;
                for (i, a) in c.iter().enumerate() {
                    for b in &c[i + 1..] {
                        dmax = dmax.max(dist(&a.center, &b.center));
                    }
                }
                dmax + 2.0 * rmax
            })
            .fold(0.0, f64::max)
    }

    pub(crate) fn into_chain(self) -> Result<Chain> {
        let snap = |h: &Hull| -> Result<Ball> {
            let center = Point::from_f64(&h.center, SNAP_BITS);
            // Rounding moves the center by at most sqrt(n) 2^-33.
            let radius = dyadic(h.radius, SNAP_BITS) + pow2(-(SNAP_BITS as i64) + 2);
            Ball::new(center, radius)
        };
        let mut cells: Vec<Vec<Ball>> =
            self.cells.par_iter().map(|c| c.iter().map(snap).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        if self.sphere {
            let filler = cells
                .iter()
                .find(|c| !c.is_empty())
                .and_then(|c| c.first().cloned())
                .ok_or_else(|| Error::Candidate("no boundary cells".into()))?;
            for c in cells.iter_mut().filter(|c| c.is_empty()) {
                c.push(filler.clone());
            }
        }
        Chain::from_cell_balls(self.n, self.m, cells)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Hull ball of the images of a sampled sub-box.
fn hull_of(f: &dyn Sampler, bounds: &[(f64, f64)]) -> Hull {
    let free: Vec<usize> = (0..bounds.len()).filter(|&i| bounds[i].0 < bounds[i].1).collect();
    let s = SAMPLES_PER_AXIS;
    let total = s.pow(free.len() as u32);
    let mut images = Vec::with_capacity(total);
    for t in 0..total {
        let mut u: Vec<f64> = bounds.iter().map(|b| b.0).collect();
        let mut r = t;
        for &i in &free {
            let (lo, hi) = bounds[i];
            u[i] = lo + (hi - lo) * (r % s) as f64 / (s - 1) as f64;
            r /= s;
        }
        images.push(f.eval(&u));
    }
    let dim = images[0].len();
    let center: Vec<f64> = (0..dim)
        .map(|d| {
            let (lo, hi) =
                images.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[d]), hi.max(p[d])));
            0.5 * (lo + hi)
        })
        .collect();
    let reach = images.iter().map(|p| dist(p, &center)).fold(0.0, f64::max);
    let mut gap = 0.0f64;
    let mut stride = 1;
    for _ in &free {
        for t in 0..total {
            if (t / stride) % s + 1 < s {
                gap = gap.max(dist(&images[t], &images[t + stride]));
            }
        }
        stride *= s;
    }
    let radius = (reach + gap / 8.0) * (1.0 + 1.0 / 16.0);
    Hull { center, radius: if radius > 0.0 { radius } else { 1e-9 } }
}

/// Shortest image width of the box: the distance between the images of
/// opposite face midpoints, minimized over free axes.
fn image_width(f: &dyn Sampler, bounds: &[(f64, f64)], free: &[usize]) -> f64 {
    let mid: Vec<f64> = bounds.iter().map(|b| 0.5 * (b.0 + b.1)).collect();
    free.iter()
        .map(|&i| {
            let (mut lo, mut hi) = (mid.clone(), mid.clone());
            lo[i] = bounds[i].0;
            hi[i] = bounds[i].1;
            dist(&f.eval(&lo), &f.eval(&hi))
        })
        .fold(f64::INFINITY, f64::min)
}

fn piece_hulls(f: &dyn Sampler, bounds: &[(f64, f64)], delta: f64) -> Result<Vec<Hull>> {
    let free: Vec<usize> = (0..bounds.len()).filter(|&i| bounds[i].0 < bounds[i].1).collect();
    // A hull ball much wider than the piece (a sheared or stretched image)
    // would reach cells two steps away; halving the sub-boxes halves that
    // overhang.
    let mut k: usize =
        if free.len() > 1 && hull_of(f, bounds).radius > 0.95 * image_width(f, bounds, &free) { 2 } else { 1 };
    loop {
        let count = k.pow(free.len() as u32);
        let hulls: Vec<Hull> = (0..count)
            .map(|mut t| {
                let mut sub = bounds.to_vec();
                for &i in &free {
                    let (lo, hi) = bounds[i];
                    let j = t % k;
                    t /= k;
                    let w = (hi - lo) / k as f64;
                    sub[i] = (lo + w * j as f64, if j + 1 == k { hi } else { lo + w * (j + 1) as f64 });
                }
                hull_of(f, &sub)
            })
            .collect();
        if hulls.iter().all(|h| h.radius <= delta && h.radius.is_finite()) {
            return Ok(hulls);
        }
        if k >= MAX_SPLIT || free.is_empty() {
            return Err(Error::Candidate(format!("piece needs balls larger than δ = {delta} even at K = {k}")));
        }
        k *= 2;
    }
}

pub(crate) fn hulls(f: &dyn Sampler, n: usize, m: usize, delta: f64, sphere: bool) -> Result<Hulls> {
    if f.domain_dim() != n {
        return Err(Error::Candidate(format!("sampler takes {} coordinates, expected {n}", f.domain_dim())));
    }
    if sphere && (m == 0 || n < 2) {
        return Err(Error::Candidate("spherical seeding needs n >= 2 and m >= 1".into()));
    }
    let total = (m + 1)
        .checked_pow(n as u32)
        .filter(|&t| t <= 1 << 26)
        .ok_or_else(|| Error::Candidate(format!("grid side {m} too large")))?;
    let cells = (0..total)
        .into_par_iter()
        .map(|flat| {
            let idx = unflatten(flat, n, m + 1);
            if sphere {
                let mut out = Vec::new();
                for facet in boundary_facets(m, &idx)? {
                    out.extend(piece_hulls(f, &facet.bounds, delta)?);
                }
                Ok(out)
            } else {
                piece_hulls(f, &cell_box_f64(m, &idx), delta)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Hulls { n, m, cells, sphere })
}

pub fn seed_spherical_candidate(witness: &SphereWitness, m: usize, delta: &Rational) -> Result<Chain> {
    let f = witness.sets.sampler.build()?;
    hulls(&*f, witness.sets.faces.len(), m, to_f64(delta), true)?.into_chain()
}

pub fn seed_cell_candidate(witness: &CellWitness, m: usize, delta: &Rational) -> Result<Chain> {
    let f = witness.sets.sampler.build()?;
    hulls(&*f, witness.sets.faces.len(), m, to_f64(delta), false)?.into_chain()
}

/// Smallest `m` on the schedule `m <- ceil(1.1 m)` from an estimate whose
/// unconstrained seed has floating-point `fmesh` below `target`.
pub(crate) fn estimate_m(f: &dyn Sampler, n: usize, sphere: bool, target: f64) -> Result<usize> {
    const PROBE: usize = 8;
    let probe = hulls(f, n, PROBE, f64::INFINITY, sphere)?.fmesh();
    if !probe.is_finite() || probe <= 0.0 {
        return Err(Error::Candidate("sampler produced a degenerate probe".into()));
    }
    let mut m = (((PROBE + 1) as f64 * probe / target).ceil() as usize).saturating_sub(1).max(1);
    for _ in 0..64 {
        if hulls(f, n, m, f64::INFINITY, sphere)?.fmesh() < target {
            return Ok(m);
        }
        m = ((m as f64) * 1.1).ceil() as usize;
    }
    Err(Error::Candidate("no grid side reaches the mesh target".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::witness::Witness;
    use crate::chains::boundary_flats;
    use crate::effsets::SetSpec;
    use crate::rational::rat;

    fn circle() -> SphereWitness {
        match Witness::builtin(&SetSpec::named("circle").unwrap()).unwrap() {
            Witness::Sphere(w) => w,
            _ => unreachable!(),
        }
    }

    #[test]
    fn circle_seed_has_28_boundary_cells() {
        let chain = seed_spherical_candidate(&circle(), 7, &rat(1, 16)).unwrap();
        assert_eq!(chain.m(), 7);
        assert_eq!(chain.boundary().len(), 28);
        assert_eq!(boundary_flats(2, 7).len(), 28);
        for f in boundary_flats(2, 7) {
            for b in chain.cell_balls(f) {
                let c = b.center().approx();
                // Every ball sits on the circle up to its radius.
                assert!((c[0].hypot(c[1]) - 1.0).abs() < b.radius_f64());
                assert!(b.radius_f64() <= 1.0 / 16.0 + 1e-9);
            }
        }
    }

    #[test]
    fn zero_side_is_rejected() {
        assert!(seed_spherical_candidate(&circle(), 0, &rat(1, 16)).is_err());
    }

    #[test]
    fn small_delta_splits_pieces() {
        let coarse = seed_spherical_candidate(&circle(), 7, &rat(1, 4)).unwrap();
        let fine = seed_spherical_candidate(&circle(), 7, &rat(1, 64)).unwrap();
        assert!(fine.balls().len() > coarse.balls().len());
        assert!(seed_spherical_candidate(&circle(), 1, &rat(1, 1024)).is_err());
    }

    #[test]
    fn cell_seed_covers_every_cell() {
        let w = match Witness::builtin(&SetSpec::named("square_cell").unwrap()).unwrap() {
            Witness::Cell(w) => w,
            _ => unreachable!(),
        };
        let chain = seed_cell_candidate(&w, 3, &rat(1, 4)).unwrap();
        assert_eq!(chain.cells().len(), 16);
        for flat in 0..16 {
            let idx = chain.multi_index(flat);
            let b = &chain.cell_balls(flat)[0];
            let c = b.center().approx();
            assert!((c[0] - (idx[0] as f64 + 0.5) / 4.0).abs() < 1e-9);
            assert!((c[1] - (idx[1] as f64 + 0.5) / 4.0).abs() < 1e-9);
            assert!(b.radius_f64() > 2f64.sqrt() / 8.0);
        }
    }

    #[test]
    fn estimate_reaches_target() {
        let f = circle().sets.sampler.build().unwrap();
        let m = estimate_m(&*f, 2, true, 1.0 / 16.0).unwrap();
        assert!(hulls(&*f, 2, m, f64::INFINITY, true).unwrap().fmesh() < 1.0 / 16.0);
        assert!(hulls(&*f, 2, m - 3, f64::INFINITY, true).unwrap().fmesh() >= 1.0 / 16.0);
    }
}
