//! Face sets `W_i^ρ` and the separation exponent `k0`.
//!
//! For spheres the sets must be disjoint, `f(A_i^ρ) ⊆ W_i^ρ` and
//! `2 · 2^-k0 < d(f(A_i^0), f(A_i^1))`, where `A_i^ρ` is the face
//! `x_i = ρ` of `Iⁿ`. For cells the closures must be at distance greater
//! than `2 · 2^-k0`.
//!
//! Builtin witnesses, for a shape of center `c` and radius `R`:
//! * circle, sphere2: `W_i^0 = B(c - 4R e_i, 4R)`, `W_i^1 = B(c + 4R e_i, 4R)`,
//!   `k0 = 1`. Each ball meets the sphere in the cap `±(x_i - c_i) > R/8`,
//!   which contains the image of the face (`±(x_i - c_i) >= R/sqrt(n)`).
//! * ellipse: the same with `4R` replaced by `16 max(a, b)`.
//! * disk: `B(c ∓ 16R e_i, 991R/64)` with `k0 = 1`; opposite closures are
//!   `33R/32` apart and the quarter arcs stay `0.17R` inside.
//! * square `[lo, lo + s]²`: `B(lo + (-16 s, s/2), (16 + 3/16) s)` and the
//!   mirror image across `x = s/2`, with `k0 = 2`; opposite closures are
//!   `5s/8` apart.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::sampler::SamplerSpec;
use crate::effsets::SetSpec;
use crate::error::{Error, Result};
use crate::rational::{dyadic, int, pow2, rat, to_f64, Rational};
use crate::space::{Ball, Point, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Sphere,
    Cell,
}

/// `faces[i] = [W_i^0, W_i^1]`, each a finite union of rational balls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceSets {
    pub faces: Vec<[Vec<Ball>; 2]>,
    pub k0: u32,
    pub sampler: SamplerSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereWitness {
    #[serde(flatten)]
    pub sets: FaceSets,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellWitness {
    #[serde(flatten)]
    pub sets: FaceSets,
    /// The boundary sphere `f(∂Iⁿ)` as a co-c.e. set.
    pub boundary: SetSpec,
}

/// Either witness, as read from a witness file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Sphere(SphereWitness),
    Cell(CellWitness),
}

impl Witness {
    pub fn kind(&self) -> WitnessKind {
        match self {
            Witness::Sphere(_) => WitnessKind::Sphere,
            Witness::Cell(_) => WitnessKind::Cell,
        }
    }

    pub fn sets(&self) -> &FaceSets {
        match self {
            Witness::Sphere(w) => &w.sets,
            Witness::Cell(w) => &w.sets,
        }
    }

    /// `n`, the number of axes.
    pub fn n(&self) -> usize {
        self.sets().faces.len()
    }

    pub fn k0(&self) -> u32 {
        self.sets().k0
    }

    /// The exact separation requirement for this kind.
    pub fn validate(&self, space: &Space) -> Result<()> {
        match self {
            Witness::Sphere(w) => w.validate(space),
            Witness::Cell(w) => w.validate(space),
        }
    }

    /// Sampler-based checks of the trusted parts: the face images lie in
    /// their sets and are more than `2 · 2^-k0` apart, on a grid of
    /// `per_axis` points per edge.
    pub fn spot_check(&self, per_axis: usize) -> Result<()> {
        spot_check(self.sets(), per_axis)
    }

    pub fn builtin(set: &SetSpec) -> Result<Witness> {
        let sampler = SamplerSpec::for_set(set)?;
        let axis_pair = |center: &[Rational], offset: &Rational, radius: &Rational| -> Result<Vec<[Vec<Ball>; 2]>> {
            (0..center.len())
                .map(|i| {
                    let shifted = |sign: i64| {
                        let mut c = center.to_vec();
                        c[i] = &c[i] + offset * int(sign);
                        Ball::new(Point::new(c), radius.clone())
                    };
                    Ok([vec![shifted(-1)?], vec![shifted(1)?]])
                })
                .collect()
        };
        Ok(match set {
            SetSpec::Circle { center, radius } | SetSpec::Sphere2 { center, radius } => {
                let r = radius * int(4);
                let faces = axis_pair(center, &r, &r)?;
                Witness::Sphere(SphereWitness { sets: FaceSets { faces, k0: 1, sampler } })
            }
            SetSpec::Ellipse { center, a, b } => {
                let r = a.clone().max(b.clone()) * int(16);
                let faces = axis_pair(center, &r, &r)?;
                Witness::Sphere(SphereWitness { sets: FaceSets { faces, k0: 1, sampler } })
            }
            SetSpec::Disk { center, radius } => {
                let faces = axis_pair(center, &(radius * int(16)), &(radius * rat(991, 64)))?;
                Witness::Cell(CellWitness {
                    sets: FaceSets { faces, k0: 1, sampler },
                    boundary: circle_or_sphere(center, radius)?,
                })
            }
            SetSpec::SquareCell { lo, side } => {
                if lo.len() != 2 {
                    return Err(Error::ShapeParams("builtin square witness is two-dimensional".into()));
                }
                let mid: Vec<Rational> = lo.iter().map(|x| x + side * rat(1, 2)).collect();
                let faces = axis_pair(&mid, &(side * rat(33, 2)), &(side * (int(16) + rat(3, 16))))?;
                Witness::Cell(CellWitness {
                    sets: FaceSets { faces, k0: 2, sampler },
                    boundary: SetSpec::SquareOutline { lo: lo.clone(), side: side.clone() },
                })
            }
            other => return Err(Error::UnknownShape(format!("no builtin witness for {}", other.shape_name()))),
        })
    }
}

/// Heuristic face sets from a sampler: each `W_i^ρ` is one ball around the
/// sampled image of the face, padded by `2^(1 - k0)`, for the smallest `k0`
/// at which the result validates and passes [`Witness::spot_check`].
///
/// Nothing here is certified: the face images are only known at the
/// sampled points. Pass `boundary` to get a cell witness.
pub fn derive_heuristic(sampler: &SamplerSpec, boundary: Option<SetSpec>, per_axis: usize) -> Result<Witness> {
    const BITS: u32 = 16;
    let f = sampler.build()?;
    let n = f.domain_dim();
    let space = Space::euclidean(f.ambient_dim())?;
    // Center and reach of every face image.
    let mut hulls = Vec::with_capacity(n);
    for axis in 0..n {
        let mut pair = Vec::with_capacity(2);
        for side in 0..2u8 {
            let pts: Vec<Vec<f64>> = face_grid(n, axis, side, per_axis).iter().map(|u| f.eval(u)).collect();
            let dim = pts[0].len();
            let mid: Vec<f64> = (0..dim)
                .map(|d| {
                    let lo = pts.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min);
                    let hi = pts.iter().map(|p| p[d]).fold(f64::NEG_INFINITY, f64::max);
                    (lo + hi) / 2.0
                })
                .collect();
            let center = Point::new(mid.iter().map(|&x| dyadic(x, BITS)).collect());
            let reach = pts
                .iter()
                .map(|p| p.iter().zip(center.approx()).map(|(x, c)| (x - c) * (x - c)).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            pair.push((center, reach));
        }
        hulls.push(pair);
    }
    for k0 in 1..=BITS {
        let pad = to_f64(&pow2(1 - k0 as i64)) + to_f64(&pow2(-(BITS as i64)));
        let faces = hulls
            .iter()
            .map(|pair| {
                let ball =
                    |(c, reach): &(Point, f64)| Ball::new(c.clone(), dyadic(reach + pad, BITS) + pow2(-(BITS as i64)));
                Ok([vec![ball(&pair[0])?], vec![ball(&pair[1])?]])
            })
            .collect::<Result<Vec<_>>>()?;
        let sets = FaceSets { faces, k0, sampler: sampler.clone() };
        let w = match &boundary {
            Some(b) => Witness::Cell(CellWitness { sets, boundary: b.clone() }),
            None => Witness::Sphere(SphereWitness { sets }),
        };
        if w.validate(&space).is_ok() && w.spot_check(per_axis).is_ok() {
            log::warn!("derived a heuristic witness with k0 = {k0}; the face sets are not certified");
            return Ok(w);
        }
    }
    Err(Error::Witness("no separated face sets found from the sampler".into()))
}

fn circle_or_sphere(center: &[Rational], radius: &Rational) -> Result<SetSpec> {
    match center.len() {
        2 => Ok(SetSpec::Circle { center: center.to_vec(), radius: radius.clone() }),
        3 => Ok(SetSpec::Sphere2 { center: center.to_vec(), radius: radius.clone() }),
        d => Err(Error::ShapeParams(format!("no builtin boundary sphere in dimension {d}"))),
    }
}

fn check_shape(sets: &FaceSets, space: &Space) -> Result<()> {
    if sets.faces.len() < 2 {
        return Err(Error::Witness(format!("need at least 2 axes, got {}", sets.faces.len())));
    }
    for (i, pair) in sets.faces.iter().enumerate() {
        for (rho, w) in pair.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::Witness(format!("W_{}^{rho} is empty", i + 1)));
            }
            for b in w {
                space.check_point(b.center())?;
            }
        }
    }
    Ok(())
}

/// Smallest `d(c, c') - r - r'` sign over ball pairs drawn from the two
/// unions: `Greater` iff every pair has `d(c, c') > r + r' + gap`.
fn separated(space: &Space, a: &[Ball], b: &[Ball], gap: &Rational) -> Result<Ordering> {
    let ex = space.require_exact()?;
    let mut worst = Ordering::Greater;
    for p in a {
        for q in b {
            let s = p.radius() + q.radius() + gap;
            worst = worst.min(ex.cmp_dist(p.center(), q.center(), &s));
        }
    }
    Ok(worst)
}

impl SphereWitness {
    /// `W_i^0 ∩ W_i^1 = ∅`, checked ball pair by ball pair.
    pub fn validate(&self, space: &Space) -> Result<()> {
        check_shape(&self.sets, space)?;
        for (i, [w0, w1]) in self.sets.faces.iter().enumerate() {
            if separated(space, w0, w1, &Rational::default())? == Ordering::Less {
                return Err(Error::Witness(format!("W_{}^0 and W_{}^1 intersect", i + 1, i + 1)));
            }
        }
        Ok(())
    }
}

impl CellWitness {
    /// Closures at distance greater than `2 · 2^-k0`, checked ball pair by
    /// ball pair.
    pub fn validate(&self, space: &Space) -> Result<()> {
        check_shape(&self.sets, space)?;
        let gap = pow2(1 - self.sets.k0 as i64);
        for (i, [w0, w1]) in self.sets.faces.iter().enumerate() {
            if separated(space, w0, w1, &gap)? != Ordering::Greater {
                return Err(Error::Witness(format!(
                    "closures of W_{}^0 and W_{}^1 are not more than 2^{} apart",
                    i + 1,
                    i + 1,
                    1 - self.sets.k0 as i64
                )));
            }
        }
        if self.boundary.geometry()?.is_some_and(|g| g.dim() != self.sets.faces.len()) {
            return Err(Error::Witness("boundary set dimension differs from n".into()));
        }
        Ok(())
    }
}

/// Points of the face `x_axis = side` on a grid with `per_axis` points per
/// edge.
pub(crate) fn face_grid(n: usize, axis: usize, side: u8, per_axis: usize) -> Vec<Vec<f64>> {
    let per_axis = per_axis.max(2);
    let free = n - 1;
    let total = per_axis.pow(free as u32);
    (0..total)
        .map(|mut t| {
            let mut u = vec![side as f64; n];
            for (i, ui) in u.iter_mut().enumerate() {
                if i != axis {
                    *ui = (t % per_axis) as f64 / (per_axis - 1) as f64;
                    t /= per_axis;
                }
            }
            u
        })
        .collect()
}

fn in_union_f64(p: &[f64], w: &[Ball]) -> bool {
    w.iter().any(|b| {
        let d: f64 = p.iter().zip(b.center().approx()).map(|(x, c)| (x - c) * (x - c)).sum::<f64>().sqrt();
        d < b.radius_f64()
    })
}

fn spot_check(sets: &FaceSets, per_axis: usize) -> Result<()> {
    let f = sets.sampler.build()?;
    let n = sets.faces.len();
    if f.domain_dim() != n {
        return Err(Error::Witness(format!("sampler takes {} coordinates, witness has {n} axes", f.domain_dim())));
    }
    let bound = 2.0 * to_f64(&pow2(-(sets.k0 as i64)));
    for (axis, pair) in sets.faces.iter().enumerate() {
        let images: Vec<Vec<Vec<f64>>> =
            (0..2u8).map(|side| face_grid(n, axis, side, per_axis).iter().map(|u| f.eval(u)).collect()).collect();
        for (side, pts) in images.iter().enumerate() {
            if let Some(p) = pts.iter().find(|p| !in_union_f64(p, &pair[side])) {
                return Err(Error::Witness(format!(
                    "sampled f(A_{}^{side}) point {p:?} is outside W_{}^{side}",
                    axis + 1,
                    axis + 1
                )));
            }
        }
        let mut closest = f64::INFINITY;
        for p in &images[0] {
            for q in &images[1] {
                let d = p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                closest = closest.min(d);
            }
        }
        if closest <= bound {
            return Err(Error::Witness(format!(
                "sampled d(f(A_{0}^0), f(A_{0}^1)) = {closest} is not above 2^{1}",
                axis + 1,
                1 - sets.k0 as i64
            )));
        }
    }
    Ok(())
}
