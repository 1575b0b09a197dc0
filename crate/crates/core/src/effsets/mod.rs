//! Co-c.e. closed sets, the covering semi-decision, and the c.e. hit stream
//! obtained from an approximator.
//!
//! A [`CoCeSet`] is a total enumeration `f` of rational balls whose union is
//! the complement of the set, together with a closed bounding ball `w0`.
//!
//! The built-in enumerations interleave two streams:
//! * even `t = 2u`: the ball with code `u`, if its closure misses the set;
//! * odd `t = 2u + 1` with `u = pair(L + 4, z)`: the dyadic cube of side
//!   `2^-L` whose lower corner has zigzag coordinates coded by `z` (iterated
//!   pairing), replaced by a ball strictly containing it, if that ball's
//!   closure misses the set.
//!
//! Everything else maps to a ball far outside `w0`. The second stream lets
//! [`covers`] name the complement ball that swallows a subdivision box
//! directly instead of scanning a prefix of the enumeration.

mod program;
pub mod shapes;

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use program::{FnSet, ProgramSet, PROGRAM_LINE_CAP};
pub use shapes::Geometry;

use crate::chains::Chain;
use crate::codec::{pair, unpair};
use crate::error::{Error, Result};
use crate::rational::{int, pow2, serde_rational, serde_rational_vec, sqrt_upper, Rational};
use crate::space::{
    closed_union_in_union, decode_ball, subdivide, Ball, BallIndex, BoxClass, DyadicBox, Point, Space, SpaceSpec,
    SubdivOutcome, Verdict,
};

/// Exact points of the set tried before subdividing, so that a missing
/// piece is usually refuted immediately.
const PROBES: usize = 64;

pub trait CoCeSet: Send + Sync {
    fn name(&self) -> String;

    /// Serializable description, when the set can be rebuilt from one.
    fn spec(&self) -> Option<SetSpec>;

    /// `w0` with `S ⊆ Î_{w0}`.
    fn bounding_ball(&self) -> &Ball;

    /// `I_{f(t)}`. Total.
    fn complement_ball(&self, t: &BigUint) -> Ball;

    /// Some `t` with the closed box inside `I_{f(t)}`, found without search.
    fn complement_cover(&self, _b: &DyadicBox) -> Option<BigUint> {
        None
    }

    /// Whether [`CoCeSet::complement_cover`] is complete on small boxes.
    fn accelerated(&self) -> bool {
        false
    }

    /// Points known to lie in the set.
    fn probes(&self) -> &[Point] {
        &[]
    }

    fn geometry(&self) -> Option<&Geometry> {
        None
    }
}

/// JSON description of a set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SetSpec {
    Circle {
        #[serde(with = "serde_rational_vec")]
        center: Vec<Rational>,
        #[serde(with = "serde_rational")]
        radius: Rational,
    },
    Sphere2 {
        #[serde(with = "serde_rational_vec")]
        center: Vec<Rational>,
        #[serde(with = "serde_rational")]
        radius: Rational,
    },
    Disk {
        #[serde(with = "serde_rational_vec")]
        center: Vec<Rational>,
        #[serde(with = "serde_rational")]
        radius: Rational,
    },
    Ellipse {
        #[serde(with = "serde_rational_vec")]
        center: Vec<Rational>,
        #[serde(with = "serde_rational")]
        a: Rational,
        #[serde(with = "serde_rational")]
        b: Rational,
    },
    SquareCell {
        #[serde(with = "serde_rational_vec", default = "origin2")]
        lo: Vec<Rational>,
        #[serde(with = "serde_rational", default = "Rational::one")]
        side: Rational,
    },
    SquareOutline {
        #[serde(with = "serde_rational_vec", default = "origin2")]
        lo: Vec<Rational>,
        #[serde(with = "serde_rational", default = "Rational::one")]
        side: Rational,
    },
    HalfCircle {
        #[serde(with = "serde_rational_vec")]
        center: Vec<Rational>,
        #[serde(with = "serde_rational")]
        radius: Rational,
    },
    Custom {
        complement_program: PathBuf,
        #[serde(default)]
        args: Vec<String>,
        bounding_ball: Ball,
    },
}

fn origin2() -> Vec<Rational> {
    vec![Rational::zero(); 2]
}

impl SetSpec {
    /// Default parameters for a shape name: unit circle, sphere and disk at
    /// the origin, the ellipse with semi-axes 2 and 1, the unit square.
    pub fn named(name: &str) -> Result<SetSpec> {
        let one = Rational::one();
        Ok(match name {
            "circle" => SetSpec::Circle { center: origin2(), radius: one },
            "sphere2" => SetSpec::Sphere2 { center: vec![Rational::zero(); 3], radius: one },
            "disk" => SetSpec::Disk { center: origin2(), radius: one },
            "ellipse" => SetSpec::Ellipse { center: origin2(), a: int(2), b: one },
            "square_cell" | "square" => SetSpec::SquareCell { lo: origin2(), side: one },
            "square_outline" => SetSpec::SquareOutline { lo: origin2(), side: one },
            "half_circle" => SetSpec::HalfCircle { center: origin2(), radius: one },
            other => return Err(Error::UnknownShape(other.to_string())),
        })
    }

    pub fn shape_name(&self) -> &'static str {
        match self {
            SetSpec::Circle { .. } => "circle",
            SetSpec::Sphere2 { .. } => "sphere2",
            SetSpec::Disk { .. } => "disk",
            SetSpec::Ellipse { .. } => "ellipse",
            SetSpec::SquareCell { .. } => "square_cell",
            SetSpec::SquareOutline { .. } => "square_outline",
            SetSpec::HalfCircle { .. } => "half_circle",
            SetSpec::Custom { .. } => "custom",
        }
    }

    pub fn geometry(&self) -> Result<Option<Geometry>> {
        let p = |v: &Vec<Rational>| Point::new(v.clone());
        let g = match self {
            SetSpec::Circle { center, radius } => {
                if center.len() != 2 {
                    return Err(Error::ShapeParams("circle center needs 2 coordinates".into()));
                }
                Geometry::Sphere { center: p(center), radius: radius.clone() }
            }
            SetSpec::Sphere2 { center, radius } => {
                if center.len() != 3 {
                    return Err(Error::ShapeParams("sphere2 center needs 3 coordinates".into()));
                }
                Geometry::Sphere { center: p(center), radius: radius.clone() }
            }
            SetSpec::Disk { center, radius } => Geometry::Ball { center: p(center), radius: radius.clone() },
            SetSpec::Ellipse { center, a, b } => Geometry::Ellipse { center: p(center), a: a.clone(), b: b.clone() },
            SetSpec::SquareCell { lo, side } => Geometry::Square { lo: p(lo), side: side.clone() },
            SetSpec::SquareOutline { lo, side } => Geometry::SquareOutline { lo: p(lo), side: side.clone() },
            SetSpec::HalfCircle { center, radius } => Geometry::UpperArc { center: p(center), radius: radius.clone() },
            SetSpec::Custom { .. } => return Ok(None),
        };
        g.validate()?;
        Ok(Some(g))
    }

    pub fn build(&self, space: &Space) -> Result<Arc<dyn CoCeSet>> {
        match self {
            SetSpec::Custom { complement_program, args, bounding_ball } => {
                Ok(Arc::new(ProgramSet::spawn(space, complement_program, args, bounding_ball.clone())?))
            }
            _ => Ok(Arc::new(BuiltinSet::new(space, self.clone())?)),
        }
    }
}

/// A far-away ball `B(c0 + 4 R0 e1, R0)` that misses `Î_{w0}`.
pub fn dummy_ball(w0: &Ball) -> Ball {
    let c = w0.center();
    let mut coords = c.coords().to_vec();
    if coords.is_empty() {
        coords.push(Rational::zero());
    }
    coords[0] += w0.radius() * int(4);
    Ball::new(Point::new(coords), w0.radius().clone()).expect("w0 has positive radius")
}

fn zigzag(v: i64) -> BigUint {
    BigUint::from(((v << 1) ^ (v >> 63)) as u64)
}

fn unzigzag(z: &BigUint) -> Option<i64> {
    let z = z.to_u64()?;
    Some(((z >> 1) as i64) ^ -((z & 1) as i64))
}

/// A built-in shape in `ℝⁿ` with the interleaved enumeration described in
/// the module docs.
pub struct BuiltinSet {
    spec: SetSpec,
    geom: Geometry,
    w0: Ball,
    n: usize,
    /// Circumradius factor: a dyadic bound strictly above `sqrt(n) / 2`.
    h: Rational,
    space: Space,
    probes: Vec<Point>,
}

impl BuiltinSet {
    pub fn new(space: &Space, spec: SetSpec) -> Result<BuiltinSet> {
        let geom = spec.geometry()?.ok_or_else(|| Error::ShapeParams("custom sets are not built in".into()))?;
        let n = geom.dim();
        if space.spec() != (SpaceSpec::Euclidean { n }) {
            return Err(Error::ShapeParams(format!(
                "{} lives in euclidean:{n}, not {}",
                spec.shape_name(),
                space.spec()
            )));
        }
        let h = sqrt_upper(&Rational::new(n.into(), 4.into()), 8) + pow2(-8);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let probes = (0..PROBES).map(|_| geom.sample(&mut rng)).collect();
        Ok(BuiltinSet { w0: geom.bounding_ball(), spec, geom, n, h, space: space.clone(), probes })
    }

    fn circumball(&self, lo: &[i64], level: i64) -> Ball {
        let side = pow2(-level);
        let half = pow2(-level - 1);
        let center = Point::new(lo.iter().map(|&v| int(v) * &side + &half).collect());
        Ball::new(center, &self.h * side).expect("positive")
    }

    fn box_code(lo: &[i64], level: i64) -> BigUint {
        let mut z = zigzag(*lo.last().expect("n >= 1"));
        for &v in lo[..lo.len() - 1].iter().rev() {
            z = pair(&zigzag(v), &z);
        }
        let u = pair(&BigUint::from((level + 4) as u64), &z);
        (u << 1usize) + 1u32
    }

    fn decode_box(&self, u: &BigUint) -> Option<(Vec<i64>, i64)> {
        let (a, mut z) = unpair(u);
        let level = a.to_i64()?.checked_sub(4)?;
        if level > 200 {
            return None;
        }
        let mut lo = Vec::with_capacity(self.n);
        for _ in 1..self.n {
            let (x, rest) = unpair(&z);
            lo.push(unzigzag(&x)?);
            z = rest;
        }
        lo.push(unzigzag(&z)?);
        Some((lo, level))
    }
}

impl CoCeSet for BuiltinSet {
    fn name(&self) -> String {
        self.spec.shape_name().to_string()
    }

    fn spec(&self) -> Option<SetSpec> {
        Some(self.spec.clone())
    }

    fn bounding_ball(&self) -> &Ball {
        &self.w0
    }

    fn complement_ball(&self, t: &BigUint) -> Ball {
        let u: BigUint = t >> 1usize;
        let candidate = if (t & BigUint::one()).is_zero() {
            Some(decode_ball(&*self.space, &u))
        } else {
            self.decode_box(&u).map(|(lo, level)| self.circumball(&lo, level))
        };
        match candidate {
            Some(b) if self.geom.closed_ball_misses(&b) => b,
            _ => dummy_ball(&self.w0),
        }
    }

    fn complement_cover(&self, b: &DyadicBox) -> Option<BigUint> {
        let level = *b.level.first()?;
        if b.axes() != self.n || b.level.iter().any(|&l| l != level) || level < -4 {
            return None;
        }
        let ball = self.circumball(&b.lo, level as i64);
        self.geom.closed_ball_misses(&ball).then(|| Self::box_code(&b.lo, level as i64))
    }

    fn accelerated(&self) -> bool {
        true
    }

    fn probes(&self) -> &[Point] {
        &self.probes
    }

    fn geometry(&self) -> Option<&Geometry> {
        Some(&self.geom)
    }
}

/// Complement balls scanned by [`covers`] for sets without an accelerator.
pub fn complement_prefix_len(fuel: u32) -> usize {
    (8usize << fuel.min(20)).min(1 << 16)
}

/// `S ⊆ J`.
///
/// Subdivides dyadic boxes covering `Î_{w0}` to depth `fuel`: a box is
/// discarded when it misses `Î_{w0}` and accepted when it lies in a member
/// of `J` or in a complement ball. Accelerated sets name that complement
/// ball directly; others scan the first [`complement_prefix_len`] balls of
/// their enumeration. Spaces without exact geometry delegate
/// `Î_{w0} ⊆ J ∪ (∪_{t < N} I_{f(t)})` to their covering oracle.
pub fn covers(space: &Space, set: &dyn CoCeSet, j: &[Ball], fuel: u32) -> Result<Verdict> {
    space.require_ecp()?;
    space.require_compact_balls()?;
    let w0 = set.bounding_ball();
    let prefix = |len: usize| -> Vec<Ball> { (0..len).map(|t| set.complement_ball(&BigUint::from(t))).collect() };
    let Some(ex) = space.exact() else {
        let mut all = j.to_vec();
        all.extend(prefix(complement_prefix_len(fuel)));
        return closed_union_in_union(space, std::slice::from_ref(w0), &all, fuel);
    };
    let j_index = BallIndex::new(&**space, j);
    for p in set.probes() {
        let (lo, hi) = j_index.ball_box_of(&**space, &Ball::new(p.clone(), pow2(-40)).expect("positive"));
        let inside = j_index.query(&lo, &hi, |id| ex.cmp_dist(p, j[id].center(), j[id].radius()) == Ordering::Less);
        if !inside {
            return Ok(Verdict::refuted(format!("{p:?} lies in the set but not in the union")));
        }
    }
    let extra = if set.accelerated() { Vec::new() } else { prefix(complement_prefix_len(fuel)) };
    let c_index = BallIndex::new(&**space, &extra);
    let out = subdivide(
        ex.root_boxes(std::slice::from_ref(w0)),
        fuel,
        |b| ex.split(b),
        |bx| {
            if ex.box_misses_ball(bx, w0) {
                return BoxClass::Discard;
            }
            let (lo, hi) = ex.box_bounds(bx);
            if j_index.query(&lo, &hi, |id| ex.box_in_ball(bx, &j[id])) {
                return BoxClass::Accept;
            }
            if set.complement_cover(bx).is_some() || c_index.query(&lo, &hi, |id| ex.box_in_ball(bx, &extra[id])) {
                return BoxClass::Accept;
            }
            BoxClass::Split
        },
    );
    Ok(match out {
        SubdivOutcome::Resolved { depth, .. } => Verdict::yes(depth),
        SubdivOutcome::Exhausted { .. } => Verdict::exhausted(),
    })
}

/// `H_l` covers `S`.
pub fn chain_covers(space: &Space, set: &dyn CoCeSet, chain: &Chain, fuel: u32) -> Result<Verdict> {
    covers(space, set, &chain.all().member_balls(), fuel)
}

/// `∂H_l` covers `S`.
pub fn chain_boundary_covers(space: &Space, set: &dyn CoCeSet, chain: &Chain, fuel: u32) -> Result<Verdict> {
    covers(space, set, &chain.boundary().member_balls(), fuel)
}

/// `k ↦ J_{g(k)}` with `S ⊆ J_{g(k)}` and every point of `J_{g(k)}` within
/// `constant · 2^-k` of `S`.
pub trait Approximator: Send + Sync {
    fn constant(&self) -> u32;
    fn approximate(&self, k: u32) -> Result<Vec<Ball>>;
}

/// An [`Approximator`] from a closure, caching each precision.
pub struct FnApproximator<F> {
    constant: u32,
    f: F,
    cache: Mutex<HashMap<u32, Vec<Ball>>>,
}

impl<F: Fn(u32) -> Result<Vec<Ball>> + Send + Sync> FnApproximator<F> {
    pub fn new(constant: u32, f: F) -> Self {
        FnApproximator { constant, f, cache: Mutex::new(HashMap::new()) }
    }
}

impl<F: Fn(u32) -> Result<Vec<Ball>> + Send + Sync> Approximator for FnApproximator<F> {
    fn constant(&self) -> u32 {
        self.constant
    }

    fn approximate(&self, k: u32) -> Result<Vec<Ball>> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&k) {
            return Ok(v.clone());
        }
        let v = (self.f)(k)?;
        self.cache.lock().expect("cache lock").insert(k, v.clone());
        Ok(v)
    }
}

/// Witness that `S ∩ I ≠ ∅` from the approximation at precision `k`: a
/// point `p ∈ J_{g(k)}` with `Î(p, c 2^-k + δ) ⊆ I` for some `δ > 0`.
/// Candidates are the centers of `g(k)` followed by `α_0 .. α_k` that lie
/// in `J_{g(k)}`.
pub fn hit_at(space: &Space, approx: &dyn Approximator, ball: &Ball, k: u32) -> Result<Option<Point>> {
    let g = approx.approximate(k)?;
    let index = BallIndex::new(&**space, &g);
    Ok(hit_in(space, approx.constant(), &g, &index, ball, k))
}

fn hit_in(space: &Space, constant: u32, g: &[Ball], index: &BallIndex, ball: &Ball, k: u32) -> Option<Point> {
    let reach = int(constant as i64) * pow2(-(k as i64));
    if ball.radius() <= &reach {
        return None;
    }
    let slack = ball.radius() - &reach;
    let test = |p: &Point| match space.exact() {
        Some(ex) => ex.cmp_dist(p, ball.center(), &slack) == Ordering::Less,
        None => space.dist_approx(p, ball.center(), k + 1) + pow2(-(k as i64 + 1)) < slack,
    };
    let probe = Ball::new(ball.center().clone(), slack.clone()).expect("positive slack");
    let (lo, hi) = index.ball_box_of(&**space, &probe);
    let mut found = None;
    // A center within `slack` of `c` projects into the query box, so its
    // ball is visited.
    index.query(&lo, &hi, |id| {
        if test(g[id].center()) {
            found = Some(g[id].center().clone());
            return true;
        }
        false
    });
    if found.is_some() {
        return found;
    }
    (0..=k)
        .map(|j| space.dense_point(&BigUint::from(j)))
        .find(|p| test(p) && crate::space::point_in_open_union(&**space, p, g, k).is_yes())
}

/// Semi-decide `S ∩ I ≠ ∅` over precisions `0..=fuel`.
pub fn ce_hits_ball(space: &Space, approx: &dyn Approximator, ball: &Ball, fuel: u32) -> Result<Verdict> {
    for k in 0..=fuel {
        if hit_at(space, approx, ball, k)?.is_some() {
            return Ok(Verdict::yes(k));
        }
    }
    Ok(Verdict::exhausted())
}

/// Fuel that suffices for [`ce_hits_ball`] when the ball holds a point of
/// `S` at depth `depth` (the ball of radius `depth` around it is inside)
/// and the approximation at precision `k` uses balls of radius at most
/// `2^-k`, as certified outputs do: then some center is within
/// `r - constant · 2^-k` of the ball's center once `depth >= (constant + 1) 2^-k`.
pub fn hit_fuel_bound(constant: u32, depth: f64) -> u32 {
    ((constant as f64 + 1.0) / depth).log2().ceil().max(0.0) as u32
}

/// The c.e. hit set `{i : S ∩ I_i ≠ ∅}` as a stream.
///
/// Step `s = pair(i, t)` checks ball code `i` at precision
/// `min(floor(log2(t + 1)), max_precision)`; each code is emitted once.
pub struct CeHits<'a> {
    space: Space,
    approx: &'a dyn Approximator,
    step: u64,
    max_precision: u32,
    emitted: HashSet<BigUint>,
    levels: HashMap<u32, (Vec<Ball>, BallIndex)>,
}

pub fn ce_hits<'a>(space: &Space, approx: &'a dyn Approximator) -> CeHits<'a> {
    CeHits {
        space: space.clone(),
        approx,
        step: 0,
        max_precision: u32::MAX,
        emitted: HashSet::new(),
        levels: HashMap::new(),
    }
}

impl<'a> CeHits<'a> {
    pub fn with_max_precision(mut self, k: u32) -> Self {
        self.max_precision = k;
        self
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Run one dovetailing step.
    pub fn advance(&mut self) -> Result<Option<(BigUint, Ball)>> {
        let (i, t) = unpair(&BigUint::from(self.step));
        self.step += 1;
        if self.emitted.contains(&i) {
            return Ok(None);
        }
        let stage = t.to_u64().unwrap_or(u64::MAX);
        let k = (63 - (stage.saturating_add(1)).leading_zeros()).min(self.max_precision);
        let ball = decode_ball(&*self.space, &i);
        if !self.levels.contains_key(&k) {
            let g = self.approx.approximate(k)?;
            let index = BallIndex::new(&*self.space, &g);
            self.levels.insert(k, (g, index));
        }
        let (g, index) = &self.levels[&k];
        if hit_in(&self.space, self.approx.constant(), g, index, &ball, k).is_some() {
            self.emitted.insert(i.clone());
            return Ok(Some((i, ball)));
        }
        Ok(None)
    }
}

impl Iterator for CeHits<'_> {
    type Item = Result<(BigUint, Ball)>;

    /// Does not return for an empty set.
    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.advance() {
                Ok(Some(hit)) => return Some(Ok(hit)),
                Ok(None) => {}
                Err(e) => return Some(Err(e)),
            }
        }
    }
}
