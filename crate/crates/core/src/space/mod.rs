//! Computable metric spaces, rational balls and the fuel-bounded
//! semi-decisions built on them.
//!
//! A semi-decision is a total function of its inputs and a `fuel` budget
//! returning [`Verdict::Yes`] or [`Verdict::NotYet`]. `Yes` is always sound
//! and stays `Yes` for every larger fuel. What one unit of fuel buys is
//! documented per operation.

mod ball;
mod decide;
mod euclid;
mod hilbert;
pub mod index;
pub mod region;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

pub use ball::{Ball, Point};
pub use decide::{
    closed_union_in_union, closed_unions_disjoint, ecp_fuel_bound, point_fuel_bound, point_in_ball, point_in_open_ball,
    point_in_open_union, point_in_union,
};
pub use euclid::Euclidean;
pub use hilbert::HilbertCube;
pub use index::{BallIndex, Proj};
pub use region::{subdivide, BoxClass, DyadicBox, SubdivOutcome};

use crate::codec::{pair, rational_at, rational_index, seq_encode, seq_prefix, unpair};
use crate::error::{Error, Result};
use crate::rational::{pow2, Rational};

/// A computable metric space `(X, d, α)` whose dense points are finite
/// rational vectors.
pub trait Metric: Send + Sync {
    fn spec(&self) -> SpaceSpec;

    /// Length of coordinate vectors, or `None` when it varies.
    fn arity(&self) -> Option<usize>;

    /// `α_j`.
    fn dense_point(&self, j: &BigUint) -> Point;

    /// Some `j` with `α_j = p`.
    fn point_index(&self, p: &Point) -> Result<BigUint>;

    /// Reject coordinate vectors that are not points of the space.
    fn check_point(&self, p: &Point) -> Result<()>;

    /// Rational `F` with `|d(a, b) - F| < 2^-k`.
    fn dist_approx(&self, a: &Point, b: &Point, k: u32) -> Rational;

    /// Map to at most three reals, 1-Lipschitz in every coordinate.
    fn project(&self, p: &Point) -> Proj;

    fn projection_dims(&self) -> usize;

    /// Exact geometry, present for convex subsets of normed spaces.
    fn exact(&self) -> Option<&dyn ExactMetric> {
        None
    }

    /// User-supplied covering oracle for spaces without exact geometry.
    fn covering(&self) -> Option<&dyn CoveringOracle> {
        None
    }

    fn compact_closed_balls(&self) -> bool;

    fn has_ecp(&self) -> bool {
        self.exact().is_some() || self.covering().is_some()
    }
}

/// Exact predicates for spaces that are convex subsets of a normed space,
/// so that closed balls meet exactly when `d(c1, c2) <= r1 + r2`.
pub trait ExactMetric: Send + Sync {
    /// Sign of `d(a, b) - r` for `r >= 0`.
    fn cmp_dist(&self, a: &Point, b: &Point, r: &Rational) -> Ordering;

    fn dist_f64(&self, a: &Point, b: &Point) -> f64;

    /// `a + t (b - a)`.
    fn interpolate(&self, a: &Point, b: &Point, t: &Rational) -> Point;

    /// Boxes whose union contains every closed ball in `balls`.
    fn root_boxes(&self, balls: &[Ball]) -> Vec<DyadicBox>;

    fn split(&self, b: &DyadicBox) -> Vec<DyadicBox>;

    /// True only if the closed box and the closed ball are disjoint.
    fn box_misses_ball(&self, b: &DyadicBox, ball: &Ball) -> bool;

    /// True only if the closed box lies in the open ball.
    fn box_in_ball(&self, b: &DyadicBox, ball: &Ball) -> bool;

    /// Projected bounds of the box, compatible with [`Metric::project`].
    fn box_bounds(&self, b: &DyadicBox) -> (Proj, Proj);
}

/// Semi-decision of `Ĵ_a ⊆ J_j` for spaces that bring their own.
pub trait CoveringOracle: Send + Sync {
    fn closed_union_in_union(&self, a: &[Ball], j: &[Ball], fuel: u32) -> Verdict;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceSpec {
    Euclidean { n: usize },
    HilbertCube,
    Custom { name: String },
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Euclidean { n } => write!(f, "euclidean:{n}"),
            SpaceSpec::HilbertCube => write!(f, "hilbert-cube"),
            SpaceSpec::Custom { name } => write!(f, "custom:{name}"),
        }
    }
}

/// Shared handle to a space.
#[derive(Clone)]
pub struct Space(Arc<dyn Metric>);

impl Space {
    pub fn euclidean(n: usize) -> Result<Space> {
        Ok(Space(Arc::new(Euclidean::new(n)?)))
    }

    pub fn hilbert_cube() -> Space {
        Space(Arc::new(HilbertCube))
    }

    pub fn custom(metric: impl Metric + 'static) -> Space {
        Space(Arc::new(metric))
    }

    pub fn from_spec(spec: &SpaceSpec) -> Result<Space> {
        match spec {
            SpaceSpec::Euclidean { n } => Space::euclidean(*n),
            SpaceSpec::HilbertCube => Ok(Space::hilbert_cube()),
            SpaceSpec::Custom { name } => {
                Err(Error::Format(format!("custom space {name:?} cannot be rebuilt from its name")))
            }
        }
    }

    pub fn require_exact(&self) -> Result<&dyn ExactMetric> {
        self.exact().ok_or_else(|| Error::MissingHypothesis { space: self.spec().to_string(), what: "exact geometry" })
    }

    pub fn require_ecp(&self) -> Result<()> {
        if self.has_ecp() {
            Ok(())
        } else {
            Err(Error::MissingHypothesis { space: self.spec().to_string(), what: "effective covering property" })
        }
    }

    pub fn require_compact_balls(&self) -> Result<()> {
        if self.compact_closed_balls() {
            Ok(())
        } else {
            Err(Error::MissingHypothesis { space: self.spec().to_string(), what: "compact closed balls" })
        }
    }
}

impl Deref for Space {
    type Target = dyn Metric;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({})", self.spec())
    }
}

/// Outcome of a semi-decision.
#[derive(Clone, Debug)]
pub enum Verdict {
    Yes(Evidence),
    NotYet(Stall),
}

#[derive(Clone, Debug, Default)]
pub struct Evidence {
    /// Smallest fuel at which this answer was produced.
    pub stage: u32,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub enum Witness {
    /// Index of the member ball that fired.
    Member(usize),
    /// Per-pair witnesses of a properness check.
    Proper(Vec<crate::chains::PairWitness>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stall {
    /// Fuel ran out.
    Exhausted,
    /// The exact path showed the predicate is false; more fuel will not help.
    Refuted(String),
}

impl Verdict {
    pub fn yes(stage: u32) -> Verdict {
        Verdict::Yes(Evidence { stage, witness: None })
    }

    pub fn yes_with(stage: u32, witness: Witness) -> Verdict {
        Verdict::Yes(Evidence { stage, witness: Some(witness) })
    }

    pub fn exhausted() -> Verdict {
        Verdict::NotYet(Stall::Exhausted)
    }

    pub fn refuted(why: impl Into<String>) -> Verdict {
        Verdict::NotYet(Stall::Refuted(why.into()))
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::NotYet(Stall::Refuted(_)))
    }

    pub fn stage(&self) -> Option<u32> {
        match self {
            Verdict::Yes(e) => Some(e.stage),
            Verdict::NotYet(_) => None,
        }
    }
}

/// A real number given by `k ↦ r_k` with `|x - r_k| < 2^-k`.
#[derive(Clone)]
pub struct ComputableReal(Arc<dyn Fn(u32) -> Rational + Send + Sync>);

impl ComputableReal {
    pub fn new(f: impl Fn(u32) -> Rational + Send + Sync + 'static) -> Self {
        ComputableReal(Arc::new(f))
    }

    pub fn exact(q: Rational) -> Self {
        ComputableReal::new(move |_| q.clone())
    }

    pub fn approx(&self, k: u32) -> Rational {
        (self.0)(k)
    }

    /// A strict upper bound: `approx(k) + 2^-k`.
    pub fn upper(&self, k: u32) -> Rational {
        self.approx(k) + pow2(-(k as i64))
    }

    pub fn lower(&self, k: u32) -> Rational {
        self.approx(k) - pow2(-(k as i64))
    }

    /// Semi-decide `x < q`, trying precisions `0..=fuel`.
    pub fn less_than(&self, q: &Rational, fuel: u32) -> Verdict {
        for k in 0..=fuel {
            if &self.upper(k) <= q {
                return Verdict::yes(k);
            }
        }
        Verdict::exhausted()
    }
}

impl fmt::Debug for ComputableReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComputableReal(~{})", crate::rational::to_f64(&self.approx(20)))
    }
}

/// `I_i = B(α_{τ(i)}, q_{τ'(i)})` with `(τ(i), τ'(i)) = unpair(i)`.
pub fn decode_ball(space: &dyn Metric, i: &BigUint) -> Ball {
    let (c, r) = unpair(i);
    Ball::new(space.dense_point(&c), rational_at(&r)).expect("q enumerates positive rationals")
}

pub fn ball_code(space: &dyn Metric, ball: &Ball) -> Result<BigUint> {
    let c = space.point_index(ball.center())?;
    let r = rational_index(ball.radius())?;
    Ok(pair(&c, &r))
}

/// Member balls of `J_j`, in sequence order (duplicates kept, a zero tail
/// read once).
pub fn decode_union(space: &dyn Metric, j: &BigUint) -> Vec<Ball> {
    seq_prefix(j).iter().map(|i| decode_ball(space, i)).collect()
}

pub fn union_code(space: &dyn Metric, balls: &[Ball]) -> Result<BigUint> {
    if balls.is_empty() {
        return Err(Error::EmptyUnion);
    }
    let codes = balls.iter().map(|b| ball_code(space, b)).collect::<Result<Vec<_>>>()?;
    seq_encode(&codes)
}
