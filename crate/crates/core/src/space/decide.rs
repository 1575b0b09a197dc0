//! Semi-decisions on points, balls and finite unions.
//!
//! Fuel semantics:
//! * membership tests try precisions `0..=fuel` of `dist_approx`;
//! * the covering oracle subdivides to depth `fuel` below the root boxes;
//! * disjointness on spaces with exact geometry answers at stage 0, and
//!   otherwise tries precisions `0..=fuel`.

use std::cmp::Ordering;

use num_bigint::BigUint;

use super::index::BallIndex;
use super::region::{subdivide, BoxClass, SubdivOutcome};
use super::{decode_ball, decode_union, Ball, ExactMetric, Metric, Point, Space, Verdict, Witness};
use crate::error::Result;
use crate::rational::{pow2, to_f64};

/// `p ∈ B(c, r)`: `Yes` once `dist_approx(p, c, s) + 2^-s <= r` for some
/// `s <= fuel`. Reached by fuel `point_fuel_bound(r - d(p, c))`.
pub fn point_in_open_ball(space: &dyn Metric, p: &Point, ball: &Ball, fuel: u32) -> Verdict {
    if let Some(ex) = space.exact() {
        if ex.cmp_dist(p, ball.center(), ball.radius()) != Ordering::Less {
            return Verdict::refuted("point is not inside the open ball");
        }
    }
    for s in 0..=fuel {
        let f = space.dist_approx(p, ball.center(), s);
        if f + pow2(-(s as i64)) <= *ball.radius() {
            return Verdict::yes(s);
        }
    }
    Verdict::exhausted()
}

/// Smallest fuel that [`point_in_open_ball`] needs when the point is inside
/// with margin `r - d >= margin`.
pub fn point_fuel_bound(margin: f64) -> u32 {
    (2.0 / margin).log2().ceil().max(0.0) as u32
}

/// `α_k ∈ I_i`.
pub fn point_in_ball(space: &dyn Metric, k: &BigUint, i: &BigUint, fuel: u32) -> Verdict {
    point_in_open_ball(space, &space.dense_point(k), &decode_ball(space, i), fuel)
}

/// `p ∈ ∪ balls`, dovetailing precision over members; the witness is the
/// index of the member that fired first.
pub fn point_in_open_union(space: &dyn Metric, p: &Point, balls: &[Ball], fuel: u32) -> Verdict {
    if let Some(ex) = space.exact() {
        if !balls.iter().any(|b| ex.cmp_dist(p, b.center(), b.radius()) == Ordering::Less) {
            return Verdict::refuted("point lies in no member ball");
        }
    }
    for s in 0..=fuel {
        let slack = pow2(-(s as i64));
        for (idx, b) in balls.iter().enumerate() {
            if space.dist_approx(p, b.center(), s) + &slack <= *b.radius() {
                return Verdict::yes_with(s, Witness::Member(idx));
            }
        }
    }
    Verdict::exhausted()
}

/// `α_k ∈ J_j`.
pub fn point_in_union(space: &dyn Metric, k: &BigUint, j: &BigUint, fuel: u32) -> Verdict {
    point_in_open_union(space, &space.dense_point(k), &decode_union(space, j), fuel)
}

/// The covering oracle: `Ĵ_a ⊆ J_j`.
///
/// With exact geometry: first every member of `a` is tried against single
/// members of `j`; then a bounding set of dyadic boxes is subdivided to
/// depth `fuel`, discarding boxes that miss `Ĵ_a` and accepting boxes that
/// sit inside one member of `j`.
pub fn closed_union_in_union(space: &Space, a: &[Ball], j: &[Ball], fuel: u32) -> Result<Verdict> {
    space.require_ecp()?;
    if let Some(ex) = space.exact() {
        return Ok(ecp_subdivision(space, ex, a, j, fuel));
    }
    Ok(space.covering().expect("has_ecp").closed_union_in_union(a, j, fuel))
}

pub(crate) fn single_ball_inside(ex: &dyn ExactMetric, inner: &Ball, outer: &Ball) -> bool {
    outer.radius() > inner.radius()
        && ex.cmp_dist(inner.center(), outer.center(), &(outer.radius() - inner.radius())) == Ordering::Less
}

fn ecp_subdivision(space: &Space, ex: &dyn ExactMetric, a: &[Ball], j: &[Ball], fuel: u32) -> Verdict {
    if a.is_empty() {
        return Verdict::yes(0);
    }
    if j.is_empty() {
        return Verdict::refuted("nonempty union inside the empty union");
    }
    let j_index = BallIndex::new(&**space, j);
    let quick = a.iter().all(|b| {
        let (lo, hi) = j_index.ball_box_of(&**space, b);
        j_index.query(&lo, &hi, |id| single_ball_inside(ex, b, &j[id]))
    });
    if quick {
        return Verdict::yes(0);
    }
    let a_index = BallIndex::new(&**space, a);
    let out = subdivide(
        ex.root_boxes(a),
        fuel,
        |b| ex.split(b),
        |bx| {
            let (lo, hi) = ex.box_bounds(bx);
            let meets_a = a_index.query(&lo, &hi, |id| !ex.box_misses_ball(bx, &a[id]));
            if !meets_a {
                return BoxClass::Discard;
            }
            if j_index.query(&lo, &hi, |id| ex.box_in_ball(bx, &j[id])) {
                BoxClass::Accept
            } else {
                BoxClass::Split
            }
        },
    );
    match out {
        SubdivOutcome::Resolved { depth, .. } => Verdict::yes(depth),
        SubdivOutcome::Exhausted { .. } => Verdict::exhausted(),
    }
}

/// Depth that suffices for [`closed_union_in_union`] in `ℝⁿ` when every
/// point of `Ĵ_a` is at least `margin` inside some member of `j`: boxes of
/// diameter below the margin are accepted.
pub fn ecp_fuel_bound(space: &Space, a: &[Ball], margin: f64) -> Option<u32> {
    let n = space.arity()?;
    let ex = space.exact()?;
    let roots = ex.root_boxes(a);
    let side = roots.first()?.side_f64(0);
    let d = (side * (n as f64).sqrt() / margin).log2().ceil().max(0.0) as u32;
    Some(d + 1)
}

/// `Ĵ_a ∩ Ĵ_b = ∅`.
///
/// With exact geometry this is the pairwise test `d(c, c') > r + r'`, which
/// is exact in convex subsets of normed spaces and answers at stage 0.
/// Otherwise precisions `0..=fuel` are tried for formal separation
/// `F - 2^-s > r + r'`, which is sound in every metric space.
pub fn closed_unions_disjoint(space: &Space, a: &[Ball], b: &[Ball], fuel: u32) -> Result<Verdict> {
    space.require_compact_balls()?;
    if let Some(ex) = space.exact() {
        for (x, p) in a.iter().enumerate() {
            for (y, q) in b.iter().enumerate() {
                let sum = p.radius() + q.radius();
                if ex.cmp_dist(p.center(), q.center(), &sum) != Ordering::Greater {
                    return Ok(Verdict::refuted(format!("members {x} and {y} intersect")));
                }
            }
        }
        return Ok(Verdict::yes(0));
    }
    let mut stage = 0;
    for p in a {
        for q in b {
            let sum = p.radius() + q.radius();
            let mut ok = false;
            let start = stage;
            for s in start..=fuel {
                let f = space.dist_approx(p.center(), q.center(), s);
                if f - pow2(-(s as i64)) > sum {
                    stage = s;
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Ok(Verdict::exhausted());
            }
        }
    }
    Ok(Verdict::yes(stage))
}

impl BallIndex {
    /// Projected box of a ball not stored in the index.
    pub fn ball_box_of(&self, space: &dyn Metric, b: &Ball) -> (super::Proj, super::Proj) {
        let c = space.project(b.center());
        let r = to_f64(b.radius()) * (1.0 + 1e-9);
        (c.map(|v| v - r), c.map(|v| v + r))
    }
}
