//! Families of ball unions indexed by `ℕ_mⁿ = {0..m}ⁿ` and the
//! semi-decisions on them: chain-hood, properness, formal mesh, and the ζ
//! merges.
//!
//! A [`Chain`] keeps one table of balls and, per multi-index, the sorted list
//! of table positions forming that cell. Cells are stored row-major with the
//! last index fastest. Spherical chains use the same storage; only cells on
//! `∂ℕ_mⁿ` are read.
//!
//! Adjacency is the sup-norm gap: `a ~ b` iff `|a_i - b_i| <= 1` for all `i`,
//! which includes `a ~ a`. Properness skips the diagonal pairs since every
//! cell is a nonempty open set.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::codec::{flatten, grid_decode, grid_encode, unflatten};
use crate::error::{Error, Result};
use crate::rational::{dyadic, pow2, Rational};
use crate::space::{
    closed_unions_disjoint, decode_union, point_in_open_union, union_code, Ball, BallIndex, ComputableReal,
    ExactMetric, Metric, Point, Space, Verdict, Witness,
};

/// `∂_i^ρ ℕ_mⁿ`: indices whose coordinate `axis` (0-based) is `0` for side 0
/// or `m` for side 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub axis: usize,
    pub side: u8,
}

impl Face {
    pub fn all(n: usize) -> impl Iterator<Item = Face> {
        (0..n).flat_map(|axis| [0u8, 1].map(|side| Face { axis, side }))
    }
}

#[derive(Clone, Debug)]
pub struct Chain {
    n: usize,
    m: usize,
    balls: Vec<Ball>,
    cells: Vec<Vec<u32>>,
}

impl Chain {
    pub fn new(n: usize, m: usize, balls: Vec<Ball>, mut cells: Vec<Vec<u32>>) -> Result<Chain> {
        if n == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        let expected = (m + 1).checked_pow(n as u32).ok_or_else(|| Error::Format("chain too large".into()))?;
        if cells.len() != expected {
            return Err(Error::Format(format!("expected {expected} cells, got {}", cells.len())));
        }
        for (flat, cell) in cells.iter_mut().enumerate() {
            cell.sort_unstable();
            cell.dedup();
            if cell.is_empty() {
                return Err(Error::Format(format!("cell {flat} is empty")));
            }
            if let Some(&bad) = cell.iter().find(|&&id| id as usize >= balls.len()) {
                return Err(Error::Format(format!("cell {flat} refers to missing ball {bad}")));
            }
        }
        Ok(Chain { n, m, balls, cells })
    }

    /// Build from per-cell ball lists, sharing equal balls in one table.
    pub fn from_cell_balls(n: usize, m: usize, cells: Vec<Vec<Ball>>) -> Result<Chain> {
        let mut table: Vec<Ball> = Vec::new();
        let mut seen: HashMap<Ball, u32> = HashMap::new();
        let ids = cells
            .into_iter()
            .map(|cell| {
                cell.into_iter()
                    .map(|b| {
                        *seen.entry(b.clone()).or_insert_with(|| {
                            table.push(b);
                            (table.len() - 1) as u32
                        })
                    })
                    .collect()
            })
            .collect();
        Chain::new(n, m, table, ids)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn side(&self) -> usize {
        self.m + 1
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn cells(&self) -> &[Vec<u32>] {
        &self.cells
    }

    pub fn cell(&self, flat: usize) -> &[u32] {
        &self.cells[flat]
    }

    pub fn cell_balls(&self, flat: usize) -> Vec<Ball> {
        self.cells[flat].iter().map(|&id| self.balls[id as usize].clone()).collect()
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, self.n, self.side())
    }

    pub fn flat_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.n {
            return Err(Error::PointArity { expected: self.n, got: idx.len() });
        }
        if let Some(&j) = idx.iter().find(|&&j| j > self.m) {
            return Err(Error::GridIndexOutOfRange { index: j, side: self.m });
        }
        Ok(flatten(idx, self.side()))
    }

    pub fn is_boundary(&self, flat: usize) -> bool {
        is_boundary_index(&self.multi_index(flat), self.m)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        let side = self.side();
        let (mut a, mut b) = (a, b);
        for _ in 0..self.n {
            if (a % side).abs_diff(b % side) > 1 {
                return false;
            }
            a /= side;
            b /= side;
        }
        true
    }

    /// The whole family `H_l`.
    pub fn all(&self) -> View<'_> {
        View { chain: self, flats: (0..self.cells.len()).collect() }
    }

    /// `∂H_l`: the restriction to `∂ℕ_mⁿ`.
    pub fn boundary(&self) -> View<'_> {
        View { chain: self, flats: boundary_flats(self.n, self.m) }
    }

    /// `∂_i^ρ H_l`.
    pub fn face(&self, face: Face) -> Result<View<'_>> {
        if face.axis >= self.n || face.side > 1 {
            return Err(Error::FaceAxis { axis: face.axis, n: self.n });
        }
        let want = if face.side == 0 { 0 } else { self.m };
        let flats = (0..self.cells.len()).filter(|&f| self.multi_index(f)[face.axis] == want).collect();
        Ok(View { chain: self, flats })
    }

    /// Canonical `ChainCode`. Codes grow doubly exponentially with the
    /// number of balls, so this is only practical for tiny chains.
    pub fn code(&self, space: &dyn Metric) -> Result<BigUint> {
        let entries =
            (0..self.cells.len()).map(|f| union_code(space, &self.cell_balls(f))).collect::<Result<Vec<_>>>()?;
        grid_encode(self.n, self.m, &entries)
    }

    /// `H_l` for an `n`-dimensional code `l`.
    pub fn from_code(space: &dyn Metric, n: usize, l: &BigUint) -> Result<Chain> {
        let (m, entries) = grid_decode(l, n)?;
        let cells = entries.iter().map(|j| decode_union(space, j)).collect();
        Chain::from_cell_balls(n, m, cells)
    }

    pub fn to_json(&self) -> ChainJson {
        ChainJson { n: self.n, m: self.m, balls: self.balls.clone(), cells: self.nested(0, 0) }
    }

    fn nested(&self, depth: usize, prefix: usize) -> Value {
        if depth == self.n {
            return Value::from(self.cells[prefix].clone());
        }
        Value::Array((0..self.side()).map(|j| self.nested(depth + 1, prefix * self.side() + j)).collect())
    }

    pub fn from_json(json: &ChainJson) -> Result<Chain> {
        let mut cells = Vec::new();
        flatten_nested(&json.cells, json.n, json.m + 1, &mut cells)?;
        Chain::new(json.n, json.m, json.balls.clone(), cells)
    }
}

fn flatten_nested(v: &Value, depth: usize, side: usize, out: &mut Vec<Vec<u32>>) -> Result<()> {
    let arr = v.as_array().ok_or_else(|| Error::Format("cells must be nested arrays".into()))?;
    if depth == 0 {
        let ids = arr
            .iter()
            .map(|x| {
                x.as_u64()
                    .and_then(|x| u32::try_from(x).ok())
                    .ok_or_else(|| Error::Format("cell members must be ball indices".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(ids);
        return Ok(());
    }
    if arr.len() != side {
        return Err(Error::Format(format!("expected {side} entries per axis, got {}", arr.len())));
    }
    for x in arr {
        flatten_nested(x, depth - 1, side, out)?;
    }
    Ok(())
}

/// JSON form: `{n, m, balls, cells}` with `cells` nested `n` deep and each
/// leaf a list of positions in `balls`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChainJson {
    pub n: usize,
    pub m: usize,
    pub balls: Vec<Ball>,
    pub cells: Value,
}

pub fn is_boundary_index(idx: &[usize], m: usize) -> bool {
    idx.iter().any(|&j| j == 0 || j == m)
}

/// Flat indices of `∂ℕ_mⁿ` in increasing order.
pub fn boundary_flats(n: usize, m: usize) -> Vec<usize> {
    let side = m + 1;
    (0..side.pow(n as u32)).filter(|&f| is_boundary_index(&unflatten(f, n, side), m)).collect()
}

/// `|∂ℕ_mⁿ| = (m + 1)ⁿ - (m - 1)ⁿ` for `m >= 1`.
pub fn boundary_count(n: usize, m: usize) -> usize {
    if m == 0 {
        return 1;
    }
    (m + 1).pow(n as u32) - (m - 1).pow(n as u32)
}

/// A restriction of a chain to a set of indices. Pure reindexing.
#[derive(Clone, Debug)]
pub struct View<'a> {
    chain: &'a Chain,
    flats: Vec<usize>,
}

impl<'a> View<'a> {
    pub fn chain(&self) -> &'a Chain {
        self.chain
    }

    pub fn flats(&self) -> &[usize] {
        &self.flats
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.flats.binary_search(&flat).is_ok()
    }

    /// Member set of the merged union, sorted.
    pub fn members(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.flats.iter().flat_map(|&f| self.chain.cells[f].iter().copied()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn member_balls(&self) -> Vec<Ball> {
        self.members().iter().map(|&id| self.chain.balls[id as usize].clone()).collect()
    }

    /// Adjacent pairs `(a, b)` with `a < b`, both in the view.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.chain.n;
        let side = self.chain.side() as i64;
        let offsets: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
            .map(|code| unflatten(code, n, 3).into_iter().map(|d| d as i64 - 1).collect())
            .collect();
        let mut out = Vec::new();
        for &a in &self.flats {
            let idx = self.chain.multi_index(a);
            for off in &offsets {
                let mut b = 0i64;
                let mut ok = true;
                for (i, d) in off.iter().enumerate() {
                    let v = idx[i] as i64 + d;
                    if v < 0 || v >= side {
                        ok = false;
                        break;
                    }
                    b = b * side + v;
                }
                let b = b as usize;
                if ok && b > a && self.contains(b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// `ζ(l)`: members of `∪H_l`.
pub fn zeta(chain: &Chain) -> Vec<u32> {
    chain.all().members()
}

/// `ζ'(l)`: members of `∪∂H_l`.
pub fn zeta_boundary(chain: &Chain) -> Vec<u32> {
    chain.boundary().members()
}

/// `ζ(l)` on codes: the union code of `∪H_l` for an `n`-dimensional `l`.
pub fn zeta_code(space: &dyn Metric, n: usize, l: &BigUint) -> Result<BigUint> {
    let chain = Chain::from_code(space, n, l)?;
    union_code(space, &chain.all().member_balls())
}

/// `ζ'(l)` on codes.
pub fn zeta_boundary_code(space: &dyn Metric, n: usize, l: &BigUint) -> Result<BigUint> {
    let chain = Chain::from_code(space, n, l)?;
    union_code(space, &chain.boundary().member_balls())
}

/// `ζ''(l, face)`: members of `∪∂_i^ρ H_l`.
pub fn zeta_face(chain: &Chain, face: Face) -> Result<Vec<u32>> {
    Ok(chain.face(face)?.members())
}

/// Formal diameter `max d(x_v, x_w) + 2 max r_v` of a ball list. The
/// approximation at precision `k` uses distance approximations at `k + 1`.
pub fn fdiam(space: &Space, balls: &[Ball]) -> ComputableReal {
    let space = space.clone();
    let balls = balls.to_vec();
    ComputableReal::new(move |k| {
        let rmax = balls.iter().map(|b| b.radius()).max().cloned().unwrap_or_default();
        let mut dmax = Rational::default();
        for (i, a) in balls.iter().enumerate() {
            for b in &balls[i + 1..] {
                let d = space.dist_approx(a.center(), b.center(), k + 1);
                if d > dmax {
                    dmax = d;
                }
            }
        }
        dmax + rmax * Rational::from_integer(2.into())
    })
}

/// `fdiam(balls) < eps`. Exact geometry decides it at stage 0 by comparing
/// `2 r_max` and every center distance with `eps - 2 r_max`; otherwise
/// precisions `0..=fuel` of [`fdiam`] are tried.
pub fn fdiam_below(space: &Space, balls: &[Ball], eps: &Rational, fuel: u32) -> Verdict {
    let Some(ex) = space.exact() else {
        return fdiam(space, balls).less_than(eps, fuel);
    };
    let rmax = balls.iter().map(|b| b.radius()).max().cloned().unwrap_or_default();
    let slack = eps - &rmax * Rational::from_integer(2.into());
    if slack <= Rational::default() {
        return Verdict::refuted("2 r_max is not below the bound");
    }
    for (i, a) in balls.iter().enumerate() {
        for b in &balls[i + 1..] {
            if ex.cmp_dist(a.center(), b.center(), &slack) != Ordering::Less {
                return Verdict::refuted("center spread too large");
            }
        }
    }
    Verdict::yes(0)
}

/// `fmesh` of a view: the maximum formal diameter of its cells.
pub fn fmesh(space: &Space, view: &View<'_>) -> ComputableReal {
    let parts: Vec<ComputableReal> = view.flats.iter().map(|&f| fdiam(space, &view.chain.cell_balls(f))).collect();
    ComputableReal::new(move |k| parts.iter().map(|p| p.approx(k)).max().unwrap_or_default())
}

/// `fmesh < eps`, cellwise [`fdiam_below`]; the stage is the largest used.
pub fn fmesh_below(space: &Space, view: &View<'_>, eps: &Rational, fuel: u32) -> Verdict {
    let results: Vec<Verdict> =
        view.flats.par_iter().map(|&f| fdiam_below(space, &view.chain.cell_balls(f), eps, fuel)).collect();
    let mut stage = 0;
    for (f, v) in view.flats.iter().zip(results) {
        match v {
            Verdict::Yes(e) => stage = stage.max(e.stage),
            Verdict::NotYet(crate::space::Stall::Refuted(why)) => {
                return Verdict::refuted(format!("cell {:?}: {why}", view.chain.multi_index(*f)))
            }
            other => return other,
        }
    }
    Verdict::yes(stage)
}

/// Closed cells at sup-distance greater than 1 are disjoint, over all
/// indices of the view. Use [`Chain::all`] for n-chains and
/// [`Chain::boundary`] for spherical chains.
pub fn is_chain(space: &Space, view: &View<'_>, fuel: u32) -> Result<Verdict> {
    space.require_compact_balls()?;
    match space.exact() {
        Some(ex) => Ok(chain_exact(space, ex, view)),
        None => chain_generic(space, view, fuel),
    }
}

pub fn is_nchain(space: &Space, chain: &Chain, fuel: u32) -> Result<Verdict> {
    is_chain(space, &chain.all(), fuel)
}

pub fn is_spherical_chain(space: &Space, chain: &Chain, fuel: u32) -> Result<Verdict> {
    is_chain(space, &chain.boundary(), fuel)
}

fn chain_exact(space: &Space, ex: &dyn ExactMetric, view: &View<'_>) -> Verdict {
    let chain = view.chain;
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); chain.balls.len()];
    for &f in &view.flats {
        for &id in &chain.cells[f] {
            owners[id as usize].push(f);
        }
    }
    for (id, cells) in owners.iter().enumerate() {
        for (i, &a) in cells.iter().enumerate() {
            if let Some(&b) = cells[i + 1..].iter().find(|&&b| !chain.adjacent(a, b)) {
                return Verdict::refuted(format!(
                    "ball {id} is shared by non-adjacent cells {:?} and {:?}",
                    chain.multi_index(a),
                    chain.multi_index(b)
                ));
            }
        }
    }
    let index = BallIndex::new(&**space, &chain.balls);
    let used: Vec<usize> = (0..chain.balls.len()).filter(|&id| !owners[id].is_empty()).collect();
    let clash = used.par_iter().find_map_any(|&id| {
        let (lo, hi) = index.ball_box(id);
        let mut found = None;
        index.query(&lo, &hi, |other| {
            if other <= id || owners[other].is_empty() {
                return false;
            }
            let separated_cells = owners[id].iter().any(|&a| owners[other].iter().any(|&b| !chain.adjacent(a, b)));
            if !separated_cells {
                return false;
            }
            let (p, q) = (&chain.balls[id], &chain.balls[other]);
            let sum = p.radius() + q.radius();
            if ex.cmp_dist(p.center(), q.center(), &sum) != Ordering::Greater {
                found = Some((id, other));
                return true;
            }
            false
        });
        found
    });
    match clash {
        None => Verdict::yes(0),
        Some((x, y)) => {
            let a = owners[x].iter().find(|&&a| owners[y].iter().any(|&b| !chain.adjacent(a, b))).unwrap();
            let b = owners[y].iter().find(|&&b| !chain.adjacent(*a, b)).unwrap();
            Verdict::refuted(format!(
                "non-adjacent cells {:?} and {:?} meet (balls {x}, {y})",
                chain.multi_index(*a),
                chain.multi_index(*b)
            ))
        }
    }
}

fn chain_generic(space: &Space, view: &View<'_>, fuel: u32) -> Result<Verdict> {
    let chain = view.chain;
    let mut stage = 0;
    for (i, &a) in view.flats.iter().enumerate() {
        for &b in &view.flats[i + 1..] {
            if chain.adjacent(a, b) {
                continue;
            }
            match closed_unions_disjoint(space, &chain.cell_balls(a), &chain.cell_balls(b), fuel)? {
                Verdict::Yes(e) => stage = stage.max(e.stage),
                other => return Ok(other),
            }
        }
    }
    Ok(Verdict::yes(stage))
}

/// Where a properness witness point sits: the center of a table ball, or an
/// explicit point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Anchor {
    Center(u32),
    Point(Point),
}

/// Points `p` in cell `a` and `q` in cell `b` with `d(p, q) < eps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub a: usize,
    pub b: usize,
    pub p: Anchor,
    pub q: Anchor,
}

impl Anchor {
    pub fn resolve(&self, chain: &Chain) -> Option<Point> {
        match self {
            Anchor::Center(id) => chain.balls.get(*id as usize).map(|b| b.center().clone()),
            Anchor::Point(p) => Some(p.clone()),
        }
    }
}

/// `eps`-properness over the adjacent pairs of the view.
///
/// Per pair, stage 0 looks for a shared ball or two centers closer than
/// `eps`; stage `s >= 1` moves from each of the closest ball pairs towards
/// the other center and checks the resulting points exactly, with the
/// offsets shrunk by `2^-s`. Spaces without exact geometry only try centers,
/// with distances approximated at precision `s`.
pub fn is_proper(space: &Space, view: &View<'_>, eps: &Rational, fuel: u32) -> Verdict {
    let pairs = view.adjacent_pairs();
    let found: Vec<Option<(PairWitness, u32)>> =
        pairs.par_iter().map(|&(a, b)| pair_witness(space, view.chain, a, b, eps, fuel)).collect();
    let mut stage = 0;
    let mut witnesses = Vec::with_capacity(found.len());
    for (w, (a, b)) in found.into_iter().zip(&pairs) {
        match w {
            Some((w, s)) => {
                stage = stage.max(s);
                witnesses.push(w);
            }
            None => {
                log::debug!("no properness witness yet for cells {a} and {b}");
                return Verdict::exhausted();
            }
        }
    }
    Verdict::yes_with(stage, Witness::Proper(witnesses))
}

pub fn is_proper_boundary(space: &Space, chain: &Chain, eps: &Rational, fuel: u32) -> Verdict {
    is_proper(space, &chain.boundary(), eps, fuel)
}

fn pair_witness(
    space: &Space,
    chain: &Chain,
    a: usize,
    b: usize,
    eps: &Rational,
    fuel: u32,
) -> Option<(PairWitness, u32)> {
    let (ca, cb) = (&chain.cells[a], &chain.cells[b]);
    let mut i = 0;
    let mut j = 0;
    while i < ca.len() && j < cb.len() {
        match ca[i].cmp(&cb[j]) {
            Ordering::Equal => {
                let w = PairWitness { a, b, p: Anchor::Center(ca[i]), q: Anchor::Center(ca[i]) };
                return Some((w, 0));
            }
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
        }
    }
    let Some(ex) = space.exact() else {
        return pair_witness_generic(space, chain, a, b, eps, fuel);
    };
    let mut ball_pairs: Vec<(f64, u32, u32)> = ca
        .iter()
        .flat_map(|&x| cb.iter().map(move |&y| (x, y)))
        .map(|(x, y)| {
            let (p, q) = (&chain.balls[x as usize], &chain.balls[y as usize]);
            (ex.dist_f64(p.center(), q.center()) - p.radius_f64() - q.radius_f64(), x, y)
        })
        .collect();
    ball_pairs.sort_by(|u, v| u.0.total_cmp(&v.0));
    ball_pairs.truncate(16);
    let mut by_center: Vec<(f64, u32, u32)> = ball_pairs.clone();
    by_center.sort_by(|u, v| {
        let du = ex.dist_f64(chain.balls[u.1 as usize].center(), chain.balls[u.2 as usize].center());
        let dv = ex.dist_f64(chain.balls[v.1 as usize].center(), chain.balls[v.2 as usize].center());
        du.total_cmp(&dv)
    });
    for &(_, x, y) in &by_center {
        let (p, q) = (&chain.balls[x as usize], &chain.balls[y as usize]);
        if ex.cmp_dist(p.center(), q.center(), eps) == Ordering::Less {
            return Some((PairWitness { a, b, p: Anchor::Center(x), q: Anchor::Center(y) }, 0));
        }
    }
    for s in 1..=fuel {
        for &(_, x, y) in &ball_pairs {
            if let Some((p, q)) = approach(ex, &chain.balls[x as usize], &chain.balls[y as usize], eps, s) {
                return Some((PairWitness { a, b, p: Anchor::Point(p), q: Anchor::Point(q) }, s));
            }
        }
    }
    None
}

/// Points of `B(c1, r1)` and `B(c2, r2)` on the segment between the centers,
/// as close as stage `s` allows, verified exactly.
fn approach(ex: &dyn ExactMetric, b1: &Ball, b2: &Ball, eps: &Rational, s: u32) -> Option<(Point, Point)> {
    let (c1, c2) = (b1.center(), b2.center());
    let d = ex.dist_f64(c1, c2);
    if d.is_nan() || d <= 0.0 || !d.is_finite() {
        return None;
    }
    let shrink = 1.0 - 2f64.powi(-(s as i32));
    let bits = 24 + s.min(40);
    let t1 = b1.radius_f64() / d;
    let t2 = b2.radius_f64() / d;
    let inside = |p: &Point, q: &Point| {
        ex.cmp_dist(p, c1, b1.radius()) == Ordering::Less && ex.cmp_dist(q, c2, b2.radius()) == Ordering::Less
    };
    if t1 + t2 > 1.0 {
        // The open balls overlap along the segment: aim for one common point.
        let lo = (1.0 - t2).max(0.0);
        let hi = t1.min(1.0);
        let p = ex.interpolate(c1, c2, &dyadic(lo + (hi - lo) * 0.5, bits));
        if inside(&p, &p) {
            return Some((p.clone(), p));
        }
    }
    let p = ex.interpolate(c1, c2, &dyadic(t1.min(1.0) * shrink, bits));
    let q = ex.interpolate(c2, c1, &dyadic(t2.min(1.0) * shrink, bits));
    (inside(&p, &q) && ex.cmp_dist(&p, &q, eps) == Ordering::Less).then_some((p, q))
}

/// Stage that suffices for [`is_proper`] in `ℝⁿ` on a pair of cells holding
/// balls `B(c, r)`, `B(c', r')` with `max(0, d(c, c') - r - r') <= eps - margin`,
/// where `radius_sum = r + r'`.
pub fn proper_fuel_bound(radius_sum: f64, margin: f64) -> u32 {
    (radius_sum / margin).log2().ceil().max(0.0) as u32 + 2
}

fn pair_witness_generic(
    space: &Space,
    chain: &Chain,
    a: usize,
    b: usize,
    eps: &Rational,
    fuel: u32,
) -> Option<(PairWitness, u32)> {
    for s in 0..=fuel {
        let slack = pow2(-(s as i64));
        for &x in &chain.cells[a] {
            for &y in &chain.cells[b] {
                let d = space.dist_approx(chain.balls[x as usize].center(), chain.balls[y as usize].center(), s);
                if d + &slack <= *eps {
                    return Some((PairWitness { a, b, p: Anchor::Center(x), q: Anchor::Center(y) }, s));
                }
            }
        }
    }
    None
}

/// Re-check a recorded witness: `p` in open cell `a`, `q` in open cell `b`,
/// `d(p, q) < eps`, with `a` and `b` adjacent.
pub fn check_pair_witness(space: &Space, chain: &Chain, w: &PairWitness, eps: &Rational, fuel: u32) -> bool {
    if w.a >= chain.cells.len() || w.b >= chain.cells.len() || !chain.adjacent(w.a, w.b) {
        return false;
    }
    let (Some(p), Some(q)) = (w.p.resolve(chain), w.q.resolve(chain)) else {
        return false;
    };
    if space.check_point(&p).is_err() || space.check_point(&q).is_err() {
        return false;
    }
    let in_a = point_in_open_union(&**space, &p, &chain.cell_balls(w.a), fuel).is_yes();
    let in_b = point_in_open_union(&**space, &q, &chain.cell_balls(w.b), fuel).is_yes();
    if !(in_a && in_b) {
        return false;
    }
    if p == q {
        return true;
    }
    match space.exact() {
        Some(ex) => ex.cmp_dist(&p, &q, eps) == Ordering::Less,
        None => (0..=fuel).any(|s| space.dist_approx(&p, &q, s) + pow2(-(s as i64)) <= *eps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ball2(x: i64, y: i64, r: i64) -> Ball {
        Ball::new(Point::new(vec![int(x), int(y)]), int(r)).unwrap()
    }

    fn ball1(x: i64, r: (i64, i64)) -> Ball {
        Ball::new(Point::new(vec![int(x)]), rat(r.0, r.1)).unwrap()
    }

    fn grid_chain(spacing: i64, r: i64) -> Chain {
        let cells = (0..9).map(|f| vec![ball2(spacing * (f / 3) as i64, spacing * (f % 3) as i64, r)]).collect();
        Chain::from_cell_balls(2, 2, cells).unwrap()
    }

    #[test]
    fn fdiam_examples() {
        let s = Space::euclidean(2).unwrap();
        assert_eq!(fdiam(&s, &[ball2(0, 0, 1)]).approx(10), int(2));
        assert_eq!(fdiam(&s, &[ball2(0, 0, 1), ball2(0, 0, 2)]).approx(10), int(4));
        let two = fdiam(&s, &[ball2(0, 0, 1), ball2(3, 0, 1)]);
        assert_eq!(two.approx(10), int(5));
        assert!(fdiam_below(&s, &[ball2(0, 0, 1), ball2(3, 0, 1)], &rat(501, 100), 0).is_yes());
        assert!(fdiam_below(&s, &[ball2(0, 0, 1), ball2(3, 0, 1)], &int(5), 9).is_refuted());
    }

    #[test]
    fn fmesh_is_max_of_cells() {
        let s = Space::euclidean(2).unwrap();
        let c = Chain::from_cell_balls(1, 1, vec![vec![ball2(0, 0, 1)], vec![ball2(0, 0, 1), ball2(3, 0, 1)]]).unwrap();
        assert_eq!(fmesh(&s, &c.all()).approx(12), int(5));
        let same = Chain::from_cell_balls(1, 1, vec![vec![ball2(0, 0, 1)], vec![ball2(5, 0, 1)]]).unwrap();
        assert_eq!(fmesh(&s, &same.all()).approx(12), int(2));
    }

    #[test]
    fn chain_examples() {
        let line = Space::euclidean(1).unwrap();
        let c = Chain::from_cell_balls(1, 2, (0..3).map(|i| vec![ball1(3 * i, (1, 1))]).collect()).unwrap();
        assert!(is_nchain(&line, &c, 0).unwrap().is_yes());
        let same = Chain::from_cell_balls(1, 2, vec![vec![ball1(0, (1, 1))]; 3]).unwrap();
        assert!(is_nchain(&line, &same, 10).unwrap().is_refuted());
        let s = Space::euclidean(2).unwrap();
        assert!(is_nchain(&s, &grid_chain(4, 1), 0).unwrap().is_yes());
        // Diagonal neighbours at distance 2 * sqrt(2) < 3 + 3 are adjacent;
        // cells two apart at distance 4 < 6 are not.
        assert!(is_nchain(&s, &grid_chain(2, 3), 0).unwrap().is_refuted());
    }

    #[test]
    fn proper_examples() {
        let s = Space::euclidean(1).unwrap();
        let same = Chain::from_cell_balls(1, 2, vec![vec![ball1(0, (1, 1))]; 3]).unwrap();
        assert!(is_proper(&s, &same.all(), &rat(1, 1000), 0).is_yes());
        let far = Chain::from_cell_balls(1, 1, vec![vec![ball1(0, (1, 1))], vec![ball1(12, (1, 1))]]).unwrap();
        for fuel in [0, 4, 12] {
            assert!(!is_proper(&s, &far.all(), &rat(1, 2), fuel).is_yes());
        }
        let touching = Chain::from_cell_balls(1, 1, vec![vec![ball1(0, (1, 1))], vec![ball1(3, (2, 1))]]).unwrap();
        let eps = rat(1, 2);
        let v = is_proper(&s, &touching.all(), &eps, 3);
        let Verdict::Yes(e) = v else { panic!("{v:?}") };
        let Some(Witness::Proper(ws)) = e.witness else { panic!() };
        assert_eq!(ws.len(), 1);
        assert!(check_pair_witness(&s, &touching, &ws[0], &eps, 8));
    }

    #[test]
    fn views_and_zeta() {
        let one = Chain::from_cell_balls(2, 1, (0..4).map(|i| vec![ball2(i, 0, 1)]).collect()).unwrap();
        assert_eq!(one.boundary().len(), 4);
        let c = grid_chain(4, 1);
        let face = c.face(Face { axis: 0, side: 0 }).unwrap();
        assert_eq!(face.flats(), &[0, 1, 2]);
        assert!(c.face(Face { axis: 2, side: 0 }).is_err());
        assert_eq!(zeta_boundary(&c).len(), 8);
        assert!(!zeta_boundary(&c).contains(&c.cell(4)[0]));
        assert_eq!(zeta(&c).len(), 9);
        assert_eq!(boundary_flats(3, 2).len(), 26);
        assert_eq!(boundary_count(2, 7), 28);
    }

    #[test]
    fn json_and_code_round_trip() {
        let s = Space::euclidean(1).unwrap();
        let c = Chain::from_cell_balls(1, 1, vec![vec![ball1(0, (1, 2))], vec![ball1(1, (1, 2))]]).unwrap();
        let j = serde_json::to_value(c.to_json()).unwrap();
        let back = Chain::from_json(&serde_json::from_value(j).unwrap()).unwrap();
        assert_eq!(back.cells(), c.cells());
        let code = c.code(&*s).unwrap();
        let decoded = Chain::from_code(&*s, 1, &code).unwrap();
        assert_eq!(decoded.cell_balls(0), c.cell_balls(0));
        assert_eq!(decoded.cell_balls(1), c.cell_balls(1));
    }
}
