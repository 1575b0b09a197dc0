//! The per-candidate checklists.
//!
//! Spheres, with `ε = 2^-(k + k0)`:
//! * `tm1`: `∂Ĥ_l` is a spherical chain;
//! * `tm2`: `∂H_l` covers `S`;
//! * `tm3`: `fmesh(l) < ε`;
//! * `tm4`: `∂H_l` is `ε`-proper;
//! * `tm5`: `∪∂_i^ρ Ĥ_l ⊆ W_i^ρ` for every face.
//!
//! Cells:
//! * `2tm1`: `Ĥ_l` is an n-chain, `H_l` covers `E` and `∂H_l` covers `S`;
//! * `2tm3`: `fmesh(l) < ε` and `H_l` is `ε`-proper;
//! * `2tm5`: as `tm5`.
//!
//! Steps run cheapest first and stop at the first one that is not `Yes`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::witness::{FaceSets, WitnessKind};
use crate::chains::{fmesh_below, is_chain, is_proper, Chain, Face, PairWitness};
use crate::effsets::{covers, CoCeSet};
use crate::error::{Error, Result};
use crate::rational::{pow2, Rational};
use crate::space::{closed_union_in_union, Space, Stall, Verdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    Tm1,
    Tm2,
    Tm3,
    Tm4,
    Tm5,
    Cell1,
    Cell3,
    Cell5,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Tm1 => "tm1",
            Condition::Tm2 => "tm2",
            Condition::Tm3 => "tm3",
            Condition::Tm4 => "tm4",
            Condition::Tm5 => "tm5",
            Condition::Cell1 => "2tm1",
            Condition::Cell3 => "2tm3",
            Condition::Cell5 => "2tm5",
        }
    }

    pub fn from_name(s: &str) -> Option<Condition> {
        Condition::all().into_iter().find(|c| c.name() == s)
    }

    pub fn all() -> [Condition; 8] {
        use Condition::*;
        [Tm1, Tm2, Tm3, Tm4, Tm5, Cell1, Cell3, Cell5]
    }

    pub fn for_kind(kind: WitnessKind) -> &'static [Condition] {
        use Condition::*;
        match kind {
            WitnessKind::Sphere => &[Tm1, Tm2, Tm3, Tm4, Tm5],
            WitnessKind::Cell => &[Cell1, Cell3, Cell5],
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Yes { stage: u32 },
    Exhausted,
    Refuted { reason: String },
    Skipped,
}

impl Status {
    fn from_verdict(v: &Verdict) -> Status {
        match v {
            Verdict::Yes(e) => Status::Yes { stage: e.stage },
            Verdict::NotYet(Stall::Exhausted) => Status::Exhausted,
            Verdict::NotYet(Stall::Refuted(why)) => Status::Refuted { reason: why.clone() },
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Status::Yes { .. })
    }
}

/// One semi-decision of a checklist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Mesh,
    Faces,
    ChainHood,
    Proper,
    CoversSet,
    BoundaryCoversBoundary,
}

impl Step {
    fn order(kind: WitnessKind) -> &'static [(Step, Condition)] {
        use Condition::*;
        use Step::*;
        match kind {
            WitnessKind::Sphere => {
                &[(Mesh, Tm3), (Faces, Tm5), (ChainHood, Tm1), (Proper, Tm4), (BoundaryCoversBoundary, Tm2)]
            }
            WitnessKind::Cell => &[
                (Mesh, Cell3),
                (Faces, Cell5),
                (ChainHood, Cell1),
                (Proper, Cell3),
                (CoversSet, Cell1),
                (BoundaryCoversBoundary, Cell1),
            ],
        }
    }
}

/// What a candidate is checked against. For spheres `set` is `S` and
/// `boundary` is unused; for cells `set` is `E` and `boundary` is `S`.
pub struct Target<'a> {
    pub space: &'a Space,
    pub kind: WitnessKind,
    pub set: &'a dyn CoCeSet,
    pub boundary: Option<&'a dyn CoCeSet>,
    pub sets: &'a FaceSets,
    pub k: u32,
}

impl Target<'_> {
    pub fn epsilon(&self) -> Rational {
        pow2(-((self.k + self.sets.k0) as i64))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub kind: WitnessKind,
    steps: Vec<Status>,
    /// Properness witnesses, once that step has passed.
    pub proper: Option<Vec<PairWitness>>,
}

impl CheckReport {
    /// Status per condition: `Yes` only when all of its steps passed, with
    /// the largest stage.
    pub fn conditions(&self) -> Vec<(Condition, Status)> {
        let order = Step::order(self.kind);
        Condition::for_kind(self.kind)
            .iter()
            .map(|&c| {
                let mine = order.iter().zip(&self.steps).filter(|((_, owner), _)| *owner == c).map(|(_, s)| s);
                let mut stage = 0;
                for s in mine {
                    match s {
                        Status::Yes { stage: t } => stage = stage.max(*t),
                        other => return (c, other.clone()),
                    }
                }
                (c, Status::Yes { stage })
            })
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.steps.iter().all(Status::is_yes)
    }

    pub fn refuted(&self) -> bool {
        self.steps.iter().any(|s| matches!(s, Status::Refuted { .. }))
    }

    /// The first condition in check order that is not confirmed.
    pub fn blame(&self) -> Option<(Condition, Status)> {
        let order = Step::order(self.kind);
        order.iter().zip(&self.steps).find(|(_, s)| !s.is_yes()).map(|((_, c), s)| (*c, s.clone()))
    }
}

/// Run the checklist at `fuel`, reusing steps that already passed in
/// `prior`.
pub fn check(target: &Target<'_>, chain: &Chain, fuel: u32, prior: Option<&CheckReport>) -> Result<CheckReport> {
    let space = target.space;
    space.require_ecp()?;
    space.require_compact_balls()?;
    let n = target.sets.faces.len();
    if chain.n() != n {
        return Err(Error::Candidate(format!("chain has n = {}, witness has {n}", chain.n())));
    }
    if target.kind == WitnessKind::Sphere && chain.m() == 0 {
        return Err(Error::Candidate("spherical chains need m >= 1".into()));
    }
    let order = Step::order(target.kind);
    let eps = target.epsilon();
    let mut report = CheckReport {
        kind: target.kind,
        steps: vec![Status::Skipped; order.len()],
        proper: prior.and_then(|p| p.proper.clone()),
    };
    for (i, (step, _)) in order.iter().enumerate() {
        if let Some(s) = prior.map(|p| &p.steps[i]).filter(|s| s.is_yes()) {
            report.steps[i] = s.clone();
            continue;
        }
        let view = match target.kind {
            WitnessKind::Sphere => chain.boundary(),
            WitnessKind::Cell => chain.all(),
        };
        let verdict = match step {
            // The mesh ranges over every entry of l, interior fillers included.
            Step::Mesh => fmesh_below(space, &chain.all(), &eps, fuel),
            Step::Faces => faces_inside(space, chain, target.sets, fuel)?,
            Step::ChainHood => is_chain(space, &view, fuel)?,
            Step::Proper => {
                let v = is_proper(space, &view, &eps, fuel);
                if let Verdict::Yes(e) = &v {
                    if let Some(Witness::Proper(w)) = &e.witness {
                        report.proper = Some(w.clone());
                    }
                }
                v
            }
            Step::CoversSet => covers(space, target.set, &chain.all().member_balls(), fuel)?,
            Step::BoundaryCoversBoundary => {
                let s = match target.kind {
                    WitnessKind::Sphere => target.set,
                    WitnessKind::Cell => {
                        target.boundary.ok_or_else(|| Error::Witness("cell target without boundary set".into()))?
                    }
                };
                covers(space, s, &chain.boundary().member_balls(), fuel)?
            }
        };
        report.steps[i] = Status::from_verdict(&verdict);
        if !verdict.is_yes() {
            break;
        }
    }
    Ok(report)
}

fn faces_inside(space: &Space, chain: &Chain, sets: &FaceSets, fuel: u32) -> Result<Verdict> {
    let mut stage = 0;
    for face in Face::all(chain.n()) {
        let balls = chain.face(face)?.member_balls();
        let w = &sets.faces[face.axis][face.side as usize];
        match closed_union_in_union(space, &balls, w, fuel)? {
            Verdict::Yes(e) => stage = stage.max(e.stage),
            Verdict::NotYet(Stall::Refuted(why)) => {
                return Ok(Verdict::refuted(format!("face {}^{}: {why}", face.axis + 1, face.side)))
            }
            other => return Ok(other),
        }
    }
    Ok(Verdict::yes(stage))
}
