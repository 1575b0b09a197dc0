//! The search realizing `g(k)`.
//!
//! Fuel rounds run at `1, 2, 4, …` up to the ceiling. In each round the
//! seeded candidates are checked in order (grid side ascending, then `δ`
//! descending), then codes `l` below a horizon that doubles every round.
//! Steps that already passed are not repeated and refuted candidates are
//! dropped. Candidates are checked `jobs` at a time and the lowest-ordered
//! one that passes wins, so the result does not depend on `jobs`.

use std::collections::HashSet;

use num_bigint::BigUint;
use rayon::prelude::*;

use super::check::{check, CheckReport, Target};
use super::seed::{estimate_m, hulls};
use super::witness::{CellWitness, FaceSets, SphereWitness, WitnessKind};
use crate::chains::{zeta, zeta_boundary, Chain};
use crate::effsets::{Approximator, CoCeSet};
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, pow2, rat, to_f64, Rational};
use crate::space::{Ball, Space};

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub fuel_ceiling: u32,
    /// Candidates checked concurrently; 0 uses every available thread.
    pub jobs: usize,
    /// Ball radius caps as fractions of `ε`.
    pub delta_fractions: Vec<Rational>,
    /// Grid sides to try; empty estimates them from the sampler.
    pub m_schedule: Vec<usize>,
    /// Also try chains by code.
    pub enumerate: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            fuel_ceiling: 64,
            jobs: 0,
            delta_fractions: vec![rat(1, 2), rat(3, 8), rat(1, 4), rat(3, 16), rat(1, 8)],
            m_schedule: Vec::new(),
            enumerate: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fuel_ceiling == 0 {
            return Err(Error::Candidate("fuel ceiling must be at least 1".into()));
        }
        if self.delta_fractions.is_empty() || self.delta_fractions.iter().any(|d| *d <= Rational::default()) {
            return Err(Error::Candidate("δ schedule must be nonempty and positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Seeded { m: usize, delta: Rational },
    Enumerated { l: BigUint },
}

impl Provenance {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Provenance::Seeded { m, delta } => {
                serde_json::json!({"source": "seeded", "m": m, "delta": format_rational(delta)})
            }
            Provenance::Enumerated { l } => serde_json::json!({"source": "enumerated", "code": l.to_string()}),
        }
    }
}

/// A verified candidate.
#[derive(Clone, Debug)]
pub struct Certified {
    pub kind: WitnessKind,
    pub k: u32,
    pub chain: Chain,
    pub report: CheckReport,
    pub provenance: Provenance,
    /// Fuel of the round in which the last condition passed.
    pub fuel: u32,
}

impl Certified {
    /// `3` for spheres, `7` for cells.
    pub fn constant(&self) -> u32 {
        constant(self.kind)
    }

    pub fn bound(&self) -> Rational {
        bound(self.kind, self.k)
    }

    /// `ζ'(l)` for spheres, `ζ(l)` for cells.
    pub fn balls(&self) -> Vec<Ball> {
        output_balls(self.kind, &self.chain)
    }
}

pub fn constant(kind: WitnessKind) -> u32 {
    match kind {
        WitnessKind::Sphere => 3,
        WitnessKind::Cell => 7,
    }
}

pub fn bound(kind: WitnessKind, k: u32) -> Rational {
    int(constant(kind) as i64) * pow2(-(k as i64))
}

pub fn output_balls(kind: WitnessKind, chain: &Chain) -> Vec<Ball> {
    let ids = match kind {
        WitnessKind::Sphere => zeta_boundary(chain),
        WitnessKind::Cell => zeta(chain),
    };
    ids.into_iter().map(|i| chain.balls()[i as usize].clone()).collect()
}

/// The best candidate seen when the fuel ceiling is reached.
#[derive(Clone, Debug)]
pub struct PartialReport {
    pub k: u32,
    pub rounds: Vec<u32>,
    pub tried: usize,
    pub best: Option<(Provenance, CheckReport)>,
}

impl PartialReport {
    pub fn to_json(&self) -> serde_json::Value {
        let best = self.best.as_ref().map(|(p, r)| {
            let conditions: serde_json::Map<String, serde_json::Value> = r
                .conditions()
                .into_iter()
                .map(|(c, s)| (c.name().to_string(), serde_json::to_value(s).unwrap_or_default()))
                .collect();
            serde_json::json!({
                "provenance": p.to_json(),
                "conditions": conditions,
                "blame": r.blame().map(|(c, _)| c.name()),
            })
        });
        serde_json::json!({
            "kind": "timeout",
            "k": self.k,
            "rounds": self.rounds,
            "tried": self.tried,
            "best": best,
        })
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Certified(Box<Certified>),
    Timeout(PartialReport),
}

impl SearchOutcome {
    pub fn certified(self) -> Option<Certified> {
        match self {
            SearchOutcome::Certified(c) => Some(*c),
            SearchOutcome::Timeout(_) => None,
        }
    }
}

struct Candidate {
    provenance: Provenance,
    chain: Option<Chain>,
    report: Option<CheckReport>,
    dead: bool,
}

fn progress(r: &CheckReport) -> usize {
    r.conditions().iter().filter(|(_, s)| s.is_yes()).count()
}

fn run(target: &Target<'_>, config: &SearchConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let sets = target.sets;
    let n = sets.faces.len();
    let sphere = target.kind == WitnessKind::Sphere;
    let eps = target.epsilon();
    let mut candidates = seeded_candidates(sets, n, sphere, &eps, config);
    let mut rounds = Vec::new();
    let mut horizon = 1u64;
    let mut seen_codes: HashSet<u64> = HashSet::new();
    let mut fuel = 1u32;
    loop {
        let f = fuel.min(config.fuel_ceiling);
        rounds.push(f);
        log::info!("k = {}: fuel round {f}, {} candidates", target.k, candidates.iter().filter(|c| !c.dead).count());
        if config.enumerate {
            for l in 0..horizon {
                if seen_codes.insert(l) {
                    candidates.push(Candidate {
                        provenance: Provenance::Enumerated { l: BigUint::from(l) },
                        chain: None,
                        report: None,
                        dead: false,
                    });
                }
            }
        }
        let jobs = if config.jobs == 0 { rayon::current_num_threads() } else { config.jobs }.max(1);
        let live: Vec<usize> = (0..candidates.len()).filter(|&i| !candidates[i].dead).collect();
        for window in live.chunks(jobs) {
            let mut slots: Vec<(usize, Candidate)> = window
                .iter()
                .map(|&i| {
                    let placeholder = Candidate {
                        provenance: candidates[i].provenance.clone(),
                        chain: None,
                        report: None,
                        dead: true,
                    };
                    (i, std::mem::replace(&mut candidates[i], placeholder))
                })
                .collect();
            slots.par_iter_mut().for_each(|(_, c)| advance(target, c, sets, n, sphere, f));
            let winner = slots.iter().position(|(_, c)| c.report.as_ref().is_some_and(CheckReport::passed));
            for (i, c) in slots.iter_mut() {
                candidates[*i] = std::mem::replace(
                    c,
                    Candidate { provenance: c.provenance.clone(), chain: None, report: None, dead: true },
                );
            }
            if let Some(w) = winner {
                let c = &mut candidates[window[w]];
                log::info!("k = {}: certified {:?} at fuel {f}", target.k, c.provenance);
                return Ok(SearchOutcome::Certified(Box::new(Certified {
                    kind: target.kind,
                    k: target.k,
                    chain: c.chain.take().expect("checked candidates have chains"),
                    report: c.report.take().expect("checked"),
                    provenance: c.provenance.clone(),
                    fuel: f,
                })));
            }
        }
        if f >= config.fuel_ceiling {
            break;
        }
        fuel = fuel.saturating_mul(2);
        horizon = horizon.saturating_mul(2).min(1 << 20);
    }
    let best = candidates
        .iter()
        .filter_map(|c| c.report.as_ref().map(|r| (c, r)))
        .max_by_key(|(c, r)| {
            (progress(r), !c.dead, std::cmp::Reverse(matches!(c.provenance, Provenance::Enumerated { .. })))
        })
        .map(|(c, r)| (c.provenance.clone(), r.clone()));
    Ok(SearchOutcome::Timeout(PartialReport { k: target.k, rounds, tried: candidates.len(), best }))
}

fn seeded_candidates(sets: &FaceSets, n: usize, sphere: bool, eps: &Rational, config: &SearchConfig) -> Vec<Candidate> {
    let ms = if config.m_schedule.is_empty() {
        let f = match sets.sampler.build() {
            Ok(f) => f,
            Err(e) => {
                log::warn!("sampler unavailable, falling back to enumeration: {e}");
                return Vec::new();
            }
        };
        match estimate_m(&*f, n, sphere, to_f64(eps)) {
            Ok(m) => {
                let m1 = (m as f64 * 1.1).ceil() as usize;
                let m2 = (m1 as f64 * 1.1).ceil() as usize;
                vec![m, m1, m2]
            }
            Err(e) => {
                log::warn!("no grid side estimate, falling back to enumeration: {e}");
                return Vec::new();
            }
        }
    } else {
        config.m_schedule.clone()
    };
    let mut out = Vec::new();
    for &m in &ms {
        for frac in &config.delta_fractions {
            out.push(Candidate {
                provenance: Provenance::Seeded { m, delta: frac * eps },
                chain: None,
                report: None,
                dead: false,
            });
        }
    }
    out
}

fn advance(target: &Target<'_>, c: &mut Candidate, sets: &FaceSets, n: usize, sphere: bool, fuel: u32) {
    if c.chain.is_none() {
        let built = match &c.provenance {
            Provenance::Seeded { m, delta } => {
                sets.sampler.build().and_then(|f| hulls(&*f, n, *m, to_f64(delta), sphere)).and_then(|h| h.into_chain())
            }
            Provenance::Enumerated { l } => Chain::from_code(&**target.space, n, l),
        };
        match built {
            Ok(ch) => c.chain = Some(ch),
            Err(e) => {
                log::debug!("candidate {:?} not built: {e}", c.provenance);
                c.dead = true;
                return;
            }
        }
    }
    let chain = c.chain.as_ref().expect("built");
    match check(target, chain, fuel, c.report.as_ref()) {
        Ok(r) => {
            c.dead = r.refuted();
            if c.dead {
                log::debug!("candidate {:?} refuted: {:?}", c.provenance, r.blame());
                c.chain = None;
            }
            c.report = Some(r);
        }
        Err(e) => {
            log::debug!("candidate {:?} rejected: {e}", c.provenance);
            c.dead = true;
            c.chain = None;
        }
    }
}

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Candidate(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// `ζ'(g(k))` for a sphere `S`, within `3 · 2^-k` of `S`.
pub fn approximate_sphere(
    space: &Space,
    set: &dyn CoCeSet,
    witness: &SphereWitness,
    k: u32,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    witness.validate(space)?;
    let target = Target { space, kind: WitnessKind::Sphere, set, boundary: None, sets: &witness.sets, k };
    in_pool(config.jobs, || run(&target, config))?
}

/// `ζ(g(k))` for a cell `E` with boundary sphere `boundary`, within
/// `7 · 2^-k` of `E`.
pub fn approximate_cell(
    space: &Space,
    set: &dyn CoCeSet,
    boundary: &dyn CoCeSet,
    witness: &CellWitness,
    k: u32,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    witness.validate(space)?;
    let target = Target { space, kind: WitnessKind::Cell, set, boundary: Some(boundary), sets: &witness.sets, k };
    in_pool(config.jobs, || run(&target, config))?
}

/// The search as an [`Approximator`]; a timeout is an error.
pub struct CertifiedApproximator {
    space: Space,
    set: std::sync::Arc<dyn CoCeSet>,
    boundary: Option<std::sync::Arc<dyn CoCeSet>>,
    witness: super::witness::Witness,
    config: SearchConfig,
}

impl CertifiedApproximator {
    pub fn new(
        space: &Space,
        set: std::sync::Arc<dyn CoCeSet>,
        witness: super::witness::Witness,
        config: SearchConfig,
    ) -> Result<Self> {
        let boundary = match &witness {
            super::witness::Witness::Cell(w) => Some(w.boundary.build(space)?),
            super::witness::Witness::Sphere(_) => None,
        };
        witness.validate(space)?;
        Ok(CertifiedApproximator { space: space.clone(), set, boundary, witness, config })
    }

    pub fn certify(&self, k: u32) -> Result<SearchOutcome> {
        match &self.witness {
            super::witness::Witness::Sphere(w) => approximate_sphere(&self.space, &*self.set, w, k, &self.config),
            super::witness::Witness::Cell(w) => approximate_cell(
                &self.space,
                &*self.set,
                &**self.boundary.as_ref().expect("cells carry a boundary"),
                w,
                k,
                &self.config,
            ),
        }
    }
}

impl Approximator for CertifiedApproximator {
    fn constant(&self) -> u32 {
        constant(self.witness.kind())
    }

    fn approximate(&self, k: u32) -> Result<Vec<Ball>> {
        match self.certify(k)? {
            SearchOutcome::Certified(c) => Ok(c.balls()),
            SearchOutcome::Timeout(_) => {
                Err(Error::Candidate(format!("no certified chain at k = {k} within the fuel ceiling")))
            }
        }
    }
}
