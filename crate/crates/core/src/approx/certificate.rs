//! Replayable certificates.
//!
//! ```json
//! {"kind": "sphere-approximation", "k": 3, "bound": "3/8",
//!  "space": {...}, "set": {...}, "balls": [...],
//!  "certificate": {"l": {...}, "k0": 1, "epsilon": "1/16", "witness": {...},
//!                  "conditions": {"tm1": {"status": "yes", "stage": 0}, ...},
//!                  "witnesses": {"tm4": [...]}, "fuel": 16, "provenance": {...}},
//!  "digest": "<sha256 hex>"}
//! ```
//!
//! The digest is the SHA-256 of the compact JSON rendering (keys sorted)
//! with `digest` set to the empty string.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::check::{check, Condition, Status, Target};
use super::search::{bound, output_balls, Certified};
use super::witness::{Witness, WitnessKind};
use crate::chains::{check_pair_witness, Chain, ChainJson, PairWitness};
use crate::effsets::SetSpec;
use crate::error::Result;
use crate::rational::{format_rational, pow2, serde_rational, Rational};
use crate::space::{Ball, Space, SpaceSpec};

pub const SPHERE_KIND: &str = "sphere-approximation";
pub const CELL_KIND: &str = "cell-approximation";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    pub k: u32,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    pub space: SpaceSpec,
    pub set: SetSpec,
    pub balls: Vec<Ball>,
    pub certificate: Body,
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub l: ChainJson,
    pub k0: u32,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    pub witness: Witness,
    pub conditions: BTreeMap<String, Status>,
    /// Properness witnesses keyed by condition name.
    pub witnesses: BTreeMap<String, Vec<PairWitness>>,
    pub fuel: u32,
    pub provenance: serde_json::Value,
}

fn kind_name(kind: WitnessKind) -> &'static str {
    match kind {
        WitnessKind::Sphere => SPHERE_KIND,
        WitnessKind::Cell => CELL_KIND,
    }
}

fn proper_condition(kind: WitnessKind) -> Condition {
    match kind {
        WitnessKind::Sphere => Condition::Tm4,
        WitnessKind::Cell => Condition::Cell3,
    }
}

impl Certificate {
    pub fn new(space: &SpaceSpec, set: &SetSpec, witness: &Witness, found: &Certified) -> Result<Certificate> {
        let mut witnesses = BTreeMap::new();
        if let Some(p) = &found.report.proper {
            witnesses.insert(proper_condition(found.kind).name().to_string(), p.clone());
        }
        let mut cert = Certificate {
            kind: kind_name(found.kind).to_string(),
            k: found.k,
            bound: found.bound(),
            space: space.clone(),
            set: set.clone(),
            balls: found.balls(),
            certificate: Body {
                l: found.chain.to_json(),
                k0: witness.k0(),
                epsilon: pow2(-((found.k + witness.k0()) as i64)),
                witness: witness.clone(),
                conditions: found.report.conditions().into_iter().map(|(c, s)| (c.name().to_string(), s)).collect(),
                witnesses,
                fuel: found.fuel,
                provenance: found.provenance.to_json(),
            },
            digest: String::new(),
        };
        cert.digest = cert.compute_digest()?;
        Ok(cert)
    }

    pub fn compute_digest(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        v["digest"] = serde_json::Value::String(String::new());
        Ok(hex::encode(Sha256::digest(serde_json::to_string(&v)?.as_bytes())))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("cannot parse certificate: {0}")]
    Parse(String),
    #[error("{check} failed: {detail}")]
    Failed { check: String, detail: String },
}

impl VerifyError {
    fn failed(check: impl Into<String>, detail: impl Into<String>) -> VerifyError {
        VerifyError::Failed { check: check.into(), detail: detail.into() }
    }

    /// The failing check's name, e.g. `tm2`, `balls` or `digest`.
    pub fn check(&self) -> Option<&str> {
        match self {
            VerifyError::Parse(_) => None,
            VerifyError::Failed { check, .. } => Some(check),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Replay fuel; the recorded fuel when unset.
    pub fuel: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct VerifySummary {
    pub kind: WitnessKind,
    pub k: u32,
    pub bound: Rational,
    pub conditions: Vec<(Condition, Status)>,
    pub balls: usize,
}

pub fn parse_certificate(text: &str) -> std::result::Result<Certificate, VerifyError> {
    if text.trim().is_empty() {
        return Err(VerifyError::Parse("empty input".into()));
    }
    serde_json::from_str(text).map_err(|e| VerifyError::Parse(e.to_string()))
}

/// Parse and replay a certificate.
pub fn verify_certificate(text: &str, opts: &VerifyOptions) -> std::result::Result<VerifySummary, VerifyError> {
    verify(&parse_certificate(text)?, opts)
}

/// Checks, in order: kind, bound, `ε`/`k0`, the face sets, the chain, the
/// output balls, the replayed conditions, the properness witnesses and the
/// digest. The first failure is returned.
pub fn verify(cert: &Certificate, opts: &VerifyOptions) -> std::result::Result<VerifySummary, VerifyError> {
    let body = &cert.certificate;
    let kind = body.witness.kind();
    if cert.kind != kind_name(kind) {
        return Err(VerifyError::failed("kind", format!("{:?} with a {kind:?} witness", cert.kind)));
    }
    let want = bound(kind, cert.k);
    if cert.bound != want {
        return Err(VerifyError::failed(
            "bound",
            format!("recorded {}, expected {}", format_rational(&cert.bound), format_rational(&want)),
        ));
    }
    if body.k0 != body.witness.k0() || body.epsilon != pow2(-((cert.k + body.k0) as i64)) {
        return Err(VerifyError::failed(
            "epsilon",
            format!("ε = {} with k = {}, k0 = {}", format_rational(&body.epsilon), cert.k, body.k0),
        ));
    }
    let space = Space::from_spec(&cert.space).map_err(|e| VerifyError::failed("space", e.to_string()))?;
    let builtin = Witness::builtin(&cert.set).ok();
    if builtin.as_ref() != Some(&body.witness) {
        body.witness.validate(&space).map_err(|e| VerifyError::failed("witness", e.to_string()))?;
        body.witness.spot_check(64).map_err(|e| VerifyError::failed("witness", e.to_string()))?;
    }
    let chain = Chain::from_json(&body.l).map_err(|e| VerifyError::failed("l", e.to_string()))?;
    if output_balls(kind, &chain) != cert.balls {
        return Err(VerifyError::failed("balls", "output balls differ from the merged chain"));
    }
    let set = cert.set.build(&space).map_err(|e| VerifyError::failed("set", e.to_string()))?;
    let boundary = match &body.witness {
        Witness::Cell(w) => Some(w.boundary.build(&space).map_err(|e| VerifyError::failed("set", e.to_string()))?),
        Witness::Sphere(_) => None,
    };
    let target = Target {
        space: &space,
        kind,
        set: &*set,
        boundary: boundary.as_deref(),
        sets: &body.witness.sets().clone(),
        k: cert.k,
    };
    let fuel = opts.fuel.unwrap_or(body.fuel);
    let report = check(&target, &chain, fuel, None).map_err(|e| VerifyError::failed("l", e.to_string()))?;
    let conditions = report.conditions();
    for (c, s) in &conditions {
        if !s.is_yes() {
            return Err(VerifyError::failed(c.name(), format!("replay at fuel {fuel}: {s:?}")));
        }
        let recorded = body.conditions.get(c.name());
        if opts.fuel.is_none() && recorded != Some(s) {
            return Err(VerifyError::failed(c.name(), format!("recorded {recorded:?}, replayed {s:?}")));
        }
        if !recorded.is_some_and(Status::is_yes) {
            return Err(VerifyError::failed(c.name(), "not recorded as passed"));
        }
    }
    if body.conditions.len() != conditions.len() {
        return Err(VerifyError::failed("conditions", "unexpected condition entries"));
    }
    let pc = proper_condition(kind).name();
    let recorded = body.witnesses.get(pc).ok_or_else(|| VerifyError::failed(pc, "no properness witnesses"))?;
    if body.witnesses.len() != 1 {
        return Err(VerifyError::failed("witnesses", "unexpected witness entries"));
    }
    let eps = target.epsilon();
    let view = match kind {
        WitnessKind::Sphere => chain.boundary(),
        WitnessKind::Cell => chain.all(),
    };
    let mut pairs: Vec<(usize, usize)> = recorded.iter().map(|w| (w.a, w.b)).collect();
    pairs.sort_unstable();
    if pairs != view.adjacent_pairs() {
        return Err(VerifyError::failed(pc, "witnesses do not cover the adjacent pairs"));
    }
    if let Some(w) = recorded.iter().find(|w| !check_pair_witness(&space, &chain, w, &eps, fuel.max(1))) {
        return Err(VerifyError::failed(pc, format!("witness for cells {} and {} does not hold", w.a, w.b)));
    }
    let digest = cert.compute_digest().map_err(|e| VerifyError::failed("digest", e.to_string()))?;
    if digest != cert.digest {
        return Err(VerifyError::failed("digest", format!("recorded {}, computed {digest}", cert.digest)));
    }
    Ok(VerifySummary { kind, k: cert.k, bound: cert.bound.clone(), conditions, balls: cert.balls.len() })
}
