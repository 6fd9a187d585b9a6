//! Declarative scenarios: a flow, an invariant and its parameters, read from
//! a flat `key = value` config.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::braidqm::BraidQm;
use crate::circle::RotConfig;
use crate::error::{Error, Result};
use crate::flow::IsotopySpec;
use crate::gg::GgConfig;
use crate::qmcore::{homogenize, QMFunctional, QMValue};
use crate::quadrature::DiskQuadrature;
use crate::scalar::Real;

/// Invariants a scenario can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvariantKind {
    Ruelle,
    Rot,
    Calabi,
    Gg,
}

impl InvariantKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "ruelle" => Ok(InvariantKind::Ruelle),
            "rot" => Ok(InvariantKind::Rot),
            "calabi" => Ok(InvariantKind::Calabi),
            "gg" => Ok(InvariantKind::Gg),
            other => Err(Error::InvalidArgument(format!("unknown invariant {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InvariantKind::Ruelle => "ruelle",
            InvariantKind::Rot => "rot",
            InvariantKind::Calabi => "calabi",
            InvariantKind::Gg => "gg",
        }
    }
}

/// A fully specified computation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub flow: IsotopySpec<T>,
    pub invariant: InvariantKind,
    pub quad: DiskQuadrature,
    pub rot: RotConfig,
    pub gg: GgConfig,
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_flat(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected key = value", no + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_key<V: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str, default: V) -> Result<V> {
    match map.get(key) {
        Some(v) => v.trim().parse().map_err(|_| Error::InvalidArgument(format!("{key}: cannot parse {v:?}"))),
        None => Ok(default),
    }
}

impl<T: Real> Scenario<T> {
    /// Reads `invariant`, `seed`, `flow.*`, `quad.*`, `rot.*` and `gg.*`.
    pub fn from_flat(map: &BTreeMap<String, String>) -> Result<Self> {
        let flow = IsotopySpec::from_flat(map)?;
        let invariant = InvariantKind::parse(map.get("invariant").map_or("ruelle", |s| s.as_str()))?;
        let dq = DiskQuadrature::default();
        let quad = DiskQuadrature::new(parse_key(map, "quad.nr", dq.nr)?, parse_key(map, "quad.ntheta", dq.ntheta)?)?;
        let dr = RotConfig::default();
        let rot = RotConfig {
            samples: parse_key(map, "rot.samples", dr.samples)?,
            iters: parse_key(map, "rot.iters", dr.iters)?,
        };
        let dg = GgConfig::default();
        let qm = match map.get("gg.qm") {
            Some(s) => s.parse::<BraidQm>()?,
            None => dg.qm,
        };
        let gg = GgConfig {
            qm,
            n: parse_key(map, "gg.n", dg.n)?,
            samples: parse_key(map, "gg.samples", dg.samples)?,
            seed: parse_key(map, "seed", dg.seed)?,
            k_max: parse_key(map, "gg.kmax", dg.k_max)?,
        };
        if invariant == InvariantKind::Gg {
            gg.validate()?;
        }
        if gg.k_max == 0 || !gg.k_max.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("gg.kmax must be a power of two, got {}", gg.k_max)));
        }
        Ok(Scenario { flow, invariant, quad, rot, gg })
    }

    pub fn to_flat(&self) -> BTreeMap<String, String> {
        let mut m = self.flow.to_flat();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("invariant", self.invariant.name().into());
        put("seed", self.gg.seed.to_string());
        put("quad.nr", self.quad.nr.to_string());
        put("quad.ntheta", self.quad.ntheta.to_string());
        put("rot.samples", self.rot.samples.to_string());
        put("rot.iters", self.rot.iters.to_string());
        put("gg.n", self.gg.n.to_string());
        put("gg.samples", self.gg.samples.to_string());
        put("gg.qm", self.gg.qm.to_string());
        put("gg.kmax", self.gg.k_max.to_string());
        m
    }

    pub fn functional(&self) -> QMFunctional<T> {
        match self.invariant {
            InvariantKind::Ruelle => QMFunctional::Ruelle(self.quad),
            InvariantKind::Rot => QMFunctional::Rot(self.rot),
            InvariantKind::Calabi => QMFunctional::Calabi(self.quad),
            InvariantKind::Gg => QMFunctional::Gg(self.gg),
        }
    }

    /// Homogenized value with `k_max = gg.kmax` (1 means the raw value).
    pub fn run(&self) -> Result<QMValue<T>> {
        let mut v = homogenize(&self.functional(), &self.flow, self.gg.k_max)?;
        v.meta.invariant = self.functional().id();
        Ok(v)
    }
}
