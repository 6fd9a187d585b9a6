//! Quasi-morphism plumbing: the value-with-error record, the functional
//! registry, homogenization and defect estimation.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calabi::calabi;
use crate::circle::{rotation_number, RotConfig};
use crate::error::{Error, Result};
use crate::extend::{extend_qm_with, Extension};
use crate::flow::{stream_rng, HamiltonianFamily, IsotopySpec, Point, TwistProfile};
use crate::gg::{gamma_hat, GgConfig};
use crate::quadrature::DiskQuadrature;
use crate::ruelle::ruelle_raw;
use crate::scalar::Real;

/// Provenance of a computed value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub invariant: String,
    pub scenario: String,
    pub seed: Option<u64>,
    /// Quadrature nodes, Monte Carlo samples or boundary samples.
    pub samples: usize,
    pub rejected: usize,
    /// `|value(N) - value(N/2)|` for deterministic quadratures.
    pub quad_gap: Option<f64>,
    pub k_max: Option<u32>,
}

/// An invariant value with its numerical error estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QMValue<T> {
    pub value: T,
    /// Statistical standard error; zero for deterministic rules.
    pub stderr: T,
    /// Homogenization truncation estimate.
    pub bias_estimate: T,
    pub meta: Meta,
}

impl<T: Real> QMValue<T> {
    pub fn exact(value: T, meta: Meta) -> Self {
        QMValue { value, stderr: T::zero(), bias_estimate: T::zero(), meta }
    }

    /// Output record; `runtime_ms` is supplied by the caller.
    pub fn record(&self, runtime_ms: f64) -> ResultRecord {
        ResultRecord {
            invariant: self.meta.invariant.clone(),
            value: self.value.as_f64(),
            stderr: self.stderr.as_f64(),
            bias: self.bias_estimate.as_f64(),
            seed: self.meta.seed,
            scenario: self.meta.scenario.clone(),
            runtime_ms,
        }
    }

    fn check(self) -> Result<Self> {
        if !(self.stderr >= T::zero() && self.stderr.is_finite())
            || !(self.bias_estimate >= T::zero() && self.bias_estimate.is_finite())
        {
            return Err(Error::InvalidArgument(format!("non-finite error estimate for {}", self.meta.invariant)));
        }
        Ok(self)
    }
}

/// Serialized result line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub invariant: String,
    pub value: f64,
    pub stderr: f64,
    pub bias: f64,
    pub seed: Option<u64>,
    pub scenario: String,
    pub runtime_ms: f64,
}

/// Built-in quasi-morphisms on the universal cover.
///
/// [`QMFunctional::evaluate`] returns the raw, non-homogenized value.
#[derive(Debug, Clone, PartialEq)]
pub enum QMFunctional<T> {
    Ruelle(DiskQuadrature),
    Rot(RotConfig),
    Calabi(DiskQuadrature),
    Gg(GgConfig),
    /// `φ - a_φ · rot`, see [`crate::extend`].
    Extended(Box<Extension<T>>),
}

impl<T: Real> fmt::Display for QMFunctional<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QMFunctional::Ruelle(_) => write!(f, "ruelle"),
            QMFunctional::Rot(_) => write!(f, "rot"),
            QMFunctional::Calabi(_) => write!(f, "calabi"),
            QMFunctional::Gg(cfg) => write!(f, "gg({},{})", cfg.qm, cfg.n),
            QMFunctional::Extended(ext) => write!(f, "ext({})", ext.base),
        }
    }
}

impl<T: Real> QMFunctional<T> {
    pub fn ruelle() -> Self {
        QMFunctional::Ruelle(DiskQuadrature::default())
    }

    pub fn rot() -> Self {
        QMFunctional::Rot(RotConfig::default())
    }

    pub fn calabi() -> Self {
        QMFunctional::Calabi(DiskQuadrature::default())
    }

    pub fn gg(cfg: GgConfig) -> Self {
        QMFunctional::Gg(cfg)
    }

    pub fn id(&self) -> String {
        self.to_string()
    }

    /// Raw value `φ(α)`.
    pub fn evaluate(&self, alpha: &IsotopySpec<T>) -> Result<QMValue<T>> {
        let v = match self {
            QMFunctional::Ruelle(q) => ruelle_raw(alpha, q)?,
            QMFunctional::Rot(cfg) => rotation_number(alpha, cfg)?,
            QMFunctional::Calabi(q) => calabi(alpha, q)?,
            QMFunctional::Gg(cfg) => gamma_hat(cfg.qm, cfg.n, alpha, cfg.samples, cfg.seed)?,
            QMFunctional::Extended(ext) => extend_qm_with(ext, alpha)?,
        };
        v.check()
    }

    /// Whether the functional is homogeneous without further limits.
    pub fn is_homogeneous(&self) -> bool {
        matches!(self, QMFunctional::Rot(_) | QMFunctional::Calabi(_) | QMFunctional::Extended(_))
    }
}

/// `φ(α^k)/k` with a Cauchy-difference estimate of the truncation error.
///
/// `k_max` must be a power of two; the bias estimate is
/// `|φ(α^k)/k - φ(α^{k/2})/(k/2)|`, zero for `k_max = 1`.
pub fn homogenize<T: Real>(phi: &QMFunctional<T>, alpha: &IsotopySpec<T>, k_max: u32) -> Result<QMValue<T>> {
    if k_max == 0 || !k_max.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("k_max must be a power of two, got {k_max}")));
    }
    let power = |k: u32| {
        if k == 1 {
            alpha.clone()
        } else {
            alpha.clone().pow(k)
        }
    };
    let kf = T::lit(k_max as f64);
    let top = phi.evaluate(&power(k_max))?;
    let value = top.value / kf;
    let bias = if k_max == 1 {
        T::zero()
    } else {
        let half = phi.evaluate(&power(k_max / 2))?;
        (value - half.value / T::lit((k_max / 2) as f64)).abs()
    };
    let mut meta = top.meta;
    meta.scenario = alpha.to_string();
    meta.k_max = Some(k_max);
    QMValue { value, stderr: top.stderr / kf, bias_estimate: bias, meta }.check()
}

/// Families of random flows used for defect estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairFamily {
    /// Rigid rotations, compact-support twists and boundary-rotating twists.
    TwistRotation,
    /// Flows moving the boundary: boundary-rotating twists, boundary waves,
    /// rigid rotations.
    BoundaryRotating,
    /// Compactly supported twists and off-center bump flows.
    CompactSupport,
}

impl PairFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "twist-rotation" => Ok(PairFamily::TwistRotation),
            "boundary-rotating" => Ok(PairFamily::BoundaryRotating),
            "compact" | "compact-support" => Ok(PairFamily::CompactSupport),
            other => Err(Error::InvalidArgument(format!("unknown flow family {other:?}"))),
        }
    }

    /// Draws one flow of the family.
    pub fn sample<T: Real, R: Rng + ?Sized>(&self, rng: &mut R) -> IsotopySpec<T> {
        let mut u = |a: f64, b: f64| T::lit(rng.gen_range(a..b));
        match self {
            PairFamily::TwistRotation => match (u(0.0, 3.0)).to_u32().unwrap_or(0) {
                0 => IsotopySpec::rigid(u(-1.5, 1.5)),
                1 => IsotopySpec::twist(TwistProfile::compact(u(-1.0, 1.0), u(0.3, 0.95))),
                _ => IsotopySpec::twist(TwistProfile::boundary_rotating(u(-1.0, 1.0), u(-0.5, 0.5))),
            },
            PairFamily::BoundaryRotating => match (u(0.0, 3.0)).to_u32().unwrap_or(0) {
                0 => IsotopySpec::rigid(u(-1.5, 1.5)),
                1 => IsotopySpec::twist(TwistProfile::boundary_rotating(u(-1.0, 1.0), u(-0.5, 0.5))),
                _ => {
                    let a = u(0.5, 1.5);
                    let b = a * u(-0.4, 0.4);
                    IsotopySpec::hamiltonian(HamiltonianFamily::Wave { a, b }, u(0.2, 1.0))
                }
            },
            PairFamily::CompactSupport => match (u(0.0, 2.0)).to_u32().unwrap_or(0) {
                0 => IsotopySpec::twist(TwistProfile::compact(u(-1.0, 1.0), u(0.3, 0.95))),
                _ => {
                    let c = Point::polar(u(0.0, 0.4), u(0.0, 1.0));
                    let radius = u(0.3, 0.55).min(T::lit(0.95) - c.norm());
                    // |A|/ρ² ≤ 3 keeps 512 steps within the area tolerance.
                    IsotopySpec::hamiltonian(
                        HamiltonianFamily::Bump {
                            amplitude: u(-3.0, 3.0) * radius * radius,
                            cx: c.x,
                            cy: c.y,
                            radius,
                            modulation: u(0.0, 0.5),
                        },
                        u(0.3, 1.0),
                    )
                }
            },
        }
    }

    /// Pair number `index` of the seeded sequence.
    pub fn sample_pair<T: Real>(&self, seed: u64, index: u64) -> (IsotopySpec<T>, IsotopySpec<T>) {
        let mut rng = stream_rng(seed, index);
        (self.sample(&mut rng), self.sample(&mut rng))
    }
}

/// Largest observed `|φ(αβ) - φ(α) - φ(β)|` over `pair_count` seeded pairs,
/// with `αβ` the pointwise product.
pub fn defect_estimate<T: Real>(phi: &QMFunctional<T>, pair_count: usize, seed: u64, family: PairFamily) -> Result<T> {
    if pair_count == 0 {
        return Err(Error::InvalidArgument("pair_count must be >= 1".into()));
    }
    let defects: Vec<T> = (0..pair_count as u64)
        .into_par_iter()
        .map(|i| {
            let (a, b) = family.sample_pair::<T>(seed, i);
            pair_defect(phi, &a, &b)
        })
        .collect::<Result<_>>()?;
    Ok(defects.into_iter().fold(T::zero(), T::max))
}

/// `|φ(αβ) - φ(α) - φ(β)|` for one pair.
pub fn pair_defect<T: Real>(phi: &QMFunctional<T>, a: &IsotopySpec<T>, b: &IsotopySpec<T>) -> Result<T> {
    let ab = phi.evaluate(&a.clone().compose(b.clone()))?;
    let va = phi.evaluate(a)?;
    let vb = phi.evaluate(b)?;
    Ok((ab.value - va.value - vb.value).abs())
}
