//! Extension of quasi-morphisms from the boundary-fixing subgroup:
//! `ψ = φ̄ - a_φ · rot` with `a_φ = φ̄(full rotation)`.

use crate::circle::{rotation_number, RotConfig};
use crate::error::{Error, Result};
use crate::flow::IsotopySpec;
use crate::qmcore::{homogenize, QMFunctional, QMValue};
use crate::scalar::Real;

/// A base functional with its precomputed deck value.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension<T> {
    pub base: QMFunctional<T>,
    pub k_max: u32,
    pub a_phi: QMValue<T>,
    pub rot: RotConfig,
}

impl<T: Real> Extension<T> {
    pub fn new(base: QMFunctional<T>, k_max: u32) -> Result<Self> {
        if matches!(base, QMFunctional::Extended(_)) {
            return Err(Error::InvalidArgument("extension of an extension is not supported".into()));
        }
        let a_phi = a_phi(&base, k_max)?;
        Ok(Extension { base, k_max, a_phi, rot: RotConfig::default() })
    }

    pub fn into_functional(self) -> QMFunctional<T> {
        QMFunctional::Extended(Box::new(self))
    }
}

/// `a_φ = φ̄(1)`, the homogenized value on the full rotation.
pub fn a_phi<T: Real>(phi: &QMFunctional<T>, k_max: u32) -> Result<QMValue<T>> {
    homogenize(phi, &IsotopySpec::rigid(T::one()), k_max)
}

/// `ψ(lift) = φ̄(lift) - a_φ rot(lift)`; errors combine in quadrature.
pub fn extend_qm_with<T: Real>(ext: &Extension<T>, lift: &IsotopySpec<T>) -> Result<QMValue<T>> {
    let h = homogenize(&ext.base, lift, ext.k_max)?;
    let rot = rotation_number(lift, &ext.rot)?;
    let a = &ext.a_phi;
    let value = h.value - a.value * rot.value;
    let stderr = (h.stderr.powi(2) + (rot.value * a.stderr).powi(2) + (a.value * rot.stderr).powi(2)).sqrt();
    let bias =
        (h.bias_estimate.powi(2) + (rot.value * a.bias_estimate).powi(2) + (a.value * rot.bias_estimate).powi(2))
            .sqrt();
    let mut meta = h.meta;
    meta.invariant = format!("ext({})", ext.base);
    Ok(QMValue { value, stderr, bias_estimate: bias, meta })
}

/// [`extend_qm_with`] computing `a_φ` on the fly.
pub fn extend_qm<T: Real>(phi: &QMFunctional<T>, lift: &IsotopySpec<T>, k_max: u32) -> Result<QMValue<T>> {
    extend_qm_with(&Extension::new(phi.clone(), k_max)?, lift)
}

/// `|ψ(lift) - ψ(lift ∘ R_k)|` with `R_k` the rigid rotation by `k` turns.
///
/// `stderr` of the result combines the two evaluations; `k = 0` gives 0.
pub fn lift_independence_residual<T: Real>(ext: &Extension<T>, lift: &IsotopySpec<T>, k: i32) -> Result<QMValue<T>> {
    let a = extend_qm_with(ext, lift)?;
    if k == 0 {
        return Ok(QMValue { value: T::zero(), stderr: T::zero(), bias_estimate: T::zero(), meta: a.meta });
    }
    let shifted = lift.clone().compose(IsotopySpec::rigid(T::lit(k as f64)));
    let b = extend_qm_with(ext, &shifted)?;
    Ok(QMValue {
        value: (a.value - b.value).abs(),
        stderr: (a.stderr.powi(2) + b.stderr.powi(2)).sqrt(),
        bias_estimate: (a.bias_estimate.powi(2) + b.bias_estimate.powi(2)).sqrt(),
        meta: a.meta,
    })
}
