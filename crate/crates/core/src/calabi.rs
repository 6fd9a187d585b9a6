//! Calabi invariant of compactly supported Hamiltonian isotopies.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::{HamiltonianFamily, HamiltonianSpec, IsotopySpec, Point, TwistProfile};
use crate::qmcore::{Meta, QMValue};
use crate::quadrature::DiskQuadrature;
use crate::scalar::{pairwise_sum, Real};

/// Inner radius of the collar on which the Hamiltonian must vanish.
pub const COLLAR: f64 = 0.95;
const TOL_COLLAR: f64 = 1e-9;
/// Simpson intervals for time-dependent Hamiltonians.
const TIME_INTERVALS: usize = 64;

/// `Cal(α) = ∫₀¹ ∫_D H_t ω dt` for the generating Hamiltonian of `α`.
///
/// Twists use their radial Hamiltonian. Products, concatenations, inverses
/// and powers are reduced to their leaves by additivity.
pub fn calabi<T: Real>(alpha: &IsotopySpec<T>, quad: &DiskQuadrature) -> Result<QMValue<T>> {
    quad.validate()?;
    alpha.validate()?;
    let value = cal(alpha, quad)?;
    let half = quad.halved();
    let gap = if half.validate().is_ok() { Some((value - cal(alpha, &half)?).abs().as_f64()) } else { None };
    let meta = Meta {
        invariant: "calabi".into(),
        scenario: alpha.to_string(),
        samples: quad.node_count(),
        quad_gap: gap,
        ..Meta::default()
    };
    Ok(QMValue::exact(value, meta))
}

fn cal<T: Real>(alpha: &IsotopySpec<T>, quad: &DiskQuadrature) -> Result<T> {
    match alpha {
        IsotopySpec::RigidRotation { turns } => {
            if *turns == T::zero() {
                Ok(T::zero())
            } else {
                Err(Error::NotCompactlySupported(format!("rigid rotation by {turns} turns")))
            }
        }
        IsotopySpec::RadialTwist { profile } => {
            let h = HamiltonianSpec::new(HamiltonianFamily::Radial { profile: *profile });
            hamiltonian_cal(&h, T::one(), quad)
        }
        IsotopySpec::HamiltonianFlow { hamiltonian, duration, .. } => hamiltonian_cal(hamiltonian, *duration, quad),
        IsotopySpec::Composite { parts, .. } => {
            let vals = parts.iter().map(|p| cal(p, quad)).collect::<Result<Vec<T>>>()?;
            Ok(pairwise_sum(&vals))
        }
        IsotopySpec::Inverse { of } => Ok(-cal(of, quad)?),
        IsotopySpec::Power { of, k } => {
            if *k == 0 {
                return Ok(T::zero());
            }
            Ok(cal(of, quad)? * T::lit(*k as f64))
        }
    }
}

/// `∫₀^d ∫_D H_s ω ds` after checking that `H` vanishes on the collar.
fn hamiltonian_cal<T: Real>(h: &HamiltonianSpec<T>, duration: T, quad: &DiskQuadrature) -> Result<T> {
    if duration == T::zero() {
        return Ok(T::zero());
    }
    check_collar(h, duration)?;
    let nodes = quad.nodes::<T>();
    let space = |s: T| {
        let terms: Vec<T> = nodes.par_iter().map(|&(p, w)| h.jet(s, duration, p).h * w).collect();
        pairwise_sum(&terms)
    };
    if h.is_autonomous() {
        return Ok(space(T::zero()) * duration);
    }
    let m = TIME_INTERVALS;
    let step = duration / T::from_usize_lossy(m);
    let terms: Vec<T> = (0..=m)
        .map(|i| {
            let c = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            T::lit(c) * space(step * T::from_usize_lossy(i))
        })
        .collect();
    Ok(pairwise_sum(&terms) * step / T::lit(3.0))
}

fn check_collar<T: Real>(h: &HamiltonianSpec<T>, duration: T) -> Result<()> {
    let tol = T::lit(TOL_COLLAR);
    for ri in 0..=8 {
        let r = T::lit(COLLAR + (1.0 - COLLAR) * ri as f64 / 8.0);
        for ai in 0..32 {
            let p = Point::polar(r, T::lit(ai as f64 / 32.0));
            for ti in 0..=4 {
                let s = duration * T::lit(ti as f64 / 4.0);
                let v = h.jet(s, duration, p).h;
                if !(v.abs() <= tol) {
                    return Err(Error::NotCompactlySupported(format!(
                        "|H| = {:e} at radius {}",
                        v.abs().as_f64(),
                        r.as_f64()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Radial closed form `2π² ∫₀¹ r³ f(r) dr` of a twist's Calabi invariant.
pub fn twist_calabi_closed_form<T: Real>(profile: &TwistProfile<T>) -> T {
    let (a, b) = match *profile {
        TwistProfile::CompactSupport { support, center, .. } => ((center + center - support).max(T::zero()), support),
        TwistProfile::BoundaryRotating { .. } => (T::zero(), T::one()),
    };
    let pi = T::PI();
    let moment = crate::quadrature::integrate_interval(|r: T| r * r * r * profile.turns(r), a, b, 8);
    T::lit(2.0) * pi * pi * moment
}
