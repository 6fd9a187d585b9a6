mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use sympd::{
    boundary_lift, rotation_number, CircleLift, HamiltonianFamily, IsotopySpec, PairFamily, RotConfig, TwistProfile,
};

fn rot(spec: &IsotopySpec<f64>) -> f64 {
    rotation_number(spec, &RotConfig::default()).unwrap().value
}

/// Boundary angle (turns) under the wave flow: `φ' = 2 d (a + b cos φ)` in
/// radians, integrated with a fine independent RK4.
fn wave_boundary_oracle(a: f64, b: f64, d: f64, theta: f64) -> f64 {
    let f = |phi: f64| 2.0 * d * (a + b * phi.cos());
    let n = 20_000;
    let h = 1.0 / n as f64;
    let mut phi = 2.0 * PI * theta;
    for _ in 0..n {
        let k1 = f(phi);
        let k2 = f(phi + 0.5 * h * k1);
        let k3 = f(phi + 0.5 * h * k2);
        let k4 = f(phi + h * k3);
        phi += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    phi / (2.0 * PI)
}

#[test]
fn rigid_rotation_lift_and_rotation_number() {
    let lift = boundary_lift(&IsotopySpec::rigid(1.0f64), 256).unwrap();
    assert!(lift.max_deviation_from_shift(1.0) < 1e-9);
    assert!((rot(&IsotopySpec::rigid(1.0)) - 1.0).abs() < 1e-9);
}

#[test]
fn compact_flows_fix_the_boundary() {
    for (name, spec) in common::builtin_specs() {
        if !spec.is_compactly_supported() {
            continue;
        }
        let lift = boundary_lift(&spec, 256).unwrap();
        assert!(lift.max_deviation_from_shift(0.0) < 1e-9, "{name}");
        assert!(rot(&spec).abs() < 1e-9, "{name}");
    }
}

#[test]
fn boundary_rotating_twist_is_rigid_on_the_circle() {
    let spec = IsotopySpec::twist(TwistProfile::boundary_rotating(0.3f64, 0.4));
    let lift = boundary_lift(&spec, 256).unwrap();
    assert!(lift.max_deviation_from_shift(0.3) < 1e-6);
    assert!((rot(&spec) - 0.3).abs() < 1e-6);
}

#[test]
fn wave_lift_matches_boundary_ode() {
    let (a, b, d) = (1.0, 0.4, 0.7);
    let spec = IsotopySpec::hamiltonian(HamiltonianFamily::Wave { a, b }, d);
    let lift = boundary_lift(&spec, 64).unwrap();
    for (t, f) in lift.thetas.iter().zip(&lift.images) {
        assert!((f - wave_boundary_oracle(a, b, d, *t)).abs() < 1e-6);
    }
    let v = rotation_number(&spec, &RotConfig::default()).unwrap();
    let exact = d * (a * a - b * b).sqrt() / PI;
    assert!((v.value - exact).abs() <= v.bias_estimate + 1e-6, "{} vs {exact}", v.value);
}

#[test]
fn deck_composition_shifts_by_integers() {
    for (name, spec) in common::builtin_specs() {
        let base = rot(&spec);
        for k in 1..=3 {
            let shifted = spec.clone().compose(IsotopySpec::rigid(k as f64));
            assert!((rot(&shifted) - base - k as f64).abs() < 1e-6, "{name}, k = {k}");
        }
    }
}

#[test]
fn conjugation_invariance() {
    let alpha = IsotopySpec::hamiltonian(HamiltonianFamily::Wave { a: 1.2f64, b: 0.3 }, 0.6);
    let beta = IsotopySpec::twist(TwistProfile::boundary_rotating(0.45, -0.3));
    let conj = beta.clone().compose(alpha.clone()).compose(beta.inverse());
    let (a, c) = (
        rotation_number(&alpha, &RotConfig::default()).unwrap(),
        rotation_number(&conj, &RotConfig::default()).unwrap(),
    );
    assert!((a.value - c.value).abs() <= a.bias_estimate + c.bias_estimate + 1e-6);
}

#[test]
fn non_monotone_samples_are_rejected() {
    let err = CircleLift::from_samples(vec![0.0f64, 0.5, 0.4, 0.8]).unwrap_err();
    assert_eq!(err.code(), "MonotonicityViolation");
}

#[test]
fn lift_interpolation_is_periodic_and_exact_on_samples() {
    let images: Vec<f64> = (0..32).map(|j| j as f64 / 32.0 + 0.2 + 0.05 * (2.0 * PI * j as f64 / 32.0).sin()).collect();
    let lift = CircleLift::from_samples(images.clone()).unwrap();
    for (j, y) in images.iter().enumerate() {
        let t = j as f64 / 32.0;
        assert!((lift.eval(t) - y).abs() < 1e-14);
        assert!((lift.eval(t + 3.0) - y - 3.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn rotation_defect_at_most_one(seed in 0u64..1_000_000, idx in 0u64..1000) {
        let (a, b) = PairFamily::BoundaryRotating.sample_pair::<f64>(seed, idx);
        let d = rot(&a.clone().compose(b.clone())) - rot(&a) - rot(&b);
        prop_assert!(d.abs() <= 1.0 + 1e-6);
    }

    #[test]
    fn interpolant_is_monotone(shift in -2.0f64..2.0, wobble in 0.0f64..0.1, t in 0.0f64..1.0, dt in 1e-6f64..0.5) {
        let images: Vec<f64> = (0..64)
            .map(|j| j as f64 / 64.0 + shift + wobble * (2.0 * PI * j as f64 / 64.0).sin() / (2.0 * PI))
            .collect();
        let lift = CircleLift::from_samples(images).unwrap();
        prop_assert!(lift.eval(t + dt) > lift.eval(t));
    }
}
