//! Declarative descriptions of isotopies of the disk.
//!
//! An [`IsotopySpec`] names a path `{g_t}` of area-preserving maps with
//! `g_0 = id`, i.e. a representative of an element of the universal cover of
//! the symplectomorphism group of the disk. Specs have a compact text form
//! (see [`IsotopySpec::parse`]) that round-trips through `Display`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::Point;
use crate::quadrature::integrate_interval;
use crate::scalar::Real;

/// Default number of integrator steps per unit time.
pub const DEFAULT_STEPS: u32 = 512;

/// Rotation profile of a radial twist: the circle of radius `r` turns by
/// `f(r)` full turns after time 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum TwistProfile<T> {
    /// `f(r) = A (1 - v²)⁴` with `v = (r - c) / (s - c)` for `|v| < 1`, zero
    /// otherwise. Vanishes for `r ≥ s`, so the twist fixes a collar of the
    /// boundary.
    CompactSupport { amplitude: T, support: T, center: T },
    /// `f(r) = a + b (1 - r²)²`; rotates the boundary rigidly by `a` turns.
    BoundaryRotating { amplitude: T, shear: T },
}

impl<T: Real> TwistProfile<T> {
    pub fn compact(amplitude: T, support: T) -> Self {
        TwistProfile::CompactSupport { amplitude, support, center: T::zero() }
    }

    pub fn boundary_rotating(amplitude: T, shear: T) -> Self {
        TwistProfile::BoundaryRotating { amplitude, shear }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, TwistProfile::CompactSupport { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TwistProfile::CompactSupport { amplitude, support, center } => {
                if !amplitude.is_finite() {
                    return Err(Error::InvalidSpec("twist amplitude must be finite".into()));
                }
                if !(center >= T::zero() && center < support && support < T::one()) {
                    return Err(Error::InvalidSpec(format!(
                        "compact twist needs 0 <= center < support < 1, got center={center} support={support}"
                    )));
                }
            }
            TwistProfile::BoundaryRotating { amplitude, shear } => {
                if !amplitude.is_finite() || !shear.is_finite() {
                    return Err(Error::InvalidSpec("twist parameters must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Negated profile (the inverse twist).
    pub fn negated(&self) -> Self {
        match *self {
            TwistProfile::CompactSupport { amplitude, support, center } => {
                TwistProfile::CompactSupport { amplitude: -amplitude, support, center }
            }
            TwistProfile::BoundaryRotating { amplitude, shear } => {
                TwistProfile::BoundaryRotating { amplitude: -amplitude, shear: -shear }
            }
        }
    }

    /// `f(r)`, in turns.
    pub fn turns(&self, r: T) -> T {
        match *self {
            TwistProfile::CompactSupport { amplitude, support, center } => {
                let v = (r - center) / (support - center);
                if v.abs() >= T::one() {
                    T::zero()
                } else {
                    amplitude * (T::one() - v * v).powi(4)
                }
            }
            TwistProfile::BoundaryRotating { amplitude, shear } => {
                let q = T::one() - r * r;
                amplitude + shear * q * q
            }
        }
    }

    /// `f'(r)`.
    pub fn slope(&self, r: T) -> T {
        match *self {
            TwistProfile::CompactSupport { amplitude, support, center } => {
                let h = support - center;
                let v = (r - center) / h;
                if v.abs() >= T::one() {
                    T::zero()
                } else {
                    amplitude * T::lit(-8.0) * v * (T::one() - v * v).powi(3) / h
                }
            }
            TwistProfile::BoundaryRotating { shear, .. } => {
                let q = T::one() - r * r;
                shear * T::lit(-4.0) * r * q
            }
        }
    }

    /// `f'(r) / r`, finite at the origin whenever the profile is smooth there.
    pub fn slope_over_r(&self, r: T) -> T {
        match *self {
            TwistProfile::CompactSupport { amplitude, support, center } if center == T::zero() => {
                let v = r / support;
                if v >= T::one() {
                    T::zero()
                } else {
                    amplitude * T::lit(-8.0) * (T::one() - v * v).powi(3) / (support * support)
                }
            }
            TwistProfile::BoundaryRotating { shear, .. } => shear * T::lit(-4.0) * (T::one() - r * r),
            _ => {
                if r == T::zero() {
                    T::zero()
                } else {
                    self.slope(r) / r
                }
            }
        }
    }

    /// Radial Hamiltonian `H(r) = ∫_r^1 2π s f(s) ds` generating the twist
    /// under the sign convention `X = (∂H/∂y, -∂H/∂x)`.
    pub fn hamiltonian(&self, r: T) -> T {
        match *self {
            TwistProfile::CompactSupport { support, center, .. } => {
                let lo = (center - (support - center)).max(T::zero());
                let a = r.max(lo);
                if a >= support {
                    return T::zero();
                }
                // Piecewise polynomial of degree 9 in s: an 8-point rule is exact.
                integrate_interval(|s| T::tau() * s * self.turns(s), a, support, 8)
            }
            TwistProfile::BoundaryRotating { amplitude, shear } => {
                let q = T::one() - r * r;
                T::PI() * (amplitude * q + shear * q * q * q / T::lit(3.0))
            }
        }
    }
}

/// Parametric Hamiltonian families `H(s, x, y)`, `s` the family time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum HamiltonianFamily<T> {
    /// Autonomous radial Hamiltonian of a twist profile.
    Radial { profile: TwistProfile<T> },
    /// `A (1 + ε sin 2πs) (1 - |p - c|²/ρ²)⁴` inside the disk of radius `ρ`
    /// around `c`, zero outside.
    Bump { amplitude: T, cx: T, cy: T, radius: T, modulation: T },
    /// `(1 - r²)(a + b x)`: constant on the boundary, which it moves
    /// non-rigidly with angular velocity `2(a + b cos θ)`.
    Wave { a: T, b: T },
}

/// Second-order jet of a Hamiltonian at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianJet<T> {
    pub h: T,
    pub hx: T,
    pub hy: T,
    pub hxx: T,
    pub hxy: T,
    pub hyy: T,
}

impl<T: Real> HamiltonianJet<T> {
    fn scaled(self, s: T) -> Self {
        HamiltonianJet {
            h: self.h * s,
            hx: self.hx * s,
            hy: self.hy * s,
            hxx: self.hxx * s,
            hxy: self.hxy * s,
            hyy: self.hyy * s,
        }
    }
}

/// A Hamiltonian family plus orientation.
///
/// `reversed` replaces `H(s)` by `-H(d - s)` where `d` is the flow duration;
/// its flow is `g_{d-s} ∘ g_d⁻¹`, a representative of the inverse element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec<T> {
    pub family: HamiltonianFamily<T>,
    #[serde(default)]
    pub reversed: bool,
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn new(family: HamiltonianFamily<T>) -> Self {
        HamiltonianSpec { family, reversed: false }
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            HamiltonianFamily::Radial { profile } => profile.validate(),
            HamiltonianFamily::Bump { amplitude, cx, cy, radius, modulation } => {
                let c = Point::new(cx, cy);
                if !(amplitude.is_finite() && modulation.is_finite()) {
                    return Err(Error::InvalidSpec("bump parameters must be finite".into()));
                }
                if !(radius > T::zero()) || c.norm() + radius > T::one() {
                    return Err(Error::InvalidSpec(format!(
                        "bump disk (center ({cx}, {cy}), radius {radius}) must lie in the unit disk"
                    )));
                }
                Ok(())
            }
            HamiltonianFamily::Wave { a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::InvalidSpec("wave parameters must be finite".into()));
                }
                Ok(())
            }
        }
    }

    /// Whether the generated flow maps the boundary circle to itself.
    pub fn boundary_constant(&self) -> bool {
        true
    }

    /// Whether `H` vanishes identically on the collar `r ≥ collar`.
    pub fn vanishes_beyond(&self, collar: T) -> bool {
        match self.family {
            HamiltonianFamily::Radial { profile } => match profile {
                TwistProfile::CompactSupport { support, .. } => support <= collar,
                TwistProfile::BoundaryRotating { .. } => false,
            },
            HamiltonianFamily::Bump { amplitude, cx, cy, radius, .. } => {
                amplitude == T::zero() || Point::new(cx, cy).norm() + radius <= collar
            }
            HamiltonianFamily::Wave { a, b } => a == T::zero() && b == T::zero(),
        }
    }

    /// Jet of the family Hamiltonian at family time `s`, ignoring `reversed`.
    /// `h` is left at zero unless `value` is set.
    fn family_jet(&self, s: T, p: Point<T>, value: bool) -> HamiltonianJet<T> {
        match self.family {
            HamiltonianFamily::Radial { profile } => {
                // H'(r) = r g(r) with g = -2π f.
                let r = p.norm();
                let g = -T::tau() * profile.turns(r);
                let gp_over_r = -T::tau() * profile.slope_over_r(r);
                HamiltonianJet {
                    h: if value { profile.hamiltonian(r) } else { T::zero() },
                    hx: g * p.x,
                    hy: g * p.y,
                    hxx: g + gp_over_r * p.x * p.x,
                    hxy: gp_over_r * p.x * p.y,
                    hyy: g + gp_over_r * p.y * p.y,
                }
            }
            HamiltonianFamily::Bump { amplitude, cx, cy, radius, modulation } => {
                let m = amplitude * (T::one() + modulation * (T::tau() * s).sin());
                let rho2 = radius * radius;
                let dx = p.x - cx;
                let dy = p.y - cy;
                let q = (dx * dx + dy * dy) / rho2;
                if q >= T::one() {
                    return HamiltonianJet {
                        h: T::zero(),
                        hx: T::zero(),
                        hy: T::zero(),
                        hxx: T::zero(),
                        hxy: T::zero(),
                        hyy: T::zero(),
                    };
                }
                let w = T::one() - q;
                let beta = w.powi(4);
                let d1 = T::lit(-4.0) * w.powi(3);
                let d2 = T::lit(12.0) * w * w;
                let two = T::lit(2.0);
                let qx = two * dx / rho2;
                let qy = two * dy / rho2;
                HamiltonianJet {
                    h: m * beta,
                    hx: m * d1 * qx,
                    hy: m * d1 * qy,
                    hxx: m * (d2 * qx * qx + d1 * two / rho2),
                    hxy: m * d2 * qx * qy,
                    hyy: m * (d2 * qy * qy + d1 * two / rho2),
                }
            }
            HamiltonianFamily::Wave { a, b } => {
                let q = T::one() - p.norm_sq();
                let l = a + b * p.x;
                let two = T::lit(2.0);
                HamiltonianJet {
                    h: q * l,
                    hx: -two * p.x * l + b * q,
                    hy: -two * p.y * l,
                    hxx: -two * a - T::lit(6.0) * b * p.x,
                    hxy: -two * b * p.y,
                    hyy: -two * l,
                }
            }
        }
    }

    /// Jet of the oriented Hamiltonian at family time `s ∈ [0, duration]`.
    pub fn jet(&self, s: T, duration: T, p: Point<T>) -> HamiltonianJet<T> {
        self.oriented_jet(s, duration, p, true)
    }

    /// As [`Self::jet`] without the value `h`, which the flow never needs.
    pub fn derivative_jet(&self, s: T, duration: T, p: Point<T>) -> HamiltonianJet<T> {
        self.oriented_jet(s, duration, p, false)
    }

    fn oriented_jet(&self, s: T, duration: T, p: Point<T>, value: bool) -> HamiltonianJet<T> {
        if self.reversed {
            self.family_jet(duration - s, p, value).scaled(-T::one())
        } else {
            self.family_jet(s, p, value)
        }
    }

    pub fn is_autonomous(&self) -> bool {
        match self.family {
            HamiltonianFamily::Bump { modulation, .. } => modulation == T::zero(),
            _ => true,
        }
    }
}

/// How a [`IsotopySpec::Composite`] combines its parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompositeMode {
    /// `t ↦ p₀(t) ∘ p₁(t) ∘ …`.
    Pointwise,
    /// Parts run one after another on consecutive subintervals, last part
    /// first, so the endpoint is again `p₀(1) ∘ p₁(1) ∘ …`.
    Concatenation,
}

/// A representative path of an element of the universal cover.
///
/// Composite parts are listed in group-product order: the last part is
/// applied first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IsotopySpec<T> {
    RigidRotation { turns: T },
    RadialTwist { profile: TwistProfile<T> },
    HamiltonianFlow { hamiltonian: HamiltonianSpec<T>, duration: T, steps: u32 },
    Composite { parts: Vec<IsotopySpec<T>>, mode: CompositeMode },
    Inverse { of: Box<IsotopySpec<T>> },
    Power { of: Box<IsotopySpec<T>>, k: u32 },
}

/// Group operations on specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupOp {
    Compose,
    Inverse,
    Power(u32),
}

/// Applies a group operation; `Compose` takes two or more operands.
pub fn group_op<T: Real>(op: GroupOp, args: &[IsotopySpec<T>]) -> Result<IsotopySpec<T>> {
    for a in args {
        a.validate()?;
    }
    match op {
        GroupOp::Compose if args.len() >= 2 => {
            Ok(IsotopySpec::Composite { parts: args.to_vec(), mode: CompositeMode::Pointwise })
        }
        GroupOp::Inverse if args.len() == 1 => Ok(args[0].clone().inverse()),
        GroupOp::Power(k) if args.len() == 1 => Ok(args[0].clone().pow(k)),
        _ => Err(Error::InvalidArgument(format!("{op:?} does not accept {} operand(s)", args.len()))),
    }
}

impl<T: Real> IsotopySpec<T> {
    pub fn identity() -> Self {
        IsotopySpec::RigidRotation { turns: T::zero() }
    }

    pub fn rigid(turns: T) -> Self {
        IsotopySpec::RigidRotation { turns }
    }

    pub fn twist(profile: TwistProfile<T>) -> Self {
        IsotopySpec::RadialTwist { profile }
    }

    pub fn hamiltonian(family: HamiltonianFamily<T>, duration: T) -> Self {
        IsotopySpec::HamiltonianFlow { hamiltonian: HamiltonianSpec::new(family), duration, steps: DEFAULT_STEPS }
    }

    /// Pointwise product `self ∘ other`.
    pub fn compose(self, other: Self) -> Self {
        IsotopySpec::Composite { parts: vec![self, other], mode: CompositeMode::Pointwise }
    }

    /// Concatenation: `other` runs first, then `self`.
    pub fn then_after(self, other: Self) -> Self {
        IsotopySpec::Composite { parts: vec![self, other], mode: CompositeMode::Concatenation }
    }

    pub fn inverse(self) -> Self {
        IsotopySpec::Inverse { of: Box::new(self) }
    }

    pub fn pow(self, k: u32) -> Self {
        IsotopySpec::Power { of: Box::new(self), k }
    }

    /// Sets the integrator step count of every Hamiltonian leaf.
    pub fn with_steps(mut self, steps: u32) -> Self {
        self.visit_mut(&mut |s| {
            if let IsotopySpec::HamiltonianFlow { steps: st, .. } = s {
                *st = steps;
            }
        });
        self
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut IsotopySpec<T>)) {
        f(self);
        match self {
            IsotopySpec::Composite { parts, .. } => parts.iter_mut().for_each(|p| p.visit_mut(f)),
            IsotopySpec::Inverse { of } | IsotopySpec::Power { of, .. } => of.visit_mut(f),
            _ => {}
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            IsotopySpec::RigidRotation { turns } => {
                if !turns.is_finite() {
                    return Err(Error::InvalidSpec("rotation turns must be finite".into()));
                }
                Ok(())
            }
            IsotopySpec::RadialTwist { profile } => profile.validate(),
            IsotopySpec::HamiltonianFlow { hamiltonian, duration, steps } => {
                hamiltonian.validate()?;
                if !(duration.is_finite() && *duration >= T::zero()) {
                    return Err(Error::InvalidSpec("duration must be finite and >= 0".into()));
                }
                if *steps == 0 {
                    return Err(Error::InvalidSpec("integrator steps must be >= 1".into()));
                }
                Ok(())
            }
            IsotopySpec::Composite { parts, .. } => {
                if parts.is_empty() {
                    return Err(Error::InvalidSpec("composite needs at least one part".into()));
                }
                parts.iter().try_for_each(|p| p.validate())
            }
            IsotopySpec::Inverse { of } | IsotopySpec::Power { of, .. } => of.validate(),
        }
    }

    /// A representative of the inverse element with no `Inverse` node at the
    /// root. Leaves invert exactly; concatenations reverse their order.
    pub fn inverted(&self) -> Self {
        match self {
            IsotopySpec::RigidRotation { turns } => IsotopySpec::RigidRotation { turns: -*turns },
            IsotopySpec::RadialTwist { profile } => IsotopySpec::RadialTwist { profile: profile.negated() },
            IsotopySpec::HamiltonianFlow { hamiltonian, duration, steps } => {
                let mut h = *hamiltonian;
                h.reversed = !h.reversed;
                IsotopySpec::HamiltonianFlow { hamiltonian: h, duration: *duration, steps: *steps }
            }
            IsotopySpec::Composite { parts, mode } => {
                IsotopySpec::Composite { parts: parts.iter().rev().map(|p| p.inverted()).collect(), mode: *mode }
            }
            IsotopySpec::Inverse { of } => (**of).clone(),
            IsotopySpec::Power { of, k } => IsotopySpec::Power { of: Box::new(of.inverted()), k: *k },
        }
    }

    /// Whether every map of the path fixes a neighbourhood of the boundary,
    /// i.e. the spec represents an element of the boundary-fixing subgroup.
    pub fn is_compactly_supported(&self) -> bool {
        match self {
            IsotopySpec::RigidRotation { turns } => *turns == T::zero(),
            IsotopySpec::RadialTwist { profile } => profile.is_compact(),
            IsotopySpec::HamiltonianFlow { hamiltonian, duration, .. } => {
                *duration == T::zero() || hamiltonian.vanishes_beyond(T::lit(0.999))
            }
            IsotopySpec::Composite { parts, .. } => parts.iter().all(|p| p.is_compactly_supported()),
            IsotopySpec::Inverse { of } => of.is_compactly_supported(),
            IsotopySpec::Power { of, k } => *k == 0 || of.is_compactly_supported(),
        }
    }

    /// Number of time segments in a concatenation-style evaluation.
    pub fn segment_count(&self) -> usize {
        match self {
            IsotopySpec::Composite { parts, mode: CompositeMode::Concatenation } => {
                parts.iter().map(|p| p.segment_count()).sum()
            }
            IsotopySpec::Composite { parts, .. } => parts.iter().map(|p| p.segment_count()).max().unwrap_or(1),
            IsotopySpec::Power { of, k } => (*k as usize).max(1) * of.segment_count(),
            IsotopySpec::Inverse { of } => of.segment_count(),
            _ => 1,
        }
    }

    /// Parses the text form.
    ///
    /// ```text
    /// expr  := term ('*' term)*                 pointwise product
    /// term  := 'inv(' expr ')' | 'pow(' expr ';' int ')'
    ///        | 'cat(' expr (';' expr)* ')' | '(' expr ')' | leaf
    /// leaf  := 'id' | kind ':' param (',' param)*
    /// ```
    ///
    /// Leaf kinds: `rigid:<turns>`, `twist:amp=,support=[,center=]`,
    /// `btwist:amp=[,shear=]`, `radial:amp=,support=|shear=[,center=,duration=,steps=]`,
    /// `bump:amp=,cx=,cy=,radius=[,eps=,duration=,steps=]`,
    /// `wave:a=,b=[,duration=,steps=]`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { s: text.as_bytes(), pos: 0, src: text };
        let spec = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Flat key-value form. Only leaves map onto the documented keys; other
    /// specs are stored under `flow.expr` in text form.
    pub fn to_flat(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match self {
            IsotopySpec::RigidRotation { turns } => {
                put("flow.kind", "rigid".into());
                put("flow.turns", fmt_num(*turns));
            }
            IsotopySpec::RadialTwist { profile } => {
                put("flow.kind", "twist".into());
                profile_to_flat(profile, &mut put);
            }
            IsotopySpec::HamiltonianFlow {
                hamiltonian: HamiltonianSpec { family: HamiltonianFamily::Radial { profile }, reversed: false },
                duration,
                steps,
            } => {
                put("flow.kind", "radial".into());
                profile_to_flat(profile, &mut put);
                put("flow.duration", fmt_num(*duration));
                put("flow.steps", steps.to_string());
            }
            other => {
                put("flow.kind", "expr".into());
                put("flow.expr", other.to_string());
            }
        }
        m
    }

    /// Inverse of [`IsotopySpec::to_flat`]; ignores keys outside `flow.*`.
    pub fn from_flat(map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| map.get(k).map(|s| s.trim());
        let num = |k: &str, default: Option<f64>| -> Result<T> {
            match get(k) {
                Some(v) => {
                    v.parse::<f64>().map(T::lit).map_err(|_| Error::InvalidSpec(format!("{k}: not a number: {v:?}")))
                }
                None => default.map(T::lit).ok_or_else(|| Error::InvalidSpec(format!("missing key {k}"))),
            }
        };
        let steps = match get("flow.steps") {
            Some(v) => {
                v.parse::<u32>().map_err(|_| Error::InvalidSpec(format!("flow.steps: not an integer: {v:?}")))?
            }
            None => DEFAULT_STEPS,
        };
        let profile = || -> Result<TwistProfile<T>> {
            match get("flow.profile").unwrap_or("compact") {
                "compact" | "compact-support" => Ok(TwistProfile::CompactSupport {
                    amplitude: num("flow.amplitude", None)?,
                    support: num("flow.support_radius", None)?,
                    center: num("flow.center", Some(0.0))?,
                }),
                "boundary-rotating" | "boundary" => Ok(TwistProfile::BoundaryRotating {
                    amplitude: num("flow.amplitude", None)?,
                    shear: num("flow.shear", Some(0.0))?,
                }),
                other => Err(Error::InvalidSpec(format!("unknown flow.profile {other:?}"))),
            }
        };
        let spec = match get("flow.kind") {
            Some("identity") | Some("id") => IsotopySpec::identity(),
            Some("rigid") => IsotopySpec::rigid(num("flow.turns", None)?),
            Some("twist") => IsotopySpec::twist(profile()?),
            Some("radial") => IsotopySpec::HamiltonianFlow {
                hamiltonian: HamiltonianSpec::new(HamiltonianFamily::Radial { profile: profile()? }),
                duration: num("flow.duration", Some(1.0))?,
                steps,
            },
            Some("expr") => {
                let e = get("flow.expr").ok_or_else(|| Error::InvalidSpec("missing key flow.expr".into()))?;
                let s = IsotopySpec::parse(e)?;
                if get("flow.steps").is_some() {
                    s.with_steps(steps)
                } else {
                    s
                }
            }
            Some(other) => return Err(Error::InvalidSpec(format!("unknown flow.kind {other:?}"))),
            None => return Err(Error::InvalidSpec("missing key flow.kind".into())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn profile_to_flat<T: Real>(profile: &TwistProfile<T>, put: &mut impl FnMut(&str, String)) {
    match *profile {
        TwistProfile::CompactSupport { amplitude, support, center } => {
            put("flow.profile", "compact".into());
            put("flow.amplitude", fmt_num(amplitude));
            put("flow.support_radius", fmt_num(support));
            put("flow.center", fmt_num(center));
        }
        TwistProfile::BoundaryRotating { amplitude, shear } => {
            put("flow.profile", "boundary-rotating".into());
            put("flow.amplitude", fmt_num(amplitude));
            put("flow.shear", fmt_num(shear));
        }
    }
}

fn fmt_num<T: Real>(v: T) -> String {
    format!("{}", v.as_f64())
}

impl<T: Real> fmt::Display for IsotopySpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |v: T| fmt_num(v);
        let profile_params = |p: &TwistProfile<T>| match *p {
            TwistProfile::CompactSupport { amplitude, support, center } => {
                if center == T::zero() {
                    format!("amp={},support={}", n(amplitude), n(support))
                } else {
                    format!("amp={},support={},center={}", n(amplitude), n(support), n(center))
                }
            }
            TwistProfile::BoundaryRotating { amplitude, shear } => {
                format!("amp={},shear={}", n(amplitude), n(shear))
            }
        };
        match self {
            IsotopySpec::RigidRotation { turns } if *turns == T::zero() => write!(f, "id"),
            IsotopySpec::RigidRotation { turns } => write!(f, "rigid:{}", n(*turns)),
            IsotopySpec::RadialTwist { profile } => {
                let kind = if profile.is_compact() { "twist" } else { "btwist" };
                write!(f, "{kind}:{}", profile_params(profile))
            }
            IsotopySpec::HamiltonianFlow { hamiltonian, duration, steps } => {
                let body = match hamiltonian.family {
                    HamiltonianFamily::Radial { ref profile } => {
                        format!("radial:{}", profile_params(profile))
                    }
                    HamiltonianFamily::Bump { amplitude, cx, cy, radius, modulation } => format!(
                        "bump:amp={},cx={},cy={},radius={},eps={}",
                        n(amplitude),
                        n(cx),
                        n(cy),
                        n(radius),
                        n(modulation)
                    ),
                    HamiltonianFamily::Wave { a, b } => format!("wave:a={},b={}", n(a), n(b)),
                };
                let leaf = format!("{body},duration={},steps={steps}", n(*duration));
                if hamiltonian.reversed {
                    write!(f, "inv({leaf})")
                } else {
                    write!(f, "{leaf}")
                }
            }
            IsotopySpec::Composite { parts, mode } => {
                let inner: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                match mode {
                    CompositeMode::Pointwise => write!(f, "({})", inner.join("*")),
                    CompositeMode::Concatenation => write!(f, "cat({})", inner.join(";")),
                }
            }
            IsotopySpec::Inverse { of } => write!(f, "inv({of})"),
            IsotopySpec::Power { of, k } => write!(f, "pow({of};{k})"),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::InvalidSpec(format!("{msg} at byte {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn expr<T: Real>(&mut self) -> Result<IsotopySpec<T>> {
        let mut parts = vec![self.term()?];
        while self.eat(b'*') {
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            IsotopySpec::Composite { parts, mode: CompositeMode::Pointwise }
        })
    }

    fn term<T: Real>(&mut self) -> Result<IsotopySpec<T>> {
        if self.eat(b'(') {
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        let save = self.pos;
        let word = self.ident();
        match word {
            "inv" if self.eat(b'(') => {
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e.inverse())
            }
            "pow" if self.eat(b'(') => {
                let e = self.expr()?;
                self.expect(b';')?;
                let k = self.raw_token();
                let k: u32 = k.parse().map_err(|_| self.err("power exponent must be an integer >= 0"))?;
                self.expect(b')')?;
                Ok(e.pow(k))
            }
            "cat" if self.eat(b'(') => {
                let mut parts = vec![self.expr()?];
                while self.eat(b';') {
                    parts.push(self.expr()?);
                }
                self.expect(b')')?;
                Ok(IsotopySpec::Composite { parts, mode: CompositeMode::Concatenation })
            }
            "id" | "identity" => Ok(IsotopySpec::identity()),
            "" => Err(self.err("expected a flow")),
            kind => {
                if !self.eat(b':') {
                    self.pos = save;
                    return Err(self.err(&format!("expected ':' after {kind:?}")));
                }
                let params = self.params()?;
                leaf_from_params(kind, &params).map_err(|e| match e {
                    Error::InvalidSpec(m) => Error::InvalidSpec(format!("{m} in {:?}", self.src)),
                    other => other,
                })
            }
        }
    }

    fn raw_token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && !matches!(self.s[self.pos], b',' | b';' | b')' | b'*') {
            self.pos += 1;
        }
        self.src[start..self.pos].trim()
    }

    fn params(&mut self) -> Result<Vec<(Option<String>, f64)>> {
        let mut out = Vec::new();
        loop {
            let tok = self.raw_token();
            let (key, val) = match tok.split_once('=') {
                Some((k, v)) => (Some(k.trim().to_string()), v.trim()),
                None => (None, tok),
            };
            let v: f64 = val.parse().map_err(|_| self.err(&format!("bad number {val:?}")))?;
            out.push((key, v));
            if !self.eat(b',') {
                break;
            }
        }
        Ok(out)
    }
}

fn leaf_from_params<T: Real>(kind: &str, params: &[(Option<String>, f64)]) -> Result<IsotopySpec<T>> {
    let mut named = BTreeMap::new();
    let mut positional = Vec::new();
    for (k, v) in params {
        match k {
            Some(k) => {
                named.insert(k.as_str(), *v);
            }
            None => positional.push(*v),
        }
    }
    let take = |names: &[&str], pos: usize, default: Option<f64>| -> Result<T> {
        names
            .iter()
            .find_map(|n| named.get(n).copied())
            .or_else(|| positional.get(pos).copied())
            .or(default)
            .map(T::lit)
            .ok_or_else(|| Error::InvalidSpec(format!("{kind}: missing parameter {}", names[0])))
    };
    let steps = named.get("steps").map(|&s| s as u32).unwrap_or(DEFAULT_STEPS);
    let duration = || take(&["duration", "d"], usize::MAX, Some(1.0));
    let compact = || -> Result<TwistProfile<T>> {
        Ok(TwistProfile::CompactSupport {
            amplitude: take(&["amp", "amplitude"], 0, None)?,
            support: take(&["support", "support_radius"], 1, None)?,
            center: take(&["center"], 2, Some(0.0))?,
        })
    };
    let boundary = || -> Result<TwistProfile<T>> {
        Ok(TwistProfile::BoundaryRotating {
            amplitude: take(&["amp", "amplitude"], 0, None)?,
            shear: take(&["shear"], 1, Some(0.0))?,
        })
    };
    let ham =
        |family, duration| IsotopySpec::HamiltonianFlow { hamiltonian: HamiltonianSpec::new(family), duration, steps };
    let spec = match kind {
        "rigid" => IsotopySpec::rigid(take(&["turns"], 0, None)?),
        "twist" => IsotopySpec::twist(compact()?),
        "btwist" => IsotopySpec::twist(boundary()?),
        "radial" => {
            let profile = if named.contains_key("shear") || !named.contains_key("support") && positional.len() < 2 {
                boundary()?
            } else {
                compact()?
            };
            ham(HamiltonianFamily::Radial { profile }, duration()?)
        }
        "bump" => ham(
            HamiltonianFamily::Bump {
                amplitude: take(&["amp", "amplitude"], 0, None)?,
                cx: take(&["cx"], 1, Some(0.0))?,
                cy: take(&["cy"], 2, Some(0.0))?,
                radius: take(&["radius"], 3, None)?,
                modulation: take(&["eps", "modulation"], 4, Some(0.0))?,
            },
            duration()?,
        ),
        "wave" => {
            ham(HamiltonianFamily::Wave { a: take(&["a"], 0, None)?, b: take(&["b"], 1, Some(0.0))? }, duration()?)
        }
        other => return Err(Error::InvalidSpec(format!("unknown flow kind {other:?}"))),
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_leaves() {
        let s: IsotopySpec<f64> = IsotopySpec::parse("rigid:1.0").unwrap();
        assert_eq!(s, IsotopySpec::rigid(1.0));
        let s: IsotopySpec<f64> = IsotopySpec::parse("twist:amp=0.3,support=0.8").unwrap();
        assert_eq!(s, IsotopySpec::twist(TwistProfile::compact(0.3, 0.8)));
        let s: IsotopySpec<f64> = IsotopySpec::parse("btwist:amp=0.3").unwrap();
        assert_eq!(s, IsotopySpec::twist(TwistProfile::boundary_rotating(0.3, 0.0)));
        let s: IsotopySpec<f64> = IsotopySpec::parse("id").unwrap();
        assert_eq!(s, IsotopySpec::identity());
    }

    #[test]
    fn parses_composites() {
        let s: IsotopySpec<f64> = IsotopySpec::parse("pow(rigid:0.5;3) * inv(btwist:amp=0.2,shear=0.1)").unwrap();
        match &s {
            IsotopySpec::Composite { parts, mode: CompositeMode::Pointwise } => {
                assert_eq!(parts.len(), 2);
                assert_eq!(parts[0], IsotopySpec::rigid(0.5).pow(3));
            }
            other => panic!("unexpected {other:?}"),
        }
        let c: IsotopySpec<f64> = IsotopySpec::parse("cat(rigid:1;wave:a=1,b=0.5,duration=0.3)").unwrap();
        assert!(matches!(c, IsotopySpec::Composite { mode: CompositeMode::Concatenation, .. }));
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "rigid:0.25",
            "twist:amp=-0.4,support=0.9,center=0.3",
            "(btwist:amp=0.3,shear=0.2*inv(bump:amp=1,cx=0.2,cy=-0.1,radius=0.5,eps=0.3,duration=0.7,steps=256))",
            "cat(pow(radial:amp=0.5,support=0.8,duration=1,steps=512;2);wave:a=1,b=0.3,duration=0.5,steps=512)",
        ] {
            let s: IsotopySpec<f64> = IsotopySpec::parse(text).unwrap();
            let again: IsotopySpec<f64> = IsotopySpec::parse(&s.to_string()).unwrap();
            assert_eq!(s, again, "{text}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        for text in ["", "rigid", "twist:amp=0.3,support=1.2", "spin:1", "pow(rigid:1;-1)", "rigid:1 extra", "cat()"] {
            assert!(IsotopySpec::<f64>::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn flat_config_round_trips() {
        for s in [
            IsotopySpec::rigid(1.0),
            IsotopySpec::twist(TwistProfile::compact(0.3, 0.8)),
            IsotopySpec::twist(TwistProfile::boundary_rotating(0.3, -0.1)),
            IsotopySpec::hamiltonian(HamiltonianFamily::Radial { profile: TwistProfile::compact(0.5, 0.7) }, 1.0)
                .with_steps(128),
            IsotopySpec::rigid(0.5).pow(3),
        ] {
            let flat = s.to_flat();
            assert_eq!(IsotopySpec::<f64>::from_flat(&flat).unwrap(), s);
        }
        let mut m = BTreeMap::new();
        m.insert("flow.kind".to_string(), "twist".to_string());
        m.insert("flow.amplitude".to_string(), "0.3".to_string());
        assert!(IsotopySpec::<f64>::from_flat(&m).is_err());
    }

    #[test]
    fn twist_hamiltonian_matches_profile() {
        // -H'(r) / (2π r) recovers f(r).
        for profile in [TwistProfile::compact(0.7, 0.8), TwistProfile::boundary_rotating(0.3, 0.4)] {
            for &r in &[0.1, 0.35, 0.6, 0.79] {
                let h = 1e-6;
                let dh = (profile.hamiltonian(r + h) - profile.hamiltonian(r - h)) / (2.0 * h);
                let f = -dh / (std::f64::consts::TAU * r);
                assert!((f - profile.turns(r)).abs() < 1e-7, "{profile:?} r={r}");
            }
        }
        assert_eq!(TwistProfile::compact(0.7, 0.8).hamiltonian(0.85), 0.0);
    }

    #[test]
    fn slope_matches_finite_difference() {
        for profile in [
            TwistProfile::<f64>::compact(0.7, 0.8),
            TwistProfile::CompactSupport { amplitude: -0.5, support: 0.9, center: 0.5 },
            TwistProfile::boundary_rotating(0.3, 0.4),
        ] {
            for &r in &[0.05, 0.3, 0.55, 0.75] {
                let h = 1e-6;
                let fd = (profile.turns(r + h) - profile.turns(r - h)) / (2.0 * h);
                assert!((fd - profile.slope(r)).abs() < 1e-6);
                assert!((profile.slope_over_r(r) * r - profile.slope(r)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_of_inverse_is_original() {
        let s: IsotopySpec<f64> = IsotopySpec::parse("cat(rigid:0.3;twist:amp=0.2,support=0.5)").unwrap();
        assert_eq!(s.inverted().inverted(), s);
        assert_eq!(s.clone().inverse().inverted(), s);
    }

    #[test]
    fn group_op_checks_arity() {
        let a = IsotopySpec::<f64>::rigid(0.5);
        assert!(group_op(GroupOp::Compose, std::slice::from_ref(&a)).is_err());
        assert!(group_op(GroupOp::Inverse, &[a.clone(), a.clone()]).is_err());
        let c = group_op(GroupOp::Compose, &[a.clone(), a.clone()]).unwrap();
        assert!(matches!(c, IsotopySpec::Composite { mode: CompositeMode::Pointwise, .. }));
        let p = group_op(GroupOp::Power(3), &[a]).unwrap();
        assert!(matches!(p, IsotopySpec::Power { k: 3, .. }));
    }
}
