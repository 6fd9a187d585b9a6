//! Evaluation of points and Jacobians along an isotopy.

use crate::error::{Error, Result};
use crate::flow::spec::{CompositeMode, HamiltonianSpec, IsotopySpec, TwistProfile};
use crate::flow::{Frame, Mat2, Point, TOL_BOUNDARY};
use crate::scalar::Real;

/// Default bound on `|det dg_t - 1|`.
pub const TOL_AREA: f64 = 1e-6;

/// Samples of `g_t(x)` and `dg_t(x)` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTrajectory<T> {
    pub times: Vec<T>,
    pub points: Vec<Point<T>>,
    pub jacobians: Vec<Mat2<T>>,
}

impl<T: Real> FrameTrajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn endpoint(&self) -> Frame<T> {
        let last = self.len() - 1;
        Frame { point: self.points[last], jacobian: self.jacobians[last] }
    }

    pub fn max_area_defect(&self) -> T {
        self.jacobians.iter().map(|j| (j.det() - T::one()).abs()).fold(T::zero(), T::max)
    }

    pub fn max_radius(&self) -> T {
        self.points.iter().map(|p| p.norm()).fold(T::zero(), T::max)
    }
}

/// `intervals + 1` equally spaced nodes on `[0, 1]`.
pub fn uniform_grid<T: Real>(intervals: usize) -> Vec<T> {
    let n = intervals.max(1);
    let inv = T::one() / T::from_usize_lossy(n);
    (0..=n).map(|i| if i == n { T::one() } else { T::from_usize_lossy(i) * inv }).collect()
}

/// Evaluates `g_t(x)` and `dg_t(x)` at every node of `grid`.
///
/// Closed-form families are evaluated analytically, Hamiltonian flows by
/// fixed-step RK4 on the state and its variational equation.
pub fn evaluate_path<T: Real>(spec: &IsotopySpec<T>, x: Point<T>, grid: &[T]) -> Result<FrameTrajectory<T>> {
    check_point(x)?;
    check_grid(grid)?;
    let frames = path_frames(spec, x, grid)?;
    let limit = T::one() + T::lit(TOL_BOUNDARY);
    for f in &frames {
        if f.point.norm_sq() > limit * limit {
            return Err(Error::PointOutsideDisk { x: f.point.x.as_f64(), y: f.point.y.as_f64() });
        }
    }
    Ok(FrameTrajectory {
        times: grid.to_vec(),
        points: frames.iter().map(|f| f.point).collect(),
        jacobians: frames.iter().map(|f| f.jacobian).collect(),
    })
}

/// Time-1 map and its differential.
pub fn endpoint<T: Real>(spec: &IsotopySpec<T>, x: Point<T>) -> Result<Frame<T>> {
    check_point(x)?;
    frame_at(spec, T::one(), x)
}

/// Endpoint images of several points.
pub fn endpoint_map<T: Real>(spec: &IsotopySpec<T>, xs: &[Point<T>]) -> Result<Vec<Point<T>>> {
    xs.iter().map(|&x| endpoint(spec, x).map(|f| f.point)).collect()
}

fn check_point<T: Real>(x: Point<T>) -> Result<()> {
    if !x.x.is_finite() || !x.y.is_finite() || !x.in_disk() {
        return Err(Error::PointOutsideDisk { x: x.x.as_f64(), y: x.y.as_f64() });
    }
    Ok(())
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidArgument("time grid needs at least 2 nodes".into()));
    }
    if grid[0] != T::zero() || grid[grid.len() - 1] != T::one() {
        return Err(Error::InvalidArgument("time grid must start at 0 and end at 1".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Frame of the path at a single time `t ∈ [0, 1]`.
pub fn frame_at<T: Real>(spec: &IsotopySpec<T>, t: T, x: Point<T>) -> Result<Frame<T>> {
    match spec {
        IsotopySpec::RigidRotation { turns } => Ok(rigid_frame(*turns * t, x)),
        IsotopySpec::RadialTwist { profile } => Ok(twist_frame(profile, t, x)),
        IsotopySpec::HamiltonianFlow { hamiltonian, duration, steps } => {
            let mut state = Frame::identity_at(x);
            integrate(hamiltonian, *duration, *steps, &mut state, T::zero(), t)?;
            Ok(state)
        }
        IsotopySpec::Composite { parts, mode: CompositeMode::Pointwise } => {
            let mut acc = Frame::identity_at(x);
            for part in parts.iter().rev() {
                let f = frame_at(part, t, acc.point)?;
                acc = Frame { point: f.point, jacobian: f.jacobian * acc.jacobian };
            }
            Ok(acc)
        }
        IsotopySpec::Composite { parts, mode: CompositeMode::Concatenation } => {
            let order: Vec<&IsotopySpec<T>> = parts.iter().rev().collect();
            concat_frame_at(&order, t, x)
        }
        IsotopySpec::Inverse { of } => frame_at(&of.inverted(), t, x),
        IsotopySpec::Power { k: 0, .. } => Ok(Frame::identity_at(x)),
        IsotopySpec::Power { of, k } => {
            let order = vec![&**of; *k as usize];
            concat_frame_at(&order, t, x)
        }
    }
}

fn concat_frame_at<T: Real>(order: &[&IsotopySpec<T>], t: T, x: Point<T>) -> Result<Frame<T>> {
    let m = order.len();
    let (seg, tau) = segment_of(t, m);
    let mut acc = Frame::identity_at(x);
    for part in &order[..seg] {
        let f = frame_at(part, T::one(), acc.point)?;
        acc = Frame { point: f.point, jacobian: f.jacobian * acc.jacobian };
    }
    let f = frame_at(order[seg], tau, acc.point)?;
    Ok(Frame { point: f.point, jacobian: f.jacobian * acc.jacobian })
}

/// Segment index and local time of `t` in an `m`-fold concatenation.
fn segment_of<T: Real>(t: T, m: usize) -> (usize, T) {
    let mt = t * T::from_usize_lossy(m);
    let seg = mt.floor().to_usize().unwrap_or(0).min(m - 1);
    let tau = (mt - T::from_usize_lossy(seg)).max(T::zero()).min(T::one());
    (seg, tau)
}

/// Frames at each (ascending) time of `grid`; the grid need not start at 0.
pub(crate) fn path_frames<T: Real>(spec: &IsotopySpec<T>, x: Point<T>, grid: &[T]) -> Result<Vec<Frame<T>>> {
    match spec {
        IsotopySpec::RigidRotation { turns } => Ok(grid.iter().map(|&t| rigid_frame(*turns * t, x)).collect()),
        IsotopySpec::RadialTwist { profile } => Ok(grid.iter().map(|&t| twist_frame(profile, t, x)).collect()),
        IsotopySpec::HamiltonianFlow { hamiltonian, duration, steps } => {
            let mut out = Vec::with_capacity(grid.len());
            let mut state = Frame::identity_at(x);
            let mut t0 = T::zero();
            for &t in grid {
                integrate(hamiltonian, *duration, *steps, &mut state, t0, t)?;
                t0 = t;
                out.push(state);
            }
            Ok(out)
        }
        IsotopySpec::Composite { parts, mode: CompositeMode::Pointwise } => {
            let (last, rest) = parts.split_last().expect("validated nonempty");
            let mut frames = path_frames(last, x, grid)?;
            for part in rest.iter().rev() {
                for (f, &t) in frames.iter_mut().zip(grid) {
                    let g = frame_at(part, t, f.point)?;
                    *f = Frame { point: g.point, jacobian: g.jacobian * f.jacobian };
                }
            }
            Ok(frames)
        }
        IsotopySpec::Composite { parts, mode: CompositeMode::Concatenation } => {
            let order: Vec<&IsotopySpec<T>> = parts.iter().rev().collect();
            concat_path(&order, x, grid)
        }
        IsotopySpec::Inverse { of } => path_frames(&of.inverted(), x, grid),
        IsotopySpec::Power { k: 0, .. } => Ok(grid.iter().map(|_| Frame::identity_at(x)).collect()),
        IsotopySpec::Power { of, k } => {
            let order = vec![&**of; *k as usize];
            concat_path(&order, x, grid)
        }
    }
}

/// Parts listed in time order, each occupying an equal subinterval.
fn concat_path<T: Real>(order: &[&IsotopySpec<T>], x: Point<T>, grid: &[T]) -> Result<Vec<Frame<T>>> {
    let m = order.len();
    let mut out = Vec::with_capacity(grid.len());
    let mut start = Frame::identity_at(x);
    let mut idx = 0;
    for (seg, part) in order.iter().enumerate() {
        let mut local = Vec::new();
        while idx < grid.len() {
            let (s, tau) = segment_of(grid[idx], m);
            if s != seg {
                break;
            }
            local.push(tau);
            idx += 1;
        }
        let n_local = local.len();
        if local.last().is_none_or(|&tau| tau < T::one()) {
            local.push(T::one());
        }
        let frames = path_frames(part, start.point, &local)?;
        let chain = |f: &Frame<T>| Frame { point: f.point, jacobian: f.jacobian * start.jacobian };
        out.extend(frames[..n_local].iter().map(chain));
        start = chain(frames.last().expect("endpoint appended"));
    }
    Ok(out)
}

fn rigid_frame<T: Real>(turns: T, x: Point<T>) -> Frame<T> {
    let r = Mat2::rotation(turns);
    Frame { point: r.apply(x), jacobian: r }
}

/// `x ↦ R(t f(|x|)) x` and its differential
/// `R(φ) (I + 2π t f'(r)/r · (Jx) xᵀ)`, `J` the quarter turn.
pub(crate) fn twist_frame<T: Real>(profile: &TwistProfile<T>, t: T, x: Point<T>) -> Frame<T> {
    let r = x.norm();
    let rot = Mat2::rotation(t * profile.turns(r));
    let k = T::tau() * t * profile.slope_over_r(r);
    let shear = Mat2::new(T::one() - k * x.x * x.y, -k * x.y * x.y, k * x.x * x.x, T::one() + k * x.x * x.y);
    Frame { point: rot.apply(x), jacobian: rot * shear }
}

/// Advances `state` from local time `t0` to `t1` with RK4 steps no longer
/// than `1 / steps`.
fn integrate<T: Real>(
    ham: &HamiltonianSpec<T>,
    duration: T,
    steps: u32,
    state: &mut Frame<T>,
    t0: T,
    t1: T,
) -> Result<()> {
    let span = t1 - t0;
    if span <= T::zero() || duration == T::zero() {
        return Ok(());
    }
    let n = (span * T::lit(steps as f64)).ceil().to_usize().unwrap_or(1).max(1);
    let h = span / T::from_usize_lossy(n);
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let two = T::lit(2.0);
    // d/dτ (p, J) = d · (X, DX·J) at family time d·τ.
    let rhs = |tau: T, p: Point<T>, j: Mat2<T>| -> (Point<T>, Mat2<T>) {
        let jet = ham.derivative_jet(duration * tau, duration, p);
        let v = Point::new(jet.hy, -jet.hx) * duration;
        let dx = Mat2::new(jet.hxy, jet.hyy, -jet.hxx, -jet.hxy) * duration;
        (v, dx * j)
    };
    let mut tau = t0;
    let (mut p, mut j) = (state.point, state.jacobian);
    for _ in 0..n {
        let (k1p, k1j) = rhs(tau, p, j);
        let (k2p, k2j) = rhs(tau + h * half, p + k1p * (h * half), j + k1j * (h * half));
        let (k3p, k3j) = rhs(tau + h * half, p + k2p * (h * half), j + k2j * (h * half));
        let (k4p, k4j) = rhs(tau + h, p + k3p * h, j + k3j * h);
        p = p + (k1p + k2p * two + k3p * two + k4p) * (h * sixth);
        j = j + (k1j + k2j * two + k3j * two + k4j) * (h * sixth);
        tau = tau + h;
    }
    let defect = (j.det() - T::one()).abs();
    if !(defect <= T::lit(10.0 * TOL_AREA)) {
        return Err(Error::IntegratorDiverged { defect: defect.as_f64(), t: t1.as_f64() });
    }
    state.point = p;
    state.jacobian = j;
    Ok(())
}
