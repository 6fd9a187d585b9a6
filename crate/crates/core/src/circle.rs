//! Boundary restriction and the rotation number.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{path_frames, uniform_grid, IsotopySpec, Point};
use crate::qmcore::{Meta, QMValue};
use crate::scalar::{angle_turns, wrap_turns, Real};

/// Allowed radial drift of a boundary sample.
pub const TOL_CIRCLE: f64 = 1e-6;
const MAX_DOUBLINGS: u32 = 12;
const STARTS: usize = 8;

/// Settings of [`rotation_number`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotConfig {
    /// Boundary samples `M`.
    pub samples: usize,
    pub iters: usize,
}

impl Default for RotConfig {
    fn default() -> Self {
        RotConfig { samples: 256, iters: 1000 }
    }
}

/// A lift `F: ℝ → ℝ` of a circle map, `F(θ + 1) = F(θ) + 1`, sampled at
/// `θ_j = j/M` and interpolated by a periodic monotone cubic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleLift<T> {
    pub thetas: Vec<T>,
    pub images: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> CircleLift<T> {
    /// Builds the interpolant; fails unless the samples increase within one
    /// period.
    pub fn from_samples(images: Vec<T>) -> Result<Self> {
        let m = images.len();
        if m < 2 {
            return Err(Error::InvalidArgument("a circle lift needs at least 2 samples".into()));
        }
        for j in 0..m {
            let next = if j + 1 < m { images[j + 1] } else { images[0] + T::one() };
            if !(next > images[j]) {
                return Err(Error::MonotonicityViolation { index: j });
            }
        }
        let h = T::one() / T::from_usize_lossy(m);
        let thetas: Vec<T> = (0..m).map(|j| T::from_usize_lossy(j) * h).collect();
        let secant = |j: usize| {
            let next = if j + 1 < m { images[j + 1] } else { images[0] + T::one() };
            (next - images[j]) / h
        };
        // Uniform spacing: the Fritsch-Carlson weighted harmonic mean reduces to
        // the plain harmonic mean of neighbouring secants.
        let slopes = (0..m)
            .map(|j| {
                let a = secant((j + m - 1) % m);
                let b = secant(j);
                T::lit(2.0) * a * b / (a + b)
            })
            .collect();
        Ok(CircleLift { thetas, images, slopes })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `F(θ)` for any real `θ`.
    pub fn eval(&self, theta: T) -> T {
        let m = self.len();
        let mf = T::from_usize_lossy(m);
        let n = theta.floor();
        let u = (theta - n) * mf;
        let j = u.floor().to_usize().unwrap_or(0).min(m - 1);
        let s = u - T::from_usize_lossy(j);
        let h = T::one() / mf;
        let (y0, d0) = (self.images[j], self.slopes[j]);
        let (y1, d1) = if j + 1 < m {
            (self.images[j + 1], self.slopes[j + 1])
        } else {
            (self.images[0] + T::one(), self.slopes[0])
        };
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1 + n
    }

    /// Largest `|F(θ_j) - θ_j - shift|` over the samples.
    pub fn max_deviation_from_shift(&self, shift: T) -> T {
        self.thetas.iter().zip(&self.images).map(|(&t, &f)| (f - t - shift).abs()).fold(T::zero(), T::max)
    }
}

/// Lift of the boundary restriction of the time-1 map, tracked continuously
/// along the path from `M` samples.
pub fn boundary_lift<T: Real>(alpha: &IsotopySpec<T>, samples: usize) -> Result<CircleLift<T>> {
    alpha.validate()?;
    if samples < 2 {
        return Err(Error::InvalidArgument("rot.samples must be >= 2".into()));
    }
    let intervals = 64 * alpha.segment_count().clamp(1, 64);
    let images = (0..samples)
        .into_par_iter()
        .map(|j| {
            let theta = T::from_usize_lossy(j) / T::from_usize_lossy(samples);
            track(alpha, theta, intervals).map(|w| theta + w)
        })
        .collect::<Result<Vec<T>>>()?;
    CircleLift::from_samples(images)
}

/// Winding of `g_t(e^{2πiθ})` in turns.
fn track<T: Real>(alpha: &IsotopySpec<T>, theta: T, intervals: usize) -> Result<T> {
    let x = Point::polar(T::one(), theta);
    let tol = T::lit(TOL_CIRCLE);
    let mut n = intervals;
    for _ in 0..=MAX_DOUBLINGS {
        let frames = path_frames(alpha, x, &uniform_grid::<T>(n))?;
        let mut total = T::zero();
        let mut ok = true;
        let mut prev = angle_turns(x.x, x.y);
        for f in &frames[1..] {
            let dev = (f.point.norm() - T::one()).abs();
            if !(dev <= tol) {
                return Err(Error::BoundaryNotPreserved { deviation: dev.as_f64() });
            }
            let a = angle_turns(f.point.x, f.point.y);
            let d = wrap_turns(a - prev);
            if d.abs() >= T::lit(0.25) {
                ok = false;
                break;
            }
            total = total + d;
            prev = a;
        }
        if ok {
            return Ok(total);
        }
        n *= 2;
    }
    Err(Error::RefinementLimitExceeded { doublings: MAX_DOUBLINGS })
}

/// Translation number of the boundary lift, averaged over 8 starting
/// points. `bias_estimate` is the spread of the starts plus `1/iters`.
pub fn rotation_number<T: Real>(alpha: &IsotopySpec<T>, cfg: &RotConfig) -> Result<QMValue<T>> {
    if cfg.iters == 0 {
        return Err(Error::InvalidArgument("rot.iters must be >= 1".into()));
    }
    let lift = boundary_lift(alpha, cfg.samples)?;
    let n = T::from_usize_lossy(cfg.iters);
    let estimates: Vec<T> = (0..STARTS)
        .into_par_iter()
        .map(|k| {
            let theta0 = T::from_usize_lossy(k) / T::from_usize_lossy(STARTS);
            let mut theta = theta0;
            for _ in 0..cfg.iters {
                theta = lift.eval(theta);
            }
            (theta - theta0) / n
        })
        .collect();
    let mean = estimates.iter().copied().sum::<T>() / T::from_usize_lossy(STARTS);
    let lo = estimates.iter().copied().fold(T::infinity(), T::min);
    let hi = estimates.iter().copied().fold(T::neg_infinity(), T::max);
    let meta = Meta { invariant: "rot".into(), scenario: alpha.to_string(), samples: cfg.samples, ..Meta::default() };
    Ok(QMValue { value: mean, stderr: T::zero(), bias_estimate: (hi - lo) + T::one() / n, meta })
}
