use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Tolerance on `|p|² ≤ 1` for points handled as disk points.
pub const TOL_BOUNDARY: f64 = 1e-9;

/// A point of the plane, usually of the closed unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero())
    }

    /// Point at radius `r` and angle `turns` (in turns).
    pub fn polar(r: T, turns: T) -> Self {
        let (s, c) = (turns * T::tau()).sin_cos();
        Point::new(r * c, r * s)
    }

    pub fn norm_sq(self) -> T {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Rotation by `turns` counterclockwise.
    pub fn rotated(self, turns: T) -> Self {
        Mat2::rotation(turns).apply(self)
    }

    pub fn in_disk(self) -> bool {
        self.norm_sq() <= T::one() + T::lit(TOL_BOUNDARY)
    }

    /// Linear interpolation `(1 - s) a + s b`.
    pub fn lerp(a: Self, b: Self, s: T) -> Self {
        a + (b - a) * s
    }
}

impl<T: Real> Add for Point<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Point<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Point::new(self.x * s, self.y * s)
    }
}

/// Row-major 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    /// Counterclockwise rotation by `turns`.
    pub fn rotation(turns: T) -> Self {
        let (s, c) = (turns * T::tau()).sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: Point<T>) -> Point<T> {
        Point::new(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)
    }

    pub fn first_column(&self) -> Point<T> {
        Point::new(self.a, self.c)
    }

    pub fn inverse_unimodular(&self) -> Self {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        (self.a - o.a).abs().max((self.b - o.b).abs()).max((self.c - o.c).abs()).max((self.d - o.d).abs())
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl<T: Real> Mul<T> for Mat2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

/// A point together with the differential of the map at its preimage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame<T> {
    pub point: Point<T>,
    pub jacobian: Mat2<T>,
}

impl<T: Real> Frame<T> {
    pub fn identity_at(p: Point<T>) -> Self {
        Frame { point: p, jacobian: Mat2::identity() }
    }
}
