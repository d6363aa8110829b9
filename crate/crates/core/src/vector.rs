//! Plane vectors and 2x2 real matrices.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// A point or vector of the plane in ambient coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vector2 {
    pub x: f64,
    pub y: f64,
}

impl Vector2 {
    pub const ZERO: Vector2 = Vector2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vector2 { x, y }
    }

    /// `(cos angle, sin angle)`.
    #[inline]
    pub fn unit(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Vector2 { x: c, y: s }
    }

    #[inline]
    pub fn dot(self, other: Vector2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Determinant of the matrix with columns `self`, `other`.
    #[inline]
    pub fn det(self, other: Vector2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Euclidean length. Used only for tolerances and angles; all metric
    /// quantities go through a [`crate::Norm2D`].
    #[inline]
    pub fn euclid(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counterclockwise rotation by a right angle.
    #[inline]
    pub fn perp(self) -> Vector2 {
        Vector2::new(-self.y, self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    /// Angle between two nonzero vectors, in `[0, π]`.
    pub fn angle_to(self, other: Vector2) -> f64 {
        self.det(other).atan2(self.dot(other)).abs()
    }
}

impl fmt::Display for Vector2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Vector2 {
    type Output = Vector2;
    #[inline]
    fn add(self, o: Vector2) -> Vector2 {
        Vector2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vector2 {
    #[inline]
    fn add_assign(&mut self, o: Vector2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vector2 {
    type Output = Vector2;
    #[inline]
    fn sub(self, o: Vector2) -> Vector2 {
        Vector2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vector2 {
    type Output = Vector2;
    #[inline]
    fn neg(self) -> Vector2 {
        Vector2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vector2 {
    type Output = Vector2;
    #[inline]
    fn mul(self, k: f64) -> Vector2 {
        Vector2::new(self.x * k, self.y * k)
    }
}

impl Mul<Vector2> for f64 {
    type Output = Vector2;
    #[inline]
    fn mul(self, v: Vector2) -> Vector2 {
        v * self
    }
}

impl Div<f64> for Vector2 {
    type Output = Vector2;
    #[inline]
    fn div(self, k: f64) -> Vector2 {
        Vector2::new(self.x / k, self.y / k)
    }
}

/// A real 2x2 matrix, stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearMap2x2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl LinearMap2x2 {
    pub const IDENTITY: LinearMap2x2 = LinearMap2x2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        LinearMap2x2 { a11, a12, a21, a22 }
    }

    /// Matrix whose columns are `c1` and `c2`.
    pub fn from_columns(c1: Vector2, c2: Vector2) -> Self {
        LinearMap2x2::new(c1.x, c2.x, c1.y, c2.y)
    }

    /// Counterclockwise rotation.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        LinearMap2x2::new(c, -s, s, c)
    }

    pub fn scaling(k: f64) -> Self {
        LinearMap2x2::new(k, 0.0, 0.0, k)
    }

    /// The unique map sending `from.0 -> to.0` and `from.1 -> to.1`.
    /// Returns `None` when `from` is not a basis.
    pub fn mapping(from: (Vector2, Vector2), to: (Vector2, Vector2)) -> Option<Self> {
        let src = LinearMap2x2::from_columns(from.0, from.1);
        let dst = LinearMap2x2::from_columns(to.0, to.1);
        src.inverse().map(|inv| dst.compose(&inv))
    }

    pub fn column(&self, j: usize) -> Vector2 {
        match j {
            0 => Vector2::new(self.a11, self.a21),
            _ => Vector2::new(self.a12, self.a22),
        }
    }

    #[inline]
    pub fn apply(&self, v: Vector2) -> Vector2 {
        Vector2::new(self.a11 * v.x + self.a12 * v.y, self.a21 * v.x + self.a22 * v.y)
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Inverse, or `None` when `|det| <= 1e-300` (numerically zero).
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if !d.is_finite() || d.abs() <= 1e-300 {
            return None;
        }
        Some(LinearMap2x2::new(
            self.a22 / d,
            -self.a12 / d,
            -self.a21 / d,
            self.a11 / d,
        ))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap2x2) -> Self {
        LinearMap2x2::new(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    /// Largest absolute entrywise difference.
    pub fn max_entry_diff(&self, other: &LinearMap2x2) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Spectral condition number (ratio of singular values).
    pub fn condition_number(&self) -> f64 {
        let [a, b, c, d] = self.entries();
        let fro2 = a * a + b * b + c * c + d * d;
        let det = self.det().abs();
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
        let s_max = ((fro2 + disc) / 2.0).sqrt();
        let s_min = ((fro2 - disc) / 2.0).max(0.0).sqrt();
        if s_min == 0.0 {
            f64::INFINITY
        } else {
            s_max / s_min
        }
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|e| e.is_finite())
    }
}

impl Mul<Vector2> for LinearMap2x2 {
    type Output = Vector2;
    fn mul(self, v: Vector2) -> Vector2 {
        self.apply(v)
    }
}

impl fmt::Display for LinearMap2x2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a11, self.a12, self.a21, self.a22)
    }
}
