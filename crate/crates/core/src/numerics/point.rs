use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A point (or vector) in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ZERO: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Builds a point from spherical coordinates `(r, θ, ϕ)`.
    pub fn from_spherical(r: f64, theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new(r * st * cp, r * st * sp, r * ct)
    }

    /// Builds a point from cylindrical coordinates `(ρ, ϕ, z)`.
    pub fn from_cylindrical(rho: f64, phi: f64, z: f64) -> Self {
        let (sp, cp) = phi.sin_cos();
        Self::new(rho * cp, rho * sp, z)
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Cylindrical radius, the distance from the OZ axis.
    pub fn rho(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Azimuthal angle in `(-π, π]`.
    pub fn azimuth(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Polar angle measured from +OZ.
    pub fn polar(self) -> f64 {
        self.rho().atan2(self.z)
    }

    /// Unit azimuthal vector `e_ϕ`; undefined on the axis.
    pub fn e_phi(self) -> Self {
        let rho = self.rho();
        Self::new(-self.y / rho, self.x / rho, 0.0)
    }

    /// Unit radial vector `e_r` (spherical).
    pub fn e_r(self) -> Self {
        self * (1.0 / self.norm())
    }

    /// Projection onto the XOY plane, the cylindrical radius vector.
    pub fn planar(self) -> Self {
        Self::new(self.x, self.y, 0.0)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn component(self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis index {axis} out of range"),
        }
    }

    pub fn unit(axis: usize) -> Self {
        match axis {
            0 => Self::new(1.0, 0.0, 0.0),
            1 => Self::new(0.0, 1.0, 0.0),
            2 => Self::new(0.0, 0.0, 1.0),
            _ => panic!("axis index {axis} out of range"),
        }
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }
}

impl Add for Point3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Mul<Point3> for f64 {
    type Output = Point3;
    fn mul(self, rhs: Point3) -> Point3 {
        rhs * self
    }
}

impl Neg for Point3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}
