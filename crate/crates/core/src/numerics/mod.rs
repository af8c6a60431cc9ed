//! Finite differences, quadrature and the small vector type shared by every
//! other module.
//!
//! Everything here is a pure function of its inputs. Fields are plain
//! closures `Fn(Point3) -> T`; a non-finite return value inside a stencil or
//! on a quadrature node is reported as an error that names the point.

mod fd;
mod point;
mod quadrature;

pub use fd::{fd_curl, fd_divergence, fd_gradient, fd_laplacian, fd_partial, FdConfig, FdOrder};
pub use point::Point3;
pub use quadrature::{
    integrate, line_integral, volume_integral, CircleCurve, Curve, ParamCurve, Quadrature,
    QuadratureConfig, QuadratureRule, RadialExtent, SphericalRegion,
};

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("field evaluation failed inside the stencil at {point:?}")]
    StencilFailure { point: Point3 },
    #[error("stencil point {point:?} lies inside the pole exclusion radius {radius:e}")]
    PoleExclusion { point: Point3, radius: f64 },
    #[error("singular evaluation on the integration path at {point:?}")]
    PoleOnPath { point: Point3 },
    #[error("radial tail beyond {radius} is {tail_estimate:e} against bulk {bulk:e}")]
    Truncation { radius: f64, tail_estimate: f64, bulk: f64 },
    #[error("invalid numerical configuration: {0}")]
    InvalidConfig(String),
}

/// Values that finite-difference stencils and quadrature sums can combine.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn is_finite(&self) -> bool;
}

impl Linear for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Linear for Point3 {
    fn zero() -> Self {
        Point3::ZERO
    }
    fn is_finite(&self) -> bool {
        Point3::is_finite(*self)
    }
}

impl Linear for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Γ(x). Integer arguments use the exact factorial; everything else goes
/// through the Lanczos approximation in `statrs`.
pub fn gamma(x: f64) -> f64 {
    if x.fract() == 0.0 && (1.0..=171.0).contains(&x) {
        (1..x as u32).fold(1.0, |acc, k| acc * f64::from(k))
    } else {
        statrs::function::gamma::gamma(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gamma_at_integers_is_factorial() {
        assert_eq!(gamma(1.0), 1.0);
        assert_eq!(gamma(4.0), 6.0);
        assert_eq!(gamma(11.0), 3_628_800.0);
    }

    #[test]
    fn gamma_at_half_integers() {
        let half = gamma(0.5);
        assert!((half - PI.sqrt()).abs() < 1e-12 * PI.sqrt());
        // Γ(4.5) = 105 √π / 16
        let expected = 105.0 * PI.sqrt() / 16.0;
        assert!((gamma(4.5) - expected).abs() < 1e-12 * expected);
    }
}
