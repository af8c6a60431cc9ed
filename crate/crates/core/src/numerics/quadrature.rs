//! Composite quadrature, line integrals and volume integrals in spherical
//! coordinates.

use super::{Linear, NumericsError, Point3};
use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::num::NonZeroUsize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    GaussLegendre,
    Simpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rule: QuadratureRule,
    pub panels: usize,
    /// Nodes per panel. Simpson panels use `points - 1` subintervals, so
    /// `points` must be odd.
    pub points: usize,
    /// Nodes closer than this to the OZ axis are rejected.
    pub pole_exclusion: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rule: QuadratureRule::GaussLegendre,
            panels: 16,
            points: 10,
            pole_exclusion: None,
        }
    }
}

impl QuadratureConfig {
    pub fn gauss(panels: usize, points: usize) -> Self {
        Self { panels, points, ..Self::default() }
    }

    pub fn simpson(panels: usize, points: usize) -> Self {
        Self { rule: QuadratureRule::Simpson, panels, points, pole_exclusion: None }
    }

    pub fn with_pole_exclusion(mut self, radius: f64) -> Self {
        self.pole_exclusion = Some(radius);
        self
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels;
        self
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if self.panels == 0 {
            return Err(NumericsError::InvalidConfig("quadrature panels must be >= 1".into()));
        }
        match self.rule {
            QuadratureRule::GaussLegendre if self.points == 0 => Err(NumericsError::InvalidConfig(
                "Gauss-Legendre points per panel must be >= 1".into(),
            )),
            QuadratureRule::Simpson if self.points < 3 || self.points % 2 == 0 => {
                Err(NumericsError::InvalidConfig(format!(
                    "Simpson points per panel must be odd and >= 3, got {}",
                    self.points
                )))
            }
            _ => Ok(()),
        }
    }
}

/// A composite rule on a reference panel `[-1, 1]`, ready to be applied to
/// any interval.
#[derive(Debug, Clone)]
pub struct Quadrature {
    panels: usize,
    /// `(node, weight)` on `[-1, 1]`.
    reference: Vec<(f64, f64)>,
}

impl Quadrature {
    pub fn new(cfg: &QuadratureConfig) -> Result<Self, NumericsError> {
        cfg.validate()?;
        let reference = match cfg.rule {
            QuadratureRule::GaussLegendre => {
                let degree = NonZeroUsize::new(cfg.points).expect("validated");
                GaussLegendre::new(degree).as_node_weight_pairs().to_vec()
            }
            QuadratureRule::Simpson => {
                let n = cfg.points - 1;
                let h = 2.0 / n as f64;
                (0..=n)
                    .map(|i| {
                        let w = if i == 0 || i == n {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        (-1.0 + i as f64 * h, w * h / 3.0)
                    })
                    .collect()
            }
        };
        Ok(Self { panels: cfg.panels, reference })
    }

    /// All `(node, weight)` pairs of the composite rule on `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let width = (b - a) / self.panels as f64;
        let half = 0.5 * width;
        let mut out = Vec::with_capacity(self.panels * self.reference.len());
        for k in 0..self.panels {
            let mid = a + (k as f64 + 0.5) * width;
            for &(x, w) in &self.reference {
                out.push((mid + half * x, half * w));
            }
        }
        out
    }

    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: Linear,
        F: FnMut(f64) -> T,
    {
        self.nodes(a, b).into_iter().fold(T::zero(), |acc, (x, w)| acc + f(x) * w)
    }

    pub fn try_integrate<T, E, F>(&self, a: f64, b: f64, mut f: F) -> Result<T, E>
    where
        T: Linear,
        F: FnMut(f64) -> Result<T, E>,
    {
        let mut acc = T::zero();
        for (x, w) in self.nodes(a, b) {
            acc = acc + f(x)? * w;
        }
        Ok(acc)
    }
}

/// One-shot composite integral of `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    Ok(Quadrature::new(cfg)?.integrate(a, b, f))
}

/// A parametrized space curve with an analytic tangent.
pub trait Curve {
    fn domain(&self) -> (f64, f64);
    fn position(&self, tau: f64) -> Point3;
    fn tangent(&self, tau: f64) -> Point3;
}

/// A horizontal circle traversed `turns` times; negative turns run clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleCurve {
    pub center: Point3,
    pub radius: f64,
    pub turns: i32,
}

impl CircleCurve {
    pub fn new(center: Point3, radius: f64, turns: i32) -> Self {
        Self { center, radius, turns }
    }

    fn orientation(&self) -> f64 {
        if self.turns < 0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Curve for CircleCurve {
    fn domain(&self) -> (f64, f64) {
        (0.0, 2.0 * PI * f64::from(self.turns.unsigned_abs()))
    }

    fn position(&self, tau: f64) -> Point3 {
        let (s, c) = (self.orientation() * tau).sin_cos();
        self.center + Point3::new(self.radius * c, self.radius * s, 0.0)
    }

    fn tangent(&self, tau: f64) -> Point3 {
        let sign = self.orientation();
        let (s, c) = (sign * tau).sin_cos();
        Point3::new(-self.radius * s * sign, self.radius * c * sign, 0.0)
    }
}

/// A curve given by position and tangent closures.
pub struct ParamCurve<P, D> {
    pub start: f64,
    pub end: f64,
    pub position: P,
    pub tangent: D,
}

impl<P, D> Curve for ParamCurve<P, D>
where
    P: Fn(f64) -> Point3,
    D: Fn(f64) -> Point3,
{
    fn domain(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    fn position(&self, tau: f64) -> Point3 {
        (self.position)(tau)
    }

    fn tangent(&self, tau: f64) -> Point3 {
        (self.tangent)(tau)
    }
}

/// `∫ (F, dr)` along `curve`.
pub fn line_integral<F, C>(vfield: F, curve: &C, cfg: &QuadratureConfig) -> Result<f64, NumericsError>
where
    F: Fn(Point3) -> Point3,
    C: Curve + ?Sized,
{
    let quad = Quadrature::new(cfg)?;
    let (a, b) = curve.domain();
    quad.try_integrate(a, b, |tau| {
        let p = curve.position(tau);
        if let Some(radius) = cfg.pole_exclusion {
            if p.rho() < radius {
                return Err(NumericsError::PoleOnPath { point: p });
            }
        }
        let value = vfield(p).dot(curve.tangent(tau));
        if value.is_finite() {
            Ok(value)
        } else {
            Err(NumericsError::PoleOnPath { point: p })
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadialExtent {
    Finite(f64),
    /// Integrate to `radius`, then estimate the tail on `[radius, 2·radius]`
    /// and reject it if it exceeds `tolerance` relative to the bulk.
    Truncated { radius: f64, tolerance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalRegion {
    pub r_inner: f64,
    pub outer: RadialExtent,
}

impl SphericalRegion {
    pub fn ball(radius: f64) -> Self {
        Self { r_inner: 0.0, outer: RadialExtent::Finite(radius) }
    }

    pub fn all_space(truncate_at: f64, tolerance: f64) -> Self {
        Self {
            r_inner: 0.0,
            outer: RadialExtent::Truncated { radius: truncate_at, tolerance },
        }
    }
}

fn shell_integral<F>(field: &F, r0: f64, r1: f64, quad: &Quadrature) -> f64
where
    F: Fn(Point3) -> f64,
{
    let r_nodes = quad.nodes(r0, r1);
    let theta_nodes = quad.nodes(0.0, PI);
    let phi_nodes = quad.nodes(0.0, 2.0 * PI);
    let mut total = 0.0;
    for &(phi, wp) in &phi_nodes {
        let mut over_theta = 0.0;
        for &(theta, wt) in &theta_nodes {
            let st = theta.sin();
            let mut over_r = 0.0;
            for &(r, wr) in &r_nodes {
                over_r += wr * r * r * field(Point3::from_spherical(r, theta, phi));
            }
            over_theta += wt * st * over_r;
        }
        total += wp * over_theta;
    }
    total
}

/// `∭ f dV` over a spherical shell.
pub fn volume_integral<F>(field: F, region: &SphericalRegion, cfg: &QuadratureConfig) -> Result<f64, NumericsError>
where
    F: Fn(Point3) -> f64,
{
    let quad = Quadrature::new(cfg)?;
    match region.outer {
        RadialExtent::Finite(r_outer) => {
            if !(r_outer.is_finite() && r_outer >= region.r_inner && region.r_inner >= 0.0) {
                return Err(NumericsError::InvalidConfig(format!(
                    "invalid radial bounds [{}, {}]",
                    region.r_inner, r_outer
                )));
            }
            Ok(shell_integral(&field, region.r_inner, r_outer, &quad))
        }
        RadialExtent::Truncated { radius, tolerance } => {
            if !(radius.is_finite() && radius > region.r_inner && region.r_inner >= 0.0) {
                return Err(NumericsError::InvalidConfig(format!(
                    "invalid truncation radius {radius}"
                )));
            }
            let bulk = shell_integral(&field, region.r_inner, radius, &quad);
            let tail = shell_integral(&field, radius, 2.0 * radius, &quad);
            if !tail.is_finite() || tail.abs() > tolerance * bulk.abs() {
                return Err(NumericsError::Truncation { radius, tail_estimate: tail, bulk });
            }
            Ok(bulk + tail)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma;

    #[test]
    fn gauss_is_exact_on_polynomials() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &QuadratureConfig::gauss(1, 4)).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = integrate(|x| x * x * x + x, 0.0, 2.0, &QuadratureConfig::simpson(3, 5)).unwrap();
        assert!((v - 6.0).abs() < 1e-12);
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(Quadrature::new(&QuadratureConfig::gauss(0, 4)).is_err());
        assert!(Quadrature::new(&QuadratureConfig::simpson(2, 4)).is_err());
    }

    fn vortex(p: Point3) -> Point3 {
        p.e_phi() * (1.0 / p.rho())
    }

    #[test]
    fn vortex_circulation_is_two_pi() {
        let curve = CircleCurve::new(Point3::ZERO, 1.0, 1);
        let v = line_integral(vortex, &curve, &QuadratureConfig::default()).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn triple_traversal_gives_six_pi() {
        let curve = CircleCurve::new(Point3::ZERO, 1.0, 3);
        let v = line_integral(vortex, &curve, &QuadratureConfig::default()).unwrap();
        assert!((v - 6.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn constant_field_has_no_circulation() {
        let curve = CircleCurve::new(Point3::new(0.3, 0.2, 0.0), 2.0, 1);
        let v = line_integral(|_| Point3::new(1.0, -2.0, 0.5), &curve, &QuadratureConfig::default()).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn pole_on_path_is_reported() {
        let curve = ParamCurve {
            start: -1.0,
            end: 1.0,
            position: |t: f64| Point3::new(t, 0.0, 0.0),
            tangent: |_| Point3::new(1.0, 0.0, 0.0),
        };
        let cfg = QuadratureConfig::simpson(2, 3);
        let err = line_integral(vortex, &curve, &cfg).unwrap_err();
        assert!(matches!(err, NumericsError::PoleOnPath { .. }));
    }

    #[test]
    fn normalised_radial_density() {
        let (nu, kappa) = (1.0f64, 2.0f64);
        let c = kappa.powf(nu + 3.0) / (4.0 * PI * gamma(nu + 3.0));
        let f = |p: Point3| {
            let r = p.norm();
            c * r.powf(nu) * (-kappa * r).exp()
        };
        let v = volume_integral(f, &SphericalRegion::all_space(30.0, 1e-12), &QuadratureConfig::gauss(8, 12)).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn unit_ball_volume() {
        let v = volume_integral(|_| 1.0, &SphericalRegion::ball(1.0), &QuadratureConfig::gauss(2, 12)).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_over_all_space() {
        // Oracle: the radial integral alone, 4π ∫ r² e^{-r²} dr, at a much
        // higher panel count than the 3D rule.
        let oracle = 4.0 * PI * integrate(|r| r * r * (-r * r).exp(), 0.0, 12.0, &QuadratureConfig::gauss(400, 16)).unwrap();
        assert!((oracle - PI.powf(1.5)).abs() < 1e-13);
        let v = volume_integral(|p| (-p.dot(p)).exp(), &SphericalRegion::all_space(6.0, 1e-12), &QuadratureConfig::gauss(6, 12)).unwrap();
        assert!((v - oracle).abs() < 1e-9 * oracle, "{v} vs {oracle}");
    }

    #[test]
    fn slow_tail_is_reported() {
        let err = volume_integral(|p| 1.0 / (1.0 + p.dot(p)), &SphericalRegion::all_space(5.0, 1e-6), &QuadratureConfig::gauss(2, 6)).unwrap_err();
        assert!(matches!(err, NumericsError::Truncation { .. }));
    }

    #[test]
    fn doubling_panels_is_stable_once_converged() {
        let f = |x: f64| (3.0 * x).cos() * (-x).exp();
        let coarse = integrate(f, 0.0, 4.0, &QuadratureConfig::gauss(16, 10)).unwrap();
        let fine = integrate(f, 0.0, 4.0, &QuadratureConfig::gauss(32, 10)).unwrap();
        assert!((coarse - fine).abs() < 1e-9 * fine.abs());
    }
}
