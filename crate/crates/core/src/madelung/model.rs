//! Closed-form wave fields with analytic first and second derivatives.

use super::{MadelungError, PhysicalConstants};
use crate::numerics::{gamma, volume_integral, NumericsError, Point3, QuadratureConfig, SphericalRegion};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Axis exclusion radius as a fraction of the characteristic length.
pub const POLE_EXCLUSION_FRACTION: f64 = 1e-6;

/// A parametrized wave field `Ψ(r, t)`.
///
/// For the two axis-vortex models the density is `f = C r^ν e^{−κr}` with
/// `C = κ^{ν+3} / (4π Γ(ν+3))` and `Ψ = √f · e^{iφ}`, so `|Ψ|² = f` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WaveModel {
    /// Phase `φ = kϕ − Et/ħ`: the whole velocity is potential.
    CentralField { nu: f64, kappa: f64, k: i32, energy: f64 },
    /// Phase `φ = −Et/ħ` and vector potential `A = −ħk/(q_e ρ) e_ϕ`: the whole
    /// velocity is solenoidal.
    DiracString { nu: f64, kappa: f64, k: i32, energy: f64 },
    /// `Ψ = e^{i(px − Et)/ħ}`.
    PlaneWave { momentum: f64, energy: f64 },
    /// Freely spreading Gaussian packet of initial width `σ` at rest.
    FreeGaussian { sigma: f64 },
}

/// Ψ and its logarithmic derivatives at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalWave {
    pub psi: Complex64,
    /// Real part of `∇Ψ/Ψ`, equal to `∇ln|Ψ|`.
    pub grad_log_amplitude: Point3,
    /// Imaginary part of `∇Ψ/Ψ`, equal to `∇φ`.
    pub grad_phase: Point3,
    /// `ΔΨ/Ψ`.
    pub laplacian_ratio: Complex64,
    /// `∂_tΨ/Ψ`.
    pub time_log_derivative: Complex64,
    pub vector_potential: Point3,
}

impl LocalWave {
    pub fn density(&self) -> f64 {
        self.psi.norm_sqr()
    }

    /// `Δ√f/√f`.
    pub fn amplitude_laplacian_ratio(&self) -> f64 {
        self.laplacian_ratio.re + self.grad_phase.dot(self.grad_phase)
    }

    /// `Δφ`.
    pub fn phase_laplacian(&self) -> f64 {
        self.laplacian_ratio.im - 2.0 * self.grad_log_amplitude.dot(self.grad_phase)
    }

    pub fn gradient_psi(&self) -> [Complex64; 3] {
        let g = |a: usize| {
            self.psi
                * Complex64::new(self.grad_log_amplitude.component(a), self.grad_phase.component(a))
        };
        [g(0), g(1), g(2)]
    }
}

fn vortex_normalization(nu: f64, kappa: f64) -> f64 {
    kappa.powf(nu + 3.0) / (4.0 * PI * gamma(nu + 3.0))
}

impl WaveModel {
    pub fn central_field(nu: f64, kappa: f64, k: i32, energy: f64) -> Self {
        WaveModel::CentralField { nu, kappa, k, energy }
    }

    pub fn dirac_string(nu: f64, kappa: f64, k: i32, energy: f64) -> Self {
        WaveModel::DiracString { nu, kappa, k, energy }
    }

    pub fn validate(&self) -> Result<(), MadelungError> {
        let bad = |msg: String| Err(MadelungError::InvalidModel(msg));
        match *self {
            WaveModel::CentralField { nu, kappa, energy, .. }
            | WaveModel::DiracString { nu, kappa, energy, .. } => {
                if !(kappa > 0.0 && kappa.is_finite()) {
                    return bad(format!("kappa must be positive, got {kappa}"));
                }
                if !(nu > -3.0 && nu.is_finite()) {
                    return bad(format!("nu must exceed -3 for a normalisable density, got {nu}"));
                }
                if !energy.is_finite() {
                    return bad("energy must be finite".into());
                }
            }
            WaveModel::PlaneWave { momentum, energy } => {
                if !(momentum.is_finite() && energy.is_finite()) {
                    return bad("plane-wave momentum and energy must be finite".into());
                }
            }
            WaveModel::FreeGaussian { sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return bad(format!("sigma must be positive, got {sigma}"));
                }
            }
        }
        Ok(())
    }

    /// Winding integer of the vortex models; zero otherwise.
    pub fn winding(&self) -> i32 {
        match *self {
            WaveModel::CentralField { k, .. } | WaveModel::DiracString { k, .. } => k,
            _ => 0,
        }
    }

    pub fn energy(&self, consts: &PhysicalConstants) -> f64 {
        match *self {
            WaveModel::CentralField { energy, .. }
            | WaveModel::DiracString { energy, .. }
            | WaveModel::PlaneWave { energy, .. } => energy,
            // Mean energy of the spreading packet: 3ħ²/(8mσ²).
            WaveModel::FreeGaussian { sigma } => {
                3.0 * consts.hbar * consts.hbar / (8.0 * consts.mass * sigma * sigma)
            }
        }
    }

    /// Density scale `C`; `None` for the plane wave.
    pub fn normalization(&self) -> Option<f64> {
        match *self {
            WaveModel::CentralField { nu, kappa, .. } | WaveModel::DiracString { nu, kappa, .. } => {
                Some(vortex_normalization(nu, kappa))
            }
            WaveModel::FreeGaussian { sigma } => Some((2.0 * PI * sigma * sigma).powf(-1.5)),
            WaveModel::PlaneWave { .. } => None,
        }
    }

    /// Length used to scale finite-difference steps and exclusion zones.
    pub fn characteristic_length(&self, consts: &PhysicalConstants) -> f64 {
        match *self {
            WaveModel::CentralField { kappa, .. } | WaveModel::DiracString { kappa, .. } => 1.0 / kappa,
            WaveModel::FreeGaussian { sigma } => sigma,
            WaveModel::PlaneWave { momentum, .. } => {
                if momentum == 0.0 {
                    1.0
                } else {
                    consts.hbar / momentum.abs()
                }
            }
        }
    }

    /// Radius around OZ inside which the model is not evaluated.
    pub fn pole_exclusion(&self, consts: &PhysicalConstants) -> Option<f64> {
        match self {
            WaveModel::CentralField { .. } | WaveModel::DiracString { .. } => {
                Some(POLE_EXCLUSION_FRACTION * self.characteristic_length(consts))
            }
            _ => None,
        }
    }

    /// Vector potential `A`; zero except for the Dirac string.
    pub fn vector_potential(&self, p: Point3, consts: &PhysicalConstants) -> Point3 {
        match *self {
            WaveModel::DiracString { k, .. } => {
                p.e_phi() * (-consts.hbar * f64::from(k) / (consts.charge * p.rho()))
            }
            _ => Point3::ZERO,
        }
    }

    fn check_point(&self, p: Point3, consts: &PhysicalConstants) -> Result<(), MadelungError> {
        if !p.is_finite() {
            return Err(MadelungError::InvalidModel(format!("non-finite point {p:?}")));
        }
        if let Some(radius) = self.pole_exclusion(consts) {
            if p.rho() < radius {
                return Err(MadelungError::Pole { point: p, radius });
            }
        }
        Ok(())
    }

    /// Ψ and its analytic log-derivatives at `(p, t)`.
    pub fn local(&self, p: Point3, t: f64, consts: &PhysicalConstants) -> Result<LocalWave, MadelungError> {
        self.check_point(p, consts)?;
        let hbar = consts.hbar;
        let local = match *self {
            WaveModel::CentralField { nu, kappa, k, energy }
            | WaveModel::DiracString { nu, kappa, k, energy } => {
                let r = p.norm();
                let c = vortex_normalization(nu, kappa);
                let density = c * r.powf(nu) * (-kappa * r).exp();
                // Amplitude √f = √C r^a e^{−b r}.
                let (a, b) = (0.5 * nu, 0.5 * kappa);
                let amp_ratio = b * b + a * (a + 1.0) / (r * r) - 2.0 * b * (a + 1.0) / r;
                let radial = p.e_r() * (a / r - b);
                let is_central = matches!(self, WaveModel::CentralField { .. });
                let (phase, grad_phase, lap) = if is_central {
                    let kf = f64::from(k);
                    let rho = p.rho();
                    let grad_phase = p.e_phi() * (kf / rho);
                    (kf * p.azimuth() - energy * t / hbar, grad_phase, amp_ratio - kf * kf / (rho * rho))
                } else {
                    (-energy * t / hbar, Point3::ZERO, amp_ratio)
                };
                LocalWave {
                    psi: Complex64::from_polar(density.sqrt(), phase),
                    grad_log_amplitude: radial,
                    grad_phase,
                    laplacian_ratio: Complex64::new(lap, 0.0),
                    time_log_derivative: Complex64::new(0.0, -energy / hbar),
                    vector_potential: self.vector_potential(p, consts),
                }
            }
            WaveModel::PlaneWave { momentum, energy } => {
                let kx = momentum / hbar;
                LocalWave {
                    psi: Complex64::from_polar(1.0, kx * p.x - energy * t / hbar),
                    grad_log_amplitude: Point3::ZERO,
                    grad_phase: Point3::new(kx, 0.0, 0.0),
                    laplacian_ratio: Complex64::new(-kx * kx, 0.0),
                    time_log_derivative: Complex64::new(0.0, -energy / hbar),
                    vector_potential: Point3::ZERO,
                }
            }
            WaveModel::FreeGaussian { sigma } => {
                // Ψ = (2π)^{-3/4} σ^{3/2} q^{-3/2} exp(−r²/4q), q = σ² + iħt/2m.
                let q = Complex64::new(sigma * sigma, hbar * t / (2.0 * consts.mass));
                let r2 = p.dot(p);
                let log_psi = Complex64::new(-0.75 * (2.0 * PI).ln() + 1.5 * sigma.ln(), 0.0)
                    - 1.5 * q.ln()
                    - r2 / (4.0 * q);
                let g = -0.5 / q;
                let shape = r2 / (4.0 * q * q) - 1.5 / q;
                let dq_dt = Complex64::new(0.0, hbar / (2.0 * consts.mass));
                LocalWave {
                    psi: log_psi.exp(),
                    grad_log_amplitude: p * g.re,
                    grad_phase: p * g.im,
                    laplacian_ratio: shape,
                    time_log_derivative: shape * dq_dt,
                    vector_potential: Point3::ZERO,
                }
            }
        };
        let f = local.density();
        if !(f > 0.0 && f.is_finite()) {
            return Err(MadelungError::Nodal { point: p });
        }
        Ok(local)
    }

    /// Ψ only; convenient for finite-difference routes.
    pub fn psi(&self, p: Point3, t: f64, consts: &PhysicalConstants) -> Result<Complex64, MadelungError> {
        Ok(self.local(p, t, consts)?.psi)
    }

    /// `∭|Ψ|² dV`, for the normalisable models.
    pub fn normalization_integral(&self, consts: &PhysicalConstants, cfg: &QuadratureConfig) -> Result<f64, MadelungError> {
        if matches!(self, WaveModel::PlaneWave { .. }) {
            return Err(MadelungError::InvalidModel("a plane wave is not normalisable".into()));
        }
        let length = self.characteristic_length(consts);
        // Tail factor e^{-κR} (or e^{-R²/2σ²}) is far below 1e-12 at 60 lengths.
        let region = SphericalRegion::all_space(60.0 * length, 1e-12);
        let model = *self;
        let consts = *consts;
        volume_integral(
            move |p| model.local(p, 0.0, &consts).map(|w| w.density()).unwrap_or(0.0),
            &region,
            cfg,
        )
        .map_err(|e: NumericsError| MadelungError::Numerics(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{fd_gradient, fd_laplacian, FdConfig, FdOrder};

    fn accurate(length: f64) -> FdConfig {
        FdConfig::default().with_order(FdOrder::Fourth).with_richardson(true).with_scale(length)
    }

    fn models() -> Vec<WaveModel> {
        vec![
            WaveModel::central_field(1.0, 1.0, 2, -0.5),
            WaveModel::dirac_string(1.5, 0.8, -1, 0.3),
            WaveModel::PlaneWave { momentum: 0.7, energy: 0.245 },
            WaveModel::FreeGaussian { sigma: 0.9 },
        ]
    }

    /// Analytic ∇Ψ and ΔΨ against finite differences of Ψ itself.
    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let consts = PhysicalConstants::natural();
        let p = Point3::new(0.6, -0.4, 0.5);
        let t = 0.35;
        for model in models() {
            let w = model.local(p, t, &consts).unwrap();
            let cfg = accurate(model.characteristic_length(&consts));
            let re = |q: Point3| model.psi(q, t, &consts).map(|z| z.re).unwrap_or(f64::NAN);
            let im = |q: Point3| model.psi(q, t, &consts).map(|z| z.im).unwrap_or(f64::NAN);
            let grad_re = fd_gradient(&re, p, &cfg).unwrap();
            let grad_im = fd_gradient(&im, p, &cfg).unwrap();
            let analytic = w.gradient_psi();
            for a in 0..3 {
                let fd = Complex64::new(grad_re.component(a), grad_im.component(a));
                assert!((fd - analytic[a]).norm() < 1e-8, "{model:?} axis {a}: {fd} vs {}", analytic[a]);
            }
            let lap_re: f64 = fd_laplacian(&re, p, &cfg).unwrap();
            let lap_im: f64 = fd_laplacian(&im, p, &cfg).unwrap();
            let lap = Complex64::new(lap_re, lap_im);
            let expected = w.laplacian_ratio * w.psi;
            assert!((lap - expected).norm() < 1e-7 * (1.0 + expected.norm()), "{model:?}: {lap} vs {expected}");
            // Time derivative by a central difference in t.
            let dt = 1e-5;
            let fd_t = (model.psi(p, t + dt, &consts).unwrap() - model.psi(p, t - dt, &consts).unwrap()) / (2.0 * dt);
            let expected_t = w.time_log_derivative * w.psi;
            assert!((fd_t - expected_t).norm() < 1e-8, "{model:?}: {fd_t} vs {expected_t}");
        }
    }

    #[test]
    fn vortex_models_are_normalised() {
        let consts = PhysicalConstants::natural();
        for model in [
            WaveModel::central_field(1.0, 1.0, 1, -0.5),
            WaveModel::dirac_string(2.0, 1.5, 1, 0.0),
            WaveModel::FreeGaussian { sigma: 1.3 },
        ] {
            let n = model.normalization_integral(&consts, &QuadratureConfig::gauss(12, 12)).unwrap();
            assert!((n - 1.0).abs() < 1e-6, "{model:?}: {n}");
        }
    }

    #[test]
    fn axis_points_are_rejected() {
        let consts = PhysicalConstants::natural();
        let m = WaveModel::central_field(1.0, 1.0, 1, 0.0);
        let err = m.local(Point3::new(0.0, 0.0, 1.0), 0.0, &consts).unwrap_err();
        assert!(matches!(err, MadelungError::Pole { .. }));
    }

    #[test]
    fn underflowing_density_is_nodal() {
        let consts = PhysicalConstants::natural();
        let m = WaveModel::central_field(1.0, 1.0, 1, 0.0);
        let err = m.local(Point3::new(2000.0, 0.0, 0.0), 0.0, &consts).unwrap_err();
        assert!(matches!(err, MadelungError::Nodal { .. }));
    }

    #[test]
    fn invalid_parameters() {
        assert!(WaveModel::central_field(1.0, 0.0, 1, 0.0).validate().is_err());
        assert!(WaveModel::FreeGaussian { sigma: -1.0 }.validate().is_err());
        assert!(WaveModel::dirac_string(1.0, 1.0, 3, 0.0).validate().is_ok());
    }
}
