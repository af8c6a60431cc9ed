//! Paths in the complex plane, winding numbers and the complex action.
//!
//! `∫ dξ/ξ` along a path is the branch-tracked logarithm of the end-point
//! ratio. Any multivalued answer here comes from a concrete path or an
//! explicit sheet index; nothing silently picks the principal branch except
//! [`principal_log_ratio`], which says so in its name.

mod path;

pub use path::{ComplexPath, MODULUS_RATIO, NEAR_POLE, UNWRAP_THRESHOLD, WINDING_RESIDUE};

use crate::madelung::{divergence_q, lagrangian, MadelungError, PhysicalConstants, Trajectory, WaveModel};
use crate::numerics::{NumericsError, Quadrature, QuadratureConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error("path passes within {NEAR_POLE:e} of the origin near tau = {tau} (xi = {xi})")]
    NearPole { tau: f64, xi: Complex64 },
    #[error("winding number requested for an open path")]
    NotClosed,
    #[error("winding number is not an integer: rounding residue {residue:e}")]
    UnresolvedWinding { residue: f64 },
    #[error("path end points do not match the requested values (gap {gap:e})")]
    EndpointMismatch { gap: f64 },
    #[error("a path needs at least two samples")]
    TooFewSamples,
    #[error("path CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Madelung(#[from] MadelungError),
}

impl From<csv::Error> for ContourError {
    fn from(e: csv::Error) -> Self {
        ContourError::Csv(e.to_string())
    }
}

/// `Ln(ψ2/ψ1)` on the sheet `sheet`: the principal value plus `2πi·sheet`.
pub fn log_ratio_on_sheet(psi1: Complex64, psi2: Complex64, sheet: i64) -> Complex64 {
    principal_log_ratio(psi1, psi2) + Complex64::new(0.0, TAU * sheet as f64)
}

pub fn principal_log_ratio(psi1: Complex64, psi2: Complex64) -> Complex64 {
    (psi2 / psi1).ln()
}

/// `Z₁₂ = (S₁₂ + iΦ₁₂)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Z12 {
    pub value: Complex64,
    pub psi12: Complex64,
    /// `ln|Ψ₁₂|²`.
    pub s12: f64,
    /// Branch-tracked `Φ₁₂ = 2 Im Z₁₂`.
    pub phi12: f64,
}

/// `Z₁₂ = ∫ dξ/ξ` along a path from `psi1` to `psi2`.
pub fn z12(psi1: Complex64, psi2: Complex64, path: &ComplexPath, cfg: &QuadratureConfig) -> Result<Z12, ContourError> {
    for (want, got) in [(psi1, path.start()), (psi2, path.end())] {
        let gap = (want - got).norm();
        if gap > NEAR_POLE * want.norm().max(1.0) {
            return Err(ContourError::EndpointMismatch { gap });
        }
    }
    let value = path.log_integral(cfg)?;
    let psi12 = psi2 / psi1;
    Ok(Z12 { value, psi12, s12: psi12.norm_sqr().ln(), phi12: 2.0 * value.im })
}

/// Distance between two logarithms once their imaginary parts are reduced
/// modulo 2π.
pub fn distance_mod_2pi_i(a: Complex64, b: Complex64) -> f64 {
    let d = a - b;
    let im = d.im - TAU * (d.im / TAU).round();
    Complex64::new(d.re, im).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexAction {
    /// `−½∫Q dτ`.
    pub re_z: f64,
    /// `(1/ħ)∫L̃ dτ`.
    pub im_z: f64,
    pub q_integral: f64,
    pub l_integral: f64,
    /// Principal `Ln(Ψ(r₂,t₂)/Ψ(r₁,t₁))`.
    pub endpoint: Complex64,
    /// `|re_z + i·im_z − endpoint|` modulo 2πi.
    pub endpoint_gap: f64,
}

/// Splits the complex action along a physical trajectory into its
/// log-density and classical-action parts. The log-density part equals
/// `−½∫Q` on flow lines of the model.
pub fn complex_action_decompose(
    model: &WaveModel,
    traj: &Trajectory,
    t1: f64,
    t2: f64,
    consts: &PhysicalConstants,
    cfg: &QuadratureConfig,
) -> Result<ComplexAction, ContourError> {
    let quad = Quadrature::new(cfg)?;
    let q_integral = quad.try_integrate(t1, t2, |t| divergence_q(model, traj.position(t), t, consts))?;
    let l_integral = quad.try_integrate(t1, t2, |t| lagrangian(model, traj, t, consts))?;
    let re_z = -0.5 * q_integral;
    let im_z = l_integral / consts.hbar;
    let psi1 = model.psi(traj.position(t1), t1, consts)?;
    let psi2 = model.psi(traj.position(t2), t2, consts)?;
    let endpoint = principal_log_ratio(psi1, psi2);
    Ok(ComplexAction {
        re_z,
        im_z,
        q_integral,
        l_integral,
        endpoint,
        endpoint_gap: distance_mod_2pi_i(Complex64::new(re_z, im_z), endpoint),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangianCheck {
    /// `(ṙ, p_p) − H̃`.
    pub legendre: f64,
    /// `ħ·d(arg Ψ(r(t), t))/dt` by a fourth-order difference in time.
    pub phase_rate: f64,
}

impl LagrangianCheck {
    pub fn relative_gap(&self) -> f64 {
        crate::madelung::normalized(self.legendre - self.phase_rate, &[self.legendre, self.phase_rate])
    }
}

/// The Lagrangian along a trajectory by two routes: the Legendre transform of
/// the Hamilton function and the rate of change of the phase of Ψ.
pub fn lagrangian_on_path(
    model: &WaveModel,
    traj: &Trajectory,
    t: f64,
    consts: &PhysicalConstants,
) -> Result<LagrangianCheck, ContourError> {
    let legendre = lagrangian(model, traj, t, consts)?;
    let length = model.characteristic_length(consts);
    let h = 1e-4 * consts.mass * length * length / consts.hbar;
    let center = model.psi(traj.position(t), t, consts)?;
    let phase = |dt: f64| -> Result<f64, MadelungError> {
        let tt = t + dt;
        Ok((model.psi(traj.position(tt), tt, consts)? / center).arg())
    };
    let rate = (8.0 * (phase(h)? - phase(-h)?) - (phase(2.0 * h)? - phase(-2.0 * h)?)) / (12.0 * h);
    Ok(LagrangianCheck { legendre, phase_rate: consts.hbar * rate })
}

/// `|½∫_{1/Ψ₁₂}^{Ψ₁₂} dξ/ξ − ∫_1^{Ψ₁₂} dξ/ξ|`, both along the spiral
/// `ξ(s) = e^{s·Ln Ψ₁₂}`, which keeps the two paths in matching classes.
pub fn mirror_identity_check(psi12: Complex64, cfg: &QuadratureConfig) -> Result<f64, ContourError> {
    if psi12.norm() < NEAR_POLE {
        return Err(ContourError::NearPole { tau: 0.0, xi: psi12 });
    }
    let l = psi12.ln();
    let n = 2 + (l.norm() / (PI / 8.0)).ceil() as usize;
    let symmetric = ComplexPath::from_fn(move |s| (l * s).exp(), -1.0, 1.0, 2 * n)?;
    let forward = ComplexPath::from_fn(move |s| (l * s).exp(), 0.0, 1.0, n)?;
    let lhs = symmetric.log_integral(cfg)? * 0.5;
    let rhs = forward.log_integral(cfg)?;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Point3;
    use std::f64::consts::FRAC_PI_4;

    fn gl() -> QuadratureConfig {
        QuadratureConfig::gauss(2, 12)
    }

    #[test]
    fn z12_examples() {
        let one = Complex64::new(1.0, 0.0);
        let target = Complex64::from_polar(1.0, FRAC_PI_4);
        let arc = ComplexPath::from_fn(|t| Complex64::from_polar(1.0, t), 0.0, FRAC_PI_4, 2).unwrap();
        let z = z12(one, target, &arc, &gl()).unwrap();
        assert!((z.value - Complex64::new(0.0, FRAC_PI_4)).norm() < 1e-14);
        assert!(z.s12.abs() < 1e-15);
        let null = ComplexPath::from_points(&[target, target], false).unwrap();
        assert_eq!(z12(target, target, &null, &gl()).unwrap().value, Complex64::new(0.0, 0.0));
        let real = ComplexPath::segment(one, Complex64::new(2.0, 0.0), 1).unwrap();
        let z = z12(one, Complex64::new(2.0, 0.0), &real, &gl()).unwrap();
        assert!((z.value.re - 2f64.ln()).abs() < 1e-14);
        assert!((0.5 * z.s12 - z.value.re).abs() < 1e-14);
        assert!(matches!(z12(one, target, &real, &gl()).unwrap_err(), ContourError::EndpointMismatch { .. }));
    }

    #[test]
    fn sheets_are_explicit() {
        let a = Complex64::new(1.0, 0.0);
        let b = Complex64::new(-1.0, 1e-3);
        let z = log_ratio_on_sheet(a, b, -1);
        assert!((z.im - (b.arg() - TAU)).abs() < 1e-15);
        assert!(distance_mod_2pi_i(z, principal_log_ratio(a, b)) < 1e-15);
    }

    #[test]
    fn action_along_a_vortex_orbit() {
        let consts = PhysicalConstants::natural();
        let energy = -0.5;
        let model = WaveModel::central_field(1.0, 1.0, 1, energy);
        let start = Point3::new(1.2, 0.0, 0.3);
        let traj = Trajectory::flow_line(&model, start, 0.0, &consts).unwrap();
        let t2 = 2.5;
        let a = complex_action_decompose(&model, &traj, 0.0, t2, &consts, &QuadratureConfig::gauss(8, 10)).unwrap();
        let omega = 1.0 / (1.2 * 1.2);
        assert!(a.re_z.abs() < 1e-15);
        assert!((a.im_z - (omega * t2 - energy * t2)).abs() < 1e-12, "{a:?}");
        assert!(a.endpoint_gap < 1e-6);
        let rest = Trajectory::Static { point: start };
        let a = complex_action_decompose(&model, &rest, 0.0, t2, &consts, &gl()).unwrap();
        // Off a flow line the phase still follows L̃ = −E.
        assert!((a.im_z + energy * t2).abs() < 1e-12);
        assert!(a.endpoint_gap < 1e-12);
    }

    #[test]
    fn spreading_packet_action_matches_end_points() {
        let consts = PhysicalConstants::natural();
        let model = WaveModel::FreeGaussian { sigma: 0.8 };
        let traj = Trajectory::flow_line(&model, Point3::new(0.5, -0.2, 0.9), 0.0, &consts).unwrap();
        let a = complex_action_decompose(&model, &traj, 0.0, 3.0, &consts, &QuadratureConfig::gauss(8, 10)).unwrap();
        assert!(a.re_z < 0.0);
        assert!(a.endpoint_gap < 1e-9, "{a:?}");
    }

    #[test]
    fn lagrangian_two_routes() {
        let consts = PhysicalConstants::natural();
        let model = WaveModel::central_field(1.0, 1.0, 2, -0.5);
        let traj = Trajectory::flow_line(&model, Point3::new(0.9, 0.4, 0.0), 0.0, &consts).unwrap();
        let c = lagrangian_on_path(&model, &traj, 0.7, &consts).unwrap();
        let rho2 = 0.81 + 0.16;
        assert!((c.legendre - (4.0 / rho2 + 0.5)).abs() < 1e-13);
        assert!(c.relative_gap() < 1e-8, "{c:?}");
        let rest = lagrangian_on_path(&model, &Trajectory::Static { point: Point3::new(1.0, 1.0, 0.0) }, 0.0, &consts).unwrap();
        assert!((rest.legendre - 0.5).abs() < 1e-14);
        let plane = WaveModel::PlaneWave { momentum: 1.5, energy: 1.125 };
        let traj = Trajectory::flow_line(&plane, Point3::new(0.0, 0.0, 0.0), 0.0, &consts).unwrap();
        let c = lagrangian_on_path(&plane, &traj, 0.2, &consts).unwrap();
        assert!((c.legendre - (1.5 * 1.5 - 1.125)).abs() < 1e-13);
        assert!(c.relative_gap() < 1e-8);
    }

    #[test]
    fn mirror_identity() {
        for psi12 in [Complex64::from_polar(1.0, FRAC_PI_4), Complex64::new(1.0, 0.0), Complex64::from_polar(2.0, PI / 6.0)] {
            let r = mirror_identity_check(psi12, &gl()).unwrap();
            assert!(r < 1e-9, "{psi12}: {r}");
        }
    }
}
