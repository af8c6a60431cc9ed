//! Transport of the density along characteristics, the phase-rotation
//! evolution operator and a finite path sum.

mod family;

pub use family::{path_sum, FamilyMember, TrajectoryFamily};

use crate::contour::{ComplexPath, ContourError};
use crate::madelung::{hamiltonian, normalized, MadelungError, PhysicalConstants, Trajectory, WaveModel};
use crate::numerics::{fd_divergence, fd_gradient, FdConfig, NumericsError, Point3, Quadrature, QuadratureConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::io::Write;
use thiserror::Error;

/// A characteristic is aborted when it comes closer to the axis than this
/// fraction of its starting distance.
pub const POLE_APPROACH_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("point {point:?} lies on the OZ axis")]
    Pole { point: Point3 },
    #[error("characteristic approached the axis at step {step}")]
    PoleApproach { step: usize, trace: Vec<Point3> },
    #[error("invalid transport configuration: {0}")]
    InvalidConfig(String),
    #[error("path family is empty")]
    EmptyFamily,
    #[error("family paths do not share end points (gap {gap:e})")]
    EndpointMismatch { gap: f64 },
    #[error("characteristic CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Madelung(#[from] MadelungError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl From<csv::Error> for TransportError {
    fn from(e: csv::Error) -> Self {
        TransportError::Csv(e.to_string())
    }
}

/// `dρ/dt = −⟨v⟩ = (ħk/m)(y, −x, 0)/ρ²`.
pub fn characteristic_rhs(p: Point3, k: i32, consts: &PhysicalConstants) -> Result<Point3, TransportError> {
    let rho2 = p.x * p.x + p.y * p.y;
    if !(rho2 > 0.0) {
        return Err(TransportError::Pole { point: p });
    }
    let c = consts.hbar * f64::from(k) / (consts.mass * rho2);
    Ok(Point3::new(c * p.y, -c * p.x, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Characteristic {
    pub start: Point3,
    pub k: i32,
    pub times: Vec<f64>,
    pub positions: Vec<Point3>,
    pub densities: Vec<f64>,
    /// Largest `|ρ(t) − ρ(0)|/ρ(0)`.
    pub radius_drift: f64,
    /// `(max f − min f)/f(start)`.
    pub density_spread: f64,
    /// `2π` over the mean angular speed, from the unwrapped azimuth. Needs at
    /// least half a turn.
    pub measured_period: Option<f64>,
}

impl Characteristic {
    /// `2πmρ₀²/(ħ|k|)`; `None` for a resting trajectory.
    pub fn expected_period(&self, consts: &PhysicalConstants) -> Option<f64> {
        (self.k != 0).then(|| {
            let rho = self.start.rho();
            TAU * consts.mass * rho * rho / (consts.hbar * f64::from(self.k.abs()))
        })
    }

    /// `t,x,y,z,f` rows with a header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), TransportError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "x", "y", "z", "f"])?;
        for ((t, p), f) in self.times.iter().zip(&self.positions).zip(&self.densities) {
            w.write_record([t, &p.x, &p.y, &p.z, f].map(|v| format!("{v:.14e}")))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Fixed-step RK4 along `dρ/dt = −⟨v⟩` for `revolutions` periods.
pub fn integrate_characteristic<F>(
    start: Point3,
    k: i32,
    consts: &PhysicalConstants,
    steps_per_revolution: usize,
    revolutions: f64,
    density: F,
) -> Result<Characteristic, TransportError>
where
    F: Fn(Point3) -> f64,
{
    if steps_per_revolution < 64 {
        return Err(TransportError::InvalidConfig(format!("{steps_per_revolution} steps per revolution is below 64")));
    }
    if !(revolutions > 0.0 && revolutions.is_finite()) {
        return Err(TransportError::InvalidConfig(format!("revolutions must be positive, got {revolutions}")));
    }
    let rho0 = start.rho();
    if !(rho0 > 0.0) {
        return Err(TransportError::Pole { point: start });
    }
    // A resting trajectory still gets a time grid, scaled as if |k| = 1.
    let period = TAU * consts.mass * rho0 * rho0 / (consts.hbar * f64::from(k.unsigned_abs().max(1)));
    let steps = (steps_per_revolution as f64 * revolutions).round() as usize;
    let dt = period / steps_per_revolution as f64;
    let rhs = |p: Point3| characteristic_rhs(p, k, consts);

    let mut times = Vec::with_capacity(steps + 1);
    let mut positions = Vec::with_capacity(steps + 1);
    let mut p = start;
    times.push(0.0);
    positions.push(p);
    for step in 1..=steps {
        let k1 = rhs(p)?;
        let k2 = rhs(p + k1 * (0.5 * dt))?;
        let k3 = rhs(p + k2 * (0.5 * dt))?;
        let k4 = rhs(p + k3 * dt)?;
        p = p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        if p.rho() < POLE_APPROACH_FRACTION * rho0 {
            positions.push(p);
            return Err(TransportError::PoleApproach { step, trace: positions });
        }
        times.push(step as f64 * dt);
        positions.push(p);
    }

    let densities: Vec<f64> = positions.iter().map(|&q| density(q)).collect();
    let radius_drift = positions.iter().map(|q| (q.rho() - rho0).abs() / rho0).fold(0.0, f64::max);
    let (lo, hi) = densities.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &f| (lo.min(f), hi.max(f)));
    let density_spread = normalized(hi - lo, &[densities[0]]);

    // Mean angular speed from the unwrapped azimuth.
    let turned: f64 = positions
        .windows(2)
        .map(|w| (w[1].azimuth() - w[0].azimuth() + PI).rem_euclid(TAU) - PI)
        .sum();
    let elapsed = times[times.len() - 1];
    let measured_period = (k != 0 && turned.abs() > PI).then(|| TAU * elapsed / turned.abs());
    Ok(Characteristic { start, k, times, positions, densities, radius_drift, density_spread, measured_period })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryResidual {
    /// Largest `|(⟨v⟩, ∇f)|` over `|⟨v⟩|·max(|∇f|, f/ℓ)`.
    pub flow: f64,
    /// Largest normalised `|div(f∇u)|` with `u` the azimuthal angle.
    pub divergence: f64,
}

impl StationaryResidual {
    pub fn max(&self) -> f64 {
        self.flow.max(self.divergence)
    }
}

/// Checks that a density profile is stationary under the vortex flow
/// `⟨v⟩ = (ħk/mρ) e_ϕ`.
pub fn stationary_continuity_residual<F>(
    density: F,
    k: i32,
    samples: &[Point3],
    consts: &PhysicalConstants,
    cfg: &FdConfig,
) -> Result<StationaryResidual, TransportError>
where
    F: Fn(Point3) -> f64,
{
    let mut out = StationaryResidual { flow: 0.0, divergence: 0.0 };
    let speed = consts.hbar * f64::from(k) / consts.mass;
    for &p in samples {
        let rho = p.rho();
        if !(rho > 0.0) {
            return Err(TransportError::Pole { point: p });
        }
        let f = density(p);
        let grad = fd_gradient(&density, p, cfg)?;
        let v = p.e_phi() * (speed / rho);
        // f/ℓ keeps the scale finite where ∇f vanishes.
        let flow = normalized(v.dot(grad), &[v.norm() * grad.norm(), v.norm() * f / cfg.scale]);
        let flux = |q: Point3| q.e_phi() * (density(q) / q.rho());
        let div = fd_divergence(&flux, p, cfg)?;
        let divergence = normalized(div, &[grad.norm() / rho, f / (rho * rho)]);
        out.flow = out.flow.max(flow);
        out.divergence = out.divergence.max(divergence);
    }
    Ok(out)
}

/// `ψ·e^{iΔφ}`.
pub fn evolution_rotate(psi: Complex64, delta_phi: f64) -> Complex64 {
    psi * Complex64::from_polar(1.0, delta_phi)
}

/// `Ψ₁₂ = ψ2/ψ1`, the operator that carries `ψ1` into `ψ2`.
pub fn evolution_operator(psi1: Complex64, psi2: Complex64) -> Complex64 {
    psi2 / psi1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionPhase {
    /// `S̃₁₂/ħ = (∫(⟨p_p⟩, dr) − ∫H̃dτ)/ħ`.
    pub action_over_hbar: f64,
    pub h_integral: f64,
    pub p_dr_integral: f64,
    /// Branch-tracked `ΔΦ₁₂/2` of `Ψ(r(t), t)` between the end points.
    pub endpoint_half_phase: f64,
}

impl EvolutionPhase {
    pub fn gap(&self) -> f64 {
        (self.action_over_hbar - self.endpoint_half_phase).abs()
    }
}

pub fn evolution_phase(
    model: &WaveModel,
    traj: &Trajectory,
    t1: f64,
    t2: f64,
    consts: &PhysicalConstants,
    cfg: &QuadratureConfig,
) -> Result<EvolutionPhase, TransportError> {
    let quad = Quadrature::new(cfg)?;
    let h_integral = quad.try_integrate(t1, t2, |t| hamiltonian(model, traj.position(t), t, consts))?;
    let p_dr_integral = quad.try_integrate(t1, t2, |t| -> Result<f64, MadelungError> {
        let fields = crate::madelung::decompose(model, traj.position(t), t, consts)?;
        Ok((fields.potential_velocity * consts.mass).dot(traj.velocity(t)))
    })?;
    let (m, tr, c) = (*model, *traj, *consts);
    let psi_path = ComplexPath::from_fn(
        move |t| m.psi(tr.position(t), t, &c).unwrap_or(Complex64::new(0.0, 0.0)),
        t1,
        t2,
        64,
    )?;
    Ok(EvolutionPhase {
        action_over_hbar: (p_dr_integral - h_integral) / consts.hbar,
        h_integral,
        p_dr_integral,
        endpoint_half_phase: psi_path.total_phase()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::FdOrder;

    #[test]
    fn rhs_examples() {
        let c = PhysicalConstants::natural();
        assert_eq!(characteristic_rhs(Point3::new(1.0, 0.0, 0.0), 1, &c).unwrap(), Point3::new(0.0, -1.0, 0.0));
        assert_eq!(characteristic_rhs(Point3::new(1.0, 0.0, 0.0), 0, &c).unwrap(), Point3::new(0.0, -0.0, 0.0));
        assert_eq!(characteristic_rhs(Point3::new(0.0, 2.0, 0.0), 1, &c).unwrap(), Point3::new(0.5, 0.0, 0.0));
        assert!(characteristic_rhs(Point3::new(0.0, 0.0, 1.0), 1, &c).is_err());
    }

    #[test]
    fn one_revolution_closes() {
        let c = PhysicalConstants::natural();
        let model = WaveModel::central_field(1.0, 1.0, 1, -0.5);
        let start = Point3::new(1.0, 0.0, 0.0);
        let ch = integrate_characteristic(start, 1, &c, 1024, 1.0, |p| model.local(p, 0.0, &c).unwrap().density()).unwrap();
        let end = *ch.positions.last().unwrap();
        assert!((end - start).norm() < 1e-8, "{end:?}");
        assert!(ch.radius_drift < 1e-8 && ch.density_spread < 1e-8, "{ch:?}");
        let t = ch.expected_period(&c).unwrap();
        assert!((ch.measured_period.unwrap() - t).abs() < 1e-8 * t);
    }

    #[test]
    fn resting_characteristic() {
        let c = PhysicalConstants::natural();
        let ch = integrate_characteristic(Point3::new(0.5, 0.5, 1.0), 0, &c, 64, 1.0, |_| 1.0).unwrap();
        assert!(ch.positions.iter().all(|&p| p == Point3::new(0.5, 0.5, 1.0)));
        assert_eq!(ch.measured_period, None);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let c = PhysicalConstants::natural();
        let drift = |n| integrate_characteristic(Point3::new(0.8, 0.6, 0.0), 2, &c, n, 10.0, |_| 1.0).unwrap().radius_drift;
        let (coarse, fine) = (drift(64), drift(128));
        assert!(drift(1024) < 1e-7);
        let order = (coarse / fine).log2();
        assert!(order > 3.5, "{coarse} {fine} {order}");
    }

    #[test]
    fn radial_densities_are_stationary() {
        let c = PhysicalConstants::natural();
        let cfg = FdConfig::default().with_order(FdOrder::Fourth);
        let points = [Point3::new(0.4, -0.9, 0.3), Point3::new(-1.5, 0.2, -0.8), Point3::new(0.1, 0.3, 2.0)];
        let model = WaveModel::central_field(1.0, 1.0, 1, -0.5);
        let good = stationary_continuity_residual(|p| model.local(p, 0.0, &c).unwrap().density(), 1, &points, &c, &cfg).unwrap();
        assert!(good.max() < 1e-6, "{good:?}");
        let flat = stationary_continuity_residual(|_| 0.3, 2, &points, &c, &cfg).unwrap();
        assert_eq!(flat.flow, 0.0);
        assert!(flat.divergence < 1e-9, "{flat:?}");
        let control = stationary_continuity_residual(|p| p.x, 1, &points, &c, &cfg).unwrap();
        assert!(control.max() > 1e6 * good.max().max(1e-12), "{control:?}");
    }

    #[test]
    fn rotation_properties() {
        let psi = Complex64::from_polar(0.7, 0.3);
        assert_eq!(evolution_rotate(psi, 0.0), psi);
        let rotated = evolution_rotate(psi, 1.1);
        assert!((rotated - Complex64::from_polar(0.7, 1.4)).norm() < 1e-15);
        assert!((evolution_rotate(psi, TAU) - psi).norm() < 1e-15);
        let twice = evolution_rotate(evolution_rotate(psi, 0.4), 2.9);
        assert!((twice - evolution_rotate(psi, 3.3)).norm() < 1e-15);
        let op = evolution_operator(psi, rotated);
        assert!((op * psi - rotated).norm() < 1e-15);
    }

    #[test]
    fn evolution_phase_on_an_arc() {
        let c = PhysicalConstants::natural();
        let energy = -0.5;
        let model = WaveModel::central_field(1.0, 1.0, 2, energy);
        let start = Point3::new(1.1, 0.0, 0.2);
        let traj = Trajectory::flow_line(&model, start, 0.0, &c).unwrap();
        let omega = 2.0 / (1.1 * 1.1);
        let cfg = QuadratureConfig::gauss(16, 8);
        let dt = 0.9;
        let e = evolution_phase(&model, &traj, 0.0, dt, &c, &cfg).unwrap();
        assert!((e.action_over_hbar - (2.0 * omega * dt - energy * dt)).abs() < 1e-12, "{e:?}");
        assert!(e.gap() < 1e-12);
        // Three full turns: the winding adds 2πk per turn.
        let t3 = 3.0 * TAU / omega;
        let e = evolution_phase(&model, &traj, 0.0, t3, &c, &cfg).unwrap();
        assert!((e.action_over_hbar - (3.0 * 2.0 * TAU - energy * t3)).abs() < 1e-10);
        assert!(e.gap() < 1e-10, "{e:?}");
        let rest = evolution_phase(&model, &Trajectory::Static { point: start }, 0.0, 2.0, &c, &cfg).unwrap();
        assert!((rest.action_over_hbar - PI.mul_add(0.0, -energy * 2.0)).abs() < 1e-13);
    }
}
