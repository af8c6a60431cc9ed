//! Hydrodynamic decomposition of a wave field.
//!
//! A field `Ψ = √f e^{iφ}` is split into the density `f`, its logarithm
//! `S = ln f`, the velocity potential `Φ = 2φ + 2πn` and the flow velocity
//! `⟨v⟩ = −α∇Φ + γA`. Every identity below is evaluated pointwise as a
//! residual so it can be checked at random points.
//!
//! Pointwise queries always return the principal phase with branch index
//! `n = 0`; branch tracking is a property of a path and lives in
//! [`crate::contour`].

mod constants;
mod model;
mod trajectory;

pub use constants::{PhysicalConstants, UnitSystem};
pub use model::{LocalWave, WaveModel, POLE_EXCLUSION_FRACTION};
pub use trajectory::Trajectory;

use crate::numerics::{fd_divergence, fd_gradient, fd_laplacian, fd_partial, FdConfig, NumericsError, Point3, Quadrature, QuadratureConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI, TAU};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MadelungError {
    #[error("density vanishes at {point:?}")]
    Nodal { point: Point3 },
    #[error("point {point:?} lies within {radius:e} of the OZ axis pole")]
    Pole { point: Point3, radius: f64 },
    #[error("finite-difference stencil at {point:?} crosses the phase branch cut")]
    BranchCut { point: Point3 },
    #[error("invalid wave model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Hydrodynamic fields at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MadelungFields {
    pub density: f64,
    /// `S = ln f`.
    pub log_density: f64,
    /// Principal phase of Ψ in `[0, 2π)`.
    pub phase: f64,
    pub branch: i64,
    /// `Φ = 2φ + 2πn`.
    pub velocity_potential: f64,
    pub velocity: Point3,
    pub potential_velocity: Point3,
    pub solenoidal_velocity: Point3,
    pub vector_potential: Point3,
    /// `Q = div⟨v⟩`.
    pub divergence: f64,
}

impl MadelungFields {
    fn from_local(w: &LocalWave, consts: &PhysicalConstants) -> Self {
        let density = w.density();
        let phase = w.psi.arg().rem_euclid(TAU);
        let potential_velocity = w.grad_phase * (-2.0 * consts.alpha());
        let solenoidal_velocity = w.vector_potential * consts.gamma();
        Self {
            density,
            log_density: density.ln(),
            phase,
            branch: 0,
            velocity_potential: 2.0 * phase,
            velocity: potential_velocity + solenoidal_velocity,
            potential_velocity,
            solenoidal_velocity,
            vector_potential: w.vector_potential,
            // The vector potentials used here are all divergence-free.
            divergence: -2.0 * consts.alpha() * w.phase_laplacian(),
        }
    }
}

/// How spatial derivatives of Ψ are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Derivatives {
    Analytic,
    FiniteDifference(FdConfig),
}

pub fn decompose(model: &WaveModel, p: Point3, t: f64, consts: &PhysicalConstants) -> Result<MadelungFields, MadelungError> {
    let w = model.local(p, t, consts)?;
    Ok(MadelungFields::from_local(&w, consts))
}

/// `Q = div⟨v⟩` from the analytic derivatives.
pub fn divergence_q(model: &WaveModel, p: Point3, t: f64, consts: &PhysicalConstants) -> Result<f64, MadelungError> {
    Ok(decompose(model, p, t, consts)?.divergence)
}

/// `Q` by finite differences of the velocity field.
pub fn divergence_q_fd(model: &WaveModel, p: Point3, t: f64, consts: &PhysicalConstants, cfg: &FdConfig) -> Result<f64, MadelungError> {
    decompose(model, p, t, consts)?;
    let velocity = |q: Point3| {
        decompose(model, q, t, consts)
            .map(|m| m.velocity)
            .unwrap_or(Point3::new(f64::NAN, f64::NAN, f64::NAN))
    };
    Ok(fd_divergence(&velocity, p, cfg)?)
}

/// Normalised `|∂f/∂t + div(f⟨v⟩)|`. The time derivative is analytic, the
/// divergence is a finite difference of the flux `f⟨v⟩`.
pub fn continuity_residual(model: &WaveModel, p: Point3, t: f64, consts: &PhysicalConstants, cfg: &FdConfig) -> Result<f64, MadelungError> {
    let w = model.local(p, t, consts)?;
    let fields = MadelungFields::from_local(&w, consts);
    let df_dt = fields.density * 2.0 * w.time_log_derivative.re;
    let flux = |q: Point3| {
        decompose(model, q, t, consts)
            .map(|m| m.velocity * m.density)
            .unwrap_or(Point3::new(f64::NAN, f64::NAN, f64::NAN))
    };
    let div = fd_divergence(&flux, p, cfg)?;
    let length = model.characteristic_length(consts);
    Ok(normalized(df_dt + div, &[df_dt, div, fields.density * fields.velocity.norm() / length]))
}

pub fn normalized(residual: f64, scales: &[f64]) -> f64 {
    let scale = scales.iter().fold(0.0f64, |acc, s| acc.max(s.abs()));
    if residual == 0.0 {
        0.0
    } else if scale > 0.0 {
        residual.abs() / scale
    } else {
        f64::INFINITY
    }
}

/// Bohm quantum potential `−(ħ²/2m) Δ√f/√f`.
pub fn quantum_potential(model: &WaveModel, p: Point3, t: f64, consts: &PhysicalConstants) -> Result<f64, MadelungError> {
    let w = model.local(p, t, consts)?;
    Ok(quantum_potential_of(&w, consts))
}

fn quantum_potential_of(w: &LocalWave, consts: &PhysicalConstants) -> f64 {
    consts.alpha() / consts.beta() * w.amplitude_laplacian_ratio()
}

fn potential_u_of(w: &LocalWave, consts: &PhysicalConstants) -> f64 {
    let dphase_dt = w.time_log_derivative.im;
    let grad2 = w.grad_phase.dot(w.grad_phase);
    -(dphase_dt
        + consts.alpha() * (w.amplitude_laplacian_ratio() - grad2)
        + consts.gamma() * w.vector_potential.dot(w.grad_phase))
        / consts.beta()
}

/// The potential `U` that makes Ψ satisfy the Pauli-type equation.
pub fn potential_u(model: &WaveModel, p: Point3, t: f64, consts: &PhysicalConstants) -> Result<f64, MadelungError> {
    let w = model.local(p, t, consts)?;
    Ok(potential_u_of(&w, consts))
}

fn classical_potential_of(w: &LocalWave, consts: &PhysicalConstants) -> f64 {
    let ga = w.vector_potential * consts.gamma();
    -0.5 * consts.mass * ga.dot(ga) + potential_u_of(w, consts) + quantum_potential_of(w, consts)
}

/// Classical potential energy `eχ`.
pub fn classical_potential_chi(model: &WaveModel, p: Point3, t: f64, consts: &PhysicalConstants) -> Result<f64, MadelungError> {
    let w = model.local(p, t, consts)?;
    Ok(classical_potential_of(&w, consts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBalance {
    /// `W = m|⟨v⟩|²/2 + eχ`.
    pub total_energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    /// Normalised `|(ħ/2)∂Φ/∂t + H|`.
    pub hj_residual: f64,
}

pub fn energy_and_hj(model: &WaveModel, p: Point3, t: f64, consts: &PhysicalConstants) -> Result<EnergyBalance, MadelungError> {
    let w = model.local(p, t, consts)?;
    let fields = MadelungFields::from_local(&w, consts);
    let kinetic = 0.5 * consts.mass * fields.velocity.dot(fields.velocity);
    let potential = classical_potential_of(&w, consts);
    let total = kinetic + potential;
    let time_term = consts.hbar * w.time_log_derivative.im;
    Ok(EnergyBalance {
        total_energy: total,
        kinetic,
        potential,
        hj_residual: normalized(time_term + total, &[time_term, kinetic, potential]),
    })
}

/// Hamilton function `H̃ = |p_p|²/2m + (p_p, v_s) + m|v_s|²/2 + eχ`.
pub fn hamiltonian(model: &WaveModel, p: Point3, t: f64, consts: &PhysicalConstants) -> Result<f64, MadelungError> {
    let w = model.local(p, t, consts)?;
    let fields = MadelungFields::from_local(&w, consts);
    let m = consts.mass;
    let pp = fields.potential_velocity * m;
    let vs = fields.solenoidal_velocity;
    Ok(pp.dot(pp) / (2.0 * m) + pp.dot(vs) + 0.5 * m * vs.dot(vs) + classical_potential_of(&w, consts))
}

/// Lagrangian `L̃ = (ṙ, p_p) − H̃` along a trajectory, by Legendre transform.
/// On a flow line `ṙ = ⟨v⟩`.
pub fn lagrangian(model: &WaveModel, traj: &Trajectory, t: f64, consts: &PhysicalConstants) -> Result<f64, MadelungError> {
    let p = traj.position(t);
    let fields = decompose(model, p, t, consts)?;
    let momentum = fields.potential_velocity * consts.mass;
    Ok(traj.velocity(t).dot(momentum) - hamiltonian(model, p, t, consts)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionPhaseCheck {
    /// Spread of `ħΦ/2 − ∫L̃dt` over the samples.
    pub spread: f64,
    /// `ħΔΦ/2` between the end points, branch-tracked.
    pub phase_action: f64,
    /// `∫L̃dt` over the whole interval.
    pub action: f64,
    pub samples: usize,
}

impl ActionPhaseCheck {
    pub fn relative_spread(&self) -> f64 {
        normalized(self.spread, &[self.phase_action])
    }
}

/// Compares the branch-tracked phase of Ψ along `traj` with the integrated
/// Lagrangian. Sampling is doubled until neighbouring phase steps stay below
/// π/4.
pub fn action_phase_check(
    model: &WaveModel,
    traj: &Trajectory,
    t1: f64,
    t2: f64,
    consts: &PhysicalConstants,
    samples: usize,
) -> Result<ActionPhaseCheck, MadelungError> {
    const MAX_SAMPLES: usize = 1 << 20;
    let mut n = samples.max(2);
    let (times, psis) = loop {
        let times: Vec<f64> = (0..=n).map(|i| t1 + (t2 - t1) * i as f64 / n as f64).collect();
        let psis = times
            .iter()
            .map(|&t| model.psi(traj.position(t), t, consts))
            .collect::<Result<Vec<_>, _>>()?;
        let coarse = psis.windows(2).any(|w| (w[1] / w[0]).arg().abs() >= FRAC_PI_4);
        if !coarse {
            break (times, psis);
        }
        if n >= MAX_SAMPLES {
            return Err(MadelungError::InvalidModel(format!(
                "phase along the trajectory is unresolved at {n} samples"
            )));
        }
        n *= 2;
    };
    let quad = Quadrature::new(&QuadratureConfig::gauss(1, 8))?;
    let mut phase = psis[0].arg();
    let mut action = 0.0;
    let offset = consts.hbar * phase;
    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    for i in 0..n {
        phase += (psis[i + 1] / psis[i]).arg();
        action += quad.try_integrate(times[i], times[i + 1], |t| lagrangian(model, traj, t, consts))?;
        let d = consts.hbar * phase - offset - action;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok(ActionPhaseCheck {
        spread: hi - lo,
        phase_action: consts.hbar * phase - offset,
        action,
        samples: n,
    })
}

/// Normalised residual of `iħ∂Ψ/∂t + (ħ²/2m)ΔΨ + (q_e/m)(A, p̂)Ψ − UΨ` with
/// the module's own `U`.
pub fn schrodinger_residual(
    model: &WaveModel,
    p: Point3,
    t: f64,
    consts: &PhysicalConstants,
    derivatives: Derivatives,
) -> Result<f64, MadelungError> {
    let w = model.local(p, t, consts)?;
    let psi = w.psi;
    let (laplacian, gradient) = match derivatives {
        Derivatives::Analytic => (w.laplacian_ratio * psi, w.gradient_psi()),
        Derivatives::FiniteDifference(cfg) => {
            let field = |q: Point3| model.psi(q, t, consts).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            let lap: Complex64 = fd_laplacian(&field, p, &cfg)?;
            let grad = [
                fd_partial(&field, p, 0, &cfg)?,
                fd_partial(&field, p, 1, &cfg)?,
                fd_partial(&field, p, 2, &cfg)?,
            ];
            (lap, grad)
        }
    };
    let i = Complex64::i();
    let hbar = consts.hbar;
    let m = consts.mass;
    let a = w.vector_potential;
    let time_term = i * hbar * (w.time_log_derivative * psi);
    let kinetic_term = laplacian * (hbar * hbar / (2.0 * m));
    let a_dot_grad = gradient[0] * a.x + gradient[1] * a.y + gradient[2] * a.z;
    let magnetic_term = -i * hbar * a_dot_grad * (consts.charge / m);
    let potential_term = psi * potential_u_of(&w, consts);
    let residual = time_term + kinetic_term + magnetic_term - potential_term;
    Ok(normalized(
        residual.norm(),
        &[time_term.norm() + kinetic_term.norm() + magnetic_term.norm() + potential_term.norm()],
    ))
}

/// `⟨v_p⟩ = −α∇Φ` from finite differences of the principal phase. Fails with
/// [`MadelungError::BranchCut`] when the stencil straddles the `φ = 0` cut.
pub fn potential_velocity_fd(model: &WaveModel, p: Point3, t: f64, consts: &PhysicalConstants, cfg: &FdConfig) -> Result<Point3, MadelungError> {
    let center = decompose(model, p, t, consts)?.phase;
    let reach = 2.0 * cfg.step * cfg.scale;
    for axis in 0..3 {
        for sign in [-1.0, 1.0] {
            let q = p + Point3::unit(axis) * (sign * reach);
            let phase = decompose(model, q, t, consts)?.phase;
            if (phase - center).abs() > PI {
                return Err(MadelungError::BranchCut { point: p });
            }
        }
    }
    let principal = |q: Point3| decompose(model, q, t, consts).map(|m| m.phase).unwrap_or(f64::NAN);
    let grad_phi = fd_gradient(&principal, p, cfg)?;
    Ok(grad_phi * (-2.0 * consts.alpha()))
}

/// Coefficients of the central-field potential
/// `U(r, θ) = E₀ + a(θ)/r² − b/r` for amplitude `√f ∝ r^{ν/2} e^{−κr/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralPotential {
    pub e0: f64,
    pub b: f64,
    /// `a(θ) = a_radial − a_angular / sin²θ`.
    pub a_radial: f64,
    pub a_angular: f64,
}

impl CentralPotential {
    pub fn new(nu: f64, kappa: f64, k: i32, energy: f64, consts: &PhysicalConstants) -> Self {
        let c = consts.hbar * consts.hbar / (2.0 * consts.mass);
        let (a, b) = (0.5 * nu, 0.5 * kappa);
        let kf = f64::from(k);
        Self {
            e0: energy + c * b * b,
            b: 2.0 * c * b * (a + 1.0),
            a_radial: c * a * (a + 1.0),
            a_angular: c * kf * kf,
        }
    }

    pub fn a(&self, theta: f64) -> f64 {
        self.a_radial - self.a_angular / theta.sin().powi(2)
    }

    pub fn at(&self, p: Point3) -> f64 {
        let r = p.norm();
        self.e0 + self.a(p.polar()) / (r * r) - self.b / r
    }
}
