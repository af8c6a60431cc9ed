//! Loop integrals of momentum, the Bohr model and the Dirac-string charge.
//!
//! Loop integrals are quantized in units of `h = 2πħ`: a loop winding once
//! around a vortex of index `k` gives `∮(⟨p⟩, dr) = 2πħk`.

use crate::madelung::{decompose, hamiltonian, lagrangian, MadelungError, PhysicalConstants, Trajectory, WaveModel};
use crate::numerics::{line_integral, CircleCurve, Curve, ParamCurve, FdConfig, FdOrder, NumericsError, Point3, Quadrature, QuadratureConfig};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Largest admissible `|value/h − round(value/h)|`.
pub const INTEGER_RECOVERY: f64 = 1e-6;
/// Loop points closer to the axis than this fraction of the radius are poles.
pub const LOOP_POLE_FRACTION: f64 = 1e-9;
const GL_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantizationError {
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("loop passes through the axis singularity at {point:?}")]
    PoleOnPath { point: Point3 },
    #[error("no closed orbit: the vortex index is zero")]
    DegenerateOrbit,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Madelung(#[from] MadelungError),
    #[error(transparent)]
    Numerics(NumericsError),
}

impl From<NumericsError> for QuantizationError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::PoleOnPath { point } => QuantizationError::PoleOnPath { point },
            other => QuantizationError::Numerics(other),
        }
    }
}

/// A horizontal circle of radius `R` at height `R·cot θ`, offset from the OZ
/// axis by `offset` in the xy-plane, traversed `turns` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub radius: f64,
    pub offset: (f64, f64),
    pub turns: i32,
    pub samples: usize,
    pub theta: f64,
}

impl LoopSpec {
    pub fn new(radius: f64, turns: i32) -> Self {
        Self { radius, offset: (0.0, 0.0), turns, samples: 128 * turns.unsigned_abs().max(1) as usize, theta: FRAC_PI_2 }
    }

    pub fn with_offset(mut self, x: f64, y: f64) -> Self {
        self.offset = (x, y);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn validate(&self) -> Result<(), QuantizationError> {
        let bad = |m: String| Err(QuantizationError::InvalidLoop(m));
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if self.turns == 0 {
            return bad("a loop needs a non-zero number of turns".into());
        }
        if self.samples < 64 * self.turns.unsigned_abs() as usize {
            return bad(format!("{} samples is below 64 per turn", self.samples));
        }
        if !(self.theta > 0.0 && self.theta < PI) {
            return bad(format!("plane angle must lie in (0, π), got {}", self.theta));
        }
        Ok(())
    }

    pub fn center(&self) -> Point3 {
        Point3::new(self.offset.0, self.offset.1, self.radius / self.theta.tan())
    }

    pub fn curve(&self) -> CircleCurve {
        CircleCurve::new(self.center(), self.radius, self.turns)
    }

    /// Whether the loop winds around the OZ axis.
    pub fn encloses_axis(&self) -> bool {
        self.offset.0.hypot(self.offset.1) < self.radius
    }

    /// Parameter panels, uniform to begin with and bisected until each arc
    /// is at most half the smallest axis distance over it.
    fn panels(&self) -> Vec<(f64, f64)> {
        let curve = self.curve();
        let (start, end) = curve.domain();
        let nearest = self.closest_to_axis();
        let c = self.center();
        let sign = f64::from(self.turns.signum());
        let tau0 = (sign * (nearest.y - c.y).atan2(nearest.x - c.x)).rem_euclid(2.0 * PI);
        let concentric = self.offset == (0.0, 0.0);
        let min_rho = |a: f64, b: f64| {
            let ends = curve.position(a).rho().min(curve.position(b).rho());
            let j = ((a - tau0) / (2.0 * PI)).ceil();
            if !concentric && tau0 + 2.0 * PI * j <= b {
                nearest.rho()
            } else {
                ends
            }
        };
        let n = self.samples.div_ceil(GL_POINTS);
        let width = (end - start) / n as f64;
        let mut todo: Vec<(f64, f64)> = (0..n).rev().map(|i| (start + width * i as f64, start + width * (i + 1) as f64)).collect();
        let mut out = Vec::with_capacity(n);
        while let Some((a, b)) = todo.pop() {
            if self.radius * (b - a) > 0.5 * min_rho(a, b) {
                let mid = 0.5 * (a + b);
                todo.push((mid, b));
                todo.push((a, mid));
            } else {
                out.push((a, b));
            }
        }
        out
    }

    /// The loop point closest to the OZ axis.
    pub fn closest_to_axis(&self) -> Point3 {
        let (x, y) = self.offset;
        let d = x.hypot(y);
        let z = self.center().z;
        if d == 0.0 {
            return Point3::new(self.radius, 0.0, z);
        }
        Point3::new(x / d * (d - self.radius), y / d * (d - self.radius), z)
    }

    fn integrate<F: Fn(Point3) -> Point3>(&self, field: F) -> Result<f64, QuantizationError> {
        self.validate()?;
        let nearest = self.closest_to_axis();
        if nearest.rho() < LOOP_POLE_FRACTION * self.radius {
            return Err(QuantizationError::PoleOnPath { point: nearest });
        }
        let curve = self.curve();
        let quad = QuadratureConfig::gauss(1, GL_POINTS).with_pole_exclusion(LOOP_POLE_FRACTION * self.radius);
        let mut total = 0.0;
        for (start, end) in self.panels() {
            let piece = ParamCurve { start, end, position: |t| curve.position(t), tangent: |t| curve.tangent(t) };
            total += line_integral(&field, &piece, &quad)?;
        }
        Ok(total)
    }
}

fn nan3() -> Point3 {
    Point3::new(f64::NAN, f64::NAN, f64::NAN)
}

/// `∮(∇ϕ, dρ)` for the azimuthal angle `ϕ`.
pub fn circulation_of_angle_gradient(lp: &LoopSpec) -> Result<f64, QuantizationError> {
    lp.integrate(|p| p.e_phi() * (1.0 / p.rho()))
}

/// Loop integral with its integer recovery and split into phase and flux
/// terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationReport {
    pub value: f64,
    pub recovered_k: i64,
    /// `|value/h − recovered_k|`.
    pub residual: f64,
    /// `ħ∮(∇φ, dr)`.
    pub phase_term: f64,
    /// `−q_e∮(A, dr)`, the flux of `B` through the loop times `−q_e`.
    pub flux_term: f64,
    /// `h·recovered_k`.
    pub hk_term: f64,
    pub pass: bool,
}

impl QuantizationReport {
    fn new(value: f64, phase_term: f64, flux_term: f64, consts: &PhysicalConstants) -> Self {
        let h = consts.planck();
        let ratio = value / h;
        let recovered = ratio.round();
        let residual = (ratio - recovered).abs();
        Self {
            value,
            recovered_k: recovered as i64,
            residual,
            phase_term,
            flux_term,
            hk_term: h * recovered,
            pass: residual < INTEGER_RECOVERY,
        }
    }
}

/// `∮(⟨p⟩, dr)` with `⟨p⟩ = m⟨v⟩` evaluated at `t = 0`.
pub fn momentum_loop_integral(model: &WaveModel, lp: &LoopSpec, consts: &PhysicalConstants) -> Result<QuantizationReport, QuantizationError> {
    model.validate()?;
    lp.validate()?;
    let m = consts.mass;
    let field = |p: Point3, part: fn(&crate::madelung::MadelungFields) -> Point3| {
        decompose(model, p, 0.0, consts).map(|f| part(&f) * m).unwrap_or_else(|_| nan3())
    };
    let phase_term = lp.integrate(|p| field(p, |f| f.potential_velocity))?;
    let flux_term = lp.integrate(|p| field(p, |f| f.solenoidal_velocity))?;
    let value = lp.integrate(|p| field(p, |f| f.velocity))?;
    Ok(QuantizationReport::new(value, phase_term, flux_term, consts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopAction {
    pub loop_integral: f64,
    /// `∫L̃dt` over the orbit, including the time phase `−ET`.
    pub action: f64,
    /// `∫H̃dt` over the orbit.
    pub hamiltonian_integral: f64,
    /// `h·k·turns`.
    pub hk_term: f64,
    /// `E·T` with `T` the total orbit time.
    pub h0t_term: f64,
    pub period: f64,
    /// `|loop − (action + ∫H̃)|`, relative to `h`.
    pub balance: f64,
    /// `|action + H₀T − hk|`, relative to `h`.
    pub closed_form_gap: f64,
}

/// Splits `∮(⟨p_p⟩, dr)` along a closed orbit of period
/// `T = 2πmR²/(ħ|k|)` into the action and `∫H̃dt`.
pub fn loop_action_decomposition(model: &WaveModel, lp: &LoopSpec, consts: &PhysicalConstants) -> Result<LoopAction, QuantizationError> {
    lp.validate()?;
    let k = model.winding();
    if k == 0 {
        return Err(QuantizationError::DegenerateOrbit);
    }
    if !matches!(model, WaveModel::CentralField { .. }) {
        return Err(QuantizationError::Precondition("closed orbits need a central-field vortex".into()));
    }
    let r = lp.radius;
    let period = 2.0 * PI * consts.mass * r * r / (consts.hbar * f64::from(k.abs()));
    let turns = lp.turns.unsigned_abs();
    let total_time = period * f64::from(turns);
    let center = lp.center();
    let orbit = Trajectory::Circle {
        radius: r,
        z: center.z,
        omega: 2.0 * PI / period * f64::from(lp.turns.signum()),
        phase0: 0.0,
        t0: 0.0,
    };
    if lp.offset != (0.0, 0.0) {
        return Err(QuantizationError::Precondition("the orbit must be centred on the axis".into()));
    }
    let quad = Quadrature::new(&QuadratureConfig::gauss(lp.samples.div_ceil(GL_POINTS), GL_POINTS))?;
    let action = quad.try_integrate(0.0, total_time, |t| lagrangian(model, &orbit, t, consts))?;
    let h_integral = quad.try_integrate(0.0, total_time, |t| hamiltonian(model, orbit.position(t), t, consts))?;
    let loop_integral = momentum_loop_integral(model, lp, consts)?.phase_term;
    let h = consts.planck();
    let hk_term = h * f64::from(k) * f64::from(lp.turns);
    let h0t_term = model.energy(consts) * total_time;
    Ok(LoopAction {
        loop_integral,
        action,
        hamiltonian_integral: h_integral,
        hk_term,
        h0t_term,
        period,
        balance: (loop_integral - action - h_integral).abs() / h,
        closed_form_gap: (action + h0t_term - hk_term).abs() / h,
    })
}

/// `ρ × ⟨p⟩` with `ρ` the distance vector from the OZ axis.
pub fn angular_momentum(model: &WaveModel, p: Point3, consts: &PhysicalConstants) -> Result<Point3, QuantizationError> {
    let fields = decompose(model, p, 0.0, consts)?;
    Ok(p.planar().cross(fields.velocity * consts.mass))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BohrLevel {
    pub z: u32,
    pub k: u32,
    pub radius: f64,
    pub energy: f64,
    pub energy_ev: f64,
    /// Stationary point of `W(r)` found from finite differences.
    pub stationary_radius: f64,
    /// `W` at the closed-form radius.
    pub energy_at_radius: f64,
}

/// `W(r) = ħ²k²/(2mr²) − Ze²/(4πε₀r)`.
pub fn coulomb_orbit_energy(r: f64, z: u32, k: u32, consts: &PhysicalConstants) -> f64 {
    let kf = f64::from(k);
    let e = consts.charge;
    consts.hbar * consts.hbar * kf * kf / (2.0 * consts.mass * r * r) - f64::from(z) * e * e / (4.0 * PI * consts.epsilon0 * r)
}

pub fn bohr_model(z: u32, k: u32, consts: &PhysicalConstants) -> Result<BohrLevel, QuantizationError> {
    if k == 0 || z == 0 {
        return Err(QuantizationError::Precondition(format!("Bohr levels need k ≥ 1 and Z ≥ 1, got k={k}, Z={z}")));
    }
    let (hbar, m, e, eps0) = (consts.hbar, consts.mass, consts.charge, consts.epsilon0);
    let (kf, zf) = (f64::from(k), f64::from(z));
    let radius = 4.0 * PI * eps0 * hbar * hbar * kf * kf / (zf * e * e * m);
    let energy = -zf * zf * e.powi(4) * m / (32.0 * PI * PI * eps0 * eps0 * hbar * hbar * kf * kf);
    let stationary_radius = stationary_point(|r| coulomb_orbit_energy(r, z, k, consts))?;
    Ok(BohrLevel {
        z,
        k,
        radius,
        energy,
        energy_ev: energy / e.abs(),
        stationary_radius,
        energy_at_radius: coulomb_orbit_energy(radius, z, k, consts),
    })
}

/// Zero of the central-difference derivative of `w`, bracketed by expanding
/// outward from `r = 1` and refined by bisection.
fn stationary_point<F: Fn(f64) -> f64>(w: F) -> Result<f64, QuantizationError> {
    let slope = |r: f64| {
        let h = 1e-4 * r;
        (w(r + h) - w(r - h)) / (2.0 * h)
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut expansions = 0;
    while slope(lo) >= 0.0 {
        lo *= 0.5;
        expansions += 1;
        if expansions > 400 {
            return Err(QuantizationError::Precondition("W(r) has no minimum below r = 1".into()));
        }
    }
    while slope(hi) <= 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 400 {
            return Err(QuantizationError::Precondition("W(r) has no minimum above r = 1".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `A = −ħk/(q_e ρ) e_ϕ`.
pub fn dirac_potential(p: Point3, k: i32, consts: &PhysicalConstants) -> Point3 {
    p.e_phi() * (-consts.hbar * f64::from(k) / (consts.charge * p.rho()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracPotential {
    pub a: Point3,
    /// `|div A|·ρ/|A|` by finite differences.
    pub divergence: f64,
    /// `|curl A|·ρ/|A|` by finite differences.
    pub curl: f64,
}

pub fn dirac_vector_potential(p: Point3, k: i32, consts: &PhysicalConstants) -> Result<DiracPotential, QuantizationError> {
    let rho = p.rho();
    if !(rho > 0.0) || !p.is_finite() {
        return Err(MadelungError::Pole { point: p, radius: 0.0 }.into());
    }
    let a = dirac_potential(p, k, consts);
    let cfg = FdConfig::default().with_order(FdOrder::Fourth).with_step(1e-3).with_scale(rho).with_pole_exclusion(0.5 * rho);
    let field = |q: Point3| dirac_potential(q, k, consts);
    let div = crate::numerics::fd_divergence(&field, p, &cfg)?;
    let curl = crate::numerics::fd_curl(&field, p, &cfg)?;
    let scale = a.norm() / rho;
    let rel = |x: f64| if x == 0.0 { 0.0 } else { x / scale };
    Ok(DiracPotential { a, divergence: rel(div.abs()), curl: rel(curl.norm()) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracCharge {
    /// `∮(A, dl)`.
    pub flux: f64,
    pub q_m_wb: f64,
    pub q_m_am: f64,
    /// `q_e q_m^{Wb}/(2πħ)`.
    pub dirac_k_wb: f64,
    /// `q_e μ₀ q_m^{A·m}/(2πħ)`.
    pub dirac_k_am: f64,
    pub encloses_axis: bool,
}

impl DiracCharge {
    pub fn recovered_k(&self) -> Option<i64> {
        let k = self.dirac_k_wb.round();
        let ok = (self.dirac_k_wb - k).abs() < INTEGER_RECOVERY && (self.dirac_k_am - k).abs() < INTEGER_RECOVERY;
        ok.then_some(k as i64)
    }
}

/// Magnetic charge in webers from the flux through a loop winding once
/// counter-clockwise: `q_m^{Wb} = −∮(A, dl)`.
pub fn dirac_flux_and_charge(lp: &LoopSpec, k: i32, consts: &PhysicalConstants) -> Result<DiracCharge, QuantizationError> {
    let flux = lp.integrate(|p| dirac_potential(p, k, consts))?;
    let per_turn = flux / f64::from(lp.turns);
    let q_m_wb = -per_turn;
    let q_m_am = q_m_wb / consts.mu0;
    let h = consts.planck();
    Ok(DiracCharge {
        flux,
        q_m_wb,
        q_m_am,
        dirac_k_wb: consts.charge * q_m_wb / h,
        dirac_k_am: consts.charge * consts.mu0 * q_m_am / h,
        encloses_axis: lp.encloses_axis(),
    })
}

/// Largest relative deviation of the flux from `−2πħk/q_e` over a sweep of
/// loop radii; absolute when `k = 0`.
pub fn delta_field_consistency(k: i32, radii: &[f64], consts: &PhysicalConstants) -> Result<f64, QuantizationError> {
    let expected = -consts.planck() * f64::from(k) / consts.charge;
    let mut worst = 0.0f64;
    for &r in radii {
        let flux = dirac_flux_and_charge(&LoopSpec::new(r, 1), k, consts)?.flux;
        let dev = if expected == 0.0 { flux.abs() } else { ((flux - expected) / expected).abs() };
        worst = worst.max(dev);
    }
    Ok(worst)
}
