//! The map `Ψ = e^{M/2}` from the strip `M = S + iΦ` onto the Ψ-plane.
//!
//! Everything is done on the M-plane, where the map is univalent on strips of
//! Φ-width up to 4π. Queries in `Z = M/2` go through [`forward_map`] with
//! `M = 2Z`.

use crate::madelung::{decompose, normalized, MadelungError, PhysicalConstants, WaveModel};
use crate::numerics::{fd_divergence, FdConfig, NumericsError, Point3, Quadrature, QuadratureConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Two lattice images closer than this count as a collision.
pub const COLLISION_DISTANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConformalError {
    #[error("invalid strip domain: {0}")]
    InvalidDomain(String),
    #[error("area integral diverges: S is unbounded above")]
    Divergent,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Madelung(#[from] MadelungError),
}

pub fn forward_map(m: Complex64) -> Complex64 {
    (m * 0.5).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum JacobianMode {
    Analytic,
    /// Central differences of `(u, v)` in `(S, Φ)` with the given step.
    FiniteDifference { step: f64 },
}

/// `∂(u, v)/∂(S, Φ)` of the forward map.
pub fn jacobian(m: Complex64, mode: JacobianMode) -> f64 {
    match mode {
        JacobianMode::Analytic => m.re.exp() / 4.0,
        JacobianMode::FiniteDifference { step } => {
            let h = step;
            let ds = (forward_map(m + h) - forward_map(m - h)) / (2.0 * h);
            let dphi = (forward_map(m + Complex64::new(0.0, h)) - forward_map(m - Complex64::new(0.0, h))) / (2.0 * h);
            ds.re * dphi.im - ds.im * dphi.re
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSample {
    pub m: Complex64,
    pub psi: Complex64,
    pub jacobian: f64,
}

impl MapSample {
    pub fn at(m: Complex64) -> Self {
        Self { m, psi: forward_map(m), jacobian: jacobian(m, JacobianMode::Analytic) }
    }
}

/// A rectangle `S_min < S < S_max`, `Φ_min < Φ < Φ_max` of the M-plane with a
/// sampling lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripDomain {
    pub s_min: f64,
    pub s_max: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub s_count: usize,
    pub phi_count: usize,
}

impl StripDomain {
    pub fn new(s_min: f64, s_max: f64, phi_min: f64, phi_max: f64) -> Result<Self, ConformalError> {
        let d = Self { s_min, s_max, phi_min, phi_max, s_count: 32, phi_count: 64 };
        d.validate()?;
        Ok(d)
    }

    pub fn with_lattice(mut self, s_count: usize, phi_count: usize) -> Result<Self, ConformalError> {
        self.s_count = s_count;
        self.phi_count = phi_count;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConformalError> {
        let bad = |m: String| Err(ConformalError::InvalidDomain(m));
        if self.s_min.is_nan() || self.s_max.is_nan() || self.s_min > self.s_max || self.s_min == f64::INFINITY {
            return bad(format!("bad S range ({}, {})", self.s_min, self.s_max));
        }
        if !(self.phi_min.is_finite() && self.phi_max.is_finite() && self.phi_max > self.phi_min) {
            return bad(format!("bad Φ range ({}, {})", self.phi_min, self.phi_max));
        }
        if self.s_count < 2 || self.phi_count < 2 {
            return bad("lattice needs at least 2 points per axis".into());
        }
        Ok(())
    }

    pub fn phi_width(&self) -> f64 {
        self.phi_max - self.phi_min
    }

    /// A finite S window for lattice sampling of unbounded strips.
    fn sampled_s_range(&self) -> (f64, f64) {
        const SPAN: f64 = 20.0;
        match (self.s_min.is_finite(), self.s_max.is_finite()) {
            (true, true) => (self.s_min, self.s_max),
            (false, true) => (self.s_max - SPAN, self.s_max),
            (true, false) => (self.s_min, self.s_min + SPAN),
            (false, false) => (-SPAN / 2.0, SPAN / 2.0),
        }
    }

    /// Cell-centred lattice points.
    pub fn lattice(&self) -> Vec<Complex64> {
        let (s0, s1) = self.sampled_s_range();
        let ds = (s1 - s0) / self.s_count as f64;
        let dphi = self.phi_width() / self.phi_count as f64;
        let mut out = Vec::with_capacity(self.s_count * self.phi_count);
        for i in 0..self.s_count {
            for j in 0..self.phi_count {
                out.push(Complex64::new(
                    s0 + (i as f64 + 0.5) * ds,
                    self.phi_min + (j as f64 + 0.5) * dphi,
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnivalenceReport {
    pub univalent: bool,
    pub phi_width: f64,
    /// Two distinct preimages with the same image.
    pub witness: Option<(Complex64, Complex64)>,
    /// Smallest image distance found among lattice points, when checked.
    pub min_separation: Option<f64>,
}

pub fn univalence_check(domain: &StripDomain) -> Result<UnivalenceReport, ConformalError> {
    domain.validate()?;
    let width = domain.phi_width();
    if width > 4.0 * PI {
        let (s0, s1) = domain.sampled_s_range();
        let s = 0.5 * (s0 + s1);
        let phi0 = domain.phi_min + 0.5 * (width - 4.0 * PI);
        return Ok(UnivalenceReport {
            univalent: false,
            phi_width: width,
            witness: Some((Complex64::new(s, phi0), Complex64::new(s, phi0 + 4.0 * PI))),
            min_separation: None,
        });
    }
    let mut images: Vec<(Complex64, Complex64)> = domain.lattice().into_iter().map(|m| (forward_map(m), m)).collect();
    images.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
    let mut min_sep = f64::INFINITY;
    let mut witness = None;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[j].0.re - images[i].0.re > min_sep.max(COLLISION_DISTANCE) {
                break;
            }
            let d = (images[j].0 - images[i].0).norm();
            if d < min_sep {
                min_sep = d;
                if d < COLLISION_DISTANCE {
                    witness = Some((images[i].1, images[j].1));
                }
            }
        }
    }
    Ok(UnivalenceReport {
        univalent: witness.is_none(),
        phi_width: width,
        witness,
        min_separation: Some(min_sep),
    })
}

/// `∬ J dS dΦ` over the strip. The S integral runs over `w = e^S`, so an
/// unbounded lower limit maps to `w = 0`.
pub fn area_integral(domain: &StripDomain, cfg: &QuadratureConfig) -> Result<f64, ConformalError> {
    domain.validate()?;
    if domain.s_max == f64::INFINITY {
        return Err(ConformalError::Divergent);
    }
    if domain.s_max == domain.s_min {
        return Ok(0.0);
    }
    let quad = Quadrature::new(cfg)?;
    let (w0, w1) = (domain.s_min.exp(), domain.s_max.exp());
    // dS = dw / w and J = w / 4, so the integrand is constant in w.
    let inner = |phi: f64| {
        quad.integrate(w0, w1, |w| {
            let m = Complex64::new(w.ln(), phi);
            jacobian(m, JacobianMode::Analytic) / w
        })
    };
    Ok(quad.integrate(domain.phi_min, domain.phi_max, inner))
}

/// Normalised `|∂J/∂t + div(J⟨v⟩)|` with `J` taken from the map at
/// `M = ln f + iΦ`.
pub fn jacobian_continuity_residual(
    model: &WaveModel,
    p: Point3,
    t: f64,
    consts: &PhysicalConstants,
    cfg: &FdConfig,
) -> Result<f64, ConformalError> {
    let w = model.local(p, t, consts)?;
    let fields = decompose(model, p, t, consts)?;
    let j = jacobian(Complex64::new(fields.log_density, fields.velocity_potential), JacobianMode::Analytic);
    let dj_dt = j * 2.0 * w.time_log_derivative.re;
    let flux = |q: Point3| {
        decompose(model, q, t, consts)
            .map(|m| m.velocity * jacobian(Complex64::new(m.log_density, m.velocity_potential), JacobianMode::Analytic))
            .unwrap_or(Point3::new(f64::NAN, f64::NAN, f64::NAN))
    };
    let div = fd_divergence(&flux, p, cfg)?;
    let length = model.characteristic_length(consts);
    Ok(normalized(dj_dt + div, &[dj_dt, div, j * fields.velocity.norm() / length]))
}
