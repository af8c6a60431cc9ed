use super::{MadelungError, PhysicalConstants, WaveModel};
use crate::numerics::Point3;
use serde::{Deserialize, Serialize};

/// A physical trajectory `r(t)` with an analytic velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Trajectory {
    Static { point: Point3 },
    /// Horizontal circle about OZ: `ϕ(t) = phase0 + ω (t − t0)`.
    Circle { radius: f64, z: f64, omega: f64, phase0: f64, t0: f64 },
    Linear { start: Point3, velocity: Point3, t0: f64 },
    /// `r(t) = start · s(t)/s(t0)` with `s(t) = √(1 + (rate·t)²)`.
    RadialSpread { start: Point3, rate: f64, t0: f64 },
}

impl Trajectory {
    /// The flow line of `⟨v⟩` through `start` at time `t0`.
    pub fn flow_line(model: &WaveModel, start: Point3, t0: f64, consts: &PhysicalConstants) -> Result<Self, MadelungError> {
        model.validate()?;
        Ok(match *model {
            WaveModel::CentralField { k, .. } | WaveModel::DiracString { k, .. } => {
                let rho = start.rho();
                if let Some(radius) = model.pole_exclusion(consts) {
                    if rho < radius {
                        return Err(MadelungError::Pole { point: start, radius });
                    }
                }
                Trajectory::Circle {
                    radius: rho,
                    z: start.z,
                    omega: consts.hbar * f64::from(k) / (consts.mass * rho * rho),
                    phase0: start.azimuth(),
                    t0,
                }
            }
            WaveModel::PlaneWave { momentum, .. } => Trajectory::Linear {
                start,
                velocity: Point3::new(momentum / consts.mass, 0.0, 0.0),
                t0,
            },
            WaveModel::FreeGaussian { sigma } => Trajectory::RadialSpread {
                start,
                rate: consts.hbar / (2.0 * consts.mass * sigma * sigma),
                t0,
            },
        })
    }

    pub fn position(&self, t: f64) -> Point3 {
        match *self {
            Trajectory::Static { point } => point,
            Trajectory::Circle { radius, z, omega, phase0, t0 } => {
                Point3::from_cylindrical(radius, phase0 + omega * (t - t0), z)
            }
            Trajectory::Linear { start, velocity, t0 } => start + velocity * (t - t0),
            Trajectory::RadialSpread { start, rate, t0 } => {
                let s = |t: f64| (1.0 + (rate * t).powi(2)).sqrt();
                start * (s(t) / s(t0))
            }
        }
    }

    pub fn velocity(&self, t: f64) -> Point3 {
        match *self {
            Trajectory::Static { .. } => Point3::ZERO,
            Trajectory::Circle { radius, omega, phase0, t0, .. } => {
                let (s, c) = (phase0 + omega * (t - t0)).sin_cos();
                Point3::new(-radius * omega * s, radius * omega * c, 0.0)
            }
            Trajectory::Linear { velocity, .. } => velocity,
            Trajectory::RadialSpread { rate, .. } => {
                let growth = rate * rate * t / (1.0 + (rate * t).powi(2));
                self.position(t) * growth
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flow_lines_follow_the_velocity_field() {
        let consts = PhysicalConstants::natural();
        let start = Point3::new(0.8, 0.3, 0.2);
        for model in [
            WaveModel::central_field(1.0, 1.0, 2, -0.5),
            WaveModel::dirac_string(1.0, 1.0, -1, 0.0),
            WaveModel::PlaneWave { momentum: 1.3, energy: 0.845 },
            WaveModel::FreeGaussian { sigma: 0.7 },
        ] {
            let traj = Trajectory::flow_line(&model, start, 0.1, &consts).unwrap();
            for t in [0.1, 0.4, 1.7] {
                let p = traj.position(t);
                let v = super::super::decompose(&model, p, t, &consts).unwrap().velocity;
                assert!((traj.velocity(t) - v).norm() < 1e-12 * (1.0 + v.norm()), "{model:?} t={t}");
            }
            assert!((traj.position(0.1) - start).norm() < 1e-14);
        }
    }
}
