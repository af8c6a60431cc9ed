//! Central finite differences with optional Richardson extrapolation.
//!
//! First-derivative stencils use `h = step * scale`. Second-derivative
//! stencils use `h = sqrt(step) * scale`, which balances truncation against
//! the `ε/h²` round-off of the Laplacian.

use super::{Linear, NumericsError, Point3};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdOrder {
    #[serde(rename = "2")]
    Second,
    #[serde(rename = "4")]
    Fourth,
}

impl FdOrder {
    pub fn as_u32(self) -> u32 {
        match self {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }

    pub fn from_u32(order: u32) -> Result<Self, NumericsError> {
        match order {
            2 => Ok(FdOrder::Second),
            4 => Ok(FdOrder::Fourth),
            other => Err(NumericsError::InvalidConfig(format!(
                "finite-difference order must be 2 or 4, got {other}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    /// Step as a fraction of `scale`.
    pub step: f64,
    pub order: FdOrder,
    pub richardson: bool,
    /// Characteristic length of the problem.
    pub scale: f64,
    /// Stencil points closer than this to the OZ axis are rejected.
    pub pole_exclusion: Option<f64>,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step: 1e-5,
            order: FdOrder::Second,
            richardson: false,
            scale: 1.0,
            pole_exclusion: None,
        }
    }
}

impl FdConfig {
    pub fn with_order(mut self, order: FdOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_pole_exclusion(mut self, radius: f64) -> Self {
        self.pole_exclusion = Some(radius);
        self
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(NumericsError::InvalidConfig(format!(
                "finite-difference step must be positive, got {}",
                self.step
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(NumericsError::InvalidConfig(format!(
                "characteristic scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    fn first_step(&self) -> f64 {
        self.step * self.scale
    }

    fn second_step(&self) -> f64 {
        self.step.sqrt() * self.scale
    }
}

fn sample<T, F>(field: &F, p: Point3, cfg: &FdConfig) -> Result<T, NumericsError>
where
    T: Linear,
    F: Fn(Point3) -> T,
{
    if let Some(radius) = cfg.pole_exclusion {
        if p.rho() < radius {
            return Err(NumericsError::PoleExclusion { point: p, radius });
        }
    }
    let value = field(p);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(NumericsError::StencilFailure { point: p })
    }
}

fn first_partial_at<T, F>(
    field: &F,
    p: Point3,
    axis: usize,
    h: f64,
    cfg: &FdConfig,
) -> Result<T, NumericsError>
where
    T: Linear,
    F: Fn(Point3) -> T,
{
    let e = Point3::unit(axis) * h;
    match cfg.order {
        FdOrder::Second => {
            let fp = sample(field, p + e, cfg)?;
            let fm = sample(field, p - e, cfg)?;
            Ok((fp - fm) * (0.5 / h))
        }
        FdOrder::Fourth => {
            let fp = sample(field, p + e, cfg)?;
            let fm = sample(field, p - e, cfg)?;
            let fp2 = sample(field, p + e * 2.0, cfg)?;
            let fm2 = sample(field, p - e * 2.0, cfg)?;
            Ok(((fp - fm) * 8.0 - (fp2 - fm2)) * (1.0 / (12.0 * h)))
        }
    }
}

fn second_partial_at<T, F>(
    field: &F,
    p: Point3,
    center: T,
    axis: usize,
    h: f64,
    cfg: &FdConfig,
) -> Result<T, NumericsError>
where
    T: Linear,
    F: Fn(Point3) -> T,
{
    let e = Point3::unit(axis) * h;
    match cfg.order {
        FdOrder::Second => {
            let fp = sample(field, p + e, cfg)?;
            let fm = sample(field, p - e, cfg)?;
            Ok((fp + fm - center * 2.0) * (1.0 / (h * h)))
        }
        FdOrder::Fourth => {
            let fp = sample(field, p + e, cfg)?;
            let fm = sample(field, p - e, cfg)?;
            let fp2 = sample(field, p + e * 2.0, cfg)?;
            let fm2 = sample(field, p - e * 2.0, cfg)?;
            Ok(((fp + fm) * 16.0 - (fp2 + fm2) - center * 30.0) * (1.0 / (12.0 * h * h)))
        }
    }
}

fn extrapolate<T: Linear>(coarse: T, fine: T, order: FdOrder) -> T {
    let w = 2f64.powi(order.as_u32() as i32);
    (fine * w - coarse) * (1.0 / (w - 1.0))
}

/// Partial derivative `∂F/∂x_axis` of a scalar- or vector-valued field.
pub fn fd_partial<T, F>(field: &F, p: Point3, axis: usize, cfg: &FdConfig) -> Result<T, NumericsError>
where
    T: Linear,
    F: Fn(Point3) -> T,
{
    cfg.validate()?;
    let h = cfg.first_step();
    let coarse = first_partial_at(field, p, axis, h, cfg)?;
    if !cfg.richardson {
        return Ok(coarse);
    }
    let fine = first_partial_at(field, p, axis, 0.5 * h, cfg)?;
    Ok(extrapolate(coarse, fine, cfg.order))
}

pub fn fd_gradient<F>(field: &F, p: Point3, cfg: &FdConfig) -> Result<Point3, NumericsError>
where
    F: Fn(Point3) -> f64,
{
    Ok(Point3::new(
        fd_partial(field, p, 0, cfg)?,
        fd_partial(field, p, 1, cfg)?,
        fd_partial(field, p, 2, cfg)?,
    ))
}

fn laplacian_with_step<T, F>(field: &F, p: Point3, h: f64, cfg: &FdConfig) -> Result<T, NumericsError>
where
    T: Linear,
    F: Fn(Point3) -> T,
{
    let center = sample(field, p, cfg)?;
    let mut sum = T::zero();
    for axis in 0..3 {
        sum = sum + second_partial_at(field, p, center, axis, h, cfg)?;
    }
    Ok(sum)
}

/// Laplacian of a scalar (or componentwise, vector) field.
pub fn fd_laplacian<T, F>(field: &F, p: Point3, cfg: &FdConfig) -> Result<T, NumericsError>
where
    T: Linear,
    F: Fn(Point3) -> T,
{
    cfg.validate()?;
    let h = cfg.second_step();
    let coarse = laplacian_with_step(field, p, h, cfg)?;
    if !cfg.richardson {
        return Ok(coarse);
    }
    let fine = laplacian_with_step(field, p, 0.5 * h, cfg)?;
    Ok(extrapolate(coarse, fine, cfg.order))
}

/// Rows are `∂F/∂x`, `∂F/∂y`, `∂F/∂z`.
fn partials<F>(vfield: &F, p: Point3, cfg: &FdConfig) -> Result<[Point3; 3], NumericsError>
where
    F: Fn(Point3) -> Point3,
{
    Ok([
        fd_partial(vfield, p, 0, cfg)?,
        fd_partial(vfield, p, 1, cfg)?,
        fd_partial(vfield, p, 2, cfg)?,
    ])
}

pub fn fd_curl<F>(vfield: &F, p: Point3, cfg: &FdConfig) -> Result<Point3, NumericsError>
where
    F: Fn(Point3) -> Point3,
{
    let [dx, dy, dz] = partials(vfield, p, cfg)?;
    Ok(Point3::new(dy.z - dz.y, dz.x - dx.z, dx.y - dy.x))
}

pub fn fd_divergence<F>(vfield: &F, p: Point3, cfg: &FdConfig) -> Result<f64, NumericsError>
where
    F: Fn(Point3) -> Point3,
{
    let dx: Point3 = fd_partial(vfield, p, 0, cfg)?;
    let dy: Point3 = fd_partial(vfield, p, 1, cfg)?;
    let dz: Point3 = fd_partial(vfield, p, 2, cfg)?;
    Ok(dx.x + dy.y + dz.z)
}
