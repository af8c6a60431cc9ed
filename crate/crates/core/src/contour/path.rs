use super::ContourError;
use crate::numerics::{Quadrature, QuadratureConfig};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

/// Samples closer than this to the origin are a near-pole failure.
pub const NEAR_POLE: f64 = 1e-12;
/// Largest admissible `|Δ arg ξ|` between neighbouring samples.
pub const UNWRAP_THRESHOLD: f64 = FRAC_PI_4;
/// Largest admissible modulus ratio between neighbouring samples.
pub const MODULUS_RATIO: f64 = 2.0;
/// Rounding residue above which a winding number is not trusted.
pub const WINDING_RESIDUE: f64 = 1e-6;
const SAMPLE_BUDGET: usize = 1 << 22;

type Generator = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// An ordered list of samples `(τ, ξ)` in the complex plane.
#[derive(Clone)]
pub struct ComplexPath {
    samples: Vec<(f64, Complex64)>,
    closed: bool,
    generator: Option<Generator>,
    unwrapped: Option<Vec<f64>>,
}

impl fmt::Debug for ComplexPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexPath")
            .field("samples", &self.samples.len())
            .field("closed", &self.closed)
            .field("generator", &self.generator.is_some())
            .field("start", &self.start())
            .field("end", &self.end())
            .finish()
    }
}

impl ComplexPath {
    /// Sample `xi` at `n + 1` equally spaced parameters on `[t0, t1]`.
    pub fn from_fn<F>(xi: F, t0: f64, t1: f64, n: usize) -> Result<Self, ContourError>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        if n == 0 {
            return Err(ContourError::TooFewSamples);
        }
        let samples = (0..=n)
            .map(|i| {
                let tau = t0 + (t1 - t0) * i as f64 / n as f64;
                (tau, xi(tau))
            })
            .collect();
        Ok(Self { samples, closed: false, generator: Some(Arc::new(xi)), unwrapped: None })
    }

    /// A polyline through `points`; closed paths return to the first point.
    pub fn from_points(points: &[Complex64], closed: bool) -> Result<Self, ContourError> {
        let mut pts = points.to_vec();
        if closed && pts.len() >= 2 && pts.first() != pts.last() {
            pts.push(pts[0]);
        }
        if pts.len() < 2 {
            return Err(ContourError::TooFewSamples);
        }
        let samples = pts.into_iter().enumerate().map(|(i, z)| (i as f64, z)).collect();
        Ok(Self { samples, closed, generator: None, unwrapped: None })
    }

    /// `center + radius·e^{iτ}` traversed `turns` times; negative turns run
    /// clockwise.
    pub fn circle(center: Complex64, radius: f64, turns: i32, n: usize) -> Result<Self, ContourError> {
        let mut path = Self::from_fn(move |t| center + Complex64::from_polar(radius, t), 0.0, TAU * f64::from(turns), n)?;
        path.closed = true;
        Ok(path)
    }

    pub fn segment(a: Complex64, b: Complex64, n: usize) -> Result<Self, ContourError> {
        Self::from_fn(move |s| a + (b - a) * s, 0.0, 1.0, n)
    }

    /// `ξ(s) = exp((1−s)·Ln a + s·(Ln b + 2πi·sheet) + sin(πs)·bulge)`.
    ///
    /// The logarithm is continuous along the path, so `∫dξ/ξ` is known
    /// exactly: `Ln b − Ln a + 2πi·sheet`.
    pub fn log_linear(a: Complex64, b: Complex64, sheet: i64, bulge: Complex64, n: usize) -> Result<Self, ContourError> {
        let la = a.ln();
        let lb = b.ln() + Complex64::new(0.0, TAU * sheet as f64);
        Self::from_fn(move |s| ((la * (1.0 - s)) + lb * s + bulge * (PI * s).sin()).exp(), 0.0, 1.0, n)
    }

    pub fn samples(&self) -> &[(f64, Complex64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> Complex64 {
        self.samples[0].1
    }

    pub fn end(&self) -> Complex64 {
        self.samples[self.samples.len() - 1].1
    }

    /// Cumulative branch-tracked phase, present after refinement.
    pub fn unwrapped_phase(&self) -> Option<&[f64]> {
        self.unwrapped.as_deref()
    }

    /// Marks the path closed; its ends must coincide.
    pub fn close(mut self) -> Result<Self, ContourError> {
        let gap = (self.end() - self.start()).norm();
        if gap > NEAR_POLE * self.start().norm().max(1.0) {
            return Err(ContourError::EndpointMismatch { gap });
        }
        self.closed = true;
        Ok(self)
    }

    /// The same path traversed backwards, with parameter `−τ`.
    pub fn reversed(&self) -> Self {
        let samples = self.samples.iter().rev().map(|&(t, z)| (-t, z)).collect();
        let generator = self.generator.clone().map(|g| Arc::new(move |t: f64| g(-t)) as Generator);
        Self { samples, closed: self.closed, generator, unwrapped: None }
    }

    /// `self` followed by `other`; the parameter of `other` is shifted to
    /// continue from the end of `self`.
    pub fn concat(&self, other: &ComplexPath) -> Result<Self, ContourError> {
        let gap = (other.start() - self.end()).norm();
        if gap > NEAR_POLE * self.end().norm().max(1.0) {
            return Err(ContourError::EndpointMismatch { gap });
        }
        let split = self.samples[self.samples.len() - 1].0;
        let shift = split - other.samples[0].0;
        let mut samples = self.samples.clone();
        samples.extend(other.samples.iter().skip(1).map(|&(t, z)| (t + shift, z)));
        let generator = match (&self.generator, &other.generator) {
            (Some(g1), Some(g2)) => {
                let (g1, g2) = (g1.clone(), g2.clone());
                Some(Arc::new(move |t: f64| if t <= split { g1(t) } else { g2(t - shift) }) as Generator)
            }
            _ => None,
        };
        Ok(Self { samples, closed: false, generator, unwrapped: None })
    }

    fn midpoint(&self, a: (f64, Complex64), b: (f64, Complex64)) -> (f64, Complex64) {
        let tau = 0.5 * (a.0 + b.0);
        let xi = match &self.generator {
            Some(g) => g(tau),
            None => 0.5 * (a.1 + b.1),
        };
        (tau, xi)
    }

    /// Inserts midpoints until neighbouring samples differ by less than π/4
    /// in argument and a factor 2 in modulus, then attaches the cumulative
    /// unwrapped phase. With a generator, the generated midpoint of every
    /// interval must pass the same test.
    pub fn refine_and_unwrap(&self) -> Result<ComplexPath, ContourError> {
        let check = |&(tau, xi): &(f64, Complex64)| {
            if xi.norm() < NEAR_POLE || !xi.is_finite() {
                Err(ContourError::NearPole { tau, xi })
            } else {
                Ok(())
            }
        };
        self.samples.iter().try_for_each(check)?;
        let coarse = |a: Complex64, b: Complex64| {
            let ratio = b / a;
            ratio.arg().abs() >= UNWRAP_THRESHOLD || !(1.0 / MODULUS_RATIO..=MODULUS_RATIO).contains(&ratio.norm())
        };
        let mut out = vec![self.samples[0]];
        let mut stack: Vec<(f64, Complex64)> = self.samples[1..].iter().rev().copied().collect();
        while let Some(next) = stack.pop() {
            let last = *out.last().expect("path has a first sample");
            // The generator midpoint guards against samples that alias whole
            // turns onto the same point.
            let mid = self.midpoint(last, next);
            let split = self.generator.is_some() && (check(&mid).is_err() || coarse(last.1, mid.1) || coarse(mid.1, next.1));
            if split || coarse(last.1, next.1) {
                if out.len() + stack.len() >= SAMPLE_BUDGET {
                    return Err(ContourError::NearPole { tau: last.0, xi: last.1 });
                }
                check(&mid)?;
                stack.push(next);
                stack.push(mid);
            } else {
                out.push(next);
            }
        }
        let mut phase = out[0].1.arg();
        let mut unwrapped = Vec::with_capacity(out.len());
        unwrapped.push(phase);
        for w in out.windows(2) {
            phase += (w[1].1 / w[0].1).arg();
            unwrapped.push(phase);
        }
        Ok(ComplexPath { samples: out, closed: self.closed, generator: self.generator.clone(), unwrapped: Some(unwrapped) })
    }

    fn refined(&self) -> Result<std::borrow::Cow<'_, ComplexPath>, ContourError> {
        Ok(match self.unwrapped {
            Some(_) => std::borrow::Cow::Borrowed(self),
            None => std::borrow::Cow::Owned(self.refine_and_unwrap()?),
        })
    }

    /// Branch-tracked change of `arg ξ` from start to end.
    pub fn total_phase(&self) -> Result<f64, ContourError> {
        let path = self.refined()?;
        let u = path.unwrapped.as_ref().expect("refined path carries its phase");
        Ok(u[u.len() - 1] - u[0])
    }

    pub fn winding_number(&self) -> Result<i64, ContourError> {
        if !self.closed {
            return Err(ContourError::NotClosed);
        }
        let turns = self.total_phase()? / TAU;
        let winding = turns.round();
        let residue = (turns - winding).abs();
        if residue >= WINDING_RESIDUE {
            return Err(ContourError::UnresolvedWinding { residue });
        }
        Ok(winding as i64)
    }

    /// `∫ dξ/ξ` along the path, summed over the chords between refined
    /// samples.
    pub fn log_integral(&self, cfg: &QuadratureConfig) -> Result<Complex64, ContourError> {
        let path = self.refined()?;
        let quad = Quadrature::new(cfg)?;
        let mut total = Complex64::new(0.0, 0.0);
        for w in path.samples.windows(2) {
            let (a, b) = (w[0].1, w[1].1);
            let d = b - a;
            total += quad.integrate(0.0, 1.0, |s| d / (a + d * s));
        }
        Ok(total)
    }

    /// Writes `tau,re,im` rows with a header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), ContourError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["tau", "re", "im"])?;
        for &(t, z) in &self.samples {
            w.write_record([format!("{t:.14e}"), format!("{:.14e}", z.re), format!("{:.14e}", z.im)])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, closed: bool) -> Result<Self, ContourError> {
        let mut r = csv::Reader::from_reader(reader);
        let mut samples = Vec::new();
        for record in r.deserialize() {
            let (tau, re, im): (f64, f64, f64) = record?;
            samples.push((tau, Complex64::new(re, im)));
        }
        if samples.len() < 2 {
            return Err(ContourError::TooFewSamples);
        }
        Ok(Self { samples, closed, generator: None, unwrapped: None })
    }
}
