use super::TransportError;
use crate::contour::{ComplexPath, NEAR_POLE};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One path of a family with its action and magnitude ratio `|Ψ₂|/|Ψ₁|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub samples: Vec<(f64, Complex64)>,
    pub action: f64,
    pub magnitude_ratio: f64,
}

impl FamilyMember {
    /// A member whose action is `ħ` times the branch-tracked phase change
    /// along `path`.
    pub fn along(path: &ComplexPath, hbar: f64) -> Result<Self, TransportError> {
        Ok(Self {
            samples: path.samples().to_vec(),
            action: hbar * path.total_phase()?,
            magnitude_ratio: path.end().norm() / path.start().norm(),
        })
    }

    pub fn with_action(path: &ComplexPath, action: f64) -> Self {
        Self {
            samples: path.samples().to_vec(),
            action,
            magnitude_ratio: path.end().norm() / path.start().norm(),
        }
    }

    fn start(&self) -> Complex64 {
        self.samples[0].1
    }

    fn end(&self) -> Complex64 {
        self.samples[self.samples.len() - 1].1
    }
}

/// Paths sharing the end points `ξ₁`, `ξ₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFamily {
    pub xi1: Complex64,
    pub xi2: Complex64,
    pub members: Vec<FamilyMember>,
}

impl TrajectoryFamily {
    pub fn new(xi1: Complex64, xi2: Complex64, members: Vec<FamilyMember>) -> Result<Self, TransportError> {
        let family = Self { xi1, xi2, members };
        family.validate()?;
        Ok(family)
    }

    /// `n` rotations `ξ₁e^{iθs}` with `θ = arg(ξ₂/ξ₁) + 2πj`, `j = 0..n`.
    pub fn rotations(xi1: Complex64, xi2: Complex64, n: usize, hbar: f64) -> Result<Self, TransportError> {
        let base = (xi2 / xi1).arg();
        let scale = xi2.norm() / xi1.norm();
        let members = (0..n)
            .map(|j| {
                let theta = base + std::f64::consts::TAU * j as f64;
                let path = ComplexPath::from_fn(move |s| xi1 * scale.powf(s) * Complex64::from_polar(1.0, theta * s), 0.0, 1.0, 8)?;
                let mut member = FamilyMember::along(&path, hbar)?;
                // Pin the end point exactly so the family shares it.
                if let Some(last) = member.samples.last_mut() {
                    last.1 = xi2;
                }
                Ok(member)
            })
            .collect::<Result<Vec<_>, TransportError>>()?;
        Self::new(xi1, xi2, members)
    }

    pub fn validate(&self) -> Result<(), TransportError> {
        for m in &self.members {
            if m.samples.len() < 2 {
                return Err(TransportError::InvalidConfig("family paths need two samples".into()));
            }
            for (want, got) in [(self.xi1, m.start()), (self.xi2, m.end())] {
                let gap = (want - got).norm();
                if gap > NEAR_POLE * want.norm().max(1.0) {
                    return Err(TransportError::EndpointMismatch { gap });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, TransportError> {
        serde_json::to_string_pretty(self).map_err(|e| TransportError::InvalidConfig(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, TransportError> {
        let family: Self = serde_json::from_str(text).map_err(|e| TransportError::InvalidConfig(e.to_string()))?;
        family.validate()?;
        Ok(family)
    }
}

/// `(1/N) Σ |Ψ₁₂[ξ]| e^{iS̃₁₂[ξ]/ħ}`.
pub fn path_sum(family: &TrajectoryFamily, hbar: f64) -> Result<Complex64, TransportError> {
    if family.members.is_empty() {
        return Err(TransportError::EmptyFamily);
    }
    let total: Complex64 = family
        .members
        .iter()
        .map(|m| Complex64::from_polar(m.magnitude_ratio, m.action / hbar))
        .sum();
    Ok(total / family.members.len() as f64)
}
