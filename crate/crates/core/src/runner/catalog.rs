use super::{CheckSpec, Comparison, ScenarioConfig, ScenarioKind};
use Comparison::{Absolute, AtLeast, AtMost, Relative};

/// Bohr rows covered by a configuration.
pub(crate) fn bohr_rows(cfg: &ScenarioConfig) -> Vec<(u32, u32)> {
    let zs: Vec<u32> = match cfg.model.z {
        Some(z) => vec![z],
        None => (1..=3).collect(),
    };
    zs.into_iter().flat_map(|z| (1..=5).map(move |k| (z, k))).collect()
}

/// Every check a scenario reports, with its anchor and default tolerance.
pub fn catalog(cfg: &ScenarioConfig) -> Vec<CheckSpec> {
    fn c(name: impl Into<String>, anchor: &'static str, tol: f64, cmp: Comparison) -> CheckSpec {
        CheckSpec::new(name, anchor, tol, cmp)
    }
    match cfg.scenario {
        Some(ScenarioKind::CentralField) => vec![
            c("central.velocity", "⟨v⟩ = −α∇Φ = (ħk/mρ) e_ϕ", 1e-12, AtMost),
            c("central.divergence", "Q = div⟨v⟩ = 0", 1e-10, AtMost),
            c("central.continuity", "∂f/∂t + div(f⟨v⟩) = 0", 1e-6, AtMost),
            c("central.schrodinger.analytic", "iħ∂Ψ/∂t + (ħ²/2m)ΔΨ − UΨ = 0", 1e-6, AtMost),
            c("central.schrodinger.fd", "iħ∂Ψ/∂t + (ħ²/2m)ΔΨ − UΨ = 0", 1e-6, AtMost),
            c("central.potential", "U = E₀ + a(θ)/r² − b/r", 1e-10, AtMost),
            c("central.chi", "eχ = E − ħ²k²/(2mρ²)", 1e-10, AtMost),
            c("central.hamilton_jacobi", "(ħ/2)∂Φ/∂t + H̃ = 0", 1e-10, AtMost),
            c("central.total_energy", "W = m|⟨v⟩|²/2 + eχ = E", 1e-10, AtMost),
            c("central.jacobian_continuity", "∂J/∂t + div(J⟨v⟩) = 0", 1e-6, AtMost),
            c("central.potential_velocity_fd", "⟨v_p⟩ = −α∇Φ off the branch cut", 1e-6, AtMost),
            c("central.normalization", "∫ f dV = 1", 1e-6, Relative),
            c("central.angular_momentum", "ρ × ⟨p⟩ = ħk e_z", 1e-12, AtMost),
            c("central.action_phase", "ħΦ/2 = ∫L̃ dt along a flow line", 1e-6, AtMost),
            c("central.lagrangian", "L̃ = (ṙ, p_p) − H̃ = ħ d(arg Ψ)/dt", 1e-6, AtMost),
            c("central.complex_action", "Ln(Ψ₂/Ψ₁) = −½∫Q dτ + (i/ħ)∫L̃ dτ", 1e-6, AtMost),
            c("central.stationary.flow", "(⟨v⟩, ∇f) = 0", 1e-6, AtMost),
            c("central.stationary.divergence", "div[f∇u] = 0", 1e-6, AtMost),
            c("central.stationary.negative_control", "non-axisymmetric density is not stationary", 0.0, AtLeast),
            c("central.characteristic.radius", "ρ(t) = ρ₀ on a characteristic", 1e-8, AtMost),
            c("central.characteristic.density", "f constant on a characteristic", 1e-8, AtMost),
            c("central.characteristic.period", "T = 2πmρ₀²/(ħk)", 1e-8, Relative),
            c("central.loop.quantization", "∮(⟨p⟩, dr) = 2πħk", 1e-6, AtMost),
            c("central.loop.k_recovery", "∮(⟨p⟩, dr)/h ∈ ℤ recovers k for k = −3..3", 0.0, Absolute),
            c("central.loop.radius_independence", "∮(⟨p⟩, dr) independent of R", 1e-10, AtMost),
            c("central.loop.action_balance", "∮(⟨p_p⟩, dr) = ∫L̃ dt + ∫H̃ dt", 1e-8, AtMost),
            c("central.loop.closed_form", "∫L̃ dt = hk − H₀T", 1e-8, AtMost),
        ],
        Some(ScenarioKind::DiracString) => vec![
            c("dirac.velocity", "⟨v⟩ = γA = (ħk/mρ) e_ϕ with ⟨v_p⟩ = 0", 1e-12, AtMost),
            c("dirac.continuity", "∂f/∂t + div(f⟨v⟩) = 0", 1e-6, AtMost),
            c("dirac.schrodinger.analytic", "iħ∂Ψ/∂t + (ħ²/2m)ΔΨ + (q/m)(A, p̂)Ψ − UΨ = 0", 1e-6, AtMost),
            c("dirac.schrodinger.fd", "iħ∂Ψ/∂t + (ħ²/2m)ΔΨ + (q/m)(A, p̂)Ψ − UΨ = 0", 1e-6, AtMost),
            c("dirac.chi", "eχ = E − ħ²k²/(2mρ²)", 1e-10, AtMost),
            c("dirac.hamilton_jacobi", "(ħ/2)∂Φ/∂t + H̃ = 0", 1e-10, AtMost),
            c("dirac.divergence_a", "div A = 0 off the axis", 1e-6, AtMost),
            c("dirac.curl_a", "curl A = 0 off the axis", 1e-6, AtMost),
            c("dirac.flux", "∮(A, dl) = −2πħk/q_e", 1e-10, AtMost),
            c("dirac.flux.radius_independence", "∮(A, dl) independent of R", 1e-10, AtMost),
            c("dirac.charge.k", "q_e q_m/(2πħ) = k", 0.0, Absolute),
            c("dirac.charge.k_sweep", "q_e q_m/(2πħ) recovers k for k = −5..5", 0.0, Absolute),
            c("dirac.charge.units", "q_m[Wb] = μ₀ q_m[A·m]", 1e-15, AtMost),
            c("dirac.loop.flux_term", "∮(⟨p⟩, dr) = −q_e∮(A, dr) = 2πħk", 1e-10, AtMost),
            c("dirac.loop.phase_term", "ħ∮(∇φ, dr) = 0", 1e-12, AtMost),
            c("dirac.loop.outside", "∮(A, dl) = 0 for loops not around the axis", 1e-10, AtMost),
        ],
        Some(ScenarioKind::ConformalMap) => vec![
            c("conformal.jacobian_law", "|Ψ|² = 4J", 1e-14, AtMost),
            c("conformal.jacobian_fd", "J = e^S/4 by differences", 1e-7, AtMost),
            c("conformal.jacobian_fd_order", "observed order of the differenced Jacobian", 0.0, AtLeast),
            c("conformal.cauchy_riemann", "∂Ψ/∂Φ = i ∂Ψ/∂S", 1e-8, AtMost),
            c("conformal.univalent", "e^{M/2} univalent on Φ-width 4π", 0.0, Absolute),
            c("conformal.not_univalent", "e^{M/2} not univalent on Φ-width 6π", 0.0, Absolute),
            c("conformal.witness", "e^{M/2} = e^{(M+4πi)/2}", 1e-12, AtMost),
            c("conformal.area", "∬ e^S/4 dS dΦ = π over S < 0, 0 < Φ < 4π", 1e-8, Relative),
            c("conformal.area_additivity", "area over 0 < Φ < 2π = π/2", 1e-10, Relative),
        ],
        Some(ScenarioKind::ContourSuite) => vec![
            c("contour.circulation", "∮(∇ϕ, dρ) = 2πk for k = −3..3", 1e-10, AtMost),
            c("contour.winding.log_integral", "∮ dξ/ξ = 2πik", 1e-9, AtMost),
            c("contour.winding.count", "unwrapped phase/2π = k", 0.0, Absolute),
            c("contour.closed_real_part", "Re ∮ dξ/ξ = 0", 1e-9, AtMost),
            c("contour.path_independence", "∫_Γ₁ dξ/ξ − ∫_Γ₂ dξ/ξ ∈ 2πiℤ", 1e-6, AtMost),
            c("contour.path_independence.winding", "(∫_Γ₁ − ∫_Γ₂)/(2πi) = winding of Γ₁Γ₂⁻¹", 0.0, Absolute),
            c("contour.mirror", "½∫_{1/Ψ₁₂}^{Ψ₁₂} dξ/ξ = ∫_1^{Ψ₁₂} dξ/ξ", 1e-9, AtMost),
            c("contour.z12_split", "Z₁₂ = ½S₁₂ + iΦ₁₂/2 with S₁₂ = ln|Ψ₁₂|²", 1e-10, AtMost),
        ],
        Some(ScenarioKind::BohrTable) => {
            let mut v = Vec::new();
            for (z, k) in bohr_rows(cfg) {
                v.push(c(format!("bohr.z{z}.k{k}.radius"), "r_k = 4πε₀ħ²k²/(Zme²)", 1e-4, Relative));
                v.push(c(format!("bohr.z{z}.k{k}.energy_ev"), "E_k = −Z²me⁴/(32π²ε₀²ħ²k²)", 1e-4, Relative));
                v.push(c(format!("bohr.z{z}.k{k}.stationary_radius"), "dW/dr = 0 at r = r_k", 1e-6, Relative));
                v.push(c(format!("bohr.z{z}.k{k}.energy_at_radius"), "W(r_k) = E_k", 1e-10, Relative));
            }
            v
        }
        Some(ScenarioKind::PathDemo) => vec![
            c("path.rotation", "Ψ₁₂Ψ₁ = Ψ₂", 1e-14, AtMost),
            c("path.rotate_phase", "|Ψe^{iΔφ}| = |Ψ|, arg shifts by Δφ", 1e-13, AtMost),
            c("path.single_path", "one-path sum equals Ψ₁₂", 1e-14, AtMost),
            c("path.coherent_family", "|(1/N) Σ e^{iS̃/ħ}| = 1 for rotations", 1e-12, AtMost),
            c("path.half_quantum", "actions differing by πħ cancel", 1e-12, AtMost),
            c("path.family_round_trip", "family survives a JSON round trip", 0.0, Absolute),
        ],
        None => Vec::new(),
    }
}
