//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Expected values are computed here from closed
//! forms, independently of the library code paths where possible.

use lnpsi::conformal::{area_integral, forward_map, jacobian, JacobianMode, StripDomain};
use lnpsi::contour::ComplexPath;
use lnpsi::madelung::{continuity_residual, PhysicalConstants, WaveModel};
use lnpsi::numerics::{fd_divergence, fd_laplacian, FdConfig, FdOrder, Point3, QuadratureConfig};
use lnpsi::quantization::{
    bohr_model, circulation_of_angle_gradient, dirac_flux_and_charge, dirac_potential, loop_action_decomposition,
    momentum_loop_integral, LoopSpec,
};
use lnpsi::runner::{emit_report, run_scenario, ScenarioConfig, ScenarioKind};
use lnpsi::transport::{
    evolution_operator, integrate_characteristic, path_sum, stationary_continuity_residual, FamilyMember,
    TrajectoryFamily,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within_time(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, format!("took {:.2} s, limit {limit} s", elapsed.as_secs_f64()))
}

/// Off-axis points in a shell `0.3 < r < 5`, `ρ ≥ 0.2`.
fn off_axis_points(seed: u64, n: usize) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point3::from_spherical(rng.gen_range(0.3..5.0), rng.gen_range(-1.0f64..1.0).acos(), rng.gen_range(0.0..TAU));
        if p.rho() >= 0.2 {
            out.push(p);
        }
    }
    out
}

fn accurate_fd() -> FdConfig {
    FdConfig::default().with_order(FdOrder::Fourth).with_richardson(true).with_scale(1.0).with_pole_exclusion(1e-6)
}

fn circulation() -> Verdict {
    const TOL: f64 = 1e-10;
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in [-3, -2, -1, 1, 2, 3] {
        let c = circulation_of_angle_gradient(&LoopSpec::new(1.0, k)).map_err(|e| e.to_string())?;
        worst = worst.max((c - TAU * f64::from(k)).abs());
    }
    ensure(worst < TOL, format!("max |∮ − 2πk| = {worst:e}"))?;
    within_time(start.elapsed(), 1.0)?;
    Ok(format!("max |∮ − 2πk| = {worst:.2e} < {TOL:e}"))
}

fn jacobian_law() -> Verdict {
    const LAW_TOL: f64 = 4.0 * f64::EPSILON;
    const MIN_ORDER: f64 = 1.9;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let m = Complex64::new(rng.gen_range(-10.0..5.0), rng.gen_range(-4.0 * PI..4.0 * PI));
        let e_s = m.re.exp();
        let psi2 = forward_map(m).norm_sqr();
        let four_j = 4.0 * jacobian(m, JacobianMode::Analytic);
        worst = worst.max(((psi2 - e_s) / e_s).abs()).max(((four_j - e_s) / e_s).abs());
    }
    ensure(worst < LAW_TOL, format!("max rel |Ψ|² vs 4J vs e^S = {worst:e}"))?;
    let mut min_order = f64::INFINITY;
    for m in [Complex64::new(0.3, 0.7), Complex64::new(-2.0, 5.0), Complex64::new(1.5, -9.0)] {
        let exact = m.re.exp() / 4.0;
        let err = |h: f64| (jacobian(m, JacobianMode::FiniteDifference { step: h }) - exact).abs();
        let (coarse, fine) = (err(0.2), err(0.1));
        ensure(fine < coarse, format!("no convergence at {m}"))?;
        min_order = min_order.min((coarse / fine).log2());
    }
    ensure(min_order >= MIN_ORDER, format!("observed order {min_order:.3}"))?;
    within_time(start.elapsed(), 5.0)?;
    Ok(format!("max rel error {worst:.2e} over 1e4 points, observed FD order {min_order:.2} ≥ {MIN_ORDER}"))
}

fn area() -> Verdict {
    const TOL: f64 = 1e-8;
    let start = Instant::now();
    let d = StripDomain::new(f64::NEG_INFINITY, 0.0, 0.0, 4.0 * PI).map_err(|e| e.to_string())?;
    let a = area_integral(&d, &QuadratureConfig::gauss(4, 16)).map_err(|e| e.to_string())?;
    let rel = ((a - PI) / PI).abs();
    ensure(rel < TOL, format!("area {a} vs π, rel {rel:e}"))?;
    within_time(start.elapsed(), 1.0)?;
    Ok(format!("area = {a:.15}, rel error {rel:.2e} < {TOL:e}"))
}

fn path_independence() -> Verdict {
    const RESIDUE: f64 = 1e-6;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let quad = QuadratureConfig::gauss(2, 12);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let mut z = || Complex64::from_polar(rng.gen_range(-1.0f64..1.0).exp(), rng.gen_range(-PI..PI));
        let (a, b) = (z(), z());
        let (bulge1, bulge2) = (z() * 0.3, z() * 0.3);
        let (s1, s2): (i64, i64) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        let err = |e: lnpsi::contour::ContourError| format!("pair {i}: {e}");
        let g1 = ComplexPath::log_linear(a, b, s1, bulge1, 16).map_err(err)?;
        let g2 = ComplexPath::log_linear(a, b, s2, bulge2, 16).map_err(err)?;
        let d = (g1.log_integral(&quad).map_err(err)? - g2.log_integral(&quad).map_err(err)?) / Complex64::new(0.0, TAU);
        let n = d.re.round();
        let residue = (d - n).norm();
        worst = worst.max(residue);
        let winding = g1.concat(&g2.reversed()).and_then(|c| c.close()).and_then(|c| c.winding_number()).map_err(err)?;
        ensure(n as i64 == s1 - s2, format!("pair {i}: integer {n} vs sheet gap {}", s1 - s2))?;
        ensure(n as i64 == winding, format!("pair {i}: integer {n} vs winding {winding}"))?;
    }
    ensure(worst < RESIDUE, format!("max residue {worst:e}"))?;
    within_time(start.elapsed(), 10.0)?;
    Ok(format!("100 pairs, max residue {worst:.2e} < {RESIDUE:e}, integers match windings"))
}

/// `Δ√f/√f` for `√f ∝ r^a e^{−br}`.
fn radial_laplacian_ratio(r: f64, a: f64, b: f64) -> f64 {
    a * (a + 1.0) / (r * r) - 2.0 * b * (a + 1.0) / r + b * b
}

fn schrodinger() -> Verdict {
    const TOL: f64 = 1e-6;
    let start = Instant::now();
    let consts = PhysicalConstants::natural();
    let (nu, kappa, k) = (1.0, 1.0, 1);
    let energy = -kappa * kappa / 2.0;
    let (a, b) = (nu / 2.0, kappa / 2.0);
    let c = 0.5;
    let fd = accurate_fd();
    let points = off_axis_points(5, 1000);
    let mut worst = [0.0f64; 2];
    for (slot, model) in [WaveModel::central_field(nu, kappa, k, energy), WaveModel::dirac_string(nu, kappa, k, energy)].iter().enumerate() {
        let psi = |q: Point3| model.psi(q, 0.0, &consts).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        for &p in &points {
            let (r, rho) = (p.norm(), p.rho());
            let w = psi(p);
            let lap: Complex64 = fd_laplacian(&psi, p, &fd).map_err(|e| e.to_string())?;
            // Potential from the closed form of each model.
            let (u, magnetic) = if slot == 0 {
                let u = energy + c * (radial_laplacian_ratio(r, a, b) - f64::from(k * k) / (rho * rho));
                (u, Complex64::new(0.0, 0.0))
            } else {
                let u = energy + c * radial_laplacian_ratio(r, a, b);
                let av = p.e_phi() * (-f64::from(k) / rho);
                let comp = |axis| lnpsi::numerics::fd_partial(&psi, p, axis, &fd).map_err(|e| e.to_string());
                let grad = [comp(0)?, comp(1)?, comp(2)?];
                let a_dot_grad = grad[0] * av.x + grad[1] * av.y + grad[2] * av.z;
                (u, -Complex64::i() * a_dot_grad)
            };
            let time = w * energy;
            let kinetic = lap * c;
            let potential = w * u;
            let residual = (time + kinetic + magnetic - potential).norm();
            let scale = time.norm() + kinetic.norm() + magnetic.norm() + potential.norm();
            worst[slot] = worst[slot].max(residual / scale);
        }
    }
    ensure(worst[0] < TOL && worst[1] < TOL, format!("central {:e}, dirac {:e}", worst[0], worst[1]))?;
    within_time(start.elapsed(), 30.0)?;
    Ok(format!("1e3 points: central-field {:.2e}, Dirac string {:.2e} < {TOL:e}", worst[0], worst[1]))
}

fn stationarity() -> Verdict {
    const TOL: f64 = 1e-6;
    const CONTROL_FACTOR: f64 = 1e6;
    let consts = PhysicalConstants::natural();
    // f = r e^{−r}/(24π) for ν = κ = 1.
    let density = |p: Point3| p.norm() * (-p.norm()).exp() / (24.0 * PI);
    let control = |p: Point3| density(p) * (1.0 + 0.5 * p.x / p.norm());
    let points = off_axis_points(6, 1000);
    let fd = accurate_fd();
    let good = stationary_continuity_residual(density, 1, &points, &consts, &fd).map_err(|e| e.to_string())?;
    let bad = stationary_continuity_residual(control, 1, &points, &consts, &fd).map_err(|e| e.to_string())?;
    let model = WaveModel::central_field(1.0, 1.0, 1, -0.5);
    let mut continuity = 0.0f64;
    for &p in &points {
        continuity = continuity.max(continuity_residual(&model, p, 0.0, &consts, &fd).map_err(|e| e.to_string())?);
    }
    ensure(good.flow < TOL && good.divergence < TOL, format!("residuals {good:?}"))?;
    ensure(continuity < TOL, format!("continuity {continuity:e}"))?;
    let factor = bad.flow.min(bad.divergence) / good.max().max(f64::EPSILON);
    ensure(factor >= CONTROL_FACTOR, format!("control only {factor:e} times worse"))?;
    Ok(format!(
        "(v,∇f) {:.2e}, div[f∇u] {:.2e}, continuity {continuity:.2e}; control worse by {factor:.1e}",
        good.flow, good.divergence
    ))
}

fn characteristics() -> Verdict {
    const TOL: f64 = 1e-8;
    let start = Instant::now();
    let consts = PhysicalConstants::natural();
    let origin = Point3::new(1.2, -0.5, 0.7);
    let density = |p: Point3| p.norm() * (-p.norm()).exp();
    let c = integrate_characteristic(origin, 1, &consts, 1024, 1.0, density).map_err(|e| e.to_string())?;
    let rho0 = origin.rho();
    let end = *c.positions.last().ok_or("empty trajectory")?;
    let closure = (end - origin).norm() / rho0;
    let expected = TAU * rho0 * rho0;
    let period = c.measured_period.ok_or("no period")?;
    let period_err = ((period - expected) / expected).abs();
    ensure(closure < TOL, format!("returns within {closure:e}"))?;
    ensure(c.radius_drift < TOL, format!("radius drift {:e}", c.radius_drift))?;
    ensure(c.density_spread < TOL, format!("density spread {:e}", c.density_spread))?;
    ensure(period_err < TOL, format!("period {period} vs {expected}"))?;
    within_time(start.elapsed(), 5.0)?;
    Ok(format!(
        "closure {closure:.1e}, drift {:.1e}, f-spread {:.1e}, period error {period_err:.1e}",
        c.radius_drift, c.density_spread
    ))
}

fn loop_quantization() -> Verdict {
    const RADIUS_TOL: f64 = 1e-10;
    const BALANCE_TOL: f64 = 1e-8;
    let consts = PhysicalConstants::natural();
    let h = TAU;
    let energy = -0.5;
    let mut radius_dev = 0.0f64;
    for k in -3..=3 {
        let model = WaveModel::central_field(1.0, 1.0, k, energy);
        for r in [0.1, 0.25, 1.0, 3.7, 10.0] {
            let q = momentum_loop_integral(&model, &LoopSpec::new(r, 1), &consts).map_err(|e| e.to_string())?;
            ensure(q.recovered_k == i64::from(k) && q.pass, format!("k={k}, R={r}: recovered {}", q.recovered_k))?;
            if k != 0 {
                let want = h * f64::from(k);
                radius_dev = radius_dev.max(((q.value - want) / want).abs());
            }
        }
    }
    ensure(radius_dev < RADIUS_TOL, format!("radius dependence {radius_dev:e}"))?;
    let mut balance = 0.0f64;
    for (k, r) in [(1, 1.0), (2, 0.5), (-3, 2.0)] {
        let model = WaveModel::central_field(1.0, 1.0, k, energy);
        let la = loop_action_decomposition(&model, &LoopSpec::new(r, 1), &consts).map_err(|e| e.to_string())?;
        let period = TAU * r * r / f64::from(k.abs());
        let closed = (la.action - (h * f64::from(k) - energy * period)).abs() / h;
        balance = balance.max(la.balance).max(closed);
    }
    ensure(balance < BALANCE_TOL, format!("decomposition off by {balance:e}"))?;
    Ok(format!("k = −3..3 recovered, radius dependence {radius_dev:.1e}, hk − H₀T balance {balance:.1e}"))
}

fn bohr() -> Verdict {
    const REF_TOL: f64 = 1e-4;
    const STATIONARY_TOL: f64 = 1e-6;
    let consts = PhysicalConstants::si();
    let h1 = bohr_model(1, 1, &consts).map_err(|e| e.to_string())?;
    let r_err = ((h1.radius - 5.29177e-11) / 5.29177e-11).abs();
    let e_err = ((h1.energy_ev + 13.6057) / 13.6057).abs();
    ensure(r_err < REF_TOL, format!("r₁ = {:e}", h1.radius))?;
    ensure(e_err < REF_TOL, format!("E₁ = {} eV", h1.energy_ev))?;
    // Constant-folded closed forms from CODATA 2018.
    let (hbar, m, e, eps0) = (1.054_571_817e-34, 9.109_383_701_5e-31, 1.602_176_634e-19, 8.854_187_812_8e-12);
    let mut worst = 0.0f64;
    for z in 1..=3u32 {
        for k in 1..=5u32 {
            let l = bohr_model(z, k, &consts).map_err(|e| e.to_string())?;
            let (zf, kf) = (f64::from(z), f64::from(k));
            let r = 4.0 * PI * eps0 * hbar * hbar * kf * kf / (zf * m * e * e);
            let en = -zf * zf * m * e.powi(4) / (32.0 * PI * PI * eps0 * eps0 * hbar * hbar * kf * kf);
            ensure(((l.radius - r) / r).abs() < 1e-12, format!("Z={z} k={k}: r {} vs {r}", l.radius))?;
            ensure(((l.energy - en) / en).abs() < 1e-12, format!("Z={z} k={k}: E {} vs {en}", l.energy))?;
            worst = worst.max(((l.stationary_radius - r) / r).abs());
        }
    }
    ensure(worst < STATIONARY_TOL, format!("stationary point off by {worst:e}"))?;
    Ok(format!(
        "r₁ = {:.6e} m, E₁ = {:.5} eV, FD stationary point within {worst:.1e}",
        h1.radius, h1.energy_ev
    ))
}

fn dirac() -> Verdict {
    const FLUX_TOL: f64 = 1e-10;
    const DIV_TOL: f64 = 1e-6;
    let consts = PhysicalConstants::si();
    let (hbar, q, mu0) = (consts.hbar, consts.charge, consts.mu0);
    let mut flux_dev = 0.0f64;
    for k in -5..=5 {
        let want = -TAU * hbar * f64::from(k) / q;
        for r in [1e-12, 1e-10, 1e-9, 3e-8, 1e-6] {
            let c = dirac_flux_and_charge(&LoopSpec::new(r, 1), k, &consts).map_err(|e| e.to_string())?;
            if k != 0 {
                flux_dev = flux_dev.max(((c.flux - want) / want).abs());
            }
            ensure(c.recovered_k() == Some(i64::from(k)), format!("k={k}, R={r}: {}", c.dirac_k_wb))?;
            ensure(c.q_m_wb == mu0 * c.q_m_am || ((c.q_m_wb - mu0 * c.q_m_am) / c.q_m_wb).abs() <= 2.0 * f64::EPSILON,
                format!("k={k}: {} Wb vs {} A·m", c.q_m_wb, c.q_m_am))?;
        }
    }
    ensure(flux_dev < FLUX_TOL, format!("flux off by {flux_dev:e}"))?;
    let mut div = 0.0f64;
    for p in off_axis_points(10, 200) {
        let cfg = FdConfig::default().with_order(FdOrder::Fourth).with_step(1e-3).with_scale(p.rho());
        let field = |x: Point3| dirac_potential(x, 2, &consts);
        let d = fd_divergence(&field, p, &cfg).map_err(|e| e.to_string())?;
        div = div.max(d.abs() * p.rho() / field(p).norm());
    }
    ensure(div < DIV_TOL, format!("div A {div:e}"))?;
    Ok(format!("flux radius-independent to {flux_dev:.1e}, k = −5..5 recovered, div A {div:.1e}"))
}

fn evolution() -> Verdict {
    const ROTATION_TOL: f64 = 1e-14;
    const CANCEL_TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut z = || Complex64::from_polar(rng.gen_range(-2.0f64..2.0).exp(), rng.gen_range(-PI..PI));
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b) = (z(), z());
        worst = worst.max((evolution_operator(a, b) * a - b).norm() / b.norm());
    }
    ensure(worst < ROTATION_TOL, format!("Ψ₁₂Ψ₁ vs Ψ₂ {worst:e}"))?;
    let (a, b) = (z(), z());
    let single = TrajectoryFamily::rotations(a, b, 1, 1.0).map_err(|e| e.to_string())?;
    let s = path_sum(&single, 1.0).map_err(|e| e.to_string())?;
    let single_err = (s - b / a).norm() / (b / a).norm();
    ensure(single_err < ROTATION_TOL, format!("single path {single_err:e}"))?;
    let end = Complex64::from_polar(1.0, 0.9);
    let path = ComplexPath::from_fn(move |t| Complex64::from_polar(1.0, 0.9 * t), 0.0, 1.0, 8).map_err(|e| e.to_string())?;
    let hbar = 1.054_571_817e-34;
    let family = TrajectoryFamily::new(
        Complex64::new(1.0, 0.0),
        end,
        vec![FamilyMember::with_action(&path, 0.9 * hbar), FamilyMember::with_action(&path, 0.9 * hbar + PI * hbar)],
    )
    .map_err(|e| e.to_string())?;
    let cancel = path_sum(&family, hbar).map_err(|e| e.to_string())?.norm();
    ensure(cancel < CANCEL_TOL, format!("two-path magnitude {cancel:e}"))?;
    Ok(format!("rotation {worst:.1e}, single path {single_err:.1e}, πħ pair |sum| = {cancel:.1e}"))
}

fn strip_timestamp(json: &str) -> Result<String, String> {
    let mut v: serde_json::Value = serde_json::from_str(json).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("report is not an object")?.remove("timestamp");
    Ok(v.to_string())
}

fn determinism() -> Verdict {
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    for kind in ScenarioKind::ALL {
        let mut texts = Vec::new();
        for dir in &dirs {
            let report = run_scenario(ScenarioConfig::default_for(kind)).map_err(|e| e.to_string())?;
            let out = dir.path().join(kind.name());
            emit_report(&report, &out).map_err(|e| e.to_string())?;
            let text = std::fs::read_to_string(out.join("report.json")).map_err(|e| e.to_string())?;
            texts.push(strip_timestamp(&text)?);
        }
        ensure(texts[0] == texts[1], format!("{kind}: report.json differs"))?;
        for name in ["summary.csv", "fields.csv", "characteristic.csv", "loop.csv"] {
            let read = |d: &tempfile::TempDir| std::fs::read(d.path().join(kind.name()).join(name)).ok();
            ensure(read(&dirs[0]) == read(&dirs[1]), format!("{kind}: {name} differs"))?;
        }
    }
    Ok("all six scenarios byte-identical apart from the timestamp block".into())
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("circulation of the angle gradient", circulation),
        ("Jacobian law", jacobian_law),
        ("area identity", area),
        ("path independence mod 2πi", path_independence),
        ("Schrödinger identity", schrodinger),
        ("continuity and stationarity", stationarity),
        ("characteristics", characteristics),
        ("loop quantization", loop_quantization),
        ("Bohr model", bohr),
        ("Dirac string", dirac),
        ("evolution and path sum", evolution),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
