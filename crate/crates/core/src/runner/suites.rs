use super::catalog::bohr_rows;
use super::{DataFiles, Outcome, ScenarioConfig, ScenarioKind, Table};
use crate::conformal::{self, forward_map, jacobian, JacobianMode, StripDomain};
use crate::contour::{self, distance_mod_2pi_i, ComplexPath};
use crate::madelung::{
    self, classical_potential_chi, decompose, energy_and_hj, normalized, CentralPotential, Derivatives, MadelungError,
    PhysicalConstants, Trajectory, WaveModel,
};
use crate::numerics::{FdConfig, FdOrder, Point3, QuadratureConfig};
use crate::quantization::{self, LoopSpec};
use crate::transport::{self, FamilyMember, TrajectoryFamily};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::fmt::Display;

/// Random points keep at least this many characteristic lengths from OZ.
const AXIS_EXCLUSION: f64 = 0.2;
/// Radial shell of the random points, in characteristic lengths.
const SHELL: (f64, f64) = (0.3, 5.0);
/// The non-stationary control must fail by this factor.
const CONTROL_FACTOR: f64 = 1e6;
const MIN_FD_ORDER: f64 = 1.9;
/// Residuals below this are treated as round-off when forming ratios.
const RESIDUAL_FLOOR: f64 = 1e-16;

type Group<'a> = Box<dyn Fn() -> Vec<Outcome> + Send + Sync + 'a>;

pub(crate) fn run(kind: ScenarioKind, cfg: &ScenarioConfig) -> (Vec<Outcome>, DataFiles) {
    match kind {
        ScenarioKind::CentralField => central_field(cfg),
        ScenarioKind::DiracString => dirac_string(cfg),
        ScenarioKind::ConformalMap => conformal_map(cfg),
        ScenarioKind::ContourSuite => contour_suite(cfg),
        ScenarioKind::BohrTable => bohr_table(cfg),
        ScenarioKind::PathDemo => path_demo(cfg),
    }
}

fn run_groups(groups: Vec<Group<'_>>) -> Vec<Outcome> {
    groups.par_iter().flat_map_iter(|g| g()).collect()
}

/// Largest value, with NaN winning so a broken sample cannot hide.
fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Evaluates `f` at every point in parallel and keeps the worst value. The
/// first error in point order wins, so failures are reproducible.
fn max_over<T, F, E>(items: &[T], f: F) -> Result<f64, String>
where
    T: Sync + std::fmt::Debug,
    F: Fn(&T) -> Result<f64, E> + Sync,
    E: Display,
{
    let values: Vec<Result<f64, String>> =
        items.par_iter().map(|x| f(x).map_err(|e| format!("at {x:?}: {e}"))).collect();
    values.into_iter().try_fold(0.0, |acc, v| v.map(|v| worst(acc, v)))
}

fn rng(cfg: &ScenarioConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

/// Points in a spherical shell around the origin, rejected at draw time when
/// they fall inside the axis exclusion cylinder.
fn draw_points(rng: &mut ChaCha8Rng, n: usize, length: f64) -> Vec<Point3> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let r = length * rng.gen_range(SHELL.0..SHELL.1);
        let cos_theta: f64 = rng.gen_range(-1.0..1.0);
        let phi = rng.gen_range(0.0..TAU);
        let p = Point3::from_spherical(r, cos_theta.acos(), phi);
        if p.rho() >= AXIS_EXCLUSION * length {
            out.push(p);
        }
    }
    out
}

fn random_complex(rng: &mut ChaCha8Rng, log_modulus: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(-log_modulus..log_modulus).exp(), rng.gen_range(-PI..PI))
}

fn fd_config(model: &WaveModel, consts: &PhysicalConstants) -> FdConfig {
    let mut fd = FdConfig::default()
        .with_order(FdOrder::Fourth)
        .with_richardson(true)
        .with_scale(model.characteristic_length(consts));
    if let Some(r) = model.pole_exclusion(consts) {
        fd = fd.with_pole_exclusion(r);
    }
    fd
}

fn vortex_params(cfg: &ScenarioConfig) -> (f64, f64, i32, f64) {
    let m = &cfg.model;
    // Completeness is established by validation.
    (m.nu.unwrap_or(1.0), m.kappa.unwrap_or(1.0), m.k.unwrap_or(1), m.energy.unwrap_or(-0.5))
}

/// `ħk/(mρ) e_ϕ`.
fn vortex_velocity(p: Point3, k: i32, consts: &PhysicalConstants) -> Point3 {
    p.e_phi() * (consts.hbar * f64::from(k) / (consts.mass * p.rho()))
}

/// Checks shared by both vortex models.
fn vortex_common<'a>(
    prefix: &'static str,
    model: &'a WaveModel,
    points: &'a [Point3],
    consts: &'a PhysicalConstants,
    fd: &'a FdConfig,
) -> Vec<Group<'a>> {
    let k = model.winding();
    let energy = model.energy(consts);
    vec![
        Box::new(move || {
            vec![Outcome::residual(
                format!("{prefix}.continuity"),
                max_over(points, |&p| madelung::continuity_residual(model, p, 0.0, consts, fd)),
            )]
        }),
        Box::new(move || {
            vec![Outcome::residual(
                format!("{prefix}.schrodinger.analytic"),
                max_over(points, |&p| madelung::schrodinger_residual(model, p, 0.0, consts, Derivatives::Analytic)),
            )]
        }),
        Box::new(move || {
            vec![Outcome::residual(
                format!("{prefix}.schrodinger.fd"),
                max_over(points, |&p| {
                    madelung::schrodinger_residual(model, p, 0.0, consts, Derivatives::FiniteDifference(*fd))
                }),
            )]
        }),
        Box::new(move || {
            let chi = max_over(points, |&p| -> Result<f64, MadelungError> {
                let rho = p.rho();
                let centrifugal = consts.hbar * consts.hbar * f64::from(k * k) / (2.0 * consts.mass * rho * rho);
                let expected = energy - centrifugal;
                let got = classical_potential_chi(model, p, 0.0, consts)?;
                Ok(normalized(got - expected, &[energy, centrifugal]))
            });
            let hj = max_over(points, |&p| energy_and_hj(model, p, 0.0, consts).map(|e| e.hj_residual));
            vec![
                Outcome::residual(format!("{prefix}.chi"), chi),
                Outcome::residual(format!("{prefix}.hamilton_jacobi"), hj),
            ]
        }),
    ]
}

fn fields_table(model: &WaveModel, points: &[Point3], consts: &PhysicalConstants) -> Table {
    let mut t = Table::new(&["x", "y", "z", "f", "S", "phase", "Phi", "vx", "vy", "vz", "Ax", "Ay", "Az", "Q", "U", "chi"]);
    for &p in points {
        let (Ok(m), Ok(u), Ok(chi)) = (
            decompose(model, p, 0.0, consts),
            madelung::potential_u(model, p, 0.0, consts),
            classical_potential_chi(model, p, 0.0, consts),
        ) else {
            continue;
        };
        let (v, a) = (m.velocity, m.vector_potential);
        t.push(vec![
            p.x, p.y, p.z, m.density, m.log_density, m.phase, m.velocity_potential, v.x, v.y, v.z, a.x, a.y, a.z,
            m.divergence, u, chi,
        ]);
    }
    t
}

fn central_field(cfg: &ScenarioConfig) -> (Vec<Outcome>, DataFiles) {
    let consts = cfg.constants();
    let (nu, kappa, k, energy) = vortex_params(cfg);
    let model = WaveModel::central_field(nu, kappa, k, energy);
    let len = model.characteristic_length(&consts);
    let fd = fd_config(&model, &consts);
    let points = draw_points(&mut rng(cfg), cfg.samples.points, len);
    let h = consts.planck();
    let (model, points, consts, fd) = (&model, &points[..], &consts, &fd);
    let central = CentralPotential::new(nu, kappa, k, energy, consts);
    let density = move |p: Point3| model.psi(p, 0.0, consts).map(|psi| psi.norm_sqr()).unwrap_or(f64::NAN);
    let start = Point3::new(1.5 * len, 0.0, 0.5 * len);
    let orbit = Trajectory::flow_line(model, start, 0.0, consts);
    let period = 2.0 * PI * consts.mass * start.rho().powi(2) / (consts.hbar * f64::from(k.abs()));
    let unit_loop = LoopSpec::new(len, 1);

    let mut groups = vortex_common("central", model, points, consts, fd);
    groups.push(Box::new(move || {
        let velocity = max_over(points, |&p| -> Result<f64, MadelungError> {
            let expected = vortex_velocity(p, k, consts);
            let m = decompose(model, p, 0.0, consts)?;
            Ok(normalized((m.velocity - expected).norm(), &[expected.norm()]))
        });
        let divergence = max_over(points, |&p| -> Result<f64, MadelungError> {
            let m = decompose(model, p, 0.0, consts)?;
            Ok(normalized(m.divergence, &[m.velocity.norm() / p.rho()]))
        });
        let potential = max_over(points, |&p| -> Result<f64, MadelungError> {
            let expected = central.at(p);
            Ok(normalized(madelung::potential_u(model, p, 0.0, consts)? - expected, &[expected, central.e0]))
        });
        let total = max_over(points, |&p| -> Result<f64, MadelungError> {
            let e = energy_and_hj(model, p, 0.0, consts)?;
            Ok(normalized(e.total_energy - energy, &[energy, e.kinetic]))
        });
        let angular = max_over(points, |&p| -> Result<f64, quantization::QuantizationError> {
            let l = quantization::angular_momentum(model, p, consts)?;
            let expected = Point3::new(0.0, 0.0, consts.hbar * f64::from(k));
            Ok(normalized((l - expected).norm(), &[expected.z]))
        });
        vec![
            Outcome::residual("central.velocity", velocity),
            Outcome::residual("central.divergence", divergence),
            Outcome::residual("central.potential", potential),
            Outcome::residual("central.total_energy", total),
            Outcome::residual("central.angular_momentum", angular),
        ]
    }));
    groups.push(Box::new(move || {
        let jc = max_over(points, |&p| conformal::jacobian_continuity_residual(model, p, 0.0, consts, fd));
        // Stencils straddling the φ = 0 cut are skipped rather than failed.
        let pv = max_over(points, |&p| -> Result<f64, MadelungError> {
            match madelung::potential_velocity_fd(model, p, 0.0, consts, fd) {
                Ok(v) => {
                    let exact = decompose(model, p, 0.0, consts)?.potential_velocity;
                    Ok(normalized((v - exact).norm(), &[exact.norm()]))
                }
                Err(MadelungError::BranchCut { .. }) => Ok(0.0),
                Err(e) => Err(e),
            }
        });
        let norm = model
            .normalization_integral(consts, &QuadratureConfig::gauss(12, 12))
            .map(|n| (n, 1.0));
        vec![
            Outcome::residual("central.jacobian_continuity", jc),
            Outcome::residual("central.potential_velocity_fd", pv),
            Outcome::from_result("central.normalization", norm),
        ]
    }));
    groups.push(Box::new(move || {
        let traj = match &orbit {
            Ok(t) => *t,
            Err(e) => {
                let e = e.to_string();
                return ["central.action_phase", "central.lagrangian", "central.complex_action"]
                    .into_iter()
                    .map(|n| Outcome::residual(n, Err::<f64, _>(e.clone())))
                    .collect();
            }
        };
        let action = madelung::action_phase_check(model, &traj, 0.0, period, consts, 64).map(|c| c.relative_spread());
        let lagrangian = contour::lagrangian_on_path(model, &traj, period / 3.0, consts).map(|c| c.relative_gap());
        let complex = contour::complex_action_decompose(model, &traj, 0.0, 0.5 * period, consts, &QuadratureConfig::gauss(4, 12))
            .map(|c| c.endpoint_gap);
        vec![
            Outcome::residual("central.action_phase", action),
            Outcome::residual("central.lagrangian", lagrangian),
            Outcome::residual("central.complex_action", complex),
        ]
    }));
    groups.push(Box::new(move || {
        let residual_at = |f: &(dyn Fn(Point3) -> f64 + Sync)| {
            let flow = max_over(points, |&p| {
                transport::stationary_continuity_residual(f, k, &[p], consts, fd).map(|r| r.flow)
            });
            let div = max_over(points, |&p| {
                transport::stationary_continuity_residual(f, k, &[p], consts, fd).map(|r| r.divergence)
            });
            (flow, div)
        };
        let (flow, div) = residual_at(&density);
        let control = move |p: Point3| density(p) * (1.0 + 0.5 * p.x / p.norm());
        let (cflow, cdiv) = residual_at(&control);
        let ratio = match (&flow, &div, cflow, cdiv) {
            (Ok(a), Ok(b), Ok(c), Ok(d)) => Ok((c.min(d) / a.max(*b).max(RESIDUAL_FLOOR), CONTROL_FACTOR)),
            (_, _, Err(e), _) | (_, _, _, Err(e)) => Err(e),
            _ => Err("the stationary density failed".to_string()),
        };
        vec![
            Outcome::residual("central.stationary.flow", flow),
            Outcome::residual("central.stationary.divergence", div),
            Outcome::from_result("central.stationary.negative_control", ratio),
        ]
    }));
    let steps = cfg.samples.steps_per_revolution;
    groups.push(Box::new(move || {
        let names = ["central.characteristic.radius", "central.characteristic.density", "central.characteristic.period"];
        match transport::integrate_characteristic(start, k, consts, steps, 1.0, density) {
            Ok(c) => {
                let expected = c.expected_period(consts).unwrap_or(f64::NAN);
                let measured = c.measured_period.ok_or("no measurable period");
                vec![
                    Outcome::value(names[0], c.radius_drift, 0.0),
                    Outcome::value(names[1], c.density_spread, 0.0),
                    Outcome::from_result(names[2], measured.map(|m| (m, expected))),
                ]
            }
            Err(e) => names.into_iter().map(|n| Outcome::residual(n, Err::<f64, _>(e.to_string()))).collect(),
        }
    }));
    groups.push(Box::new(move || {
        let quantization = quantization::momentum_loop_integral(model, &unit_loop, consts).map(|r| r.residual);
        let recovery: Result<f64, String> = (-3..=3).try_fold(0.0, |bad, kk| {
            let m = WaveModel::central_field(nu, kappa, kk, energy);
            let r = quantization::momentum_loop_integral(&m, &unit_loop, consts).map_err(|e| e.to_string())?;
            Ok(bad + if r.recovered_k == i64::from(kk) && r.pass { 0.0 } else { 1.0 })
        });
        let radii: Vec<f64> = [0.1, 0.3, 1.0, 3.0, 10.0].iter().map(|r| r * len).collect();
        let independence = max_over(&radii, |&r| {
            quantization::momentum_loop_integral(model, &LoopSpec::new(r, 1), consts)
                .map(|q| normalized(q.value - h * f64::from(k), &[h * f64::from(k)]))
        });
        let action = quantization::loop_action_decomposition(model, &unit_loop, consts);
        let (balance, closed) = match action {
            Ok(a) => (Ok(a.balance), Ok(a.closed_form_gap)),
            Err(e) => (Err(e.to_string()), Err(e.to_string())),
        };
        vec![
            Outcome::residual("central.loop.quantization", quantization),
            Outcome::from_result("central.loop.k_recovery", recovery.map(|b| (b, 0.0))),
            Outcome::residual("central.loop.radius_independence", independence),
            Outcome::residual("central.loop.action_balance", balance),
            Outcome::residual("central.loop.closed_form", closed),
        ]
    }));
    let outcomes = run_groups(groups);

    let characteristic = transport::integrate_characteristic(start, k, consts, steps, 1.0, density).ok().map(|c| {
        let mut t = Table::new(&["t", "x", "y", "z", "f"]);
        for ((time, p), f) in c.times.iter().zip(&c.positions).zip(&c.densities) {
            t.push(vec![*time, p.x, p.y, p.z, *f]);
        }
        t
    });
    let mut loop_data = Table::new(&["angle", "x", "y", "z", "p_phi"]);
    for i in 0..256 {
        let angle = TAU * i as f64 / 256.0;
        let p = Point3::from_cylindrical(len, angle, 0.0);
        if let Ok(m) = decompose(model, p, 0.0, consts) {
            loop_data.push(vec![angle, p.x, p.y, p.z, consts.mass * m.velocity.dot(p.e_phi())]);
        }
    }
    let data = DataFiles {
        fields: Some(fields_table(model, points, consts)),
        characteristic,
        loop_data: Some(loop_data),
    };
    (outcomes, data)
}

fn dirac_string(cfg: &ScenarioConfig) -> (Vec<Outcome>, DataFiles) {
    let consts = cfg.constants();
    let (nu, kappa, k, energy) = vortex_params(cfg);
    let model = WaveModel::dirac_string(nu, kappa, k, energy);
    let len = model.characteristic_length(&consts);
    let fd = fd_config(&model, &consts);
    let points = draw_points(&mut rng(cfg), cfg.samples.points, len);
    let h = consts.planck();
    let (model, points, consts, fd) = (&model, &points[..], &consts, &fd);
    let unit_loop = LoopSpec::new(len, 1);
    let radii: Vec<f64> = [0.1, 0.3, 1.0, 3.0, 10.0].iter().map(|r| r * len).collect();
    let radii = &radii[..];

    let mut groups = vortex_common("dirac", model, points, consts, fd);
    groups.push(Box::new(move || {
        let velocity = max_over(points, |&p| -> Result<f64, MadelungError> {
            let expected = vortex_velocity(p, k, consts);
            let m = decompose(model, p, 0.0, consts)?;
            let solenoidal = normalized((m.solenoidal_velocity - expected).norm(), &[expected.norm()]);
            let total = normalized((m.velocity - expected).norm(), &[expected.norm()]);
            let potential = normalized(m.potential_velocity.norm(), &[expected.norm()]);
            Ok(solenoidal.max(total).max(potential))
        });
        let div = max_over(points, |&p| quantization::dirac_vector_potential(p, k, consts).map(|a| a.divergence));
        let curl = max_over(points, |&p| quantization::dirac_vector_potential(p, k, consts).map(|a| a.curl));
        vec![
            Outcome::residual("dirac.velocity", velocity),
            Outcome::residual("dirac.divergence_a", div),
            Outcome::residual("dirac.curl_a", curl),
        ]
    }));
    groups.push(Box::new(move || {
        let expected_flux = -h * f64::from(k) / consts.charge;
        let charge = quantization::dirac_flux_and_charge(&unit_loop, k, consts);
        let flux = charge.as_ref().map(|c| normalized(c.flux - expected_flux, &[expected_flux])).map_err(|e| e.to_string());
        let recovered = charge
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|c| c.recovered_k().ok_or_else(|| format!("no integer in {}", c.dirac_k_wb)))
            .map(|r| (r as f64, f64::from(k)));
        let sweep: Result<(f64, f64), String> = (-5..=5).try_fold((0.0, 0.0), |(bad, units), kk| {
            let c = quantization::dirac_flux_and_charge(&unit_loop, kk, consts).map_err(|e| e.to_string())?;
            let miss = if c.recovered_k() == Some(i64::from(kk)) { 0.0 } else { 1.0 };
            let u = normalized(c.q_m_wb - consts.mu0 * c.q_m_am, &[c.q_m_wb]);
            Ok((bad + miss, worst(units, u)))
        });
        let independence = quantization::delta_field_consistency(k, radii, consts);
        let outside = quantization::dirac_flux_and_charge(&LoopSpec::new(0.5 * len, 1).with_offset(2.0 * len, 0.0), k, consts)
            .map(|c| normalized(c.flux, &[expected_flux]));
        let loop_report = quantization::momentum_loop_integral(model, &unit_loop, consts);
        let (flux_term, phase_term) = match &loop_report {
            Ok(r) => {
                let hk = h * f64::from(k);
                (Ok(normalized(r.flux_term - hk, &[hk])), Ok(normalized(r.phase_term, &[h])))
            }
            Err(e) => (Err(e.to_string()), Err(e.to_string())),
        };
        vec![
            Outcome::residual("dirac.flux", flux),
            Outcome::residual("dirac.flux.radius_independence", independence),
            Outcome::from_result("dirac.charge.k", recovered),
            Outcome::from_result("dirac.charge.k_sweep", sweep.as_ref().map(|s| (s.0, 0.0)).map_err(Clone::clone)),
            Outcome::residual("dirac.charge.units", sweep.map(|s| s.1)),
            Outcome::residual("dirac.loop.flux_term", flux_term),
            Outcome::residual("dirac.loop.phase_term", phase_term),
            Outcome::residual("dirac.loop.outside", outside),
        ]
    }));
    let outcomes = run_groups(groups);

    let mut loop_data = Table::new(&["radius", "flux", "q_m_wb", "q_m_am", "dirac_k"]);
    for &r in radii {
        if let Ok(c) = quantization::dirac_flux_and_charge(&LoopSpec::new(r, 1), k, consts) {
            loop_data.push(vec![r, c.flux, c.q_m_wb, c.q_m_am, c.dirac_k_wb]);
        }
    }
    let data = DataFiles { fields: Some(fields_table(model, points, consts)), characteristic: None, loop_data: Some(loop_data) };
    (outcomes, data)
}

fn conformal_map(cfg: &ScenarioConfig) -> (Vec<Outcome>, DataFiles) {
    let mut rng = rng(cfg);
    let ms: Vec<Complex64> = (0..cfg.samples.jacobian_points)
        .map(|_| Complex64::new(rng.gen_range(-10.0..5.0), rng.gen_range(-4.0 * PI..4.0 * PI)))
        .collect();
    let ms = &ms[..];
    let fd_points = &ms[..ms.len().min(1000)];
    let groups: Vec<Group<'_>> = vec![
        Box::new(move || {
            let law = max_over(ms, |&m| -> Result<f64, String> {
                let psi = forward_map(m);
                let j = jacobian(m, JacobianMode::Analytic);
                Ok(normalized(psi.norm_sqr() - 4.0 * j, &[psi.norm_sqr()]))
            });
            let fdj = max_over(fd_points, |&m| -> Result<f64, String> {
                let exact = jacobian(m, JacobianMode::Analytic);
                Ok(normalized(jacobian(m, JacobianMode::FiniteDifference { step: 1e-4 }) - exact, &[exact]))
            });
            let m0 = Complex64::new(0.3, 0.7);
            let exact = jacobian(m0, JacobianMode::Analytic);
            let err = |h: f64| (jacobian(m0, JacobianMode::FiniteDifference { step: h }) - exact).abs();
            let order = (err(2e-2) / err(1e-2)).log2();
            let cr = max_over(fd_points, |&m| -> Result<f64, String> {
                let h = 1e-5;
                let ds = (forward_map(m + h) - forward_map(m - h)) / (2.0 * h);
                let i = Complex64::i();
                let dphi = (forward_map(m + i * h) - forward_map(m - i * h)) / (2.0 * h);
                Ok(normalized((dphi - i * ds).norm(), &[ds.norm()]))
            });
            vec![
                Outcome::residual("conformal.jacobian_law", law),
                Outcome::residual("conformal.jacobian_fd", fdj),
                Outcome::value("conformal.jacobian_fd_order", order, MIN_FD_ORDER),
                Outcome::residual("conformal.cauchy_riemann", cr),
            ]
        }),
        Box::new(|| {
            let univalent = StripDomain::new(-2.0, 1.0, 0.0, 4.0 * PI)
                .and_then(|d| d.with_lattice(48, 96))
                .and_then(|d| conformal::univalence_check(&d))
                .map(|r| (if r.univalent { 1.0 } else { 0.0 }, 1.0));
            let wide = StripDomain::new(-2.0, 1.0, 0.0, 6.0 * PI).and_then(|d| conformal::univalence_check(&d));
            let not_univalent = wide.as_ref().map(|r| (if r.univalent { 1.0 } else { 0.0 }, 0.0)).map_err(|e| e.to_string());
            let witness = wide.map_err(|e| e.to_string()).and_then(|r| {
                let (a, b) = r.witness.ok_or("no witness")?;
                let (fa, fb) = (forward_map(a), forward_map(b));
                Ok(normalized((fa - fb).norm(), &[fa.norm()]))
            });
            vec![
                Outcome::from_result("conformal.univalent", univalent),
                Outcome::from_result("conformal.not_univalent", not_univalent),
                Outcome::residual("conformal.witness", witness),
            ]
        }),
        Box::new(|| {
            let q = QuadratureConfig::gauss(4, 16);
            let area = |phi_max: f64| {
                StripDomain::new(f64::NEG_INFINITY, 0.0, 0.0, phi_max).and_then(|d| conformal::area_integral(&d, &q))
            };
            vec![
                Outcome::from_result("conformal.area", area(4.0 * PI).map(|a| (a, PI))),
                Outcome::from_result("conformal.area_additivity", area(2.0 * PI).map(|a| (a, PI / 2.0))),
            ]
        }),
    ];
    let outcomes = run_groups(groups);

    let mut fields = Table::new(&["S", "Phi", "u", "v", "J"]);
    if let Ok(d) = StripDomain::new(-3.0, 1.0, 0.0, 4.0 * PI).and_then(|d| d.with_lattice(32, 64)) {
        for m in d.lattice() {
            let psi = forward_map(m);
            fields.push(vec![m.re, m.im, psi.re, psi.im, jacobian(m, JacobianMode::Analytic)]);
        }
    }
    (outcomes, DataFiles { fields: Some(fields), ..DataFiles::default() })
}

#[derive(Debug)]
struct PathPair {
    a: Complex64,
    b: Complex64,
    sheets: (i64, i64),
    bulges: (Complex64, Complex64),
}

fn contour_suite(cfg: &ScenarioConfig) -> (Vec<Outcome>, DataFiles) {
    let mut rng = rng(cfg);
    let quad = QuadratureConfig::gauss(2, 12);
    let pairs: Vec<PathPair> = (0..cfg.samples.paths)
        .map(|_| PathPair {
            a: random_complex(&mut rng, 1.0),
            b: random_complex(&mut rng, 1.0),
            sheets: (rng.gen_range(-3..=3), rng.gen_range(-3..=3)),
            bulges: (random_complex(&mut rng, 0.5) * 0.5, random_complex(&mut rng, 0.5) * 0.5),
        })
        .collect();
    let mirrors: Vec<Complex64> = [Complex64::from_polar(1.0, PI / 4.0), Complex64::from_polar(2.0, PI / 6.0), Complex64::from_polar(0.3, -2.0)]
        .into_iter()
        .chain((0..20).map(|_| random_complex(&mut rng, 2.0)))
        .collect();
    let build = |p: &PathPair| -> Result<(ComplexPath, ComplexPath), contour::ContourError> {
        Ok((
            ComplexPath::log_linear(p.a, p.b, p.sheets.0, p.bulges.0, 16)?,
            ComplexPath::log_linear(p.a, p.b, p.sheets.1, p.bulges.1, 16)?,
        ))
    };
    let (pairs, mirrors, quad, build) = (&pairs[..], &mirrors[..], &quad, &build);

    let groups: Vec<Group<'_>> = vec![
        Box::new(|| {
            let circ = (-3..=3i32).filter(|&k| k != 0).try_fold(0.0, |acc, k| {
                quantization::circulation_of_angle_gradient(&LoopSpec::new(1.0, k)).map(|c| worst(acc, (c - TAU * f64::from(k)).abs()))
            });
            vec![Outcome::residual("contour.circulation", circ)]
        }),
        Box::new(move || {
            let mut loops: Vec<(ComplexPath, i64)> = Vec::new();
            let mut err = None;
            for k in (-3..=3i32).filter(|&k| k != 0) {
                match ComplexPath::circle(Complex64::new(0.0, 0.0), 1.3, k, 16 * k.unsigned_abs() as usize) {
                    Ok(c) => loops.push((c, i64::from(k))),
                    Err(e) => err = Some(e.to_string()),
                }
            }
            match ComplexPath::circle(Complex64::new(2.0, 0.5), 0.7, 1, 16) {
                Ok(c) => loops.push((c, 0)),
                Err(e) => err = Some(e.to_string()),
            }
            if let Some(e) = err {
                return ["contour.winding.log_integral", "contour.winding.count", "contour.closed_real_part"]
                    .into_iter()
                    .map(|n| Outcome::residual(n, Err::<f64, _>(e.clone())))
                    .collect();
            }
            let integral = max_over(&loops, |(c, k)| {
                c.log_integral(quad).map(|v| (v - Complex64::new(0.0, TAU * *k as f64)).norm())
            });
            let real = max_over(&loops, |(c, _)| c.log_integral(quad).map(|v| v.re.abs()));
            let count = loops.iter().try_fold(0.0, |bad, (c, k)| {
                c.winding_number().map(|w| bad + if w == *k { 0.0 } else { 1.0 })
            });
            vec![
                Outcome::residual("contour.winding.log_integral", integral),
                Outcome::from_result("contour.winding.count", count.map(|b| (b, 0.0))),
                Outcome::residual("contour.closed_real_part", real),
            ]
        }),
        Box::new(move || {
            let per_pair: Vec<Result<(f64, bool), String>> = pairs
                .par_iter()
                .map(|p| -> Result<(f64, bool), contour::ContourError> {
                    let (g1, g2) = build(p)?;
                    let d = (g1.log_integral(quad)? - g2.log_integral(quad)?) / Complex64::new(0.0, TAU);
                    let n = d.re.round();
                    let residue = (d - n).norm();
                    let winding = g1.concat(&g2.reversed())?.close()?.winding_number()?;
                    Ok((residue, n as i64 == winding))
                })
                .map(|r| r.map_err(|e| e.to_string()))
                .collect();
            let folded = per_pair.into_iter().try_fold((0.0, 0.0), |(res, bad), r| {
                r.map(|(residue, ok)| (worst(res, residue), bad + if ok { 0.0 } else { 1.0 }))
            });
            vec![
                Outcome::residual("contour.path_independence", folded.clone().map(|f| f.0)),
                Outcome::from_result("contour.path_independence.winding", folded.map(|f| (f.1, 0.0))),
            ]
        }),
        Box::new(move || {
            let mirror = max_over(mirrors, |&z| contour::mirror_identity_check(z, quad));
            let split = max_over(pairs, |p| -> Result<f64, contour::ContourError> {
                let path = ComplexPath::log_linear(p.a, p.b, 0, p.bulges.0, 16)?;
                let z = contour::z12(p.a, p.b, &path, quad)?;
                Ok(distance_mod_2pi_i(z.value, Complex64::new(0.5 * z.s12, z.psi12.arg())))
            });
            vec![Outcome::residual("contour.mirror", mirror), Outcome::residual("contour.z12_split", split)]
        }),
    ];
    let outcomes = run_groups(groups);

    let loop_data = pairs.first().and_then(|p| {
        let (g1, g2) = build(p).ok()?;
        let composed = g1.concat(&g2.reversed()).ok()?.close().ok()?;
        let mut t = Table::new(&["s", "re", "im"]);
        for &(s, xi) in composed.samples() {
            t.push(vec![s, xi.re, xi.im]);
        }
        Some(t)
    });
    (outcomes, DataFiles { loop_data, ..DataFiles::default() })
}

/// Hydrogen reference values in metres and electron-volts.
const BOHR_RADIUS_M: f64 = 5.29177e-11;
const RYDBERG_EV: f64 = 13.6057;

fn bohr_table(cfg: &ScenarioConfig) -> (Vec<Outcome>, DataFiles) {
    let consts = cfg.constants();
    let rows = bohr_rows(cfg);
    let levels: Vec<_> = rows.par_iter().map(|&(z, k)| ((z, k), quantization::bohr_model(z, k, &consts))).collect();
    let mut outcomes = Vec::new();
    let mut fields = Table::new(&["z", "k", "radius_m", "energy_j", "energy_ev", "stationary_radius_m"]);
    for ((z, k), level) in levels {
        let name = |s: &str| format!("bohr.z{z}.k{k}.{s}");
        let (zf, kf) = (f64::from(z), f64::from(k));
        match level {
            Ok(l) => {
                outcomes.push(Outcome::value(name("radius"), l.radius, BOHR_RADIUS_M * kf * kf / zf));
                outcomes.push(Outcome::value(name("energy_ev"), l.energy_ev, -RYDBERG_EV * zf * zf / (kf * kf)));
                outcomes.push(Outcome::value(name("stationary_radius"), l.stationary_radius, l.radius));
                outcomes.push(Outcome::value(name("energy_at_radius"), l.energy_at_radius, l.energy));
                fields.push(vec![zf, kf, l.radius, l.energy, l.energy_ev, l.stationary_radius]);
            }
            Err(e) => {
                for s in ["radius", "energy_ev", "stationary_radius", "energy_at_radius"] {
                    outcomes.push(Outcome::residual(name(s), Err::<f64, _>(e.to_string())));
                }
            }
        }
    }
    (outcomes, DataFiles { fields: Some(fields), ..DataFiles::default() })
}

fn path_demo(cfg: &ScenarioConfig) -> (Vec<Outcome>, DataFiles) {
    let consts = cfg.constants();
    let hbar = consts.hbar;
    let mut rng = rng(cfg);
    let pairs: Vec<(Complex64, Complex64, f64)> = (0..cfg.samples.points)
        .map(|_| (random_complex(&mut rng, 2.0), random_complex(&mut rng, 2.0), rng.gen_range(-PI..PI)))
        .collect();
    let (xi1, xi2) = (random_complex(&mut rng, 0.5), random_complex(&mut rng, 0.5));
    let family_size = cfg.samples.family;
    let family = TrajectoryFamily::rotations(xi1, xi2, family_size, hbar);
    let pairs = &pairs[..];
    let family_ref = &family;

    let groups: Vec<Group<'_>> = vec![
        Box::new(move || {
            let rotation = max_over(pairs, |&(a, b, _)| -> Result<f64, String> {
                Ok(normalized((transport::evolution_operator(a, b) * a - b).norm(), &[b.norm()]))
            });
            let phase = max_over(pairs, |&(a, _, dphi)| -> Result<f64, String> {
                let r = transport::evolution_rotate(a, dphi);
                let modulus = normalized(r.norm() - a.norm(), &[a.norm()]);
                let shift = ((r / a).arg() - dphi + PI).rem_euclid(TAU) - PI;
                Ok(modulus.max(shift.abs()))
            });
            let single = max_over(&pairs[..pairs.len().min(50)], |&(a, b, _)| -> Result<f64, transport::TransportError> {
                let f = TrajectoryFamily::rotations(a, b, 1, hbar)?;
                let want = transport::evolution_operator(a, b);
                Ok(normalized((transport::path_sum(&f, hbar)? - want).norm(), &[want.norm()]))
            });
            vec![
                Outcome::residual("path.rotation", rotation),
                Outcome::residual("path.rotate_phase", phase),
                Outcome::residual("path.single_path", single),
            ]
        }),
        Box::new(move || {
            let coherent = family_ref.as_ref().map_err(|e| e.to_string()).and_then(|f| {
                let ratio = xi2.norm() / xi1.norm();
                let s = transport::path_sum(f, hbar).map_err(|e| e.to_string())?;
                Ok(normalized(s.norm() - ratio, &[ratio]))
            });
            let half = (|| -> Result<f64, transport::TransportError> {
                let one = Complex64::new(1.0, 0.0);
                let end = Complex64::from_polar(1.0, 0.4);
                let path = ComplexPath::from_fn(move |s| Complex64::from_polar(1.0, 0.4 * s), 0.0, 1.0, 4)?;
                let a = FamilyMember::with_action(&path, 0.4 * hbar);
                let b = FamilyMember::with_action(&path, 0.4 * hbar + PI * hbar);
                let f = TrajectoryFamily::new(one, end, vec![a, b])?;
                Ok(transport::path_sum(&f, hbar)?.norm())
            })();
            let round_trip = family_ref.as_ref().map_err(|e| e.to_string()).and_then(|f| {
                let back = TrajectoryFamily::from_json(&f.to_json().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                Ok((if back == *f { 0.0 } else { 1.0 }, 0.0))
            });
            vec![
                Outcome::residual("path.coherent_family", coherent),
                Outcome::residual("path.half_quantum", half),
                Outcome::from_result("path.family_round_trip", round_trip),
            ]
        }),
    ];
    let outcomes = run_groups(groups);

    let loop_data = family.ok().map(|f| {
        let mut t = Table::new(&["member", "s", "re", "im"]);
        for (j, m) in f.members.iter().enumerate() {
            for &(s, xi) in &m.samples {
                t.push(vec![j as f64, s, xi.re, xi.im]);
            }
        }
        t
    });
    (outcomes, DataFiles { loop_data, ..DataFiles::default() })
}
