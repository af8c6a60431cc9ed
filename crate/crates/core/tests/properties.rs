use lnpsi::conformal::{forward_map, jacobian, JacobianMode};
use lnpsi::contour::{distance_mod_2pi_i, log_ratio_on_sheet, principal_log_ratio, ComplexPath};
use lnpsi::madelung::{decompose, energy_and_hj, PhysicalConstants, WaveModel};
use lnpsi::numerics::{Point3, QuadratureConfig};
use lnpsi::quantization::{bohr_model, dirac_flux_and_charge, momentum_loop_integral, LoopSpec};
use lnpsi::runner::{ScenarioConfig, ScenarioKind};
use lnpsi::transport::{evolution_operator, evolution_rotate};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -PI..PI).prop_map(|(l, a)| Complex64::from_polar(l.exp(), a))
}

fn off_axis_point() -> impl Strategy<Value = Point3> {
    (0.2f64..4.0, 0.0..TAU, -3.0f64..3.0).prop_map(|(rho, phi, z)| Point3::from_cylindrical(rho, phi, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sheets_differ_by_2pi_i(a in complex(), b in complex(), sheet in -5i64..5) {
        let l = log_ratio_on_sheet(a, b, sheet);
        prop_assert!((l.exp() - b / a).norm() < 1e-12 * (b / a).norm());
        let p = principal_log_ratio(a, b);
        prop_assert!((l.im - p.im - TAU * sheet as f64).abs() < 1e-12);
        prop_assert!(distance_mod_2pi_i(l, p) < 1e-12);
    }

    #[test]
    fn circle_winding_counts_turns(cx in -0.5f64..0.5, cy in -0.5f64..0.5, radius in 1.0f64..5.0, turns in -4i32..=4) {
        prop_assume!(turns != 0);
        let c = ComplexPath::circle(Complex64::new(cx, cy), radius, turns, 8).unwrap();
        prop_assert_eq!(c.winding_number().unwrap(), i64::from(turns));
        prop_assert_eq!(c.reversed().winding_number().unwrap(), -i64::from(turns));
        let quad = QuadratureConfig::gauss(2, 12);
        let forward = c.log_integral(&quad).unwrap();
        let backward = c.reversed().log_integral(&quad).unwrap();
        prop_assert!((forward + backward).norm() < 1e-9);
        prop_assert!((forward - Complex64::new(0.0, TAU * f64::from(turns))).norm() < 1e-9);
    }

    #[test]
    fn map_is_4pi_periodic_and_2pi_antiperiodic(s in -20.0f64..10.0, phi in -10.0f64..10.0) {
        let m = Complex64::new(s, phi);
        let w = forward_map(m);
        let scale = w.norm();
        prop_assert!((forward_map(m + Complex64::new(0.0, 4.0 * PI)) - w).norm() <= 1e-13 * scale);
        prop_assert!((forward_map(m + Complex64::new(0.0, TAU)) + w).norm() <= 1e-13 * scale);
        prop_assert!((w.norm_sqr() - 4.0 * jacobian(m, JacobianMode::Analytic)).abs() <= 1e-14 * w.norm_sqr());
    }

    #[test]
    fn vortex_velocity_is_azimuthal(p in off_axis_point(), k in -4i32..=4, nu in 0.0f64..3.0, kappa in 0.3f64..3.0) {
        let consts = PhysicalConstants::natural();
        let energy = -0.5 * kappa * kappa;
        for model in [WaveModel::central_field(nu, kappa, k, energy), WaveModel::dirac_string(nu, kappa, k, energy)] {
            let m = decompose(&model, p, 0.3, &consts).unwrap();
            let speed = m.velocity.norm().max(1e-300);
            prop_assert!(m.velocity.dot(p.e_r()).abs() <= 1e-12 * speed);
            prop_assert!(m.velocity.z.abs() <= 1e-12 * speed);
            prop_assert!((m.velocity.dot(p.e_phi()) - f64::from(k) / p.rho()).abs() <= 1e-12 * (1.0 + speed));
            // Φ and 2φ agree modulo 2π.
            let gap = (m.velocity_potential - 2.0 * m.phase).rem_euclid(TAU);
            prop_assert!(gap.min(TAU - gap) < 1e-9);
            let e = energy_and_hj(&model, p, 0.3, &consts).unwrap();
            prop_assert!(e.hj_residual < 1e-10);
        }
    }

    #[test]
    fn loop_integral_counts_enclosed_windings(
        k in -5i32..=5,
        log_r in -3.0f64..3.0,
        theta in 0.2f64..2.9,
        frac in 0.0f64..0.9,
        angle in 0.0..TAU,
        outside in proptest::bool::ANY,
    ) {
        let consts = PhysicalConstants::natural();
        let r = log_r.exp();
        let d = if outside { r * (1.1 + frac) } else { r * frac };
        let lp = LoopSpec::new(r, 1).with_theta(theta).with_offset(d * angle.cos(), d * angle.sin());
        let model = WaveModel::central_field(1.0, 1.0, k, -0.5);
        let q = momentum_loop_integral(&model, &lp, &consts).unwrap();
        let want = if outside { 0 } else { i64::from(k) };
        prop_assert_eq!(q.recovered_k, want);
        prop_assert!(q.pass, "residual {}", q.residual);
        let charge = dirac_flux_and_charge(&lp, k, &consts).unwrap();
        prop_assert_eq!(charge.recovered_k(), Some(want));
        prop_assert_eq!(charge.encloses_axis, !outside);
    }

    #[test]
    fn evolution_operators_compose(a in complex(), b in complex(), c in complex(), dphi in -10.0f64..10.0) {
        let composed = evolution_operator(a, b) * evolution_operator(b, c);
        prop_assert!((composed - evolution_operator(a, c)).norm() <= 1e-13 * evolution_operator(a, c).norm());
        let r = evolution_rotate(a, dphi);
        prop_assert!((r.norm() - a.norm()).abs() <= 1e-14 * a.norm());
        prop_assert!(distance_mod_2pi_i((r / a).ln(), Complex64::new(0.0, dphi)) < 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact(points in proptest::collection::vec(complex(), 2..20)) {
        let path = ComplexPath::from_points(&points, false).unwrap();
        let mut buf = Vec::new();
        path.write_csv(&mut buf).unwrap();
        let back = ComplexPath::read_csv(buf.as_slice(), false).unwrap();
        prop_assert_eq!(back.len(), path.len());
        for (x, y) in back.samples().iter().zip(path.samples()) {
            prop_assert!((x.1 - y.1).norm() <= 1e-13 * y.1.norm());
        }
    }
}

#[test]
fn bohr_levels_scale_with_k_and_z() {
    let consts = PhysicalConstants::si();
    let base = bohr_model(1, 1, &consts).unwrap();
    for z in 1..=3u32 {
        for k in 1..=5u32 {
            let l = bohr_model(z, k, &consts).unwrap();
            let (zf, kf) = (f64::from(z), f64::from(k));
            assert!((l.radius / base.radius - kf * kf / zf).abs() < 1e-12);
            assert!((l.energy / base.energy - zf * zf / (kf * kf)).abs() < 1e-12);
        }
    }
}

#[test]
fn default_configs_survive_json() {
    for kind in ScenarioKind::ALL {
        let cfg = ScenarioConfig::default_for(kind);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ScenarioConfig::from_json(&text).unwrap(), cfg, "{kind}");
    }
}

#[test]
fn loops_grazing_the_axis_stay_accurate() {
    let consts = PhysicalConstants::natural();
    let model = WaveModel::central_field(1.0, 1.0, 3, -0.5);
    for gap in [1e-1, 1e-3, 1e-6] {
        for (d, want) in [(1.0 - gap, 3), (1.0 + gap, 0)] {
            let lp = LoopSpec::new(1.0, 1).with_theta(0.4).with_offset(d, 0.0);
            let q = momentum_loop_integral(&model, &lp, &consts).unwrap();
            assert_eq!(q.recovered_k, want, "gap {gap}");
            assert!(q.residual < 1e-9, "gap {gap}: residual {:e}", q.residual);
        }
    }
}
