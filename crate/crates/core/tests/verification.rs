use approx::assert_relative_eq;
use curved_nbody::dynamics::{energy, rigid_rotation_state};
use curved_nbody::family5;
use curved_nbody::family7::{self, ExistenceSearch, SevenBodyCase, SevenBodyPositions};
use curved_nbody::verify::{self, Family, Verdict, CONSISTENCY_TOL};
use curved_nbody::{condition_residual, integrate, Body, Configuration, Error, IntegrationSettings, State, SymmetricLayout};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn five_body(a: f64, r: f64) -> Configuration {
    let sol = family5::solve_reduced(&family5::FiveBodyPositions::new(a, r).unwrap()).unwrap();
    SymmetricLayout::new(true, vec![a, r]).unwrap().configuration(sol.mu, &[1.0, sol.m.unwrap()]).unwrap()
}

fn with_masses(config: &Configuration, masses: &[f64]) -> Configuration {
    let bodies = config.bodies().iter().zip(masses).map(|(b, m)| Body::formal(*m, b.z).unwrap()).collect();
    Configuration::new(bodies).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng) -> (Configuration, State) {
    loop {
        let bodies: Vec<Body> = (0..3)
            .map(|_| {
                let z = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
                Body::new(rng.gen_range(0.5..2.0), z).unwrap()
            })
            .collect();
        let Ok(config) = Configuration::new(bodies) else { continue };
        let positions = config.positions();
        let far_apart = (0..3).all(|i| (i + 1..3).all(|j| curved_nbody::geometry::geodesic_sin(positions[i], positions[j]) > 0.3));
        if !far_apart {
            continue;
        }
        let velocities = (0..3).map(|_| Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))).collect();
        return (config, State { positions, velocities, t: 0.0 });
    }
}

#[test]
fn energy_is_conserved_on_random_trajectories() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let settings = IntegrationSettings { t_final: 1.0, samples: 11, ..Default::default() };
    for _ in 0..5 {
        let (config, state) = random_state(&mut rng);
        let e0 = energy(&config, &state).unwrap();
        let trajectory = match integrate(&config, &state, &settings) {
            Ok(t) => t,
            Err(Error::SingularityReached { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        for s in &trajectory {
            let drift = (energy(&config, s).unwrap() - e0).abs() / e0.abs().max(1.0);
            assert!(drift < 1e-8, "energy drift {drift}");
        }
    }
}

#[test]
fn integration_is_rotationally_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    let (config, state) = random_state(&mut rng);
    let settings = IntegrationSettings { t_final: 0.5, samples: 6, ..Default::default() };
    let base = integrate(&config, &state, &settings).unwrap();
    for theta in [0.3, 1.9, 4.4] {
        let rot = Complex64::from_polar(1.0, theta);
        let rotated = config.rotated(theta);
        let s0 = State {
            positions: state.positions.iter().map(|z| rot * z).collect(),
            velocities: state.velocities.iter().map(|v| rot * v).collect(),
            t: 0.0,
        };
        let turned = integrate(&rotated, &s0, &settings).unwrap();
        for (a, b) in base.iter().zip(&turned) {
            for (za, zb) in a.positions.iter().zip(&b.positions) {
                assert!((rot * za - zb).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn fitted_omega_matches_the_condition_normalization() {
    for (a, r) in [(2.0, 3.0), (0.5, 3.0), (1.2, 4.0)] {
        let config = five_body(a, r);
        assert!(condition_residual(&config).unwrap().max_abs < 1e-10);
        let fit = verify::fit_angular_velocity(&config).unwrap();
        assert!(fit.consistency < CONSISTENCY_TOL, "{fit:?}");
        assert_relative_eq!(fit.omega, 0.5, epsilon = 1e-9);
    }
}

#[test]
fn omega_scales_with_the_square_root_of_the_masses() {
    let config = five_body(0.5, 3.0);
    let scaled: Vec<f64> = config.masses().iter().map(|m| 4.0 * m).collect();
    let fit = verify::fit_angular_velocity(&with_masses(&config, &scaled)).unwrap();
    assert_relative_eq!(fit.omega, 1.0, epsilon = 1e-9);
    assert!(fit.consistency < CONSISTENCY_TOL);
}

#[test]
fn arbitrary_masses_are_inconsistent() {
    let config = five_body(2.0, 3.0);
    let masses = [1.0, 1.0, 1.0, 1.0, 1.0];
    match verify::fit_angular_velocity(&with_masses(&config, &masses)) {
        Ok(fit) => assert!(fit.consistency > 1e-3, "{fit:?}"),
        Err(e) => assert!(matches!(e, Error::NegativeOmegaSquared { .. })),
    }
}

#[test]
fn rigid_motion_holds_until_instability_takes_over() {
    let config = five_body(0.5, 3.0);
    let exponent = verify::instability_exponent(&config, 0.5).unwrap();
    // A short horizon keeps amplified rounding errors far below the tolerance.
    let short = verify::rigid_rotation_check(&config, 0.5, 0.05, 1e-6).unwrap();
    assert!(short.passed, "{short:?}");
    assert!(short.energy_drift < 1e-10);
    // Over a full period the growth factor exp(exponent * 4 pi) swamps
    // double precision.
    assert!(exponent * 4.0 * std::f64::consts::PI > 40.0);
    let full = verify::rigid_rotation_check(&config, 0.5, 1.0, 1e-6).unwrap();
    assert!(!full.passed);
    assert!(full.energy_drift < 1e-8, "{full:?}");
}

#[test]
fn perturbed_masses_break_the_rigid_motion() {
    let config = five_body(0.5, 3.0);
    let base = config.masses();
    let reference = verify::rigid_rotation_check(&config, 0.5, 0.05, 1e-6).unwrap();
    assert!(reference.passed);
    for k in [0, 1, 3] {
        let mut masses = base.clone();
        masses[k] *= 1.1;
        if k > 0 {
            masses[k + 1] *= 1.1;
        }
        let d = verify::rigid_rotation_check(&with_masses(&config, &masses), 0.5, 0.05, 1e-6).unwrap();
        assert!(d.distance_drift.max(d.radius_drift) > 1e-4, "mass {k}: {d:?}");
    }
    let mut outer = base.clone();
    outer[3] *= 1.5;
    outer[4] *= 1.5;
    let d = verify::rigid_rotation_check(&with_masses(&config, &outer), 0.5, 0.05, 1e-6).unwrap();
    assert!(d.distance_drift.max(d.radius_drift) > 1e-3);
}

#[test]
fn verification_report_verdicts() {
    let config = five_body(0.5, 3.0);
    let report = verify::verify_configuration(&config, None, 1.0, 1e-6).unwrap();
    assert_eq!(report.verdict, Verdict::UnstableRelativeEquilibrium);
    assert!(report.instability_exponent.unwrap() > 1.0);
    let short = verify::verify_configuration(&config, None, 0.05, 1e-6).unwrap();
    assert_eq!(short.verdict, Verdict::RelativeEquilibrium);
    let mut masses = config.masses();
    masses[3] *= 1.5;
    masses[4] *= 1.5;
    let wrong = verify::verify_configuration(&with_masses(&config, &masses), None, 0.05, 1e-6).unwrap();
    assert_eq!(wrong.verdict, Verdict::NotRelativeEquilibrium);
}

#[test]
fn rigid_rotation_state_for_fitted_omega_starts_in_balance() {
    let config = five_body(1.2, 4.0);
    let state = rigid_rotation_state(&config, 0.5);
    let acc = curved_nbody::dynamics::acceleration(&config, &state).unwrap();
    for (a, z) in acc.iter().zip(&state.positions) {
        assert!((a + 0.25 * z).norm() < 1e-12);
    }
}

#[test]
fn lemma_audits_at_full_size() {
    for (name, samples) in [("lema2", 10_000), ("lemma5", 1_000), ("lemma4", 1_000)] {
        let audit = verify::lemma_audit(name, samples, 1).unwrap();
        assert!(audit.pass, "{audit:?}");
        assert_eq!(audit.violations, 0);
        assert_eq!(audit.samples, samples);
        assert!(audit.min_margin > 0.0);
    }
}

#[test]
fn measure_estimates() {
    let inside = verify::measure_estimate(Family::Five, (0.0, 1.0), 2_000, 3).unwrap();
    assert_eq!(inside.hits, 0);
    assert_eq!(inside.fraction, 0.0);
    let seven_inside = verify::measure_estimate(Family::Seven, (0.0, 1.0), 1_000, 3).unwrap();
    assert_eq!(seven_inside.hits, 0);
    let wide = verify::measure_estimate(Family::Five, (0.1, 5.0), 2_000, 3).unwrap();
    assert!(wide.hits > 0 && wide.ci_low > 0.0);
    assert_eq!(wide, verify::measure_estimate(Family::Five, (0.1, 5.0), 2_000, 3).unwrap());
}

#[test]
fn seven_body_sign_audit() {
    // Every claimed sign holds on random samples except b3 in the all-outside
    // case, which is negative throughout that regime.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut outside_b3 = 0;
    let mut outside = 0;
    for _ in 0..20_000 {
        let mut v = [rng.gen_range(0.02..8.0), rng.gen_range(0.02..8.0), rng.gen_range(0.02..8.0)];
        v.sort_by(f64::total_cmp);
        let Ok(pos) = SevenBodyPositions::new(v[0], v[1], v[2]) else { continue };
        let Ok(system) = family7::coefficient_system(v[0], v[1], v[2]) else { continue };
        if pos.case() == SevenBodyCase::AllOutside {
            outside += 1;
            assert_eq!(system.sign_violations.len(), 1, "{:?}", system.sign_violations);
            assert!(system.sign_violations[0].starts_with("b3"));
            outside_b3 += 1;
        } else {
            assert!(system.sign_violations.is_empty(), "{v:?} {:?}", system.sign_violations);
        }
    }
    assert!(outside > 100 && outside_b3 == outside);
}

#[test]
fn all_outside_scan_is_recorded() {
    let report = family7::existence_search(&ExistenceSearch {
        case: SevenBodyCase::AllOutside,
        fixed: (2.0, 4.0),
        range: Some((3.5, 4.0)),
        points: 1000,
    })
    .unwrap();
    assert_eq!(report.points, 1000);
    for p in report.positive() {
        assert!(p.solution.as_ref().unwrap().full_residual_max < 1e-10);
    }
    // Findings recorded in the docs: the exact solve has no positive
    // solution on this segment.
    assert_eq!(report.certified_positive, 0);
}

#[test]
fn inner_pair_mid_scan_finds_positive_masses() {
    let report = family7::existence_search(&ExistenceSearch {
        case: SevenBodyCase::InnerPairInsideMid,
        fixed: (0.5, 3.0),
        range: None,
        points: 200,
    })
    .unwrap();
    assert!(report.certified_positive > 0);
    for p in report.positive() {
        let sol = p.solution.as_ref().unwrap();
        assert!(sol.full_residual_max < 1e-10, "{sol:?}");
    }
}
