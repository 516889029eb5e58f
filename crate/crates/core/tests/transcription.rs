//! The collinear reduction checked against hand-transcribed reduced systems,
//! plus the closed-form geometry identities.

use approx::assert_relative_eq;
use curved_nbody::conditions::{pair_t, pair_t_expanded};
use curved_nbody::geometry::{geodesic_cos, geodesic_distance, geodesic_sin, gradient_conj_at, potential_at};
use curved_nbody::{collinear_reduce, condition_residual, Body, Configuration, SymmetricLayout};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn w(x: f64) -> f64 {
    (x * x + 1.0).powi(2)
}

/// `LHS - RHS` of the two five-body equations with both pairs outside,
/// transcribed term by term.
fn five_outside(a: f64, r: f64, mu: f64, m: f64) -> [f64; 2] {
    let e1 = (a * a - 1.0) * a / (1.0 + a * a).powi(4)
        - (-0.5 * mu / (a * a)
            + 0.125 * w(a) / (a * a * (a * a - 1.0).powi(2))
            + 0.5 * m * w(r) / ((a * r + 1.0).powi(2) * (a - r).powi(2))
            + 0.5 * m * w(r) / ((r + a).powi(2) * (a * r - 1.0).powi(2)));
    let e2 = (r * r - 1.0) * r / (1.0 + r * r).powi(4)
        - (-0.5 * mu / (r * r) - 0.5 * w(a) / ((a * r + 1.0).powi(2) * (a - r).powi(2))
            + 0.5 * w(a) / ((r + a).powi(2) * (a * r - 1.0).powi(2))
            + 0.125 * m * w(r) / (r * r * (r * r - 1.0).powi(2)));
    [e1, e2]
}

/// `LHS - RHS` of the three seven-body equations with all pairs outside.
fn seven_outside(x: f64, y: f64, z: f64, mu: f64, big_m: f64, m: f64) -> [f64; 3] {
    let near = |p: f64, q: f64| 1.0 / ((p * q + 1.0).powi(2) * (p - q).powi(2));
    let far = |p: f64, q: f64| 1.0 / ((p + q).powi(2) * (p * q - 1.0).powi(2));
    let own = |p: f64| w(p) / (8.0 * (p * p - 1.0).powi(2) * p * p);
    let lhs = |p: f64| (p * p - 1.0) * p / (1.0 + p * p).powi(4);
    let e1 = lhs(x)
        - (-0.5 * mu / (x * x)
            + (0.5 * w(y) * near(x, y) + 0.5 * w(y) * far(x, y)) * big_m
            + (0.5 * w(z) * near(x, z) + 0.5 * w(z) * far(x, z)) * m
            + own(x));
    let e2 = lhs(y)
        - (-0.5 * mu / (y * y)
            + big_m * own(y)
            + (0.5 * w(z) * near(y, z) + 0.5 * w(z) * far(y, z)) * m
            - 0.5 * w(x) * near(x, y)
            + 0.5 * w(x) * far(x, y));
    let e3 = lhs(z)
        - (-0.5 * mu / (z * z)
            + (-0.5 * w(y) * near(y, z) + 0.5 * w(y) * far(y, z)) * big_m
            - 0.5 * w(x) * near(x, z)
            + 0.5 * w(x) * far(x, z)
            + m * own(z));
    [e1, e2, e3]
}

#[test]
fn five_body_outside_matches_transcription() {
    for (a, r, mu, m) in [(2.0, 3.0, 1.0, 1.0), (1.3, 4.5, 0.2, 3.0), (1.05, 1.2, 7.0, 0.4)] {
        let config = SymmetricLayout::new(true, vec![a, r]).unwrap().configuration(Some(mu), &[1.0, m]).unwrap();
        let reduced = collinear_reduce(&config).unwrap();
        let oracle = five_outside(a, r, mu, m);
        for (got, want) in reduced.iter().zip(oracle) {
            assert_relative_eq!(*got, want, epsilon = 1e-12, max_relative = 1e-12);
        }
    }
}

#[test]
fn five_body_inside_matches_corrected_transcription() {
    // Both pairs inside, arranged with the self-pair term on the left. The
    // m terms are the corrected forms (see the decisions ledger): the inner
    // one is 2ar(r^2+1)^2(1-r^2)(1-a^2)/((1-a^2r^2)^2(r^2-a^2)^2) and the
    // outer one has r^2 in the denominator.
    for (a, r, mu, m) in [(0.4_f64, 0.7_f64, 1.5, 0.8), (0.1, 0.95, 0.3, 2.0)] {
        let lhs1 = 0.125 * w(a) / (a * a * (1.0 - a * a).powi(2)) - (1.0 - a * a) * a / (1.0 + a * a).powi(4);
        let rhs1 = -0.5 * mu / (a * a)
            + m * 2.0 * a * r * w(r) * (1.0 - r * r) * (1.0 - a * a) / ((1.0 - a * a * r * r).powi(2) * (r * r - a * a).powi(2));
        let lhs2 = 0.5 * w(a) * (1.0 / ((a * r + 1.0).powi(2) * (a - r).powi(2)) + 1.0 / ((r + a).powi(2) * (a * r - 1.0).powi(2)))
            - (1.0 - r * r) * r / (1.0 + r * r).powi(4);
        let rhs2 = -0.5 * mu / (r * r) - 0.125 * m * w(r) / (r * r * (r * r - 1.0).powi(2));
        let config = SymmetricLayout::new(true, vec![a, r]).unwrap().configuration(Some(mu), &[1.0, m]).unwrap();
        let reduced = collinear_reduce(&config).unwrap();
        assert_relative_eq!(reduced[0], lhs1 - rhs1, epsilon = 1e-12, max_relative = 1e-12);
        assert_relative_eq!(reduced[1], lhs2 - rhs2, epsilon = 1e-12, max_relative = 1e-12);
    }
}

#[test]
fn seven_body_outside_matches_transcription() {
    for (x, y, z) in [(2.0, 3.0, 4.0), (1.2, 2.5, 7.0)] {
        let (mu, big_m, m) = (1.0, 1.0, 1.0);
        let config = SymmetricLayout::new(true, vec![x, y, z]).unwrap().configuration(Some(mu), &[1.0, big_m, m]).unwrap();
        let reduced = collinear_reduce(&config).unwrap();
        let oracle = seven_outside(x, y, z, mu, big_m, m);
        for (got, want) in reduced.iter().zip(oracle) {
            assert_relative_eq!(*got, want, epsilon = 1e-12, max_relative = 1e-12);
        }
    }
}

#[test]
fn reduced_equations_are_minus_four_times_the_complex_residual() {
    let config = SymmetricLayout::new(true, vec![0.5, 3.0]).unwrap().configuration(Some(2.0), &[1.0, 0.7]).unwrap();
    let full = condition_residual(&config).unwrap();
    let reduced = collinear_reduce(&config).unwrap();
    assert!(full.per_body[0].norm() < 1e-14);
    for (k, value) in reduced.iter().enumerate() {
        let body = &full.per_body[1 + 2 * k];
        assert!(body.im.abs() < 1e-14);
        assert_relative_eq!(*value, -4.0 * body.re, epsilon = 1e-13);
    }
}

#[test]
fn geometry_examples() {
    let z = c(0.3, -0.8);
    assert_relative_eq!(geodesic_cos(z, z), 1.0, epsilon = 1e-15);
    assert_eq!(geodesic_distance(z, z), 0.0);
    assert!(geodesic_cos(c(0.0, 0.0), c(1.0, 0.0)).abs() < 1e-15);
    assert_relative_eq!(geodesic_distance(c(0.0, 0.0), c(1.0, 0.0)), std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
    assert_relative_eq!(geodesic_cos(c(0.0, 0.0), c(0.5, 0.0)), 0.6, epsilon = 1e-15);
    let a: f64 = 0.7;
    let expected = (((1.0 - a * a).powi(2) - 4.0 * a * a) / (1.0 + a * a).powi(2)).acos();
    assert_relative_eq!(geodesic_distance(c(a, 0.0), c(-a, 0.0)), expected, epsilon = 1e-14);
    assert_relative_eq!(geodesic_distance(c(0.999_999, 0.0), c(-0.999_999, 0.0)), std::f64::consts::PI, epsilon = 1e-5);
}

#[test]
fn potential_examples() {
    assert!(potential_at(&[1.0, 1.0], &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap().abs() < 1e-15);
    assert_relative_eq!(potential_at(&[1.0, 1.0], &[c(0.0, 0.0), c(0.5, 0.0)]).unwrap(), 0.75, epsilon = 1e-14);
    let u1 = potential_at(&[1.0, 2.0, 0.5], &[c(0.1, 0.2), c(-0.7, 0.4), c(2.0, -1.0)]).unwrap();
    let u3 = potential_at(&[3.0, 6.0, 1.5], &[c(0.1, 0.2), c(-0.7, 0.4), c(2.0, -1.0)]).unwrap();
    assert_relative_eq!(u3, 9.0 * u1, max_relative = 1e-14);
    assert!(potential_at(&[1.0, 1.0], &[c(0.5, 0.0), c(0.5, 0.0)]).is_err());
}

#[test]
fn pair_t_identities() {
    assert_relative_eq!(pair_t(c(0.0, 0.0), c(1.7, 0.0)), 4.0 * 1.7 * 1.7, max_relative = 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let zi = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let zj = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let d = (1.0 + zi.norm_sqr()) * (1.0 + zj.norm_sqr());
        let via_sin = (d * geodesic_sin(zi, zj)).powi(2);
        assert_relative_eq!(pair_t(zi, zj), via_sin, max_relative = 1e-10);
        assert_relative_eq!(pair_t(zi, zj), pair_t_expanded(zi, zj), max_relative = 1e-8, epsilon = 1e-9);
    }
    let bodies = vec![Body::real(1.0, 0.5).unwrap(), Body::real(1.0, -2.0).unwrap()];
    assert!(Configuration::new(bodies).is_err());
}

/// Central differences of `U` in the real and imaginary parts of `z_i`:
/// `dU/dz̄ = (dU/dx + i dU/dy) / 2`.
fn fd_gradient(masses: &[f64], positions: &[Complex64], i: usize, h: f64) -> Complex64 {
    let shifted = |dz: Complex64| {
        let mut p = positions.to_vec();
        p[i] += dz;
        potential_at(masses, &p).unwrap()
    };
    let dx = (shifted(c(h, 0.0)) - shifted(c(-h, 0.0))) / (2.0 * h);
    let dy = (shifted(c(0.0, h)) - shifted(c(0.0, -h))) / (2.0 * h);
    c(dx, dy) * 0.5
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    while done < 20 {
        let n = rng.gen_range(3..=7);
        let positions: Vec<Complex64> = (0..n)
            .map(|_| Complex64::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let masses: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..5.0)).collect();
        let bodies: Vec<Body> = masses.iter().zip(&positions).map(|(m, z)| Body::new(*m, *z).unwrap()).collect();
        let Ok(config) = Configuration::new(bodies) else { continue };
        let clearance = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| geodesic_sin(positions[i], positions[j]))
            .fold(f64::INFINITY, f64::min);
        if clearance < 0.05 {
            continue;
        }
        for i in 0..n {
            let exact = gradient_conj_at(&config.masses(), &positions, i).unwrap();
            let fd = fd_gradient(&masses, &positions, i, 1e-6);
            let err = (exact - fd).norm() / exact.norm().max(1e-12);
            assert!(err < 1e-6, "n={n} body {i}: {exact} vs {fd}");
        }
        done += 1;
    }
}
