//! Closed-form expressions behind the nonexistence arguments, with the
//! polynomial factorizations used to prove their signs.
//!
//! * [`lemma2_expression`]: known side of the outer body's equation when two
//!   pairs lie inside the unit circle; positive for `0 < a < r < 1`.
//! * [`lemma5_expression`]: known side of an inner pair's own equation,
//!   positive for `x` in `(0, 1)`.
//! * [`lemma4_a1`]: the same quantity for `x > 1`, negative there.

/// `1/2 (a^2+1)^2 [1/((ar+1)^2 (a-r)^2) + 1/((r+a)^2 (ar-1)^2)] - (1-r^2) r / (1+r^2)^4`
pub fn lemma2_expression(a: f64, r: f64) -> f64 {
    let wa = a * a + 1.0;
    let near = (a * r + 1.0) * (a - r);
    let far = (r + a) * (a * r - 1.0);
    0.5 * wa * wa * (1.0 / (near * near) + 1.0 / (far * far)) - rotation_part(r)
}

fn rotation_part(r: f64) -> f64 {
    (1.0 - r * r) * r / (1.0 + r * r).powi(4)
}

/// Lower bound `H = 1/2 (a^2+1)^2 / ((ar-1)^2 (a+r)^2) - (1-r^2) r / (1+r^2)^4`.
pub fn lemma2_h(a: f64, r: f64) -> f64 {
    let wa = a * a + 1.0;
    let far = (r + a) * (a * r - 1.0);
    0.5 * wa * wa / (far * far) - rotation_part(r)
}

/// `dH/da = -(a^2+1)(ar+a+r-1)(ar-a-r-1) / ((r+a)^3 (1-ar)^3)`.
pub fn lemma2_h_derivative(a: f64, r: f64) -> f64 {
    -(a * a + 1.0) * (a * r + a + r - 1.0) * (a * r - a - r - 1.0) / ((r + a).powi(3) * (1.0 - a * r).powi(3))
}

/// The critical point `(1 - r) / (1 + r)` of `H` in `(0, 1)`.
pub fn lemma2_argmin(r: f64) -> f64 {
    (1.0 - r) / (1.0 + r)
}

/// `H` at its critical point: `(r^2+r+2)(2r^2-r+1) / (r^2+1)^4`.
pub fn lemma2_h_min(r: f64) -> f64 {
    (r * r + r + 2.0) * (2.0 * r * r - r + 1.0) / (r * r + 1.0).powi(4)
}

/// `d^2H/da^2` at the critical point: `4 (r+1)^4 / (r^2+1)^4`.
pub fn lemma2_h_curvature(r: f64) -> f64 {
    4.0 * (r + 1.0).powi(4) / (r * r + 1.0).powi(4)
}

fn self_pair_part(x: f64) -> f64 {
    let w = x * x + 1.0;
    let d = x * x - 1.0;
    w * w / (8.0 * d * d * x * x)
}

/// `-(1-x^2) x / (1+x^2)^4 + 1/8 (x^2+1)^2 / ((x^2-1)^2 x^2)`.
pub fn lemma5_expression(x: f64) -> f64 {
    -rotation_part(x) + self_pair_part(x)
}

pub fn lemma5_f(x: f64) -> f64 {
    poly(x, &[1.0, -2.0, 2.0, 2.0, 1.0])
}

pub fn lemma5_h(x: f64) -> f64 {
    x.powi(6) * (x * x - 2.0 * x + 8.0)
}

pub fn lemma5_d(x: f64) -> f64 {
    poly(x, &[1.0, 2.0, 8.0, 2.0, -2.0, -2.0])
}

pub fn lemma5_g(x: f64) -> f64 {
    lemma5_h(x) + lemma5_d(x)
}

/// `f g / (8 x^2 (x^2-1)^2 (x^2+1)^4)`, equal to [`lemma5_expression`].
pub fn lemma5_factored(x: f64) -> f64 {
    lemma5_f(x) * lemma5_g(x) / factored_denominator(x)
}

/// The unique positive root of `lemma5_d`, located by bisection on `(1, 2)`.
pub fn lemma5_d_root() -> f64 {
    bisect(lemma5_d, 1.0, 2.0)
}

/// `(x^2-1) x / (1+x^2)^4 - 1/8 (x^2+1)^2 / ((x^2-1)^2 x^2)`.
pub fn lemma4_a1(x: f64) -> f64 {
    -rotation_part(x) - self_pair_part(x)
}

pub fn lemma4_f(x: f64) -> f64 {
    poly(x, &[1.0, 2.0, 2.0, -2.0, 1.0])
}

pub fn lemma4_d(x: f64) -> f64 {
    poly(x, &[-1.0, 4.0, -1.0, -1.0, 1.0])
}

/// `x^8 + 2x^7 + 8x^6 + 2x D(x) + 1`.
pub fn lemma4_g(x: f64) -> f64 {
    x.powi(8) + 2.0 * x.powi(7) + 8.0 * x.powi(6) + 2.0 * x * lemma4_d(x) + 1.0
}

/// `-f g / (8 x^2 (x^2-1)^2 (x^2+1)^4)`, equal to [`lemma4_a1`].
pub fn lemma4_factored(x: f64) -> f64 {
    -lemma4_f(x) * lemma4_g(x) / factored_denominator(x)
}

fn factored_denominator(x: f64) -> f64 {
    let d = x * x - 1.0;
    8.0 * x * x * d * d * (x * x + 1.0).powi(4)
}

/// Horner evaluation, coefficients from the constant term up.
fn poly(x: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lemma2_examples() {
        assert!(lemma2_expression(0.5, 0.8) > 0.0);
        let r = 0.5;
        assert_relative_eq!(lemma2_h(lemma2_argmin(r), r), lemma2_h_min(r), max_relative = 1e-12);
        assert!(lemma2_h_min(r) > 0.0);
        assert!(lemma2_h_derivative(lemma2_argmin(r), r).abs() < 1e-12);
    }

    #[test]
    fn lemma2_derivatives_match_finite_differences() {
        for &(a, r) in &[(0.2, 0.6), (0.45, 0.9), (0.1, 0.3)] {
            let h = 1e-6;
            let fd = (lemma2_h(a + h, r) - lemma2_h(a - h, r)) / (2.0 * h);
            assert_relative_eq!(fd, lemma2_h_derivative(a, r), max_relative = 1e-6);
        }
        let r = 0.4;
        let a = lemma2_argmin(r);
        let h = 1e-4;
        let fd2 = (lemma2_h(a + h, r) - 2.0 * lemma2_h(a, r) + lemma2_h(a - h, r)) / (h * h);
        assert_relative_eq!(fd2, lemma2_h_curvature(r), max_relative = 1e-5);
    }

    #[test]
    fn lemma5_factorization() {
        for x in [0.05, 0.3, 0.5, 0.77, 0.99] {
            assert_relative_eq!(lemma5_expression(x), lemma5_factored(x), max_relative = 1e-12);
            assert!(lemma5_expression(x) > 0.0);
        }
        assert_eq!(lemma5_d(0.0), 1.0);
        let root = lemma5_d_root();
        assert!((root - 1.577_326_132_994_05).abs() < 1e-12);
    }

    #[test]
    fn lemma4_factorization() {
        for x in [1.01, 1.5, 2.0, 7.0, 49.0] {
            assert_relative_eq!(lemma4_a1(x), lemma4_factored(x), max_relative = 1e-12);
            assert!(lemma4_a1(x) < 0.0);
        }
        assert_eq!(lemma4_d(1.0), 2.0);
    }
}
