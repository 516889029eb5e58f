//! The stereographic model of the unit sphere.
//!
//! Points are complex numbers `z`; the metric is `4|dz|^2 / (1 + |z|^2)^2`,
//! so the unit circle is the image of the equator and `z` and `-1/z̄` are
//! antipodal. Geodesic distances, the cotangent potential and its Wirtinger
//! gradient live here.
//!
//! For two points `z`, `w` with `D = (1 + |z|^2)(1 + |w|^2)`:
//!
//! ```text
//! cos d = (4 Re(z w̄) + (|z|^2 - 1)(|w|^2 - 1)) / D
//! sin d = 2 |z - w| |1 + z w̄| / D
//! ```
//!
//! The sine form is exact algebra (the chordal half-angle identities) and is
//! used instead of `sqrt(1 - cos^2)`, which cancels badly near `d = 0` and
//! `d = pi`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// A pair is singular for the potential when `|sin d|` falls below this.
pub const SINGULAR_SIN_TOL: f64 = 1e-13;

/// One particle: mass and stereographic position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub mass: f64,
    pub z: Complex64,
}

impl Body {
    /// A physical body; the mass must be positive and the position finite.
    pub fn new(mass: f64, z: Complex64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidInput(format!("mass must be positive, got {mass}")));
        }
        Self::formal(mass, z)
    }

    /// A body whose mass may be zero or negative.
    ///
    /// Used when back-substituting the unique solution of a reduced linear
    /// system, which need not be physical, into the full condition system.
    pub fn formal(mass: f64, z: Complex64) -> Result<Self> {
        if !mass.is_finite() {
            return Err(Error::InvalidInput(format!("mass must be finite, got {mass}")));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidInput(format!("position must be finite, got {z}")));
        }
        Ok(Self { mass, z })
    }

    pub fn real(mass: f64, x: f64) -> Result<Self> {
        Self::new(mass, Complex64::new(x, 0.0))
    }
}

/// An ordered list of bodies with pairwise distinct, non-antipodal positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Configuration {
    bodies: Vec<Body>,
}

impl Configuration {
    pub fn new(bodies: Vec<Body>) -> Result<Self> {
        if bodies.is_empty() {
            return Err(Error::InvalidInput("configuration has no bodies".into()));
        }
        for i in 0..bodies.len() {
            for j in i + 1..bodies.len() {
                if pair_is_singular(bodies[i].z, bodies[j].z) {
                    return Err(Error::AntipodalSingularity { i, j });
                }
            }
        }
        Ok(Self { bodies })
    }

    pub fn bodies(&self) -> &[Body] {
        &self.bodies
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.bodies.iter().map(|b| b.mass).collect()
    }

    pub fn positions(&self) -> Vec<Complex64> {
        self.bodies.iter().map(|b| b.z).collect()
    }

    /// Same masses at new positions, re-validated.
    pub fn with_positions(&self, positions: &[Complex64]) -> Result<Self> {
        if positions.len() != self.bodies.len() {
            return Err(Error::InvalidInput("position count does not match body count".into()));
        }
        let bodies = self
            .bodies
            .iter()
            .zip(positions)
            .map(|(b, &z)| Body::formal(b.mass, z))
            .collect::<Result<Vec<_>>>()?;
        Self::new(bodies)
    }

    /// Rotate every position by `e^{i theta}`.
    pub fn rotated(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        Self {
            bodies: self
                .bodies
                .iter()
                .map(|b| Body { mass: b.mass, z: b.z * phase })
                .collect(),
        }
    }
}

fn pair_is_singular(z: Complex64, w: Complex64) -> bool {
    geodesic_sin(z, w).abs() < SINGULAR_SIN_TOL
}

/// `(1 + |z|^2)(1 + |w|^2)`.
#[inline]
pub(crate) fn conformal_product(z: Complex64, w: Complex64) -> f64 {
    (1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())
}

/// Numerator of `cos d`: `2(z w̄ + w z̄) + (|z|^2 - 1)(|w|^2 - 1)`.
#[inline]
pub(crate) fn cos_numerator(z: Complex64, w: Complex64) -> f64 {
    let re_zw = z.re * w.re + z.im * w.im;
    4.0 * re_zw + (z.norm_sqr() - 1.0) * (w.norm_sqr() - 1.0)
}

/// `2 |z - w| |1 + z w̄|`, the numerator of `sin d`.
#[inline]
pub(crate) fn sin_numerator(z: Complex64, w: Complex64) -> f64 {
    2.0 * (w - z).norm() * (1.0 + z * w.conj()).norm()
}

/// Cosine of the geodesic distance between two points.
pub fn geodesic_cos(z: Complex64, w: Complex64) -> f64 {
    (cos_numerator(z, w) / conformal_product(z, w)).clamp(-1.0, 1.0)
}

/// Sine of the geodesic distance (non-negative).
pub fn geodesic_sin(z: Complex64, w: Complex64) -> f64 {
    (sin_numerator(z, w) / conformal_product(z, w)).min(1.0)
}

/// Geodesic distance in `[0, pi]`.
pub fn geodesic_distance(z: Complex64, w: Complex64) -> f64 {
    sin_numerator(z, w).atan2(cos_numerator(z, w))
}

/// `cot d` computed from the cosine and sine numerators directly.
fn cot_distance(z: Complex64, w: Complex64) -> Option<f64> {
    let s = sin_numerator(z, w);
    if s / conformal_product(z, w) < SINGULAR_SIN_TOL {
        return None;
    }
    Some(cos_numerator(z, w) / s)
}

/// `U = sum_{i<j} m_i m_j cot d(z_i, z_j)`.
pub fn potential(config: &Configuration) -> Result<f64> {
    potential_at(&config.masses(), &config.positions())
}

/// Potential for explicit masses and positions (used along trajectories).
pub fn potential_at(masses: &[f64], positions: &[Complex64]) -> Result<f64> {
    let mut sum = NeumaierSum::default();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let cot = cot_distance(positions[i], positions[j]).ok_or(Error::SingularPair { i, j })?;
            sum.add(masses[i] * masses[j] * cot);
        }
    }
    Ok(sum.total())
}

/// Wirtinger derivative `dU/dz̄_i`:
///
/// ```text
/// sum_{j != i} 2 m_i m_j (1+|z_i|^2)(1+|z_j|^2)^2 (1 + z_i z̄_j)(z_j - z_i) / T_ij^{3/2}
/// ```
///
/// with `T_ij^{3/2} = 8 |z_j - z_i|^3 |1 + z_i z̄_j|^3`.
pub fn potential_gradient_conj(config: &Configuration, i: usize) -> Result<Complex64> {
    gradient_conj_at(&config.masses(), &config.positions(), i)
}

pub fn gradient_conj_at(masses: &[f64], positions: &[Complex64], i: usize) -> Result<Complex64> {
    let zi = positions[i];
    let wi = 1.0 + zi.norm_sqr();
    let mut re = NeumaierSum::default();
    let mut im = NeumaierSum::default();
    for (j, &zj) in positions.iter().enumerate() {
        if j == i {
            continue;
        }
        if pair_is_singular(zi, zj) {
            return Err(Error::SingularPair { i: i.min(j), j: i.max(j) });
        }
        let cross = 1.0 + zi * zj.conj();
        let diff = zj - zi;
        let wj = 1.0 + zj.norm_sqr();
        let denom = 4.0 * (diff.norm() * cross.norm()).powi(3);
        let term = cross * diff * (masses[i] * masses[j] * wi * wj * wj / denom);
        re.add(term.re);
        im.add(term.im);
    }
    Ok(Complex64::new(re.total(), im.total()))
}
