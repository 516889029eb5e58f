//! The relative-equilibrium condition system.
//!
//! A configuration rotates rigidly iff for every body
//!
//! ```text
//! (1 - r_i^2) z_i / (4 (1 + r_i^2)^4)
//!     + sum_{j != i} m_j (r_j^2 + 1)^2 (1 + z_i z̄_j)(z_j - z_i) / T_ij^{3/2} = 0
//! ```
//!
//! with `T_ij = (r_i^2+1)^2 (r_j^2+1)^2 - [2(z_i z̄_j + z̄_i z_j) + (r_i^2-1)(r_j^2-1)]^2`.
//! The left side balances the centripetal term of a rotation with angular
//! speed 1/2 (see [`crate::verify::fit_angular_velocity`]).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::numeric::NeumaierSum;

/// `T_ij` below this fraction of `((r_i^2+1)(r_j^2+1))^2` is treated as zero.
pub const ANTIPODAL_REL_TOL: f64 = 1e-12;

/// Imaginary parts up to this size (relative to the largest modulus) count as
/// real when checking for a collinear layout.
pub const COLLINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairKernel {
    pub t_ij: f64,
    pub numerator: Complex64,
}

impl PairKernel {
    /// The pair's contribution `numerator / T_ij^{3/2}`.
    pub fn term(&self) -> Complex64 {
        self.numerator / self.t_ij.powf(1.5)
    }
}

/// `T_ij` from the factorized identity `T = 4 |z - w|^2 |1 + z w̄|^2`.
pub fn pair_t(zi: Complex64, zj: Complex64) -> f64 {
    4.0 * (zj - zi).norm_sqr() * (1.0 + zi * zj.conj()).norm_sqr()
}

/// `T_ij` in expanded form, `D^2 - N^2`. Exposed for cross-checks only; it loses
/// precision near collisions and antipodal pairs.
pub fn pair_t_expanded(zi: Complex64, zj: Complex64) -> f64 {
    let (ri2, rj2) = (zi.norm_sqr(), zj.norm_sqr());
    let d = (ri2 + 1.0) * (rj2 + 1.0);
    let n = 4.0 * (zi * zj.conj()).re + (ri2 - 1.0) * (rj2 - 1.0);
    d * d - n * n
}

fn kernel_indexed(zi: Complex64, zj: Complex64, mj: f64, i: usize, j: usize) -> Result<PairKernel> {
    let t_ij = pair_t(zi, zj);
    let scale = (zi.norm_sqr() + 1.0) * (zj.norm_sqr() + 1.0);
    if !(t_ij > ANTIPODAL_REL_TOL * scale * scale) {
        return Err(Error::AntipodalSingularity { i: i.min(j), j: i.max(j) });
    }
    let wj = zj.norm_sqr() + 1.0;
    let numerator = (1.0 + zi * zj.conj()) * (zj - zi) * (mj * wj * wj);
    Ok(PairKernel { t_ij, numerator })
}

/// Kernel of the pair `(z_i, z_j)` weighted by `m_j`.
pub fn pair_kernel(zi: Complex64, zj: Complex64, mj: f64) -> Result<PairKernel> {
    kernel_indexed(zi, zj, mj, 0, 1)
}

/// Left-hand (rotation) term `(1 - r^2) z / (4 (1 + r^2)^4)`.
pub fn rotation_term(z: Complex64) -> Complex64 {
    let r2 = z.norm_sqr();
    z * ((1.0 - r2) / (4.0 * (1.0 + r2).powi(4)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResidual {
    pub per_body: Vec<Complex64>,
    pub max_abs: f64,
}

/// Residual of the condition system for every body.
pub fn condition_residual(config: &Configuration) -> Result<ConditionResidual> {
    condition_residual_at(&config.masses(), &config.positions())
}

/// Same as [`condition_residual`] for raw masses and positions. Masses enter
/// linearly, so formal (zero or negative) values are accepted.
pub fn condition_residual_at(masses: &[f64], positions: &[Complex64]) -> Result<ConditionResidual> {
    if masses.len() != positions.len() {
        return Err(Error::InvalidInput("masses and positions differ in length".into()));
    }
    let n = positions.len();
    let mut per_body = Vec::with_capacity(n);
    for i in 0..n {
        let lhs = rotation_term(positions[i]);
        let mut re: NeumaierSum = [lhs.re].into_iter().collect();
        let mut im: NeumaierSum = [lhs.im].into_iter().collect();
        for j in (0..n).filter(|&j| j != i) {
            let term = kernel_indexed(positions[i], positions[j], masses[j], i, j)?.term();
            re.add(term.re);
            im.add(term.im);
        }
        per_body.push(Complex64::new(re.total(), im.total()));
    }
    let max_abs = per_body.iter().map(|r| r.norm()).fold(0.0, f64::max);
    Ok(ConditionResidual { per_body, max_abs })
}

/// Real kernel of a collinear pair: the coefficient of `m_j` in the reduced
/// equation of a body at `xi` due to a body at `xj`.
///
/// `K = (1 + xj^2)^2 sgn(1 + xi xj) sgn(xj - xi) / (2 (1 + xi xj)^2 (xj - xi)^2)`
pub fn collinear_kernel(xi: f64, xj: f64) -> f64 {
    let cross = 1.0 + xi * xj;
    let diff = xj - xi;
    let wj = 1.0 + xj * xj;
    wj * wj * cross.signum() * diff.signum() / (2.0 * cross * cross * diff * diff)
}

/// Constant part `(x^2 - 1) x / (1 + x^2)^4` of the reduced equation at `x`.
pub fn collinear_constant(x: f64) -> f64 {
    let x2 = x * x;
    (x2 - 1.0) * x / (1.0 + x2).powi(4)
}

/// Reduce the condition system of a collinear symmetric configuration to one
/// real equation per mirror pair, ordered by increasing radius.
///
/// Each value is `(p^2-1)p/(1+p^2)^4 - sum_j m_j K(p, x_j)` for the pair body
/// at `+p`, which is `-4` times the real residual of that body. The origin
/// body's equation vanishes identically and is omitted.
pub fn collinear_reduce(config: &Configuration) -> Result<Vec<f64>> {
    let layout = detect_symmetric(config)?;
    let masses = config.masses();
    let xs: Vec<f64> = config.positions().iter().map(|z| z.re).collect();
    let mut out = Vec::with_capacity(layout.len());
    for &i in &layout {
        let p = xs[i];
        let mut sum: NeumaierSum = [collinear_constant(p)].into_iter().collect();
        for (j, &xj) in xs.iter().enumerate() {
            if j == i {
                continue;
            }
            let t = pair_t(Complex64::new(p, 0.0), Complex64::new(xj, 0.0));
            let w = (1.0 + p * p) * (1.0 + xj * xj);
            if !(t > ANTIPODAL_REL_TOL * w * w) {
                return Err(Error::AntipodalSingularity { i: i.min(j), j: i.max(j) });
            }
            sum.add(-masses[j] * collinear_kernel(p, xj));
        }
        out.push(sum.total());
    }
    Ok(out)
}

/// Indices of the positive member of each mirror pair, by increasing radius.
fn detect_symmetric(config: &Configuration) -> Result<Vec<usize>> {
    let zs = config.positions();
    let scale = zs.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = COLLINEAR_TOL * scale;
    if let Some(k) = zs.iter().position(|z| z.im.abs() > tol) {
        return Err(Error::NotCollinearSymmetric(format!("body {k} is off the real axis")));
    }
    let masses = config.masses();
    let mut origin = 0;
    let mut positive = Vec::new();
    for (k, z) in zs.iter().enumerate() {
        if z.re.abs() <= tol {
            origin += 1;
        } else if z.re > 0.0 {
            positive.push(k);
        }
    }
    if origin > 1 {
        return Err(Error::NotCollinearSymmetric("more than one body at the origin".into()));
    }
    if 2 * positive.len() + origin != zs.len() {
        return Err(Error::NotCollinearSymmetric("bodies do not come in mirror pairs".into()));
    }
    for &k in &positive {
        let p = zs[k].re;
        let mirror = zs
            .iter()
            .enumerate()
            .find(|(_, w)| (w.re + p).abs() <= tol)
            .map(|(j, _)| j)
            .ok_or_else(|| Error::NotCollinearSymmetric(format!("body {k} at {p} has no mirror")))?;
        let (mk, mj) = (masses[k], masses[mirror]);
        if (mk - mj).abs() > 1e-12 * mk.abs().max(mj.abs()).max(1.0) {
            return Err(Error::NotCollinearSymmetric(format!("mirror bodies {k} and {mirror} differ in mass")));
        }
    }
    positive.sort_by(|&i, &j| zs[i].re.total_cmp(&zs[j].re));
    Ok(positive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_sin, Body};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn five(a: f64, r: f64, mu: f64, m: f64) -> Configuration {
        Configuration::new(vec![
            Body::formal(mu, c(0.0, 0.0)).unwrap(),
            Body::real(1.0, a).unwrap(),
            Body::real(1.0, -a).unwrap(),
            Body::formal(m, c(r, 0.0)).unwrap(),
            Body::formal(m, c(-r, 0.0)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn kernel_with_origin() {
        for rj in [0.3, 1.7, 4.0] {
            let k = pair_kernel(c(0.0, 0.0), c(0.0, rj), 1.0).unwrap();
            assert_relative_eq!(k.t_ij, 4.0 * rj * rj, max_relative = 1e-14);
        }
    }

    #[test]
    fn kernel_refuses_antipodal_pair() {
        let err = pair_kernel(c(2.0, 0.0), c(-0.5, 0.0), 1.0).unwrap_err();
        assert!(matches!(err, Error::AntipodalSingularity { .. }));
    }

    #[test]
    fn kernel_t_matches_sine_identity() {
        let (zi, zj) = (c(0.3, -1.2), c(-0.8, 0.45));
        let w = (zi.norm_sqr() + 1.0) * (zj.norm_sqr() + 1.0);
        let s = geodesic_sin(zi, zj);
        let k = pair_kernel(zi, zj, 2.0).unwrap();
        assert_relative_eq!(k.t_ij, w * w * s * s, max_relative = 1e-10);
        assert_relative_eq!(k.t_ij, pair_t_expanded(zi, zj), max_relative = 1e-10);
    }

    #[test]
    fn origin_residual_vanishes() {
        let cfg = five(0.7, 2.2, 1.3, 0.4);
        let res = condition_residual(&cfg).unwrap();
        assert!(res.per_body[0].norm() < 1e-14);
    }

    #[test]
    fn nonequilibrium_pair_has_residual() {
        let cfg = Configuration::new(vec![Body::real(1.0, 0.5).unwrap(), Body::real(1.0, 2.0).unwrap()]).unwrap();
        assert!(condition_residual(&cfg).unwrap().max_abs > 1e-3);
    }

    #[test]
    fn reduction_is_minus_four_times_real_residual() {
        let cfg = five(2.0, 3.0, 1.0, 1.0);
        let reduced = collinear_reduce(&cfg).unwrap();
        let res = condition_residual(&cfg).unwrap();
        assert_eq!(reduced.len(), 2);
        assert_relative_eq!(reduced[0], -4.0 * res.per_body[1].re, max_relative = 1e-12);
        assert_relative_eq!(reduced[1], -4.0 * res.per_body[3].re, max_relative = 1e-12);
        assert!(res.per_body.iter().all(|r| r.im == 0.0));
    }

    #[test]
    fn reduction_rejects_asymmetric_layouts() {
        let cfg = Configuration::new(vec![Body::real(1.0, 0.5).unwrap(), Body::real(1.0, -0.6).unwrap()]).unwrap();
        assert!(matches!(collinear_reduce(&cfg), Err(Error::NotCollinearSymmetric(_))));
        let off_axis = Configuration::new(vec![Body::new(1.0, c(0.5, 0.1)).unwrap(), Body::new(1.0, c(-0.5, -0.1)).unwrap()]).unwrap();
        assert!(matches!(collinear_reduce(&off_axis), Err(Error::NotCollinearSymmetric(_))));
    }
}
