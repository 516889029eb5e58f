//! Independent checks of candidate relative equilibria: angular velocity
//! fitted from force balance, integration of the rigidly rotating initial
//! data, lemma audits and Monte Carlo estimates of the positive-mass set.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::{condition_residual, ConditionResidual};
use crate::dynamics::{acceleration, energy, integrate, interaction_acceleration, rigid_rotation_state, IntegrationSettings, State};
use crate::error::{Error, Result};
use crate::family5::{self, FiveBodyPositions};
use crate::family7::{self, SevenBodyPositions};
use crate::geometry::{geodesic_distance, Configuration};
use crate::lemmas;
use crate::numeric::{wilson_interval, NeumaierSum};
use crate::sampling::{ordered_tuple, QuasiRandom};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Force-balance consistency below this certifies a relative equilibrium.
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// Bodies whose centripetal factor `|z|(1-|z|^2)/(1+|z|^2)` is below this
/// carry no information about `omega`.
const CENTRIPETAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularVelocityFit {
    pub omega: f64,
    pub omega_sq: f64,
    /// `max_i |F_i + omega^2 g_i| / (omega^2 max_i |g_i|)`.
    pub consistency: f64,
    /// `omega^2` implied by each body alone (`None` where `g_i = 0`).
    pub per_body_omega_sq: Vec<Option<f64>>,
}

/// Least-squares `omega^2` from `F_i = -omega^2 g_i`, where `F_i` is the
/// interaction acceleration and `g_i = z_i (1-|z_i|^2)/(1+|z_i|^2)` the
/// centripetal factor of a uniform rotation `z_i e^{i omega t}`.
pub fn fit_angular_velocity(config: &Configuration) -> Result<AngularVelocityFit> {
    let positions = config.positions();
    let forces = interaction_acceleration(&config.masses(), &positions)?;
    let g: Vec<Complex64> = positions
        .iter()
        .map(|z| {
            let r2 = z.norm_sqr();
            z * ((1.0 - r2) / (1.0 + r2))
        })
        .collect();
    let mut num = NeumaierSum::default();
    let mut den = NeumaierSum::default();
    for (f, gi) in forces.iter().zip(&g) {
        num.add(-(f * gi.conj()).re);
        den.add(gi.norm_sqr());
    }
    let g_max = g.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if g_max < CENTRIPETAL_FLOOR {
        return Err(Error::InvalidInput("no body has a nonzero centripetal factor".into()));
    }
    let omega_sq = num.total() / den.total();
    if omega_sq <= 0.0 {
        return Err(Error::NegativeOmegaSquared { omega_sq });
    }
    let consistency = forces.iter().zip(&g).map(|(f, gi)| (f + gi * omega_sq).norm()).fold(0.0, f64::max) / (omega_sq * g_max);
    let per_body_omega_sq = forces
        .iter()
        .zip(&g)
        .map(|(f, gi)| (gi.norm() >= CENTRIPETAL_FLOOR).then(|| -(f * gi.conj()).re / gi.norm_sqr()))
        .collect();
    Ok(AngularVelocityFit { omega: omega_sq.sqrt(), omega_sq, consistency, per_body_omega_sq })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub omega: f64,
    pub period: f64,
    pub periods: f64,
    pub t_final: f64,
    /// Largest relative change of any pairwise geodesic distance.
    pub distance_drift: f64,
    /// Largest relative change of any `|z_i|`.
    pub radius_drift: f64,
    /// Largest relative change of `T - U`.
    pub energy_drift: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Output samples per period in [`rigid_rotation_check`].
const SAMPLES_PER_PERIOD: f64 = 200.0;

/// Integrate the rotating initial data `z_i' = i omega z_i` for `periods`
/// revolutions and measure how far the shape drifts.
///
/// `passed` requires distance and radius drift below `tol`.
pub fn rigid_rotation_check(config: &Configuration, omega: f64, periods: f64, tol: f64) -> Result<DriftReport> {
    if !(omega > 0.0 && omega.is_finite() && periods > 0.0 && periods.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!("bad rotation check parameters omega={omega} periods={periods} tol={tol}")));
    }
    let period = 2.0 * std::f64::consts::PI / omega;
    let t_final = periods * period;
    let state0 = rigid_rotation_state(config, omega);
    let settings = IntegrationSettings {
        rel_tol: 1e-13,
        abs_tol: 1e-13,
        max_step: period / 400.0,
        t_final,
        samples: (SAMPLES_PER_PERIOD * periods).ceil() as usize + 1,
    };
    let trajectory = integrate(config, &state0, &settings)?;

    let pairs = |p: &[Complex64]| -> Vec<f64> {
        let mut d = Vec::new();
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                d.push(geodesic_distance(p[i], p[j]));
            }
        }
        d
    };
    let d0 = pairs(&state0.positions);
    let r0: Vec<f64> = state0.positions.iter().map(|z| z.norm()).collect();
    let e0 = energy(config, &state0)?;
    let rel = |now: f64, then: f64| (now - then).abs() / then.abs().max(f64::MIN_POSITIVE);
    let (mut distance_drift, mut radius_drift, mut energy_drift) = (0.0_f64, 0.0_f64, 0.0_f64);
    for s in &trajectory {
        for (d, d_ref) in pairs(&s.positions).iter().zip(&d0) {
            distance_drift = distance_drift.max(rel(*d, *d_ref));
        }
        for (z, r_ref) in s.positions.iter().zip(&r0) {
            // The origin body stays at the origin; compare absolutely there.
            let dr = if *r_ref > 0.0 { rel(z.norm(), *r_ref) } else { z.norm() };
            radius_drift = radius_drift.max(dr);
        }
        energy_drift = energy_drift.max(rel(energy(config, s)?, e0));
    }
    Ok(DriftReport {
        omega,
        period,
        periods,
        t_final,
        distance_drift,
        radius_drift,
        energy_drift,
        tol,
        passed: distance_drift < tol && radius_drift < tol,
    })
}

/// Largest real part among the eigenvalues of the flow linearized about the
/// rotating configuration, in the frame rotating with `omega`.
///
/// In that frame `u = e^{-i omega t} z` obeys
/// `u'' = a(u, u' + i omega u) - 2 i omega u' + omega^2 u`, where `a` is the
/// acceleration, and the configuration is a fixed point. Perturbations grow
/// like `exp(exponent * t)`, so a positive value bounds how long a
/// floating-point integration can stay near the rigid motion.
pub fn instability_exponent(config: &Configuration, omega: f64) -> Result<f64> {
    let n = config.len();
    let positions = config.positions();
    let dim = 4 * n;
    let scale = positions.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let h = 1e-6 * scale;
    let rot = Complex64::new(0.0, omega);
    let field = |y: &[f64]| -> Result<Vec<f64>> {
        let cplx = |k: usize| Complex64::new(y[2 * k], y[2 * k + 1]);
        let u: Vec<Complex64> = (0..n).map(cplx).collect();
        let v: Vec<Complex64> = (n..2 * n).map(cplx).collect();
        let inertial = State { positions: u.clone(), velocities: v.iter().zip(&u).map(|(v, u)| v + rot * u).collect(), t: 0.0 };
        let acc = acceleration(config, &inertial)?;
        let mut out = vec![0.0; dim];
        for k in 0..n {
            let a = acc[k] - 2.0 * rot * v[k] + omega * omega * u[k];
            out[2 * k] = v[k].re;
            out[2 * k + 1] = v[k].im;
            out[2 * (n + k)] = a.re;
            out[2 * (n + k) + 1] = a.im;
        }
        Ok(out)
    };
    let mut y0 = vec![0.0; dim];
    for (k, z) in positions.iter().enumerate() {
        y0[2 * k] = z.re;
        y0[2 * k + 1] = z.im;
    }
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    for col in 0..dim {
        let mut yp = y0.clone();
        let mut ym = y0.clone();
        yp[col] += h;
        ym[col] -= h;
        let (fp, fm) = (field(&yp)?, field(&ym)?);
        for row in 0..dim {
            jac[(row, col)] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    Ok(jac.complex_eigenvalues().iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Force balance holds and the integrated shape stays rigid.
    RelativeEquilibrium,
    /// Force balance holds but linear instability amplifies rounding errors
    /// beyond the drift tolerance within the integration horizon.
    UnstableRelativeEquilibrium,
    NotRelativeEquilibrium,
    NoRigidRotation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyRecord {
    pub mass: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationInputs {
    pub bodies: Vec<BodyRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub periods: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub inputs: VerificationInputs,
    /// Condition residuals (which vanish for the normalization `omega = 1/2`).
    pub residuals: ConditionResidual,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<AngularVelocityFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instability_exponent: Option<f64>,
    pub verdict: Verdict,
}

/// Fit `omega` (or use `omega` when given), integrate the rotating state and
/// report whether the configuration is a relative equilibrium.
///
/// The verdict rests on force balance; the integration shows whether the
/// rigid motion is also observable numerically over `periods` revolutions.
/// An integration stopped by a near-collision leaves `drift` empty.
pub fn verify_configuration(config: &Configuration, omega: Option<f64>, periods: f64, tol: f64) -> Result<VerificationReport> {
    let inputs = VerificationInputs {
        bodies: config.bodies().iter().map(|b| BodyRecord { mass: b.mass, re: b.z.re, im: b.z.im }).collect(),
        omega,
        periods,
        tol,
    };
    let residuals = condition_residual(config)?;
    let fit = match fit_angular_velocity(config) {
        Ok(f) => f,
        Err(Error::NegativeOmegaSquared { .. }) if omega.is_none() => {
            return Ok(VerificationReport {
                inputs,
                residuals,
                omega: None,
                consistency: None,
                fit: None,
                drift: None,
                instability_exponent: None,
                verdict: Verdict::NoRigidRotation,
            })
        }
        Err(Error::NegativeOmegaSquared { omega_sq }) => AngularVelocityFit {
            omega: f64::NAN,
            omega_sq,
            consistency: f64::INFINITY,
            per_body_omega_sq: Vec::new(),
        },
        Err(e) => return Err(e),
    };
    let w = omega.unwrap_or(fit.omega);
    let drift = match rigid_rotation_check(config, w, periods, tol) {
        Ok(d) => Some(d),
        Err(Error::SingularityReached { .. } | Error::StepSizeUnderflow { .. }) => None,
        Err(e) => return Err(e),
    };
    let exponent = instability_exponent(config, w)?;
    let balanced = fit.consistency < CONSISTENCY_TOL && (omega.is_none() || (w - fit.omega).abs() <= CONSISTENCY_TOL * fit.omega);
    let verdict = match (&drift, balanced) {
        (Some(d), true) if d.passed => Verdict::RelativeEquilibrium,
        (_, true) => Verdict::UnstableRelativeEquilibrium,
        (_, false) => Verdict::NotRelativeEquilibrium,
    };
    Ok(VerificationReport {
        inputs,
        residuals,
        omega: Some(w),
        consistency: fit.consistency.is_finite().then_some(fit.consistency),
        fit: fit.omega.is_finite().then_some(fit),
        drift,
        instability_exponent: Some(exponent),
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorCheck {
    pub name: String,
    pub pass: bool,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaAudit {
    pub lemma: String,
    pub domain: String,
    pub samples: usize,
    pub seed: u64,
    pub pass: bool,
    pub violations: usize,
    /// Smallest value of the quantity required to be positive.
    pub min_margin: f64,
    pub argmin: Vec<f64>,
    pub factor_checks: Vec<FactorCheck>,
}

pub const LEMMA_NAMES: [&str; 3] = ["lema2", "lemma5", "lemma4"];

/// Relative agreement required between an expression and its factored form.
const FACTOR_REL_TOL: f64 = 1e-9;

struct LemmaSample {
    point: Vec<f64>,
    margin: f64,
    checks: Vec<bool>,
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= FACTOR_REL_TOL * x.abs().max(y.abs())
}

/// Evaluate a lemma's inequality on `samples` quasi-random points of its
/// domain:
///
/// * `lema2`: `0 < a < r < 1`; expression `> 0`, expression `>= H`, `H` not
///   below its value at the critical point, and that value positive.
/// * `lemma5`: `x` in `(0, 1)`; expression `> 0`, `f, h, g > 0`, `D(0) = 1`
///   and the factorization.
/// * `lemma4`: `x` in `(1, 50)`; `A_1 < 0`, `f, g > 0`, `D(1) = 2`,
///   `D(x) > 2` and the factorization.
pub fn lemma_audit(name: &str, samples: usize, seed: u64) -> Result<LemmaAudit> {
    let (domain, dim, check_names): (&str, usize, &[&str]) = match name {
        "lema2" => ("0<a<r<1", 2, &["expression>=H", "H>=H(argmin)", "H(argmin)>0"]),
        "lemma5" => ("0<x<1", 1, &["f>0", "h>0", "g>0", "D(0)=1", "factorization"]),
        "lemma4" => ("1<x<50", 1, &["f>0", "g>0", "D(1)=2", "D>2", "factorization"]),
        other => return Err(Error::UnknownLemma(other.to_string())),
    };
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let q = QuasiRandom::new(dim, seed);
    let evaluated: Vec<Option<LemmaSample>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let u = q.point(k);
            match name {
                "lema2" => {
                    let p = ordered_tuple(&u, 0.0, 1.0)?;
                    let (a, r) = (p[0], p[1]);
                    let e = lemmas::lemma2_expression(a, r);
                    let h = lemmas::lemma2_h(a, r);
                    let h_min = lemmas::lemma2_h_min(r);
                    let slack = 1e-12 * h.abs().max(1.0);
                    Some(LemmaSample { point: p, margin: e, checks: vec![e >= h - slack, h >= h_min - slack, h_min > 0.0] })
                }
                "lemma5" => {
                    let x = u[0];
                    let e = lemmas::lemma5_expression(x);
                    Some(LemmaSample {
                        point: vec![x],
                        margin: e,
                        checks: vec![
                            lemmas::lemma5_f(x) > 0.0,
                            lemmas::lemma5_h(x) > 0.0,
                            lemmas::lemma5_g(x) > 0.0,
                            lemmas::lemma5_d(0.0) == 1.0,
                            close(e, lemmas::lemma5_factored(x)),
                        ],
                    })
                }
                _ => {
                    let x = 1.0 + 49.0 * u[0];
                    let e = lemmas::lemma4_a1(x);
                    Some(LemmaSample {
                        point: vec![x],
                        margin: -e,
                        checks: vec![
                            lemmas::lemma4_f(x) > 0.0,
                            lemmas::lemma4_g(x) > 0.0,
                            lemmas::lemma4_d(1.0) == 2.0,
                            lemmas::lemma4_d(x) > 2.0,
                            close(e, lemmas::lemma4_factored(x)),
                        ],
                    })
                }
            }
        })
        .collect();

    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    let mut argmin = Vec::new();
    let mut failures = vec![0usize; check_names.len()];
    let mut counted = 0;
    for s in evaluated.into_iter().flatten() {
        counted += 1;
        if !(s.margin > 0.0) {
            violations += 1;
        }
        if s.margin < min_margin {
            min_margin = s.margin;
            argmin = s.point.clone();
        }
        for (f, ok) in failures.iter_mut().zip(&s.checks) {
            if !ok {
                *f += 1;
            }
        }
    }
    let factor_checks: Vec<FactorCheck> = check_names
        .iter()
        .zip(&failures)
        .map(|(n, &f)| FactorCheck { name: n.to_string(), pass: f == 0, failures: f })
        .collect();
    Ok(LemmaAudit {
        lemma: name.to_string(),
        domain: domain.to_string(),
        samples: counted,
        seed,
        pass: violations == 0 && factor_checks.iter().all(|c| c.pass) && counted > 0,
        violations,
        min_margin,
        argmin,
        factor_checks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Five,
    Seven,
}

impl Family {
    pub fn dim(self) -> usize {
        match self {
            Family::Five => 2,
            Family::Seven => 3,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "five" => Some(Family::Five),
            "seven" => Some(Family::Seven),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub family: Family,
    /// Positions are sampled as increasing tuples in `(lo, hi)`.
    pub bounds: (f64, f64),
    pub samples: usize,
    pub seed: u64,
    /// Points where the exact solve gave strictly positive certified masses.
    pub hits: usize,
    /// Points rejected as inadmissible or singular (counted as misses).
    pub rejected: usize,
    pub fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
}

/// Monte Carlo fraction of increasing position tuples in `(lo, hi)` whose
/// reduced system has a strictly positive, certified exact solution.
pub fn measure_estimate(family: Family, bounds: (f64, f64), samples: usize, seed: u64) -> Result<MeasureEstimate> {
    let (lo, hi) = bounds;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) || samples == 0 {
        return Err(Error::InvalidInput(format!("bad measure bounds ({lo}, {hi}) or samples {samples}")));
    }
    let q = QuasiRandom::new(family.dim(), seed);
    let outcome: Vec<Option<bool>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let p = ordered_tuple(&q.point(k), lo, hi)?;
            let sol = match family {
                Family::Five => FiveBodyPositions::new(p[0], p[1]).and_then(|pos| family5::solve_reduced(&pos)),
                Family::Seven => SevenBodyPositions::new(p[0], p[1], p[2]).and_then(|pos| family7::solve_reduced7(&pos)),
            };
            sol.ok().map(|s| s.certified_positive())
        })
        .collect();
    let hits = outcome.iter().filter(|o| **o == Some(true)).count();
    let rejected = outcome.iter().filter(|o| o.is_none()).count();
    let (ci_low, ci_high) = wilson_interval(hits, samples, Z95);
    Ok(MeasureEstimate {
        family,
        bounds,
        samples,
        seed,
        hits,
        rejected,
        fraction: hits as f64 / samples as f64,
        ci_low,
        ci_high,
        confidence: 0.95,
    })
}
