//! Equations of motion on the stereographic sphere.
//!
//! With kinetic energy `T = 1/2 sum m_i 4|ż_i|^2 / (1+|z_i|^2)^2` and force
//! function `U`, the Euler-Lagrange equations read
//!
//! ```text
//! z̈_i = 2 z̄_i ż_i^2 / (1 + |z_i|^2) + (1 + |z_i|^2)^2 / (2 m_i) dU/dz̄_i
//! ```
//!
//! and `T - U` is conserved. A rigid rotation `z_i(t) = e^{i w t} z_i(0)` is a
//! solution iff `z̈_i = -w^2 z_i` for every body.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{geodesic_distance, geodesic_sin, potential_at, Configuration};

/// Integration aborts when some pair gets this close (in `sin d`) to a
/// collision or an antipodal alignment.
pub const SINGULARITY_APPROACH: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub positions: Vec<Complex64>,
    pub velocities: Vec<Complex64>,
    pub t: f64,
}

impl State {
    pub fn at_rest(positions: Vec<Complex64>) -> Self {
        let velocities = vec![Complex64::new(0.0, 0.0); positions.len()];
        Self { positions, velocities, t: 0.0 }
    }

    fn to_flat(&self, out: &mut Vec<f64>) {
        out.clear();
        for z in self.positions.iter().chain(&self.velocities) {
            out.push(z.re);
            out.push(z.im);
        }
    }

    fn from_flat(y: &[f64], t: f64) -> Self {
        let n = y.len() / 4;
        let cplx = |k: usize| Complex64::new(y[2 * k], y[2 * k + 1]);
        Self {
            positions: (0..n).map(cplx).collect(),
            velocities: (n..2 * n).map(cplx).collect(),
            t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_final: f64,
    /// Number of uniformly spaced output samples, including `t = 0` and `t_final`.
    pub samples: usize,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-12, max_step: 1e-2, t_final: 1.0, samples: 101 }
    }
}

impl IntegrationSettings {
    fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_step > 0.0
            && self.t_final > 0.0
            && self.t_final.is_finite()
            && self.samples >= 2;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("bad integration settings {self:?}")))
        }
    }
}

/// Interaction part of the acceleration, `(1+|z_i|^2)^2/(2 m_i) dU/dz̄_i`.
///
/// The `m_i` of the gradient cancels, so the result is linear in the other
/// bodies' masses and well defined for formal (non-positive) masses.
pub fn interaction_acceleration(masses: &[f64], positions: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = positions.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let zi = positions[i];
        let wi = 1.0 + zi.norm_sqr();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            if j == i {
                continue;
            }
            let zj = positions[j];
            if geodesic_sin(zi, zj) < crate::geometry::SINGULAR_SIN_TOL {
                return Err(Error::SingularPair { i: i.min(j), j: i.max(j) });
            }
            let cross = 1.0 + zi * zj.conj();
            let diff = zj - zi;
            let wj = 1.0 + zj.norm_sqr();
            let denom = 8.0 * (diff.norm() * cross.norm()).powi(3);
            acc += cross * diff * (masses[j] * wj * wj / denom);
        }
        out[i] = acc * wi * wi * wi;
    }
    Ok(out)
}

/// Full acceleration `z̈_i` for the given state.
pub fn acceleration(config: &Configuration, state: &State) -> Result<Vec<Complex64>> {
    accelerations(&config.masses(), &state.positions, &state.velocities)
}

fn accelerations(masses: &[f64], positions: &[Complex64], velocities: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut acc = interaction_acceleration(masses, positions)?;
    for ((a, z), v) in acc.iter_mut().zip(positions).zip(velocities) {
        *a += 2.0 * z.conj() * v * v / (1.0 + z.norm_sqr());
    }
    Ok(acc)
}

/// `T = 1/2 sum m_i 4 |ż_i|^2 / (1 + |z_i|^2)^2`.
pub fn kinetic_energy(config: &Configuration, state: &State) -> f64 {
    kinetic_at(&config.masses(), &state.positions, &state.velocities)
}

fn kinetic_at(masses: &[f64], positions: &[Complex64], velocities: &[Complex64]) -> f64 {
    masses
        .iter()
        .zip(positions)
        .zip(velocities)
        .map(|((m, z), v)| 2.0 * m * v.norm_sqr() / (1.0 + z.norm_sqr()).powi(2))
        .sum()
}

/// Conserved energy `T - U`.
pub fn energy(config: &Configuration, state: &State) -> Result<f64> {
    let masses = config.masses();
    Ok(kinetic_at(&masses, &state.positions, &state.velocities) - potential_at(&masses, &state.positions)?)
}

/// Initial data for a rigid rotation with angular speed `omega`: `ż_i = i omega z_i`.
pub fn rigid_rotation_state(config: &Configuration, omega: f64) -> State {
    let positions = config.positions();
    let velocities = positions.iter().map(|z| Complex64::new(0.0, omega) * z).collect();
    State { positions, velocities, t: 0.0 }
}

/// Smallest pairwise geodesic distance and the pair attaining it.
pub fn min_pairwise_distance(positions: &[Complex64]) -> Option<(f64, usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let d = geodesic_distance(positions[i], positions[j]);
            if best.map_or(true, |(b, _, _)| d < b) {
                best = Some((d, i, j));
            }
        }
    }
    best
}

fn closest_to_singular(positions: &[Complex64]) -> Option<(f64, usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let s = geodesic_sin(positions[i], positions[j]);
            if best.map_or(true, |(b, _, _)| s < b) {
                best = Some((s, i, j));
            }
        }
    }
    best
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Rhs<'a> {
    masses: &'a [f64],
    n: usize,
}

impl Rhs<'_> {
    fn eval(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let n = self.n;
        let cplx = |k: usize| Complex64::new(y[2 * k], y[2 * k + 1]);
        let pos: Vec<Complex64> = (0..n).map(cplx).collect();
        let vel: Vec<Complex64> = (n..2 * n).map(cplx).collect();
        let acc = accelerations(self.masses, &pos, &vel)?;
        for k in 0..n {
            dy[2 * k] = vel[k].re;
            dy[2 * k + 1] = vel[k].im;
            dy[2 * (n + k)] = acc[k].re;
            dy[2 * (n + k) + 1] = acc[k].im;
        }
        Ok(())
    }
}

/// Integrate the equations of motion with an adaptive Dormand-Prince 5(4)
/// scheme, returning `settings.samples` states at uniform times in
/// `[state0.t, state0.t + t_final]`.
///
/// Steps are shortened to land exactly on output times. The run aborts with
/// [`Error::SingularityReached`] once a pair comes within
/// [`SINGULARITY_APPROACH`] of a collision or antipodal alignment.
pub fn integrate(config: &Configuration, state0: &State, settings: &IntegrationSettings) -> Result<Vec<State>> {
    settings.validate()?;
    let n = config.len();
    if state0.positions.len() != n || state0.velocities.len() != n {
        return Err(Error::InvalidInput("state size does not match configuration".into()));
    }
    let masses = config.masses();
    let rhs = Rhs { masses: &masses, n };
    let dim = 4 * n;

    let t0 = state0.t;
    let sample_times: Vec<f64> = (0..settings.samples)
        .map(|k| t0 + settings.t_final * k as f64 / (settings.samples - 1) as f64)
        .collect();

    let mut y = Vec::with_capacity(dim);
    state0.to_flat(&mut y);
    let mut t = t0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    rhs.eval(&y, &mut k[0])?;
    let mut out = vec![State::from_flat(&y, t)];

    let mut h = settings.max_step.min(1e-3 * settings.t_final.max(1.0));
    let mut ytmp = vec![0.0; dim];
    let mut ynew = vec![0.0; dim];

    for &target in &sample_times[1..] {
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow { t });
            }
            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += A[s][j] * kj[i];
                    }
                    ytmp[i] = y[i] + step * acc;
                }
                rhs.eval(&ytmp, &mut k[s])?;
            }
            // the last stage is evaluated at the new solution (first-same-as-last)
            let mut err_sq = 0.0;
            for i in 0..dim {
                let mut acc = 0.0;
                let mut err = 0.0;
                for s in 0..7 {
                    acc += B[s] * k[s][i];
                    err += E[s] * k[s][i];
                }
                ynew[i] = y[i] + step * acc;
                let scale = settings.abs_tol + settings.rel_tol * y[i].abs().max(ynew[i].abs());
                let e = step * err / scale;
                err_sq += e * e;
            }
            let err_norm = (err_sq / dim as f64).sqrt();
            let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };

            if err_norm <= 1.0 {
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut ynew);
                k.swap(0, 6);
                let positions: Vec<Complex64> = (0..n).map(|q| Complex64::new(y[2 * q], y[2 * q + 1])).collect();
                if let Some((s, i, j)) = closest_to_singular(&positions) {
                    if s < SINGULARITY_APPROACH {
                        return Err(Error::SingularityReached { t, i, j });
                    }
                }
                if !last || factor < 1.0 {
                    h = (step * factor).min(settings.max_step);
                }
            } else {
                h = (step * factor).min(settings.max_step);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepSizeUnderflow { t });
                }
            }
        }
        out.push(State::from_flat(&y, t));
    }
    Ok(out)
}

/// Write a trajectory as CSV with columns
/// `t, re_z1, im_z1, ..., re_zn, im_zn, energy, min_pairwise_distance`.
pub fn write_trajectory_csv<W: Write>(mut w: W, config: &Configuration, trajectory: &[State]) -> io::Result<()> {
    let n = config.len();
    let mut header = vec!["t".to_string()];
    for i in 1..=n {
        header.push(format!("re_z{i}"));
        header.push(format!("im_z{i}"));
    }
    header.push("energy".into());
    header.push("min_pairwise_distance".into());
    writeln!(w, "{}", header.join(","))?;
    for s in trajectory {
        let mut row = vec![fmt17(s.t)];
        for z in &s.positions {
            row.push(fmt17(z.re));
            row.push(fmt17(z.im));
        }
        row.push(energy(config, s).map(fmt17).unwrap_or_else(|_| "nan".into()));
        row.push(min_pairwise_distance(&s.positions).map(|(d, _, _)| fmt17(d)).unwrap_or_default());
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Seventeen significant digits, enough to round-trip any binary64 value.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
