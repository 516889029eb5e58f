//! Collinear symmetric layouts: bodies in mirror pairs `±p_k` on the real
//! axis, optionally with one body at the origin.
//!
//! For such layouts the condition system reduces to one real equation per
//! pair, linear in the masses:
//!
//! ```text
//! (p_k^2 - 1) p_k / (1 + p_k^2)^4 = sum_j m_j K(p_k, x_j)
//! ```
//!
//! Moving the known masses to the left gives `A_k = sum_u coef_{k,u} x_u`
//! over the unknown masses `x_u`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditions::{collinear_constant, collinear_kernel, collinear_reduce, condition_residual_at};
use crate::error::{Error, Result};
use crate::geometry::{Body, Configuration};
use crate::numeric::{solve_dense, NeumaierSum};

/// A reduced residual certifies a solution when it is below this multiple of
/// `max(1, max |mass|)`.
pub const CERTIFY_TOL: f64 = 1e-10;

/// Smallest allowed gap for radii, `|p - 1|` and `|p_i p_j - 1|`.
pub const LAYOUT_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricLayout {
    origin: bool,
    radii: Vec<f64>,
}

/// Where an unknown (or known) mass sits in a layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MassSlot {
    Origin,
    Pair(usize),
}

impl SymmetricLayout {
    pub fn new(origin: bool, radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidInput("at least one mirror pair is required".into()));
        }
        if let Some(p) = radii.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::Inadmissible(format!("radius {p} is not a positive finite number")));
        }
        for w in radii.windows(2) {
            if !(w[1] - w[0] > LAYOUT_GUARD * w[1]) {
                return Err(Error::Inadmissible(format!("radii must be strictly increasing ({} then {})", w[0], w[1])));
            }
        }
        for (i, &p) in radii.iter().enumerate() {
            if (p - 1.0).abs() <= LAYOUT_GUARD {
                return Err(Error::Inadmissible(format!("radius {p} puts a mirror pair at antipodal points")));
            }
            for &q in &radii[i + 1..] {
                if (p * q - 1.0).abs() <= LAYOUT_GUARD {
                    return Err(Error::Inadmissible(format!("radii {p} and {q} have product 1 (antipodal)")));
                }
            }
        }
        Ok(Self { origin, radii })
    }

    pub fn has_origin(&self) -> bool {
        self.origin
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn pairs(&self) -> usize {
        self.radii.len()
    }

    /// Total number of bodies.
    pub fn bodies(&self) -> usize {
        2 * self.radii.len() + usize::from(self.origin)
    }

    /// Build the configuration. Masses are formal: any finite value is
    /// accepted so that unphysical solutions can be back-substituted.
    pub fn configuration(&self, origin_mass: Option<f64>, pair_masses: &[f64]) -> Result<Configuration> {
        if pair_masses.len() != self.radii.len() {
            return Err(Error::InvalidInput("one mass per mirror pair is required".into()));
        }
        let mut bodies = Vec::with_capacity(self.bodies());
        if self.origin {
            let mu = origin_mass.ok_or_else(|| Error::InvalidInput("origin body needs a mass".into()))?;
            bodies.push(Body::formal(mu, Complex64::new(0.0, 0.0))?);
        }
        for (&p, &m) in self.radii.iter().zip(pair_masses) {
            bodies.push(Body::formal(m, Complex64::new(p, 0.0))?);
            bodies.push(Body::formal(m, Complex64::new(-p, 0.0))?);
        }
        Configuration::new(bodies)
    }

    /// `(p_k^2 - 1) p_k / (1 + p_k^2)^4`.
    pub fn constant(&self, k: usize) -> f64 {
        collinear_constant(self.radii[k])
    }

    /// Coefficient of a mass slot in equation `k`.
    pub fn coefficient(&self, k: usize, slot: MassSlot) -> f64 {
        let p = self.radii[k];
        match slot {
            MassSlot::Origin => collinear_kernel(p, 0.0),
            MassSlot::Pair(l) => {
                let q = self.radii[l];
                let mirror = collinear_kernel(p, -q);
                if l == k {
                    mirror
                } else {
                    collinear_kernel(p, q) + mirror
                }
            }
        }
    }

    /// Linear system in `unknowns` after moving the `known` masses to the left.
    pub fn linear_system(&self, known: &[(MassSlot, f64)], unknowns: &[MassSlot]) -> LinearSystem {
        let rhs = (0..self.pairs())
            .map(|k| {
                let mut s: NeumaierSum = [self.constant(k)].into_iter().collect();
                for &(slot, mass) in known {
                    s.add(-mass * self.coefficient(k, slot));
                }
                s.total()
            })
            .collect();
        let matrix = (0..self.pairs())
            .map(|k| unknowns.iter().map(|&u| self.coefficient(k, u)).collect())
            .collect();
        LinearSystem { unknowns: unknowns.to_vec(), rhs, matrix }
    }
}

/// `rhs[k] = sum_u matrix[k][u] * x[u]`, one row per mirror pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub unknowns: Vec<MassSlot>,
    pub rhs: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
}

impl LinearSystem {
    /// Exact solve; the system must be square.
    pub fn solve(&self) -> Result<Vec<f64>> {
        solve_dense(&self.matrix, &self.rhs)
    }

    /// `rhs - matrix * x` per equation.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, &b)| {
                let mut s: NeumaierSum = [b].into_iter().collect();
                for (a, xi) in row.iter().zip(x) {
                    s.add(-a * xi);
                }
                s.total()
            })
            .collect()
    }

    /// Sign-definite violation of equation `k`, if any: a positive left side
    /// against coefficients that are all negative (or the mirror image).
    pub fn violation(&self, k: usize) -> Option<f64> {
        let lhs = self.rhs[k];
        let row = &self.matrix[k];
        if lhs > 0.0 && row.iter().all(|&c| c < 0.0) {
            Some(lhs)
        } else if lhs < 0.0 && row.iter().all(|&c| c > 0.0) {
            Some(-lhs)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCoefficient {
    pub mass: String,
    pub value: f64,
}

/// Proof that equation `equation` has no solution with positive unknown
/// masses: its known side is positive while every unknown enters with a
/// negative coefficient, so the right side is below `rhs_supremum = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationCertificate {
    /// Index of the mirror pair (by increasing radius) whose equation fails.
    pub equation: usize,
    pub radius: f64,
    pub lhs: f64,
    pub coefficients: Vec<NamedCoefficient>,
    pub max_coefficient: f64,
    pub rhs_supremum: f64,
    pub valid: bool,
}

impl ViolationCertificate {
    pub fn from_system(layout: &SymmetricLayout, system: &LinearSystem, names: &[&str], equation: usize) -> Self {
        let row = &system.matrix[equation];
        let coefficients = names
            .iter()
            .zip(row)
            .map(|(n, &value)| NamedCoefficient { mass: (*n).to_string(), value })
            .collect();
        let max_coefficient = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lhs = system.rhs[equation];
        Self {
            equation,
            radius: layout.radii()[equation],
            lhs,
            coefficients,
            max_coefficient,
            rhs_supremum: 0.0,
            valid: lhs > 0.0 && max_coefficient < 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    ExactLinearSolve,
    AggregatedFamily,
}

/// Masses of a collinear symmetric relative equilibrium candidate.
///
/// `residuals` are the reduced (real, per mirror pair) equations evaluated
/// at these masses; `full_residual_max` is the largest modulus of the
/// complex condition system over all bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassSolution {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    pub method: SolveMethod,
    pub residuals: Vec<f64>,
    pub residual_max: f64,
    pub full_residual_max: f64,
    pub positive: bool,
    pub certified: bool,
    /// Residual of the summed (aggregated) equation, where one applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregated_residual: Option<f64>,
}

impl MassSolution {
    /// Back-substitute masses into the layout and record residuals.
    ///
    /// `pair_masses` lists every pair mass including the known ones.
    pub fn evaluate(
        layout: &SymmetricLayout,
        origin_mass: Option<f64>,
        pair_masses: &[f64],
        method: SolveMethod,
        labels: (Option<f64>, Option<f64>, Option<f64>),
    ) -> Result<Self> {
        let config = layout.configuration(origin_mass, pair_masses)?;
        let residuals = collinear_reduce(&config)?;
        let residual_max = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
        let full = condition_residual_at(&config.masses(), &config.positions())?;
        let (mu, big_m, m) = labels;
        let unknowns: Vec<f64> = [mu, big_m, m].into_iter().flatten().collect();
        let positive = unknowns.iter().all(|&x| x > 0.0);
        let scale = config.masses().iter().map(|x| x.abs()).fold(1.0, f64::max);
        Ok(Self {
            mu,
            big_m,
            m,
            method,
            residuals,
            residual_max,
            full_residual_max: full.max_abs,
            positive,
            certified: residual_max <= CERTIFY_TOL * scale,
            aggregated_residual: None,
        })
    }

    pub fn certified_positive(&self) -> bool {
        self.positive && self.certified
    }
}

/// Linear mass relation `constant = mu_coefficient * mu + m_coefficient * m`
/// obtained by summing the reduced equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassConstraint {
    pub constant: f64,
    pub mu_coefficient: f64,
    pub m_coefficient: f64,
    /// Smallest `mu` giving `m > 0` (0 when every positive `mu` works).
    pub mu_lower_bound: f64,
}

/// Classification of a position tuple.
///
/// `exists` is the existence claim attached to the case. The exact solve of
/// the reduced equations is reported separately so the two can be compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub family: String,
    pub positions: Vec<f64>,
    pub case: String,
    /// `None` when no claim covers the case.
    pub exists: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_constraint: Option<MassConstraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ViolationCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_solution: Option<MassSolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_error: Option<String>,
    pub certified_positive_solution: bool,
}
