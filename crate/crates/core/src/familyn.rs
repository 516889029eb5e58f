//! Odd numbers of bodies on a geodesic: `mu` at the origin and mirror pairs
//! at radii `p_1 < p_2 < ... < p_k` (`n = 2k + 1`), the innermost pair with
//! unit masses.
//!
//! Three layouts admit a sign certificate of nonexistence:
//!
//! 1. every pair inside the unit circle (equation of the outermost pair);
//! 2. only the innermost pair inside, with `p_k < 1/p_1` (equation of the
//!    innermost pair);
//! 3. only the outermost pair outside, with `p_k < 1/p_{k-1}` (equation of
//!    the pair `p_{k-1}`).

use serde::{Deserialize, Serialize};

use crate::collinear::{MassSlot, MassSolution, RegionVerdict, SolveMethod, SymmetricLayout, ViolationCertificate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddSymmetricPositions {
    layout: SymmetricLayout,
}

impl OddSymmetricPositions {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 {
            return Err(Error::InvalidInput(format!("need at least two mirror pairs (n >= 5), got {}", radii.len())));
        }
        Ok(Self { layout: SymmetricLayout::new(true, radii)? })
    }

    pub fn radii(&self) -> &[f64] {
        self.layout.radii()
    }

    /// Number of bodies.
    pub fn n(&self) -> usize {
        self.layout.bodies()
    }

    pub fn layout(&self) -> &SymmetricLayout {
        &self.layout
    }

    fn unknowns(&self) -> Vec<MassSlot> {
        std::iter::once(MassSlot::Origin).chain((1..self.layout.pairs()).map(MassSlot::Pair)).collect()
    }

    fn unknown_names(&self) -> Vec<String> {
        std::iter::once("mu".to_string()).chain((1..self.layout.pairs()).map(|l| format!("m_pair{}", l + 1))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonexistenceBullet {
    AllInside,
    OnlyInnermostInside,
    OnlyOutermostOutside,
}

impl NonexistenceBullet {
    pub fn name(self) -> &'static str {
        match self {
            NonexistenceBullet::AllInside => "all_inside",
            NonexistenceBullet::OnlyInnermostInside => "only_innermost_inside",
            NonexistenceBullet::OnlyOutermostOutside => "only_outermost_outside",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralVerdict {
    pub n: usize,
    pub radii: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bullet: Option<NonexistenceBullet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ViolationCertificate>,
    pub covered: bool,
}

/// Which bullet applies and the index of the equation it certifies.
pub fn matching_bullet(radii: &[f64]) -> Option<(NonexistenceBullet, usize)> {
    let k = radii.len();
    if k < 2 {
        return None;
    }
    let (first, last) = (radii[0], radii[k - 1]);
    if last < 1.0 {
        return Some((NonexistenceBullet::AllInside, k - 1));
    }
    if first < 1.0 && radii[1] > 1.0 && last < 1.0 / first {
        return Some((NonexistenceBullet::OnlyInnermostInside, 0));
    }
    let second_last = radii[k - 2];
    if second_last < 1.0 && last > 1.0 && last < 1.0 / second_last {
        return Some((NonexistenceBullet::OnlyOutermostOutside, k - 2));
    }
    None
}

/// Check the three nonexistence bullets and, for a match, build the
/// violation certificate of the corresponding equation.
pub fn nonexistence_general(radii: &[f64]) -> Result<GeneralVerdict> {
    let pos = OddSymmetricPositions::new(radii.to_vec())?;
    let mut verdict = GeneralVerdict { n: pos.n(), radii: radii.to_vec(), bullet: None, certificate: None, covered: false };
    if let Some((bullet, equation)) = matching_bullet(radii) {
        let system = pos.layout.linear_system(&[(MassSlot::Pair(0), 1.0)], &pos.unknowns());
        let names = pos.unknown_names();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        verdict.bullet = Some(bullet);
        verdict.certificate = Some(ViolationCertificate::from_system(&pos.layout, &system, &names, equation));
        verdict.covered = true;
    }
    Ok(verdict)
}

/// Exact solve for the origin mass and every pair mass but the innermost.
pub fn solve_reduced_n(radii: &[f64]) -> Result<MassSolution> {
    let pos = OddSymmetricPositions::new(radii.to_vec())?;
    let system = pos.layout.linear_system(&[(MassSlot::Pair(0), 1.0)], &pos.unknowns());
    let x = system.solve()?;
    let mut pair_masses = vec![1.0];
    pair_masses.extend_from_slice(&x[1..]);
    let mut sol = MassSolution::evaluate(&pos.layout, Some(x[0]), &pair_masses, SolveMethod::ExactLinearSolve, (Some(x[0]), None, None))?;
    sol.positive = x.iter().all(|&v| v > 0.0);
    Ok(sol)
}

/// `(p^2+1)^2 [1/((1+pq)^2 (p-q)^2) - 1/((pq-1)^2 (p+q)^2)]`, the bracket
/// multiplying an outer pair's mass in the innermost pair's equation.
pub fn pair_bracket(p: f64, q: f64) -> f64 {
    let w = p * p + 1.0;
    let near = (1.0 + p * q) * (p - q);
    let far = (p * q - 1.0) * (p + q);
    w * w * (1.0 / (near * near) - 1.0 / (far * far))
}

/// Factored form `4 p q (p^2+1)^2 (p^2-1)(q^2-1) / ((1+pq)^2 (pq-1)^2 (p^2-q^2)^2)`,
/// negative whenever `p > 1 > q`.
pub fn pair_bracket_factored(p: f64, q: f64) -> f64 {
    let w = p * p + 1.0;
    let den = (1.0 + p * q).powi(2) * (p * q - 1.0).powi(2) * (p * p - q * q).powi(2);
    4.0 * p * q * w * w * (p * p - 1.0) * (q * q - 1.0) / den
}

pub fn region_verdict(radii: &[f64]) -> Result<RegionVerdict> {
    let verdict = nonexistence_general(radii)?;
    let (exact_solution, exact_error) = match solve_reduced_n(radii) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let certified_positive_solution = exact_solution.as_ref().map_or(false, MassSolution::certified_positive);
    Ok(RegionVerdict {
        family: "n".into(),
        positions: radii.to_vec(),
        case: verdict.bullet.map_or("NotCovered", NonexistenceBullet::name).into(),
        exists: if verdict.covered { Some(false) } else { None },
        mass_constraint: None,
        certificate: verdict.certificate,
        exact_solution,
        exact_error,
        certified_positive_solution,
    })
}
