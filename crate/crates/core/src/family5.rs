//! Five bodies on a geodesic: `mu` at the origin, unit masses at `±a` and
//! masses `m` at `±r`, with `0 < a < r`.
//!
//! The reduced system has one equation for the `a` pair and one for the `r`
//! pair, linear in `(mu, m)`. Summing them gives the aggregated relation
//! `A = B mu + C m` (both pairs outside the unit circle) or
//! `F1 = F2 mu + F3 m` (pairs straddling it with `ar > 1`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::collinear::{
    LinearSystem, MassConstraint, MassSlot, MassSolution, RegionVerdict, SolveMethod, SymmetricLayout,
    ViolationCertificate,
};
use crate::error::{Error, Result};

/// Positions closer than this to `a = r`, `ar = 1`, `a = 1` or `r = 1` are
/// rejected.
pub const FIVE_GUARD: f64 = 1e-12;

const KNOWN: [(MassSlot, f64); 1] = [(MassSlot::Pair(0), 1.0)];
const UNKNOWNS: [MassSlot; 2] = [MassSlot::Origin, MassSlot::Pair(1)];
const NAMES: [&str; 2] = ["mu", "m"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveBodyPositions {
    pub a: f64,
    pub r: f64,
}

impl FiveBodyPositions {
    pub fn new(a: f64, r: f64) -> Result<Self> {
        if !(a.is_finite() && r.is_finite() && a > 0.0 && r > 0.0) {
            return Err(Error::Inadmissible(format!("positions must be positive and finite (a = {a}, r = {r})")));
        }
        if !(r - a > FIVE_GUARD * r) {
            return Err(Error::Inadmissible(format!("need a < r (a = {a}, r = {r})")));
        }
        if (a * r - 1.0).abs() <= FIVE_GUARD {
            return Err(Error::Inadmissible(format!("ar = 1 is a singular position (a = {a}, r = {r})")));
        }
        for p in [a, r] {
            if (p - 1.0).abs() <= FIVE_GUARD {
                return Err(Error::Inadmissible(format!("a pair at radius {p} is antipodal")));
            }
        }
        Ok(Self { a, r })
    }

    pub fn case(&self) -> FiveBodyCase {
        let (a, r) = (self.a, self.r);
        if r < 1.0 {
            FiveBodyCase::BothInside
        } else if a > 1.0 {
            FiveBodyCase::BothOutside
        } else if a * r < 1.0 {
            FiveBodyCase::StraddleProductBelow
        } else {
            FiveBodyCase::StraddleProductAbove
        }
    }

    pub fn layout(&self, with_origin: bool) -> SymmetricLayout {
        SymmetricLayout::new(with_origin, vec![self.a, self.r]).expect("validated positions")
    }

    /// Reduced system in `(mu, m)`, rows ordered `a` then `r`.
    pub fn linear_system(&self) -> LinearSystem {
        self.layout(true).linear_system(&KNOWN, &UNKNOWNS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FiveBodyCase {
    BothInside,
    BothOutside,
    #[serde(rename = "Straddle_ProductBelow")]
    StraddleProductBelow,
    #[serde(rename = "Straddle_ProductAbove")]
    StraddleProductAbove,
}

impl FiveBodyCase {
    pub const ALL: [FiveBodyCase; 4] = [
        FiveBodyCase::BothInside,
        FiveBodyCase::BothOutside,
        FiveBodyCase::StraddleProductBelow,
        FiveBodyCase::StraddleProductAbove,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FiveBodyCase::BothInside => "BothInside",
            FiveBodyCase::BothOutside => "BothOutside",
            FiveBodyCase::StraddleProductBelow => "Straddle_ProductBelow",
            FiveBodyCase::StraddleProductAbove => "Straddle_ProductAbove",
        }
    }

    /// Whether the case is claimed to admit relative equilibria.
    pub fn existence_claimed(self) -> bool {
        matches!(self, FiveBodyCase::BothOutside | FiveBodyCase::StraddleProductAbove)
    }
}

impl fmt::Display for FiveBodyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify5(a: f64, r: f64) -> Result<FiveBodyCase> {
    Ok(FiveBodyPositions::new(a, r)?.case())
}

fn solvable_case(pos: &FiveBodyPositions) -> Result<FiveBodyCase> {
    let case = pos.case();
    if case.existence_claimed() {
        Ok(case)
    } else {
        Err(Error::WrongCase { expected: "BothOutside or Straddle_ProductAbove".into(), found: case.name().into() })
    }
}

/// Coefficients of the summed reduced equations, evaluated from their
/// closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum AggregatedCoefficients {
    Outside {
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
        #[serde(rename = "C")]
        c: f64,
    },
    Straddle {
        #[serde(rename = "F1")]
        f1: f64,
        #[serde(rename = "F2")]
        f2: f64,
        #[serde(rename = "F3")]
        f3: f64,
    },
}

impl AggregatedCoefficients {
    pub fn constant(&self) -> f64 {
        match *self {
            AggregatedCoefficients::Outside { a, .. } => a,
            AggregatedCoefficients::Straddle { f1, .. } => f1,
        }
    }

    pub fn mu_coefficient(&self) -> f64 {
        match *self {
            AggregatedCoefficients::Outside { b, .. } => b,
            AggregatedCoefficients::Straddle { f2, .. } => f2,
        }
    }

    pub fn m_coefficient(&self) -> f64 {
        match *self {
            AggregatedCoefficients::Outside { c, .. } => c,
            AggregatedCoefficients::Straddle { f3, .. } => f3,
        }
    }

    /// `m = (A - B mu) / C`.
    pub fn mass_for(&self, mu: f64) -> f64 {
        (self.constant() - self.mu_coefficient() * mu) / self.m_coefficient()
    }

    /// `A - B mu - C m`.
    pub fn residual(&self, mu: f64, m: f64) -> f64 {
        self.constant() - self.mu_coefficient() * mu - self.m_coefficient() * m
    }

    /// The mass relation with its admissible range of `mu`.
    pub fn constraint(&self) -> MassConstraint {
        let (k, b) = (self.constant(), self.mu_coefficient());
        MassConstraint {
            constant: k,
            mu_coefficient: b,
            m_coefficient: self.m_coefficient(),
            mu_lower_bound: if k >= 0.0 { 0.0 } else { k / b },
        }
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

fn outside_coefficients(a: f64, r: f64) -> (f64, f64, f64) {
    let (wa, wr) = (a * a + 1.0, r * r + 1.0);
    let near = 1.0 / sq((a * r + 1.0) * (a - r));
    let far = 1.0 / sq((r + a) * (a * r - 1.0));
    let big_a = (a * a - 1.0) * a / wa.powi(4)
        + (r * r - 1.0) * r / wr.powi(4)
        + 0.5 * wa * wa * (-0.25 / (a * a * sq(a * a - 1.0)) + near - far);
    let big_b = -0.5 * (1.0 / (a * a) + 1.0 / (r * r));
    let big_c = 0.5 * wr * wr * (near + far + 0.25 / (r * r * sq(r * r - 1.0)));
    (big_a, big_b, big_c)
}

fn straddle_coefficients(a: f64, r: f64) -> (f64, f64, f64) {
    let (wa, wr) = (a * a + 1.0, r * r + 1.0);
    let near = 1.0 / sq((a * r + 1.0) * (a - r));
    let far = 1.0 / sq((r + a) * (a * r - 1.0));
    let f1 = -(1.0 - a * a) * a / wa.powi(4) + wa * wa / (8.0 * a * a * sq(1.0 - a * a)) + (r * r - 1.0) * r / wr.powi(4)
        - 2.0 * a * r * wa * wa * (r * r - 1.0) * (1.0 - a * a) / (sq(a * a * r * r - 1.0) * sq(a * a - r * r));
    let f2 = -0.5 * (1.0 / (a * a) + 1.0 / (r * r));
    let f3 = 0.5 * wr * wr * (near + far) + wr * wr / (8.0 * r * r * sq(r * r - 1.0));
    (f1, f2, f3)
}

/// Closed-form aggregated coefficients. The `mu` coefficient is always
/// negative and the `m` coefficient positive; a violation raises
/// [`Error::SignAssertionFailed`].
pub fn aggregated_coefficients(a: f64, r: f64) -> Result<AggregatedCoefficients> {
    let pos = FiveBodyPositions::new(a, r)?;
    let coeffs = match solvable_case(&pos)? {
        FiveBodyCase::BothOutside => {
            let (a, b, c) = outside_coefficients(pos.a, pos.r);
            AggregatedCoefficients::Outside { a, b, c }
        }
        _ => {
            let (f1, f2, f3) = straddle_coefficients(pos.a, pos.r);
            AggregatedCoefficients::Straddle { f1, f2, f3 }
        }
    };
    let mut bad = Vec::new();
    if !(coeffs.mu_coefficient() < 0.0) {
        bad.push(format!("mu coefficient = {} (expected < 0)", coeffs.mu_coefficient()));
    }
    if !(coeffs.m_coefficient() > 0.0) {
        bad.push(format!("m coefficient = {} (expected > 0)", coeffs.m_coefficient()));
    }
    if bad.is_empty() {
        Ok(coeffs)
    } else {
        Err(Error::SignAssertionFailed(bad))
    }
}

/// Member of the one-parameter family solving the aggregated relation,
/// `m = (A - B mu) / C`. Residuals against both reduced equations are
/// reported; in general they do not vanish.
pub fn solve_masses_aggregated(a: f64, r: f64, mu: f64) -> Result<MassSolution> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidInput(format!("mu must be positive and finite, got {mu}")));
    }
    let coeffs = aggregated_coefficients(a, r)?;
    let m = coeffs.mass_for(mu);
    if !(m > 0.0) {
        let threshold = coeffs.constant() / coeffs.mu_coefficient();
        return Err(Error::MassNonpositive { mu, m, threshold });
    }
    let pos = FiveBodyPositions::new(a, r)?;
    let mut sol = MassSolution::evaluate(
        &pos.layout(true),
        Some(mu),
        &[1.0, m],
        SolveMethod::AggregatedFamily,
        (Some(mu), None, Some(m)),
    )?;
    sol.aggregated_residual = Some(coeffs.residual(mu, m));
    Ok(sol)
}

/// Unique solution of the two reduced equations in `(mu, m)`.
pub fn solve_masses_exact(a: f64, r: f64) -> Result<MassSolution> {
    let pos = FiveBodyPositions::new(a, r)?;
    solvable_case(&pos)?;
    let mut sol = solve_reduced(&pos)?;
    let coeffs = aggregated_coefficients(a, r)?;
    sol.aggregated_residual = Some(coeffs.residual(sol.mu.unwrap_or(0.0), sol.m.unwrap_or(0.0)));
    Ok(sol)
}

/// Exact solve of the reduced system regardless of case.
pub fn solve_reduced(pos: &FiveBodyPositions) -> Result<MassSolution> {
    let x = pos.linear_system().solve()?;
    MassSolution::evaluate(&pos.layout(true), Some(x[0]), &[1.0, x[1]], SolveMethod::ExactLinearSolve, (Some(x[0]), None, Some(x[1])))
}

/// Sign certificate that no positive masses exist: the `r` equation when
/// both pairs are inside the unit circle, the `a` equation when they
/// straddle it with `ar < 1`.
pub fn nonexistence_witness5(a: f64, r: f64) -> Result<ViolationCertificate> {
    let pos = FiveBodyPositions::new(a, r)?;
    let equation = match pos.case() {
        FiveBodyCase::BothInside => 1,
        FiveBodyCase::StraddleProductBelow => 0,
        other => {
            return Err(Error::WrongCase {
                expected: "BothInside or Straddle_ProductBelow".into(),
                found: other.name().into(),
            })
        }
    };
    Ok(ViolationCertificate::from_system(&pos.layout(true), &pos.linear_system(), &NAMES, equation))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum CorollaryVerdict {
    Nonexistence { case: String, certificate: ViolationCertificate },
    NotCovered { case: String },
}

/// Four bodies: unit masses at `±a`, masses `m` at `±r`, no central body.
pub fn corollary_4body(a: f64, r: f64) -> Result<CorollaryVerdict> {
    let pos = FiveBodyPositions::new(a, r)?;
    let case = pos.case();
    let equation = match case {
        FiveBodyCase::BothInside => 1,
        FiveBodyCase::StraddleProductBelow => 0,
        _ => return Ok(CorollaryVerdict::NotCovered { case: case.name().into() }),
    };
    let layout = pos.layout(false);
    let system = layout.linear_system(&KNOWN, &[MassSlot::Pair(1)]);
    let certificate = ViolationCertificate::from_system(&layout, &system, &["m"], equation);
    Ok(CorollaryVerdict::Nonexistence { case: case.name().into(), certificate })
}

/// Classification with the applicable mass relation or certificate and the
/// exact solve of the reduced system.
pub fn region_verdict(a: f64, r: f64) -> Result<RegionVerdict> {
    let pos = FiveBodyPositions::new(a, r)?;
    let case = pos.case();
    let mass_constraint = if case.existence_claimed() { Some(aggregated_coefficients(a, r)?.constraint()) } else { None };
    let certificate = if case.existence_claimed() { None } else { Some(nonexistence_witness5(a, r)?) };
    let (exact_solution, exact_error) = match solve_reduced(&pos) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let certified_positive_solution = exact_solution.as_ref().map_or(false, MassSolution::certified_positive);
    Ok(RegionVerdict {
        family: "five".into(),
        positions: vec![a, r],
        case: case.name().into(),
        exists: Some(case.existence_claimed()),
        mass_constraint,
        certificate,
        exact_solution,
        exact_error,
        certified_positive_solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn classification_examples() {
        assert_eq!(classify5(0.5, 0.8).unwrap(), FiveBodyCase::BothInside);
        assert_eq!(classify5(0.5, 1.5).unwrap(), FiveBodyCase::StraddleProductBelow);
        assert_eq!(classify5(2.0, 3.0).unwrap(), FiveBodyCase::BothOutside);
        assert_eq!(classify5(0.5, 3.0).unwrap(), FiveBodyCase::StraddleProductAbove);
        for (a, r) in [(0.5, 2.0), (1.0, 2.0), (0.5, 1.0), (2.0, 2.0), (3.0, 2.0), (0.0, 1.0)] {
            assert!(matches!(classify5(a, r), Err(Error::Inadmissible(_))), "({a}, {r})");
        }
    }

    #[test]
    fn aggregated_examples() {
        let c = aggregated_coefficients(2.0, 3.0).unwrap();
        assert_relative_eq!(c.mu_coefficient(), -13.0 / 72.0, max_relative = 1e-15);
        let expected_c = 50.0 * (1.0 / 49.0 + 1.0 / 625.0 + 1.0 / 2304.0);
        assert_relative_eq!(c.m_coefficient(), expected_c, max_relative = 1e-14);
        let f = aggregated_coefficients(0.5, 3.0).unwrap();
        assert_relative_eq!(f.mu_coefficient(), -37.0 / 18.0, max_relative = 1e-15);
        assert!(matches!(aggregated_coefficients(0.5, 0.8), Err(Error::WrongCase { .. })));
    }

    #[test]
    fn aggregated_equals_sum_of_reduced_rows() {
        for (a, r) in [(2.0, 3.0), (1.2, 4.5), (0.5, 3.0), (0.9, 1.3)] {
            let pos = FiveBodyPositions::new(a, r).unwrap();
            let sys = pos.linear_system();
            let c = aggregated_coefficients(a, r).unwrap();
            assert_relative_eq!(c.constant(), sys.rhs[0] + sys.rhs[1], epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(c.mu_coefficient(), sys.matrix[0][0] + sys.matrix[1][0], max_relative = 1e-12);
            assert_relative_eq!(c.m_coefficient(), sys.matrix[0][1] + sys.matrix[1][1], max_relative = 1e-12);
        }
    }

    #[test]
    fn aggregated_family_satisfies_sum_only() {
        let sol = solve_masses_aggregated(2.0, 3.0, 1.0).unwrap_or_else(|e| panic!("{e}"));
        assert!(sol.aggregated_residual.unwrap().abs() < 1e-12);
        assert_eq!(sol.method, SolveMethod::AggregatedFamily);
    }

    #[test]
    fn aggregated_family_refuses_small_mu() {
        let c = aggregated_coefficients(2.0, 3.0).unwrap();
        if c.constant() < 0.0 {
            let t = c.constant() / c.mu_coefficient();
            assert!(matches!(solve_masses_aggregated(2.0, 3.0, 0.5 * t), Err(Error::MassNonpositive { .. })));
        }
        assert!(matches!(solve_masses_aggregated(2.0, 3.0, -1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn exact_solution_back_substitutes() {
        let sol = solve_masses_exact(2.0, 3.0).unwrap();
        assert!(sol.residual_max < 1e-10);
        assert!(sol.full_residual_max < 1e-10);
        assert!(sol.aggregated_residual.unwrap().abs() < 1e-12);
        assert!(matches!(solve_masses_exact(0.5, 0.8), Err(Error::WrongCase { .. })));
    }

    #[test]
    fn witnesses() {
        let w = nonexistence_witness5(0.5, 0.8).unwrap();
        assert!(w.valid && w.equation == 1);
        assert_relative_eq!(w.lhs, crate::lemmas::lemma2_expression(0.5, 0.8), max_relative = 1e-12);
        let w = nonexistence_witness5(0.5, 1.5).unwrap();
        assert!(w.valid && w.equation == 0);
        assert_relative_eq!(w.lhs, crate::lemmas::lemma5_expression(0.5), max_relative = 1e-12);
        assert!(nonexistence_witness5(2.0, 3.0).is_err());
    }

    #[test]
    fn four_body_corollary() {
        assert!(matches!(corollary_4body(0.3, 0.6).unwrap(), CorollaryVerdict::Nonexistence { certificate, .. } if certificate.valid));
        assert!(matches!(corollary_4body(0.5, 1.5).unwrap(), CorollaryVerdict::Nonexistence { certificate, .. } if certificate.valid));
        assert!(matches!(corollary_4body(2.0, 3.0).unwrap(), CorollaryVerdict::NotCovered { .. }));
    }
}
