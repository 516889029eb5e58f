//! Seven bodies on a geodesic: `mu` at the origin, unit masses at `±x`,
//! masses `M` at `±y` and `m` at `±z`, with `0 < x < y < z`.
//!
//! The reduced system reads `A_i = a_i mu + b_i M + c_i m` for the `x`, `y`
//! and `z` pairs (`i = 1, 2, 3`). The six-body variant drops the central
//! body (`mu = 0`).

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collinear::{LinearSystem, MassSlot, MassSolution, RegionVerdict, SolveMethod, SymmetricLayout, ViolationCertificate};
use crate::error::{Error, Result};

/// Positions within this distance of a regime boundary (`p = 1`, or a
/// product of two radii equal to 1) are rejected.
pub const SEVEN_GUARD: f64 = 1e-6;

/// Relative gap required between consecutive radii.
pub const COLLISION_GUARD: f64 = 1e-12;

/// Default number of points in an existence scan.
pub const DEFAULT_SCAN_POINTS: usize = 1000;

const KNOWN: [(MassSlot, f64); 1] = [(MassSlot::Pair(0), 1.0)];
const UNKNOWNS: [MassSlot; 3] = [MassSlot::Origin, MassSlot::Pair(1), MassSlot::Pair(2)];
const NAMES: [&str; 3] = ["mu", "M", "m"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SevenBodyPositions {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SevenBodyPositions {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if ![x, y, z].iter().all(|p| p.is_finite() && *p > 0.0) {
            return Err(Error::Inadmissible(format!("positions must be positive and finite ({x}, {y}, {z})")));
        }
        if !(y - x > COLLISION_GUARD * y && z - y > COLLISION_GUARD * z) {
            return Err(Error::Inadmissible(format!("need x < y < z ({x}, {y}, {z})")));
        }
        for p in [x, y, z] {
            if (p - 1.0).abs() <= SEVEN_GUARD {
                return Err(Error::Inadmissible(format!("radius {p} is within {SEVEN_GUARD} of the unit circle")));
            }
        }
        for (p, q) in [(x, y), (x, z), (y, z)] {
            if (p * q - 1.0).abs() <= SEVEN_GUARD {
                return Err(Error::Inadmissible(format!("product {p} * {q} is within {SEVEN_GUARD} of 1")));
            }
        }
        Ok(Self { x, y, z })
    }

    pub fn case(&self) -> SevenBodyCase {
        let (x, y, z) = (self.x, self.y, self.z);
        if z < 1.0 {
            SevenBodyCase::AllInside
        } else if x > 1.0 {
            SevenBodyCase::AllOutside
        } else if y > 1.0 {
            if z < 1.0 / x {
                SevenBodyCase::InnerPairInsideProductBelow
            } else if y < 1.0 / x {
                SevenBodyCase::InnerPairInsideMid
            } else {
                SevenBodyCase::InnerPairInsideProductAbove
            }
        } else if z < 1.0 / y {
            SevenBodyCase::TwoPairsInsideBelow
        } else if z < 1.0 / x {
            SevenBodyCase::TwoPairsInsideMid
        } else {
            SevenBodyCase::TwoPairsInsideAbove
        }
    }

    pub fn radii(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn layout(&self, with_origin: bool) -> SymmetricLayout {
        SymmetricLayout::new(with_origin, self.radii().to_vec()).expect("validated positions")
    }

    /// Reduced system in `(mu, M, m)`, rows ordered `x`, `y`, `z`.
    pub fn linear_system(&self) -> LinearSystem {
        self.layout(true).linear_system(&KNOWN, &UNKNOWNS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SevenBodyCase {
    AllInside,
    AllOutside,
    #[serde(rename = "InnerPairInside_ProductBelow")]
    InnerPairInsideProductBelow,
    #[serde(rename = "InnerPairInside_Mid")]
    InnerPairInsideMid,
    #[serde(rename = "InnerPairInside_ProductAbove")]
    InnerPairInsideProductAbove,
    #[serde(rename = "TwoPairsInside_Below")]
    TwoPairsInsideBelow,
    #[serde(rename = "TwoPairsInside_Mid")]
    TwoPairsInsideMid,
    #[serde(rename = "TwoPairsInside_Above")]
    TwoPairsInsideAbove,
}

impl SevenBodyCase {
    pub const ALL: [SevenBodyCase; 8] = [
        SevenBodyCase::AllInside,
        SevenBodyCase::AllOutside,
        SevenBodyCase::InnerPairInsideProductBelow,
        SevenBodyCase::InnerPairInsideMid,
        SevenBodyCase::InnerPairInsideProductAbove,
        SevenBodyCase::TwoPairsInsideBelow,
        SevenBodyCase::TwoPairsInsideMid,
        SevenBodyCase::TwoPairsInsideAbove,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SevenBodyCase::AllInside => "AllInside",
            SevenBodyCase::AllOutside => "AllOutside",
            SevenBodyCase::InnerPairInsideProductBelow => "InnerPairInside_ProductBelow",
            SevenBodyCase::InnerPairInsideMid => "InnerPairInside_Mid",
            SevenBodyCase::InnerPairInsideProductAbove => "InnerPairInside_ProductAbove",
            SevenBodyCase::TwoPairsInsideBelow => "TwoPairsInside_Below",
            SevenBodyCase::TwoPairsInsideMid => "TwoPairsInside_Mid",
            SevenBodyCase::TwoPairsInsideAbove => "TwoPairsInside_Above",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(name))
    }

    pub fn existence_claimed(self) -> bool {
        !matches!(
            self,
            SevenBodyCase::AllInside | SevenBodyCase::InnerPairInsideProductBelow | SevenBodyCase::TwoPairsInsideBelow
        )
    }

    /// Coefficients claimed negative and positive in this case.
    pub fn sign_pattern(self) -> Option<(&'static [&'static str], &'static [&'static str])> {
        match self {
            SevenBodyCase::AllOutside => Some((&["A1", "a1", "a2", "a3"], &["b1", "b2", "b3", "c1", "c2", "c3"])),
            SevenBodyCase::InnerPairInsideMid => {
                Some((&["a1", "a2", "a3", "b1", "b3"], &["A1", "A2", "b2", "c1", "c2", "c3"]))
            }
            SevenBodyCase::InnerPairInsideProductAbove => {
                Some((&["a1", "a2", "a3", "b3"], &["A1", "b1", "b2", "c1", "c2", "c3"]))
            }
            SevenBodyCase::TwoPairsInsideMid => {
                Some((&["a1", "a2", "a3", "b2", "c1"], &["A1", "A2", "A3", "b1", "c2", "c3"]))
            }
            SevenBodyCase::TwoPairsInsideAbove => {
                Some((&["a1", "a2", "a3", "b2"], &["A1", "A2", "b1", "b3", "c1", "c2", "c3"]))
            }
            _ => None,
        }
    }

    /// Equation (0-based) violated in a nonexistence case.
    fn witness_equation(self) -> Option<usize> {
        match self {
            SevenBodyCase::AllInside => Some(2),
            SevenBodyCase::InnerPairInsideProductBelow => Some(0),
            SevenBodyCase::TwoPairsInsideBelow => Some(1),
            _ => None,
        }
    }

    /// How existence is argued: which mass is eliminated with which equation
    /// before the remaining two equations are added.
    fn elimination(self) -> Option<(Unknown, usize)> {
        match self {
            SevenBodyCase::AllOutside => Some((Unknown::Mu, 0)),
            SevenBodyCase::InnerPairInsideMid => Some((Unknown::SmallM, 0)),
            SevenBodyCase::InnerPairInsideProductAbove => Some((Unknown::Mu, 1)),
            SevenBodyCase::TwoPairsInsideMid | SevenBodyCase::TwoPairsInsideAbove => Some((Unknown::SmallM, 1)),
            _ => None,
        }
    }

    /// The free coordinate scanned by the existence argument.
    pub fn scanned_coordinate(self) -> Option<char> {
        match self {
            SevenBodyCase::AllOutside | SevenBodyCase::InnerPairInsideMid | SevenBodyCase::InnerPairInsideProductAbove => {
                Some('y')
            }
            SevenBodyCase::TwoPairsInsideMid | SevenBodyCase::TwoPairsInsideAbove => Some('z'),
            _ => None,
        }
    }
}

impl fmt::Display for SevenBodyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify7(x: f64, y: f64, z: f64) -> Result<SevenBodyCase> {
    Ok(SevenBodyPositions::new(x, y, z)?.case())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unknown {
    #[serde(rename = "mu")]
    Mu,
    #[serde(rename = "M")]
    BigM,
    #[serde(rename = "m")]
    SmallM,
}

impl Unknown {
    fn column(self) -> usize {
        match self {
            Unknown::Mu => 0,
            Unknown::BigM => 1,
            Unknown::SmallM => 2,
        }
    }
}

/// `A_i = a_i mu + b_i M + c_i m`, `i = 1, 2, 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSystem {
    pub case: SevenBodyCase,
    #[serde(rename = "A")]
    pub big_a: [f64; 3],
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
    /// Claimed signs that do not hold at these positions.
    pub sign_violations: Vec<String>,
}

impl CoefficientSystem {
    fn from_positions(pos: &SevenBodyPositions) -> Self {
        let sys = pos.linear_system();
        let col = |j: usize| [sys.matrix[0][j], sys.matrix[1][j], sys.matrix[2][j]];
        let mut out = Self {
            case: pos.case(),
            big_a: [sys.rhs[0], sys.rhs[1], sys.rhs[2]],
            a: col(0),
            b: col(1),
            c: col(2),
            sign_violations: Vec::new(),
        };
        if let Some((neg, posv)) = out.case.sign_pattern() {
            for name in neg {
                let v = out.value(name).expect("known name");
                if !(v < 0.0) {
                    out.sign_violations.push(format!("{name} = {v:e} (expected < 0)"));
                }
            }
            for name in posv {
                let v = out.value(name).expect("known name");
                if !(v > 0.0) {
                    out.sign_violations.push(format!("{name} = {v:e} (expected > 0)"));
                }
            }
        }
        out
    }

    /// Coefficient by name, e.g. `"A1"` or `"c3"`.
    pub fn value(&self, name: &str) -> Option<f64> {
        let mut chars = name.chars();
        let kind = chars.next()?;
        let idx: usize = chars.as_str().parse().ok()?;
        if !(1..=3).contains(&idx) {
            return None;
        }
        let arr = match kind {
            'A' => &self.big_a,
            'a' => &self.a,
            'b' => &self.b,
            'c' => &self.c,
            _ => return None,
        };
        Some(arr[idx - 1])
    }

    /// Fail with [`Error::SignAssertionFailed`] if any claimed sign is violated.
    pub fn strict(self) -> Result<Self> {
        if self.sign_violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::SignAssertionFailed(self.sign_violations))
        }
    }

    fn row(&self, i: usize) -> [f64; 3] {
        [self.a[i], self.b[i], self.c[i]]
    }

    /// Eliminate `unknown` with equation `pivot` and add the two resulting
    /// equations.
    pub fn elimination_sum(&self, unknown: Unknown, pivot: usize, with_mu: bool) -> EliminationSum {
        let j = unknown.column();
        let p = self.row(pivot);
        let mut constant = 0.0;
        let mut coef = [0.0; 3];
        for i in (0..3).filter(|&i| i != pivot) {
            let r = self.row(i);
            constant += r[j] * self.big_a[pivot] - p[j] * self.big_a[i];
            for k in 0..3 {
                coef[k] += p[j] * r[k] - r[j] * p[k];
            }
        }
        coef[j] = 0.0;
        if !with_mu {
            coef[0] = 0.0;
        }
        EliminationSum { eliminated: unknown, pivot: pivot + 1, constant, mu: coef[0], big_m: coef[1], m: coef[2] }
    }
}

/// `constant + mu_coef mu + M_coef M + m_coef m = 0`, the sum of two
/// equations after eliminating one mass with the `pivot` equation (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliminationSum {
    pub eliminated: Unknown,
    pub pivot: usize,
    pub constant: f64,
    pub mu: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub m: f64,
}

impl EliminationSum {
    pub fn residual(&self, mu: f64, big_m: f64, m: f64) -> f64 {
        self.constant + self.mu * mu + self.big_m * big_m + self.m * m
    }
}

/// A sign the existence argument relies on, evaluated at a position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCondition {
    pub quantity: String,
    pub expected: String,
    pub value: f64,
    pub holds: bool,
}

fn condition(quantity: &str, value: f64, positive: bool) -> SignCondition {
    SignCondition {
        quantity: quantity.into(),
        expected: if positive { "> 0" } else { "< 0" }.into(),
        value,
        holds: if positive { value > 0.0 } else { value < 0.0 },
    }
}

/// The inequalities on the elimination sum under which the existence
/// argument for `case` concludes.
pub fn argument_conditions(case: SevenBodyCase, sum: &EliminationSum) -> Vec<SignCondition> {
    match case {
        SevenBodyCase::AllOutside => vec![condition("M coefficient", sum.big_m, false), condition("m coefficient", sum.m, false)],
        SevenBodyCase::InnerPairInsideMid | SevenBodyCase::TwoPairsInsideMid => {
            vec![condition("constant", sum.constant, false), condition("M coefficient", sum.big_m, true)]
        }
        SevenBodyCase::InnerPairInsideProductAbove => {
            vec![condition("constant", sum.constant, true), condition("M coefficient", sum.big_m, false)]
        }
        SevenBodyCase::TwoPairsInsideAbove => {
            vec![condition("M coefficient", sum.big_m, true), condition("mu coefficient", sum.mu, false)]
        }
        _ => Vec::new(),
    }
}

fn existence_case(pos: &SevenBodyPositions) -> Result<SevenBodyCase> {
    let case = pos.case();
    if case.existence_claimed() {
        Ok(case)
    } else {
        Err(Error::WrongCase { expected: "a case with claimed existence".into(), found: case.name().into() })
    }
}

/// Coefficient system with the claimed sign pattern checked. Violations are
/// listed in the result; use [`CoefficientSystem::strict`] to turn them into
/// an error.
pub fn coefficient_system(x: f64, y: f64, z: f64) -> Result<CoefficientSystem> {
    let pos = SevenBodyPositions::new(x, y, z)?;
    existence_case(&pos)?;
    Ok(CoefficientSystem::from_positions(&pos))
}

/// Coefficient system for any admissible case (no sign pattern for the
/// nonexistence cases).
pub fn coefficient_system_unchecked(pos: &SevenBodyPositions) -> CoefficientSystem {
    CoefficientSystem::from_positions(pos)
}

/// The elimination sum used by the existence argument of the case.
pub fn case_elimination_sum(system: &CoefficientSystem) -> Option<EliminationSum> {
    let (unknown, pivot) = system.case.elimination()?;
    Some(system.elimination_sum(unknown, pivot, true))
}

/// Unique solution of the three reduced equations in `(mu, M, m)`.
pub fn solve_masses_exact7(x: f64, y: f64, z: f64) -> Result<MassSolution> {
    let pos = SevenBodyPositions::new(x, y, z)?;
    existence_case(&pos)?;
    let mut sol = solve_reduced7(&pos)?;
    let system = CoefficientSystem::from_positions(&pos);
    if let (Some(sum), Some(mu), Some(big_m), Some(m)) = (case_elimination_sum(&system), sol.mu, sol.big_m, sol.m) {
        sol.aggregated_residual = Some(sum.residual(mu, big_m, m));
    }
    Ok(sol)
}

/// Exact solve regardless of case.
pub fn solve_reduced7(pos: &SevenBodyPositions) -> Result<MassSolution> {
    let x = pos.linear_system().solve()?;
    MassSolution::evaluate(
        &pos.layout(true),
        Some(x[0]),
        &[1.0, x[1], x[2]],
        SolveMethod::ExactLinearSolve,
        (Some(x[0]), Some(x[1]), Some(x[2])),
    )
}

/// Sign certificate for the three nonexistence cases.
pub fn nonexistence_witness7(x: f64, y: f64, z: f64) -> Result<ViolationCertificate> {
    let pos = SevenBodyPositions::new(x, y, z)?;
    let case = pos.case();
    let equation = case.witness_equation().ok_or_else(|| Error::WrongCase {
        expected: "AllInside, InnerPairInside_ProductBelow or TwoPairsInside_Below".into(),
        found: case.name().into(),
    })?;
    Ok(ViolationCertificate::from_system(&pos.layout(true), &pos.linear_system(), &NAMES, equation))
}

/// Scan of the free coordinate along which an existence argument runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExistenceSearch {
    pub case: SevenBodyCase,
    /// `(x, z)` when `y` is scanned, `(x, y)` when `z` is scanned.
    pub fixed: (f64, f64),
    /// Open interval of the scanned coordinate; a case-specific default
    /// when absent.
    pub range: Option<(f64, f64)>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchPoint {
    pub value: f64,
    pub positions: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<MassSolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub argument_conditions: Vec<SignCondition>,
    pub argument_conditions_met: bool,
}

impl SearchPoint {
    pub fn certified_positive(&self) -> bool {
        self.solution.as_ref().map_or(false, MassSolution::certified_positive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub case: SevenBodyCase,
    pub scanned: char,
    pub fixed: (f64, f64),
    pub range: (f64, f64),
    pub points: usize,
    /// Points that were admissible and fell in the requested case.
    pub evaluated: usize,
    pub argument_conditions_met: usize,
    pub certified_positive: usize,
    pub samples: Vec<SearchPoint>,
}

impl SearchReport {
    pub fn positive(&self) -> impl Iterator<Item = &SearchPoint> {
        self.samples.iter().filter(|p| p.certified_positive())
    }
}

/// Default scan interval for a case and fixed coordinates.
pub fn default_range(case: SevenBodyCase, fixed: (f64, f64)) -> Result<(f64, f64)> {
    let (p, q) = fixed;
    let range = match case {
        SevenBodyCase::AllOutside => (q - (q - p) / 4.0, q),
        SevenBodyCase::InnerPairInsideMid => (p.max(1.0), (1.0 / p).min(q)),
        SevenBodyCase::InnerPairInsideProductAbove => ((1.0 / p).max(1.0), q),
        SevenBodyCase::TwoPairsInsideMid => ((1.0 / q).max(1.0), 1.0 / p),
        SevenBodyCase::TwoPairsInsideAbove => {
            let lo = (2.0 / p).max(10.0);
            (lo, 10.0 * lo)
        }
        other => {
            return Err(Error::WrongCase { expected: "a case with claimed existence".into(), found: other.name().into() })
        }
    };
    if !(range.0 < range.1) {
        return Err(Error::Inadmissible(format!("empty scan interval ({}, {}) for fixed {fixed:?}", range.0, range.1)));
    }
    Ok(range)
}

/// Open geometric grid with `n` interior points of `(lo, hi)`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = hi / lo;
    (0..n).map(|k| lo * ratio.powf((k + 1) as f64 / (n + 1) as f64)).collect()
}

/// Scan the free coordinate, solve the reduced system exactly at each point
/// and evaluate the inequalities of the existence argument. An empty set of
/// positive solutions is a valid outcome.
pub fn existence_search(search: &ExistenceSearch) -> Result<SearchReport> {
    let case = search.case;
    let scanned = case.scanned_coordinate().ok_or_else(|| Error::WrongCase {
        expected: "a case with claimed existence".into(),
        found: case.name().into(),
    })?;
    if search.points == 0 {
        return Err(Error::InvalidInput("a scan needs at least one point".into()));
    }
    let range = match search.range {
        Some(r) if r.0 > 0.0 && r.0 < r.1 && r.1.is_finite() => r,
        Some(r) => return Err(Error::InvalidInput(format!("bad scan range {r:?}"))),
        None => default_range(case, search.fixed)?,
    };
    let (p, q) = search.fixed;
    let grid = geometric_grid(range.0, range.1, search.points);
    let samples: Vec<SearchPoint> = grid
        .par_iter()
        .map(|&t| {
            let positions = if scanned == 'y' { [p, t, q] } else { [p, q, t] };
            evaluate_point(case, t, positions)
        })
        .collect();
    let evaluated = samples.iter().filter(|s| s.solution.is_some()).count();
    let argument_conditions_met = samples.iter().filter(|s| s.argument_conditions_met).count();
    let certified_positive = samples.iter().filter(|s| s.certified_positive()).count();
    Ok(SearchReport {
        case,
        scanned,
        fixed: search.fixed,
        range,
        points: search.points,
        evaluated,
        argument_conditions_met,
        certified_positive,
        samples,
    })
}

fn evaluate_point(case: SevenBodyCase, value: f64, positions: [f64; 3]) -> SearchPoint {
    let mut point = SearchPoint {
        value,
        positions,
        solution: None,
        error: None,
        argument_conditions: Vec::new(),
        argument_conditions_met: false,
    };
    let pos = match SevenBodyPositions::new(positions[0], positions[1], positions[2]) {
        Ok(p) => p,
        Err(e) => {
            point.error = Some(e.to_string());
            return point;
        }
    };
    if pos.case() != case {
        point.error = Some(format!("positions fall in case {}", pos.case()));
        return point;
    }
    let system = CoefficientSystem::from_positions(&pos);
    if let Some(sum) = case_elimination_sum(&system) {
        point.argument_conditions = argument_conditions(case, &sum);
        point.argument_conditions_met = point.argument_conditions.iter().all(|c| c.holds);
        match solve_reduced7(&pos) {
            Ok(mut sol) => {
                if let (Some(mu), Some(big_m), Some(m)) = (sol.mu, sol.big_m, sol.m) {
                    sol.aggregated_residual = Some(sum.residual(mu, big_m, m));
                }
                point.solution = Some(sol);
            }
            Err(e) => point.error = Some(e.to_string()),
        }
    }
    point
}

/// Exact 2x2 solve of two of the three six-body equations, with the
/// residual of the third.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSolve {
    /// 1-based equations used for the solve.
    pub equations: [usize; 2],
    #[serde(rename = "M")]
    pub big_m: f64,
    pub m: f64,
    pub remaining_equation: usize,
    pub remaining_residual: f64,
    pub full_residual_max: f64,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum SixBodyVerdict {
    Nonexistence {
        case: String,
        certificate: ViolationCertificate,
    },
    /// Three equations in `(M, m)`: the best pairing is reported with the
    /// residual of the equation left out.
    ExistenceCheck {
        case: String,
        best: Option<PairedSolve>,
        elimination: EliminationSum,
        argument_conditions: Vec<SignCondition>,
        argument_conditions_met: bool,
    },
    NotCovered {
        case: String,
    },
}

/// Six bodies: unit masses at `±x`, `M` at `±y`, `m` at `±z`, no central body.
pub fn corollary_6body(x: f64, y: f64, z: f64) -> Result<SixBodyVerdict> {
    let pos = SevenBodyPositions::new(x, y, z)?;
    let case = pos.case();
    let layout = pos.layout(false);
    let unknowns = [MassSlot::Pair(1), MassSlot::Pair(2)];
    let system = layout.linear_system(&KNOWN, &unknowns);
    let name = case.name().to_string();
    match case {
        SevenBodyCase::AllInside | SevenBodyCase::InnerPairInsideProductBelow => {
            let equation = case.witness_equation().expect("nonexistence case");
            let certificate = ViolationCertificate::from_system(&layout, &system, &["M", "m"], equation);
            Ok(SixBodyVerdict::Nonexistence { case: name, certificate })
        }
        SevenBodyCase::InnerPairInsideMid | SevenBodyCase::InnerPairInsideProductAbove => {
            let coeffs = CoefficientSystem {
                case,
                big_a: [system.rhs[0], system.rhs[1], system.rhs[2]],
                a: [0.0; 3],
                b: [system.matrix[0][0], system.matrix[1][0], system.matrix[2][0]],
                c: [system.matrix[0][1], system.matrix[1][1], system.matrix[2][1]],
                sign_violations: Vec::new(),
            };
            let pivot = if case == SevenBodyCase::InnerPairInsideMid { 0 } else { 2 };
            let elimination = coeffs.elimination_sum(Unknown::SmallM, pivot, false);
            let argument_conditions =
                vec![condition("constant", elimination.constant, false), condition("M coefficient", elimination.big_m, true)];
            let argument_conditions_met = argument_conditions.iter().all(|c| c.holds);
            let best = best_pairing(&layout, &system);
            Ok(SixBodyVerdict::ExistenceCheck { case: name, best, elimination, argument_conditions, argument_conditions_met })
        }
        _ => Ok(SixBodyVerdict::NotCovered { case: name }),
    }
}

fn best_pairing(layout: &SymmetricLayout, system: &LinearSystem) -> Option<PairedSolve> {
    let mut best: Option<PairedSolve> = None;
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        let sub = LinearSystem {
            unknowns: system.unknowns.clone(),
            rhs: vec![system.rhs[i], system.rhs[j]],
            matrix: vec![system.matrix[i].clone(), system.matrix[j].clone()],
        };
        let Ok(x) = sub.solve() else { continue };
        let remaining = system.residuals(&x)[k];
        let Ok(config) = layout.configuration(None, &[1.0, x[0], x[1]]) else { continue };
        let Ok(full) = crate::conditions::condition_residual(&config) else { continue };
        let cand = PairedSolve {
            equations: [i + 1, j + 1],
            big_m: x[0],
            m: x[1],
            remaining_equation: k + 1,
            remaining_residual: remaining,
            full_residual_max: full.max_abs,
            positive: x[0] > 0.0 && x[1] > 0.0,
        };
        if best.as_ref().map_or(true, |b| cand.remaining_residual.abs() < b.remaining_residual.abs()) {
            best = Some(cand);
        }
    }
    best
}

pub fn region_verdict(x: f64, y: f64, z: f64) -> Result<RegionVerdict> {
    let pos = SevenBodyPositions::new(x, y, z)?;
    let case = pos.case();
    let certificate = if case.existence_claimed() { None } else { Some(nonexistence_witness7(x, y, z)?) };
    let (exact_solution, exact_error) = match solve_reduced7(&pos) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let certified_positive_solution = exact_solution.as_ref().map_or(false, MassSolution::certified_positive);
    Ok(RegionVerdict {
        family: "seven".into(),
        positions: vec![x, y, z],
        case: case.name().into(),
        exists: Some(case.existence_claimed()),
        mass_constraint: None,
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
        assert_eq!(classify7(0.3, 0.5, 0.7).unwrap(), SevenBodyCase::AllInside);
        assert_eq!(classify7(0.5, 0.9, 1.05).unwrap(), SevenBodyCase::TwoPairsInsideBelow);
        assert_eq!(classify7(2.0, 3.0, 4.0).unwrap(), SevenBodyCase::AllOutside);
        assert_eq!(classify7(0.5, 0.8, 1.5).unwrap(), SevenBodyCase::TwoPairsInsideMid);
        assert_eq!(classify7(0.5, 1.2, 1.8).unwrap(), SevenBodyCase::InnerPairInsideProductBelow);
        assert_eq!(classify7(0.5, 1.5, 3.0).unwrap(), SevenBodyCase::InnerPairInsideMid);
        assert_eq!(classify7(0.5, 2.5, 3.0).unwrap(), SevenBodyCase::InnerPairInsideProductAbove);
        assert_eq!(classify7(0.5, 0.9, 1.6).unwrap(), SevenBodyCase::TwoPairsInsideMid);
        assert_eq!(classify7(0.5, 0.9, 20.0).unwrap(), SevenBodyCase::TwoPairsInsideAbove);
        assert!(matches!(classify7(0.5, 2.0 + 1e-7, 3.0), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn outside_coefficients() {
        let sys = coefficient_system(2.0, 3.0, 4.0).unwrap();
        assert_relative_eq!(sys.a[0], -1.0 / 8.0, max_relative = 1e-15);
        assert_relative_eq!(sys.a[1], -1.0 / 18.0, max_relative = 1e-15);
        assert_relative_eq!(sys.a[2], -1.0 / 32.0, max_relative = 1e-15);
        assert!(sys.big_a[0] < 0.0);
        assert_relative_eq!(sys.big_a[0], crate::lemmas::lemma4_a1(2.0), max_relative = 1e-12);
    }

    #[test]
    fn two_pairs_mid_b2_negative() {
        let sys = coefficient_system(0.5, 0.9, 1.6).unwrap();
        let expected = -(0.81_f64 + 1.0).powi(2) / (8.0 * (0.81_f64 - 1.0).powi(2) * 0.81);
        assert_relative_eq!(sys.b[1], expected, max_relative = 1e-12);
        assert!(sys.sign_violations.is_empty(), "{:?}", sys.sign_violations);
    }

    #[test]
    fn elimination_sum_vanishes_at_exact_solution() {
        let sol = solve_masses_exact7(0.5, 1.5, 3.0).unwrap();
        assert!(sol.certified);
        assert!(sol.aggregated_residual.unwrap().abs() < 1e-10);
    }

    #[test]
    fn witnesses() {
        for (x, y, z) in [(0.3, 0.5, 0.7), (0.5, 1.2, 1.8), (0.5, 0.9, 1.05)] {
            let w = nonexistence_witness7(x, y, z).unwrap();
            assert!(w.valid, "({x}, {y}, {z}): {w:?}");
        }
        assert!(nonexistence_witness7(2.0, 3.0, 4.0).is_err());
    }

    #[test]
    fn six_body() {
        assert!(matches!(corollary_6body(0.3, 0.5, 0.7).unwrap(), SixBodyVerdict::Nonexistence { certificate, .. } if certificate.valid));
        assert!(matches!(corollary_6body(0.5, 1.2, 1.8).unwrap(), SixBodyVerdict::Nonexistence { certificate, .. } if certificate.valid));
        assert!(matches!(corollary_6body(0.1, 11.0, 20.0).unwrap(), SixBodyVerdict::ExistenceCheck { .. }));
    }

    #[test]
    fn grid_is_open_and_geometric() {
        let g = geometric_grid(1.0, 100.0, 3);
        assert_eq!(g.len(), 3);
        assert!(g[0] > 1.0 && g[2] < 100.0);
        assert_relative_eq!(g[1], 10.0, max_relative = 1e-14);
    }
}
