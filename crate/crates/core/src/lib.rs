//! Relative equilibria of the n-body problem on the sphere of curvature +1,
//! in the stereographic model `|dz|^2 4 / (1 + |z|^2)^2` with the cotangent
//! potential.
//!
//! The crate covers the geometry and equations of motion, the algebraic
//! condition for rigid rotation, its reduction for collinear symmetric
//! layouts (five, seven and general odd numbers of bodies), mass solving,
//! sign certificates for nonexistence, and independent verification by
//! back-substitution, integration and Monte Carlo sampling.

pub mod collinear;
pub mod conditions;
pub mod dynamics;
pub mod error;
pub mod family5;
pub mod family7;
pub mod familyn;
pub mod geometry;
pub mod lemmas;
pub mod numeric;
pub mod sampling;
pub mod verify;

pub use collinear::{MassSolution, SolveMethod, SymmetricLayout, ViolationCertificate};
pub use conditions::{collinear_reduce, condition_residual, pair_kernel, ConditionResidual, PairKernel};
pub use dynamics::{integrate, IntegrationSettings, State};
pub use error::{Error, ErrorClass, Result};
pub use geometry::{Body, Configuration};
