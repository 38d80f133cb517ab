//! Exact discrete harmonic analysis on the lattice `Z^d`.
//!
//! The crate builds harmonic functions on l1 balls of `Z^d`, computes their
//! random-walk growth function `Q_u(n) = E u(X_n)^2` exactly, and decides the
//! absolute-monotonicity and three-circles inequalities that govern it.
//!
//! - [`lattice`]: lattice functions, the probabilistic Laplacian, differences
//!   and the sum-of-squares formula for `Δ^k(u²)`.
//! - [`polynomial`] and [`harmonic`]: exact polynomials, the shifted binomial
//!   basis `F_k`, the discrete correspondence `P ↦ P^Z` and the `S_k`, `T_k`,
//!   `u_k` families.
//! - [`walk`] and [`growth`]: walk-count tables and growth reports.
//! - [`enclosure`] and [`inequalities`]: certified rational enclosures and the
//!   verdict engines.
//! - [`conjecture`]: scans of the sharp-error conjecture for `S_k`.
//! - [`io`]: JSON and CSV formats.

pub mod conjecture;
pub mod enclosure;
pub mod error;
pub mod growth;
pub mod harmonic;
pub mod inequalities;
pub mod io;
pub mod lattice;
pub mod limits;
pub mod polynomial;
pub mod rational;
pub mod walk;

pub use error::{Error, Result};
pub use growth::{GrowthReport, ContinuousGrowthPolynomial};
pub use lattice::{Generator, LatticeBall, LatticeFunction};
pub use polynomial::MultivariatePolynomial;
pub use rational::Rational;

/// Version of the JSON and CSV schemas emitted by this crate.
pub const SCHEMA_VERSION: u32 = 1;
