//! Equilibrium analysis for subpopulation-alignment games.
//!
//! A population of `M` agents each mixes over `D` subpopulation response
//! models; utilities trade off audience attractiveness, internal
//! inconsistency, and similarity to other agents. This crate provides:
//!
//! - [`game`]: the game types, utilities, exact gradients, and the
//!   entropy-regularized quantal-response loss;
//! - [`dataprep`]: construction of the inconsistency matrix and
//!   attractiveness vector from response-probability tables;
//! - [`interior_solver`]: the closed-form interior Nash equilibrium, its
//!   multiplier, and the root structure of the normalization factor;
//! - [`boundary_solver`]: annealed quantal-response descent for boundary
//!   equilibria when no interior equilibrium exists;
//! - [`oracle`]: exact best responses by support enumeration,
//!   exploitability certificates, and damped best-response dynamics;
//! - [`sweep`]: log-scaled coefficient sweeps with per-cell classification
//!   and exclusion metrics;
//! - [`cli`]: the file formats and commands behind the `nash-align`
//!   binary, including P6 heatmap rendering.
//!
//! The `examples/` directory has one runnable program per capability; the
//! `nash-align` binary wires the same operations to the command line.

pub mod boundary_solver;
pub mod cli;
pub mod dataprep;
pub mod error;
pub mod game;
pub mod interior_solver;
pub mod oracle;
pub mod sweep;

pub use error::{Error, Result};
pub use game::{Coefficients, GameSpec, QreParams, StrategyProfile};
pub use interior_solver::{solve_interior, EquilibriumResult, Validity};
