//! ionlayer: boundary layers of the steady-state single-species
//! Poisson--Nernst--Planck system and the charge-conserving
//! Poisson--Boltzmann equation on the unit interval.
//!
//! The electrostatic potential `u` of a single positive species with
//! ion-number parameter `lambda` solves the nonlocal problem
//!
//! ```text
//! -u'' = lambda e^{-u} / \int_0^1 e^{-u},      u(0) = u'(0) = 0,
//! ```
//!
//! whose solution is the closed form `u(r) = 2 log cos(sqrt(J/2) r)` once the
//! scalar eigenvalue `J = lambda / \int_0^1 e^{-u}` is known.  `J` is the root
//! of a transcendental equation and stays below `pi^2/2` for every `lambda`,
//! approaching it as `lambda -> infinity`; all of the boundary-layer behavior
//! (the potential drop of `2 log lambda` in an `O(1/lambda)` layer at `r = 1`,
//! the Dirac concentration of the normalized charge density, the double-layer
//! capacitance) follows from how `J` approaches that limit.
//!
//! The crate provides:
//!
//! - [`eigenvalue`]: the hybrid bisection/Newton solver for `J`.
//! - [`exact`]: the closed-form solution, its derivative, charge density, and
//!   exact identities used as cross-checks.
//! - [`asymptotics`]: every truncated expansion (eigenvalue, far-field,
//!   near-field, charge density, potential-gap limits) together with
//!   residual/order reports.
//! - [`ccpb`]: a damped fixed-point / quasi-Newton solver for the
//!   charge-conserving Poisson--Boltzmann equation with both species, and the
//!   comparison profile `w = v - u`.
//! - [`capacitance`]: exact and asymptotic double-layer capacitances on
//!   boundary-attached intervals.
//! - [`concentration`]: weak-limit functionals verifying that `rho/lambda`
//!   concentrates at the boundary.
//! - [`verify`]: the aggregated invariant and acceptance check suites used by
//!   the CLI `verify` subcommand and the integration tests.
//!
//! # Quick start
//!
//! ```
//! use ionlayer::exact::SingleSpeciesSolution;
//!
//! let sol = SingleSpeciesSolution::solve(1.0e4).unwrap();
//! assert!(sol.eval_u(0.0).unwrap() == 0.0);
//! // u'(1) = -lambda is the flux identity at the charged boundary.
//! assert!((sol.eval_du(1.0).unwrap() + 1.0e4).abs() < 1e-6);
//! ```

pub mod asymptotics;
pub mod capacitance;
pub mod ccpb;
pub mod concentration;
pub mod eigenvalue;
pub mod error;
pub mod exact;
pub mod numerics;
pub mod verify;

pub use error::{Error, Result};

/// Officially supported range of the ion-number parameter; outside these
/// bounds the accuracy statements of the expansion and solver tests are void.
pub const LAMBDA_SUPPORTED: (f64, f64) = (1.0e-6, 1.0e10);
