//! Error types shared by the whole crate.

/// Everything that can go wrong in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The ion-number parameter must be strictly positive.
    #[error("lambda must be positive and finite, got {0}")]
    NonPositiveLambda(f64),

    /// An iteration exhausted its budget before reaching the requested tolerance.
    #[error("no convergence after {iters} iterations (last residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    /// An eigenvalue candidate outside the admissible interval (0, pi^2/2).
    #[error("eigenvalue candidate {0} lies outside the open bracket (0, pi^2/2)")]
    OutOfBracket(f64),

    /// An evaluation point outside the domain of the operation.
    #[error("argument {value} outside {expected}")]
    Domain { value: f64, expected: &'static str },

    /// An expansion order the truncation formulas do not cover.
    #[error("expansion order {order} not supported (expected {expected})")]
    BadOrder { order: usize, expected: &'static str },

    /// The IVP solution left the trust region, which signals bad frozen
    /// nonlocal coefficients early in the outer iteration.  `upward` tells
    /// which exponential term won the runaway.
    #[error("IVP solution blew {} past |v| = {limit:.1} near r = {r:.6}; frozen coefficients are off", if *upward { "up" } else { "down" })]
    BlowUp { r: f64, limit: f64, upward: bool },

    /// Parameter combinations rejected before any computation.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A structural property of a computed solution failed on the grid.
    /// This signals solver inaccuracy, not a defect of the model.
    #[error("invariant '{name}' violated at node {index} (r = {r:.8}): {detail}")]
    InvariantViolation {
        name: &'static str,
        index: usize,
        r: f64,
        detail: String,
    },

    /// Mesh refinement stopped making progress before the tolerance was met.
    #[error("quadrature refinement stalled (last relative change {0:.3e})")]
    QuadratureStall(f64),

    /// The capacitance interval has collapsed to the boundary point.
    #[error("interval [{0}, 1] is degenerate")]
    DegenerateInterval(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
