//! The scalar nonlinear eigenvalue `J` of the single-species problem.
//!
//! Integrating the closed form `u(r) = 2 log cos(sqrt(J/2) r)` of
//! `-u'' = J e^{-u}`, `u(0) = u'(0) = 0` over the unit interval turns the
//! nonlocal definition `J = lambda / \int_0^1 e^{-u}` into one transcendental
//! equation for `J` alone:
//!
//! ```text
//! f(J) = sqrt(2J)/lambda - cot(sqrt(J/2)) = 0,      J in (0, pi^2/2).
//! ```
//!
//! `f` is strictly increasing on the bracket with `f(0+) = -inf` and
//! `f(pi^2/2-) > 0`, so the root is unique: bisection cannot miss it and a
//! short Newton polish finishes at machine precision.  `I = \int_0^1 e^{-u}`
//! is recovered as `lambda / J`.

use crate::error::{Error, Result};
use serde::Serialize;

/// Strict upper bound of the admissible eigenvalue interval, `pi^2/2`.
pub const J_SUPREMUM: f64 = std::f64::consts::PI * std::f64::consts::PI / 2.0;

/// Default absolute tolerance on the defect `f(J)` for `lambda >= 1e-4`.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Default tolerance at a given `lambda`.
///
/// Below `lambda ~ 1e-4` the defect slope `f'(J) ~ sqrt(2) lambda^{-3/2}`
/// is so steep that even the representable `J` nearest the root leaves
/// `|f| ~ 3e-16 / sqrt(lambda)`; the default keeps a safety factor above
/// that quantization floor.  For larger `lambda` it is the flat 1e-13.
#[must_use]
pub fn default_tol(lambda: f64) -> f64 {
    DEFAULT_TOL.max(1e-15 / lambda.sqrt())
}

const BISECTION_STEPS: usize = 60;
const NEWTON_STEPS: usize = 10;

/// A solved eigenvalue together with its companions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Eigenvalue {
    /// Ion-number parameter.
    pub lambda: f64,
    /// The eigenvalue `J` in `(0, pi^2/2)`.
    pub j: f64,
    /// `I = \int_0^1 e^{-u} = lambda / j`, stored redundantly.
    pub i: f64,
    /// Defect `f(j)` at the returned root.
    pub residual: f64,
}

impl Eigenvalue {
    /// Phase rate `k = sqrt(j/2)` of the closed-form solution, in `(0, pi/2)`.
    #[must_use]
    pub fn phase_rate(&self) -> f64 {
        (self.j / 2.0).sqrt()
    }

    /// Relative error of the stored redundancy `i * j = lambda`.
    #[must_use]
    pub fn redundancy_defect(&self) -> f64 {
        (self.i * self.j / self.lambda - 1.0).abs()
    }
}

/// Below this phase `x = sqrt(J/2)` the two terms of the defect nearly
/// cancel (both grow like `1/x`), and the fused series form is used instead.
const SMALL_PHASE: f64 = 0.1;

/// `1 - x cot x` by its even Taylor series; full precision for `x <= 0.1`.
fn one_minus_x_cot_x(x: f64) -> f64 {
    const COEFS: [f64; 7] = [
        1.0 / 3.0,
        1.0 / 45.0,
        2.0 / 945.0,
        1.0 / 4725.0,
        2.0 / 93555.0,
        1382.0 / 638_512_875.0,
        4.0 / 18_243_225.0,
    ];
    let x2 = x * x;
    let mut acc = 0.0;
    for &c in COEFS.iter().rev() {
        acc = acc * x2 + c;
    }
    acc * x2
}

/// The defect `sqrt(2J)/lambda - cot(sqrt(J/2))` at full precision across
/// the whole bracket.
///
/// For `x = sqrt(J/2)` away from zero, `cot` is evaluated as
/// `tan(pi/2 - x)`, which keeps precision as `x` approaches `pi/2` where the
/// cotangent nearly vanishes.  For small `x` both terms blow up like `1/x`
/// and their difference would drown in rounding, so the algebraically equal
/// fused form `((J - lambda) + lambda (1 - x cot x)) / (lambda x)` is used;
/// `J - lambda` is exact near the small-`lambda` root and the series leaves
/// no cancellation.
fn defect_unchecked(lambda: f64, j: f64) -> f64 {
    let x = (j / 2.0).sqrt();
    if x <= SMALL_PHASE {
        ((j - lambda) + lambda * one_minus_x_cot_x(x)) / (lambda * x)
    } else {
        (2.0 * j).sqrt() / lambda - (std::f64::consts::FRAC_PI_2 - x).tan()
    }
}

fn defect_derivative(lambda: f64, j: f64) -> f64 {
    let sqrt_2j = (2.0 * j).sqrt();
    let sin_k = (j / 2.0).sqrt().sin();
    1.0 / (lambda * sqrt_2j) + 1.0 / (sin_k * sin_k * 2.0 * sqrt_2j)
}

/// The defining defect `f(j) = sqrt(2j)/lambda - cot(sqrt(j/2))`.
///
/// Sign-consistent with bracketing: negative left of the root, positive
/// right of it.
pub fn eigenvalue_defect(lambda: f64, j_candidate: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveLambda(lambda));
    }
    if !(j_candidate > 0.0 && j_candidate < J_SUPREMUM) {
        return Err(Error::OutOfBracket(j_candidate));
    }
    Ok(defect_unchecked(lambda, j_candidate))
}

/// Solve `f(J) = 0` by 60 bisection steps followed by a Newton polish.
///
/// The bisection steps shrink the initial bracket below one ulp of
/// `pi^2/2`, so the Newton stage only sharpens the final digits; Newton
/// iterates leaving the bracket are rejected.
pub fn solve_j(lambda: f64, tol: f64) -> Result<Eigenvalue> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveLambda(lambda));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    // f is singular at 0 and the root approaches pi^2/2 only as
    // lambda -> infinity, so keep both endpoints strictly inside.
    let mut lo = (1e-3 * lambda.min(1.0)).max(1e-12);
    let mut hi = J_SUPREMUM * (1.0 - 1e-15);
    debug_assert!(defect_unchecked(lambda, lo) < 0.0);
    debug_assert!(defect_unchecked(lambda, hi) > 0.0);

    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if defect_unchecked(lambda, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut j = 0.5 * (lo + hi);
    let mut f = defect_unchecked(lambda, j);
    let (mut best_j, mut best_f) = (j, f);
    let mut iters = BISECTION_STEPS;
    for _ in 0..NEWTON_STEPS {
        if best_f.abs() <= tol {
            break;
        }
        iters += 1;
        if f > 0.0 {
            hi = j;
        } else {
            lo = j;
        }
        let next = j - f / defect_derivative(lambda, j);
        if next == j {
            // The Newton step fell below one ulp of J: the quantization
            // floor of f64 is reached and no iterate can do better.
            break;
        }
        // Newton iterates leaving the bracket are replaced by a bisection.
        j = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        f = defect_unchecked(lambda, j);
        if f.abs() < best_f.abs() {
            (best_j, best_f) = (j, f);
        }
    }

    if best_f.abs() > tol {
        return Err(Error::NoConvergence {
            iters,
            residual: best_f,
        });
    }
    Ok(Eigenvalue {
        lambda,
        j: best_j,
        i: lambda / best_j,
        residual: best_f,
    })
}

/// [`solve_j`] at the `lambda`-aware default tolerance.
pub fn solve_j_default(lambda: f64) -> Result<Eigenvalue> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveLambda(lambda));
    }
    solve_j(lambda, default_tol(lambda))
}
