//! Truncated large-`lambda` expansions of the eigenvalue, the potential, the
//! charge density, and the potential-gap limits, together with
//! computed-vs-predicted residual reports.
//!
//! The expansions come in two flavors:
//!
//! - **far-field**: valid uniformly on compact subsets of `[0, 1)`, written
//!   around the limit profile `U(r) = 2 log cos(pi r / 2)`;
//! - **near-field**: pointwise at boundary-approaching points
//!   `r = 1 - p / lambda^alpha`, where the leading behavior switches with
//!   `alpha` (the layer has width `O(1/lambda)`).
//!
//! Truncations are hard-coded; unquantified remainders are only ever tested
//! as "normalized residual bounded and decreasing", never as exact
//! coefficients, except where the next term is printed explicitly.

use crate::eigenvalue;
use crate::error::{Error, Result};
use crate::exact::NearFieldPoint;
use crate::numerics;
use serde::Serialize;
use std::f64::consts::PI;

/// Below this `lambda`, the large-parameter expansions are out of regime and
/// residual-based order checks are not meaningful.
pub const REGIME_THRESHOLD: f64 = 10.0;

/// The zeroth-order outer profile `U(r) = 2 log cos(pi r / 2)` and its slope.
///
/// `U(0) = U'(0) = 0` and both blow down to `-infinity` as `r -> 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LimitProfile;

impl LimitProfile {
    #[must_use]
    pub fn u(r: f64) -> f64 {
        2.0 * (PI * r / 2.0).cos().ln()
    }

    #[must_use]
    pub fn du(r: f64) -> f64 {
        -PI * (PI * r / 2.0).tan()
    }
}

/// Truncation of `J = pi^2 (1/2 - 2/lambda + 6/lambda^2
/// - (48 - 2 pi^2)/(3 lambda^3))` to `order` terms (1 to 4).
pub fn j_expansion(lambda: f64, order: usize) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let terms = [
        0.5,
        -2.0 / lambda,
        6.0 / (lambda * lambda),
        -(48.0 - 2.0 * PI * PI) / (3.0 * lambda.powi(3)),
    ];
    if !(1..=4).contains(&order) {
        return Err(Error::BadOrder {
            order,
            expected: "1..=4",
        });
    }
    Ok(PI * PI * terms[..order].iter().sum::<f64>())
}

/// Truncation of `I = (2/pi^2)(lambda + 4 + 4/lambda)` to `order` terms
/// (1 to 3).  Meaningful for `lambda >> 1` only; callers should treat
/// `lambda <` [`REGIME_THRESHOLD`] as out of regime.
pub fn i_expansion(lambda: f64, order: usize) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let terms = [lambda, 4.0, 4.0 / lambda];
    if !(1..=3).contains(&order) {
        return Err(Error::BadOrder {
            order,
            expected: "1..=3",
        });
    }
    Ok(2.0 / (PI * PI) * terms[..order].iter().sum::<f64>())
}

/// Far-field truncations of `(u, u')` at a point `r` of a compact subset of
/// `[0, 1)`, to `order` terms (1 to 3).  Order 1 is exactly the limit
/// profile.
pub fn far_field_u(r: f64, lambda: f64, order: usize) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain {
            value: r,
            expected: "[0, 1)",
        });
    }
    if !(1..=3).contains(&order) {
        return Err(Error::BadOrder {
            order,
            expected: "1..=3",
        });
    }
    let half = PI * r / 2.0;
    let sec2 = 1.0 / ((half).cos() * (half).cos());
    let tan = half.tan();
    let sin_pir = (PI * r).sin();

    let mut u = LimitProfile::u(r);
    let mut du = LimitProfile::du(r);
    if order >= 2 {
        u += PI * r * sin_pir / lambda * sec2;
        du += (2.0 * PI * tan + PI * PI * r * sec2) / lambda;
    }
    if order >= 3 {
        u -= PI * r * (PI * r + 2.0 * sin_pir) / (lambda * lambda) * sec2;
        du -= (4.0 * PI * tan + 4.0 * PI * PI * r * sec2 + PI.powi(3) * r * r * sec2 * tan)
            / (lambda * lambda);
    }
    Ok((u, du))
}

/// Far-field two-term expansion of the charge density,
/// `pi^2/2 sec^2 - (1/lambda)[2 pi^2 sec^2 + pi^3 r sec^2 tan](pi r/2)`.
///
/// The `r` factor on the tangent term follows from differentiating the `u'`
/// expansion once more (`rho = -u''`); the sweep against the closed form
/// pins the coefficient.
pub fn far_field_rho(r: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain {
            value: r,
            expected: "[0, 1)",
        });
    }
    let half = PI * r / 2.0;
    let sec2 = 1.0 / (half.cos() * half.cos());
    let tan = half.tan();
    Ok(PI * PI / 2.0 * sec2 - (2.0 * PI * PI * sec2 + PI.powi(3) * r * sec2 * tan) / lambda)
}

/// Near-field truncations of `(u, u')` at `r = 1 - p / lambda^alpha`.
///
/// The `u` prediction is truncated to `order` terms (1 to 3); the leading
/// term is always `min(2, 2 alpha) log(1/lambda)`.  The slope prediction is
/// the full printed expansion of its case and does not depend on `order`:
/// `-lambda` for `alpha > 2`, `-lambda + (p/2) lambda^{2-alpha}` for
/// `1 < alpha <= 2`, `-2 lambda/(p+2)` at `alpha = 1`, and
/// `-(2/p) lambda^alpha` for `alpha < 1` (where no further term is printed,
/// higher orders return the same value).  Dispatch at `alpha` exactly 1 or 2
/// compares the caller-supplied `alpha` bitwise.
pub fn near_field_u(pt: &NearFieldPoint, order: usize) -> Result<(f64, f64)> {
    if !(1..=3).contains(&order) {
        return Err(Error::BadOrder {
            order,
            expected: "1..=3",
        });
    }
    let (lambda, p, alpha) = (pt.lambda, pt.p, pt.alpha);
    let log_inv = -lambda.ln();

    let (terms, du): ([f64; 3], f64) = if alpha > 2.0 {
        (
            [2.0 * log_inv, 2.0 * PI.ln(), -4.0 / lambda],
            -lambda,
        )
    } else if alpha > 1.0 {
        let third = if alpha == 2.0 {
            (p - 4.0) / lambda
        } else {
            p / lambda.powf(alpha - 1.0)
        };
        (
            [2.0 * log_inv, 2.0 * PI.ln(), third],
            -lambda + 0.5 * p * lambda.powf(2.0 - alpha),
        )
    } else if alpha == 1.0 {
        (
            [
                2.0 * log_inv,
                2.0 * ((p + 2.0) * PI / 2.0).ln(),
                -4.0 / lambda,
            ],
            -2.0 * lambda / (p + 2.0),
        )
    } else {
        (
            [2.0 * alpha * log_inv, 2.0 * (p * PI / 2.0).ln(), 0.0],
            -2.0 / p * lambda.powf(alpha),
        )
    };
    Ok((terms[..order].iter().sum(), du))
}

/// Leading-order near-field charge density: `lambda^2/2` for `alpha > 1`,
/// `2 lambda^2/(p+2)^2` at `alpha = 1`, `2 lambda^{2 alpha}/p^2` below.
#[must_use]
pub fn near_field_rho(pt: &NearFieldPoint) -> f64 {
    let (lambda, p, alpha) = (pt.lambda, pt.p, pt.alpha);
    if alpha > 1.0 {
        lambda * lambda / 2.0
    } else if alpha == 1.0 {
        2.0 * lambda * lambda / ((p + 2.0) * (p + 2.0))
    } else {
        2.0 * lambda.powf(2.0 * alpha) / (p * p)
    }
}

/// Limits of the potential differences across the boundary layer.
///
/// With `p2` absent: `lim |u(r_{p,alpha}) - u(1)|`, which is `+infinity` for
/// `alpha < 1`, `2 log((p+2)/2)` at `alpha = 1`, and `0` for `alpha > 1`.
/// With `p2` present: `lim |u(r_{p,alpha}) - u(r_{p2,alpha})|`, which is
/// `2 |log(p/p2)|` for `alpha < 1`, `2 |log((p+2)/(p2+2))|` at `alpha = 1`,
/// and `0` for `alpha > 1`.
#[must_use]
pub fn potential_gap_limit(p: f64, p2: Option<f64>, alpha: f64) -> f64 {
    assert!(p > 0.0 && alpha > 0.0 && p2.map_or(true, |q| q > 0.0));
    match p2 {
        None => {
            if alpha < 1.0 {
                f64::INFINITY
            } else if alpha == 1.0 {
                2.0 * ((p + 2.0) / 2.0).ln()
            } else {
                0.0
            }
        }
        Some(q) => {
            if alpha < 1.0 {
                2.0 * (p / q).ln().abs()
            } else if alpha == 1.0 {
                2.0 * ((p + 2.0) / (q + 2.0)).ln().abs()
            } else {
                0.0
            }
        }
    }
}

/// One computed-vs-predicted comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport {
    /// Expansion identifier, e.g. `j/order3`.
    pub name: String,
    pub lambda: f64,
    pub exact: f64,
    pub predicted: f64,
    /// `exact - predicted`.
    pub residual: f64,
    /// Residual scaled by the expected inverse order, e.g. `* lambda^3`.
    pub normalized_residual: f64,
    /// Slope of `ln |residual|` against `ln lambda` across a sweep, when one
    /// was available (needs at least 3 points).
    pub observed_order: Option<f64>,
}

impl ExpansionReport {
    /// Build a report; `order_power` is the expected decay order `q` so that
    /// the normalized residual is `residual * lambda^q`.
    #[must_use]
    pub fn new(name: &str, lambda: f64, exact: f64, predicted: f64, order_power: f64) -> Self {
        let residual = exact - predicted;
        if lambda < REGIME_THRESHOLD {
            log::warn!("expansion report '{name}' at lambda = {lambda} is out of regime");
        }
        Self {
            name: name.to_string(),
            lambda,
            exact,
            predicted,
            residual,
            normalized_residual: residual * lambda.powf(order_power),
            observed_order: None,
        }
    }

    /// Whether the large-parameter regime applies at this `lambda`.
    #[must_use]
    pub fn in_regime(&self) -> bool {
        self.lambda >= REGIME_THRESHOLD
    }
}

/// Fill `observed_order` for every group of reports sharing a name, using
/// the least-squares slope of `ln |residual|` against `ln lambda`.  Groups
/// with fewer than 3 points are left untouched.
pub fn attach_observed_orders(reports: &mut [ExpansionReport]) {
    let names: Vec<String> = {
        let mut seen = Vec::new();
        for r in reports.iter() {
            if !seen.contains(&r.name) {
                seen.push(r.name.clone());
            }
        }
        seen
    };
    for name in names {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for r in reports.iter() {
            if r.name == name && r.residual != 0.0 {
                xs.push(r.lambda);
                ys.push(r.residual);
            }
        }
        if xs.len() < 3 {
            continue;
        }
        let order = -numerics::log_log_slope(&xs, &ys);
        for r in reports.iter_mut() {
            if r.name == name {
                r.observed_order = Some(order);
            }
        }
    }
}

/// The default report battery for one `lambda`: eigenvalue and integral
/// truncations, a far-field sample, the boundary-value expansion, and a
/// far-field charge-density sample.
pub fn standard_reports(lambdas: &[f64]) -> Result<Vec<ExpansionReport>> {
    let mut out = Vec::with_capacity(lambdas.len() * 5);
    for &lambda in lambdas {
        let eig = eigenvalue::solve_j_default(lambda)?;
        let sol = crate::exact::SingleSpeciesSolution::from_eigenvalue(eig);
        out.push(ExpansionReport::new(
            "j/order3",
            lambda,
            eig.j,
            j_expansion(lambda, 3)?,
            3.0,
        ));
        out.push(ExpansionReport::new(
            "i/order2",
            lambda,
            eig.i,
            i_expansion(lambda, 2)?,
            1.0,
        ));
        let (u_pred, _) = far_field_u(0.5, lambda, 3)?;
        out.push(ExpansionReport::new(
            "far_u(0.5)/order3",
            lambda,
            sol.eval_u(0.5)?,
            u_pred,
            3.0,
        ));
        let u1_pred = -2.0 * lambda.ln() + 2.0 * PI.ln() - 4.0 / lambda;
        out.push(ExpansionReport::new(
            "u(1)/order3",
            lambda,
            sol.eval_u(1.0)?,
            u1_pred,
            1.0,
        ));
        out.push(ExpansionReport::new(
            "far_rho(0.3)/order2",
            lambda,
            sol.eval_rho(0.3)?,
            far_field_rho(0.3, lambda)?,
            1.0,
        ));
    }
    attach_observed_orders(&mut out);
    Ok(out)
}

/// CSV rendering of reports: one row per (expansion, lambda).
#[must_use]
pub fn reports_to_csv(reports: &[ExpansionReport]) -> String {
    let mut s =
        String::from("name,lambda,exact,predicted,residual,normalized_residual,observed_order\n");
    for r in reports {
        let order = r
            .observed_order
            .map_or_else(|| String::from(""), numerics::fmt_g17);
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.name,
            numerics::fmt_g17(r.lambda),
            numerics::fmt_g17(r.exact),
            numerics::fmt_g17(r.predicted),
            numerics::fmt_g17(r.residual),
            numerics::fmt_g17(r.normalized_residual),
            order
        ));
    }
    s
}

/// JSON rendering of reports, fields exactly as in [`ExpansionReport`].
#[must_use]
pub fn reports_to_json(reports: &[ExpansionReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports are plain data")
}
