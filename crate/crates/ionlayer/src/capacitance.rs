//! Double-layer capacitance of boundary-attached intervals.
//!
//! For a region `K = [r, 1]` the capacitance is the contained normalized
//! charge over the maximal potential difference,
//!
//! ```text
//! C+(K) = |\int_K rho / lambda| / max_{x,y in K} |u(x) - u(y)|.
//! ```
//!
//! Since `rho = -u''`, the numerator is `(u'(r) + lambda)/lambda` by the
//! fundamental theorem, and monotonicity of `u` makes the endpoints extremal,
//! so the denominator is `u(r) - u(1)`; no max-search is needed.  On layers
//! `r = 1 - p/lambda^alpha` the limit is `1/2` for `alpha > 1`, the
//! prefactor `g(p) = p / (2 (p+2) log(1 + p/2))` at `alpha = 1` (strictly
//! decreasing from `1/2` at `p -> 0+` toward zero), and `0` for `alpha < 1`
//! where the capacitance decays like `1 / log lambda^{2 - 2 alpha}`.

use crate::error::{Error, Result};
use crate::exact::{NearFieldPoint, SingleSpeciesSolution};
use crate::numerics;
use serde::Serialize;
use std::f64::consts::PI;

/// Exact and asymptotic capacitance of `[r_{p,alpha}, 1]` at one `lambda`.
#[derive(Debug, Clone, Serialize)]
pub struct CapacitanceResult {
    pub lambda: f64,
    pub p: f64,
    pub alpha: f64,
    pub exact: f64,
    pub asymptotic: f64,
    /// The `lambda -> infinity` value: `1/2`, `g(p)`, or `0` by regime.
    pub limit: f64,
}

/// The `alpha = 1` prefactor `g(p) = p / (2 (p+2) log(1 + p/2))`.
#[must_use]
pub fn g_prefactor(p: f64) -> f64 {
    assert!(p > 0.0);
    p / (2.0 * (p + 2.0) * (p / 2.0).ln_1p())
}

/// Exact capacitance on `[r, 1]` for any interior left endpoint.
pub fn capacitance_exact_on(sol: &SingleSpeciesSolution, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain {
            value: r,
            expected: "(0, 1)",
        });
    }
    if r >= 1.0 - 1e-15 {
        return Err(Error::DegenerateInterval(r));
    }
    let lambda = sol.lambda();
    let numerator = (sol.eval_du(r)? + lambda) / lambda;
    let denominator = sol.eval_u(r)? - sol.eval_u(1.0)?;
    Ok(numerator / denominator)
}

/// Exact capacitance on the boundary-attached interval `[r_{p,alpha}, 1]`.
pub fn capacitance_exact(sol: &SingleSpeciesSolution, pt: &NearFieldPoint) -> Result<f64> {
    if pt.lambda != sol.lambda() {
        return Err(Error::InvalidParams(format!(
            "solution at lambda = {} but point at lambda = {}",
            sol.lambda(),
            pt.lambda
        )));
    }
    capacitance_exact_on(sol, pt.r)
}

/// Numerator recomputed as `\int_r^1 rho / lambda` by graded quadrature; an
/// independent route for cross-checking [`capacitance_exact`].
pub fn numerator_by_quadrature(
    sol: &SingleSpeciesSolution,
    r: f64,
    rel_tol: f64,
) -> Result<f64> {
    let lambda = sol.lambda();
    numerics::integrate_graded(
        |x| sol.rho_unchecked(x) / lambda,
        r,
        1.0,
        1.0 / lambda.max(1.0),
        rel_tol,
    )
}

/// Asymptotic expansion of the capacitance per regime:
///
/// - `alpha > 1`: `1/2 - p/(8 lambda^{alpha-1}) chi_1 + pi^2/(2 lambda^2) chi_2`
///   with `chi_1 = 1` iff `1 < alpha <= 3` and `chi_2 = 1` iff `alpha >= 3`;
/// - `alpha = 1`: `g(p) (1 + H / lambda^2)` with the printed constant `H`;
/// - `alpha < 1`: `1 / log lambda^{2 - 2 alpha}`.
#[must_use]
pub fn capacitance_asymptotic(lambda: f64, p: f64, alpha: f64) -> f64 {
    assert!(lambda > 0.0 && p > 0.0 && alpha > 0.0);
    if alpha > 1.0 {
        let chi1 = if alpha <= 3.0 { 1.0 } else { 0.0 };
        let chi2 = if alpha >= 3.0 { 1.0 } else { 0.0 };
        0.5 - chi1 * p / (8.0 * lambda.powf(alpha - 1.0))
            + chi2 * PI * PI / (2.0 * lambda * lambda)
    } else if alpha == 1.0 {
        let log_term = (p / 2.0).ln_1p();
        let h = PI * PI * (p * p + 6.0 * p + 12.0) / (6.0 * (p + 2.0))
            + p * p * PI * PI * (p + 6.0) / (24.0 * (p + 2.0) * log_term);
        g_prefactor(p) * (1.0 + h / (lambda * lambda))
    } else {
        1.0 / ((2.0 - 2.0 * alpha) * lambda.ln())
    }
}

/// The `lambda -> infinity` limit of the capacitance by regime.
#[must_use]
pub fn capacitance_limit(p: f64, alpha: f64) -> f64 {
    if alpha > 1.0 {
        0.5
    } else if alpha == 1.0 {
        g_prefactor(p)
    } else {
        0.0
    }
}

/// Evaluate exact and asymptotic capacitances across a `lambda` grid.
pub fn capacitance_sweep(p: f64, alpha: f64, lambdas: &[f64]) -> Vec<Result<CapacitanceResult>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let sol = SingleSpeciesSolution::solve(lambda)?;
            let pt = NearFieldPoint::new(p, alpha, lambda)?;
            Ok(CapacitanceResult {
                lambda,
                p,
                alpha,
                exact: capacitance_exact(&sol, &pt)?,
                asymptotic: capacitance_asymptotic(lambda, p, alpha),
                limit: capacitance_limit(p, alpha),
            })
        })
        .collect()
}

/// CSV rendering: `lambda,p,alpha,exact,asymptotic,limit`.
#[must_use]
pub fn capacitance_csv(rows: &[CapacitanceResult]) -> String {
    let mut s = String::from("lambda,p,alpha,exact,asymptotic,limit\n");
    for row in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            numerics::fmt_g17(row.lambda),
            numerics::fmt_g17(row.p),
            numerics::fmt_g17(row.alpha),
            numerics::fmt_g17(row.exact),
            numerics::fmt_g17(row.asymptotic),
            numerics::fmt_g17(row.limit),
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(lambda: f64) -> SingleSpeciesSolution {
        SingleSpeciesSolution::solve(lambda).unwrap()
    }

    #[test]
    fn thick_layer_reaches_one_half() {
        let s = sol(1e4);
        let pt = NearFieldPoint::new(1.0, 2.0, 1e4).unwrap();
        let c = capacitance_exact(&s, &pt).unwrap();
        assert!((c - 0.5).abs() < 1e-3, "C = {c}");
        // Frozen digits; the slack covers the conditioning of tan near the
        // phase pi/2, which limits u'(r) to ~1e-12 relative here.
        assert!((c - 0.499_987_549_849_098_67).abs() < 1e-7, "C = {c:.15}");
    }

    #[test]
    fn alpha_one_matches_prefactor() {
        let s = sol(1e4);
        let pt = NearFieldPoint::new(2.0, 1.0, 1e4).unwrap();
        let c = capacitance_exact(&s, &pt).unwrap();
        let g2 = 1.0 / (4.0 * 2f64.ln());
        assert!((c - g2).abs() < 1e-3, "C = {c}, g(2) = {g2}");
        assert!((g_prefactor(2.0) - g2).abs() < 1e-15);
    }

    #[test]
    fn thin_layer_log_decay() {
        let s = sol(1e4);
        let pt = NearFieldPoint::new(1.0, 0.5, 1e4).unwrap();
        let c = capacitance_exact(&s, &pt).unwrap();
        let lam: f64 = 1e4;
        let reference = 1.0 / lam.ln();
        assert!(
            (c / reference - 1.0).abs() < 0.15,
            "C = {c}, 1/log lambda = {reference}"
        );
        assert!((c - 0.124_675_478_737_061_96).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_cases() {
        // alpha = 3 activates both correction terms.
        let lam: f64 = 1e3;
        let a3 = capacitance_asymptotic(lam, 1.0, 3.0);
        let expect = 0.5 - 1.0 / (8.0 * lam * lam) + PI * PI / (2.0 * lam * lam);
        assert!((a3 - expect).abs() < 1e-15);
        // Above 3 only the pi^2 term survives; between 1 and 3 only -p/8.
        assert!(
            (capacitance_asymptotic(lam, 1.0, 4.0) - (0.5 + PI * PI / (2.0 * lam * lam))).abs()
                < 1e-15
        );
        assert!(
            (capacitance_asymptotic(lam, 1.0, 2.0) - (0.5 - 1.0 / (8.0 * lam))).abs() < 1e-15
        );
    }

    #[test]
    fn exact_tracks_asymptotic_sign_where_correction_dominates() {
        for &(p, alpha, lambda) in &[
            (1.0, 1.5, 1e3),
            (1.0, 1.5, 1e4),
            (1.0, 2.0, 1e3),
            (1.0, 2.0, 1e4),
            (1.0, 3.0, 1e3),
            (1.0, 4.0, 1e3),
        ] {
            let s = sol(lambda);
            let pt = NearFieldPoint::new(p, alpha, lambda).unwrap();
            let gap = capacitance_exact(&s, &pt).unwrap() - 0.5;
            let pred = capacitance_asymptotic(lambda, p, alpha) - 0.5;
            assert!(
                gap.signum() == pred.signum(),
                "alpha={alpha}, lambda={lambda}: gap={gap:e}, predicted={pred:e}"
            );
            assert!(gap.abs() < 0.01, "stays near 1/2");
        }
    }

    #[test]
    fn gap_decays_at_first_order_rate() {
        // |exact - 1/2| ~ p/(8 lambda) for alpha = 2.
        let mut scaled = Vec::new();
        for &lambda in &[1e2, 1e3, 1e4] {
            let s = sol(lambda);
            let pt = NearFieldPoint::new(1.0, 2.0, lambda).unwrap();
            let c = capacitance_exact(&s, &pt).unwrap();
            scaled.push((0.5 - c) * 8.0 * lambda);
        }
        assert!(scaled[0] < scaled[1] && scaled[1] < scaled[2]);
        assert!((scaled[2] - 1.0).abs() < 0.01, "scaled gap {:?}", scaled);
    }

    #[test]
    fn prefactor_is_decreasing_from_one_half() {
        // g decreases from its p -> 0+ limit 1/2 toward zero; in particular
        // sup g < 1/2 on any p-grid.
        let mut prev = 0.5;
        let mut p = 1e-3;
        while p <= 100.0 {
            let g = g_prefactor(p);
            assert!(g < prev, "g({p}) = {g} not below {prev}");
            assert!(g < 0.5);
            prev = g;
            p *= 1.5;
        }
        assert!((g_prefactor(1e-9) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn numerator_quadrature_agrees_with_endpoints() {
        for (lambda, p, alpha) in [(1e4, 1.0, 2.0), (1e4, 1.0, 0.5), (1e6, 2.0, 1.0)] {
            let s = sol(lambda);
            let pt = NearFieldPoint::new(p, alpha, lambda).unwrap();
            let analytic = (s.eval_du(pt.r).unwrap() + lambda) / lambda;
            let quad = numerator_by_quadrature(&s, pt.r, 1e-10).unwrap();
            assert!(
                ((quad - analytic) / analytic).abs() <= 1e-8,
                "lambda={lambda}, alpha={alpha}: quad={quad}, analytic={analytic}"
            );
        }
    }

    #[test]
    fn fixed_interval_tends_to_zero_like_inverse_log() {
        let mut prev_c = f64::INFINITY;
        let mut prev_scaled = f64::INFINITY;
        for &lambda in &[1e3, 1e4, 1e5, 1e6] {
            let s = sol(lambda);
            let c = capacitance_exact_on(&s, 0.5).unwrap();
            let scaled = c * 2.0 * lambda.ln();
            assert!(c < prev_c, "capacitance should shrink, got {c}");
            assert!(
                scaled < prev_scaled && scaled > 1.0,
                "scaled = {scaled}"
            );
            prev_c = c;
            prev_scaled = scaled;
        }
        assert!((prev_scaled - 1.121_002_191_936_271_6).abs() < 1e-6);
    }

    #[test]
    fn sweep_and_csv() {
        let rows: Vec<CapacitanceResult> = capacitance_sweep(1.0, 0.5, &[1e3, 1e4, 1e5])
            .into_iter()
            .map(|r| r.unwrap())
            .collect();
        // exact * log lambda^{2-2 alpha} -> 1 from above.
        let mut prev = f64::INFINITY;
        for row in &rows {
            let scaled = row.exact * (2.0 - 2.0 * row.alpha) * row.lambda.ln();
            assert!(scaled > 1.0 && scaled < prev, "scaled = {scaled}");
            prev = scaled;
        }
        let csv = capacitance_csv(&rows);
        assert!(csv.starts_with("lambda,p,alpha,exact,asymptotic,limit\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn degenerate_interval_rejected() {
        let s = sol(1e4);
        assert!(matches!(
            capacitance_exact_on(&s, 1.0 - 1e-16),
            Err(Error::DegenerateInterval(_))
        ));
        assert!(matches!(
            capacitance_exact_on(&s, 0.0),
            Err(Error::Domain { .. })
        ));
        let pt_wrong = NearFieldPoint::new(1.0, 2.0, 1e5).unwrap();
        assert!(matches!(
            capacitance_exact(&s, &pt_wrong),
            Err(Error::InvalidParams(_))
        ));
    }
}
