//! Closed-form single-species solution and its exact identities.
//!
//! With the eigenvalue `J` solved, the potential, its slope, and the net
//! charge density are
//!
//! ```text
//! u(r)   = 2 log cos(k r),        k = sqrt(J/2) in (0, pi/2),
//! u'(r)  = -2 k tan(k r),
//! rho(r) = J sec^2(k r) = -u''(r),
//! ```
//!
//! all finite on `[0, 1]` because `k < pi/2` keeps `cos(k r)` positive.  The
//! module also exposes the identities used to cross-check any numerical
//! route against the closed form: the first integral
//! `u'^2/2 = J (e^{-u} - 1)`, the boundary value
//! `u(1) = -log(1 + lambda I / 2)`, and the total charge
//! `\int_0^1 rho = -u'(1) = lambda`.

use crate::eigenvalue::{self, Eigenvalue};
use crate::error::{Error, Result};
use crate::numerics;

/// Immutable closed-form solution for one value of `lambda`.
#[derive(Debug, Clone, Copy)]
pub struct SingleSpeciesSolution {
    eig: Eigenvalue,
    /// Cached phase rate `sqrt(J/2)`.
    k: f64,
}

impl SingleSpeciesSolution {
    /// Solve the eigenvalue at the default tolerance and build the solution.
    pub fn solve(lambda: f64) -> Result<Self> {
        Ok(Self::from_eigenvalue(eigenvalue::solve_j_default(lambda)?))
    }

    /// Solve the eigenvalue at a caller-chosen tolerance.
    pub fn solve_with_tol(lambda: f64, tol: f64) -> Result<Self> {
        Ok(Self::from_eigenvalue(eigenvalue::solve_j(lambda, tol)?))
    }

    /// Wrap an already-solved eigenvalue.
    #[must_use]
    pub fn from_eigenvalue(eig: Eigenvalue) -> Self {
        Self {
            eig,
            k: eig.phase_rate(),
        }
    }

    #[must_use]
    pub fn lambda(&self) -> f64 {
        self.eig.lambda
    }

    #[must_use]
    pub fn eigenvalue(&self) -> &Eigenvalue {
        &self.eig
    }

    /// Phase rate `k = sqrt(J/2)`.
    #[must_use]
    pub fn phase_rate(&self) -> f64 {
        self.k
    }

    fn check_domain(r: f64) -> Result<()> {
        if (0.0..=1.0).contains(&r) {
            Ok(())
        } else {
            Err(Error::Domain {
                value: r,
                expected: "[0, 1]",
            })
        }
    }

    #[inline]
    pub(crate) fn u_unchecked(&self, r: f64) -> f64 {
        2.0 * (self.k * r).cos().ln()
    }

    #[inline]
    pub(crate) fn du_unchecked(&self, r: f64) -> f64 {
        -2.0 * self.k * (self.k * r).tan()
    }

    #[inline]
    pub(crate) fn rho_unchecked(&self, r: f64) -> f64 {
        let c = (self.k * r).cos();
        self.eig.j / (c * c)
    }

    /// Potential `u(r) = 2 log cos(k r)`; zero at `r = 0`, negative inside.
    pub fn eval_u(&self, r: f64) -> Result<f64> {
        Self::check_domain(r)?;
        Ok(self.u_unchecked(r))
    }

    /// Slope `u'(r) = -2 k tan(k r)`; zero at `r = 0`, `-lambda` at `r = 1`.
    pub fn eval_du(&self, r: f64) -> Result<f64> {
        Self::check_domain(r)?;
        Ok(self.du_unchecked(r))
    }

    /// Net charge density `rho(r) = J sec^2(k r) > 0`, equal to `-u''`.
    pub fn eval_rho(&self, r: f64) -> Result<f64> {
        Self::check_domain(r)?;
        Ok(self.rho_unchecked(r))
    }

    /// First-integral defect `u'^2/2 - J (e^{-u} - 1)`, identically zero in
    /// exact arithmetic; measures accumulated floating-point error only.
    pub fn first_integral_defect(&self, r: f64) -> Result<f64> {
        let du = self.eval_du(r)?;
        let u = self.u_unchecked(r);
        Ok(0.5 * du * du - self.eig.j * ((-u).exp() - 1.0))
    }

    /// Boundary value by the independent route `u(1) = -log(1 + lambda I/2)`.
    #[must_use]
    pub fn boundary_value_u1(&self) -> f64 {
        -(0.5 * self.eig.lambda * self.eig.i).ln_1p()
    }

    /// `I = \int_0^1 e^{-u}` recomputed by graded-mesh quadrature, as an
    /// independent check of the stored `lambda / J`.
    pub fn quadrature_i(&self, rel_tol: f64) -> Result<f64> {
        numerics::integrate_graded(
            |r| (-self.u_unchecked(r)).exp(),
            0.0,
            1.0,
            1.0 / self.eig.lambda.max(1.0),
            rel_tol,
        )
    }
}

/// A boundary-approaching evaluation point `r = 1 - p / lambda^alpha`.
#[derive(Debug, Clone, Copy)]
pub struct NearFieldPoint {
    pub p: f64,
    pub alpha: f64,
    pub lambda: f64,
    /// The evaluation point itself, in `(0, 1)`.
    pub r: f64,
}

impl NearFieldPoint {
    /// Build the point; requires `p < lambda^alpha` so that `r > 0`.
    pub fn new(p: f64, alpha: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveLambda(lambda));
        }
        if !(p > 0.0 && alpha > 0.0) {
            return Err(Error::InvalidParams(format!(
                "p and alpha must be positive, got p={p}, alpha={alpha}"
            )));
        }
        let r = 1.0 - p * lambda.powf(-alpha);
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain {
                value: r,
                expected: "(0, 1); p must stay below lambda^alpha",
            });
        }
        Ok(Self { p, alpha, lambda, r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sol(lambda: f64) -> SingleSpeciesSolution {
        SingleSpeciesSolution::solve(lambda).unwrap()
    }

    #[test]
    fn normalization_at_zero() {
        for &lambda in &[1e-4, 1.0, 1e4, 1e8] {
            let s = sol(lambda);
            assert_eq!(s.eval_u(0.0).unwrap(), 0.0);
            assert_eq!(s.eval_du(0.0).unwrap(), 0.0);
            // rho(0) = J: sec(0) = 1.
            assert_eq!(s.eval_rho(0.0).unwrap(), s.eigenvalue().j);
        }
    }

    #[test]
    fn frozen_values_at_lambda_1e4() {
        let s = sol(1e4);
        let u1 = s.eval_u(1.0).unwrap();
        assert!(
            (u1 - (-16.131621030902319)).abs() < 1e-10,
            "u(1) = {u1:.15}"
        );
        // u(1) tracks -2 log lambda + 2 log pi - 4/lambda.
        let lam: f64 = 1e4;
        let formula = -2.0 * lam.ln() + 2.0 * std::f64::consts::PI.ln() - 4.0 / lam;
        assert!((u1 - formula).abs() < 5e-2, "u(1)={u1}, formula={formula}");
        assert!((u1 - formula).abs() < 1e-6, "third-order term is accurate");

        let u_half = s.eval_u(0.5).unwrap();
        assert!(
            (u_half - (-0.69283313344732438)).abs() < 1e-12,
            "u(0.5) = {u_half:.15}"
        );
        // Within 1e-3 of the limit profile value -log 2; the first-order
        // correction pi r sin(pi r) sec^2(pi r /2) / lambda is ~6.3e-4.
        assert!((u_half + std::f64::consts::LN_2).abs() < 1e-3);

        let du_half = s.eval_du(0.5).unwrap();
        assert!(
            (du_half - (-3.1399780498823564)).abs() < 1e-12,
            "u'(0.5) = {du_half:.15}"
        );
        assert!((du_half + std::f64::consts::PI).abs() < 1e-2);
    }

    #[test]
    fn flux_identity_at_boundary() {
        // u'(1) = -lambda, to the accuracy of the eigenvalue residual.
        for &lambda in &[1.0, 1e2, 1e4, 1e6] {
            let s = sol(lambda);
            let du1 = s.eval_du(1.0).unwrap();
            assert!(
                (du1 + lambda).abs() <= 1e-9 * lambda.max(1.0),
                "lambda={lambda}: u'(1)={du1}"
            );
        }
    }

    #[test]
    fn charge_density_boundary_identity() {
        // rho(1) = J e^{-u(1)} = J (1 + lambda I / 2) = J + lambda^2/2.
        let s = sol(1e4);
        let rho1 = s.eval_rho(1.0).unwrap();
        let eig = s.eigenvalue();
        let identity = eig.j + eig.lambda * eig.lambda / 2.0;
        assert!(
            ((rho1 - identity) / identity).abs() < 1e-12,
            "rho(1)={rho1}, identity={identity}"
        );
        assert!((rho1 - 50_000_004.932828872).abs() < 1.0);
        // sec^2(k) sits at the lambda^2/pi^2 scale, within 10% of 1e7 here.
        let sec2 = rho1 / eig.j;
        let scale = eig.lambda * eig.lambda / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((sec2 / scale - 1.0).abs() < 0.1, "sec2={sec2}, scale={scale}");
    }

    #[test]
    fn total_charge_equals_lambda() {
        // \int_0^1 rho = u'(0) - u'(1) = lambda.
        for &lambda in &[1e2, 1e4] {
            let s = sol(lambda);
            let total = s.eval_du(0.0).unwrap() - s.eval_du(1.0).unwrap();
            assert!(
                ((total - lambda) / lambda).abs() < 1e-9,
                "lambda={lambda}: total={total}"
            );
        }
    }

    #[test]
    fn boundary_value_two_routes_agree() {
        let s = sol(1e4);
        let direct = s.eval_u(1.0).unwrap();
        let via_integral = s.boundary_value_u1();
        assert!(
            (direct - via_integral).abs() <= 1e-9,
            "direct={direct:.15}, integral route={via_integral:.15}"
        );
        // Small-lambda limit: I -> 1 and log(1 + lambda/2) -> 0.
        let tiny = sol(1e-6);
        assert!(tiny.boundary_value_u1().abs() < 1e-6);
        // lambda = 1e2 matches the boundary expansion with the -4/lambda term.
        let s2 = sol(1e2);
        let lam: f64 = 1e2;
        let formula = -2.0 * lam.ln() + 2.0 * std::f64::consts::PI.ln() - 0.04;
        assert!(
            (s2.boundary_value_u1() - formula).abs() < 3e-3,
            "u1={}, formula={formula}",
            s2.boundary_value_u1()
        );
    }

    #[test]
    fn first_integral_defect_is_roundoff() {
        let s = sol(1e2);
        let d = s.first_integral_defect(0.7).unwrap();
        assert!(d.abs() <= 1e-10 * 1e4, "defect={d:e}");
        assert_eq!(s.first_integral_defect(0.0).unwrap(), 0.0);
        for &lambda in &[1e-3, 1.0, 1e4, 1e6] {
            let s = sol(lambda);
            for i in 0..=20 {
                let r = i as f64 / 20.0;
                let d = s.first_integral_defect(r).unwrap();
                assert!(
                    d.abs() <= 1e-10 * (1.0 + lambda * lambda),
                    "lambda={lambda}, r={r}: defect={d:e}"
                );
            }
        }
    }

    #[test]
    fn quadrature_reproduces_i() {
        for &lambda in &[1e2, 1e4, 1e6] {
            let s = sol(lambda);
            let i_quad = s.quadrature_i(1e-9).unwrap();
            let i_exact = s.eigenvalue().i;
            assert!(
                ((i_quad - i_exact) / i_exact).abs() <= 1e-8,
                "lambda={lambda}: quad={i_quad}, exact={i_exact}"
            );
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let s = sol(1e4);
        // Away from the layer.
        for &r in &[0.1, 0.4, 0.7] {
            let h = 1e-6;
            let fd = (s.eval_u(r + h).unwrap() - s.eval_u(r - h).unwrap()) / (2.0 * h);
            let du = s.eval_du(r).unwrap();
            assert!(
                ((fd - du) / du).abs() <= 1e-6,
                "r={r}: fd={fd}, du={du}"
            );
        }
        // Inside the layer |u'| ~ lambda; shrink the step accordingly.
        let r = 1.0 - 1.0 / 1e4;
        let h = 1e-6 / 1e4;
        let fd = (s.eval_u(r + h).unwrap() - s.eval_u(r - h).unwrap()) / (2.0 * h);
        let du = s.eval_du(r).unwrap();
        assert!(((fd - du) / du).abs() <= 1e-6, "layer: fd={fd}, du={du}");
    }

    #[test]
    fn domain_errors() {
        let s = sol(1.0);
        assert!(matches!(s.eval_u(-0.1), Err(Error::Domain { .. })));
        assert!(matches!(s.eval_du(1.5), Err(Error::Domain { .. })));
        assert!(matches!(s.eval_rho(2.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn near_field_point_construction() {
        let pt = NearFieldPoint::new(1.0, 2.0, 1e4).unwrap();
        assert!((pt.r - (1.0 - 1e-8)).abs() < 1e-18);
        // p >= lambda^alpha pushes r out of (0, 1).
        assert!(NearFieldPoint::new(10.0, 0.5, 16.0).is_err());
        assert!(NearFieldPoint::new(-1.0, 1.0, 10.0).is_err());
        assert!(NearFieldPoint::new(1.0, 0.0, 10.0).is_err());
        // r -> 1 as lambda grows for fixed (p, alpha).
        let r1 = NearFieldPoint::new(2.0, 1.0, 1e3).unwrap().r;
        let r2 = NearFieldPoint::new(2.0, 1.0, 1e6).unwrap().r;
        assert!(r2 > r1 && r2 < 1.0);
    }

    proptest! {
        #[test]
        fn monotone_decreasing_and_concave(exp in -2.0f64..6.0) {
            let lambda = 10f64.powf(exp);
            let s = sol(lambda);
            let mut prev_u = f64::INFINITY;
            let mut prev_du = f64::INFINITY;
            let mut prev_rho = 0.0f64;
            for i in 0..=64 {
                let r = i as f64 / 64.0;
                let u = s.eval_u(r).unwrap();
                let du = s.eval_du(r).unwrap();
                let rho = s.eval_rho(r).unwrap();
                if i > 0 {
                    prop_assert!(u < prev_u, "u not decreasing at r={r}");
                    prop_assert!(du < prev_du, "u' not decreasing at r={r}");
                    prop_assert!(rho > prev_rho, "rho not increasing at r={r}");
                }
                prop_assert!(rho > 0.0);
                prev_u = u;
                prev_du = du;
                prev_rho = rho;
            }
        }
    }
}
