//! Aggregated verification: per-module invariant suites plus the acceptance
//! checks, shared by the CLI `verify` subcommand and the integration tests.
//!
//! Every check is self-contained and reports pass/fail with a numeric
//! detail string; errors raised while computing a check fail that check
//! rather than aborting the run.

use crate::asymptotics::{self, LimitProfile};
use crate::capacitance;
use crate::ccpb::{self, CcpbParams};
use crate::concentration::{self, TestFunction};
use crate::eigenvalue::{self, J_SUPREMUM};
use crate::exact::{NearFieldPoint, SingleSpeciesSolution};
use crate::numerics;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from_result(suite: &str, name: &str, result: crate::Result<(bool, String)>) -> Self {
        let (passed, detail) = match result {
            Ok(pair) => pair,
            Err(e) => (false, format!("error: {e}")),
        };
        Check {
            suite: suite.to_string(),
            name: name.to_string(),
            passed,
            detail,
        }
    }

    /// One status line, the format the CLI prints.
    #[must_use]
    pub fn render(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("[{tag}] {}/{}: {}", self.suite, self.name, self.detail)
    }
}

fn check(suite: &str, name: &str, f: impl FnOnce() -> crate::Result<(bool, String)>) -> Check {
    Check::from_result(suite, name, f())
}

// ---------------------------------------------------------------------------
// module invariant suites
// ---------------------------------------------------------------------------

pub fn eigenvalue_suite() -> Vec<Check> {
    let suite = "eigenvalue";
    let mut checks = Vec::new();

    checks.push(check(suite, "unique sign change across bracket", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB15EC7);
        for _ in 0..1000 {
            let lambda = 10f64.powf(rng.gen_range(-3.0..6.0));
            let mut changes = 0;
            let mut prev = eigenvalue::eigenvalue_defect(lambda, J_SUPREMUM * 1e-8)?;
            for i in 1..=500 {
                let j = J_SUPREMUM * (1e-8 + (1.0 - 2e-8) * i as f64 / 500.0);
                let cur = eigenvalue::eigenvalue_defect(lambda, j)?;
                if prev.signum() != cur.signum() {
                    changes += 1;
                }
                prev = cur;
            }
            if changes != 1 {
                return Ok((false, format!("lambda={lambda}: {changes} sign changes")));
            }
        }
        Ok((true, "1000 random lambda, exactly one sign change each".into()))
    }));

    checks.push(check(suite, "monotone in lambda", || {
        let grid = numerics::geometric_grid(1e-3, 1e6, 40);
        let mut prev = 0.0;
        for &lambda in &grid {
            let j = eigenvalue::solve_j_default(lambda)?.j;
            if j <= prev {
                return Ok((false, format!("not increasing at lambda={lambda}")));
            }
            prev = j;
        }
        Ok((true, format!("strictly increasing over {} points", grid.len())))
    }));

    checks.push(check(suite, "gap to pi^2/2 shrinks", || {
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let gap = J_SUPREMUM - eigenvalue::solve_j_default(10f64.powi(k))?.j;
            if !(gap > 0.0 && gap < prev) {
                return Ok((false, format!("gap {gap} at lambda=1e{k}")));
            }
            prev = gap;
        }
        Ok((true, format!("final gap {prev:.3e} at lambda=1e6")))
    }));

    checks.push(check(suite, "i*j = lambda redundancy", || {
        let mut worst = 0.0f64;
        for &lambda in &numerics::geometric_grid(1e-3, 1e6, 40) {
            worst = worst.max(eigenvalue::solve_j_default(lambda)?.redundancy_defect());
        }
        Ok((
            worst <= 2.0 * f64::EPSILON,
            format!("worst relative defect {worst:.3e}"),
        ))
    }));

    checks
}

pub fn exact_suite() -> Vec<Check> {
    let suite = "exact";
    let mut checks = Vec::new();

    checks.push(check(suite, "u decreasing, u' decreasing, rho increasing", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xE8AC7);
        for _ in 0..50 {
            let lambda = 10f64.powf(rng.gen_range(-2.0..6.0));
            let sol = SingleSpeciesSolution::solve(lambda)?;
            let (mut pu, mut pdu, mut prho) = (f64::INFINITY, f64::INFINITY, 0.0);
            for i in 0..=100 {
                let r = i as f64 / 100.0;
                let (u, du, rho) = (sol.eval_u(r)?, sol.eval_du(r)?, sol.eval_rho(r)?);
                if i > 0 && !(u < pu && du < pdu && rho > prho) {
                    return Ok((false, format!("monotonicity broken at lambda={lambda}, r={r}")));
                }
                (pu, pdu, prho) = (u, du, rho);
            }
        }
        Ok((true, "50 random lambda, 101-point grids".into()))
    }));

    checks.push(check(suite, "derivative matches finite differences", || {
        let sol = SingleSpeciesSolution::solve(1e4)?;
        let mut worst = 0.0f64;
        for &r in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let h = 1e-6;
            let fd = (sol.eval_u(r + h)? - sol.eval_u(r - h)?) / (2.0 * h);
            worst = worst.max(((fd - sol.eval_du(r)?) / sol.eval_du(r)?).abs());
        }
        let r = 1.0 - 1e-4;
        let h = 1e-6 / 1e4;
        let fd = (sol.eval_u(r + h)? - sol.eval_u(r - h)?) / (2.0 * h);
        worst = worst.max(((fd - sol.eval_du(r)?) / sol.eval_du(r)?).abs());
        Ok((worst <= 1e-6, format!("worst relative error {worst:.3e}")))
    }));

    checks.push(check(suite, "quadrature reproduces I", || {
        let mut worst = 0.0f64;
        for &lambda in &[1e2, 1e4, 1e6] {
            let sol = SingleSpeciesSolution::solve(lambda)?;
            let i_quad = sol.quadrature_i(1e-9)?;
            worst = worst.max(((i_quad - sol.eigenvalue().i) / sol.eigenvalue().i).abs());
        }
        Ok((worst <= 1e-8, format!("worst relative error {worst:.3e}")))
    }));

    checks.push(check(suite, "first integral defect bounded", || {
        let mut worst_ratio = 0.0f64;
        for &lambda in &[1e-3, 1.0, 1e2, 1e4, 1e6] {
            let sol = SingleSpeciesSolution::solve(lambda)?;
            for i in 0..=50 {
                let r = i as f64 / 50.0;
                let d = sol.first_integral_defect(r)?.abs();
                worst_ratio = worst_ratio.max(d / (1e-10 * (1.0 + lambda * lambda)));
            }
        }
        Ok((
            worst_ratio <= 1.0,
            format!("worst defect at {worst_ratio:.3e} of the allowance"),
        ))
    }));

    checks.push(check(suite, "boundary value two routes", || {
        let sol = SingleSpeciesSolution::solve(1e4)?;
        let gap = (sol.eval_u(1.0)? - sol.boundary_value_u1()).abs();
        Ok((gap <= 1e-9, format!("|direct - integral route| = {gap:.3e}")))
    }));

    checks
}

pub fn asymptotics_suite() -> Vec<Check> {
    let suite = "asymptotics";
    let mut checks = Vec::new();

    checks.push(check(suite, "eigenvalue residual matches printed lambda^-3 term", || {
        let coefficient = -PI * PI * (48.0 - 2.0 * PI * PI) / 3.0;
        let lambda = 1e4;
        let exact = eigenvalue::solve_j_default(lambda)?.j;
        let normalized = (exact - asymptotics::j_expansion(lambda, 3)?) * lambda.powi(3);
        let rel = (normalized / coefficient - 1.0).abs();
        Ok((rel <= 0.01, format!("normalized residual {normalized:.4}, printed {coefficient:.4}")))
    }));

    checks.push(check(suite, "integral residual approaches 8/pi^2", || {
        let limit = 8.0 / (PI * PI);
        let lambda = 1e6;
        let i_exact = eigenvalue::solve_j_default(lambda)?.i;
        let scaled = lambda * (i_exact - asymptotics::i_expansion(lambda, 2)?);
        Ok(((scaled - limit).abs() <= 1e-4, format!("scaled {scaled:.8} vs {limit:.8}")))
    }));

    checks.push(check(suite, "squeeze bounds with eps = 0.5", || {
        for &lambda in &[1e3, 1e4, 1e5, 1e6] {
            let j = eigenvalue::solve_j_default(lambda)?.j;
            let upper = asymptotics::j_expansion(lambda, 3)?;
            let lower = PI * PI * (0.5 - 2.0 / lambda + 5.5 / (lambda * lambda));
            if !(lower < j && j < upper) {
                return Ok((false, format!("violated at lambda={lambda}")));
            }
        }
        Ok((true, "holds for lambda in {1e3..1e6}".into()))
    }));

    checks.push(check(suite, "leading log coefficient continuous at alpha = 1", || {
        let lambda = 1e6;
        let a = asymptotics::near_field_u(&NearFieldPoint::new(1.0, 1.0 + 1e-9, lambda)?, 1)?.0;
        let b = asymptotics::near_field_u(&NearFieldPoint::new(1.0, 1.0, lambda)?, 1)?.0;
        let rel = ((a - b) / b).abs();
        Ok((rel <= 1e-8, format!("relative jump {rel:.3e}")))
    }));

    checks.push(check(suite, "order-1 far field is the limit profile", || {
        for i in 0..=18 {
            let r = i as f64 / 20.0;
            let (u, du) = asymptotics::far_field_u(r, 1234.5, 1)?;
            if u != LimitProfile::u(r) || du != LimitProfile::du(r) {
                return Ok((false, format!("mismatch at r={r}")));
            }
        }
        Ok((true, "bitwise equal on 19 sample points".into()))
    }));

    checks.push(check(suite, "near-field rho converges to its leading order", || {
        for (p, alpha) in [(1.0, 2.0), (2.0, 1.0), (1.0, 0.5)] {
            let mut prev = f64::INFINITY;
            for &lambda in &[1e3, 1e4, 1e5, 1e6] {
                let sol = SingleSpeciesSolution::solve(lambda)?;
                let pt = NearFieldPoint::new(p, alpha, lambda)?;
                let rel = (sol.eval_rho(pt.r)? / asymptotics::near_field_rho(&pt) - 1.0).abs();
                if rel >= prev {
                    return Ok((false, format!("not improving at alpha={alpha}, lambda={lambda}")));
                }
                prev = rel;
            }
        }
        Ok((true, "relative error decreasing for three regimes".into()))
    }));

    checks
}

pub fn ccpb_suite() -> Vec<Check> {
    let suite = "ccpb";
    let mut checks = Vec::new();

    checks.push(check(suite, "mu = 0 reproduces the closed form", || {
        let mut worst = 0.0f64;
        for &lambda in &[10.0, 1e2, 1e3] {
            let mut params = CcpbParams::new(lambda, 0.0);
            params.grid_size = 1000;
            let sol = ccpb::solve_ccpb(&params)?;
            let exact = SingleSpeciesSolution::solve(lambda)?;
            for (i, &r) in sol.nodes.iter().enumerate() {
                worst = worst.max((sol.v[i] - exact.eval_u(r)?).abs());
            }
            let b_rel = ((sol.b - exact.eigenvalue().i) / exact.eigenvalue().i).abs();
            if b_rel > 1e-6 {
                return Ok((false, format!("B off by {b_rel:.3e} at lambda={lambda}")));
            }
        }
        Ok((worst <= 1e-6, format!("sup-node |v - u| = {worst:.3e}")))
    }));

    checks.push(check(suite, "first integral and structure", || {
        for (lambda, mu) in [(1e2, 1.0), (1e3, 10.0), (1e3, 0.0)] {
            let mut params = CcpbParams::new(lambda, mu);
            params.grid_size = 800;
            ccpb::solve_ccpb(&params)?.validate()?;
        }
        Ok((true, "validate() clean for three parameter pairs".into()))
    }));

    checks.push(check(suite, "boundary slope identity", || {
        let mut worst = 0.0f64;
        for (lambda, mu) in [(1e2, 1.0), (1e3, 5.0)] {
            let mut params = CcpbParams::new(lambda, mu);
            params.grid_size = 800;
            let sol = ccpb::solve_ccpb(&params)?;
            worst = worst
                .max((sol.dv[sol.dv.len() - 1] - (mu - lambda)).abs() / (1e-6 * lambda));
        }
        Ok((worst <= 1.0, format!("worst defect at {worst:.3e} of 1e-6 lambda")))
    }));

    checks.push(check(suite, "inverse Hoelder sandwich", || {
        for (lambda, mu) in [(1e2, 1.0), (1e2, 50.0), (1e3, 100.0)] {
            let mut params = CcpbParams::new(lambda, mu);
            params.grid_size = 600;
            let sol = ccpb::solve_ccpb(&params)?;
            let ab = sol.a * sol.b;
            if !(ab >= 1.0 - 1e-9 && ab <= lambda / mu * (1.0 + 1e-9)) {
                return Ok((false, format!("A*B = {ab} outside [1, {}]", lambda / mu)));
            }
        }
        Ok((true, "1 <= A*B <= lambda/mu on three pairs".into()))
    }));

    checks.push(check(suite, "eigenvalue squeeze", || {
        for (lambda, mu) in [(1e2, 1.0), (1e3, 10.0)] {
            let mut params = CcpbParams::new(lambda, mu);
            params.grid_size = 800;
            let sol = ccpb::solve_ccpb(&params)?;
            let prof = ccpb::w_profile(&sol)?;
            let j = eigenvalue::solve_j_default(lambda)?.j;
            let lam_over_b = lambda / sol.b;
            let hi = j * prof.w.last().unwrap().exp();
            if !(j * (1.0 - 1e-9) < lam_over_b && lam_over_b < hi * (1.0 + 1e-9)) {
                return Ok((false, format!("lambda/B = {lam_over_b} outside ({j}, {hi})")));
            }
        }
        Ok((true, "J < lambda/B < J e^{w(1)} on two pairs".into()))
    }));

    checks.push(check(suite, "mesh refinement self-consistency", || {
        let mut coarse = CcpbParams::new(1e2, 1.0);
        coarse.grid_size = 500;
        let mut fine = coarse.clone();
        fine.grid_size = 1000;
        let sc = ccpb::solve_ccpb(&coarse)?;
        let sf = ccpb::solve_ccpb(&fine)?;
        let mut worst = 0.0f64;
        for (i, &vc) in sc.v.iter().enumerate() {
            worst = worst.max((vc - sf.v[2 * i]).abs());
        }
        Ok((
            worst <= 1000.0 * coarse.ode_tol,
            format!("sup change {worst:.3e}"),
        ))
    }));

    checks
}

pub fn capacitance_suite() -> Vec<Check> {
    let suite = "capacitance";
    let mut checks = Vec::new();

    checks.push(check(suite, "numerator quadrature agreement", || {
        let mut worst = 0.0f64;
        for (lambda, p, alpha) in [(1e4, 1.0, 2.0), (1e4, 1.0, 0.5), (1e6, 2.0, 1.0)] {
            let sol = SingleSpeciesSolution::solve(lambda)?;
            let pt = NearFieldPoint::new(p, alpha, lambda)?;
            let analytic = (sol.eval_du(pt.r)? + lambda) / lambda;
            let quad = capacitance::numerator_by_quadrature(&sol, pt.r, 1e-10)?;
            worst = worst.max(((quad - analytic) / analytic).abs());
        }
        Ok((worst <= 1e-8, format!("worst relative gap {worst:.3e}")))
    }));

    checks.push(check(suite, "approach to 1/2 with the predicted sign", || {
        // Test only where the printed correction dominates the next scale.
        for &(p, alpha, lambda) in &[
            (1.0, 1.5, 1e3),
            (1.0, 2.0, 1e3),
            (1.0, 2.0, 1e4),
            (1.0, 3.0, 1e3),
            (1.0, 4.0, 1e3),
        ] {
            let sol = SingleSpeciesSolution::solve(lambda)?;
            let pt = NearFieldPoint::new(p, alpha, lambda)?;
            let gap = capacitance::capacitance_exact(&sol, &pt)? - 0.5;
            let pred = capacitance::capacitance_asymptotic(lambda, p, alpha) - 0.5;
            if gap.signum() != pred.signum() || gap.abs() > 0.01 {
                return Ok((false, format!("alpha={alpha}, lambda={lambda}: gap {gap:.3e}")));
            }
        }
        Ok((true, "signed gaps follow the expansion".into()))
    }));

    checks.push(check(suite, "prefactor g decreasing below 1/2", || {
        let mut prev = 0.5;
        let mut p = 1e-3;
        while p <= 100.0 {
            let g = capacitance::g_prefactor(p);
            if !(g < prev && g < 0.5) {
                return Ok((false, format!("g({p}) = {g}")));
            }
            prev = g;
            p *= 1.3;
        }
        Ok((true, format!("g(100) = {prev:.6}")))
    }));

    checks
}

pub fn concentration_suite() -> Vec<Check> {
    let suite = "concentration";
    let mut checks = Vec::new();

    checks.push(check(suite, "charge - energy = (int h)/I", || {
        let mut worst = 0.0f64;
        for &lambda in &[1e2, 1e4] {
            let sol = SingleSpeciesSolution::solve(lambda)?;
            for h in TestFunction::CATALOG {
                let lhs = concentration::charge_functional(&sol, &h)?
                    - concentration::energy_functional(&sol, &h)?;
                worst = worst.max((lhs - h.integral() / sol.eigenvalue().i).abs());
            }
        }
        Ok((worst <= 1e-8, format!("worst identity defect {worst:.3e}")))
    }));

    checks.push(check(suite, "gaps shrink monotonically", || {
        for h in TestFunction::CATALOG {
            let mut prev = f64::INFINITY;
            for &lambda in &[1e2, 1e3, 1e4, 1e5] {
                let sol = SingleSpeciesSolution::solve(lambda)?;
                let gap = (concentration::charge_functional(&sol, &h)? - h.at_one()).abs();
                if h == TestFunction::One {
                    if gap > 1e-8 {
                        return Ok((false, format!("constant h gap {gap:.3e}")));
                    }
                } else if gap >= prev {
                    return Ok((false, format!("h={}, lambda={lambda}: {gap:.3e}", h.id())));
                }
                prev = gap;
            }
        }
        Ok((true, "all catalog functions".into()))
    }));

    checks.push(check(suite, "mass localizes at the boundary", || {
        let mut prev = f64::INFINITY;
        for &lambda in &[1e2, 1e3, 1e4, 1e5] {
            let sol = SingleSpeciesSolution::solve(lambda)?;
            let mass = concentration::boundary_mass_deficit(&sol, 0.5)?;
            if mass >= prev {
                return Ok((false, format!("mass {mass} at lambda={lambda}")));
            }
            prev = mass;
        }
        Ok((prev < 7e-3, format!("mass left of the layer down to {prev:.3e}")))
    }));

    checks
}

// ---------------------------------------------------------------------------
// acceptance criteria
// ---------------------------------------------------------------------------

/// The acceptance checks, in order.
pub mod acceptance {
    use super::*;

    const SUITE: &str = "acceptance";

    /// Eigenvalue expansion: `lambda^3 |J - pi^2(1/2 - 2/lambda + 6/lambda^2)|`
    /// within 25% of `pi^2 (48 - 2 pi^2)/3` for `lambda in {1e3, 1e4, 1e5}`,
    /// in under a second.
    pub fn criterion_01() -> Check {
        check(SUITE, "01 eigenvalue lambda^-3 term", || {
            let start = Instant::now();
            let target = PI * PI * (48.0 - 2.0 * PI * PI) / 3.0;
            let mut details = Vec::new();
            let mut ok = true;
            for &lambda in &[1e3, 1e4, 1e5] {
                let j = eigenvalue::solve_j_default(lambda)?.j;
                let scaled =
                    lambda.powi(3) * (j - asymptotics::j_expansion(lambda, 3)?).abs();
                ok &= (scaled / target - 1.0).abs() <= 0.25;
                details.push(format!("{scaled:.2}"));
            }
            let elapsed = start.elapsed();
            ok &= elapsed.as_secs_f64() < 1.0;
            Ok((
                ok,
                format!(
                    "scaled residuals [{}] vs {target:.2} (25%), {:.0} ms",
                    details.join(", "),
                    elapsed.as_secs_f64() * 1e3
                ),
            ))
        })
    }

    /// Boundary value: `lambda (u(1) + 2 log lambda - 2 log pi) -> -4`,
    /// within 5% at `lambda = 1e5`.
    pub fn criterion_02() -> Check {
        check(SUITE, "02 boundary value -4/lambda term", || {
            let lambda = 1e5;
            let sol = SingleSpeciesSolution::solve(lambda)?;
            let val = lambda * (sol.eval_u(1.0)? + 2.0 * lambda.ln() - 2.0 * PI.ln());
            Ok((
                ((val + 4.0) / 4.0).abs() <= 0.05,
                format!("lambda (u(1) + 2 log lambda - 2 log pi) = {val:.6}"),
            ))
        })
    }

    /// Far-field C1 convergence on `K = [0, 0.9]`: the scaled sup error
    /// decreases monotonically along `lambda in {1e3..1e6}`.
    pub fn criterion_03() -> Check {
        check(SUITE, "03 far-field C1 convergence", || {
            let mut prev = f64::INFINITY;
            let mut seq = Vec::new();
            for &lambda in &[1e3, 1e4, 1e5, 1e6] {
                let sol = SingleSpeciesSolution::solve(lambda)?;
                let mut sup = 0.0f64;
                for i in 0..=360 {
                    let r = i as f64 * 0.0025;
                    let (u_pred, du_pred) = asymptotics::far_field_u(r, lambda, 3)?;
                    sup = sup.max(
                        (sol.eval_u(r)? - u_pred).abs() + (sol.eval_du(r)? - du_pred).abs(),
                    );
                }
                let scaled = lambda * lambda * sup;
                if scaled >= prev {
                    return Ok((false, format!("not decreasing at lambda={lambda}")));
                }
                seq.push(format!("{scaled:.3}"));
                prev = scaled;
            }
            Ok((true, format!("lambda^2 sup errors [{}]", seq.join(", "))))
        })
    }

    /// Near-field regimes: the leading log coefficient of `u` extracted as a
    /// slope between `lambda = 1e6` and `1e8` matches `min(2, 2 alpha)`
    /// within 2%, and the slope coefficients match their printed leading
    /// terms within 5% at `lambda = 1e6`.
    pub fn criterion_04() -> Check {
        check(SUITE, "04 near-field regimes", || {
            let p = 1.0;
            for &alpha in &[0.5, 1.0, 1.5, 2.0, 3.0] {
                let expected = 2f64.min(2.0 * alpha);
                let (l_lo, l_hi) = (1e6, 1e8);
                let u_lo = SingleSpeciesSolution::solve(l_lo)?
                    .eval_u(NearFieldPoint::new(p, alpha, l_lo)?.r)?;
                let u_hi = SingleSpeciesSolution::solve(l_hi)?
                    .eval_u(NearFieldPoint::new(p, alpha, l_hi)?.r)?;
                // Coefficient of log(1/lambda): difference the constant away.
                let slope = (u_hi - u_lo) / ((1.0 / l_hi).ln() - (1.0 / l_lo).ln());
                if (slope / expected - 1.0).abs() > 0.02 {
                    return Ok((
                        false,
                        format!("alpha={alpha}: log coefficient {slope:.4} vs {expected}"),
                    ));
                }
                // Slope leading coefficients at lambda = 1e6.
                let lambda = 1e6;
                let sol = SingleSpeciesSolution::solve(lambda)?;
                let pt = NearFieldPoint::new(p, alpha, lambda)?;
                let du = sol.eval_du(pt.r)?;
                let leading = if alpha > 1.0 {
                    -lambda
                } else if alpha == 1.0 {
                    -2.0 * lambda / (p + 2.0)
                } else {
                    -2.0 / p * lambda.powf(alpha)
                };
                if (du / leading - 1.0).abs() > 0.05 {
                    return Ok((
                        false,
                        format!("alpha={alpha}: u' = {du:.4e} vs leading {leading:.4e}"),
                    ));
                }
            }
            Ok((true, "log coefficients within 2%, slopes within 5%".into()))
        })
    }

    /// Potential-gap limits at `lambda = 1e8` within 1% of the printed
    /// limits (absolute 0.01 where the limit is zero).
    pub fn criterion_05() -> Check {
        check(SUITE, "05 potential gap limits", || {
            let lambda = 1e8;
            let sol = SingleSpeciesSolution::solve(lambda)?;
            let gap1 = (sol.eval_u(NearFieldPoint::new(2.0, 1.0, lambda)?.r)?
                - sol.eval_u(1.0)?)
                .abs();
            let target1 = asymptotics::potential_gap_limit(2.0, None, 1.0);
            let gap2 = (sol.eval_u(NearFieldPoint::new(4.0, 0.5, lambda)?.r)?
                - sol.eval_u(NearFieldPoint::new(1.0, 0.5, lambda)?.r)?)
                .abs();
            let target2 = asymptotics::potential_gap_limit(4.0, Some(1.0), 0.5);
            let gap3 = (sol.eval_u(NearFieldPoint::new(1.0, 3.0, lambda)?.r)?
                - sol.eval_u(1.0)?)
                .abs();
            let ok = (gap1 / target1 - 1.0).abs() <= 0.01
                && (gap2 / target2 - 1.0).abs() <= 0.01
                && gap3 <= 0.01;
            Ok((
                ok,
                format!(
                    "gaps {gap1:.6}/{target1:.6}, {gap2:.6}/{target2:.6}, {gap3:.2e}/0"
                ),
            ))
        })
    }

    /// CCPB oracle equivalence at `mu = 0`, grid 4000: sup-node error below
    /// 1e-6 and under 10 s per solve for `lambda in {10, 1e2, 1e3, 1e4}`.
    pub fn criterion_06() -> Check {
        check(SUITE, "06 ccpb oracle equivalence", || {
            let mut details = Vec::new();
            for &lambda in &[10.0, 1e2, 1e3, 1e4] {
                let start = Instant::now();
                let mut params = CcpbParams::new(lambda, 0.0);
                params.grid_size = 4000;
                let sol = ccpb::solve_ccpb(&params)?;
                let elapsed = start.elapsed().as_secs_f64();
                let exact = SingleSpeciesSolution::solve(lambda)?;
                let mut sup = 0.0f64;
                for (i, &r) in sol.nodes.iter().enumerate() {
                    sup = sup.max((sol.v[i] - exact.eval_u(r)?).abs());
                }
                if sup > 1e-6 || elapsed >= 10.0 {
                    return Ok((
                        false,
                        format!("lambda={lambda}: sup={sup:.3e}, {elapsed:.2} s"),
                    ));
                }
                details.push(format!("{sup:.1e}@{elapsed:.2}s"));
            }
            Ok((true, format!("sup errors [{}]", details.join(", "))))
        })
    }

    /// Five profiles at `lambda = 1e4`: neutrality exact, pointwise ordering
    /// in `mu`, and strictly decreasing C1 distance to `u` as `mu` drops.
    pub fn criterion_07() -> Check {
        check(SUITE, "07 five-profile ordering", || {
            let lambda = 1e4;
            let mut sols = Vec::new();
            for &mu in &[1e4, 1e3, 1e2, 10.0, 0.0] {
                let params = CcpbParams::new(lambda, mu);
                sols.push(ccpb::solve_ccpb(&params)?);
            }
            if sols[0].v.iter().any(|&v| v.abs() > 1e-12) {
                return Ok((false, "neutral profile not identically zero".into()));
            }
            for pair in sols.windows(2) {
                for i in 0..pair[0].v.len() {
                    if pair[0].v[i] < pair[1].v[i] - 1e-8 {
                        return Ok((
                            false,
                            format!(
                                "ordering violated at node {i}: mu={} below mu={}",
                                pair[0].params.mu, pair[1].params.mu
                            ),
                        ));
                    }
                }
            }
            let mut prev = f64::INFINITY;
            let mut dists = Vec::new();
            for sol in &sols {
                let c1 = ccpb::w_profile(sol)?.c1_norm();
                if c1 >= prev {
                    return Ok((false, format!("C1 distance not decreasing at mu={}", sol.params.mu)));
                }
                dists.push(format!("{c1:.3e}"));
                prev = c1;
            }
            Ok((true, format!("C1 distances [{}]", dists.join(", "))))
        })
    }

    /// Coupled limit `(lambda, mu) = (10^k, 10^{-2k})`: C1 distance
    /// decreasing toward zero and the boundary bound holding pointwise.
    pub fn criterion_08() -> Check {
        check(SUITE, "08 coupled-limit convergence", || {
            let mut prev = f64::INFINITY;
            let mut dists = Vec::new();
            for k in 2..=4 {
                let lambda = 10f64.powi(k);
                let mu = 10f64.powi(-2 * k);
                let params = CcpbParams::new(lambda, mu);
                let sol = ccpb::solve_ccpb(&params)?;
                let prof = ccpb::w_profile(&sol)?;
                let c1 = prof.c1_norm();
                if c1 >= prev {
                    return Ok((false, format!("C1 not decreasing at k={k}")));
                }
                let w1 = *prof.w.last().unwrap();
                let exact = SingleSpeciesSolution::solve(lambda)?;
                let ratio = mu / lambda;
                let bound = (1.0 - ratio).powi(2)
                    + (2.0 - ratio) * ratio * (-exact.eval_u(1.0)?).exp();
                if !(w1.exp() >= 1.0 - 1e-9 && w1.exp() < bound) {
                    return Ok((
                        false,
                        format!("bound violated at k={k}: e^w1={:.8e}, bound={bound:.8e}", w1.exp()),
                    ));
                }
                dists.push(format!("{c1:.3e}"));
                prev = c1;
            }
            Ok((prev < 1e-3, format!("C1 distances [{}]", dists.join(", "))))
        })
    }

    /// 20 random pairs `lambda > mu`: monotone/concave `v`, nonnegative
    /// nondecreasing `w`, and `w'(1) = mu` within `1e-6 lambda`.
    pub fn criterion_09() -> Check {
        check(SUITE, "09 random-pair invariants", || {
            let mut rng = ChaCha8Rng::seed_from_u64(0xCC9B);
            for trial in 0..20 {
                let lambda = 10f64.powf(rng.gen_range(1.0..4.0));
                let mu = lambda * 10f64.powf(rng.gen_range(-3.0..-0.05));
                let mut params = CcpbParams::new(lambda, mu);
                params.grid_size = 1200;
                let sol = ccpb::solve_ccpb(&params)
                    .map_err(|e| crate::Error::InvalidParams(format!(
                        "trial {trial} (lambda={lambda:.3}, mu={mu:.3}): {e}"
                    )))?;
                sol.validate()?;
                let prof = ccpb::w_profile(&sol)?;
                let dw1 = *prof.dw.last().unwrap();
                if (dw1 - mu).abs() > 1e-6 * lambda {
                    return Ok((
                        false,
                        format!("trial {trial}: w'(1) - mu = {:.3e}", dw1 - mu),
                    ));
                }
            }
            Ok((true, "20 seeded random pairs clean".into()))
        })
    }

    /// Capacitance limits: `1/2` for `(p=1, alpha=2)` and `g(2)` for
    /// `(p=2, alpha=1)` within 1e-3 at `lambda = 1e4`; the thin-layer decay
    /// `exact * log lambda^{2-2 alpha} -> 1` within 15% at `lambda = 1e6`.
    pub fn criterion_10() -> Check {
        check(SUITE, "10 capacitance limits", || {
            let sol4 = SingleSpeciesSolution::solve(1e4)?;
            let c_half =
                capacitance::capacitance_exact(&sol4, &NearFieldPoint::new(1.0, 2.0, 1e4)?)?;
            let c_g2 =
                capacitance::capacitance_exact(&sol4, &NearFieldPoint::new(2.0, 1.0, 1e4)?)?;
            let g2 = 1.0 / (4.0 * 2f64.ln());
            let sol6 = SingleSpeciesSolution::solve(1e6)?;
            let c_thin =
                capacitance::capacitance_exact(&sol6, &NearFieldPoint::new(1.0, 0.5, 1e6)?)?;
            let scaled = c_thin * (2.0 - 2.0 * 0.5) * 1e6f64.ln();
            let ok = (c_half - 0.5).abs() <= 1e-3
                && (c_g2 - g2).abs() <= 1e-3
                && (scaled - 1.0).abs() <= 0.15;
            Ok((
                ok,
                format!(
                    "C(alpha=2) = {c_half:.6}, C(alpha=1) = {c_g2:.6} vs g(2) = {g2:.6}, \
                     thin-layer scaled = {scaled:.4}"
                ),
            ))
        })
    }

    /// Concentration: the exact finite-lambda identity to 1e-8 for the whole
    /// catalog, and the `log lambda / lambda` rate bound for smooth `h`.
    pub fn criterion_11() -> Check {
        check(SUITE, "11 concentration functionals", || {
            let mut worst_identity = 0.0f64;
            for &lambda in &[1e2, 1e4] {
                let sol = SingleSpeciesSolution::solve(lambda)?;
                for h in TestFunction::CATALOG {
                    let lhs = concentration::charge_functional(&sol, &h)?
                        - concentration::energy_functional(&sol, &h)?;
                    worst_identity =
                        worst_identity.max((lhs - h.integral() / sol.eigenvalue().i).abs());
                }
            }
            if worst_identity > 1e-8 {
                return Ok((false, format!("identity defect {worst_identity:.3e}")));
            }
            let lambda = 1e4;
            let sol = SingleSpeciesSolution::solve(lambda)?;
            for h in TestFunction::CATALOG.iter().filter(|h| h.is_smooth()) {
                let gap = (concentration::charge_functional(&sol, h)? - h.at_one()).abs();
                let bound = 2.0 * lambda.ln() * (1.0 + h.slope_at_one().abs()) / lambda;
                if gap > bound {
                    return Ok((
                        false,
                        format!("h={}: gap {gap:.3e} above bound {bound:.3e}", h.id()),
                    ));
                }
            }
            Ok((
                true,
                format!("identity defect {worst_identity:.3e}, rate bounds hold"),
            ))
        })
    }

    /// Everything above plus the module suites completes within 5 minutes.
    pub fn criterion_12() -> Check {
        let start = Instant::now();
        let checks = run_all_unpaced();
        let elapsed = start.elapsed().as_secs_f64();
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}/{}", c.suite, c.name))
            .collect();
        Check {
            suite: SUITE.to_string(),
            name: "12 full verification under 5 minutes".to_string(),
            passed: elapsed < 300.0 && failed.is_empty(),
            detail: if failed.is_empty() {
                format!("{} checks in {elapsed:.1} s", checks.len())
            } else {
                format!("failed: {}", failed.join(", "))
            },
        }
    }

    /// Criteria 1 through 11 in order.
    #[must_use]
    pub fn criteria_1_to_11() -> Vec<Check> {
        vec![
            criterion_01(),
            criterion_02(),
            criterion_03(),
            criterion_04(),
            criterion_05(),
            criterion_06(),
            criterion_07(),
            criterion_08(),
            criterion_09(),
            criterion_10(),
            criterion_11(),
        ]
    }
}

/// All module suites plus acceptance criteria 1-11, without the timing
/// wrapper.
#[must_use]
pub fn run_all_unpaced() -> Vec<Check> {
    let mut checks = Vec::new();
    checks.extend(eigenvalue_suite());
    checks.extend(exact_suite());
    checks.extend(asymptotics_suite());
    checks.extend(ccpb_suite());
    checks.extend(capacitance_suite());
    checks.extend(concentration_suite());
    checks.extend(acceptance::criteria_1_to_11());
    checks
}

/// The full verification battery: module suites, acceptance criteria, and
/// the five-minute timing criterion derived from the measured run.
#[must_use]
pub fn run_all() -> Vec<Check> {
    let start = Instant::now();
    let mut checks = run_all_unpaced();
    let elapsed = start.elapsed().as_secs_f64();
    let all_passed = checks.iter().all(|c| c.passed);
    checks.push(Check {
        suite: "acceptance".into(),
        name: "12 full verification under 5 minutes".into(),
        passed: elapsed < 300.0 && all_passed,
        detail: format!("{} checks in {elapsed:.1} s", checks.len()),
    });
    checks
}

/// A suite selected by name: `all`, a module name, or `acceptance`.
pub fn run_suite(name: &str) -> crate::Result<Vec<Check>> {
    match name {
        "all" => Ok(run_all()),
        "eigenvalue" => Ok(eigenvalue_suite()),
        "exact" => Ok(exact_suite()),
        "asymptotics" => Ok(asymptotics_suite()),
        "ccpb" => Ok(ccpb_suite()),
        "capacitance" => Ok(capacitance_suite()),
        "concentration" => Ok(concentration_suite()),
        "acceptance" => Ok(acceptance::criteria_1_to_11()),
        other => Err(crate::Error::InvalidParams(format!(
            "unknown suite '{other}'; expected all, acceptance, or a module name"
        ))),
    }
}

/// JSON rendering of a check list.
#[must_use]
pub fn checks_to_json(checks: &[Check]) -> String {
    serde_json::to_string_pretty(checks).expect("checks are plain data")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_dispatch() {
        assert!(run_suite("eigenvalue").is_ok());
        assert!(run_suite("bogus").is_err());
    }

    #[test]
    fn render_format() {
        let c = Check {
            suite: "s".into(),
            name: "n".into(),
            passed: true,
            detail: "d".into(),
        };
        assert_eq!(c.render(), "[PASS] s/n: d");
        let json = checks_to_json(&[c]);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v[0]["passed"], true);
    }
}
