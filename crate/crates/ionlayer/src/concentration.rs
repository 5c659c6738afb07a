//! Dirac concentration of the normalized net charge density.
//!
//! As `lambda` grows, `rho/lambda` and `u'^2/(2 lambda)` both act on test
//! functions like the point mass at `r = 1`:
//!
//! ```text
//! \int_0^1 (rho/lambda) h -> h(1),      \int_0^1 (u'^2 / 2 lambda) h -> h(1).
//! ```
//!
//! The two functionals differ at finite `lambda` by exactly
//! `(\int_0^1 h) / I` thanks to the first integral `u'^2/2 = J (e^{-u} - 1)`,
//! so the difference doubles as a quadrature test.  The test-function catalog
//! is fixed (constants, monomials, a cosine, a piecewise-linear hat) so every
//! report is reproducible; the CLI selects functions by id.

use crate::error::Result;
use crate::exact::SingleSpeciesSolution;
use crate::numerics::{self, fmt_g17};
use serde::Serialize;
use std::f64::consts::PI;

/// Relative tolerance of the functional quadratures.
const QUAD_REL_TOL: f64 = 1e-9;

/// The fixed catalog of continuous test functions on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestFunction {
    /// `h = 1`
    One,
    /// `h = r`
    Ramp,
    /// `h = r^2`
    Square,
    /// `h = r^3`
    Cubic,
    /// `h = cos(pi r / 2)`, vanishing at the boundary
    HalfCos,
    /// `h = 1 - |2r - 1|`, the hat peaked at `r = 1/2`
    Hat,
}

impl TestFunction {
    pub const CATALOG: [TestFunction; 6] = [
        TestFunction::One,
        TestFunction::Ramp,
        TestFunction::Square,
        TestFunction::Cubic,
        TestFunction::HalfCos,
        TestFunction::Hat,
    ];

    #[must_use]
    pub fn id(&self) -> &'static str {
        match self {
            TestFunction::One => "one",
            TestFunction::Ramp => "r",
            TestFunction::Square => "r2",
            TestFunction::Cubic => "r3",
            TestFunction::HalfCos => "cos",
            TestFunction::Hat => "hat",
        }
    }

    #[must_use]
    pub fn from_id(id: &str) -> Option<Self> {
        Self::CATALOG.iter().copied().find(|h| h.id() == id)
    }

    #[must_use]
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            TestFunction::One => 1.0,
            TestFunction::Ramp => r,
            TestFunction::Square => r * r,
            TestFunction::Cubic => r * r * r,
            TestFunction::HalfCos => (PI * r / 2.0).cos(),
            TestFunction::Hat => 1.0 - (2.0 * r - 1.0).abs(),
        }
    }

    /// `h(1)`, the value the functionals concentrate on.
    #[must_use]
    pub fn at_one(&self) -> f64 {
        match self {
            TestFunction::One | TestFunction::Ramp | TestFunction::Square | TestFunction::Cubic => {
                1.0
            }
            TestFunction::HalfCos | TestFunction::Hat => 0.0,
        }
    }

    /// One-sided slope `h'(1)`, which sets the leading `log lambda / lambda`
    /// rate of the concentration gap.
    #[must_use]
    pub fn slope_at_one(&self) -> f64 {
        match self {
            TestFunction::One => 0.0,
            TestFunction::Ramp => 1.0,
            TestFunction::Square => 2.0,
            TestFunction::Cubic => 3.0,
            TestFunction::HalfCos => -PI / 2.0,
            TestFunction::Hat => -2.0,
        }
    }

    /// Exact `\int_0^1 h`.
    #[must_use]
    pub fn integral(&self) -> f64 {
        match self {
            TestFunction::One => 1.0,
            TestFunction::Ramp => 0.5,
            TestFunction::Square => 1.0 / 3.0,
            TestFunction::Cubic => 0.25,
            TestFunction::HalfCos => 2.0 / PI,
            TestFunction::Hat => 0.5,
        }
    }

    /// Smooth on all of `[0, 1]`; the hat has a kink.
    #[must_use]
    pub fn is_smooth(&self) -> bool {
        !matches!(self, TestFunction::Hat)
    }

    /// Interior kinks where quadrature segments must split.
    #[must_use]
    pub fn breakpoints(&self) -> &'static [f64] {
        match self {
            TestFunction::Hat => &[0.5],
            _ => &[],
        }
    }
}

/// Integrate `integrand` over `[0, 1]` splitting at the test function's
/// kinks, with the final segment graded into the boundary layer.
fn functional_quadrature(
    h: &TestFunction,
    lambda: f64,
    mut integrand: impl FnMut(f64) -> f64,
) -> Result<f64> {
    let mut edges = vec![0.0];
    edges.extend_from_slice(h.breakpoints());
    edges.push(1.0);
    let mut total = 0.0;
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        total += if b == 1.0 {
            numerics::integrate_graded(&mut integrand, a, b, 1.0 / lambda.max(1.0), QUAD_REL_TOL)?
        } else {
            numerics::integrate_uniform(&mut integrand, a, b, QUAD_REL_TOL)?
        };
    }
    Ok(total)
}

/// `\int_0^1 (rho / lambda) h`, the charge functional.
pub fn charge_functional(sol: &SingleSpeciesSolution, h: &TestFunction) -> Result<f64> {
    let lambda = sol.lambda();
    functional_quadrature(h, lambda, |r| sol.rho_unchecked(r) * h.eval(r) / lambda)
}

/// `\int_0^1 (u'^2 / (2 lambda)) h`, the field-energy functional.
pub fn energy_functional(sol: &SingleSpeciesSolution, h: &TestFunction) -> Result<f64> {
    let lambda = sol.lambda();
    functional_quadrature(h, lambda, |r| {
        let du = sol.du_unchecked(r);
        du * du * h.eval(r) / (2.0 * lambda)
    })
}

/// Mass of `rho/lambda` left of the layer, `\int_0^{1 - lambda^{-kappa}}`;
/// vanishes as `lambda -> infinity` for any `kappa` in `(0, 1)`.
pub fn boundary_mass_deficit(sol: &SingleSpeciesSolution, kappa: f64) -> Result<f64> {
    assert!(kappa > 0.0 && kappa < 1.0);
    let lambda = sol.lambda();
    let right = 1.0 - lambda.powf(-kappa);
    numerics::integrate_graded(
        |r| sol.rho_unchecked(r) / lambda,
        0.0,
        right,
        (1.0 - right) / 2.0,
        QUAD_REL_TOL,
    )
}

/// One row of the concentration report; `gap = charge - h(1)` is the
/// quantity that tends to zero.
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationRow {
    pub lambda: f64,
    pub h_id: &'static str,
    pub charge: f64,
    pub energy: f64,
    pub h_at_1: f64,
    pub gap: f64,
}

/// Evaluate both functionals for a set of test functions at one `lambda`.
pub fn concentration_rows(
    sol: &SingleSpeciesSolution,
    catalog: &[TestFunction],
) -> Result<Vec<ConcentrationRow>> {
    catalog
        .iter()
        .map(|h| {
            let charge = charge_functional(sol, h)?;
            let energy = energy_functional(sol, h)?;
            Ok(ConcentrationRow {
                lambda: sol.lambda(),
                h_id: h.id(),
                charge,
                energy,
                h_at_1: h.at_one(),
                gap: charge - h.at_one(),
            })
        })
        .collect()
}

/// CSV rendering: `lambda,h_id,charge,energy,h_at_1,gap`.
#[must_use]
pub fn concentration_csv(rows: &[ConcentrationRow]) -> String {
    let mut s = String::from("lambda,h_id,charge,energy,h_at_1,gap\n");
    for row in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_g17(row.lambda),
            row.h_id,
            fmt_g17(row.charge),
            fmt_g17(row.energy),
            fmt_g17(row.h_at_1),
            fmt_g17(row.gap),
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
    fn catalog_ids_round_trip() {
        for h in TestFunction::CATALOG {
            assert_eq!(TestFunction::from_id(h.id()), Some(h));
        }
        assert_eq!(TestFunction::from_id("nope"), None);
    }

    #[test]
    fn unit_test_function_gives_total_charge() {
        // \int rho = lambda exactly, for every lambda.
        for &lambda in &[1e2, 1e4] {
            let c = charge_functional(&sol(lambda), &TestFunction::One).unwrap();
            assert!((c - 1.0).abs() < 1e-8, "lambda={lambda}: charge {c}");
        }
    }

    #[test]
    fn ramp_matches_integration_by_parts() {
        // \int rho r / lambda = 1 + u(1)/lambda exactly.
        let s = sol(1e4);
        let c = charge_functional(&s, &TestFunction::Ramp).unwrap();
        let identity = 1.0 + s.eval_u(1.0).unwrap() / 1e4;
        assert!((c - identity).abs() <= 1e-8, "charge={c}, identity={identity}");
        assert!((c - 0.998_386_837_896_91).abs() < 1e-8);
    }

    #[test]
    fn energy_of_unit_function_value() {
        let e = energy_functional(&sol(1e4), &TestFunction::One).unwrap();
        assert!(e > 0.99 && e < 1.0, "energy {e}");
        assert!((e - 0.999_506_717_112_825).abs() < 1e-8);
    }

    #[test]
    fn charge_minus_energy_identity_for_all_catalog() {
        // charge - energy = (\int h)/I exactly, at every lambda and h.
        for &lambda in &[1e2, 1e3, 1e4] {
            let s = sol(lambda);
            for h in TestFunction::CATALOG {
                let lhs = charge_functional(&s, &h).unwrap() - energy_functional(&s, &h).unwrap();
                let rhs = h.integral() / s.eigenvalue().i;
                assert!(
                    (lhs - rhs).abs() <= 1e-8,
                    "lambda={lambda}, h={}: lhs={lhs:e}, rhs={rhs:e}",
                    h.id()
                );
            }
        }
    }

    #[test]
    fn vanishing_boundary_values_concentrate_to_zero() {
        // h(1) = 0 for the cosine: the functional itself tends to 0.
        let mut prev = f64::INFINITY;
        for &lambda in &[1e2, 1e3, 1e4, 1e5] {
            let c = charge_functional(&sol(lambda), &TestFunction::HalfCos).unwrap();
            assert!(c.abs() < prev, "lambda={lambda}: {c}");
            prev = c.abs();
        }
        // The gap decays like |u(1)| |h'(1)| / lambda ~ 3.3e-4 at 1e5.
        assert!(prev < 4e-4, "final gap {prev}");
    }

    #[test]
    fn gaps_decrease_monotonically_for_every_h() {
        for h in TestFunction::CATALOG {
            let mut prev = f64::INFINITY;
            for &lambda in &[1e2, 1e3, 1e4, 1e5] {
                let gap = (charge_functional(&sol(lambda), &h).unwrap() - h.at_one()).abs();
                if h == TestFunction::One {
                    // Exactly zero at all lambda; only boundedness applies.
                    assert!(gap <= 1e-8);
                } else {
                    assert!(gap < prev, "h={}, lambda={lambda}: gap={gap}", h.id());
                }
                prev = gap;
            }
        }
    }

    #[test]
    fn gap_rate_is_log_over_lambda() {
        // For h'(1) != 0 the gap behaves like |u(1)| |h'(1)| / lambda.
        for h in [TestFunction::Ramp, TestFunction::Square, TestFunction::HalfCos] {
            for &lambda in &[1e3, 1e4] {
                let s = sol(lambda);
                let gap = (charge_functional(&s, &h).unwrap() - h.at_one()).abs();
                let bound = 2.0 * lambda.ln() * (1.0 + h.slope_at_one().abs()) / lambda;
                assert!(
                    gap <= bound,
                    "h={}, lambda={lambda}: gap={gap:e}, bound={bound:e}",
                    h.id()
                );
                assert!(gap >= 0.05 * bound, "rate should be of the bound's order");
            }
        }
    }

    #[test]
    fn localization_mass_vanishes() {
        // Mass of rho/lambda on [0, 1 - lambda^{-1/2}] tends to zero and is
        // -u'(1 - lambda^{-1/2})/lambda in closed form.
        let mut prev = f64::INFINITY;
        for &lambda in &[1e2, 1e3, 1e4, 1e5] {
            let s = sol(lambda);
            let mass = boundary_mass_deficit(&s, 0.5).unwrap();
            let closed = -s.eval_du(1.0 - lambda.powf(-0.5)).unwrap() / lambda;
            assert!(
                ((mass - closed) / closed).abs() < 1e-7,
                "lambda={lambda}: mass={mass}, closed={closed}"
            );
            assert!(mass < prev);
            prev = mass;
        }
        assert!(prev < 7e-3);
    }

    #[test]
    fn rows_and_csv_shape() {
        let s = sol(1e3);
        let rows = concentration_rows(&s, &TestFunction::CATALOG).unwrap();
        assert_eq!(rows.len(), 6);
        let csv = concentration_csv(&rows);
        assert!(csv.starts_with("lambda,h_id,charge,energy,h_at_1,gap\n"));
        assert_eq!(csv.lines().count(), 7);
        for row in &rows {
            assert!((row.gap - (row.charge - row.h_at_1)).abs() < 1e-15);
        }
    }
}
