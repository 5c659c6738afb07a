//! Numerical solver for the charge-conserving Poisson--Boltzmann equation
//!
//! ```text
//! v'' = mu e^{v} / \int_0^1 e^{v}  -  lambda e^{-v} / \int_0^1 e^{-v},
//! v(0) = v'(0) = 0,                lambda > mu >= 0,
//! ```
//!
//! solved as a fixed point in the two nonlocal integrals `A = \int e^{v}` and
//! `B = \int e^{-v}`: freeze `(A, B)`, integrate the now-local IVP with a
//! fourth-order one-step method, recompute the integrals, update.
//!
//! The two directions of the fixed point behave very differently.  The `A`
//! direction is a contraction (slope about `mu/(mu + lambda)`), so a damped
//! Picard sweep relaxes it at any frozen `B`.  The `B` direction is
//! strongly repelling for plain iteration once `lambda >> 1` (slope about
//! `-lambda/8`), but `G(B) = log(\int e^{-v_B} / B)` is strictly monotone
//! and changes sign on the analytic bracket `[I e^{-w(1)}, I]` that the
//! boundary bound `e^{w(1)} < (1-mu/lambda)^2 +
//! (2-mu/lambda)(mu/lambda)(1 + lambda I/2)` provides, so a bracketed
//! Illinois secant pins it down regardless of how stiff the layer is.
//! Probes left of the feasible region blow down in finite `r`; they carry
//! no value but still mark the low side of the bracket.  `mu = lambda` is
//! the exact neutral case `v = 0`.

use crate::eigenvalue;
use crate::error::{Error, Result};
use crate::exact::SingleSpeciesSolution;
use crate::numerics::fmt_g17;
use serde::Serialize;

/// Parameters of one CCPB solve.
#[derive(Debug, Clone, Serialize)]
pub struct CcpbParams {
    /// Cation number parameter.
    pub lambda: f64,
    /// Anion number parameter, `0 <= mu <= lambda`.
    pub mu: f64,
    /// Number of grid intervals (nodes = `grid_size + 1`).
    pub grid_size: usize,
    /// Damping of the Picard warm-up, in `(0, 1]`.
    pub damping: f64,
    /// Relative tolerance on the fixed point of `(A, B)`.
    pub outer_tol: f64,
    /// Relative tolerance of the inner IVP integration.
    pub ode_tol: f64,
    /// Budget of IVP solves across all outer stages.
    pub max_outer_iters: usize,
}

impl CcpbParams {
    /// Defaults: grid 2000, damping 0.5, `outer_tol = ode_tol = 1e-10`,
    /// at most 500 outer iterations.
    #[must_use]
    pub fn new(lambda: f64, mu: f64) -> Self {
        Self {
            lambda,
            mu,
            grid_size: 2000,
            damping: 0.5,
            outer_tol: 1e-10,
            ode_tol: 1e-10,
            max_outer_iters: 500,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::NonPositiveLambda(self.lambda));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidParams(format!("mu must be >= 0, got {}", self.mu)));
        }
        if self.mu > self.lambda {
            return Err(Error::InvalidParams(format!(
                "mu = {} exceeds lambda = {}; only lambda >= mu is modeled",
                self.mu, self.lambda
            )));
        }
        if self.grid_size < 64 {
            return Err(Error::InvalidParams(format!(
                "grid_size must be at least 64, got {}",
                self.grid_size
            )));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if !(self.outer_tol > 0.0 && self.ode_tol > 0.0) {
            return Err(Error::InvalidParams(
                "tolerances must be positive".to_string(),
            ));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::InvalidParams("max_outer_iters must be > 0".into()));
        }
        Ok(())
    }
}

/// Converged CCPB solution on its grid.
#[derive(Debug, Clone, Serialize)]
pub struct CcpbSolution {
    pub params: CcpbParams,
    /// Sorted nodes with `nodes[0] = 0` and `nodes[N] = 1`.
    pub nodes: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    /// `A = \int_0^1 e^{v}`.
    pub a: f64,
    /// `B = \int_0^1 e^{-v}`.
    pub b: f64,
    /// IVP solves consumed by the outer iteration.
    pub outer_iters: usize,
    pub converged: bool,
}

/// Comparison profile `w = v - u` against the single-species solution.
#[derive(Debug, Clone, Serialize)]
pub struct WProfile {
    pub nodes: Vec<f64>,
    pub w: Vec<f64>,
    pub dw: Vec<f64>,
}

impl WProfile {
    #[must_use]
    pub fn sup_w(&self) -> f64 {
        self.w.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[must_use]
    pub fn sup_dw(&self) -> f64 {
        self.dw.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `sup (|w| + |w'|)`, the C1 distance between `v` and `u`.
    #[must_use]
    pub fn c1_norm(&self) -> f64 {
        self.w
            .iter()
            .zip(&self.dw)
            .fold(0.0, |m, (w, dw)| m.max(w.abs() + dw.abs()))
    }
}

/// Grid graded toward `r = 1`: about 40% of the intervals resolve the layer
/// `[1 - 20/lambda, 1]`, uniform spacing inside each zone.  Doubling
/// `n` produces a nested refinement.
#[must_use]
pub fn ccpb_grid(n: usize, lambda: f64) -> Vec<f64> {
    assert!(n >= 8);
    let delta = (20.0 / lambda).min(0.3);
    let n_layer = (2 * n / 5).max(2);
    let n_bulk = n - n_layer;
    let split = 1.0 - delta;
    let mut nodes = Vec::with_capacity(n + 1);
    for i in 0..n_bulk {
        nodes.push(split * i as f64 / n_bulk as f64);
    }
    for j in 0..=n_layer {
        nodes.push(split + delta * j as f64 / n_layer as f64);
    }
    nodes[0] = 0.0;
    let last = nodes.len() - 1;
    nodes[last] = 1.0;
    nodes
}

/// Result of one frozen-coefficient IVP integration.
#[derive(Debug, Clone)]
pub struct IvpOutput {
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    /// `\int_0^1 e^{v}` accumulated by Simpson on the substep grid.
    pub int_exp_v: f64,
    /// `\int_0^1 e^{-v}` accumulated likewise.
    pub int_exp_neg_v: f64,
    /// Substeps per interval of the accepted pass.
    pub substeps: usize,
}

/// Internal blow-up marker carrying the runaway direction.
#[derive(Debug, Clone, Copy)]
struct Blow {
    r: f64,
    upward: bool,
}

impl Blow {
    fn into_error(self, limit: f64) -> Error {
        Error::BlowUp {
            r: self.r,
            limit,
            upward: self.upward,
        }
    }
}

/// Integrate `v'' = coef_a e^{v} - coef_b e^{-v}`, `v(0) = v'(0) = 0` with
/// classic RK4 and `substeps` (even) fixed substeps per grid interval,
/// accumulating the two exponential integrals with composite Simpson on the
/// substep values.
pub fn integrate_ivp_fixed(
    coef_a: f64,
    coef_b: f64,
    nodes: &[f64],
    substeps: usize,
    v_cap: f64,
) -> Result<IvpOutput> {
    integrate_fixed_inner(coef_a, coef_b, nodes, substeps, v_cap)
        .map_err(|blow| blow.into_error(v_cap))
}

fn integrate_fixed_inner(
    coef_a: f64,
    coef_b: f64,
    nodes: &[f64],
    substeps: usize,
    v_cap: f64,
) -> std::result::Result<IvpOutput, Blow> {
    assert!(substeps >= 2 && substeps % 2 == 0);
    assert!(nodes.len() >= 2 && nodes[0] == 0.0);
    let mut v = 0.0f64;
    let mut s = 0.0f64;
    let mut out_v = Vec::with_capacity(nodes.len());
    let mut out_dv = Vec::with_capacity(nodes.len());
    out_v.push(v);
    out_dv.push(s);
    let mut int_pos = 0.0;
    let mut int_neg = 0.0;
    // NaN from an exponential overflow counts as a downward runaway, which
    // is by far its usual source.
    let rhs = |v_arg: f64, r: f64| -> std::result::Result<f64, Blow> {
        if !(v_arg.abs() <= v_cap) {
            return Err(Blow {
                r,
                upward: v_arg > 0.0,
            });
        }
        Ok(coef_a * v_arg.exp() - coef_b * (-v_arg).exp())
    };
    let mut exp_vals = vec![(0.0f64, 0.0f64); substeps + 1];
    for pair in nodes.windows(2) {
        let h = (pair[1] - pair[0]) / substeps as f64;
        exp_vals[0] = (v.exp(), (-v).exp());
        for step in 0..substeps {
            let r = pair[0] + h * step as f64;
            let k1s = rhs(v, r)?;
            let k1v = s;
            let k2s = rhs(v + 0.5 * h * k1v, r)?;
            let k2v = s + 0.5 * h * k1s;
            let k3s = rhs(v + 0.5 * h * k2v, r)?;
            let k3v = s + 0.5 * h * k2s;
            let k4s = rhs(v + h * k3v, r)?;
            let k4v = s + h * k3s;
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
            rhs(v, r + h)?;
            exp_vals[step + 1] = (v.exp(), (-v).exp());
        }
        let mut i = 0;
        while i + 2 <= substeps {
            let (p0, n0) = exp_vals[i];
            let (p1, n1) = exp_vals[i + 1];
            let (p2, n2) = exp_vals[i + 2];
            int_pos += h / 3.0 * (p0 + 4.0 * p1 + p2);
            int_neg += h / 3.0 * (n0 + 4.0 * n1 + n2);
            i += 2;
        }
        out_v.push(v);
        out_dv.push(s);
    }
    Ok(IvpOutput {
        v: out_v,
        dv: out_dv,
        int_exp_v: int_pos,
        int_exp_neg_v: int_neg,
        substeps,
    })
}

/// [`integrate_ivp_fixed`] wrapped in substep halving: the substep count
/// doubles until two successive passes agree to `ode_tol` in the scaled
/// sup norm over nodes and in both integrals.
pub fn integrate_ivp(
    coef_a: f64,
    coef_b: f64,
    nodes: &[f64],
    ode_tol: f64,
    v_cap: f64,
) -> Result<IvpOutput> {
    integrate_ivp_from(coef_a, coef_b, nodes, ode_tol, v_cap, 2)
}

fn integrate_ivp_from(
    coef_a: f64,
    coef_b: f64,
    nodes: &[f64],
    ode_tol: f64,
    v_cap: f64,
    first_substeps: usize,
) -> Result<IvpOutput> {
    let mut prev: Option<IvpOutput> = None;
    let mut last_err: Option<Blow> = None;
    let mut blow_streak = 0usize;
    let mut last_metric = f64::INFINITY;
    let mut substeps = first_substeps.next_power_of_two().clamp(2, 1024);
    while substeps <= 1024 {
        match integrate_fixed_inner(coef_a, coef_b, nodes, substeps, v_cap) {
            Err(e) => {
                // Coarse passes may overshoot into the trust-region guard even
                // when the fine solution is tame; only a persistent blow-up
                // is reported.
                prev = None;
                blow_streak += 1;
                if blow_streak >= 3 && substeps >= 8 {
                    return Err(e.into_error(v_cap));
                }
                last_err = Some(e);
            }
            Ok(cur) => {
                blow_streak = 0;
                if let Some(p) = &prev {
                    let v_scale = 1.0 + cur.v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                    let dv_scale = 1.0 + cur.dv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                    let dv_max = cur
                        .v
                        .iter()
                        .zip(&p.v)
                        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                    let ds_max = cur
                        .dv
                        .iter()
                        .zip(&p.dv)
                        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                    let metric = (dv_max / v_scale)
                        .max(ds_max / dv_scale)
                        .max((cur.int_exp_v - p.int_exp_v).abs() / cur.int_exp_v)
                        .max((cur.int_exp_neg_v - p.int_exp_neg_v).abs() / cur.int_exp_neg_v);
                    if metric <= ode_tol {
                        return Ok(cur);
                    }
                    log::trace!(
                        "ivp refine: m={substeps} metric={metric:.3e} dv={dv_max:.2e} ds={ds_max:.2e} dA={:.2e} dB={:.2e} vmax={:.3e} (coefA-coefB={:.6e})",
                        (cur.int_exp_v - p.int_exp_v).abs() / cur.int_exp_v,
                        (cur.int_exp_neg_v - p.int_exp_neg_v).abs() / cur.int_exp_neg_v,
                        v_scale - 1.0,
                        coef_a - coef_b
                    );
                    last_metric = metric;
                }
                prev = Some(cur);
            }
        }
        substeps *= 2;
    }
    match last_err {
        Some(e) if prev.is_none() => Err(e.into_error(v_cap)),
        _ => Err(Error::NoConvergence {
            iters: 1024,
            residual: last_metric,
        }),
    }
}

/// Reasonable trust region for [`integrate_ivp`]; the physical solution
/// obeys `|v| <= 2 log lambda + O(1)`, so exceeding this cap can only come
/// from bad frozen coefficients.
#[must_use]
pub fn v_cap(lambda: f64) -> f64 {
    (100.0 * (1.0 + lambda.max(1.0).ln())).min(280.0)
}

/// First-integral representation of one frozen-coefficient trajectory.
///
/// With `v` monotone, `v'' = ca e^{v} - cb e^{-v}` integrates once to
/// `v'^2/2 = ca (e^{v} - 1) + cb (e^{-v} - 1)`, so arclength in `r` and the
/// two exponential integrals become explicit quadratures over the depth
/// variable.  In `sigma = sqrt(|v|)`,
///
/// ```text
/// r(sigma)            = \int_0^{sigma} 2 dt / T(t),
/// \int e^{ v} dr      = \int_0^{sigma} 2 e^{ z(t)} dt / T(t),
/// \int e^{-v} dr      = \int_0^{sigma} 2 e^{-z(t)} dt / T(t),
/// T(t) = S(z(t)) / t,   z(t) = -t^2 (falling) or +t^2 (rising),
/// ```
///
/// and `T` is smooth all the way to `t = 0`.  This evaluation has no error
/// amplification, unlike forward shooting, whose variational growth
/// `exp(\int sqrt(ca e^{v} + cb e^{-v}))` makes the IVP hopeless near
/// balanced large coefficients.
struct Trajectory {
    /// Falling (`v <= 0`) when `cb > ca`, rising when `ca > cb`.
    falling: bool,
    /// `sqrt(|v(1)|)`; the boundary depth is `|v(1)| = sigma_end^2`.
    sigma_end: f64,
    /// Quadrature mesh in `sigma` with cumulative `r` at the nodes.
    mesh: Vec<f64>,
    r_cum: Vec<f64>,
    /// The two exponential integrals over `[0, 1]`.
    int_exp_v: f64,
    int_exp_neg_v: f64,
}

/// What evaluating the map at frozen coefficients can yield.
enum TrajOutcome {
    Ok(Trajectory),
    /// The trajectory reaches `|v| = infinity` before `r = 1`: downward for
    /// a falling branch (`cb` wins), upward for a rising one (`ca` wins).
    Escapes,
}

/// `T(sigma) = S(z)/sigma` evaluated stably via `expm1`; `sgn = -1` on the
/// falling branch, `+1` on the rising one.
#[inline]
fn t_of_sigma(ca: f64, cb: f64, sgn: f64, sigma: f64) -> f64 {
    let z = sgn * sigma * sigma;
    let num = 2.0 * (ca * z.exp_m1() + cb * (-z).exp_m1());
    if sigma == 0.0 {
        // limit: S^2 ~ 2 (cb - ca) sgn-adjusted z + ...
        return (2.0 * sgn * (ca - cb)).max(0.0).sqrt();
    }
    (num.max(0.0)).sqrt() / sigma
}

/// Quadrature mesh on `[0, sigma_end]`: uniform backbone plus geometric
/// refinement toward 0 when the coefficients nearly balance (the integrand
/// varies on the scale `sigma_delta = sqrt(|ca - cb| / (ca + cb))` there).
fn sigma_mesh(sigma_end: f64, sigma_delta: f64, n: usize) -> Vec<f64> {
    let mut mesh: Vec<f64> = (0..=n).map(|i| sigma_end * i as f64 / n as f64).collect();
    if sigma_delta.is_finite() && sigma_delta < 0.1 * sigma_end {
        let lo = (sigma_delta * 1e-2).max(sigma_end * 1e-300);
        let hi = (sigma_delta * 1e2).min(sigma_end);
        let m = n / 2;
        let ratio = (hi / lo).ln() / m as f64;
        mesh.extend((0..=m).map(|i| lo * (ratio * i as f64).exp()));
        mesh.sort_by(|x, y| x.partial_cmp(y).unwrap());
        mesh.dedup_by(|x, y| (*x - *y).abs() <= f64::EPSILON * sigma_end);
    }
    mesh
}

/// Evaluate the map at frozen `(ca, cb)` to relative accuracy `rel_tol`, or
/// report escape.
fn frozen_trajectory(
    ca: f64,
    cb: f64,
    lambda: f64,
    rel_tol: f64,
) -> Result<TrajOutcome> {
    if ca == cb {
        // Unstable equilibrium: v stays identically zero.
        return Ok(TrajOutcome::Ok(Trajectory {
            falling: true,
            sigma_end: 0.0,
            mesh: vec![0.0],
            r_cum: vec![0.0],
            int_exp_v: 1.0,
            int_exp_neg_v: 1.0,
        }));
    }
    let falling = cb > ca;
    let sgn = if falling { -1.0 } else { 1.0 };
    // Depth cap: no bounded trajectory of the coupled problem gets deeper
    // than ~2 log lambda + O(1); past the cap the leftover r is negligible.
    let sigma_cap = (2.0 * (lambda + 2.0).ln() + 60.0).sqrt();
    let sigma_delta = (((cb - ca).abs() / (ca + cb)).sqrt()).min(sigma_cap);

    let mut n = 128usize;
    let mut prev: Option<(f64, f64, f64)> = None; // (eta, A, B)
    for _ in 0..12 {
        let mesh = sigma_mesh(sigma_cap, sigma_delta, n);
        // Cumulative r over the mesh; stop once r exceeds 1.
        let mut r = 0.0f64;
        let mut cross = None;
        let mut r_cum = Vec::with_capacity(mesh.len());
        r_cum.push(0.0);
        for k in 1..mesh.len() {
            let (x0, x1) = (mesh[k - 1], mesh[k]);
            let xm = 0.5 * (x0 + x1);
            let seg = (x1 - x0) / 6.0
                * (2.0 / t_of_sigma(ca, cb, sgn, x0)
                    + 8.0 / t_of_sigma(ca, cb, sgn, xm)
                    + 2.0 / t_of_sigma(ca, cb, sgn, x1));
            if r + seg >= 1.0 {
                cross = Some((k - 1, r));
                break;
            }
            r += seg;
            r_cum.push(r);
        }
        let Some((k0, r0)) = cross else {
            return Ok(TrajOutcome::Escapes);
        };
        // Bisect sigma_end inside the crossing interval.
        let (mut lo, mut hi) = (mesh[k0], mesh[k0 + 1]);
        let base = r0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let xm = 0.5 * (mesh[k0] + mid);
            let seg = (mid - mesh[k0]) / 6.0
                * (2.0 / t_of_sigma(ca, cb, sgn, mesh[k0])
                    + 8.0 / t_of_sigma(ca, cb, sgn, xm)
                    + 2.0 / t_of_sigma(ca, cb, sgn, mid));
            if base + seg < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * (1.0 + hi) {
                break;
            }
        }
        let sigma_end = 0.5 * (lo + hi);

        // Integrals over [0, sigma_end] on the truncated mesh.
        let mut final_mesh: Vec<f64> =
            mesh.iter().copied().take_while(|&x| x < sigma_end).collect();
        final_mesh.push(sigma_end);
        let mut int_pos = 0.0;
        let mut int_neg = 0.0;
        for pair in final_mesh.windows(2) {
            let (x0, x1) = (pair[0], pair[1]);
            let xm = 0.5 * (x0 + x1);
            let h6 = (x1 - x0) / 6.0;
            let eval = |x: f64| {
                let z = sgn * x * x;
                let t = t_of_sigma(ca, cb, sgn, x);
                (2.0 * z.exp() / t, 2.0 * (-z).exp() / t)
            };
            let (p0, m0) = eval(x0);
            let (p1, m1) = eval(xm);
            let (p2, m2) = eval(x1);
            int_pos += h6 * (p0 + 4.0 * p1 + p2);
            int_neg += h6 * (m0 + 4.0 * m1 + m2);
        }

        if let Some((eta_p, a_p, b_p)) = prev {
            let de = (sigma_end - eta_p).abs() / (1.0 + sigma_end);
            let da = (int_pos - a_p).abs() / int_pos;
            let db = (int_neg - b_p).abs() / int_neg;
            log::trace!(
                "traj refine n={n}: sig={sigma_end:.12e} A={int_pos:.10e} B={int_neg:.10e} d=({de:.2e},{da:.2e},{db:.2e}) ca={ca:.6e} cb={cb:.6e}"
            );
            if de.max(da).max(db) <= rel_tol {
                let mut r_final = r_cum;
                r_final.truncate(final_mesh.len() - 1);
                r_final.push(1.0);
                return Ok(TrajOutcome::Ok(Trajectory {
                    falling,
                    sigma_end,
                    mesh: final_mesh,
                    r_cum: r_final,
                    int_exp_v: int_pos,
                    int_exp_neg_v: int_neg,
                }));
            }
        }
        prev = Some((sigma_end, int_pos, int_neg));
        n *= 2;
    }
    Err(Error::QuadratureStall(f64::NAN))
}

impl Trajectory {
    /// Reconstruct `(v, v')` at the requested nodes by inverting the
    /// monotone map `r(sigma)` inside its bracketing mesh cell.
    fn profile(&self, ca: f64, cb: f64, nodes: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let sgn = if self.falling { -1.0 } else { 1.0 };
        let mut v = Vec::with_capacity(nodes.len());
        let mut dv = Vec::with_capacity(nodes.len());
        let mut cell = 0usize;
        for &r in nodes {
            if r <= 0.0 {
                v.push(0.0);
                dv.push(0.0);
                continue;
            }
            while cell + 2 < self.r_cum.len() && self.r_cum[cell + 1] < r {
                cell += 1;
            }
            let (mut lo, mut hi) = (self.mesh[cell], self.mesh[cell + 1]);
            let base = self.r_cum[cell];
            if r >= 1.0 {
                lo = self.sigma_end;
                hi = self.sigma_end;
            }
            for _ in 0..60 {
                if hi - lo <= 1e-15 * (1.0 + hi) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let xm = 0.5 * (self.mesh[cell] + mid);
                let seg = (mid - self.mesh[cell]) / 6.0
                    * (2.0 / t_of_sigma(ca, cb, sgn, self.mesh[cell])
                        + 8.0 / t_of_sigma(ca, cb, sgn, xm)
                        + 2.0 / t_of_sigma(ca, cb, sgn, mid));
                if base + seg < r {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let sigma = 0.5 * (lo + hi);
            let z = sgn * sigma * sigma;
            v.push(z);
            dv.push(sgn * sigma * t_of_sigma(ca, cb, sgn, sigma));
        }
        (v, dv)
    }
}

/// Internal driver around the frozen-coefficient map.
struct Outer {
    lambda: f64,
    quad_tol: f64,
    evals: usize,
    budget: usize,
    /// Warm start for the inner relaxation of A across outer evaluations.
    a_warm: f64,
}

/// Outcome of one outer evaluation `G(B) = ln(\int e^{-v} / B)` with the
/// `A` integral relaxed to its own root at frozen `B`.
struct BProbe {
    g: f64,
    a: f64,
}

/// What an outer probe learned about a trial `B`.
enum ProbeOutcome {
    Value(BProbe),
    /// The trial `B` sits left of the feasible region: the trajectory dives
    /// no matter how the `A` integral is balanced.
    LowSide,
}

impl Outer {
    fn map_at(&mut self, mu: f64, a: f64, b: f64) -> Result<TrajOutcome> {
        if self.evals >= self.budget {
            return Err(Error::NoConvergence {
                iters: self.evals,
                residual: f64::NAN,
            });
        }
        self.evals += 1;
        let ca = if mu == 0.0 { 0.0 } else { mu / a };
        frozen_trajectory(ca, self.lambda / b, self.lambda, self.quad_tol)
    }

    /// Resolve `A` at frozen `B` by a bracketed secant on the monotone
    /// defect `psi(A) = ln(\int e^{v} / A)`.
    ///
    /// Raising `A` weakens the `e^{v}` coefficient `mu/A`, lowering both the
    /// trajectory and `\int e^{v}`, so `psi` strictly decreases.  An upward
    /// escape marks `A` too small; a downward escape means the `e^{-v}`
    /// term wins even with the brake released, i.e. this `B` is infeasible.
    fn probe_b(&mut self, mu: f64, b: f64, tol: f64) -> Result<ProbeOutcome> {
        if mu == 0.0 {
            return match self.map_at(mu, 1.0, b)? {
                TrajOutcome::Ok(traj) => {
                    self.a_warm = traj.int_exp_v;
                    Ok(ProbeOutcome::Value(BProbe {
                        g: (traj.int_exp_neg_v / b).ln(),
                        a: traj.int_exp_v,
                    }))
                }
                TrajOutcome::Escapes => Ok(ProbeOutcome::LowSide),
            };
        }
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let mut lo_val: Option<f64> = None;
        let mut hi_val: Option<f64> = None;
        let mut hi_is_dive = false;
        let mut t = self.a_warm.ln();
        let mut walk = 1.0f64;
        for _ in 0..70 {
            let outcome = self.map_at(mu, t.exp(), b)?;
            match outcome {
                TrajOutcome::Ok(traj) => {
                    let psi = traj.int_exp_v.ln() - t;
                    if psi.abs() <= tol {
                        self.a_warm = t.exp();
                        return Ok(ProbeOutcome::Value(BProbe {
                            g: (traj.int_exp_neg_v / b).ln(),
                            a: t.exp(),
                        }));
                    }
                    if psi > 0.0 {
                        lo = t;
                        lo_val = Some(psi);
                    } else {
                        hi = t;
                        hi_val = Some(psi);
                        hi_is_dive = false;
                    }
                }
                TrajOutcome::Escapes => {
                    // Which way it escaped is decided by the branch.
                    if mu / t.exp() > self.lambda / b {
                        lo = t; // rising: A too small
                        lo_val = None;
                    } else {
                        hi = t; // diving: A too large (or B infeasible)
                        hi_val = None;
                        hi_is_dive = true;
                    }
                }
            }
            t = if lo == f64::NEG_INFINITY {
                walk *= 2.0;
                hi - walk
            } else if hi == f64::INFINITY {
                walk *= 2.0;
                lo + walk
            } else if hi - lo < 1e-13 {
                break;
            } else {
                match (lo_val, hi_val) {
                    (Some(gl), Some(gh)) => {
                        let candidate = (lo * gh - hi * gl) / (gh - gl);
                        let margin = 0.05 * (hi - lo);
                        candidate.clamp(lo + margin, hi - margin)
                    }
                    _ => 0.5 * (lo + hi),
                }
            };
            if !(-30.0..=25.0).contains(&t) {
                // A = \int e^{v} can never be this extreme; the defect has
                // no root at this B, which only happens left of the
                // feasible region.
                return Ok(ProbeOutcome::LowSide);
            }
        }
        if hi_is_dive {
            return Ok(ProbeOutcome::LowSide);
        }
        Err(Error::NoConvergence {
            iters: self.evals,
            residual: lo_val.or(hi_val).unwrap_or(f64::NAN),
        })
    }
}

/// Root-find `G(B) = ln(\int e^{-v(B)} / B) = 0` on the analytic bracket
/// `[I / w1_bound, I]` by Illinois secant with bisection safety.
///
/// `G` is strictly decreasing: shrinking `B` raises the frozen coefficient
/// `lambda/B`, deepens `v`, and inflates `\int e^{-v}`.  Left of the
/// feasible region the trajectory dives before `r = 1`; such probes carry
/// no value but still mark the low side of the bracket.
fn solve_bracketed(
    outer: &mut Outer,
    params: &CcpbParams,
    eig: &eigenvalue::Eigenvalue,
) -> Result<(f64, f64)> {
    let tol = params.outer_tol;
    let mu = params.mu;
    let q = mu / params.lambda;
    // Boundary bound e^{w(1)} < (1-q)^2 + (2-q) q e^{-u(1)}, with
    // e^{-u(1)} = 1 + lambda I / 2 exactly; it pins B = \int e^{-v} into
    // [I / w1_bound, I].
    let w1_bound = (1.0 - q).powi(2) + (2.0 - q) * q * (1.0 + 0.5 * params.lambda * eig.i);
    let mut lo = ((eig.i / w1_bound).max(1.0) * (1.0 - 1e-7)).ln();
    let mut hi = (eig.i * (1.0 + 1e-7)).ln();
    let mut g_lo: Option<f64> = None;
    let mut g_hi: Option<f64> = None;
    let mut best: Option<(f64, f64, f64)> = None; // (|g|, b, a)

    // First probe at the low edge: for small mu the bracket is already
    // tight around the root; for large mu this is the near-neutral side.
    let mut trial = lo;
    for _ in 0..240 {
        let outcome = outer.probe_b(mu, trial.exp(), tol)?;
        log::debug!(
            "ccpb bracket: B={:.8e} in [{:.6e},{:.6e}] -> {} (evals {})",
            trial.exp(),
            lo.exp(),
            hi.exp(),
            match &outcome {
                ProbeOutcome::Value(pr) => format!("G={:+.3e}", pr.g),
                ProbeOutcome::LowSide => "infeasible".to_string(),
            },
            outer.evals
        );
        match outcome {
            ProbeOutcome::Value(probe) => {
                if best.as_ref().map_or(true, |(bg, _, _)| probe.g.abs() < *bg) {
                    best = Some((probe.g.abs(), trial.exp(), probe.a));
                }
                if probe.g.abs() <= tol {
                    return Ok((probe.a, trial.exp()));
                }
                if probe.g > 0.0 {
                    lo = trial;
                    g_lo = Some(probe.g);
                } else {
                    hi = trial;
                    g_hi = Some(probe.g);
                }
            }
            ProbeOutcome::LowSide => {
                if trial >= hi {
                    return Err(Error::InvalidParams(format!(
                        "no feasible integral bracket for lambda={}, mu={}",
                        params.lambda, params.mu
                    )));
                }
                lo = trial;
                g_lo = None;
            }
        }
        if hi - lo < 1e-13 {
            // The bracket has collapsed; accept the best probe if it is
            // within an order of the tolerance.
            if let Some((bg, b, a)) = best {
                if bg <= 10.0 * tol {
                    return Ok((a, b));
                }
            }
            return Err(Error::NoConvergence {
                iters: outer.evals,
                residual: best.map_or(f64::NAN, |(bg, _, _)| bg),
            });
        }
        trial = match (g_lo, g_hi) {
            (Some(gl), Some(gh)) => {
                // Illinois-style secant in (ln B, G), clamped inside.
                let t = (lo * gh - hi * gl) / (gh - gl);
                let margin = 0.05 * (hi - lo);
                t.clamp(lo + margin, hi - margin)
            }
            _ => 0.5 * (lo + hi),
        };
    }
    Err(Error::NoConvergence {
        iters: outer.evals,
        residual: best.map_or(f64::NAN, |(bg, _, _)| bg),
    })
}

/// Solve the CCPB equation: a damped-Picard relaxation of the tame `A`
/// integral nested inside a bracketed secant on the stiff `B` integral,
/// with the fixed-point map evaluated through the first-integral
/// quadrature.
pub fn solve_ccpb(params: &CcpbParams) -> Result<CcpbSolution> {
    params.validate()?;
    let nodes = ccpb_grid(params.grid_size, params.lambda);

    // Neutrality: both nonlocal terms cancel and v = 0 exactly.
    if params.mu == params.lambda {
        let n = nodes.len();
        return Ok(CcpbSolution {
            params: params.clone(),
            nodes,
            v: vec![0.0; n],
            dv: vec![0.0; n],
            a: 1.0,
            b: 1.0,
            outer_iters: 0,
            converged: true,
        });
    }

    let eig = eigenvalue::solve_j_default(params.lambda)?;
    let k = eig.phase_rate();
    // Exact single-species integral \int e^{u} seeds the inner relaxation.
    let a0 = 0.5 + (2.0 * k).sin() / (4.0 * k);
    let q = params.mu / params.lambda;
    let mut outer = Outer {
        lambda: params.lambda,
        quad_tol: (params.ode_tol * 1e-2).max(1e-13),
        evals: 0,
        budget: params.max_outer_iters,
        // Near neutrality v is shallow and \int e^{v} is close to 1.
        a_warm: if q > 0.5 { 1.0 - q * (1.0 - a0) } else { a0 },
    };

    let (a, b) = solve_bracketed(&mut outer, params, &eig)?;
    let ca = if params.mu == 0.0 { 0.0 } else { params.mu / a };
    let cb = params.lambda / b;
    let TrajOutcome::Ok(traj) = frozen_trajectory(ca, cb, params.lambda, outer.quad_tol)? else {
        return Err(Error::NoConvergence {
            iters: outer.evals,
            residual: f64::NAN,
        });
    };
    let (v, dv) = traj.profile(ca, cb, &nodes);
    let solution = CcpbSolution {
        params: params.clone(),
        nodes,
        v,
        dv,
        a: traj.int_exp_v,
        b: traj.int_exp_neg_v,
        outer_iters: outer.evals,
        converged: true,
    };
    sanity_check(&solution)?;
    Ok(solution)
}

/// Loose structural checks every returned solution must satisfy; the strict
/// grid invariants live in [`CcpbSolution::validate`].
fn sanity_check(sol: &CcpbSolution) -> Result<()> {
    let p = &sol.params;
    let slope_tol = 100.0 * (p.ode_tol + p.outer_tol) * (1.0 + p.lambda + p.mu);
    let boundary_slope = sol.dv[sol.dv.len() - 1] - (p.mu - p.lambda);
    if boundary_slope.abs() > slope_tol {
        return Err(Error::InvariantViolation {
            name: "dv(1) = mu - lambda",
            index: sol.dv.len() - 1,
            r: 1.0,
            detail: format!("defect {boundary_slope:.3e} exceeds {slope_tol:.3e}"),
        });
    }
    let ab = sol.a * sol.b;
    if ab < 1.0 - 1e-9 {
        return Err(Error::InvariantViolation {
            name: "A*B >= 1",
            index: 0,
            r: 0.0,
            detail: format!("A*B = {ab}"),
        });
    }
    if p.mu > 0.0 && ab > p.lambda / p.mu * (1.0 + 1e-9) {
        return Err(Error::InvariantViolation {
            name: "A*B <= lambda/mu",
            index: 0,
            r: 0.0,
            detail: format!("A*B = {ab}, lambda/mu = {}", p.lambda / p.mu),
        });
    }
    Ok(())
}

impl CcpbSolution {
    /// Strict grid invariants: zero initial data, strict decrease and
    /// concavity (skipped in the neutral case), and the first integral
    /// `v'^2/2 = mu (e^v - 1)/A + lambda (e^{-v} - 1)/B` at every node.
    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if self.v[0] != 0.0 || self.dv[0] != 0.0 {
            return Err(Error::InvariantViolation {
                name: "v(0) = v'(0) = 0",
                index: 0,
                r: 0.0,
                detail: format!("v(0) = {}, v'(0) = {}", self.v[0], self.dv[0]),
            });
        }
        let neutral = p.mu == p.lambda;
        if !neutral {
            let strict = 1e-12 * (1.0 + p.lambda);
            for i in 1..self.v.len() {
                if self.v[i] >= self.v[i - 1] + strict {
                    return Err(Error::InvariantViolation {
                        name: "v strictly decreasing",
                        index: i,
                        r: self.nodes[i],
                        detail: format!("v[{}] = {}, v[{}] = {}", i - 1, self.v[i - 1], i, self.v[i]),
                    });
                }
                if self.dv[i] >= self.dv[i - 1] + strict {
                    return Err(Error::InvariantViolation {
                        name: "v strictly concave",
                        index: i,
                        r: self.nodes[i],
                        detail: format!(
                            "v'[{}] = {}, v'[{}] = {}",
                            i - 1,
                            self.dv[i - 1],
                            i,
                            self.dv[i]
                        ),
                    });
                }
            }
        }
        let fi_tol = 1e-6 * p.lambda * p.lambda.max(1.0);
        for i in 0..self.v.len() {
            let v = self.v[i];
            let defect = 0.5 * self.dv[i] * self.dv[i]
                - (p.mu * (v.exp() - 1.0) / self.a
                    + p.lambda * ((-v).exp() - 1.0) / self.b);
            if defect.abs() > fi_tol {
                return Err(Error::InvariantViolation {
                    name: "first integral",
                    index: i,
                    r: self.nodes[i],
                    detail: format!("defect {defect:.3e} exceeds {fi_tol:.3e}"),
                });
            }
        }
        Ok(())
    }

    /// CSV dump `r,v,dv,u,w` with the single-species profile on the same
    /// nodes.
    pub fn to_csv(&self) -> Result<String> {
        let sol = SingleSpeciesSolution::solve(self.params.lambda)?;
        let mut out = String::from("r,v,dv,u,w\n");
        for (i, &r) in self.nodes.iter().enumerate() {
            let u = sol.u_unchecked(r);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_g17(r),
                fmt_g17(self.v[i]),
                fmt_g17(self.dv[i]),
                fmt_g17(u),
                fmt_g17(self.v[i] - u),
            ));
        }
        Ok(out)
    }

    /// JSON sidecar `{lambda, mu, a, b, outer_iters, converged}`.
    #[must_use]
    pub fn sidecar_json(&self) -> String {
        serde_json::json!({
            "lambda": self.params.lambda,
            "mu": self.params.mu,
            "a": self.a,
            "b": self.b,
            "outer_iters": self.outer_iters,
            "converged": self.converged,
        })
        .to_string()
    }
}

/// Pointwise comparison `w = v - u`, `w' = v' - u'` against the closed form,
/// with the grid invariants asserted.
pub fn w_profile(ccpb: &CcpbSolution) -> Result<WProfile> {
    let p = &ccpb.params;
    let sol = SingleSpeciesSolution::solve(p.lambda)?;
    let mut w = Vec::with_capacity(ccpb.nodes.len());
    let mut dw = Vec::with_capacity(ccpb.nodes.len());
    for (i, &r) in ccpb.nodes.iter().enumerate() {
        w.push(ccpb.v[i] - sol.u_unchecked(r));
        dw.push(ccpb.dv[i] - sol.du_unchecked(r));
    }
    let profile = WProfile {
        nodes: ccpb.nodes.clone(),
        w,
        dw,
    };

    let w_slack = 2e-6 * (1.0 + (1.0 + p.lambda).ln());
    let dw_slack = 1e-6 * (1.0 + p.lambda + p.mu);
    let last = profile.w.len() - 1;
    for (i, &wi) in profile.w.iter().enumerate() {
        if wi < -w_slack {
            return Err(Error::InvariantViolation {
                name: "w >= 0",
                index: i,
                r: profile.nodes[i],
                detail: format!("w = {wi:.3e}"),
            });
        }
        if wi > profile.w[last] + w_slack {
            return Err(Error::InvariantViolation {
                name: "max w = w(1)",
                index: i,
                r: profile.nodes[i],
                detail: format!("w = {wi:.3e} exceeds w(1) = {:.3e}", profile.w[last]),
            });
        }
    }
    for (i, &dwi) in profile.dw.iter().enumerate() {
        if dwi < -dw_slack {
            return Err(Error::InvariantViolation {
                name: "w' >= 0",
                index: i,
                r: profile.nodes[i],
                detail: format!("w' = {dwi:.3e}"),
            });
        }
    }
    let dw1 = profile.dw[last];
    if (dw1 - p.mu).abs() > 1e-6 * (1.0 + p.lambda + p.mu) {
        return Err(Error::InvariantViolation {
            name: "w'(1) = mu",
            index: last,
            r: 1.0,
            detail: format!("w'(1) = {dw1:.6e}, mu = {}", p.mu),
        });
    }
    // Boundary bound: e^{w(1)} < (1 - mu/lambda)^2 + (2 - mu/lambda)(mu/lambda) e^{-u(1)}.
    let ratio = p.mu / p.lambda;
    let bound = (1.0 - ratio).powi(2)
        + (2.0 - ratio) * ratio * (-sol.u_unchecked(1.0)).exp();
    let ew1 = profile.w[last].exp();
    if ew1 > bound * (1.0 + 1e-9) + w_slack {
        return Err(Error::InvariantViolation {
            name: "e^{w(1)} below boundary bound",
            index: last,
            r: 1.0,
            detail: format!("e^w1 = {ew1:.12e}, bound = {bound:.12e}"),
        });
    }
    Ok(profile)
}

/// How `mu` is tied to `lambda` in a convergence sweep.
#[derive(Debug, Clone)]
pub enum MuRule {
    /// Explicit list of `mu` values, crossed with every `lambda`.
    MuList(Vec<f64>),
    /// `mu = c / lambda^beta`; `beta > 1` makes `mu lambda -> 0`.
    Coupled { c: f64, beta: f64 },
    /// `mu = gamma lambda`; the C1 distance does not vanish in this regime.
    Proportional { gamma: f64 },
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub mu: f64,
    pub sup_w: f64,
    pub sup_dw: f64,
    pub c1: f64,
}

/// Sweep `(lambda, mu)` pairs and report the C1 distance between the CCPB
/// and single-species solutions.  Per-point failures are reported in place
/// and do not abort the rest of the sweep.
pub fn convergence_study(
    lambdas: &[f64],
    rule: &MuRule,
    proto: &CcpbParams,
) -> Vec<Result<SweepRow>> {
    let mut points = Vec::new();
    for &lambda in lambdas {
        match rule {
            MuRule::MuList(mus) => {
                for &mu in mus {
                    points.push((lambda, mu));
                }
            }
            MuRule::Coupled { c, beta } => points.push((lambda, c / lambda.powf(*beta))),
            MuRule::Proportional { gamma } => points.push((lambda, gamma * lambda)),
        }
    }
    points
        .into_iter()
        .map(|(lambda, mu)| {
            let mut params = proto.clone();
            params.lambda = lambda;
            params.mu = mu;
            let sol = solve_ccpb(&params)?;
            let prof = w_profile(&sol)?;
            Ok(SweepRow {
                lambda,
                mu,
                sup_w: prof.sup_w(),
                sup_dw: prof.sup_dw(),
                c1: prof.c1_norm(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_structure() {
        let lambda = 1e3;
        let g = ccpb_grid(1000, lambda);
        assert_eq!(g.len(), 1001);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let layer_nodes = g.iter().filter(|&&r| r >= 1.0 - 20.0 / lambda).count();
        assert!(
            (350..=450).contains(&layer_nodes),
            "layer nodes: {layer_nodes}"
        );
        // Doubling nests the coarse nodes at even indices.
        let fine = ccpb_grid(2000, lambda);
        for (i, &r) in g.iter().enumerate() {
            assert!((fine[2 * i] - r).abs() < 1e-15, "node {i} not nested");
        }
    }

    #[test]
    fn symmetric_coefficients_give_zero() {
        let nodes = ccpb_grid(128, 50.0);
        let out = integrate_ivp_fixed(3.0, 3.0, &nodes, 4, 100.0).unwrap();
        assert!(out.v.iter().all(|&v| v == 0.0));
        assert!(out.dv.iter().all(|&s| s == 0.0));
        assert!((out.int_exp_v - 1.0).abs() < 1e-12);
        assert!((out.int_exp_neg_v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frozen_single_species_coefficient_reproduces_closed_form() {
        // coef_a = 0, coef_b = J: the IVP solution is 2 log cos(sqrt(J/2) r).
        let lambda = 1e2;
        let eig = eigenvalue::solve_j_default(lambda).unwrap();
        let nodes = ccpb_grid(800, lambda);
        let out = integrate_ivp(0.0, eig.j, &nodes, 1e-11, v_cap(lambda)).unwrap();
        let sol = SingleSpeciesSolution::from_eigenvalue(eig);
        let mut worst = 0.0f64;
        for (i, &r) in nodes.iter().enumerate() {
            worst = worst.max((out.v[i] - sol.u_unchecked(r)).abs());
        }
        assert!(worst < 1e-8, "sup error {worst}");
        assert!(
            ((out.int_exp_neg_v - eig.i) / eig.i).abs() < 1e-9,
            "B = {}, I = {}",
            out.int_exp_neg_v,
            eig.i
        );
    }

    #[test]
    fn substep_halving_shows_fourth_order() {
        // Richardson on the closed-form oracle at mu = 0.
        let lambda = 1e2;
        let eig = eigenvalue::solve_j_default(lambda).unwrap();
        let sol = SingleSpeciesSolution::from_eigenvalue(eig);
        let nodes = ccpb_grid(64, lambda);
        let err_at = |m: usize| -> f64 {
            let out = integrate_ivp_fixed(0.0, eig.j, &nodes, m, v_cap(lambda)).unwrap();
            nodes
                .iter()
                .enumerate()
                .fold(0.0f64, |w, (i, &r)| w.max((out.v[i] - sol.u_unchecked(r)).abs()))
        };
        let e2 = err_at(2);
        let e4 = err_at(4);
        let e8 = err_at(8);
        let order1 = (e2 / e4).log2();
        let order2 = (e4 / e8).log2();
        assert!(
            (3.5..=4.6).contains(&order1) && (3.5..=4.6).contains(&order2),
            "observed orders {order1:.2}, {order2:.2}"
        );
    }

    #[test]
    fn blow_up_detection() {
        // coef_b far above pi^2/2 has no global solution on [0,1].
        let nodes = ccpb_grid(128, 50.0);
        let res = integrate_ivp_fixed(0.0, 1e4, &nodes, 8, 50.0);
        assert!(matches!(res, Err(Error::BlowUp { .. })), "{res:?}");
    }

    #[test]
    fn neutral_case_is_exact() {
        let params = CcpbParams::new(1e4, 1e4);
        let sol = solve_ccpb(&params).unwrap();
        assert!(sol.v.iter().all(|&v| v == 0.0));
        assert_eq!(sol.a, 1.0);
        assert_eq!(sol.b, 1.0);
        assert!(sol.converged);
    }

    #[test]
    fn param_validation() {
        assert!(matches!(
            solve_ccpb(&CcpbParams::new(-1.0, 0.0)),
            Err(Error::NonPositiveLambda(_))
        ));
        assert!(matches!(
            solve_ccpb(&CcpbParams::new(10.0, 20.0)),
            Err(Error::InvalidParams(_))
        ));
        let mut p = CcpbParams::new(10.0, 1.0);
        p.grid_size = 10;
        assert!(matches!(solve_ccpb(&p), Err(Error::InvalidParams(_))));
        let mut p = CcpbParams::new(10.0, 1.0);
        p.damping = 1.5;
        assert!(matches!(solve_ccpb(&p), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn mu_zero_matches_single_species() {
        let mut params = CcpbParams::new(1e2, 0.0);
        params.grid_size = 800;
        let ccpb = solve_ccpb(&params).unwrap();
        let sol = SingleSpeciesSolution::solve(1e2).unwrap();
        let mut worst = 0.0f64;
        for (i, &r) in ccpb.nodes.iter().enumerate() {
            worst = worst.max((ccpb.v[i] - sol.u_unchecked(r)).abs());
        }
        assert!(worst <= 1e-6, "sup |v - u| = {worst:e}");
        let i_rel = ((ccpb.b - sol.eigenvalue().i) / sol.eigenvalue().i).abs();
        assert!(i_rel <= 1e-6, "B vs I: {i_rel:e}");
        ccpb.validate().unwrap();
    }

    #[test]
    fn small_mu_profile_invariants() {
        let mut params = CcpbParams::new(1e2, 1.0);
        params.grid_size = 600;
        let ccpb = solve_ccpb(&params).unwrap();
        ccpb.validate().unwrap();
        let prof = w_profile(&ccpb).unwrap();
        assert_eq!(prof.w[0], 0.0);
        // w'(1) = mu within tolerance.
        assert!((prof.dw.last().unwrap() - 1.0).abs() < 1e-4);
        // Squeeze: J < lambda/B < J e^{w(1)}.
        let eig = eigenvalue::solve_j_default(1e2).unwrap();
        let lam_over_b = 1e2 / ccpb.b;
        assert!(
            eig.j * (1.0 - 1e-9) < lam_over_b
                && lam_over_b < eig.j * prof.w.last().unwrap().exp() * (1.0 + 1e-9),
            "J = {}, lambda/B = {lam_over_b}",
            eig.j
        );
    }

    #[test]
    fn near_neutral_and_mid_ratio_converge() {
        for ratio in [0.9, 0.5, 0.1] {
            let mut params = CcpbParams::new(200.0, 200.0 * ratio);
            params.grid_size = 400;
            let ccpb = solve_ccpb(&params).unwrap();
            ccpb.validate().unwrap();
            w_profile(&ccpb).unwrap();
        }
    }

    #[test]
    fn profiles_order_pointwise_in_mu() {
        let mut sols = Vec::new();
        for mu in [100.0, 10.0, 1.0, 0.0] {
            let mut params = CcpbParams::new(100.0, mu);
            params.grid_size = 600;
            sols.push(solve_ccpb(&params).unwrap());
        }
        for pair in sols.windows(2) {
            let (hi, lo) = (&pair[0], &pair[1]);
            for i in 1..hi.v.len() {
                assert!(
                    hi.v[i] >= lo.v[i] - 1e-9,
                    "ordering fails at node {i}: mu={} gives {}, mu={} gives {}",
                    hi.params.mu,
                    hi.v[i],
                    lo.params.mu,
                    lo.v[i]
                );
            }
        }
        // C1 distance to u decreases as mu decreases.
        let mut prev = f64::INFINITY;
        for s in &sols {
            let c1 = w_profile(s).unwrap().c1_norm();
            assert!(c1 < prev, "mu = {}: c1 = {c1}", s.params.mu);
            prev = c1;
        }
    }

    #[test]
    fn mesh_refinement_self_consistency() {
        let mut coarse = CcpbParams::new(1e2, 1.0);
        coarse.grid_size = 400;
        let mut fine = coarse.clone();
        fine.grid_size = 800;
        let sol_c = solve_ccpb(&coarse).unwrap();
        let sol_f = solve_ccpb(&fine).unwrap();
        let mut worst = 0.0f64;
        for (i, &vc) in sol_c.v.iter().enumerate() {
            worst = worst.max((vc - sol_f.v[2 * i]).abs());
        }
        assert!(worst <= 10.0 * coarse.ode_tol * 100.0, "change {worst:e}");
    }

    #[test]
    fn convergence_study_fixed_lambda() {
        let mut proto = CcpbParams::new(1.0, 0.0);
        proto.grid_size = 400;
        let rows = convergence_study(
            &[1e2],
            &MuRule::MuList(vec![1e-1, 1e-2, 1e-3]),
            &proto,
        );
        let mut prev = f64::INFINITY;
        for row in rows {
            let row = row.unwrap();
            assert!(row.sup_w < prev, "sup_w = {}", row.sup_w);
            prev = row.sup_w;
        }
    }

    #[test]
    fn proportional_mu_keeps_distance_bounded_away() {
        let mut proto = CcpbParams::new(1.0, 0.0);
        proto.grid_size = 400;
        let rows = convergence_study(
            &[1e2, 1e3],
            &MuRule::Proportional { gamma: 0.5 },
            &proto,
        );
        for row in rows {
            let row = row.unwrap();
            assert!(
                row.c1 > 0.1,
                "c1 should stay bounded away from zero, got {}",
                row.c1
            );
        }
    }

    #[test]
    fn coupled_rule_direction() {
        let mut proto = CcpbParams::new(1.0, 0.0);
        proto.grid_size = 400;
        let rows: Vec<SweepRow> = convergence_study(
            &[1e2, 1e3],
            &MuRule::Coupled { c: 1.0, beta: 2.0 },
            &proto,
        )
        .into_iter()
        .map(|r| r.unwrap())
        .collect();
        assert!(rows[1].c1 < rows[0].c1);
        assert!((rows[0].mu - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn csv_and_sidecar_shapes() {
        let mut params = CcpbParams::new(1e2, 1.0);
        params.grid_size = 200;
        let sol = solve_ccpb(&params).unwrap();
        let csv = sol.to_csv().unwrap();
        assert!(csv.starts_with("r,v,dv,u,w\n"));
        assert_eq!(csv.lines().count(), sol.nodes.len() + 1);
        let sidecar: serde_json::Value = serde_json::from_str(&sol.sidecar_json()).unwrap();
        assert_eq!(sidecar["lambda"], 1e2);
        assert_eq!(sidecar["converged"], true);
        assert!(sidecar["outer_iters"].as_u64().unwrap() > 0);
    }
}
