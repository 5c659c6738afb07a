//! Shared numerical plumbing: graded meshes, composite Simpson quadrature
//! with refinement, geometric parameter grids, and log-log slope fits.

use crate::error::{Error, Result};

/// Geometric grid of `n` points from `start` to `end` (inclusive).
#[must_use]
pub fn geometric_grid(start: f64, end: f64, n: usize) -> Vec<f64> {
    assert!(start > 0.0 && end > 0.0 && n >= 1);
    if n == 1 {
        return vec![start];
    }
    let log_step = (end / start).ln() / (n - 1) as f64;
    (0..n).map(|i| start * (i as f64 * log_step).exp()).collect()
}

/// Least-squares slope of `y` against `x`.
#[must_use]
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `ln |y|` against `ln x`, the observed order of a residual sweep.
#[must_use]
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().max(f64::MIN_POSITIVE).ln()).collect();
    least_squares_slope(&lx, &ly)
}

/// Mesh on `[a, b]` graded toward `b`, where the integrand varies on the
/// scale `boundary_scale` near `b`.
///
/// Cubic power-law grading covers the whole interval and a uniform patch of
/// width `min(10 * boundary_scale, b - a)` with `n` extra nodes resolves the
/// layer itself, so roughly half of all nodes sit inside the layer.
#[must_use]
pub fn graded_mesh(a: f64, b: f64, boundary_scale: f64, n: usize) -> Vec<f64> {
    assert!(b > a && n >= 8);
    let span = b - a;
    let mut nodes = Vec::with_capacity(2 * n + 2);
    for i in 0..=n {
        let s = 1.0 - i as f64 / n as f64;
        nodes.push(b - span * s * s * s);
    }
    let patch = (10.0 * boundary_scale).min(span);
    if patch > 0.0 && patch < span {
        for i in 0..n {
            nodes.push(b - patch * (i as f64 / n as f64));
        }
    }
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    nodes.dedup_by(|x, y| (*x - *y).abs() <= f64::EPSILON * span);
    // Endpoints must survive the dedup exactly.
    *nodes.first_mut().unwrap() = a;
    *nodes.last_mut().unwrap() = b;
    nodes
}

/// Composite Simpson rule over an arbitrary partition: a 3-point rule on
/// every interval, with midpoint evaluations.
pub fn simpson_on_mesh(mut f: impl FnMut(f64) -> f64, mesh: &[f64]) -> f64 {
    let mut total = 0.0;
    for pair in mesh.windows(2) {
        let (x0, x1) = (pair[0], pair[1]);
        let xm = 0.5 * (x0 + x1);
        total += (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(xm) + f(x1));
    }
    total
}

/// Integrate `f` over `[a, b]` on a boundary-graded mesh, doubling the node
/// count until the value changes by no more than `rel_tol` in relative terms.
pub fn integrate_graded(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    boundary_scale: f64,
    rel_tol: f64,
) -> Result<f64> {
    let mut n = 64;
    let mut prev = simpson_on_mesh(&mut f, &graded_mesh(a, b, boundary_scale, n));
    let mut change = f64::INFINITY;
    for _ in 0..14 {
        n *= 2;
        let cur = simpson_on_mesh(&mut f, &graded_mesh(a, b, boundary_scale, n));
        change = (cur - prev).abs() / cur.abs().max(f64::MIN_POSITIVE);
        if change <= rel_tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureStall(change))
}

/// Integrate `f` over `[a, b]` on uniform meshes, doubling until converged.
/// For smooth integrands without a boundary layer.
pub fn integrate_uniform(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64> {
    let uniform = |n: usize| -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    };
    let mut n = 32;
    let mut prev = simpson_on_mesh(&mut f, &uniform(n));
    let mut change = f64::INFINITY;
    for _ in 0..16 {
        n *= 2;
        let cur = simpson_on_mesh(&mut f, &uniform(n));
        change = (cur - prev).abs() / cur.abs().max(f64::MIN_POSITIVE);
        if change <= rel_tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureStall(change))
}

/// Format a float with 17 significant digits, the fixed text format of every
/// CSV the tools emit (deterministic and round-trip exact).
#[must_use]
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    format!("{x:.16e}")
}
