//! Numerically stable evaluation of the Sinc function and series, step-size
//! grids, B-spline and Chebyshev bases, and input transformations.

use serde::{Deserialize, Serialize};

use crate::autodiff::Scalar;
use crate::error::{Error, Result};

/// Below this |x| the direct sin(x)/x quotient is replaced by its Taylor
/// polynomial; the truncation error there (< 1e-17) is below unit roundoff.
const SINC_TAYLOR_CUTOFF: f64 = 1e-4;

/// The quotient forms of sinc' and sinc'' cancel catastrophically near 0,
/// so they switch to series earlier than sinc itself.
const SINC_DERIV_TAYLOR_CUTOFF: f64 = 1e-2;

/// sin(x)/x with the removable singularity filled by its Taylor polynomial.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_TAYLOR_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// sinc and its first two derivatives at `x`.
///
/// Derivatives follow the recursion x·s_n + n·s_{n-1} = sin^(n)(x), with
/// series fallbacks where the quotient form loses digits.
#[inline]
pub fn sinc_d012(x: f64) -> (f64, f64, f64) {
    let ax = x.abs();
    if ax < SINC_DERIV_TAYLOR_CUTOFF {
        let x2 = x * x;
        let s0 = if ax < SINC_TAYLOR_CUTOFF {
            1.0 - x2 / 6.0 + x2 * x2 / 120.0
        } else {
            x.sin() / x
        };
        let s1 = x * (-1.0 / 3.0 + x2 * (1.0 / 30.0 - x2 / 840.0));
        let s2 = -1.0 / 3.0 + x2 * (0.1 - x2 / 168.0);
        (s0, s1, s2)
    } else {
        let (sin, cos) = x.sin_cos();
        let s0 = sin / x;
        let s1 = (cos - s0) / x;
        let s2 = (-sin - 2.0 * s1) / x;
        (s0, s1, s2)
    }
}

/// Generic sinc for derivative-carrying scalars; used by basis evaluation.
#[inline]
pub fn sinc_s<S: Scalar>(x: S) -> S {
    x.sinc()
}

/// The translated, scaled cardinal function S(j, h)(x) =
/// sinc((pi/h)(x - jh)): equals 1 at its own node jh and 0 at every other
/// integer multiple of h.
#[inline]
pub fn sinc_series(j: i64, h: f64, x: f64) -> f64 {
    let u = std::f64::consts::PI * ((x - j as f64 * h) / h);
    sinc(u)
}

/// Cardinal interpolation from samples f(jh) for j = -n..=n.
///
/// When `x` lands bit-exactly on a node the sample is returned directly;
/// interpolation theory makes the series collapse there and the shortcut
/// keeps the cardinal property exact in floating point as well.
pub fn sinc_interpolate(samples: &[f64], h: f64, x: f64) -> Result<f64> {
    if samples.len() % 2 != 1 {
        return Err(Error::shape(
            "sinc_interpolate",
            format!("expected an odd sample count (j = -N..=N), got {}", samples.len()),
        ));
    }
    if h <= 0.0 {
        return Err(Error::domain("sinc_interpolate", format!("h must be positive, got {h}")));
    }
    let n = (samples.len() / 2) as i64;
    for (idx, j) in (-n..=n).enumerate() {
        if x == j as f64 * h {
            return Ok(samples[idx]);
        }
    }
    let mut acc = 0.0;
    for (idx, j) in (-n..=n).enumerate() {
        acc += samples[idx] * sinc_series(j, h, x);
    }
    Ok(acc)
}

/// Optimal Sinc step size sqrt(pi d / (beta N)) for a function analytic in a
/// strip of half-width `d` decaying like exp(-beta |x|).
pub fn optimal_step(d: f64, beta: f64, n: usize) -> Result<f64> {
    if d <= 0.0 || beta <= 0.0 || n == 0 {
        return Err(Error::domain(
            "optimal_step",
            format!("all arguments must be positive: d={d}, beta={beta}, n={n}"),
        ));
    }
    Ok((std::f64::consts::PI * d / (beta * n as f64)).sqrt())
}

/// How successive step sizes h_i decay from the base h0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HScheme {
    /// h_i = 1 / (i h0), i = 1..=M
    Inverse,
    /// h_i = 1 / h0^i, i = 1..=M
    Exponential,
}

/// The ordered set {h_i} of Sinc step sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HGrid {
    pub scheme: HScheme,
    pub h0: f64,
    pub m: usize,
    /// The step sizes; rebuilt from (scheme, h0, m) when absent so hand
    /// written configs may omit them.
    #[serde(default)]
    pub values: Vec<f64>,
}

/// Build the step-size set for `scheme` with base `h0 > 1` and `m >= 1`
/// entries. Values are strictly decreasing and lie in (0, 1).
pub fn make_hgrid(scheme: HScheme, h0: f64, m: usize) -> Result<HGrid> {
    if !(h0 > 1.0) {
        return Err(Error::domain("make_hgrid", format!("h0 must exceed 1, got {h0}")));
    }
    if m < 1 {
        return Err(Error::domain("make_hgrid", "M must be at least 1"));
    }
    let values = (1..=m)
        .map(|i| match scheme {
            HScheme::Inverse => 1.0 / (i as f64 * h0),
            HScheme::Exponential => h0.powi(-(i as i32)),
        })
        .collect();
    Ok(HGrid { scheme, h0, m, values })
}

/// Symmetric node set for a Sinc activation of the given degree.
///
/// Nodes are j in -N..=N with N = floor(degree / 2); for even degrees this
/// rounds the node count up to the odd 2N+1 that the reported parameter
/// counts correspond to (degree 100 -> 101 nodes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SincNodeSet {
    pub degree: usize,
    pub half_width: i64,
}

impl SincNodeSet {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::domain("SincNodeSet", "degree must be positive"));
        }
        Ok(SincNodeSet { degree, half_width: (degree / 2) as i64 })
    }

    pub fn count(&self) -> usize {
        2 * self.half_width as usize + 1
    }

    pub fn nodes(&self) -> impl Iterator<Item = i64> {
        -self.half_width..=self.half_width
    }
}

/// The normalized transformation applied ahead of Sinc evaluation.
#[inline]
pub fn input_transform(x: f64) -> f64 {
    x.tanh()
}

/// psi(x) = log((x - a) / (b - x)), mapping (a, b) onto the real line.
pub fn log_transform(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a < x && x < b) {
        return Err(Error::domain(
            "log_transform",
            format!("x = {x} outside the open interval ({a}, {b})"),
        ));
    }
    Ok(((x - a) / (b - x)).ln())
}

/// Inverse of [`log_transform`]: the logistic map from the real line back
/// onto (a, b).
pub fn log_transform_inv(xi: f64, a: f64, b: f64) -> f64 {
    // a + (b-a) * sigmoid(xi), written to avoid overflow on either tail
    if xi >= 0.0 {
        let e = (-xi).exp();
        (a * e + b) / (1.0 + e)
    } else {
        let e = xi.exp();
        (a + b * e) / (1.0 + e)
    }
}

/// Clamped cubic B-spline basis on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SplineGrid {
    /// Full knot vector with 4-fold end knots.
    pub knots: Vec<f64>,
    /// Number of basis functions.
    pub count: usize,
}

pub const SPLINE_ORDER: usize = 4; // cubic

impl SplineGrid {
    /// `count >= 4` cubic basis functions with clamped uniform knots on [-1, 1].
    pub fn new(count: usize) -> Result<Self> {
        if count < SPLINE_ORDER {
            return Err(Error::domain(
                "SplineGrid",
                format!("need at least {SPLINE_ORDER} cubic basis functions, got {count}"),
            ));
        }
        let interior = count - SPLINE_ORDER;
        let mut knots = vec![-1.0; SPLINE_ORDER];
        for i in 1..=interior {
            knots.push(-1.0 + 2.0 * i as f64 / (interior + 1) as f64);
        }
        knots.extend(std::iter::repeat(1.0).take(SPLINE_ORDER));
        Ok(SplineGrid { knots, count })
    }
}

/// Cox-de Boor cubic basis values at `x` (callers clamp into [-1, 1]).
/// Non-negative, and they sum to 1 on the domain.
pub fn bspline_basis(grid: &SplineGrid, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; grid.count];
    bspline_basis_into(grid, x, &mut out);
    out
}

pub fn bspline_basis_into(grid: &SplineGrid, x: f64, out: &mut [f64]) {
    bspline_basis_s(grid, x, out);
}

/// Cox-de Boor recursion up to `order`, in any scalar arithmetic. Knot-span
/// membership branches on the value, which is the piecewise-selection
/// convention for derivative-carrying scalars too.
fn cox_de_boor<S: Scalar>(grid: &SplineGrid, x: S, order: usize, out: &mut [S]) {
    let t = &grid.knots;
    let n = grid.count;
    let xv = x.value();
    let last = t[t.len() - 1];
    let mut prev = vec![S::zero(); n + SPLINE_ORDER - 1];
    for (i, slot) in prev.iter_mut().enumerate() {
        let lo = t[i];
        let hi = t[i + 1];
        *slot = if (lo <= xv && xv < hi) || (xv == hi && hi == last && lo < hi) {
            S::one()
        } else {
            S::zero()
        };
    }
    let mut cur = vec![S::zero(); n + SPLINE_ORDER - 1];
    for k in 2..=order {
        for i in 0..(n + SPLINE_ORDER - k) {
            let mut acc = S::zero();
            let denom_l = t[i + k - 1] - t[i];
            if denom_l > 0.0 {
                acc += (x - S::constant(t[i])).scale(1.0 / denom_l) * prev[i];
            }
            let denom_r = t[i + k] - t[i + 1];
            if denom_r > 0.0 {
                acc += (S::constant(t[i + k]) - x).scale(1.0 / denom_r) * prev[i + 1];
            }
            cur[i] = acc;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    out.copy_from_slice(&prev[..out.len()]);
}

/// Generic cubic basis evaluation (see [`bspline_basis`]).
pub fn bspline_basis_s<S: Scalar>(grid: &SplineGrid, x: S, out: &mut [S]) {
    debug_assert_eq!(out.len(), grid.count);
    cox_de_boor(grid, x, SPLINE_ORDER, out);
}

/// Cubic basis values together with first derivatives at `x`:
/// N'_{i,4} = 3 (N_{i,3}/(t_{i+3}-t_i) - N_{i+1,3}/(t_{i+4}-t_{i+1})).
pub fn bspline_basis_and_deriv(grid: &SplineGrid, x: f64, values: &mut [f64], derivs: &mut [f64]) {
    bspline_basis_and_deriv_s(grid, x, values, derivs);
}

pub fn bspline_basis_and_deriv_s<S: Scalar>(
    grid: &SplineGrid,
    x: S,
    values: &mut [S],
    derivs: &mut [S],
) {
    bspline_basis_s(grid, x, values);
    let t = &grid.knots;
    let n = grid.count;
    let mut quad = vec![S::zero(); n + 1];
    cox_de_boor(grid, x, SPLINE_ORDER - 1, &mut quad);
    for i in 0..n {
        let mut d = S::zero();
        let denom_l = t[i + 3] - t[i];
        if denom_l > 0.0 {
            d += quad[i].scale(1.0 / denom_l);
        }
        let denom_r = t[i + 4] - t[i + 1];
        if denom_r > 0.0 {
            d = d - quad[i + 1].scale(1.0 / denom_r);
        }
        derivs[i] = d.scale(3.0);
    }
}

/// Chebyshev features T_0..T_degree at `x` via the three-term recurrence.
pub fn chebyshev_features(degree: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; degree + 1];
    chebyshev_features_into(degree, x, &mut out);
    out
}

pub fn chebyshev_features_into(degree: usize, x: f64, out: &mut [f64]) {
    chebyshev_features_s(degree, x, out);
}

pub fn chebyshev_features_s<S: Scalar>(degree: usize, x: S, out: &mut [S]) {
    debug_assert_eq!(out.len(), degree + 1);
    out[0] = S::one();
    if degree == 0 {
        return;
    }
    out[1] = x;
    for k in 1..degree {
        out[k + 1] = x.scale(2.0) * out[k] - out[k - 1];
    }
}

/// T values and derivatives: T'_{k+1} = 2 T_k + 2x T'_k - T'_{k-1}.
pub fn chebyshev_features_and_deriv(degree: usize, x: f64, values: &mut [f64], derivs: &mut [f64]) {
    chebyshev_features_and_deriv_s(degree, x, values, derivs);
}

pub fn chebyshev_features_and_deriv_s<S: Scalar>(
    degree: usize,
    x: S,
    values: &mut [S],
    derivs: &mut [S],
) {
    chebyshev_features_s(degree, x, values);
    derivs[0] = S::zero();
    if degree == 0 {
        return;
    }
    derivs[1] = S::one();
    for k in 1..degree {
        derivs[k + 1] = values[k].scale(2.0) + x.scale(2.0) * derivs[k] - derivs[k - 1];
    }
}
