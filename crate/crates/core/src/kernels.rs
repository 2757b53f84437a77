//! Geodesic-side kernels of the trace-formula decomposition.
//!
//! ```text
//! F(x)   = f̂(x/L) cos(τx) / sinh(x/2)
//! H_L(x) = (x/L) Σ_{k≥1} F(kx)                         (finite: F(kx) = 0 once kx > βL)
//! G_L(x) = (x/L) Σ_{k≥1} 1_{[0,L]}(kx) / sinh(kx/2)     (majorant of |H_L| when β = 1, sup|f̂| ≤ 1)
//! ```
//!
//! `H_L` diverges like `log(1/x)` as `x → 0`. Arguments below [`EVALUATION_FLOOR`] are
//! rejected. When the number of lattice terms `⌊βL/x⌋` exceeds [`DIRECT_TERMS`], the
//! first `EM_SPLIT - 1` terms are summed directly and the rest by Euler–Maclaurin
//! (integral, endpoint and first-derivative corrections); the dropped remainder is of
//! relative size `EM_SPLIT^-4`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier_pairs::TestFunctionPair;
use crate::quadrature::Quadrature;

pub const EVALUATION_FLOOR: f64 = 1e-12;

/// Largest lattice-term count summed term by term.
pub const DIRECT_TERMS: u64 = 1 << 20;

/// First lattice index handled by the Euler–Maclaurin tail.
pub const EM_SPLIT: u64 = 4096;

/// Sharp lower bound `4 arcsinh(1)` on the length of a non-simple closed geodesic.
pub const NONSIMPLE_LENGTH_LOWER_BOUND: f64 = 3.525_494_348_078_172;

pub fn nonsimple_length_lower_bound() -> f64 {
    4.0 * 1f64.asinh()
}

/// Collar bound: a closed geodesic crossing a simple geodesic of length `l` has length
/// greater than `2 arcsinh(1 / sinh(l/2))`.
pub fn crossing_length_lower_bound(l: f64) -> f64 {
    2.0 * (1.0 / (0.5 * l).sinh()).asinh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    l: f64,
    tau: f64,
    pair: TestFunctionPair,
}

impl KernelParams {
    pub fn new(l: f64, tau: f64, pair: TestFunctionPair) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidParameter("L must be positive".into()));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidParameter("tau must be nonnegative".into()));
        }
        Ok(Self { l, tau, pair })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn pair(&self) -> &TestFunctionPair {
        &self.pair
    }

    /// Same window with a different center.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.l, tau, self.pair)
    }

    /// `βL`, the end of the geodesic-length window.
    pub fn cutoff(&self) -> f64 {
        self.pair.beta() * self.l
    }
}

/// `1 / sinh(z)` for `z > 0`, without overflow for large `z`.
pub fn inv_sinh(z: f64) -> f64 {
    if z > 30.0 {
        let e = (-z).exp();
        2.0 * e / (1.0 - e * e)
    } else {
        1.0 / z.sinh()
    }
}

/// `ln sinh(z)` for `z > 0`.
pub fn ln_sinh(z: f64) -> f64 {
    if z < 20.0 {
        z.sinh().ln()
    } else {
        z - std::f64::consts::LN_2 + (-(-2.0 * z).exp()).ln_1p()
    }
}

/// `sinh(y) / sinh(k y)` for `y > 0`, `k >= 1`.
pub fn sinh_ratio(y: f64, k: f64) -> f64 {
    let ky = k * y;
    if ky > 30.0 {
        // e^{-(k-1)y} (1 - e^{-2y}) / (1 - e^{-2ky})
        (-(k - 1.0) * y).exp() * (-(-2.0 * y).exp_m1()) / (1.0 - (-2.0 * ky).exp())
    } else if y == 0.0 {
        1.0 / k
    } else {
        y.sinh() / ky.sinh()
    }
}

fn check_argument(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositiveArgument(x));
    }
    if x < EVALUATION_FLOOR {
        return Err(Error::BelowEvaluationFloor(x));
    }
    Ok(())
}

/// `F(x) = f̂(x/L) cos(xτ) / sinh(x/2)`, exactly zero for `x > βL`.
pub fn eval_f_kernel(p: &KernelParams, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositiveArgument(x));
    }
    Ok(f_kernel(p, x))
}

#[inline]
fn f_kernel(p: &KernelParams, x: f64) -> f64 {
    if x > p.cutoff() {
        return 0.0;
    }
    let fhat = p.pair.eval_fhat(x / p.l);
    if fhat == 0.0 {
        return 0.0;
    }
    fhat * (x * p.tau).cos() * inv_sinh(0.5 * x)
}

#[inline]
fn f_kernel_derivative(p: &KernelParams, t: f64) -> f64 {
    let u = t / p.l;
    let (s, c) = (t * p.tau).sin_cos();
    let phi = p.pair.eval_fhat(u) * c;
    let dphi = p.pair.eval_fhat_derivative(u) / p.l * c - p.tau * p.pair.eval_fhat(u) * s;
    let is = inv_sinh(0.5 * t);
    let coth = 1.0 / (0.5 * t).tanh();
    dphi * is - 0.5 * phi * coth * is
}

/// `Σ_{k=1}^{terms} F(kx)` times `x/L`, summed term by term.
pub fn hl_partial_sum(p: &KernelParams, x: f64, terms: u64) -> Result<f64> {
    check_argument(x)?;
    let s: f64 = (1..=terms).map(|k| f_kernel(p, k as f64 * x)).sum();
    Ok(x / p.l * s)
}

/// Number of nonzero lattice terms in `H_L(x)`.
pub fn hl_term_count(p: &KernelParams, x: f64) -> u64 {
    (p.cutoff() / x).floor() as u64
}

/// `H_L(x) = (x/L) Σ_{k=1}^{⌊βL/x⌋} F(kx)`.
pub fn eval_hl(p: &KernelParams, x: f64) -> Result<f64> {
    check_argument(x)?;
    let terms = hl_term_count(p, x);
    if terms == 0 {
        return Ok(0.0);
    }
    if terms <= DIRECT_TERMS {
        return hl_partial_sum(p, x, terms);
    }
    let head: f64 = (1..EM_SPLIT).map(|k| f_kernel(p, k as f64 * x)).sum();
    let tail = euler_maclaurin_tail(
        |t| f_kernel(p, t),
        |t| f_kernel_derivative(p, t),
        x,
        EM_SPLIT,
        terms,
        p.tau,
    )?;
    Ok(x / p.l * (head + tail))
}

/// `G_L(x) = (x/L) Σ_{k: kx ≤ L} 1 / sinh(kx/2)`.
pub fn eval_gl(p: &KernelParams, x: f64) -> Result<f64> {
    check_argument(x)?;
    let terms = (p.l / x).floor() as u64;
    if terms == 0 {
        return Ok(0.0);
    }
    let g = |t: f64| if t > p.l { 0.0 } else { inv_sinh(0.5 * t) };
    if terms <= DIRECT_TERMS {
        let s: f64 = (1..=terms).map(|k| g(k as f64 * x)).sum();
        return Ok(x / p.l * s);
    }
    let head: f64 = (1..EM_SPLIT).map(|k| g(k as f64 * x)).sum();
    let tail = euler_maclaurin_tail(
        |t| inv_sinh(0.5 * t),
        |t| -0.5 * inv_sinh(0.5 * t) / (0.5 * t).tanh(),
        x,
        EM_SPLIT,
        terms,
        0.0,
    )?;
    Ok(x / p.l * (head + tail))
}

/// `Σ_{k=first}^{last} g(kx)` by Euler–Maclaurin through the `B_2` correction.
fn euler_maclaurin_tail<G, D>(
    g: G,
    dg: D,
    x: f64,
    first: u64,
    last: u64,
    frequency: f64,
) -> Result<f64>
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let a = first as f64 * x;
    let b = last as f64 * x;
    // Geometric breakpoints resolve the 1/t profile near a.
    let mut breaks = vec![a];
    let mut t = 2.0 * a;
    while t < b {
        breaks.push(t);
        t *= 2.0;
    }
    breaks.push(b);
    let quad = Quadrature::default()
        .with_rel_tol(1e-13)
        .with_abs_tol(1e-16 * x);
    let integral = quad
        .integrate_oscillatory(&g, a, b, frequency, &breaks)?
        .value;
    Ok(integral / x + 0.5 * (g(a) + g(b)) + x / 12.0 * (dg(b) - dg(a)))
}

/// Whether `sinh(y) / sinh(ky) < 2 e^{-(k-1)y}` holds at `(k, y)`.
pub fn sinh_ratio_bound_check(k: u32, y: f64) -> bool {
    assert!(k >= 1 && y > 0.0, "requires k >= 1 and y > 0");
    let kf = k as f64;
    let lhs = ln_sinh(y) - ln_sinh(kf * y);
    let rhs = std::f64::consts::LN_2 - (kf - 1.0) * y;
    lhs < rhs
}
