//! Large-genus Weil–Petersson limits of the oscillatory term.
//!
//! Expectation:
//!
//! ```text
//! I_f(L,τ) = Σ_k J_k,   J_k = (4/L) ∫_0^{βL/k} f̂(kx/L) sinh²(x/2)/sinh(kx/2) cos(kτx) dx
//!          = ∫_0^∞ H_L(ℓ) R(ℓ) ℓ dℓ,   R(ℓ) = (sinh(ℓ/2)/(ℓ/2))²
//! ```
//!
//! Second moment, summed over simple non-separating geodesics and pairs of them:
//!
//! ```text
//! lim E[(N^osc)²] = 2 Σ_{k1,k2≥1} I_L(k1,k2) + I_f²
//! I_L(k1,k2) = 4 ∫_0^{β/max(k1,k2)} x f̂(k1x) f̂(k2x) ρ_{k1}(Lx/2) ρ_{k2}(Lx/2)
//!                  cos(τk1Lx) cos(τk2Lx) dx,             ρ_k(y) = sinh(y)/sinh(ky)
//! ```
//!
//! The `(1,1)` term splits into the GOE variance `2∫|x|f̂²` plus an oscillating
//! remainder `4∫_0^β x f̂(x)² cos(2τLx) dx`; pairs with `k1 + k2 <= k_budget` are
//! integrated exactly and the rest is covered by a certified tail majorant built from
//! `ρ_k(y) <= min(1/k, 2e^{-(k-1)y})`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier_pairs::TestFunctionPair;
use crate::goe_reference::sigma2_goe_closed_form;
use crate::kernels::{self, sinh_ratio, KernelParams};
use crate::quadrature::Quadrature;

/// `R(ℓ) = (sinh(ℓ/2) / (ℓ/2))²`, the large-genus volume-ratio weight of a simple
/// non-separating geodesic of length `ℓ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SinhWeight;

impl SinhWeight {
    pub fn eval(&self, l: f64) -> f64 {
        let h = 0.5 * l.abs();
        if h < 1e-4 {
            1.0 + l * l / 12.0
        } else {
            let r = h.sinh() / h;
            r * r
        }
    }
}

pub fn sinh_weight(l: f64) -> f64 {
    SinhWeight.eval(l)
}

fn quad() -> Quadrature {
    Quadrature::default().with_abs_tol(1e-17)
}

/// `J_k`, the `k`-th iterate's share of `I_f`.
pub fn i_f_term(p: &KernelParams, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let (l, tau) = (p.l(), p.tau());
    let pair = *p.pair();
    let kf = k as f64;
    let end = p.cutoff() / kf;
    let integrand = |x: f64| {
        let y = 0.5 * x;
        // sinh²(y) / sinh(ky) = sinh(y) ρ_k(y)
        pair.eval_fhat(kf * x / l) * y.sinh() * sinh_ratio(y, kf) * (kf * tau * x).cos()
    };
    let r = quad().integrate_oscillatory(integrand, 0.0, end, kf * tau, &[])?;
    Ok(4.0 / l * r.value)
}

/// `Σ_{k>K} k^{-s}` for `s > 1`: direct terms up to 19, then Euler–Maclaurin.
fn zeta_tail(s: f64, k: u32) -> f64 {
    // B_2j / (2j)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let start = (k + 1).max(20);
    let head: f64 = (k + 1..start).map(|j| (j as f64).powf(-s)).sum();
    let n = start as f64;
    let mut sum = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) times n^{-s-2j+1}
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        sum += b * rising * power;
        let j2 = 2.0 * (j as f64 + 1.0);
        rising *= (s + j2 - 1.0) * (s + j2);
        power /= n * n;
    }
    head + sum
}

/// `T_K(a) = Σ_{k>K} sinh²(a/k) / k` via `sinh²(z) = Σ_n 2^{2n-1} z^{2n} / (2n)!`.
struct IterateTail {
    coefficients: Vec<f64>,
}

impl IterateTail {
    fn new(k: u32) -> Self {
        let mut coefficients = Vec::with_capacity(40);
        let mut c = 1.0; // 2^{2n-1}/(2n)! at n = 1
        for n in 1..=40u32 {
            coefficients.push(c * zeta_tail(2.0 * n as f64 + 1.0, k));
            let nf = n as f64;
            c *= 4.0 / ((2.0 * nf + 1.0) * (2.0 * nf + 2.0));
        }
        Self { coefficients }
    }

    fn eval(&self, a: f64) -> f64 {
        let a2 = a * a;
        let mut power = a2;
        let mut sum = 0.0;
        for &c in &self.coefficients {
            let term = c * power;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            power *= a2;
        }
        sum
    }
}

/// `I_f` split into the per-iterate terms `J_1..J_K` and the exactly summed remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationLimit {
    pub value: f64,
    /// `J_1, ..., J_K`
    pub per_k: Vec<f64>,
    /// `Σ_{k>K} J_k`
    pub remainder: f64,
}

impl ExpectationLimit {
    /// `Σ_{k≥2} J_k`.
    pub fn beyond_first(&self) -> f64 {
        self.per_k[1..].iter().sum::<f64>() + self.remainder
    }

    /// `Σ_{k≥3} J_k`, the part bounded by `1/L` uniformly in `τ`.
    pub fn beyond_second(&self) -> f64 {
        self.per_k[2..].iter().sum::<f64>() + self.remainder
    }
}

/// Number of per-iterate integrals before the remainder series takes over.
pub fn default_iterate_split(p: &KernelParams) -> u32 {
    (p.cutoff().ceil() as u32).max(8)
}

/// `I_f(L, τ)` with the default iterate split.
pub fn i_f(p: &KernelParams) -> Result<f64> {
    Ok(i_f_detailed(p, default_iterate_split(p))?.value)
}

/// `I_f(L, τ) = Σ_{k≤K} J_k + Σ_{k>K} J_k`.
///
/// The remainder uses `u = kx`, under which every `J_k` carries the same oscillation:
/// `Σ_{k>K} J_k = 4 ∫_0^β f̂(u) cos(τLu) T_K(Lu/2) / sinh(Lu/2) du` with
/// `T_K(a) = Σ_{k>K} sinh²(a/k)/k`. Requires `K >= βL/2` so that the power series for
/// `T_K` converges quickly.
pub fn i_f_detailed(p: &KernelParams, iterate_split: u32) -> Result<ExpectationLimit> {
    if iterate_split < 2 || (iterate_split as f64) < 0.5 * p.cutoff() {
        return Err(Error::InvalidParameter(
            "iterate split must be >= max(2, beta*L/2)".into(),
        ));
    }
    if p.cutoff() > 1400.0 {
        return Err(Error::InvalidParameter(
            "beta*L above 1400 overflows sinh".into(),
        ));
    }
    let per_k = (1..=iterate_split)
        .into_par_iter()
        .map(|k| i_f_term(p, k))
        .collect::<Result<Vec<f64>>>()?;
    let tail = IterateTail::new(iterate_split);
    let (l, tau) = (p.l(), p.tau());
    let pair = *p.pair();
    let integrand = |u: f64| {
        let a = 0.5 * l * u;
        pair.eval_fhat(u) * (tau * l * u).cos() * tail.eval(a) * kernels::inv_sinh(a)
    };
    let remainder = 4.0
        * quad()
            .integrate_oscillatory(integrand, 0.0, pair.beta(), tau * l, &[])?
            .value;
    let value = per_k.iter().sum::<f64>() + remainder;
    Ok(ExpectationLimit {
        value,
        per_k,
        remainder,
    })
}

/// Finite-genus expectation of the simple non-separating sum as a band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationBand {
    pub central: f64,
    pub half_width: f64,
}

/// `(I_f, envelope_c ∫ |H_L(ℓ)| R(ℓ) ℓ⁴ / g dℓ)`: the limit plus an uncertainty band from
/// the `1 + O(ℓ³/g)` volume-ratio correction. Not a claim about the exact finite-genus
/// value.
pub fn expectation_sns_finite_g(
    p: &KernelParams,
    genus: f64,
    envelope_c: f64,
) -> Result<ExpectationBand> {
    if !(genus > 2.0) {
        return Err(Error::InvalidParameter(
            "finite-genus band requires genus > 2".into(),
        ));
    }
    if !(envelope_c >= 0.0 && envelope_c.is_finite()) {
        return Err(Error::InvalidParameter(
            "envelope_c must be nonnegative".into(),
        ));
    }
    let central = i_f(p)?;
    if envelope_c == 0.0 {
        return Ok(ExpectationBand {
            central,
            half_width: 0.0,
        });
    }
    Ok(ExpectationBand {
        central,
        half_width: envelope_c * weighted_abs_hl_moment(p)? / genus,
    })
}

/// Lower limit for integrals of `H_L` against `ℓ⁴`-weighted measures; the omitted part is
/// below `1e-28`.
const MOMENT_LOWER_LIMIT: f64 = 1e-6;

/// `∫_0^{βL} |H_L(ℓ)| R(ℓ) ℓ⁴ dℓ`.
pub fn weighted_abs_hl_moment(p: &KernelParams) -> Result<f64> {
    let end = p.cutoff();
    // H_L has derivative jumps where terms switch off, at βL/k.
    let breaks: Vec<f64> = (1..=64)
        .map(|k| end / k as f64)
        .filter(|&b| b > MOMENT_LOWER_LIMIT)
        .collect();
    let q = Quadrature::default()
        .with_rel_tol(1e-10)
        .with_abs_tol(1e-15);
    let r = q.integrate_oscillatory(
        |l| {
            let h = kernels::eval_hl(p, l).expect("argument above evaluation floor");
            h.abs() * sinh_weight(l) * l.powi(4)
        },
        MOMENT_LOWER_LIMIT,
        end,
        p.tau(),
        &breaks,
    )?;
    Ok(r.value)
}

/// `I_L(k1, k2)`; symmetric, and bitwise identical in either argument order.
pub fn i_l_pair(p: &KernelParams, k1: u32, k2: u32) -> Result<f64> {
    if k1 == 0 || k2 == 0 {
        return Err(Error::InvalidParameter("k1, k2 must be >= 1".into()));
    }
    let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
    let (a, b) = (lo as f64, hi as f64);
    let (l, tau) = (p.l(), p.tau());
    let pair = *p.pair();
    let end = pair.beta() / b;
    let integrand = |x: f64| {
        let y = 0.5 * l * x;
        x * pair.eval_fhat(a * x)
            * pair.eval_fhat(b * x)
            * sinh_ratio(y, a)
            * sinh_ratio(y, b)
            * (tau * a * l * x).cos()
            * (tau * b * l * x).cos()
    };
    let r = quad().integrate_oscillatory(integrand, 0.0, end, tau * (a + b) * l, &[])?;
    Ok(4.0 * r.value)
}

/// `4 ∫_0^β x f̂(x)² cos(2τLx) dx`, the oscillating part of `2 I_L(1,1)`.
pub fn diagonal_oscillation(p: &KernelParams) -> Result<f64> {
    let pair = *p.pair();
    let w = 2.0 * p.tau() * p.l();
    let r = quad().integrate_oscillatory(
        |x| {
            let f = pair.eval_fhat(x);
            x * f * f * (w * x).cos()
        },
        0.0,
        pair.beta(),
        w,
        &[],
    )?;
    Ok(4.0 * r.value)
}

/// `Σ I_L(k1,k2)` over ordered pairs with `3 <= k1 + k2 <= k_budget`, reduced in a fixed
/// order.
pub fn diagonal_pair_sum(p: &KernelParams, k_budget: u32) -> Result<f64> {
    let pairs: Vec<(u32, u32)> = (1..k_budget)
        .flat_map(|lo| (lo..=k_budget.saturating_sub(lo)).map(move |hi| (lo, hi)))
        .filter(|&(lo, hi)| lo + hi >= 3)
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(lo, hi)| {
            let v = i_l_pair(p, lo, hi)?;
            Ok(if lo == hi { v } else { 2.0 * v })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.iter().sum())
}

/// Certified bound on `Σ |I_L(k1,k2)|` over ordered pairs with `k1 + k2 > k_budget`.
///
/// Per pair, with `m = k1 + k2`, `M = sup|f̂|` and `c = (m-2)L/2`:
/// `|I_L| <= 4M² ∫ x min(1/(k1k2), 4e^{-cx}) dx` and `|I_L| <= 2M²β² / (k1 k2 max(k1,k2)²)`.
/// Summing over the `m-1` ordered pairs of each `m` uses `Σ 1/(k1k2) = 2H_{m-1}/m`; the
/// sum over `m` is explicit up to `10⁶` and bounded by an integral beyond.
pub fn pair_tail_bound(pair: &TestFunctionPair, l: f64, k_budget: u32) -> f64 {
    let m_sup = pair.fhat_sup();
    let m2 = m_sup * m_sup;
    let beta2 = pair.beta() * pair.beta();
    let first = k_budget.max(2) as u64 + 1;
    let last = (4 * first).max(1_000_000);
    let mut harmonic: f64 = (1..first - 1).map(|j| 1.0 / j as f64).sum();
    let mut total = 0.0;
    for m in first..=last {
        // harmonic = H_{m-1}
        harmonic += 1.0 / (m - 1) as f64;
        let mf = m as f64;
        let c = 0.5 * (mf - 2.0) * l;
        let x = (mf * mf).ln() / c;
        let q = 0.5 * x * x + x / c + 1.0 / (c * c);
        let small_k = 4.0 * m2 * q * 2.0 * harmonic / mf;
        let large_k = 16.0 * m2 * beta2 * harmonic / (mf * mf * mf);
        total += small_k.min(large_k);
    }
    let a = last as f64;
    total + 16.0 * m2 * beta2 * ((1.0 + a.ln()) / (2.0 * a * a) + 1.0 / (4.0 * a * a))
}

/// Limiting second moment (or variance, for the centered statistic) split into parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBreakdown {
    pub goe_term: f64,
    pub diag_correction: f64,
    pub offdiag_term: f64,
    pub tail_bound: f64,
    pub total: f64,
}

impl VarianceBreakdown {
    fn assemble(goe_term: f64, diag_correction: f64, offdiag_term: f64, tail_bound: f64) -> Self {
        Self {
            goe_term,
            diag_correction,
            offdiag_term,
            tail_bound,
            total: goe_term + diag_correction + offdiag_term,
        }
    }

    /// `total - offdiag_term`: subtracting the squared limiting mean leaves the variance.
    pub fn variance(&self) -> f64 {
        self.goe_term + self.diag_correction
    }
}

/// `lim_g E[(N^osc)²] = Σ²_GOE + [osc(1,1) + 2 Σ_{3≤k1+k2≤K} I_L] + I_f²`, with the
/// pairs beyond `K = k_budget` covered by `tail_bound`.
pub fn limiting_variance(p: &KernelParams, k_budget: u32) -> Result<VarianceBreakdown> {
    if k_budget < 2 {
        return Err(Error::InvalidParameter("k_budget must be >= 2".into()));
    }
    let goe = sigma2_goe_closed_form(p.pair());
    let osc = diagonal_oscillation(p)?;
    let pairs = diagonal_pair_sum(p, k_budget)?;
    let mean = i_f(p)?;
    let tail = 2.0 * pair_tail_bound(p.pair(), p.l(), k_budget);
    Ok(VarianceBreakdown::assemble(
        goe,
        osc + 2.0 * pairs,
        mean * mean,
        tail,
    ))
}

/// Limiting variance of the centered statistic `Σ_j f(L r_j)`:
/// `Σ_{k1,k2} I_L(k1,k2)` at `τ = 0`, where `I_L(1,1) = Σ²_GOE` exactly. The squared mean
/// cancels against the off-diagonal pairs, so `offdiag_term` is 0.
pub fn variance_tau0(pair: &TestFunctionPair, l: f64, k_budget: u32) -> Result<VarianceBreakdown> {
    if k_budget < 2 {
        return Err(Error::InvalidParameter("k_budget must be >= 2".into()));
    }
    let p = KernelParams::new(l, 0.0, *pair)?;
    let goe = sigma2_goe_closed_form(pair);
    let pairs = diagonal_pair_sum(&p, k_budget)?;
    let tail = pair_tail_bound(pair, l, k_budget);
    Ok(VarianceBreakdown::assemble(goe, pairs, 0.0, tail))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub tau: f64,
    pub i_f: f64,
    /// `J_1`, the part controlled by `e^{L/2} / τ^A`.
    pub first_iterate: f64,
    /// `Σ_{k≥2} J_k`, subtracted before fitting the decay slope.
    pub floor: f64,
    /// `Σ_{k≥3} J_k`, the `τ`-uniform `1/L` floor.
    pub tail_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayStudy {
    pub rows: Vec<DecayRow>,
    /// Least-squares slope of `log |I_f - floor|` against `log τ`; `None` for one row.
    pub slope: Option<f64>,
}

/// `I_f(L, τ)` over a list of centers `τ >= 1`, with the fitted decay slope.
pub fn decay_study_i_f(pair: &TestFunctionPair, l: f64, taus: &[f64]) -> Result<DecayStudy> {
    if taus.is_empty() {
        return Err(Error::InvalidParameter("no tau values".into()));
    }
    if let Some(&t) = taus.iter().find(|&&t| !(t >= 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "decay study needs tau >= 1, got {t}"
        )));
    }
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        let p = KernelParams::new(l, tau, *pair)?;
        let e = i_f_detailed(&p, default_iterate_split(&p))?;
        rows.push(DecayRow {
            tau,
            i_f: e.value,
            first_iterate: e.per_k[0],
            floor: e.beyond_first(),
            tail_floor: e.beyond_second(),
        });
    }
    let slope = if rows.len() >= 2 {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.tau.ln(), (r.i_f - r.floor).abs().ln()))
            .collect();
        Some(least_squares_slope(&pts))
    } else {
        None
    };
    Ok(DecayStudy { rows, slope })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
