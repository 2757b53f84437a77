//! Both sides of the trace-formula decomposition `N = N̄ + N^osc`.
//!
//! - [`weyl_main_term`]: `N̄ = (g-1) ∫ [f(L(r-τ)) + f(L(r+τ))] r tanh(πr) dr`.
//! - [`n_osc_from_spectrum`]: `N^osc = 2 Σ_γ H_L(ℓ_γ)` over primitive non-oriented
//!   geodesics, equivalently `(1/L) Σ_{γ oriented} Σ_k ℓ f̂(kℓ/L) cos(τkℓ) / sinh(kℓ/2)`.
//! - [`statistic_from_eigenvalues`]: `Σ_j f(L(r_j - τ)) + f(L(r_j + τ))` with
//!   `λ_j = 1/4 + r_j²`; `r_j` is imaginary for `λ_j < 1/4`.
//!
//! Length spectra and eigenvalue lists are external data; nothing here enumerates
//! geodesics or computes eigenvalues.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{self, KernelParams};
use crate::quadrature::Quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeodesicClass {
    /// simple, non-separating
    Sns,
    /// simple, separating
    Ssep,
    Nonsimple,
    Unknown,
}

impl GeodesicClass {
    pub const ALL: [GeodesicClass; 4] = [
        GeodesicClass::Sns,
        GeodesicClass::Ssep,
        GeodesicClass::Nonsimple,
        GeodesicClass::Unknown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeodesicClass::Sns => "sns",
            GeodesicClass::Ssep => "ssep",
            GeodesicClass::Nonsimple => "nonsimple",
            GeodesicClass::Unknown => "unknown",
        }
    }
}

impl fmt::Display for GeodesicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeodesicClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sns" => Ok(GeodesicClass::Sns),
            "ssep" => Ok(GeodesicClass::Ssep),
            "nonsimple" => Ok(GeodesicClass::Nonsimple),
            "unknown" => Ok(GeodesicClass::Unknown),
            other => Err(Error::InvalidParameter(format!(
                "unknown geodesic class '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicEntry {
    pub length: f64,
    pub multiplicity: u64,
    pub class: GeodesicClass,
}

/// Primitive closed geodesics of a surface, sorted by strictly increasing length.
///
/// With `oriented == false` (the default) multiplicities count non-oriented geodesics,
/// each of which stands for two oriented ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSpectrum {
    genus: u32,
    entries: Vec<GeodesicEntry>,
    oriented: bool,
}

impl LengthSpectrum {
    pub fn new(genus: u32, entries: Vec<GeodesicEntry>, oriented: bool) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidParameter("genus must be at least 2".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "entry {i}: length must be positive, got {}",
                    e.length
                )));
            }
            if e.multiplicity == 0 {
                return Err(Error::InvalidParameter(format!(
                    "entry {i}: multiplicity must be >= 1"
                )));
            }
            if i > 0 && e.length <= entries[i - 1].length {
                return Err(Error::InvalidParameter(format!(
                    "entry {i}: lengths must be strictly increasing ({} after {})",
                    e.length,
                    entries[i - 1].length
                )));
            }
        }
        Ok(Self {
            genus,
            entries,
            oriented,
        })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn entries(&self) -> &[GeodesicEntry] {
        &self.entries
    }

    pub fn oriented(&self) -> bool {
        self.oriented
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn systole(&self) -> Option<f64> {
        self.entries.first().map(|e| e.length)
    }

    /// Entries carrying the given class label, in order.
    pub fn restrict_to(&self, class: GeodesicClass) -> Self {
        Self {
            genus: self.genus,
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|e| e.class == class)
                .collect(),
            oriented: self.oriented,
        }
    }

    /// Union with a spectrum of the same genus and orientation convention and disjoint
    /// lengths.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.genus != other.genus || self.oriented != other.oriented {
            return Err(Error::InvalidParameter(
                "spectra differ in genus or orientation".into(),
            ));
        }
        let mut entries: Vec<_> = self.entries.iter().chain(&other.entries).copied().collect();
        entries.sort_by(|a, b| a.length.total_cmp(&b.length));
        Self::new(self.genus, entries, self.oriented)
    }

    fn orientation_factor(&self) -> f64 {
        if self.oriented {
            1.0
        } else {
            2.0
        }
    }
}

/// Laplace eigenvalues `0 = λ_0 <= λ_1 <= ...` of a closed surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    genus: u32,
    values: Vec<f64>,
}

impl EigenvalueList {
    pub fn new(genus: u32, values: Vec<f64>) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidParameter("genus must be at least 2".into()));
        }
        match values.first() {
            None => return Err(Error::InvalidParameter("eigenvalue list is empty".into())),
            Some(&v) if v != 0.0 => {
                return Err(Error::InvalidParameter("first eigenvalue must be 0".into()))
            }
            _ => {}
        }
        for (i, w) in values.windows(2).enumerate() {
            if !(w[1] >= w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "eigenvalue {} is not nondecreasing ({} after {})",
                    i + 1,
                    w[1],
                    w[0]
                )));
            }
        }
        Ok(Self { genus, values })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Spectral parameter `r` with `λ = 1/4 + r²`, taking `r = i sqrt(1/4 - λ)` below 1/4.
pub fn spectral_parameter(lambda: f64) -> Complex64 {
    let d = lambda - 0.25;
    if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    }
}

/// `N^osc` split by class label.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OscillatoryTerm {
    pub sns: f64,
    pub ssep: f64,
    pub nonsimple: f64,
    pub unknown: f64,
    pub total: f64,
}

impl OscillatoryTerm {
    pub fn class(&self, class: GeodesicClass) -> f64 {
        match class {
            GeodesicClass::Sns => self.sns,
            GeodesicClass::Ssep => self.ssep,
            GeodesicClass::Nonsimple => self.nonsimple,
            GeodesicClass::Unknown => self.unknown,
        }
    }
}

/// `N^osc` per class; `total` is `((sns + ssep) + nonsimple) + unknown`.
pub fn n_osc_by_class(p: &KernelParams, spec: &LengthSpectrum) -> Result<OscillatoryTerm> {
    let factor = spec.orientation_factor();
    let mut out = OscillatoryTerm::default();
    for e in &spec.entries {
        let h = kernels::eval_hl(p, e.length)?;
        let term = factor * e.multiplicity as f64 * h;
        match e.class {
            GeodesicClass::Sns => out.sns += term,
            GeodesicClass::Ssep => out.ssep += term,
            GeodesicClass::Nonsimple => out.nonsimple += term,
            GeodesicClass::Unknown => out.unknown += term,
        }
    }
    out.total = out.sns + out.ssep + out.nonsimple + out.unknown;
    Ok(out)
}

/// `N^osc = 2 Σ_γ H_L(ℓ_γ)` over non-oriented classes (factor 1 for oriented counts).
pub fn n_osc_from_spectrum(p: &KernelParams, spec: &LengthSpectrum) -> Result<f64> {
    Ok(n_osc_by_class(p, spec)?.total)
}

/// `N^osc` as the explicit double sum over oriented geodesics and iterates `k`.
pub fn n_osc_oriented_double_sum(p: &KernelParams, spec: &LengthSpectrum) -> Result<f64> {
    let beta_l = p.cutoff();
    let mut total = 0.0;
    for e in &spec.entries {
        let oriented_count = e.multiplicity as f64 * if spec.oriented { 1.0 } else { 2.0 };
        let l = e.length;
        let mut inner = 0.0;
        let mut k = 1u64;
        loop {
            let kl = k as f64 * l;
            if kl > beta_l {
                break;
            }
            inner += l
                * kernels::inv_sinh(0.5 * kl)
                * p.pair().eval_fhat(kl / p.l())
                * (p.tau() * kl).cos();
            k += 1;
        }
        total += oriented_count * inner;
    }
    Ok(total / p.l())
}

fn window_terms(p: &KernelParams, r: Complex64) -> Result<Complex64> {
    let pair = p.pair();
    let l = p.l();
    let a = pair.eval_f((r - p.tau()) * l)?;
    let b = pair.eval_f((r + p.tau()) * l)?;
    Ok(a + b)
}

/// `Σ_j f(L(r_j - τ)) + f(L(r_j + τ))` over raw eigenvalues (any order, all `>= 0`).
pub fn statistic_from_values(p: &KernelParams, values: &[f64]) -> Result<f64> {
    let mut total = Complex64::new(0.0, 0.0);
    for &lambda in values {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "negative eigenvalue {lambda}"
            )));
        }
        total += window_terms(p, spectral_parameter(lambda))?;
    }
    if total.im.abs() > 1e-10 * total.re.abs().max(1.0) {
        return Err(Error::ComplexResidue(total.im));
    }
    Ok(total.re)
}

/// The windowed statistic `N_{f,L,τ}` of a surface from its eigenvalues.
pub fn statistic_from_eigenvalues(p: &KernelParams, ev: &EigenvalueList) -> Result<f64> {
    statistic_from_values(p, &ev.values)
}

/// The centered statistic `Σ_j f(L r_j)`.
pub fn statistic_tau0_from_values(p: &KernelParams, values: &[f64]) -> Result<f64> {
    let mut total = Complex64::new(0.0, 0.0);
    for &lambda in values {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "negative eigenvalue {lambda}"
            )));
        }
        total += p.pair().eval_f(spectral_parameter(lambda) * p.l())?;
    }
    if total.im.abs() > 1e-10 * total.re.abs().max(1.0) {
        return Err(Error::ComplexResidue(total.im));
    }
    Ok(total.re)
}

/// The smooth term, computed on a truncated range with a rigorous bound on the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylTerm {
    pub value: f64,
    /// Bound on the omitted `|r| > cutoff` part.
    pub tail_bound: f64,
    pub cutoff: f64,
}

/// Panel budget for the truncated Weyl integral.
const WEYL_MAX_PANELS: f64 = 4.0e5;

/// `N̄ = (g-1) ∫ [f(L(r-τ)) + f(L(r+τ))] r tanh(πr) dr`.
///
/// The integral converges only when `f(y)` decays faster than `|y|^-2`; the Fejér pair
/// is rejected. The range is truncated at `τ + W`, with `W` the smallest doubling of
/// `10/L` for which the family's decay bound certifies the tail below
/// `1e-9 * max(1, (g-1) 2τ ∫f / L)`, subject to a panel budget.
pub fn weyl_main_term(p: &KernelParams, genus: u32) -> Result<WeylTerm> {
    if genus < 2 {
        return Err(Error::InvalidParameter("genus must be at least 2".into()));
    }
    let pair = *p.pair();
    let (l, tau) = (p.l(), p.tau());
    let lead =
        (genus - 1) as f64 * 2.0 * tau * 2.0 * std::f64::consts::PI * pair.eval_fhat(0.0) / l;
    let g1 = (genus - 1) as f64;
    let (w, tail) = weyl_window(p, g1, 1e-9 * lead.abs().max(1.0))?;
    // Integrand is even in r: integrate (0, τ + W] and double.
    let integrand = |r: f64| {
        let h = pair.eval_f_real(l * (r - tau)) + pair.eval_f_real(l * (r + tau));
        h * r * (std::f64::consts::PI * r).tanh()
    };
    let value = integrate_window(integrand, tau + w, l, &[tau])?;
    Ok(WeylTerm {
        value: 2.0 * g1 * value,
        tail_bound: tail,
        cutoff: tau + w,
    })
}

/// `N̄_0 = (g-1) ∫ f(Lr) r tanh(πr) dr`, the smooth term of `Σ_j f(L r_j)`.
pub fn weyl_main_term_tau0(p: &KernelParams, genus: u32) -> Result<WeylTerm> {
    if genus < 2 {
        return Err(Error::InvalidParameter("genus must be at least 2".into()));
    }
    let pair = *p.pair();
    let l = p.l();
    let g1 = (genus - 1) as f64;
    let centered = p.with_tau(0.0)?;
    // One window term instead of two: half the two-term bound.
    let (w, tail) = weyl_window(&centered, g1 * 0.5, 1e-9)?;
    let integrand = |r: f64| pair.eval_f_real(l * r) * r * (std::f64::consts::PI * r).tanh();
    let value = integrate_window(integrand, w, l, &[])?;
    Ok(WeylTerm {
        value: 2.0 * g1 * value,
        tail_bound: tail,
        cutoff: w,
    })
}

fn integrate_window<F: Fn(f64) -> f64>(f: F, end: f64, l: f64, extra: &[f64]) -> Result<f64> {
    let q = Quadrature::default()
        .with_rel_tol(1e-12)
        .with_abs_tol(1e-15)
        .with_max_panels(4 * WEYL_MAX_PANELS as usize);
    Ok(q.integrate_oscillatory(f, 0.0, end, l, extra)?.value)
}

/// Picks the truncation half-width `W` and returns `(W, tail bound)`.
fn weyl_window(p: &KernelParams, g1: f64, target: f64) -> Result<(f64, f64)> {
    let pair = p.pair();
    let (c, power, y_min) = pair.decay_bound();
    if power <= 2 {
        return Err(Error::DivergentWeylIntegral(pair.family().name()));
    }
    let (l, tau) = (p.l(), p.tau());
    let pw = power as f64;
    // For r > τ + W: |h(r)| <= 2c / (L(r-τ))^p and r <= τ + (r-τ), so the tail of the
    // doubled integral is at most 4(g-1) c / L^p [τ W^{1-p}/(p-1) + W^{2-p}/(p-2)].
    let bound = |w: f64| {
        4.0 * g1 * c / l.powf(pw)
            * (tau * w.powf(1.0 - pw) / (pw - 1.0) + w.powf(2.0 - pw) / (pw - 2.0))
    };
    let mut w = (10.0 / l).max(y_min / l);
    let max_w = WEYL_MAX_PANELS * std::f64::consts::PI / l;
    while bound(w) > target && 2.0 * w <= max_w {
        w *= 2.0;
    }
    Ok((w, bound(w)))
}
