//! GOE reference variance of a smooth linear statistic.
//!
//! Closed form (Dyson–Mehta): `Σ²_GOE(f) = 2 ∫ |x| f̂(x)² dx`, the limiting variance of
//! `Σ_j f(x_j − c)` over unfolded GOE eigenvalues when `supp f̂ ⊂ [−1, 1]`.
//!
//! Monte Carlo: each sample is a tridiagonal β = 1 matrix (Dumitriu–Edelman), with
//! diagonal `N(0, 1)` and off-diagonal `χ_{N−i}/√2`. Its spectrum has the law of a GOE
//! matrix with diagonal variance 1 and off-diagonal variance 1/2, whose semicircle has
//! radius `√(2N)`. Eigenvalues are unfolded by `N·F(x)` with the exact semicircle CDF.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier_pairs::TestFunctionPair;
use crate::quadrature::Quadrature;
use crate::tridiagonal::symmetric_tridiagonal_eigenvalues;

/// `2 ∫_{−β}^{β} |x| f̂(x)² dx`, integrated on each side of the kink at 0.
pub fn sigma2_goe_closed_form(pair: &TestFunctionPair) -> f64 {
    let b = pair.beta();
    let q = Quadrature::default()
        .with_rel_tol(1e-13)
        .with_abs_tol(1e-16);
    let g = |x: f64| {
        let f = pair.eval_fhat(x);
        x.abs() * f * f
    };
    let left = q
        .integrate(g, -b, 0.0)
        .expect("smooth integrand on a bounded interval");
    let right = q
        .integrate(g, 0.0, b)
        .expect("smooth integrand on a bounded interval");
    2.0 * (left.value + right.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoeMcConfig {
    pub matrix_dim: usize,
    pub samples: usize,
    pub rng_seed: u64,
    pub bulk_fraction: f64,
    pub pair: TestFunctionPair,
}

impl GoeMcConfig {
    pub const DEFAULT_BULK_FRACTION: f64 = 0.5;

    pub fn new(pair: TestFunctionPair, matrix_dim: usize, samples: usize, rng_seed: u64) -> Self {
        Self {
            matrix_dim,
            samples,
            rng_seed,
            bulk_fraction: Self::DEFAULT_BULK_FRACTION,
            pair,
        }
    }

    pub fn with_bulk_fraction(mut self, bulk_fraction: f64) -> Self {
        self.bulk_fraction = bulk_fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.matrix_dim < 64 {
            return Err(Error::InvalidParameter("matrix_dim must be >= 64".into()));
        }
        if self.samples < 16 {
            return Err(Error::InvalidParameter("samples must be >= 16".into()));
        }
        if !(self.bulk_fraction > 0.0 && self.bulk_fraction < 1.0) {
            return Err(Error::InvalidParameter(
                "bulk_fraction must lie in (0, 1)".into(),
            ));
        }
        // the Dyson–Mehta formula needs supp f̂ inside [−1, 1]
        if self.pair.beta() > 1.0 {
            return Err(Error::InvalidParameter(
                "GOE comparison requires beta <= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoeMcResult {
    pub estimate: f64,
    pub std_error: f64,
    pub samples_used: usize,
    pub closed_form: f64,
}

/// Semicircle CDF for radius `√(2n)`.
pub fn semicircle_cdf(x: f64, n: usize) -> f64 {
    let t = (x / (2.0 * n as f64).sqrt()).clamp(-1.0, 1.0);
    0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / std::f64::consts::PI
}

/// Sorted eigenvalues of one tridiagonal GOE draw from `rng`.
pub fn sample_goe_eigenvalues(n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let mut diag: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let off: Vec<f64> = (1..n)
        .map(|i| {
            let chi2 = ChiSquared::new((n - i) as f64).expect("positive degrees of freedom");
            (chi2.sample(rng) * 0.5).sqrt()
        })
        .collect();
    symmetric_tridiagonal_eigenvalues(&mut diag, &off)?;
    Ok(diag)
}

/// Eigenvalues unfolded to unit mean spacing, `u = n·F(x)`.
pub fn unfold(eigenvalues: &[f64]) -> Vec<f64> {
    let n = eigenvalues.len();
    eigenvalues
        .iter()
        .map(|&x| n as f64 * semicircle_cdf(x, n))
        .collect()
}

/// RNG for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn one_sample(cfg: &GoeMcConfig, index: u64) -> Result<f64> {
    let n = cfg.matrix_dim;
    let mut rng = sample_rng(cfg.rng_seed, index);
    let unfolded = unfold(&sample_goe_eigenvalues(n, &mut rng)?);
    let half = 0.5 * n as f64 * cfg.bulk_fraction;
    let mid = 0.5 * n as f64;
    let center = Uniform::new_inclusive(mid - half, mid + half).sample(&mut rng);
    Ok(unfolded
        .iter()
        .map(|&u| cfg.pair.eval_f_real(u - center))
        .sum())
}

/// Monte Carlo variance of `S = Σ_j f(u_j − c)` with one window per matrix.
///
/// Samples run in parallel on independent streams `(seed, index)` and are reduced in
/// index order, so the result is bit-identical for a given configuration.
pub fn sample_goe_variance(cfg: &GoeMcConfig) -> Result<GoeMcResult> {
    cfg.validate()?;
    let values = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| one_sample(cfg, i))
        .collect::<Result<Vec<f64>>>()?;
    let (estimate, std_error) = variance_with_jackknife(&values);
    Ok(GoeMcResult {
        estimate,
        std_error,
        samples_used: values.len(),
        closed_form: sigma2_goe_closed_form(&cfg.pair),
    })
}

/// Unbiased sample variance and its delete-one jackknife standard error.
pub fn variance_with_jackknife(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m < 2 {
        return (0.0, 0.0);
    }
    let mf = m as f64;
    let mean = values.iter().sum::<f64>() / mf;
    let dev: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let ss: f64 = dev.iter().map(|d| d * d).sum();
    let variance = ss / (mf - 1.0);
    if m < 3 {
        return (variance, 0.0);
    }
    // leave-one-out: Σ_{j≠i}(x_j − mean_(i))² = ss − d_i² − d_i²/(m−1)
    let loo: Vec<f64> = dev
        .iter()
        .map(|d| (ss - d * d * (1.0 + 1.0 / (mf - 1.0))) / (mf - 2.0))
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / mf;
    let spread: f64 = loo.iter().map(|v| (v - loo_mean) * (v - loo_mean)).sum();
    (variance, ((mf - 1.0) / mf * spread).sqrt())
}
