//! Band-limited test-function pairs `(f, f̂)`.
//!
//! Fourier convention: `f(y) = ∫ f̂(x) e^{ixy} dx`, with `f̂` even, real and supported
//! in `[-beta, beta]`. Each family is defined by a base profile on `[-1, 1]`; a pair
//! with half-width `beta` and scale `normalization` has
//!
//! ```text
//! f̂(x) = normalization * base(x / beta),    f(y) = normalization * beta * f_base(beta * y).
//! ```
//!
//! | family      | base f̂(x) on |x| < 1    | smoothness | f_base(z)                          |
//! |-------------|--------------------------|------------|------------------------------------|
//! | `Fejer`     | `1 - |x|`                | C⁰         | `(sin(z/2) / (z/2))²`              |
//! | `CinfBump`  | `exp(-1 / (1 - x²))`     | C^∞        | quadrature                         |
//! | `Hann`      | `cos²(πx/2)`             | C¹         | `π² sin z / (z (π² - z²))`         |
//!
//! The Fejér pair is only continuous; identities hold for it exactly, while decay-rate
//! constants depend on smoothness, which is why the bump and Hann pairs exist.
//!
//! `f` is entire, so it is evaluated at complex arguments too (small Laplace
//! eigenvalues give imaginary spectral parameters). Evaluation is validated on the strip
//! `beta * |Im y| <= STRIP_LIMIT`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Validated strip half-width for `beta * |Im y|`.
pub const STRIP_LIMIT: f64 = 50.0;

/// Frozen Paley–Wiener constant: `|f(y)| <= C / (1 + |y|)^4` for the unit bump pair.
/// Fitted as twice the maximum of `|f(y)| (1 + |y|)^4` over `[-200, 200]`; the
/// maximum (≈ 753.93) sits near `|y| ≈ 38.9` and the product decays beyond it.
pub const BUMP_DECAY_CONSTANT: f64 = 2.0 * 753.93;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Fejer,
    CinfBump,
    Hann,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Fejer, Family::CinfBump, Family::Hann];

    pub fn name(self) -> &'static str {
        match self {
            Family::Fejer => "fejer",
            Family::CinfBump => "cinf_bump",
            Family::Hann => "hann",
        }
    }

    fn base_fhat(self, x: f64) -> f64 {
        let ax = x.abs();
        if ax >= 1.0 {
            // The bump is defined as 0 at ±1; the other profiles vanish there anyway.
            return 0.0;
        }
        match self {
            Family::Fejer => 1.0 - ax,
            Family::CinfBump => (-1.0 / (1.0 - x * x)).exp(),
            Family::Hann => {
                let c = (0.5 * PI * x).cos();
                c * c
            }
        }
    }

    /// Derivative of the base profile on the open support; at `|x| = 1` the one-sided
    /// limit from inside, and 0 outside.
    fn base_fhat_derivative(self, x: f64) -> f64 {
        let ax = x.abs();
        if ax > 1.0 {
            return 0.0;
        }
        match self {
            Family::Fejer => {
                if x > 0.0 {
                    -1.0
                } else if x < 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Family::CinfBump => {
                if ax >= 1.0 {
                    return 0.0;
                }
                let s = 1.0 - x * x;
                -2.0 * x * (-1.0 / s - 2.0 * s.ln()).exp()
            }
            Family::Hann => -0.5 * PI * (PI * x).sin(),
        }
    }

    fn base_sup(self) -> f64 {
        match self {
            Family::Fejer | Family::Hann => 1.0,
            Family::CinfBump => (-1.0f64).exp(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fejer" => Ok(Family::Fejer),
            "cinf_bump" | "cinf-bump" | "bump" => Ok(Family::CinfBump),
            "hann" => Ok(Family::Hann),
            other => Err(Error::InvalidParameter(format!(
                "unknown test-function family '{other}'"
            ))),
        }
    }
}

/// An admissible pair `(f, f̂)`; immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionPair {
    family: Family,
    beta: f64,
    normalization: f64,
}

impl TestFunctionPair {
    /// `beta` must be positive; `normalization` nonnegative (0 gives the zero pair).
    pub fn new(family: Family, beta: f64, normalization: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter("beta must be positive".into()));
        }
        if !(normalization.is_finite() && normalization >= 0.0) {
            return Err(Error::InvalidParameter(
                "normalization must be nonnegative".into(),
            ));
        }
        Ok(Self {
            family,
            beta,
            normalization,
        })
    }

    /// Unit pair of the given family: `beta = 1`, `normalization = 1`.
    pub fn unit(family: Family) -> Self {
        Self {
            family,
            beta: 1.0,
            normalization: 1.0,
        }
    }

    pub fn fejer() -> Self {
        Self::unit(Family::Fejer)
    }

    pub fn cinf_bump() -> Self {
        Self::unit(Family::CinfBump)
    }

    pub fn hann() -> Self {
        Self::unit(Family::Hann)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn eval_fhat(&self, x: f64) -> f64 {
        if x.abs() > self.beta {
            return 0.0;
        }
        self.normalization * self.family.base_fhat(x / self.beta)
    }

    pub fn eval_fhat_derivative(&self, x: f64) -> f64 {
        if x.abs() > self.beta {
            return 0.0;
        }
        self.normalization / self.beta * self.family.base_fhat_derivative(x / self.beta)
    }

    /// `sup |f̂|`.
    pub fn fhat_sup(&self) -> f64 {
        self.normalization * self.family.base_sup()
    }

    /// `f(y)` for complex `y` on the validated strip.
    pub fn eval_f(&self, y: Complex64) -> Result<Complex64> {
        if !(y.re.is_finite() && y.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite argument".into()));
        }
        if self.beta * y.im.abs() > STRIP_LIMIT {
            return Err(Error::OutsideStrip {
                value: y.im,
                limit: STRIP_LIMIT,
            });
        }
        let z = y * self.beta;
        let base = match self.family {
            Family::Fejer => fejer_f(z),
            Family::Hann => {
                let near_pole = z.norm() < 1e-3 || (z - PI).norm() < 1e-3 || (z + PI).norm() < 1e-3;
                if near_pole {
                    base_f_quadrature(self.family, z)?
                } else {
                    z.sin() * (PI * PI) / (z * (PI * PI - z * z))
                }
            }
            Family::CinfBump => base_f_quadrature(self.family, z)?,
        };
        Ok(base * (self.normalization * self.beta))
    }

    /// `f(y)` for real `y`; the imaginary part is zero up to rounding and is discarded.
    pub fn eval_f_real(&self, y: f64) -> f64 {
        self.eval_f(Complex64::new(y, 0.0))
            .expect("real arguments lie on the validated strip")
            .re
    }

    /// `f̂_c(x) = f̂(x / c) / c`, `f_c(y) = f(c y)`.
    pub fn scale_support(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(
                "scale factor must be positive".into(),
            ));
        }
        Self::new(self.family, self.beta * c, self.normalization / c)
    }

    /// A bound `|f(y)| <= c / |y|^p` valid for `|y| >= y_min`, as `(c, p, y_min)`.
    pub fn decay_bound(&self) -> (f64, i32, f64) {
        let nb = self.normalization * self.beta;
        match self.family {
            Family::Fejer => (nb * 4.0 / (self.beta * self.beta), 2, 0.0),
            Family::Hann => (
                nb * 2.0 * PI * PI / self.beta.powi(3),
                3,
                std::f64::consts::SQRT_2 * PI / self.beta,
            ),
            Family::CinfBump => (nb * BUMP_DECAY_CONSTANT / self.beta.powi(4), 4, 0.0),
        }
    }
}

fn fejer_f(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        return Complex64::new(1.0, 0.0) - z * z / 12.0;
    }
    let h = z * 0.5;
    let s = h.sin() / h;
    s * s
}

/// `2 ∫_0^1 base(x) cos(x z) dx` split into real and imaginary parts.
pub(crate) fn base_f_quadrature(family: Family, z: Complex64) -> Result<Complex64> {
    let q = Quadrature::default();
    let (a, b) = (z.re, z.im);
    let freq = a.abs();
    let re = q.integrate_oscillatory(
        |x| family.base_fhat(x) * (x * a).cos() * (x * b).cosh(),
        0.0,
        1.0,
        freq,
        &[],
    )?;
    let im = if b == 0.0 {
        0.0
    } else {
        -q.integrate_oscillatory(
            |x| family.base_fhat(x) * (x * a).sin() * (x * b).sinh(),
            0.0,
            1.0,
            freq,
            &[],
        )?
        .value
    };
    Ok(Complex64::new(2.0 * re.value, 2.0 * im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fhat_examples() {
        let fejer = TestFunctionPair::fejer();
        assert_eq!(fejer.eval_fhat(0.0), 1.0);
        assert_eq!(fejer.eval_fhat(0.5), 0.5);
        assert_eq!(TestFunctionPair::cinf_bump().eval_fhat(1.5), 0.0);
        assert_eq!(TestFunctionPair::cinf_bump().eval_fhat(1.0), 0.0);
        assert_eq!(TestFunctionPair::cinf_bump().eval_fhat(-1.0), 0.0);
    }

    #[test]
    fn fhat_is_even_and_supported() {
        for fam in Family::ALL {
            let p = TestFunctionPair::new(fam, 1.7, 2.0).unwrap();
            for i in 0..200 {
                let x = -3.0 + 6.0 * i as f64 / 199.0;
                assert_eq!(p.eval_fhat(x), p.eval_fhat(-x));
                if x.abs() > 1.7 {
                    assert_eq!(p.eval_fhat(x), 0.0);
                }
            }
        }
    }

    #[test]
    fn fejer_f_closed_form_values() {
        let p = TestFunctionPair::fejer();
        assert!((p.eval_f_real(0.0) - 1.0).abs() < 1e-15);
        assert!(p.eval_f_real(2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn bump_f_at_zero() {
        // Frozen value of ∫_{-1}^{1} exp(-1/(1-x²)) dx.
        let v = TestFunctionPair::cinf_bump().eval_f_real(0.0);
        assert!((v - 0.443_993_816_168_079_4).abs() < 1e-12, "{v}");
    }

    #[test]
    fn hann_closed_form_matches_quadrature() {
        let p = TestFunctionPair::hann();
        for &y in &[0.3, 1.0, 3.0, PI + 0.01, 7.5, -12.0, 40.0] {
            let closed = p.eval_f(Complex64::new(y, 0.0)).unwrap();
            let quad = base_f_quadrature(Family::Hann, Complex64::new(y, 0.0)).unwrap();
            assert!((closed - quad).norm() < 1e-12, "y={y}");
        }
        assert!((p.eval_f_real(0.0) - 1.0).abs() < 1e-12);
        assert!((p.eval_f_real(PI) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn complex_arguments_match_quadrature() {
        for fam in [Family::Fejer, Family::Hann] {
            let p = TestFunctionPair::unit(fam);
            for &(a, b) in &[(0.0, 0.5), (2.0, 1.0), (-3.0, -1.0), (10.0, 5.0)] {
                let z = Complex64::new(a, b);
                let v = p.eval_f(z).unwrap();
                let q = base_f_quadrature(fam, z).unwrap();
                assert!((v - q).norm() < 1e-10 * (1.0 + q.norm()), "{fam} {z}");
            }
        }
    }

    #[test]
    fn real_argument_has_no_imaginary_part() {
        for fam in Family::ALL {
            let p = TestFunctionPair::unit(fam);
            for &y in &[0.0, 0.7, 5.0, -33.0] {
                let v = p.eval_f(Complex64::new(y, 0.0)).unwrap();
                assert!(v.im.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn strip_is_enforced() {
        let p = TestFunctionPair::fejer();
        assert!(p.eval_f(Complex64::new(0.0, 1.0)).is_ok());
        assert!(p.eval_f(Complex64::new(0.0, -STRIP_LIMIT)).is_ok());
        assert!(matches!(
            p.eval_f(Complex64::new(0.0, STRIP_LIMIT + 1.0)),
            Err(Error::OutsideStrip { .. })
        ));
        let wide = TestFunctionPair::new(Family::Fejer, 10.0, 1.0).unwrap();
        assert!(wide.eval_f(Complex64::new(0.0, 6.0)).is_err());
    }

    #[test]
    fn scale_support_examples() {
        let p = TestFunctionPair::fejer();
        assert_eq!(p.scale_support(1.0).unwrap(), p);
        let p2 = p.scale_support(2.0).unwrap();
        assert_eq!(p2.eval_fhat(0.0), 0.5);
        assert_eq!(p2.beta(), 2.0);
        assert!(p2.eval_f_real(PI).abs() < 1e-15);
        for &y in &[0.1, 1.3, 4.0] {
            assert!((p2.eval_f_real(y) - p.eval_f_real(2.0 * y)).abs() < 1e-14);
        }
        assert!(p.scale_support(0.0).is_err());
        assert!(p.scale_support(-1.0).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(TestFunctionPair::new(Family::Hann, 0.0, 1.0).is_err());
        assert!(TestFunctionPair::new(Family::Hann, 1.0, -1.0).is_err());
        assert!(TestFunctionPair::new(Family::Hann, 1.0, 0.0).is_ok());
        assert_eq!("cinf_bump".parse::<Family>().unwrap(), Family::CinfBump);
        assert!("gauss".parse::<Family>().is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for fam in Family::ALL {
            let p = TestFunctionPair::new(fam, 1.5, 1.2).unwrap();
            for &x in &[-1.2, -0.4, 0.3, 0.9, 1.4] {
                let h = 1e-6;
                let fd = (p.eval_fhat(x + h) - p.eval_fhat(x - h)) / (2.0 * h);
                assert!((fd - p.eval_fhat_derivative(x)).abs() < 1e-6, "{fam} {x}");
            }
        }
    }
}
