//! Smooth linear spectral statistics of hyperbolic surfaces.
//!
//! The crate evaluates both sides of the trace-formula decomposition of a windowed
//! spectral statistic, the large-genus Weil–Petersson limits of its mean and variance,
//! and the GOE reference variance it converges to.
//!
//! - [`fourier_pairs`]: band-limited test functions `(f, f̂)`.
//! - [`kernels`]: geodesic kernels `F`, `H_L`, `G_L` and their bounds.
//! - [`trace_stats`]: Weyl term, oscillatory term from a length spectrum, and the
//!   statistic from an eigenvalue list.
//! - [`wp_asymptotics`]: limiting expectation `I_f(L, τ)` and variance breakdown.
//! - [`goe_reference`]: closed-form and Monte Carlo GOE variance.
//! - [`formats`]: text formats for length spectra and eigenvalue lists.

// `!(x > 0.0)` rejects NaN on purpose; quadrature tables keep their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod fixtures;
pub mod formats;
pub mod fourier_pairs;
pub mod goe_reference;
pub mod kernels;
pub mod quadrature;
pub mod trace_stats;
mod tridiagonal;
pub mod wp_asymptotics;

pub use error::{Error, Result};
pub use fourier_pairs::{Family, TestFunctionPair};
pub use goe_reference::{GoeMcConfig, GoeMcResult};
pub use kernels::KernelParams;
pub use trace_stats::{EigenvalueList, GeodesicClass, LengthSpectrum};
pub use wp_asymptotics::VarianceBreakdown;
