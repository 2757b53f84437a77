//! Frozen constants for the implied-constant bounds.
//!
//! Each constant was fitted once on a dense grid (see `tests/fit_fixtures.rs`, run with
//! `--ignored`), multiplied by a safety factor of 2, and frozen here. Bump
//! [`FIXTURE_VERSION`] whenever a value changes.

pub const FIXTURE_VERSION: &str = "1";

pub const SAFETY_FACTOR: f64 = 2.0;

/// `|H_L(x)| <= C_L log(1/x)` on `(1e-8, 1/2)` for fejer, `L = 10`, `τ = 1`.
pub const HL_LOG_CONSTANT: f64 = 0.4491;

/// `|H_L(x)| <= C'_L x e^{-x/2}` on `[1, L]` for fejer, `L = 10`, `τ = 1`.
pub const HL_EXP_CONSTANT: f64 = 0.2593;

/// `|I_f(L, τ)| <= C (e^{L/2}/τ + 10/L)` for `τ >= 1`.
pub const EXPECTATION_DECAY_CONSTANT: f64 = 0.1071;

/// `|I_L(k1, k2)| <= C / ((k1 + k2 - 2)² L²)` for `k1 + k2 >= 3`, fejer.
pub const PAIR_SMALL_K_CONSTANT: f64 = 20.96;

/// `|I_L(k1, k2)| <= C ∫_0^{1/k2} x sinh²(xL/2) / (sinh(k1xL/2) sinh(k2xL/2)) dx`, fejer.
pub const PAIR_PROFILE_CONSTANT: f64 = 6.819;

/// `Σ_{3 <= k1+k2 <= K} |I_L(k1, k2)| <= C log L / L²`, fejer, `τ = 0`.
pub const DIAGONAL_SUM_CONSTANT: f64 = 21.29;

/// `|variance_tau0 - 1/3| <= C log L / L²`, fejer.
pub const VARIANCE_TAU0_CONSTANT: f64 = 21.29;
