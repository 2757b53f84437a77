//! Large-genus limit formulas against independent oracles and frozen bounds.

use rigidity_core::fixtures::{
    DIAGONAL_SUM_CONSTANT, EXPECTATION_DECAY_CONSTANT, PAIR_PROFILE_CONSTANT,
    PAIR_SMALL_K_CONSTANT, VARIANCE_TAU0_CONSTANT,
};
use rigidity_core::kernels::{eval_hl, sinh_ratio};
use rigidity_core::quadrature::Quadrature;
use rigidity_core::wp_asymptotics::*;
use rigidity_core::{KernelParams, TestFunctionPair};

fn fejer(l: f64, tau: f64) -> KernelParams {
    KernelParams::new(l, tau, TestFunctionPair::fejer()).unwrap()
}

/// Composite Simpson rule on `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Simpson on each piece between the kinks of `H_L` at `βL/k`.
fn piecewise_simpson<F: Fn(f64) -> f64>(f: F, lo: f64, end: f64, kinks: usize) -> f64 {
    let mut pts: Vec<f64> = (1..=kinks)
        .map(|k| end / k as f64)
        .filter(|&x| x > lo)
        .collect();
    pts.push(lo);
    pts.sort_by(f64::total_cmp);
    pts.windows(2).map(|w| simpson(&f, w[0], w[1], 4000)).sum()
}

#[test]
fn expectation_matches_kernel_route() {
    // I_f = ∫ H_L(ℓ) R(ℓ) ℓ dℓ; the integrand is O(ℓ log ℓ) near 0.
    let p = fejer(10.0, 0.0);
    let oracle = piecewise_simpson(
        |x| eval_hl(&p, x).unwrap() * sinh_weight(x) * x,
        1e-9,
        10.0,
        400,
    );
    let v = i_f(&p).unwrap();
    assert!((v - oracle).abs() < 1e-8 * v.abs(), "{v} vs {oracle}");
}

#[test]
fn expectation_per_iterate_matches_substituted_form() {
    // J_k = (4/k) ∫_0^β f̂(u) cos(τLu) sinh²(Lu/2k) / sinh(Lu/2) du
    let p = fejer(8.0, 1.5);
    let e = i_f_detailed(&p, 12).unwrap();
    for k in 1..=12u32 {
        let kf = k as f64;
        let oracle = 4.0 / kf
            * simpson(
                |u| {
                    let a = 4.0 * u;
                    if u == 0.0 {
                        return 0.0;
                    }
                    (1.0 - u) * (12.0 * u).cos() * (a / kf).sinh().powi(2) / a.sinh()
                },
                0.0,
                1.0,
                200_000,
            );
        assert!((e.per_k[k as usize - 1] - oracle).abs() < 1e-10, "k={k}");
    }
    let summed: f64 = e.per_k.iter().sum::<f64>() + e.remainder;
    assert_eq!(summed, e.value);
}

#[test]
fn expectation_decay_envelope() {
    let p = fejer(10.0, 1000.0);
    let envelope = EXPECTATION_DECAY_CONSTANT * (5f64.exp() / 1000.0 + 10.0 / 10.0);
    assert!(i_f(&p).unwrap().abs() <= envelope);
}

#[test]
fn finite_genus_band() {
    let p = fejer(4.0, 0.0);
    let far = expectation_sns_finite_g(&p, 1e12, 1.0).unwrap();
    assert!(far.half_width < 1e-9);
    assert_eq!(far.central, i_f(&p).unwrap());

    let q = fejer(10.0, 0.0);
    let band = expectation_sns_finite_g(&q, 100.0, 1.0).unwrap();
    let oracle = piecewise_simpson(
        |x| eval_hl(&q, x).unwrap().abs() * sinh_weight(x) * x.powi(4),
        1e-6,
        10.0,
        400,
    ) / 100.0;
    assert!(
        (band.half_width - oracle).abs() < 1e-7 * oracle,
        "{} vs {oracle}",
        band.half_width
    );
    assert_eq!(
        expectation_sns_finite_g(&q, 100.0, 0.0).unwrap().half_width,
        0.0
    );
    assert!(expectation_sns_finite_g(&q, 2.0, 1.0).is_err());
}

#[test]
fn diagonal_pair_is_goe_at_zero_tau() {
    for pair in [
        TestFunctionPair::fejer(),
        TestFunctionPair::hann(),
        TestFunctionPair::cinf_bump(),
    ] {
        let p = KernelParams::new(10.0, 0.0, pair).unwrap();
        let goe = rigidity_core::goe_reference::sigma2_goe_closed_form(&pair);
        assert!((i_l_pair(&p, 1, 1).unwrap() - goe).abs() < 1e-8);
    }
    assert!((i_l_pair(&fejer(10.0, 0.0), 1, 1).unwrap() - 1.0 / 3.0).abs() < 1e-8);
}

#[test]
fn large_iterate_pair_bound() {
    let pair = TestFunctionPair::fejer();
    let p = fejer(10.0, 0.0);
    let k2 = 1_000_000u32;
    let bound = 2.0 * pair.fhat_sup().powi(2) * pair.beta().powi(2) / (k2 as f64).powi(3);
    assert!(i_l_pair(&p, 1, k2).unwrap().abs() <= bound);
}

fn pair_profile(l: f64, k1: u32, k2: u32) -> f64 {
    let (a, b) = (k1 as f64, k2 as f64);
    Quadrature::default()
        .with_abs_tol(1e-18)
        .integrate(
            |x| {
                let y = 0.5 * x * l;
                x * sinh_ratio(y, a) * sinh_ratio(y, b)
            },
            0.0,
            1.0 / b,
        )
        .unwrap()
        .value
}

#[test]
fn pair_bounds_on_grid() {
    for &l in &[10.0, 20.0, 40.0] {
        for &tau in &[0.0, 1.0] {
            let p = fejer(l, tau);
            for k1 in 1..=40u32 {
                for k2 in k1..=40u32 {
                    if k1 + k2 < 3 {
                        continue;
                    }
                    let v = i_l_pair(&p, k1, k2).unwrap().abs();
                    let m = (k1 + k2 - 2) as f64;
                    assert!(
                        v <= PAIR_SMALL_K_CONSTANT / (m * m * l * l),
                        "({k1},{k2}) L={l}"
                    );
                    assert!(
                        v <= PAIR_PROFILE_CONSTANT * pair_profile(l, k1, k2),
                        "({k1},{k2}) L={l}"
                    );
                }
            }
        }
    }
}

#[test]
fn diagonal_sum_is_log_l_over_l_squared() {
    for &l in &[10.0, 20.0, 40.0] {
        let p = fejer(l, 0.0);
        let mut s = 0.0;
        for k1 in 1..400u32 {
            for k2 in 1..=(400 - k1) {
                if k1 + k2 >= 3 {
                    s += i_l_pair(&p, k1, k2).unwrap().abs();
                }
            }
        }
        assert!(s <= DIAGONAL_SUM_CONSTANT * l.ln() / (l * l), "L={l}: {s}");
    }
}

#[test]
fn limiting_variance_at_zero_tau() {
    let b = limiting_variance(&fejer(10.0, 0.0), 200).unwrap();
    assert!((b.goe_term - 1.0 / 3.0).abs() < 1e-10);
    // at τ = 0 the oscillating part of 2 I_L(1,1) equals the GOE term
    let pairs = b.diag_correction - 1.0 / 3.0;
    assert!(pairs >= 0.0 && pairs <= 2.0 * DIAGONAL_SUM_CONSTANT * 10f64.ln() / 100.0);
    assert_eq!(b.offdiag_term, i_f(&fejer(10.0, 0.0)).unwrap().powi(2));
}

#[test]
fn diagonal_correction_decreases_with_l() {
    let d: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&l| {
            limiting_variance(&fejer(l, 1.0), 200)
                .unwrap()
                .diag_correction
                .abs()
        })
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

#[test]
fn tail_bound_dominates_pairs_beyond_budget() {
    let p = fejer(10.0, 0.0);
    let b = limiting_variance(&p, 400).unwrap();
    let mut beyond = 0.0;
    for k1 in 1..800u32 {
        for k2 in 1..=(800 - k1) {
            if k1 + k2 > 400 {
                beyond += i_l_pair(&p, k1, k2).unwrap().abs();
            }
        }
    }
    // the pairs in 400 < k1 + k2 <= 800 alone exceed 1e-6, and the certificate covers them
    assert!(2.0 * beyond > 1e-6);
    assert!(b.tail_bound >= 2.0 * beyond);
    assert!(b.tail_bound < 1e-3);
}

#[test]
fn centered_variance_examples() {
    let pair = TestFunctionPair::fejer();
    let v40 = variance_tau0(&pair, 40.0, 400).unwrap();
    assert!((v40.total - 1.0 / 3.0).abs() <= VARIANCE_TAU0_CONSTANT * 40f64.ln() / 1600.0);
    assert_eq!(v40.offdiag_term, 0.0);

    let coarse = variance_tau0(&pair, 40.0, 2).unwrap();
    assert!((coarse.total - v40.total).abs() <= coarse.tail_bound);

    let v10 = variance_tau0(&pair, 10.0, 400).unwrap();
    let v20 = variance_tau0(&pair, 20.0, 400).unwrap();
    assert!((v20.total - 1.0 / 3.0).abs() < (v10.total - 1.0 / 3.0).abs());
}

#[test]
fn decay_study_shapes() {
    let bump = TestFunctionPair::cinf_bump();
    let one = decay_study_i_f(&bump, 6.0, &[4.0]).unwrap();
    assert_eq!(one.rows.len(), 1);
    assert!(one.slope.is_none());
    let taus: Vec<f64> = (4..=10).map(|e| 2f64.powi(e)).collect();
    let s = decay_study_i_f(&bump, 6.0, &taus).unwrap();
    assert!(s.slope.unwrap() <= -1.0);
    for r in &s.rows {
        assert!((r.i_f - r.floor - r.first_iterate).abs() <= 1e-12 * r.i_f.abs().max(1e-300));
    }
    assert!(decay_study_i_f(&bump, 6.0, &[]).is_err());
}
