//! Eigenvalues of a real symmetric tridiagonal matrix by implicit-shift QL.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Overwrites `diag` with the eigenvalues in ascending order.
///
/// `off[i]` couples rows `i` and `i + 1`; `off.len()` must be `diag.len() - 1` (or 0 for an
/// empty matrix).
pub(crate) fn symmetric_tridiagonal_eigenvalues(diag: &mut [f64], off: &[f64]) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    assert_eq!(off.len() + 1, n, "off-diagonal length must be n - 1");
    let d = diag;
    let mut e = off.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::EigenNonConvergence(l));
            }
            // Wilkinson-type shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn toeplitz_spectrum() {
        let n = 50;
        let (a, b) = (0.3, -1.7);
        let mut d = vec![a; n];
        symmetric_tridiagonal_eigenvalues(&mut d, &vec![b; n - 1]).unwrap();
        let mut exact: Vec<f64> = (1..=n)
            .map(|j| a + 2.0 * b * (PI * j as f64 / (n as f64 + 1.0)).cos())
            .collect();
        exact.sort_by(f64::total_cmp);
        for (x, y) in d.iter().zip(&exact) {
            assert!((x - y).abs() < 1e-12, "{x} {y}");
        }
    }

    #[test]
    fn two_by_two() {
        let mut d = vec![1.0, 3.0];
        symmetric_tridiagonal_eigenvalues(&mut d, &[2.0]).unwrap();
        let r = 5f64.sqrt();
        assert!((d[0] - (2.0 - r)).abs() < 1e-14);
        assert!((d[1] - (2.0 + r)).abs() < 1e-14);
    }

    #[test]
    fn trace_and_frobenius_preserved() {
        let diag: Vec<f64> = (0..200)
            .map(|i| ((i * 37 % 101) as f64 - 50.0) / 7.0)
            .collect();
        let off: Vec<f64> = (0..199).map(|i| ((i * 13 % 29) as f64) / 5.0).collect();
        let tr: f64 = diag.iter().sum();
        let fro: f64 =
            diag.iter().map(|x| x * x).sum::<f64>() + 2.0 * off.iter().map(|x| x * x).sum::<f64>();
        let mut d = diag.clone();
        symmetric_tridiagonal_eigenvalues(&mut d, &off).unwrap();
        assert!((d.iter().sum::<f64>() - tr).abs() < 1e-10 * fro);
        assert!((d.iter().map(|x| x * x).sum::<f64>() - fro).abs() < 1e-10 * fro);
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn decoupled_blocks_and_trivial_sizes() {
        let mut d = vec![5.0, -1.0, 2.0];
        symmetric_tridiagonal_eigenvalues(&mut d, &[0.0, 0.0]).unwrap();
        assert_eq!(d, vec![-1.0, 2.0, 5.0]);
        let mut one = vec![4.0];
        symmetric_tridiagonal_eigenvalues(&mut one, &[]).unwrap();
        assert_eq!(one, vec![4.0]);
        let mut none: Vec<f64> = vec![];
        symmetric_tridiagonal_eigenvalues(&mut none, &[]).unwrap();
    }
}
