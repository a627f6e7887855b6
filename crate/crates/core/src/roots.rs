//! Simultaneous polynomial root finding by the Aberth–Ehrlich iteration.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOptions {
    /// Relative step size below which an estimate counts as converged.
    pub tol: f64,
    pub max_iter: usize,
    /// Perturbs the initial circle; results do not depend on it beyond rounding.
    pub seed: u64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { tol: 1e-13, max_iter: 200, seed: 0 }
    }
}

/// Horner evaluation of `p` and `p'`, coefficients in ascending order.
pub fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |p, &c| p * z + c)
}

// splitmix64, only used to place the starting circle
fn unit_from_seed(seed: u64) -> f64 {
    let mut x = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 31;
    (x >> 11) as f64 / (1u64 << 53) as f64
}

/// All roots of `Σ c_k z^k` (ascending coefficients, nonzero leading term).
///
/// Exact zero low-order coefficients are peeled off as exact roots at the
/// origin. Each root gets one Newton polish after the iteration stops.
pub fn aberth(coeffs: &[f64], opts: &RootOptions) -> Result<Vec<Complex64>> {
    let top = coeffs.iter().rposition(|&c| c != 0.0).ok_or(Error::AllZeroCouplings)?;
    let low = coeffs.iter().position(|&c| c != 0.0).unwrap();
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let c = &coeffs[low..=top];
    let n = c.len() - 1;
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(Complex64::new(-c[0] / c[1], 0.0));
        return Ok(roots);
    }

    let lead = c[n];
    let radius = c[..n].iter().map(|&x| (x / lead).abs()).fold(0.0, f64::max).powf(1.0 / n as f64);
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let offset = 0.4 + 0.5 * unit_from_seed(opts.seed);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let r = radius * (1.0 + 0.05 * ((k % 3) as f64 - 1.0));
            Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64 + offset)
        })
        .collect();

    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = eval_with_derivative(c, z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let mut step = w / (Complex64::new(1.0, 0.0) - w * s);
            if !step.is_finite() {
                step = if w.is_finite() { w } else { Complex64::new(1e-8, 1e-8) * radius };
            }
            z[k] -= step;
            max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
        }
        if max_step < opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        let residual = z.iter().map(|&r| eval(c, r).norm()).fold(0.0, f64::max);
        return Err(Error::NoConvergence { iterations, residual });
    }
    for r in z.iter_mut() {
        let (p, dp) = eval_with_derivative(c, *r);
        let polished = *r - p / dp;
        if polished.is_finite() && eval(c, polished).norm() <= p.norm() {
            *r = polished;
        }
    }
    roots.extend(z);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn has_root(roots: &[Complex64], target: Complex64, tol: f64) -> bool {
        roots.iter().any(|r| (r - target).norm() < tol)
    }

    #[test]
    fn roots_of_unity() {
        for k in 1..=6 {
            let mut c = vec![0.0; k + 1];
            c[0] = -1.0;
            c[k] = 1.0;
            let roots = aberth(&c, &RootOptions::default()).unwrap();
            assert_eq!(roots.len(), k);
            for m in 0..k {
                let w = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / k as f64);
                assert!(has_root(&roots, w, 1e-12), "k={k} m={m}");
            }
        }
    }

    #[test]
    fn exact_zero_roots_are_peeled() {
        // z(2z² + 2z + 1)
        let roots = aberth(&[0.0, 1.0, 2.0, 2.0], &RootOptions::default()).unwrap();
        assert_eq!(roots[0], Complex64::new(0.0, 0.0));
        assert!(has_root(&roots, Complex64::new(-0.5, 0.5), 1e-13));
        assert!(has_root(&roots, Complex64::new(-0.5, -0.5), 1e-13));
    }

    #[test]
    fn seed_does_not_change_roots() {
        let c = [0.9, -0.74, 0.21, 0.1, -0.6, 0.1, 0.21, -0.74, 0.9];
        let a = aberth(&c, &RootOptions::default()).unwrap();
        let b = aberth(&c, &RootOptions { seed: 12345, ..Default::default() }).unwrap();
        for r in &a {
            assert!(has_root(&b, *r, 1e-10));
        }
    }

    #[test]
    fn all_zero_is_an_error() {
        assert_eq!(aberth(&[0.0, 0.0], &RootOptions::default()), Err(Error::AllZeroCouplings));
    }
}
