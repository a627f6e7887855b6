//! Winding number from the zeros and poles of the characteristic function
//!
//! ```text
//! g(ζ) = Σ_n (J^x_n ζ^n + J^y_n ζ^{-n}) − μ
//! ```
//!
//! On the unit circle `g(e^{iq}) = z(q) + i y(q)`, so the number of times the
//! Bloch vector winds around the origin equals `N − P`: zeros of `g` inside the
//! unit disk minus the order of its pole at the origin. Zeros sitting on the
//! circle (critical points) count one half each.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::chain::{is_gapless, yz, yz_derivative, ChainSpec};
use crate::error::{Error, Result};
use crate::roots::{aberth, eval, RootOptions};

/// A `J^y_n` below this is treated as absent when fixing the pole order.
pub const POLE_THRESHOLD: f64 = 1e-14;
/// Roots closer than this are flagged as (nearly) degenerate.
pub const DEGENERATE_SEPARATION: f64 = 1e-6;

/// `p(ζ) = ζ^{nf} g(ζ)`, a polynomial of degree at most `2 nf`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicPoly {
    /// Ascending coefficients, length `2 nf + 1`.
    pub coeffs: Vec<f64>,
    pub nf: usize,
    /// Order of the pole of `g` at the origin.
    pub pole_order: usize,
}

impl CharacteristicPoly {
    /// `ζ^P g(ζ)`: same zeros as `g` (the spurious roots of `p` at the origin,
    /// which only cancel the pole, are divided out) with trailing zeros trimmed.
    pub fn reduced(&self) -> Vec<f64> {
        let shift = self.nf - self.pole_order;
        let mut c = self.coeffs[shift..].to_vec();
        while c.len() > 1 && *c.last().unwrap() == 0.0 {
            c.pop();
        }
        c
    }

    pub fn eval_g(&self, zeta: Complex64) -> Complex64 {
        eval(&self.coeffs, zeta) / zeta.powi(self.nf as i32)
    }
}

pub fn characteristic_poly(spec: &ChainSpec) -> Result<CharacteristicPoly> {
    spec.validate()?;
    if spec.is_all_zero() {
        return Err(Error::AllZeroCouplings);
    }
    let nf = spec.nf;
    let mut coeffs = vec![0.0; 2 * nf + 1];
    coeffs[nf] -= spec.mu;
    let mut pole_order = 0;
    for n in 1..=nf {
        coeffs[nf + n] += spec.jx(n);
        coeffs[nf - n] += spec.jy(n);
        if spec.jy(n).abs() > POLE_THRESHOLD {
            pole_order = n;
        }
    }
    for n in pole_order + 1..=nf {
        coeffs[nf - n] = 0.0;
    }
    Ok(CharacteristicPoly { coeffs, nf, pole_order })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Warning {
    /// Two roots closer than [`DEGENERATE_SEPARATION`].
    DegenerateRoots { separation: f64 },
    /// `|f − 1|` is not monotone across the length grid.
    NonMonotone,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootProfile {
    pub inside: Vec<Complex64>,
    pub on_contour: Vec<Complex64>,
    pub outside: Vec<Complex64>,
    pub pole_count_inside: usize,
    /// Largest `|p(ζ)| / (max|c| · max(1,|ζ|)^deg)` over the roots.
    pub residual: f64,
    pub warnings: Vec<Warning>,
}

impl RootProfile {
    pub fn all_zeros(&self) -> impl Iterator<Item = &Complex64> {
        self.inside.iter().chain(&self.on_contour).chain(&self.outside)
    }
}

pub fn find_roots(poly: &CharacteristicPoly, tol_band: f64, opts: &RootOptions) -> Result<RootProfile> {
    let reduced = poly.reduced();
    let roots = if reduced.len() > 1 { aberth(&reduced, opts)? } else { Vec::new() };

    let deg = reduced.len() as i32 - 1;
    let cmax = reduced.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let residual = roots
        .iter()
        .map(|&r| eval(&reduced, r).norm() / (cmax * r.norm().max(1.0).powi(deg)))
        .fold(0.0, f64::max);

    let mut warnings = Vec::new();
    let mut min_sep = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            min_sep = min_sep.min((roots[i] - roots[j]).norm());
        }
    }
    if min_sep < DEGENERATE_SEPARATION {
        warnings.push(Warning::DegenerateRoots { separation: min_sep });
    }

    let mut profile = RootProfile {
        inside: Vec::new(),
        on_contour: Vec::new(),
        outside: Vec::new(),
        pole_count_inside: poly.pole_order,
        residual,
        warnings,
    };
    for r in roots {
        let m = r.norm();
        if m < 1.0 - tol_band {
            profile.inside.push(r);
        } else if m > 1.0 + tol_band {
            profile.outside.push(r);
        } else {
            profile.on_contour.push(r);
        }
    }
    Ok(profile)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindingResult {
    /// `N − P + (zeros on the circle)/2`
    pub from_roots: f64,
    /// Discretised loop integral; `None` when the spectrum is gapless.
    pub from_integral: Option<f64>,
    pub agreement: bool,
    pub profile: RootProfile,
}

impl WindingResult {
    /// The integer winding number, when the spectrum is gapped.
    pub fn nu(&self) -> Option<i64> {
        if self.profile.on_contour.is_empty() { Some(self.from_roots as i64) } else { None }
    }
}

pub const DEFAULT_TOL_BAND: f64 = 1e-8;
const INTEGRAL_POINTS: usize = 8192;

pub fn winding_number(spec: &ChainSpec, tol_band: f64) -> Result<WindingResult> {
    winding_number_with(spec, tol_band, &RootOptions::default())
}

pub fn winding_number_with(spec: &ChainSpec, tol_band: f64, opts: &RootOptions) -> Result<WindingResult> {
    let poly = characteristic_poly(spec)?;
    let profile = find_roots(&poly, tol_band, opts)?;
    let from_roots = profile.inside.len() as f64 - profile.pole_count_inside as f64
        + 0.5 * profile.on_contour.len() as f64;
    let from_integral = if is_gapless(spec, 1e-9) || !profile.on_contour.is_empty() {
        None
    } else {
        Some(winding_integral(spec, INTEGRAL_POINTS))
    };
    let agreement = match from_integral {
        Some(w) => w.round() == from_roots && (w - from_roots).abs() < 1e-6,
        None => false,
    };
    Ok(WindingResult { from_roots, from_integral, agreement, profile })
}

/// `(1/2π) ∮ (z dy − y dz)/(y² + z²)` by the trapezoid rule on `n` points,
/// which is spectrally accurate for this smooth periodic integrand.
pub fn winding_integral(spec: &ChainSpec, n: usize) -> f64 {
    let mut sum = 0.0;
    for k in 0..n {
        let q = -PI + 2.0 * PI * k as f64 / n as f64;
        let (y, z) = yz(spec, q);
        let (dy, dz) = yz_derivative(spec, q);
        sum += (z * dy - y * dz) / (y * y + z * z);
    }
    sum / n as f64
}

const SCAN_INTERVALS: usize = 4096;

/// Values of `μ` at which the gap closes, ascending.
///
/// These are `μ = Σ J⁺_n cos(n q*)` at the zeros `q*` of `y(q)` in `[0, π]`.
pub fn critical_mu_values(spec: &ChainSpec) -> Result<Vec<f64>> {
    let g0 = spec.with_mu(0.0);
    critical_values(
        |q| {
            let (y, z) = yz(&g0, q);
            (Complex64::new(z, y), Complex64::new(-1.0, 0.0))
        },
        spec.scale(),
    )
}

/// Values of `λ` at which the gap closes when coupling `n` is replaced by
/// `λ · (a⁺, a⁻)` and everything else is held fixed.
pub fn critical_coupling_values(spec: &ChainSpec, n: usize, direction: [f64; 2]) -> Result<Vec<f64>> {
    if n == 0 || n > spec.nf {
        return Err(Error::InvalidInput(format!("coupling index {n} outside 1..={}", spec.nf)));
    }
    let mut rest = spec.clone();
    rest.couplings[n - 1] = [0.0, 0.0];
    let ax = 0.5 * (direction[0] + direction[1]);
    let ay = 0.5 * (direction[0] - direction[1]);
    critical_values(
        |q| {
            let (y, z) = yz(&rest, q);
            let (s, c) = (n as f64 * q).sin_cos();
            (Complex64::new(z, y), Complex64::new((ax + ay) * c, (ax - ay) * s))
        },
        spec.scale().max(direction[0].abs()).max(direction[1].abs()),
    )
}

// g = g0 + λ h vanishes on the circle iff g0/h is real there; then λ = −g0/h.
fn critical_values(gh: impl Fn(f64) -> (Complex64, Complex64), scale: f64) -> Result<Vec<f64>> {
    let phi = |q: f64| {
        let (g0, h) = gh(q);
        (g0 * h.conj()).im
    };
    let lambda = |q: f64| {
        let (g0, h) = gh(q);
        let hh = h.norm_sqr();
        if hh < 1e-24 { None } else { Some(-(g0 * h.conj()).re / hh) }
    };
    let step = PI / SCAN_INTERVALS as f64;
    let samples: Vec<f64> = (0..=SCAN_INTERVALS).map(|i| phi(i as f64 * step)).collect();
    let smax = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if smax <= 1e-14 * scale.max(1e-300) * scale.max(1.0) {
        return Err(Error::DegenerateLoop);
    }

    let mut qs = vec![0.0, PI];
    for i in 0..SCAN_INTERVALS {
        let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
        let (fa, fb) = (samples[i], samples[i + 1]);
        if fa == 0.0 && i > 0 {
            qs.push(a);
        } else if fa * fb < 0.0 {
            qs.push(bisect(&phi, a, b, fa));
        }
    }

    let mut out: Vec<f64> = qs.into_iter().filter_map(lambda).collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(out)
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > 1e-12 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_range(mu: f64) -> ChainSpec {
        ChainSpec::new(vec![[1.0, 1.0], [2.0, 2.0], [2.0, 2.0]], mu).unwrap()
    }

    #[test]
    fn zeros_of_three_range_chain_at_mu_zero() {
        let poly = characteristic_poly(&three_range(0.0)).unwrap();
        assert_eq!(poly.pole_order, 0);
        let p = find_roots(&poly, DEFAULT_TOL_BAND, &RootOptions::default()).unwrap();
        assert_eq!(p.inside.len(), 3);
        assert!(p.inside.iter().any(|z| z.norm() == 0.0));
        assert!(p.inside.iter().any(|z| (z - Complex64::new(-0.5, 0.5)).norm() < 1e-12));
    }

    #[test]
    fn winding_of_three_range_chain() {
        for (mu, nu) in [(6.0, 0.0), (3.0, 1.0), (1.0, 1.0), (0.0, 3.0), (-2.0, 2.0)] {
            let w = winding_number(&three_range(mu), DEFAULT_TOL_BAND).unwrap();
            assert_eq!(w.from_roots, nu, "mu={mu}");
            assert!(w.agreement, "mu={mu} integral={:?}", w.from_integral);
        }
    }

    #[test]
    fn unit_circle_zeros_count_half() {
        for k in 1..=4usize {
            let mut c = vec![[0.0, 0.0]; k];
            c[k - 1] = [1.0, 1.0];
            let w = winding_number(&ChainSpec::new(c, 1.0).unwrap(), DEFAULT_TOL_BAND).unwrap();
            assert_eq!(w.from_roots, 0.5 * k as f64);
            assert_eq!(w.profile.on_contour.len(), k);
            assert_eq!(w.from_integral, None);
        }
    }

    #[test]
    fn pole_counts() {
        let spec = ChainSpec::new(vec![[2.0, 0.0]], 0.0).unwrap();
        let poly = characteristic_poly(&spec).unwrap();
        assert_eq!(poly.pole_order, 1);
        let w = winding_number(&ChainSpec::from_xy(&[[0.0, 1.0]], 0.0).unwrap(), DEFAULT_TOL_BAND).unwrap();
        assert_eq!(w.from_roots, -1.0);
        assert!(w.agreement);
    }

    #[test]
    fn critical_mu_of_three_range_chain() {
        let got = critical_mu_values(&three_range(0.0)).unwrap();
        let s3 = 3f64.sqrt();
        let want = [-s3 - 1.0, -1.0, s3 - 1.0, 5.0];
        assert_eq!(got.len(), 4, "{got:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn critical_coupling_example() {
        let spec = ChainSpec::new(vec![[1.0, -1.0], [0.0, 0.0]], 1.0).unwrap();
        let got = critical_coupling_values(&spec, 2, [1.0, 1.0]).unwrap();
        let s5 = 5f64.sqrt();
        let want = [(-s5 - 1.0) / 2.0, 0.0, (s5 - 1.0) / 2.0, 2.0];
        assert_eq!(got.len(), 4, "{got:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn errors() {
        let zero = ChainSpec::new(vec![[0.0, 0.0]], 0.0).unwrap();
        assert_eq!(characteristic_poly(&zero), Err(Error::AllZeroCouplings));
        let flat = ChainSpec::new(vec![[1.0, 0.0]], 0.2).unwrap();
        assert_eq!(critical_mu_values(&flat), Err(Error::DegenerateLoop));
    }
}
