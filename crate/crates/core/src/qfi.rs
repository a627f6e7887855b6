//! Quantum Fisher information density of string generators and its
//! finite-size scaling.
//!
//! For `O_ν = ½ Σ_j τ_j` (or the staggered `½ Σ_j (−1)^j τ_j`)
//! the density in the thermodynamic form is
//!
//! ```text
//! f_Q = 1 + Σ_{r=1}^{L−|ν|} w_r C_ν(r),   w_r = 1 or (−1)^r.
//! ```
//!
//! A density growing like `L^λ` with `λ > 0` witnesses multipartite entanglement;
//! in a phase with winding `ν` the matching string gives `λ ≈ 1`.

use rayon::prelude::*;

use crate::chain::ChainSpec;
use crate::correlators::{correlator_table, CorrelatorTable};
use crate::error::{Error, Result};
use crate::toeplitz::{max_separation, scf_series, ScfSeries};
use crate::winding::{winding_number, Warning, DEFAULT_TOL_BAND};

/// `|f − 1|` below this on the whole grid marks a generator as trivial.
pub const TRIVIAL_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Plain,
    Staggered,
}

impl Variant {
    pub fn weight(self, r: usize) -> f64 {
        match self {
            Variant::Plain => 1.0,
            Variant::Staggered => {
                if r % 2 == 0 { 1.0 } else { -1.0 }
            }
        }
    }

    pub fn is_staggered(self) -> bool {
        self == Variant::Staggered
    }
}

fn full_series(table: &CorrelatorTable, nu: i64) -> Result<ScfSeries> {
    let l = table.length();
    let max = max_separation(l, nu);
    if max == 0 {
        return Err(Error::LengthTooSmall { length: l, range: nu.unsigned_abs() as usize });
    }
    scf_series(table, nu, max)
}

/// `1 + Σ_r w_r C(r)` from an already computed series.
pub fn density_from_series(series: &ScfSeries, variant: Variant) -> f64 {
    1.0 + series.entries.iter().map(|e| variant.weight(e.r) * e.c).sum::<f64>()
}

/// `4 Var(O)/L` for the generator on the `M = L − |ν| + 1` dual sites that fit
/// in the chain: `[M + 2 Σ_{r=1}^{M−1} (M − r) w_r C(r)] / L`.
/// For `|ν| = 1` this coincides with the thermodynamic form because
/// `C(r) = C(L − r)` on the ring.
pub fn finite_density_from_series(series: &ScfSeries, variant: Variant) -> f64 {
    let m = series.entries.len() + 1;
    let s: f64 = series.entries.iter().map(|e| (m - e.r) as f64 * variant.weight(e.r) * e.c).sum();
    (m as f64 + 2.0 * s) / series.length as f64
}

pub fn qfi_density(table: &CorrelatorTable, nu: i64, variant: Variant) -> Result<f64> {
    Ok(density_from_series(&full_series(table, nu)?, variant))
}

pub fn finite_qfi_density(table: &CorrelatorTable, nu: i64, variant: Variant) -> Result<f64> {
    Ok(finite_density_from_series(&full_series(table, nu)?, variant))
}

/// Plain and staggered densities for each `ν` at one length.
pub fn qfi_profile(spec: &ChainSpec, l: usize, nus: &[i64]) -> Result<Vec<(f64, f64)>> {
    let table = correlator_table(spec, l)?;
    nus.iter()
        .map(|&nu| {
            let s = full_series(&table, nu)?;
            Ok((density_from_series(&s, Variant::Plain), density_from_series(&s, Variant::Staggered)))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QfiPoint {
    pub l: usize,
    pub f_q: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub nu: i64,
    pub variant: Variant,
    /// Exponent in `|f_Q − 1| ≈ |γ| L^λ`.
    pub lambda: f64,
    /// Prefactor, carrying the sign of `f_Q − 1`.
    pub gamma: f64,
    pub r2: f64,
    pub trivial: bool,
    pub points: Vec<QfiPoint>,
    pub warnings: Vec<Warning>,
}

/// Quantity regressed against `ln L`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    /// `ln|f_Q − 1|`, the exponent of the growing part.
    #[default]
    Excess,
    /// `ln f_Q`; tracks the published critical exponents more closely.
    Density,
}

/// Least-squares fit of `ln|f − 1|` against `ln L`.
pub fn fit_points(nu: i64, variant: Variant, points: Vec<QfiPoint>) -> Result<ScalingFit> {
    fit_points_with(nu, variant, points, FitTarget::Excess)
}

pub fn fit_points_with(nu: i64, variant: Variant, points: Vec<QfiPoint>, target: FitTarget) -> Result<ScalingFit> {
    let mut ls: Vec<usize> = points.iter().map(|p| p.l).collect();
    ls.sort_unstable();
    ls.dedup();
    if ls.len() < 2 {
        return Err(Error::FitDegenerate);
    }
    let dev: Vec<f64> = points.iter().map(|p| p.f_q - 1.0).collect();
    let trivial = dev.iter().all(|d| d.abs() < TRIVIAL_THRESHOLD);
    let mut warnings = Vec::new();
    let mono_up = dev.windows(2).all(|w| w[1].abs() >= w[0].abs());
    let mono_down = dev.windows(2).all(|w| w[1].abs() <= w[0].abs());
    if !mono_up && !mono_down {
        warnings.push(Warning::NonMonotone);
    }
    if trivial {
        return Ok(ScalingFit { nu, variant, lambda: 0.0, gamma: 0.0, r2: 1.0, trivial, points, warnings });
    }
    let sign = match target {
        FitTarget::Excess => dev.last().map(|d| if *d < 0.0 { -1.0 } else { 1.0 }).unwrap_or(1.0),
        FitTarget::Density => points.last().map(|p| p.f_q.signum()).unwrap_or(1.0),
    };
    let usable: Vec<(f64, f64)> = points
        .iter()
        .zip(&dev)
        .map(|(p, d)| (p.l, if target == FitTarget::Excess { *d } else { p.f_q }))
        .filter(|(_, y)| y.is_finite() && y.abs() > 0.0)
        .map(|(l, y)| ((l as f64).ln(), y.abs().ln()))
        .collect();
    let (lambda, intercept, r2) = if usable.len() < 2 { (0.0, f64::NEG_INFINITY, 0.0) } else { least_squares(&usable) };
    Ok(ScalingFit { nu, variant, lambda, gamma: sign * intercept.exp(), r2, trivial, points, warnings })
}

fn least_squares(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Fits for both variants of every `ν` in `nus`, sharing one correlator table
/// and one determinant series per length.
pub fn scaling_fits(spec: &ChainSpec, nus: &[i64], l_grid: &[usize]) -> Result<Vec<(ScalingFit, ScalingFit)>> {
    scaling_fits_with(spec, nus, l_grid, FitTarget::Excess)
}

pub fn scaling_fits_with(
    spec: &ChainSpec,
    nus: &[i64],
    l_grid: &[usize],
    target: FitTarget,
) -> Result<Vec<(ScalingFit, ScalingFit)>> {
    let per_l: Vec<Vec<(f64, f64)>> =
        l_grid.par_iter().map(|&l| qfi_profile(spec, l, nus)).collect::<Result<_>>()?;
    nus.iter()
        .enumerate()
        .map(|(k, &nu)| {
            let pts = |pick: fn(&(f64, f64)) -> f64| {
                l_grid.iter().zip(&per_l).map(|(&l, row)| QfiPoint { l, f_q: pick(&row[k]) }).collect()
            };
            Ok((
                fit_points_with(nu, Variant::Plain, pts(|p| p.0), target)?,
                fit_points_with(nu, Variant::Staggered, pts(|p| p.1), target)?,
            ))
        })
        .collect()
}

pub fn scaling_fit(spec: &ChainSpec, nu: i64, variant: Variant, l_grid: &[usize]) -> Result<ScalingFit> {
    let (p, s) = scaling_fits(spec, &[nu], l_grid)?.pop().unwrap();
    Ok(if variant.is_staggered() { s } else { p })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub mu: f64,
    /// `N − P + (zeros on the circle)/2`; NaN if the root finder failed.
    pub winding: f64,
    /// Empty when `error` is set.
    pub fits: Vec<(ScalingFit, ScalingFit)>,
    pub error: Option<String>,
}

/// Winding number and scaling exponents along a line of chemical potentials.
/// Failures are kept in the row they belong to.
pub fn phase_scan(template: &ChainSpec, mus: &[f64], nus: &[i64], l_grid: &[usize]) -> Vec<ScanRow> {
    phase_scan_with(template, mus, nus, l_grid, FitTarget::Excess)
}

pub fn phase_scan_with(
    template: &ChainSpec,
    mus: &[f64],
    nus: &[i64],
    l_grid: &[usize],
    target: FitTarget,
) -> Vec<ScanRow> {
    mus.par_iter()
        .map(|&mu| {
            let spec = template.with_mu(mu);
            let winding = winding_number(&spec, DEFAULT_TOL_BAND).map(|w| w.from_roots);
            let fits = scaling_fits_with(&spec, nus, l_grid, target);
            match (winding, fits) {
                (Ok(winding), Ok(fits)) => ScanRow { mu, winding, fits, error: None },
                (w, f) => ScanRow {
                    mu,
                    winding: w.as_ref().copied().unwrap_or(f64::NAN),
                    fits: Vec::new(),
                    error: Some(f.err().or(w.err()).map(|e| e.to_string()).unwrap_or_default()),
                },
            }
        })
        .collect()
}

/// `μ` values `lo, lo + step, …` up to `hi` inclusive, rounded to kill drift.
pub fn mu_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("bad μ range {lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12).collect())
}

/// `start:stop:step`, inclusive of `stop` when it lies on the grid.
pub fn length_grid(start: usize, stop: usize, step: usize) -> Vec<usize> {
    (start..=stop).step_by(step.max(1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kitaev_point_is_maximal() {
        // J = Δ = 1 in the textbook normalisation, i.e. J⁺ = J⁻ = −1 here
        let spec = ChainSpec::new(vec![[-1.0, -1.0]], 0.0).unwrap();
        for l in [8, 64, 512] {
            let t = correlator_table(&spec, l).unwrap();
            let f = qfi_density(&t, 1, Variant::Plain).unwrap();
            assert!((f - l as f64).abs() < 1e-10, "L={l} f={f}");
            let fs = qfi_density(&t, 1, Variant::Staggered).unwrap();
            assert!(fs.abs() < 1e-10);
        }
    }

    #[test]
    fn fit_recovers_power_law() {
        let pts = [100, 200, 400, 800].iter().map(|&l| QfiPoint { l, f_q: 1.0 + 0.5 * (l as f64).powf(0.75) }).collect();
        let fit = fit_points(1, Variant::Plain, pts).unwrap();
        assert!((fit.lambda - 0.75).abs() < 1e-12);
        assert!((fit.gamma - 0.5).abs() < 1e-12);
        assert!(!fit.trivial);
        assert!(fit.warnings.is_empty());
    }

    #[test]
    fn fit_needs_two_lengths() {
        let pts = vec![QfiPoint { l: 100, f_q: 2.0 }, QfiPoint { l: 100, f_q: 2.0 }];
        assert_eq!(fit_points(1, Variant::Plain, pts), Err(Error::FitDegenerate));
    }

    #[test]
    fn trivial_generator_reports_zero_exponent() {
        let pts = [250, 500, 750].iter().map(|&l| QfiPoint { l, f_q: 1.0 + 1e-9 * l as f64 }).collect();
        let fit = fit_points(1, Variant::Plain, pts).unwrap();
        assert!(fit.trivial);
        assert_eq!(fit.lambda, 0.0);
    }

    #[test]
    fn density_target_fits_ln_f() {
        let pts: Vec<QfiPoint> = [100, 200, 400].iter().map(|&l| QfiPoint { l, f_q: 3.0 * (l as f64).powf(0.5) }).collect();
        let fit = fit_points_with(1, Variant::Plain, pts, FitTarget::Density).unwrap();
        assert!((fit.lambda - 0.5).abs() < 1e-12);
        assert!((fit.gamma - 3.0).abs() < 1e-9);
    }
}
