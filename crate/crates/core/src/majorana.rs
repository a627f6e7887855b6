//! Majorana zero modes of the open chain from the zeros of `g(ζ)`.
//!
//! A left mode `φ = Σ_j α_j a_j` solves the recursion
//! `Σ_n (J^x_n α_{j+n} + J^y_n α_{j−n}) − μ α_j = 0` with `α_j = 0` for `j ≤ 0`.
//! In the bulk `α_j = ζ^j` works for any zero of `g`; normalisable modes use
//! zeros inside the unit disk. The first `P` rows, where the recursion reaches
//! past the edge, give `P` linear constraints on the `N` amplitudes, leaving
//! `N − P = ν` independent modes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bdg::{bdg_matrix, majorana_matrix, Boundary};
use crate::chain::{is_gapless, min_gap, ChainSpec};
use crate::error::{Error, Result};
use crate::winding::{characteristic_poly, find_roots, winding_number, DEFAULT_TOL_BAND};
use crate::roots::RootOptions;

/// Roots closer than this are merged into one root of higher multiplicity.
const MERGE_TOL: f64 = 1e-5;
const NULL_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Which Majorana species a mode is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Species {
    /// `a_j = c†_j + c_j`
    A,
    /// `b_j = i(c†_j − c_j)`
    B,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MzmSet {
    pub side: Side,
    pub species: Species,
    pub length: usize,
    /// Orthonormal amplitude vectors over sites `1..=L`, one per mode.
    pub modes: Vec<Vec<Complex64>>,
    /// `‖M·mode‖` relative to `‖M‖`, where `M` is the open-chain Majorana matrix.
    pub residual_norms: Vec<f64>,
}

impl MzmSet {
    pub fn count(&self) -> usize {
        self.modes.len()
    }

    /// `|amplitude|²` per site for mode `i`.
    pub fn probabilities(&self, i: usize) -> Vec<f64> {
        self.modes[i].iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Basis function of the ansatz: `j^k ζ^j`, or a delta at site `k+1` for `ζ = 0`.
#[derive(Clone, Copy, Debug)]
enum Basis {
    Power { zeta: Complex64, k: u32 },
    Delta { site: usize },
}

impl Basis {
    fn at(&self, j: usize) -> Complex64 {
        match *self {
            Basis::Power { zeta, k } => zeta.powu(j as u32) * (j as f64).powi(k as i32),
            Basis::Delta { site } => {
                if j == site { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
            }
        }
    }
}

fn ansatz_basis(inside: &[Complex64]) -> Vec<Basis> {
    let mut clusters: Vec<(Complex64, u32)> = Vec::new();
    for &z in inside {
        match clusters.iter_mut().find(|(c, _)| (c - z).norm() < MERGE_TOL) {
            Some((c, m)) => {
                *c = (*c * *m as f64 + z) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    let mut basis = Vec::new();
    for (zeta, mult) in clusters {
        if zeta.norm() < MERGE_TOL {
            basis.extend((1..=mult as usize).map(|site| Basis::Delta { site }));
        } else {
            basis.extend((0..mult).map(|k| Basis::Power { zeta, k }));
        }
    }
    basis
}

/// Left-edge modes built from `a` Majoranas for the chain `spec`, assuming `ν ≥ 0`.
fn left_a_modes(spec: &ChainSpec, l: usize) -> Result<Vec<Vec<Complex64>>> {
    let poly = characteristic_poly(spec)?;
    let profile = find_roots(&poly, DEFAULT_TOL_BAND, &RootOptions::default())?;
    let p = poly.pole_order;
    let basis = ansatz_basis(&profile.inside);
    let n = basis.len();
    if n < p {
        return Err(Error::DimensionMismatch { expected: 0, found: 0 });
    }
    if l < p + spec.nf + 1 {
        return Err(Error::LengthTooSmall { length: l, range: spec.nf });
    }

    // Truncated recursion at rows k = 1..=P.
    let mut c = DMatrix::<Complex64>::zeros(n.max(1), n);
    for k in 1..=p {
        for (col, b) in basis.iter().enumerate() {
            let mut v = -spec.mu * b.at(k);
            for m in 1..=spec.nf {
                v += spec.jx(m) * b.at(k + m);
                if m < k {
                    v += spec.jy(m) * b.at(k - m);
                }
            }
            c[(k - 1, col)] = v;
        }
    }
    let null: Vec<DVector<Complex64>> = if p == 0 {
        (0..n).map(|i| DVector::from_fn(n, |r, _| Complex64::new((r == i) as u8 as f64, 0.0))).collect()
    } else {
        let svd = c.svd(false, true);
        let vt = svd.v_t.expect("requested V^H");
        let smax = svd.singular_values.max();
        (0..n)
            .filter(|&i| svd.singular_values[i] <= NULL_THRESHOLD * smax)
            .map(|i| vt.row(i).transpose().map(|x| x.conj()))
            .collect()
    };

    let mut modes: Vec<Vec<Complex64>> = Vec::new();
    for w in null {
        let mut v: Vec<Complex64> =
            (1..=l).map(|j| basis.iter().zip(w.iter()).map(|(b, wi)| b.at(j) * wi).sum()).collect();
        for u in &modes {
            let ov: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= ov * y;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            v.iter_mut().for_each(|x| *x /= norm);
            modes.push(v);
        }
    }
    Ok(modes)
}

fn residuals(spec: &ChainSpec, l: usize, species: Species, modes: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    let m = majorana_matrix(spec, l, Boundary::Open)?.map(|x| Complex64::new(x, 0.0));
    let scale = m.norm().max(f64::MIN_POSITIVE);
    Ok(modes
        .iter()
        .map(|v| {
            let v = DVector::from_column_slice(v);
            let r = match species {
                Species::A => m.transpose() * v,
                Species::B => &m * v,
            };
            r.norm() / scale
        })
        .collect())
}

fn gapped_winding(spec: &ChainSpec) -> Result<i64> {
    let (_, gap) = min_gap(spec);
    if is_gapless(spec, 1e-9) {
        return Err(Error::GaplessSpec(gap));
    }
    let w = winding_number(spec, DEFAULT_TOL_BAND)?;
    w.nu().ok_or(Error::GaplessSpec(gap))
}

/// Zero modes localised at the left edge. For `ν > 0` they are built from
/// `a` Majoranas and `g`; for `ν < 0` from `b` Majoranas and `ḡ(ζ) = g(1/ζ)`.
pub fn solve_left_modes(spec: &ChainSpec, l: usize) -> Result<MzmSet> {
    let nu = gapped_winding(spec)?;
    let (species, source) = if nu >= 0 { (Species::A, spec.clone()) } else { (Species::B, spec.phase_rotated()) };
    let modes = if nu == 0 { Vec::new() } else { left_a_modes(&source, l)? };
    if modes.len() != nu.unsigned_abs() as usize {
        return Err(Error::DimensionMismatch { expected: nu.unsigned_abs() as usize, found: modes.len() });
    }
    let residual_norms = residuals(spec, l, species, &modes)?;
    Ok(MzmSet { side: Side::Left, species, length: l, modes, residual_norms })
}

/// Zero modes at the right edge: the site reversal `β_j = α_{L−j+1}` of the
/// left modes, carried by the other Majorana species.
pub fn solve_right_modes(spec: &ChainSpec, l: usize) -> Result<MzmSet> {
    let left = solve_left_modes(spec, l)?;
    let species = match left.species {
        Species::A => Species::B,
        Species::B => Species::A,
    };
    let modes: Vec<Vec<Complex64>> =
        left.modes.iter().map(|m| m.iter().rev().copied().collect()).collect();
    let residual_norms = residuals(spec, l, species, &modes)?;
    Ok(MzmSet { side: Side::Right, species, length: l, modes, residual_norms })
}

/// Fermionic zero mode `d = (φ + iψ)/2 = Σ_j (u_j c_j + v_j c†_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionZeroMode {
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

/// Pairs the i-th left mode with the i-th right mode.
pub fn fermion_zero_modes(left: &MzmSet, right: &MzmSet) -> Vec<FermionZeroMode> {
    left.modes
        .iter()
        .zip(&right.modes)
        .map(|(l, r)| {
            let (alpha, beta) = match left.species {
                Species::A => (l, r),
                Species::B => (r, l),
            };
            FermionZeroMode {
                u: alpha.iter().zip(beta).map(|(a, b)| (a + b) * 0.5).collect(),
                v: alpha.iter().zip(beta).map(|(a, b)| (a - b) * 0.5).collect(),
            }
        })
        .collect()
}

/// Near-zero modes of the dense open-chain BdG matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleModes {
    /// Number of Majorana modes per edge.
    pub count: usize,
    /// Eigenvalues with `|E| < tol · ‖H‖`.
    pub energies: Vec<f64>,
    /// Orthonormal basis of the `a`-components of the near-zero eigenvectors.
    pub a_span: Vec<Vec<f64>>,
    pub b_span: Vec<Vec<f64>>,
    /// Edge on which each span is concentrated.
    pub a_side: Side,
    pub b_side: Side,
}

impl OracleModes {
    pub fn span(&self, species: Species) -> &[Vec<f64>] {
        match species {
            Species::A => &self.a_span,
            Species::B => &self.b_span,
        }
    }
}

pub fn bdg_null_space_oracle(spec: &ChainSpec, l: usize, tol: f64) -> Result<OracleModes> {
    let h = bdg_matrix(spec, l, Boundary::Open)?;
    let eig = h.clone().symmetric_eigen();
    let hnorm = eig.eigenvalues.amax();
    let picked: Vec<usize> = (0..2 * l).filter(|&i| eig.eigenvalues[i].abs() < tol * hnorm).collect();
    let energies: Vec<f64> = picked.iter().map(|&i| eig.eigenvalues[i]).collect();
    // The QR eigenvectors of a near-degenerate cluster can sit 1e-4 off the
    // true subspace. Two steps of subspace iteration with (H² + σ²)⁻¹ tighten
    // them; every |E| ≪ σ is amplified alike, so the block keeps its rank.
    let mut basis = DMatrix::from_fn(2 * l, picked.len(), |r, c| eig.eigenvectors[(r, picked[c])]);
    if !picked.is_empty() {
        let spread = energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let sigma = (10.0 * spread).max(1e-6 * hnorm);
        if let Some(chol) = (&h * &h + DMatrix::identity(2 * l, 2 * l) * (sigma * sigma)).cholesky() {
            for _ in 0..2 {
                basis = chol.solve(&basis).qr().q();
            }
        }
    }
    let mut a = DMatrix::zeros(l, picked.len());
    let mut b = DMatrix::zeros(l, picked.len());
    for col in 0..picked.len() {
        let e = basis.column(col);
        for j in 0..l {
            a[(j, col)] = 0.5 * (e[j] + e[l + j]);
            b[(j, col)] = 0.5 * (e[j] - e[l + j]);
        }
    }
    let a_span = orthonormal_columns(&a);
    let b_span = orthonormal_columns(&b);
    Ok(OracleModes {
        count: picked.len() / 2,
        energies,
        a_side: side_of(&a_span, l),
        b_side: side_of(&b_span, l),
        a_span,
        b_span,
    })
}

fn orthonormal_columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    if m.ncols() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-6 * smax)
        .map(|i| u.column(i).iter().copied().collect())
        .collect()
}

fn side_of(span: &[Vec<f64>], l: usize) -> Side {
    let mut weight = 0.0;
    let mut total = 0.0;
    for v in span {
        for (j, x) in v.iter().enumerate() {
            weight += (j as f64 + 0.5) * x * x;
            total += x * x;
        }
    }
    if total == 0.0 || weight / total < 0.5 * l as f64 { Side::Left } else { Side::Right }
}

/// Principal angles (radians, ascending) between the spans of two vector sets.
pub fn principal_angles(x: &[Vec<Complex64>], y: &[Vec<Complex64>]) -> Vec<f64> {
    let qx = orthonormal_complex(x);
    let qy = orthonormal_complex(y);
    if qx.ncols() == 0 || qy.ncols() == 0 {
        return Vec::new();
    }
    let overlap = qx.adjoint() * qy;
    let mut ang: Vec<f64> = overlap.singular_values().iter().map(|s| s.min(1.0).acos()).collect();
    ang.sort_by(f64::total_cmp);
    ang
}

fn orthonormal_complex(v: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    if v.is_empty() {
        return DMatrix::zeros(0, 0);
    }
    let m = DMatrix::from_fn(v[0].len(), v.len(), |r, c| v[c][r]);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1e-10 * smax).collect();
    DMatrix::from_fn(u.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

pub fn to_complex(v: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    v.iter().map(|x| x.iter().map(|&r| Complex64::new(r, 0.0)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_range(mu: f64) -> ChainSpec {
        ChainSpec::new(vec![[1.0, 1.0], [2.0, 2.0], [2.0, 2.0]], mu).unwrap()
    }

    #[test]
    fn kitaev_point_mode_sits_on_first_site() {
        let spec = ChainSpec::new(vec![[1.0, 1.0]], 0.0).unwrap();
        let left = solve_left_modes(&spec, 10).unwrap();
        assert_eq!(left.count(), 1);
        assert_eq!(left.species, Species::A);
        assert!((left.modes[0][0].norm() - 1.0).abs() < 1e-14);
        let right = solve_right_modes(&spec, 10).unwrap();
        assert!((right.modes[0][9].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn counts_match_winding() {
        for (mu, n) in [(0.0, 3), (-2.0, 2), (1.0, 1), (6.0, 0)] {
            let left = solve_left_modes(&three_range(mu), 60).unwrap();
            assert_eq!(left.count(), n, "mu={mu}");
            // the slowest mode at μ = −2 decays like 0.8965^j
            let long = solve_left_modes(&three_range(mu), 240).unwrap();
            for r in &long.residual_norms {
                assert!(*r < 1e-6, "mu={mu} residual {r}");
            }
        }
    }

    #[test]
    fn negative_winding_uses_b_majoranas() {
        let spec = ChainSpec::from_xy(&[[0.0, 1.0], [0.3, 0.0]], 0.1).unwrap();
        let left = solve_left_modes(&spec, 120).unwrap();
        assert_eq!(left.species, Species::B);
        assert_eq!(left.count(), 1);
        assert!(left.residual_norms[0] < 1e-10);
    }

    #[test]
    fn gapless_is_rejected() {
        assert!(matches!(solve_left_modes(&three_range(5.0), 20), Err(Error::GaplessSpec(_))));
    }
}
