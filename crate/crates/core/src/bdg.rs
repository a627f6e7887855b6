//! Real-space single-particle matrices of the chain.
//!
//! With Majoranas `a_j = c†_j + c_j`, `b_j = i(c†_j − c_j)` the Hamiltonian is
//! `H = (i/2) Σ_{jk} M_{jk} a_j b_k` where
//! `M_{j+n,j} = J^x_n`, `M_{j,j+n} = J^y_n` and `M_{jj} = −μ`.

use nalgebra::DMatrix;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    /// `c_{j+L} = −c_j`, the even-parity sector of the periodic spin chain.
    Antiperiodic,
}

fn check(spec: &ChainSpec, l: usize) -> Result<()> {
    spec.validate()?;
    if l <= spec.nf {
        return Err(Error::LengthTooSmall { length: l, range: spec.nf });
    }
    Ok(())
}

// Visits every bond (j, k = j + n) with the sign picked up across the boundary.
fn bonds(spec: &ChainSpec, l: usize, boundary: Boundary, mut f: impl FnMut(usize, usize, usize, f64)) {
    for n in 1..=spec.nf {
        for j in 0..l {
            let k = j + n;
            if k < l {
                f(n, j, k, 1.0);
            } else if boundary == Boundary::Antiperiodic {
                f(n, j, k - l, -1.0);
            }
        }
    }
}

/// The `L × L` matrix `M` in `H = (i/2) aᵀ M b`.
pub fn majorana_matrix(spec: &ChainSpec, l: usize, boundary: Boundary) -> Result<DMatrix<f64>> {
    check(spec, l)?;
    let mut m = DMatrix::zeros(l, l);
    for j in 0..l {
        m[(j, j)] = -spec.mu;
    }
    bonds(spec, l, boundary, |n, j, k, s| {
        m[(k, j)] += s * spec.jx(n);
        m[(j, k)] += s * spec.jy(n);
    });
    Ok(m)
}

/// The `2L × 2L` Bogoliubov–de Gennes matrix in the basis `(c_1..c_L, c†_1..c†_L)`,
/// built from the fermionic hopping and pairing amplitudes:
/// `H = ½ Ψ† [[h, Δ], [−Δ, −h]] Ψ`.
pub fn bdg_matrix(spec: &ChainSpec, l: usize, boundary: Boundary) -> Result<DMatrix<f64>> {
    check(spec, l)?;
    let mut h = DMatrix::zeros(2 * l, 2 * l);
    for j in 0..l {
        h[(j, j)] = -spec.mu;
        h[(l + j, l + j)] = spec.mu;
    }
    bonds(spec, l, boundary, |n, j, k, s| {
        let t = 0.5 * s * spec.j_plus(n);
        let d = 0.5 * s * spec.j_minus(n);
        h[(j, k)] += t;
        h[(k, j)] += t;
        h[(l + j, l + k)] -= t;
        h[(l + k, l + j)] -= t;
        // Δ_{jk} = d, Δ_{kj} = −d
        h[(j, l + k)] += d;
        h[(k, l + j)] -= d;
        h[(l + j, k)] -= d;
        h[(l + k, j)] += d;
    });
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kitaev_chain_majorana_matrix() {
        let spec = ChainSpec::new(vec![[1.0, 1.0]], 0.5).unwrap();
        let m = majorana_matrix(&spec, 4, Boundary::Antiperiodic).unwrap();
        assert_eq!(m[(1, 0)], 1.0);
        assert_eq!(m[(0, 1)], 0.0);
        assert_eq!(m[(0, 3)], -1.0);
        assert_eq!(m[(2, 2)], -0.5);
        let o = majorana_matrix(&spec, 4, Boundary::Open).unwrap();
        assert_eq!(o[(0, 3)], 0.0);
    }

    #[test]
    fn bdg_is_symmetric_with_paired_spectrum() {
        let spec = ChainSpec::new(vec![[0.3, -0.7], [1.1, 0.4]], 0.2).unwrap();
        for b in [Boundary::Open, Boundary::Antiperiodic] {
            let h = bdg_matrix(&spec, 7, b).unwrap();
            assert_eq!(h.clone(), h.transpose());
            let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
            e.sort_by(f64::total_cmp);
            for i in 0..e.len() {
                assert!((e[i] + e[e.len() - 1 - i]).abs() < 1e-12);
            }
        }
    }

    // The BdG quasiparticle energies are the singular values of M.
    #[test]
    fn bdg_and_majorana_forms_agree() {
        let spec = ChainSpec::new(vec![[0.3, -0.7], [1.1, 0.4]], 0.2).unwrap();
        for b in [Boundary::Open, Boundary::Antiperiodic] {
            let h = bdg_matrix(&spec, 8, b).unwrap();
            let m = majorana_matrix(&spec, 8, b).unwrap();
            let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().filter(|&&x| x > 0.0).copied().collect();
            let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
            e.sort_by(f64::total_cmp);
            s.sort_by(f64::total_cmp);
            for (x, y) in e.iter().zip(&s) {
                assert!((x - y).abs() < 1e-12, "{x} {y}");
            }
        }
    }
}
