//! Exact diagonalisation in the `2^L` Fock space, used as an oracle for the
//! free-fermion machinery at small `L`.
//!
//! Hamiltonians are sums of real-coefficient Pauli strings. The fermionic ring
//! is assembled from the Jordan–Wigner Majoranas of [`crate::pauli`], so the
//! antiperiodic boundary bonds are exact fermion bilinears and no spin-side
//! boundary term has to be derived.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::bdg::{majorana_matrix, Boundary};
use crate::chain::{ChainSpec, MomentumGrid};
use crate::error::{Error, Result};
use crate::pauli::{bond, dual_operator, majorana_a, majorana_b, Pauli, PauliString};
use crate::qfi::Variant;

/// Largest chain handled by the fermionic oracle.
pub const MAX_CHAIN_SITES: usize = 14;
/// Largest register for a general Pauli Hamiltonian.
pub const MAX_SITES: usize = 16;
/// Sectors up to this dimension are diagonalised densely.
pub const DENSE_LIMIT: usize = 512;
/// A gap above the ground state smaller than this (relative to the energy
/// scale) is reported as a degenerate ground state.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    All,
    /// Even number of down spins, i.e. even fermion parity.
    EvenParity,
}

impl Sector {
    fn contains(self, state: u64) -> bool {
        match self {
            Sector::All => true,
            Sector::EvenParity => state.count_ones() % 2 == 0,
        }
    }
}

/// `H = Σ_k c_k P_k` with real `c_k` and Hermitian Pauli strings `P_k`.
#[derive(Clone, Debug, Default)]
pub struct PauliHamiltonian {
    pub sites: usize,
    pub terms: Vec<(f64, PauliString)>,
}

impl PauliHamiltonian {
    pub fn new(sites: usize) -> Self {
        PauliHamiltonian { sites, terms: Vec::new() }
    }

    pub fn push(&mut self, coefficient: f64, string: PauliString) {
        if coefficient != 0.0 {
            self.terms.push((coefficient, string));
        }
    }

    /// Upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    fn check(&self) -> Result<()> {
        if self.sites == 0 || self.sites > MAX_SITES {
            return Err(Error::SizeLimitExceeded { length: self.sites, max: MAX_SITES });
        }
        if let Some((_, p)) = self.terms.iter().find(|(_, p)| !p.is_hermitian()) {
            return Err(Error::InvalidInput(format!("term {p} is not Hermitian")));
        }
        if let Some((_, p)) = self.terms.iter().find(|(_, p)| p.support().is_some_and(|(_, b)| b > self.sites)) {
            return Err(Error::SupportOverflow { first: 1, last: p.support().unwrap().1 as i64, length: self.sites });
        }
        Ok(())
    }
}

// Real symmetric matrix of H restricted to a sector, row-compressed.
struct Sparse {
    basis: Vec<u64>,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Sparse {
    fn build(h: &PauliHamiltonian, sector: Sector) -> Result<Self> {
        let full = 1usize << h.sites;
        let basis: Vec<u64> = (0..full as u64).filter(|&s| sector.contains(s)).collect();
        let mut index = vec![u32::MAX; full];
        for (i, &s) in basis.iter().enumerate() {
            index[s as usize] = i as u32;
        }
        let mut row_start = Vec::with_capacity(basis.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut row: Vec<(u32, f64)> = Vec::new();
        for &s in &basis {
            row_start.push(cols.len());
            row.clear();
            for (c, p) in &h.terms {
                let (t, amp) = p.apply(s);
                let k = index[t as usize];
                if k == u32::MAX {
                    return Err(Error::InvalidInput("Hamiltonian does not preserve the sector".into()));
                }
                if amp.im.abs() > 1e-14 {
                    return Err(Error::InvalidInput(format!("term {p} has complex matrix elements")));
                }
                row.push((k, c * amp.re));
            }
            row.sort_unstable_by_key(|e| e.0);
            for &(k, v) in &row {
                match cols.last() {
                    Some(&last) if last == k && cols.len() > row_start[row_start.len() - 1] => {
                        *vals.last_mut().unwrap() += v;
                    }
                    _ => {
                        cols.push(k);
                        vals.push(v);
                    }
                }
            }
        }
        row_start.push(cols.len());
        Ok(Sparse { basis, row_start, cols, vals })
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (self.row_start[i]..self.row_start[i + 1]).map(|k| self.vals[k] * x[self.cols[k] as usize]).sum();
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for k in self.row_start[i]..self.row_start[i + 1] {
                m[(i, self.cols[k] as usize)] += self.vals[k];
            }
        }
        m
    }
}

/// Ground state of a Pauli Hamiltonian, stored on the full register.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub sites: usize,
    pub energy: f64,
    /// Distance to the next level in the same sector.
    pub gap: f64,
    pub amplitudes: Vec<f64>,
}

impl GroundState {
    /// `P|ψ⟩` as a full complex vector.
    pub fn apply(&self, p: &PauliString) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (s, &a) in self.amplitudes.iter().enumerate() {
            if a != 0.0 {
                let (t, amp) = p.apply(s as u64);
                out[t as usize] += amp * a;
            }
        }
        out
    }

    pub fn expectation(&self, p: &PauliString) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, &a) in self.amplitudes.iter().enumerate() {
            if a != 0.0 {
                let (t, amp) = p.apply(s as u64);
                acc += amp * a * self.amplitudes[t as usize];
            }
        }
        acc
    }
}

/// Lowest eigenpair in a sector; fails on a degenerate ground state.
pub fn ground_state(h: &PauliHamiltonian, sector: Sector) -> Result<GroundState> {
    let gs = lowest_state(h, sector)?;
    if gs.gap < DEGENERACY_TOL * h.norm_bound().max(1.0) {
        return Err(Error::DegenerateGroundState(gs.gap));
    }
    Ok(gs)
}

/// Some lowest-energy state in a sector, degenerate or not.
pub fn lowest_state(h: &PauliHamiltonian, sector: Sector) -> Result<GroundState> {
    h.check()?;
    let sparse = Sparse::build(h, sector)?;
    let scale = h.norm_bound().max(1.0);
    let (energy, second, vec) = if sparse.dim() <= DENSE_LIMIT {
        let dense = sparse.dense();
        let eig = SymmetricEigen::new(dense.clone());
        let mut order: Vec<usize> = (0..sparse.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let v = polish_lowest(&dense, eig.eigenvalues[order[0]], eig.eigenvectors.column(order[0]).clone_owned(), scale);
        let e1 = order.get(1).map(|&k| eig.eigenvalues[k]).unwrap_or(f64::INFINITY);
        (eig.eigenvalues[order[0]], e1, v)
    } else {
        let (e0, v) = lanczos(&sparse, &[], scale)?;
        let (e1, _) = lanczos(&sparse, std::slice::from_ref(&v), scale)?;
        (e0, e1, v)
    };
    let gap = second - energy;
    let mut amplitudes = vec![0.0; 1usize << h.sites];
    for (i, &s) in sparse.basis.iter().enumerate() {
        amplitudes[s as usize] = vec[i];
    }
    // fix the sign: largest amplitude positive
    let big = amplitudes.iter().copied().fold(0.0f64, |m, a| if a.abs() > m.abs() { a } else { m });
    let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt() * big.signum();
    amplitudes.iter_mut().for_each(|a| *a /= norm);
    Ok(GroundState { sites: h.sites, energy, gap, amplitudes })
}

// nalgebra's symmetric QR leaves eigenvector residuals well above rounding
// (1e-7 has been seen on 32×32 sectors with a dominant diagonal), and in the
// Lanczos tridiagonal it rounds away components far below the off-diagonal
// scale, which stalls the restarts. Two inverse-iteration steps with a shift
// just below the lowest eigenvalue fix both; `m − σ` is then positive definite.
fn polish_lowest(m: &DMatrix<f64>, value: f64, start: DVector<f64>, scale: f64) -> Vec<f64> {
    let sigma = value - 1e-9 * scale;
    let shifted = m - DMatrix::identity(m.nrows(), m.ncols()) * sigma;
    let mut y = start;
    if let Some(chol) = shifted.cholesky() {
        for _ in 0..2 {
            y = chol.solve(&y);
            y /= y.norm();
        }
    }
    y.iter().copied().collect()
}

// Lanczos with full reorthogonalisation against the Krylov basis and the
// `deflate` vectors, restarted from the current Ritz vector.
fn lanczos(h: &Sparse, deflate: &[Vec<f64>], scale: f64) -> Result<(f64, Vec<f64>)> {
    let n = h.dim();
    let max_steps = n.min(300);
    let project = |v: &mut Vec<f64>, basis: &[Vec<f64>]| {
        for _ in 0..2 {
            for b in basis.iter().chain(deflate) {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
    };
    let normalise = |v: &mut Vec<f64>| {
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= nrm);
        nrm
    };
    // deterministic, generic start vector
    let mut start: Vec<f64> = (0..n).map(|i| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_75).fract()).collect();
    let mut best = (f64::INFINITY, start.clone(), f64::INFINITY);
    for _restart in 0..8 {
        project(&mut start, &[]);
        normalise(&mut start);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![0.0; n];
        let mut ritz = (f64::INFINITY, Vec::new());
        for step in 0..max_steps {
            h.apply(&basis[step], &mut w);
            let a: f64 = w.iter().zip(&basis[step]).map(|(x, y)| x * y).sum();
            alpha.push(a);
            let mut r = w.clone();
            project(&mut r, &basis);
            let b = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            let k = alpha.len();
            let t = DMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j || j + 1 == i {
                    beta[i.min(j)]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t.clone());
            let lo = (0..k).min_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y])).unwrap();
            let estimate = b * eig.eigenvectors[(k - 1, lo)].abs();
            if estimate < 1e-13 * scale || b < 1e-14 * scale || step + 1 == max_steps {
                let y = polish_lowest(&t, eig.eigenvalues[lo], eig.eigenvectors.column(lo).clone_owned(), scale);
                ritz = (eig.eigenvalues[lo], y);
                break;
            }
            r.iter_mut().for_each(|x| *x /= b);
            beta.push(b);
            basis.push(r);
        }
        let mut x = vec![0.0; n];
        for (coef, v) in ritz.1.iter().zip(&basis) {
            x.iter_mut().zip(v).for_each(|(a, b)| *a += coef * b);
        }
        project(&mut x, &[]);
        normalise(&mut x);
        h.apply(&x, &mut w);
        let e: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
        let res = w.iter().zip(&x).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
        if res < best.2 {
            best = (e, x.clone(), res);
        }
        if res < 1e-10 * scale {
            return Ok((e, x));
        }
        start = x;
    }
    Err(Error::LanczosNoConvergence(best.2))
}

/// `H = (i/2) Σ_{jk} M_{jk} a_j b_k` for the antiperiodic ring, written in
/// Jordan–Wigner Pauli strings.
pub fn fermion_hamiltonian(spec: &ChainSpec, l: usize) -> Result<PauliHamiltonian> {
    MomentumGrid::new(l)?;
    if l > MAX_CHAIN_SITES {
        return Err(Error::SizeLimitExceeded { length: l, max: MAX_CHAIN_SITES });
    }
    fermion_hamiltonian_with(spec, l, Boundary::Antiperiodic)
}

/// The extended Ising chain on `l` open sites,
/// `Σ_n Σ_j (Jˣ_n/2 σˣ_j σˣ_{j+n} + Jʸ_n/2 σʸ_j σʸ_{j+n}) Π_{j<k<j+n} σᶻ_k + Σ_j μ/2 σᶻ_j`.
pub fn spin_chain_hamiltonian(spec: &ChainSpec, l: usize) -> Result<PauliHamiltonian> {
    spec.validate()?;
    if l > MAX_SITES {
        return Err(Error::SizeLimitExceeded { length: l, max: MAX_SITES });
    }
    let mut h = PauliHamiltonian::new(l);
    for j in 1..=l {
        h.push(0.5 * spec.mu, PauliString::single(j, Pauli::Z));
        for n in 1..=spec.nf {
            if j + n > l {
                continue;
            }
            for (alpha, c) in [(Pauli::X, spec.jx(n)), (Pauli::Y, spec.jy(n))] {
                let mut ops = vec![(j, alpha)];
                ops.extend((j + 1..j + n).map(|k| (k, Pauli::Z)));
                ops.push((j + n, alpha));
                h.push(0.5 * c, PauliString::from_ops(0, &ops));
            }
        }
    }
    Ok(h)
}

/// [`fermion_hamiltonian`] with a chosen boundary.
pub fn fermion_hamiltonian_with(spec: &ChainSpec, l: usize, boundary: Boundary) -> Result<PauliHamiltonian> {
    if l > MAX_SITES {
        return Err(Error::SizeLimitExceeded { length: l, max: MAX_SITES });
    }
    let m = majorana_matrix(spec, l, boundary)?;
    let mut h = PauliHamiltonian::new(l);
    for j in 0..l {
        for k in 0..l {
            let c = m[(j, k)];
            if c != 0.0 {
                // i a_j b_k is Hermitian for every j, k
                h.push(0.5 * c, (majorana_a(j + 1) * majorana_b(k + 1)).scaled(1));
            }
        }
    }
    Ok(h)
}

/// Sum of like terms, for comparing Hamiltonians symbolically.
pub fn collect_terms(h: &PauliHamiltonian) -> std::collections::BTreeMap<Vec<(usize, Pauli)>, f64> {
    let mut out = std::collections::BTreeMap::new();
    for (c, p) in &h.terms {
        let key: Vec<(usize, Pauli)> = p.ops.iter().map(|(&s, &q)| (s, q)).collect();
        let sign = p.coefficient().re;
        *out.entry(key).or_insert(0.0) += c * sign;
    }
    out.retain(|_, v: &mut f64| v.abs() > 1e-14);
    out
}

/// Even-parity ground state of the antiperiodic ring.
pub fn ed_ground_state(spec: &ChainSpec, l: usize) -> Result<GroundState> {
    ground_state(&fermion_hamiltonian(spec, l)?, Sector::EvenParity)
}

/// `⟨B_i A_{i+r}⟩`, sites 1-based.
pub fn ed_correlator(gs: &GroundState, i: usize, r: i64) -> Result<f64> {
    let target = i as i64 + r;
    if i == 0 || target < 1 || target > gs.sites as i64 {
        return Err(Error::SupportOverflow { first: i as i64, last: target, length: gs.sites });
    }
    Ok(gs.expectation(&bond(i, r)).re)
}

/// `⟨τ_i τ_{i+r}⟩` for the dual operators of index `ν`.
pub fn ed_string_correlator(gs: &GroundState, nu: i64, i: usize, r: usize) -> Result<f64> {
    let p = dual_operator(nu, i, gs.sites)? * dual_operator(nu, i + r, gs.sites)?;
    Ok(gs.expectation(&p).re)
}

/// `4 Var(O)/L` with `O = ½ Σ_j w_j τ_j` over the `L − |ν| + 1` dual sites.
pub fn ed_qfi_from_state(gs: &GroundState, nu: i64, variant: Variant) -> Result<f64> {
    let l = gs.sites;
    let count = (l + 1).checked_sub(nu.unsigned_abs() as usize).filter(|&c| c > 0);
    let Some(count) = count else {
        return Err(Error::LengthTooSmall { length: l, range: nu.unsigned_abs() as usize });
    };
    let mut o_psi = vec![Complex64::new(0.0, 0.0); gs.amplitudes.len()];
    for j in 1..=count {
        let w = 0.5 * variant.weight(j);
        for (acc, v) in o_psi.iter_mut().zip(gs.apply(&dual_operator(nu, j, l)?)) {
            *acc += w * v;
        }
    }
    let second: f64 = o_psi.iter().map(|z| z.norm_sqr()).sum();
    let first: f64 = o_psi.iter().zip(&gs.amplitudes).map(|(z, a)| z.re * a).sum();
    Ok(4.0 * (second - first * first) / l as f64)
}

pub fn ed_qfi(spec: &ChainSpec, l: usize, nu: i64, variant: Variant) -> Result<f64> {
    ed_qfi_from_state(&ed_ground_state(spec, l)?, nu, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::energy_spectrum;
    use crate::correlators::correlator_table;

    #[test]
    fn ground_energy_matches_momentum_sum() {
        let spec = ChainSpec::new(vec![[1.0, 1.0]], 0.5).unwrap();
        let gs = ed_ground_state(&spec, 8).unwrap();
        let e: f64 = -energy_spectrum(&spec, &MomentumGrid::new(8).unwrap()).iter().map(|p| p.1).sum::<f64>();
        assert!((gs.energy - e).abs() < 1e-10, "{} vs {e}", gs.energy);
    }

    #[test]
    fn ground_state_has_even_parity() {
        let spec = ChainSpec::new(vec![[1.0, 0.4], [0.3, -0.2]], -0.7).unwrap();
        let gs = ed_ground_state(&spec, 8).unwrap();
        let parity = PauliString::from_ops(0, &(1..=8).map(|j| (j, Pauli::Z)).collect::<Vec<_>>());
        assert!((gs.expectation(&parity).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        // L = 12 goes through Lanczos, L = 10 through the dense solver
        let spec = ChainSpec::new(vec![[1.0, 1.0], [2.0, 2.0], [2.0, 2.0]], 1.0).unwrap();
        for l in [10, 12] {
            let gs = ed_ground_state(&spec, l).unwrap();
            let t = correlator_table(&spec, l).unwrap();
            for r in -3..=4 {
                let i = 4;
                let ed = ed_correlator(&gs, i, r).unwrap();
                assert!((ed - t.ba(r)).abs() < 1e-10, "L={l} r={r}: {ed} vs {}", t.ba(r));
            }
        }
    }

    #[test]
    fn kitaev_point_qfi_is_l() {
        let spec = ChainSpec::new(vec![[-1.0, -1.0]], 0.0).unwrap();
        let f = ed_qfi(&spec, 8, 1, Variant::Plain).unwrap();
        assert!((f - 8.0).abs() < 1e-10, "{f}");
    }

    #[test]
    fn spin_form_equals_fermion_form_on_open_chains() {
        let spec = ChainSpec::new(vec![[0.7, -0.3], [1.2, 0.4], [-0.5, 0.9]], 0.6).unwrap();
        let spin = collect_terms(&spin_chain_hamiltonian(&spec, 7).unwrap());
        let fermion = collect_terms(&fermion_hamiltonian_with(&spec, 7, Boundary::Open).unwrap());
        assert_eq!(spin.len(), fermion.len());
        for (k, v) in &spin {
            assert!((fermion[k] - v).abs() < 1e-14, "{k:?}");
        }
    }

    #[test]
    fn oversized_chain_is_rejected() {
        let spec = ChainSpec::new(vec![[1.0, 1.0]], 0.5).unwrap();
        assert!(matches!(ed_ground_state(&spec, 16), Err(Error::SizeLimitExceeded { .. })));
    }
}
