//! Kitaev honeycomb model: phase classification from the Bloch matrix, and the
//! two-leg ladder through its dual anisotropic XY chain.
//!
//! The ladder `H = −Σ_j (J_x σˣ_{2j−1}σˣ_{2j} + J_y σʸ_{2j}σʸ_{2j+3} + J_z σᶻ_{2j}σᶻ_{2j+1})`
//! becomes, in the π-flux sector `W_j = −1`,
//!
//! ```text
//! H = −Σ_j (J_x šˣ_j šˣ_{j+1} − J_y šʸ_j šʸ_{j+1} + J_z šᶻ_j)
//! ```
//!
//! on the dual sites, which is the `N_f = 1` chain `J₁ˣ = −2J_x`, `J₁ʸ = 2J_y`,
//! `μ = −2J_z`.
//!
//! With that (ferromagnetic) sign `C_x(r) → +const` in `A_x`, so the plain
//! generator is the detector. The staggered string order `(−)^r C_x(r)` belongs
//! to the antiferromagnetic ladder `H → −H`, whose dual chain is the
//! particle-hole partner `J₁ˣ = 2J_x`, `J₁ʸ = −2J_y`, `μ = 2J_z`. That is the
//! default here; [`LadderSign`] selects either.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::ed::PauliHamiltonian;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::qfi::{scaling_fit, ScalingFit, Variant};

/// Tolerance for a triangle inequality to count as an equality.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoneycombSpec {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    #[serde(default)]
    pub normalized: bool,
}

impl HoneycombSpec {
    pub fn new(jx: f64, jy: f64, jz: f64) -> Result<Self> {
        let spec = HoneycombSpec { jx, jy, jz, normalized: false };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let j = [self.jx, self.jy, self.jz];
        if j.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteCoupling);
        }
        if j.iter().any(|&x| x <= 0.0) {
            return Err(Error::NonPositiveCoupling);
        }
        if self.normalized && (self.sum() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("normalized couplings sum to {}", self.sum())));
        }
        Ok(())
    }

    pub fn sum(&self) -> f64 {
        self.jx + self.jy + self.jz
    }

    /// Projection onto `J_x + J_y + J_z = 1`.
    pub fn normalized(&self) -> Self {
        let s = self.sum();
        HoneycombSpec { jx: self.jx / s, jy: self.jy / s, jz: self.jz / s, normalized: true }
    }

    /// `J_x → J_y → J_z → J_x`: the x-sector quantities of the result are the
    /// y-sector quantities of `self`.
    pub fn cycled(&self) -> Self {
        HoneycombSpec { jx: self.jy, jy: self.jz, jz: self.jx, normalized: self.normalized }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HoneycombPhase {
    Ax,
    Ay,
    Az,
    B,
    Boundary,
}

impl HoneycombPhase {
    pub fn label(self) -> &'static str {
        match self {
            HoneycombPhase::Ax => "Ax",
            HoneycombPhase::Ay => "Ay",
            HoneycombPhase::Az => "Az",
            HoneycombPhase::B => "B",
            HoneycombPhase::Boundary => "Boundary",
        }
    }
}

/// Triangle-inequality classification of the `(J_x, J_y, J_z)` point.
pub fn classify_phase(spec: &HoneycombSpec) -> HoneycombPhase {
    let excess = [
        (HoneycombPhase::Ax, spec.jx - spec.jy - spec.jz),
        (HoneycombPhase::Ay, spec.jy - spec.jz - spec.jx),
        (HoneycombPhase::Az, spec.jz - spec.jx - spec.jy),
    ];
    if excess.iter().any(|(_, d)| d.abs() <= BOUNDARY_TOL) {
        return HoneycombPhase::Boundary;
    }
    excess.iter().find(|(_, d)| *d > 0.0).map(|(p, _)| *p).unwrap_or(HoneycombPhase::B)
}

/// `Υ_q = ε_q + iΔ_q`
pub fn upsilon(spec: &HoneycombSpec, q1: f64, q2: f64) -> (f64, f64) {
    (spec.jx * q1.cos() + spec.jy * q2.cos() + spec.jz, spec.jx * q1.sin() + spec.jy * q2.sin())
}

/// `2 min_q |Υ_q|` over the `grid_n × grid_n` momenta `q = 2πl/grid_n`.
pub fn honeycomb_gap(spec: &HoneycombSpec, grid_n: usize) -> Result<f64> {
    spec.validate()?;
    if grid_n < 64 {
        return Err(Error::InvalidInput(format!("grid_n must be at least 64, got {grid_n}")));
    }
    let qs: Vec<f64> = (0..grid_n).map(|l| 2.0 * PI * l as f64 / grid_n as f64).collect();
    let mut best = f64::INFINITY;
    for &q1 in &qs {
        for &q2 in &qs {
            let (e, d) = upsilon(spec, q1, q2);
            best = best.min(e.hypot(d));
        }
    }
    Ok(2.0 * best)
}

/// Overall sign of the ladder couplings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderSign {
    /// `H = −Σ J σσ`
    Ferromagnetic,
    /// `H = +Σ J σσ`
    #[default]
    Antiferromagnetic,
}

impl LadderSign {
    /// Prefactor of `Σ J σσ` in `H`.
    pub fn factor(self) -> f64 {
        match self {
            LadderSign::Ferromagnetic => -1.0,
            LadderSign::Antiferromagnetic => 1.0,
        }
    }
}

/// The dual chain of the two-leg ladder in the `W_j = −1` sector, default sign.
pub fn ladder_dual_chain(spec: &HoneycombSpec) -> Result<ChainSpec> {
    ladder_dual_chain_with(spec, LadderSign::default())
}

pub fn ladder_dual_chain_with(spec: &HoneycombSpec, sign: LadderSign) -> Result<ChainSpec> {
    spec.validate()?;
    let s = sign.factor();
    ChainSpec::from_xy(&[[2.0 * s * spec.jx, -2.0 * s * spec.jy]], 2.0 * s * spec.jz)
}

/// The dual XY ring `s Σ (J_x šˣšˣ + J_y W šʸšʸ + J_z šᶻ)` on `l` sites with
/// `W = −1`, written directly in Pauli strings.
pub fn dual_spin_ring(spec: &HoneycombSpec, l: usize, sign: LadderSign) -> Result<PauliHamiltonian> {
    spec.validate()?;
    let s = sign.factor();
    let w = -1.0;
    let mut h = PauliHamiltonian::new(l);
    for j in 1..=l {
        let k = j % l + 1;
        h.push(s * spec.jx, PauliString::from_ops(0, &[(j, Pauli::X), (k, Pauli::X)]));
        h.push(s * spec.jy * w, PauliString::from_ops(0, &[(j, Pauli::Y), (k, Pauli::Y)]));
        h.push(s * spec.jz, PauliString::single(j, Pauli::Z));
    }
    Ok(h)
}

/// The open two-leg ladder with `cells` rungs (`2·cells` spins).
pub fn ladder_hamiltonian(spec: &HoneycombSpec, cells: usize, sign: LadderSign) -> Result<PauliHamiltonian> {
    spec.validate()?;
    let s = sign.factor();
    let n = 2 * cells;
    let mut h = PauliHamiltonian::new(n);
    for j in 1..=cells {
        h.push(s * spec.jx, PauliString::from_ops(0, &[(2 * j - 1, Pauli::X), (2 * j, Pauli::X)]));
        if 2 * j + 3 <= n {
            h.push(s * spec.jy, PauliString::from_ops(0, &[(2 * j, Pauli::Y), (2 * j + 3, Pauli::Y)]));
        }
        if 2 * j + 1 <= n {
            h.push(s * spec.jz, PauliString::from_ops(0, &[(2 * j, Pauli::Z), (2 * j + 1, Pauli::Z)]));
        }
    }
    Ok(h)
}

/// Plaquette `W_j = šˣ_{2j−1} šᶻ_{2j+1} šˣ_{2j+3}` in the original spins,
/// with `šˣ_k = Π_{m≤k} σˣ_m` and `šᶻ_k = σᶻ_k σᶻ_{k+1}`.
pub fn plaquette(j: usize, cells: usize) -> Result<PauliString> {
    let last = 2 * j + 3;
    if j == 0 || last > 2 * cells {
        return Err(Error::SupportOverflow { first: 2 * j as i64, last: last as i64, length: 2 * cells });
    }
    let sx = |k: usize| PauliString::from_ops(0, &(1..=k).map(|m| (m, Pauli::X)).collect::<Vec<_>>());
    let sz = |k: usize| PauliString::from_ops(0, &[(k, Pauli::Z), (k + 1, Pauli::Z)]);
    Ok(sx(2 * j - 1) * sz(2 * j + 1) * sx(2 * j + 3))
}

/// Staggered `ν = 1` fit of the dual chain, i.e. `λ_x^(st)`.
pub fn lambda_x(spec: &HoneycombSpec, l_grid: &[usize]) -> Result<ScalingFit> {
    scaling_fit(&ladder_dual_chain(spec)?, 1, Variant::Staggered, l_grid)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexRow {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    /// `λ^(st)` for the x, y and z sectors; `None` where the fit failed.
    pub lambdas: [Option<f64>; 3],
    pub phase: HoneycombPhase,
    pub errors: Vec<String>,
}

impl SimplexRow {
    /// Sector with the largest exponent above `threshold`, or B.
    pub fn argmax_phase(&self, threshold: f64) -> HoneycombPhase {
        let best = self
            .lambdas
            .iter()
            .enumerate()
            .filter_map(|(k, l)| l.map(|v| (k, v)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((k, v)) if v > threshold => [HoneycombPhase::Ax, HoneycombPhase::Ay, HoneycombPhase::Az][k],
            _ => HoneycombPhase::B,
        }
    }
}

/// Interior barycentric points `(a, b, c)/resolution`, `a + b + c = resolution`, all positive.
pub fn simplex_points(resolution: usize) -> Vec<HoneycombSpec> {
    let mut out = Vec::new();
    for a in 1..resolution {
        for b in 1..resolution - a {
            let c = resolution - a - b;
            let n = resolution as f64;
            out.push(HoneycombSpec { jx: a as f64 / n, jy: b as f64 / n, jz: c as f64 / n, normalized: true });
        }
    }
    out
}

/// `λ^(st)` of all three sectors over the simplex; the y and z sectors come
/// from the cyclic substitutions of the x sector.
pub fn simplex_scan(resolution: usize, l_grid: &[usize]) -> Result<Vec<SimplexRow>> {
    if resolution < 10 {
        return Err(Error::InvalidInput(format!("resolution must be at least 10, got {resolution}")));
    }
    Ok(simplex_points(resolution).par_iter().map(|p| scan_point(p, l_grid)).collect())
}

pub fn scan_point(p: &HoneycombSpec, l_grid: &[usize]) -> SimplexRow {
    let sectors = [*p, p.cycled(), p.cycled().cycled()];
    let mut lambdas = [None; 3];
    let mut errors = Vec::new();
    for (k, s) in sectors.iter().enumerate() {
        match lambda_x(s, l_grid) {
            Ok(fit) => lambdas[k] = Some(fit.lambda),
            Err(e) => errors.push(format!("sector {k}: {e}")),
        }
    }
    SimplexRow { jx: p.jx, jy: p.jy, jz: p.jz, lambdas, phase: classify_phase(p), errors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::correlator_table;
    use crate::ed::{ground_state, lowest_state, Sector};

    #[test]
    fn phases_of_the_caption_points() {
        assert_eq!(classify_phase(&HoneycombSpec::new(0.6, 0.2, 0.2).unwrap()), HoneycombPhase::Ax);
        assert_eq!(classify_phase(&HoneycombSpec::new(0.4, 0.3, 0.3).unwrap()), HoneycombPhase::B);
        assert_eq!(classify_phase(&HoneycombSpec::new(0.5, 0.25, 0.25).unwrap()), HoneycombPhase::Boundary);
        assert_eq!(classify_phase(&HoneycombSpec::new(0.2, 0.2, 0.6).unwrap()), HoneycombPhase::Az);
    }

    #[test]
    fn gap_closes_in_b() {
        let gapped = honeycomb_gap(&HoneycombSpec::new(0.6, 0.2, 0.2).unwrap(), 64).unwrap();
        assert!(gapped > 0.1);
        let centre = HoneycombSpec::new(1.0, 1.0, 1.0).unwrap().normalized();
        assert!(honeycomb_gap(&centre, 300).unwrap() < 1e-12);
        assert!(HoneycombSpec::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn dual_ring_matches_the_chain_determinants() {
        // pins the sign map of ladder_dual_chain independently of ChainSpec
        let cases = [(0.6, 0.2, 0.2), (0.4, 0.3, 0.3), (0.2, 0.5, 0.3)];
        for ((jx, jy, jz), sign) in cases.into_iter().flat_map(|c| [(c, LadderSign::Ferromagnetic), (c, LadderSign::Antiferromagnetic)]) {
            let spec = HoneycombSpec::new(jx, jy, jz).unwrap();
            let l = 10;
            let gs = ground_state(&dual_spin_ring(&spec, l, sign).unwrap(), Sector::EvenParity).unwrap();
            let t = correlator_table(&ladder_dual_chain_with(&spec, sign).unwrap(), l).unwrap();
            let series = crate::toeplitz::scf_series(&t, 1, l - 1).unwrap();
            for r in 1..l {
                let ed = gs.expectation(&PauliString::from_ops(0, &[(1, Pauli::X), (1 + r, Pauli::X)])).re;
                assert!((ed - series.entries[r - 1].c).abs() < 1e-10, "{jx},{jy},{jz} r={r}");
            }
        }
    }

    #[test]
    fn ladder_ground_state_is_pi_flux() {
        let cells = 5;
        for (spec, sign) in [
            (HoneycombSpec::new(0.6, 0.2, 0.2).unwrap(), LadderSign::Ferromagnetic),
            (HoneycombSpec::new(0.6, 0.2, 0.2).unwrap(), LadderSign::Antiferromagnetic),
            (HoneycombSpec::new(0.3, 0.3, 0.4).unwrap(), LadderSign::Antiferromagnetic),
        ] {
            let h = ladder_hamiltonian(&spec, cells, sign).unwrap();
            let gs = lowest_state(&h, Sector::All).unwrap();
            for j in 1..=(cells - 2) {
                let w = plaquette(j, cells).unwrap();
                assert!(h.terms.iter().all(|(_, p)| p.commutes_with(&w)));
                assert!((gs.expectation(&w).re + 1.0).abs() < 1e-8, "{sign:?} W_{j}");
            }
        }
    }

    #[test]
    fn cyclic_substitution_permutes_the_scan() {
        let grid = [40, 60, 80];
        let p = HoneycombSpec::new(0.2, 0.7, 0.1).unwrap();
        let a = scan_point(&p, &grid);
        let b = scan_point(&p.cycled(), &grid);
        assert_eq!(a.lambdas[1], b.lambdas[0]);
        assert_eq!(a.lambdas[2], b.lambdas[1]);
        assert_eq!(a.lambdas[0], b.lambdas[2]);
    }
}
