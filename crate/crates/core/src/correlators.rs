//! Two-point Majorana correlators `G_{−r} = ⟨B_i A_{i+r}⟩` of the closed chain,
//! with `A_j = c†_j + c_j` and `B_j = c†_j − c_j`.
//!
//! In the ground state of the antiperiodic chain
//!
//! ```text
//! G_{−r} = −(1/L) Σ_q cos(q r − Θ_q),   Θ_q = atan2(y(q), z(q)).
//! ```
//!
//! The overall sign is the one the real-space oracles produce; at
//! `J⁺₁ = J⁻₁ = 1, μ = 0` it gives `G_{−1} = −1`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::bdg::{majorana_matrix, Boundary};
use crate::chain::{yz, ChainSpec, MomentumGrid};
use crate::error::{Error, Result};

/// Sign in front of the momentum sum.
pub const CONVENTION_SIGN: f64 = -1.0;

/// `G_m` for `m ∈ (−L, L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorTable {
    l: usize,
    values: Vec<f64>,
    ring: bool,
}

impl CorrelatorTable {
    pub fn length(&self) -> usize {
        self.l
    }

    /// `G_m`; panics if `|m| ≥ L`.
    pub fn get(&self, m: i64) -> f64 {
        let idx = m + self.l as i64 - 1;
        assert!(idx >= 0 && (idx as usize) < self.values.len(), "G_{m} outside table of length {}", self.l);
        self.values[idx as usize]
    }

    /// `⟨B_i A_{i+r}⟩`
    pub fn ba(&self, r: i64) -> f64 {
        self.get(-r)
    }

    pub fn from_fn(l: usize, f: impl Fn(i64) -> f64) -> Self {
        let values = (-(l as i64) + 1..l as i64).map(f).collect();
        CorrelatorTable { l, values, ring: false }
    }

    /// Whether `V_{ij} = G_{i−j}` on the closed ring (`G_{m−L} = −G_m`) was
    /// verified to be orthogonal, as it is for a nondegenerate ground state.
    pub fn is_ring_orthogonal(&self) -> bool {
        self.ring
    }

    /// `max_s |Σ_j G_j G_{j+s} − δ_{s0}|` over one period of the ring.
    pub fn ring_defect(&self) -> f64 {
        let l = self.l as i64;
        let ext = |m: i64| if m >= l { -self.get(m - l) } else { self.get(m) };
        (0..l)
            .map(|s| {
                let mut acc = Kahan::default();
                for j in 0..l {
                    acc.add(self.get(j) * ext(j + s));
                }
                (acc.value() - if s == 0 { 1.0 } else { 0.0 }).abs()
            })
            .fold(0.0, f64::max)
    }

    fn verified(mut self) -> Self {
        self.ring = self.ring_defect() < RING_TOLERANCE;
        self
    }
}

/// Orthogonality defect accepted by [`CorrelatorTable::is_ring_orthogonal`].
pub const RING_TOLERANCE: f64 = 1e-10;

/// Grid momenta with `|r(q)|` below this fraction of the largest coupling
/// are treated as exact zero modes.
pub const ZERO_MODE_THRESHOLD: f64 = 1e-12;

/// Compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Momentum-space evaluation of the whole table in `O(L²)`.
///
/// `q m = π o m / L` with `o` odd, so `cos(q m)` and `sin(q m)` are read
/// from a table of `2L` angles; momenta `±q` are folded together.
pub fn correlator_table(spec: &ChainSpec, l: usize) -> Result<CorrelatorTable> {
    spec.validate()?;
    MomentumGrid::new(l)?;
    let two_l = 2 * l as i64;
    let cos_tab: Vec<f64> = (0..two_l).map(|t| (PI * t as f64 / l as f64).cos()).collect();
    let sin_tab: Vec<f64> = (0..two_l).map(|t| (PI * t as f64 / l as f64).sin()).collect();

    // positive momenta only: o = 1, 3, ..., L−1
    let floor = ZERO_MODE_THRESHOLD * spec.scale();
    let mut half = Vec::with_capacity(l / 2);
    for k in 0..l / 2 {
        let o = 2 * k as i64 + 1;
        let (y, z) = yz(spec, PI * o as f64 / l as f64);
        let r = y.hypot(z);
        // an exact zero mode on the grid leaves the ground state degenerate
        if !(r > floor) {
            return Err(Error::GaplessSpec(r));
        }
        half.push((o, z / r, y / r));
    }

    // G_m = −(1/L) Σ_q cos(q m + Θ) = −(2/L) Σ_{q>0} [cos(qm) cosΘ − sin(qm) sinΘ]
    let scale = CONVENTION_SIGN * 2.0 / l as f64;
    Ok(CorrelatorTable::from_fn(l, |m| {
        let mut acc = Kahan::default();
        for &(o, c, s) in &half {
            let t = (o * m).rem_euclid(two_l) as usize;
            acc.add(cos_tab[t] * c - sin_tab[t] * s);
        }
        scale * acc.value()
    })
    .verified())
}

/// Real-space oracle: ground-state covariance of the antiperiodic chain from
/// the polar factor of its Majorana matrix, `⟨i a_j b_k⟩ = −(U Vᵀ)_{jk}`.
pub fn bdg_correlator_oracle(spec: &ChainSpec, l: usize) -> Result<CorrelatorTable> {
    MomentumGrid::new(l)?;
    if l > 512 {
        return Err(Error::InvalidInput(format!("oracle limited to L ≤ 512, got {l}")));
    }
    let m = majorana_matrix(spec, l, Boundary::Antiperiodic)?;
    let svd = m.svd(true, true);
    if svd.singular_values.min() < 1e-12 * svd.singular_values.max() {
        return Err(Error::GaplessSpec(svd.singular_values.min()));
    }
    let w: DMatrix<f64> = svd.u.unwrap() * svd.v_t.unwrap();
    // ⟨B_i A_k⟩ = ⟨i a_k b_i⟩ = −W_{k i}
    Ok(CorrelatorTable::from_fn(l, |m| {
        if m <= 0 {
            let r = (-m) as usize;
            -w[(r, 0)]
        } else {
            let i = l - 1;
            -w[(i - m as usize, i)]
        }
    })
    .verified())
}
