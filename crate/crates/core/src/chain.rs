//! Couplings, momentum grids and the Bloch vector of the extended chain.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = Σ_j Σ_n [ J⁺_n/2 (c†_j c_{j+n} + h.c.) + J⁻_n/2 (c†_j c†_{j+n} + h.c.) ] − μ Σ_j (c†_j c_j − 1/2)
//! ```
//!
//! and in momentum space `H_q = (y σʸ + z σᶻ)/2` with
//! `y(q) = Σ J⁻_n sin(nq)` and `z(q) = Σ J⁺_n cos(nq) − μ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Range-`nf` couplings `(J⁺_n, J⁻_n)` for `n = 1..=nf` plus the chemical potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub nf: usize,
    pub couplings: Vec<[f64; 2]>,
    pub mu: f64,
}

impl ChainSpec {
    pub fn new(couplings: Vec<[f64; 2]>, mu: f64) -> Result<Self> {
        let spec = ChainSpec { nf: couplings.len(), couplings, mu };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a spec from `(J_n^x, J_n^y)` pairs.
    pub fn from_xy(xy: &[[f64; 2]], mu: f64) -> Result<Self> {
        Self::new(xy.iter().map(|&[x, y]| [x + y, x - y]).collect(), mu)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nf == 0 || self.couplings.len() != self.nf {
            return Err(Error::EmptyCouplings);
        }
        let finite = self.mu.is_finite() && self.couplings.iter().flatten().all(|c| c.is_finite());
        if !finite {
            return Err(Error::NonFiniteCoupling);
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ChainSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("ChainSpec serialises")
    }

    /// `J⁺_n`, zero beyond the range. `n` is 1-based.
    pub fn j_plus(&self, n: usize) -> f64 {
        if n == 0 || n > self.nf { 0.0 } else { self.couplings[n - 1][0] }
    }

    pub fn j_minus(&self, n: usize) -> f64 {
        if n == 0 || n > self.nf { 0.0 } else { self.couplings[n - 1][1] }
    }

    /// `J^x_n = (J⁺_n + J⁻_n)/2`
    pub fn jx(&self, n: usize) -> f64 {
        0.5 * (self.j_plus(n) + self.j_minus(n))
    }

    /// `J^y_n = (J⁺_n − J⁻_n)/2`
    pub fn jy(&self, n: usize) -> f64 {
        0.5 * (self.j_plus(n) - self.j_minus(n))
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        ChainSpec { mu, ..self.clone() }
    }

    /// Image under `c → c†`: every coupling and μ change sign.
    /// Plain and staggered witnesses swap; the winding number is unchanged.
    pub fn particle_hole(&self) -> Self {
        ChainSpec {
            nf: self.nf,
            couplings: self.couplings.iter().map(|&[p, m]| [-p, -m]).collect(),
            mu: -self.mu,
        }
    }

    /// Image under `c → i c`: pairing changes sign, `J^x ↔ J^y`, `ν → −ν`.
    pub fn phase_rotated(&self) -> Self {
        ChainSpec {
            nf: self.nf,
            couplings: self.couplings.iter().map(|&[p, m]| [p, -m]).collect(),
            mu: self.mu,
        }
    }

    pub fn is_all_zero(&self) -> bool {
        self.mu == 0.0 && self.couplings.iter().flatten().all(|&c| c == 0.0)
    }

    /// Largest absolute coupling or |μ|; a natural energy scale.
    pub fn scale(&self) -> f64 {
        self.couplings.iter().flatten().fold(self.mu.abs(), |m, c| m.max(c.abs()))
    }
}

/// Antiperiodic momenta `q = 2πm/L`, `m` half-odd, for even `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumGrid {
    l: usize,
    q: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(l: usize) -> Result<Self> {
        if l < 2 || l % 2 != 0 {
            return Err(Error::InvalidLength(l));
        }
        let q = (0..l).map(|k| PI * Self::odd(l, k) as f64 / l as f64).collect();
        Ok(MomentumGrid { l, q })
    }

    /// `2m` for the k-th momentum, an odd integer in `(−L, L)`.
    pub fn odd(l: usize, k: usize) -> i64 {
        2 * k as i64 + 1 - l as i64
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn momenta(&self) -> &[f64] {
        &self.q
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub y: f64,
    pub z: f64,
    /// `atan2(y, z)`
    pub theta: f64,
    /// Half the length of `(y, z)`.
    pub eps: f64,
}

pub fn bloch_vector(spec: &ChainSpec, q: f64) -> BlochVector {
    let (y, z) = yz(spec, q);
    BlochVector { y, z, theta: y.atan2(z), eps: 0.5 * y.hypot(z) }
}

pub(crate) fn yz(spec: &ChainSpec, q: f64) -> (f64, f64) {
    let mut y = 0.0;
    let mut z = -spec.mu;
    for (i, &[p, m]) in spec.couplings.iter().enumerate() {
        let (s, c) = ((i + 1) as f64 * q).sin_cos();
        y += m * s;
        z += p * c;
    }
    (y, z)
}

/// `(dy/dq, dz/dq)`
pub(crate) fn yz_derivative(spec: &ChainSpec, q: f64) -> (f64, f64) {
    let mut dy = 0.0;
    let mut dz = 0.0;
    for (i, &[p, m]) in spec.couplings.iter().enumerate() {
        let n = (i + 1) as f64;
        let (s, c) = (n * q).sin_cos();
        dy += n * m * c;
        dz -= n * p * s;
    }
    (dy, dz)
}

/// One entry per grid momentum: `(q, +ε_q, −ε_q)`.
pub fn energy_spectrum(spec: &ChainSpec, grid: &MomentumGrid) -> Vec<(f64, f64, f64)> {
    grid.momenta()
        .iter()
        .map(|&q| {
            let e = bloch_vector(spec, q).eps;
            (q, e, -e)
        })
        .collect()
}

/// Minimum of ε(q) over the Brillouin zone and where it occurs.
///
/// ε is even in q, so only `[0, π]` is searched: a dense scan followed by
/// golden-section refinement of the best few local minima. Minimising |r|
/// rather than |r|² keeps the minimum sharp, so a true zero is located to
/// machine precision.
pub fn min_gap(spec: &ChainSpec) -> (f64, f64) {
    const N: usize = 8192;
    let h = PI / N as f64;
    let f = |q: f64| bloch_vector(spec, q).eps;
    let vals: Vec<f64> = (0..=N).map(|i| f(i as f64 * h)).collect();
    let mut cands: Vec<usize> = (0..=N)
        .filter(|&i| {
            let l = if i == 0 { vals[1] } else { vals[i - 1] };
            let r = if i == N { vals[N - 1] } else { vals[i + 1] };
            vals[i] <= l && vals[i] <= r
        })
        .collect();
    cands.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    cands.truncate(6);
    let mut best = (0.0, f64::INFINITY);
    for i in cands {
        let lo = (i as f64 - 1.0).max(0.0) * h;
        let hi = ((i + 1) as f64).min(N as f64) * h;
        let (q, e) = golden_min(f, lo, hi);
        let (q, e) = if vals[i] < e { (i as f64 * h, vals[i]) } else { (q, e) };
        if e < best.1 {
            best = (q, e);
        }
    }
    best
}

pub fn is_gapless(spec: &ChainSpec, tol: f64) -> bool {
    min_gap(spec).1 < tol
}

pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * b.abs().max(1e-300) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let m = 0.5 * (a + b);
    let fm = f(m);
    [(c, fc), (d, fd), (m, fm)].into_iter().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_antiperiodic() {
        let g = MomentumGrid::new(4).unwrap();
        let q = g.momenta();
        assert_eq!(q.len(), 4);
        assert!((q[0] + 3.0 * PI / 4.0).abs() < 1e-15);
        assert!((q[3] - 3.0 * PI / 4.0).abs() < 1e-15);
        for &qq in q {
            let phase = (qq * 4.0).cos();
            assert!((phase + 1.0).abs() < 1e-12);
        }
        assert_eq!(MomentumGrid::new(5), Err(Error::InvalidLength(5)));
        assert_eq!(MomentumGrid::new(0), Err(Error::InvalidLength(0)));
    }

    #[test]
    fn kitaev_point_bloch_vector() {
        let spec = ChainSpec::new(vec![[1.0, 1.0]], 0.0).unwrap();
        let b = bloch_vector(&spec, 0.3);
        assert!((b.y - 0.3f64.sin()).abs() < 1e-15);
        assert!((b.z - 0.3f64.cos()).abs() < 1e-15);
        assert!((b.theta - 0.3).abs() < 1e-15);
        assert!((b.eps - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gap_closings_of_three_range_chain() {
        let base = [[1.0, 1.0], [2.0, 2.0], [2.0, 2.0]];
        let gapless = |mu: f64| is_gapless(&ChainSpec::new(base.to_vec(), mu).unwrap(), 1e-9);
        assert!(gapless(5.0));
        assert!(gapless(-1.0));
        assert!(gapless(3f64.sqrt() - 1.0));
        assert!(gapless(-(3f64.sqrt()) - 1.0));
        assert!(!gapless(3.0));
        assert!(!gapless(0.0));
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let spec = ChainSpec::new(vec![[1.0, 1.0], [2.0, 2.0]], 0.5).unwrap();
        assert_eq!(ChainSpec::from_json(&spec.to_json()).unwrap(), spec);
        let bad = r#"{"nf":1,"couplings":[[1,1]],"mu":0,"extra":1}"#;
        assert!(matches!(ChainSpec::from_json(bad), Err(Error::InvalidInput(_))));
        let mismatch = r#"{"nf":2,"couplings":[[1,1]],"mu":0}"#;
        assert_eq!(ChainSpec::from_json(mismatch), Err(Error::EmptyCouplings));
        assert_eq!(ChainSpec::new(vec![[f64::NAN, 0.0]], 0.0), Err(Error::NonFiniteCoupling));
    }
}
