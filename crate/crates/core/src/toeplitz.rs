//! String correlation functions as Toeplitz determinants.
//!
//! For the dual operators `τ_j` of index `ν`,
//!
//! ```text
//! C_ν(r) = ⟨τ_i τ_{i+r}⟩ = ⟨Π_{l=i}^{i+r−1} (−i b_l a_{l+ν})⟩ = det_{r×r}[ G_{(l−m)−ν} ],
//! ```
//!
//! by Wick's theorem, where `r` is the separation of the two dual sites.
//! All leading principal minors of one Toeplitz matrix come out of a single
//! nonsymmetric Levinson recursion, whose successive pivots `det_{k+1}/det_k`
//! are the diagonal of the unpivoted LU factorisation.

use nalgebra::DMatrix;

use crate::correlators::CorrelatorTable;
use crate::error::{Error, Result};

/// A Levinson pivot below this fraction of the largest symbol entry triggers
/// the pivoted fallback.
pub const PIVOT_THRESHOLD: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    FastMinor,
    PivotedFallback,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScfEntry {
    pub r: usize,
    pub c: f64,
    pub staggered: f64,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScfSeries {
    pub nu: i64,
    pub length: usize,
    pub entries: Vec<ScfEntry>,
}

impl ScfSeries {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.c)
    }
}

/// `T_{ij} = G_{(i−j)−ν}`
pub fn scf_toeplitz_entry(table: &CorrelatorTable, nu: i64, i: usize, j: usize) -> f64 {
    table.get(i as i64 - j as i64 - nu)
}

/// Largest admissible separation, `L − |ν|`.
pub fn max_separation(l: usize, nu: i64) -> usize {
    l.saturating_sub(nu.unsigned_abs() as usize)
}

/// `C_ν(r)` for `r = 1..=r_max`.
pub fn scf_series(table: &CorrelatorTable, nu: i64, r_max: usize) -> Result<ScfSeries> {
    if nu == 0 {
        return Err(Error::ZeroWinding);
    }
    let l = table.length();
    let max = max_separation(l, nu);
    if r_max == 0 || r_max > max {
        return Err(Error::LengthOutOfRange { r: r_max, max });
    }
    let symbol = |k: i64| table.get(k - nu);
    // On an orthogonal ring matrix with unit determinant the r×r leading minor
    // equals the complementary (L−r)×(L−r) one, so sizes past L/2 are mirrored.
    let mirror = table.is_ring_orthogonal() && r_max > l / 2;
    let dets = leading_minors(&symbol, if mirror { l / 2 } else { r_max });
    let entries = (1..=r_max)
        .map(|r| {
            let (c, method) = if r <= dets.len() { dets[r - 1] } else { dets[l - r - 1] };
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            ScfEntry { r, c, staggered: sign * c, method }
        })
        .collect();
    Ok(ScfSeries { nu, length: l, entries })
}

/// Mean of the plain and staggered correlators over the last 10% of separations.
pub fn string_order_parameter(series: &ScfSeries) -> (f64, f64) {
    let n = series.entries.len();
    let tail = &series.entries[n - (n / 10).max(1)..];
    let k = tail.len() as f64;
    (tail.iter().map(|e| e.c).sum::<f64>() / k, tail.iter().map(|e| e.staggered).sum::<f64>() / k)
}

/// Determinants of the leading `k × k` blocks, `k = 1..=n`, of the Toeplitz
/// matrix `T_{ij} = t(i − j)`.
///
/// Symbols supported on a sublattice `c + dℤ` (decoupled chains) split into
/// `d` independent Toeplitz problems. Otherwise the Levinson recursion runs
/// while its pivots stay above [`PIVOT_THRESHOLD`]; below that the leading
/// block is carried as a Givens-updated QR factorisation, `O(k²)` per size,
/// until two consecutive sizes are well conditioned again.
pub fn leading_minors(t: &impl Fn(i64) -> f64, n: usize) -> Vec<(f64, Method)> {
    minors(t, n)
}

/// Entries below this fraction of the largest one count as structural zeros
/// when looking for sublattice support.
const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Largest `‖T_m⁻¹ e‖∞ · max|t|` the Levinson path may carry. Beyond it the
/// recursion amplifies rounding faster than the minors shrink, so the QR path
/// takes over.
const GROWTH_LIMIT: f64 = 1e8;

/// Levinson restarts allowed after the first fallback; beyond that the QR path
/// carries on to the end, which bounds the cost by `O(n³)`.
const MAX_RESTARTS: usize = 2;

fn minors(t: &dyn Fn(i64) -> f64, n: usize) -> Vec<(f64, Method)> {
    if n == 0 {
        return Vec::new();
    }
    let scale = (-(n as i64) + 1..n as i64).map(|k| t(k).abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return vec![(0.0, Method::FastMinor); n];
    }
    match sublattice(t, n, scale) {
        Some((d, c)) => split_minors(t, n, d, c),
        None => mixed_minors(t, n, scale),
    }
}

// (d, c) with every significant t(k) at k ≡ c mod d, d > 1.
fn sublattice(t: &dyn Fn(i64) -> f64, n: usize, scale: f64) -> Option<(i64, i64)> {
    if n < 2 {
        return None;
    }
    let support: Vec<i64> =
        (-(n as i64) + 1..n as i64).filter(|&k| t(k).abs() > SUPPORT_THRESHOLD * scale).collect();
    let k0 = support[0];
    let d = support.iter().fold(0, |g, &k| gcd(g, k - k0));
    let d = if d == 0 { n as i64 } else { d };
    (d > 1).then(|| (d, k0.rem_euclid(d)))
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// Rows i ≡ ρ pair only with columns j ≡ ρ − c (mod d); after sorting rows and
// columns by class the block for ρ is Toeplitz with symbol t(c + d(k + e_ρ)).
fn split_minors(t: &dyn Fn(i64) -> f64, n: usize, d: i64, c: i64) -> Vec<(f64, Method)> {
    let ni = n as i64;
    let blocks: Vec<Vec<(f64, Method)>> = (0..d)
        .map(|rho| {
            let sigma = (rho - c).rem_euclid(d);
            let e = (rho - sigma - c) / d;
            let size = if rho < ni { ((ni - rho + d - 1) / d) as usize } else { 0 };
            let u = move |k: i64| {
                let x = c + d * (k + e);
                if x.abs() < ni { t(x) } else { 0.0 }
            };
            minors(&u, size)
        })
        .collect();

    let du = d as usize;
    let mut rows = vec![0usize; du];
    let mut cols = vec![0usize; du];
    let mut inversions = 0usize;
    let mut mismatched = 0isize;
    let mut out = Vec::with_capacity(n);
    for k in 0..ni {
        let a = k.rem_euclid(d) as usize;
        let b = (k.rem_euclid(d) + c).rem_euclid(d) as usize;
        inversions += rows[a + 1..].iter().sum::<usize>() + cols[b + 1..].iter().sum::<usize>();
        let was = (rows[a] != cols[a]) as usize + if a != b { (rows[b] != cols[b]) as usize } else { 0 };
        rows[a] += 1;
        cols[b] += 1;
        let now = (rows[a] != cols[a]) as usize + if a != b { (rows[b] != cols[b]) as usize } else { 0 };
        mismatched += now as isize - was as isize;
        if mismatched > 0 {
            out.push((0.0, Method::FastMinor));
            continue;
        }
        let mut det = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        let mut method = Method::FastMinor;
        for (rho, &m) in rows.iter().enumerate() {
            if m > 0 {
                let (v, how) = blocks[rho][m - 1];
                det *= v;
                if how == Method::PivotedFallback {
                    method = how;
                }
            }
        }
        out.push((det, method));
    }
    out
}

fn mixed_minors(t: &dyn Fn(i64) -> f64, n: usize, scale: f64) -> Vec<(f64, Method)> {
    let tiny = PIVOT_THRESHOLD * scale;
    let stable = |s: &Levinson| s.pivot.is_finite() && s.pivot.abs() >= tiny && s.growth() * scale <= GROWTH_LIMIT;
    let mut out: Vec<(f64, Method)> = Vec::with_capacity(n);
    let t0 = t(0);
    let mut lev = Some(Levinson { f: vec![1.0 / t0], b: vec![1.0 / t0], det: t0, pivot: t0 });
    let mut qr: Option<GivensQr> = None;
    let mut restarts = 0;
    let mut healthy_run = 0;
    for m in 1..=n {
        if let Some(s) = lev.take() {
            let next = if m == 1 { Some(s) } else { s.extend(t) };
            if let Some(s) = next.filter(stable) {
                out.push((s.det, Method::FastMinor));
                lev = Some(s);
                continue;
            }
            let mut g = GivensQr::new(n);
            while g.size < m - 1 {
                g.grow(t);
            }
            qr = Some(g);
            healthy_run = 0;
        }
        let g = qr.as_mut().expect("QR path active");
        g.grow(t);
        let det = g.det();
        let prev = out.last().map(|p| p.0).unwrap_or(1.0);
        let pivot_ok = prev != 0.0 && (det / prev).abs() >= tiny;
        healthy_run = if pivot_ok && g.min_diag() >= tiny { healthy_run + 1 } else { 0 };
        out.push((det, Method::PivotedFallback));
        if healthy_run >= 2 && restarts < MAX_RESTARTS && m < n {
            let (f, b) = g.boundary_solutions();
            let s = Levinson { pivot: 1.0 / f[0], f, b, det };
            if stable(&s) {
                lev = Some(s);
                qr = None;
                restarts += 1;
            }
        }
    }
    out
}

// T_k = Q R for the leading block, grown one row and column at a time.
// `qt` holds Qᵀ and `r` holds R, both row-major with stride `cap`, so every
// inner loop runs over contiguous memory.
struct GivensQr {
    cap: usize,
    size: usize,
    qt: Vec<f64>,
    r: Vec<f64>,
}

impl GivensQr {
    fn new(cap: usize) -> Self {
        GivensQr { cap, size: 0, qt: vec![0.0; cap * cap], r: vec![0.0; cap * cap] }
    }

    fn grow(&mut self, t: &dyn Fn(i64) -> f64) {
        let (k, cap) = (self.size, self.cap);
        // new column of R before rotation: Qᵀ c with c_i = t(i − k)
        let c: Vec<f64> = (0..k).map(|i| t(i as i64 - k as i64)).collect();
        for j in 0..k {
            let row = &self.qt[j * cap..j * cap + k];
            self.r[j * cap + k] = row.iter().zip(&c).map(|(q, c)| q * c).sum();
        }
        // new last row (t(k − j))_j, then rotate it into R
        let mut last: Vec<f64> = (0..=k).map(|j| t(k as i64 - j as i64)).collect();
        for i in 0..k {
            self.qt[i * cap + k] = 0.0;
            self.qt[k * cap + i] = 0.0;
        }
        self.qt[k * cap + k] = 1.0;
        for j in 0..k {
            let a = self.r[j * cap + j];
            let b = last[j];
            if b == 0.0 {
                continue;
            }
            let rho = a.hypot(b);
            let (cs, sn) = (a / rho, b / rho);
            for (x, y) in self.r[j * cap + j..j * cap + k + 1].iter_mut().zip(&mut last[j..=k]) {
                let (u, v) = (*x, *y);
                *x = cs * u + sn * v;
                *y = -sn * u + cs * v;
            }
            let (head, tail) = self.qt.split_at_mut(k * cap);
            let qj = &mut head[j * cap..j * cap + k + 1];
            let qk = &mut tail[..k + 1];
            for (x, y) in qj.iter_mut().zip(qk.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = cs * u + sn * v;
                *y = -sn * u + cs * v;
            }
        }
        for col in 0..k {
            self.r[k * cap + col] = 0.0;
        }
        self.r[k * cap + k] = last[k];
        self.size = k + 1;
    }

    // every rotation has determinant one
    fn det(&self) -> f64 {
        (0..self.size).map(|i| self.r[i * self.cap + i]).product()
    }

    fn min_diag(&self) -> f64 {
        (0..self.size).map(|i| self.r[i * self.cap + i].abs()).fold(f64::INFINITY, f64::min)
    }

    // T f = e₁ and T b = e_k via R x = Qᵀ e
    fn boundary_solutions(&self) -> (Vec<f64>, Vec<f64>) {
        let (k, cap) = (self.size, self.cap);
        let solve = |row: usize| {
            let mut x: Vec<f64> = (0..k).map(|j| self.qt[j * cap + row]).collect();
            for i in (0..k).rev() {
                let mut v = x[i];
                for j in i + 1..k {
                    v -= self.r[i * cap + j] * x[j];
                }
                x[i] = v / self.r[i * cap + i];
            }
            x
        };
        (solve(0), solve(k - 1))
    }
}

// Solutions of T_m f = e_1 and T_m b = e_m, with det T_m and det T_m / det T_{m−1}.
struct Levinson {
    f: Vec<f64>,
    b: Vec<f64>,
    det: f64,
    pivot: f64,
}

impl Levinson {
    fn growth(&self) -> f64 {
        self.f.iter().chain(&self.b).fold(0.0, |m, x| m.max(x.abs()))
    }

    fn extend(self, t: &dyn Fn(i64) -> f64) -> Option<Levinson> {
        let m = self.f.len();
        let ef: f64 = (0..m).map(|i| t((m - i) as i64) * self.f[i]).sum();
        let eb: f64 = (0..m).map(|i| t(-(i as i64 + 1)) * self.b[i]).sum();
        let den = 1.0 - ef * eb;
        if den == 0.0 || !den.is_finite() {
            return None;
        }
        let mut f = vec![0.0; m + 1];
        let mut b = vec![0.0; m + 1];
        for i in 0..=m {
            let fi = if i < m { self.f[i] } else { 0.0 };
            let bi = if i > 0 { self.b[i - 1] } else { 0.0 };
            f[i] = (fi - ef * bi) / den;
            b[i] = (bi - eb * fi) / den;
        }
        let pivot = 1.0 / f[0];
        Some(Levinson { f, b, det: self.det * pivot, pivot })
    }
}

fn toeplitz(t: &impl Fn(i64) -> f64, m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |i, j| t(i as i64 - j as i64))
}

/// Pivoted-LU determinant of the leading `m × m` block.
pub fn pivoted_det(t: &impl Fn(i64) -> f64, m: usize) -> f64 {
    toeplitz(t, m).lu().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainSpec;
    use crate::correlators::correlator_table;

    #[test]
    fn mirrored_minors_match_the_direct_ones() {
        let specs = [
            ChainSpec::new(vec![[1.0, 1.0], [2.0, 2.0], [2.0, 2.0]], 0.4).unwrap(),
            ChainSpec::new(vec![[1.0, 1.0]], 1.0).unwrap(),
            ChainSpec::new(vec![[0.3, -0.8], [1.1, 0.2]], -0.5).unwrap(),
        ];
        for spec in &specs {
            let l = 48;
            let table = correlator_table(spec, l).unwrap();
            assert!(table.is_ring_orthogonal());
            for nu in [-3, -1, 1, 2, 4] {
                let r_max = max_separation(l, nu);
                let series = scf_series(&table, nu, r_max).unwrap();
                for e in &series.entries {
                    let want = pivoted_det(&|k| table.get(k - nu), e.r);
                    assert!((e.c - want).abs() < 1e-10, "ν={nu} r={}: {} vs {want}", e.r, e.c);
                }
            }
        }
    }

    #[test]
    fn matches_lu_on_a_generic_symbol() {
        let t = |k: i64| 1.0 / (1.0 + (k as f64 - 0.3).powi(2)) + 0.2 * (k as f64).sin();
        let dets = leading_minors(&t, 40);
        for (m, &(d, method)) in dets.iter().enumerate() {
            let want = pivoted_det(&t, m + 1);
            assert_eq!(method, Method::FastMinor);
            assert!((d - want).abs() <= 1e-9 * want.abs().max(1e-300), "size {}: {d} vs {want}", m + 1);
        }
    }

    #[test]
    fn zero_leading_entry_falls_back() {
        // t(0) = 0: the 1×1 minor vanishes, the 2×2 does not
        let t = |k: i64| match k {
            0 => 0.0,
            1 => 1.0,
            -1 => 2.0,
            _ => 0.1 / (1.0 + k as f64 * k as f64),
        };
        let dets = leading_minors(&t, 12);
        assert_eq!(dets[0], (0.0, Method::PivotedFallback));
        for (m, &(d, _)) in dets.iter().enumerate() {
            let want = pivoted_det(&t, m + 1);
            assert!((d - want).abs() <= 1e-9 * want.abs().max(1e-12), "size {}: {d} vs {want}", m + 1);
        }
        assert!(dets[5..].iter().all(|&(_, m)| m == Method::FastMinor));
    }

    #[test]
    fn triangular_symbol_has_zero_minors() {
        let t = |k: i64| if k == 1 { -1.0 } else { 0.0 };
        for (d, _) in leading_minors(&t, 6) {
            assert_eq!(d, 0.0);
        }
    }

    fn assert_matches_lu(t: &impl Fn(i64) -> f64, n: usize) {
        for (m, &(d, _)) in leading_minors(t, n).iter().enumerate() {
            let want = pivoted_det(t, m + 1);
            let tol = 1e-9 * want.abs().max(1e-10);
            assert!((d - want).abs() <= tol, "size {}: {d} vs {want}", m + 1);
        }
    }

    #[test]
    fn sublattice_symbols_split() {
        for (d, c) in [(2i64, 0i64), (2, 1), (3, 1), (3, 2), (4, 3)] {
            let t = move |k: i64| {
                if (k - c).rem_euclid(d) == 0 { 1.0 / (1.0 + (k as f64 - 0.4).powi(2)) + 0.1 * k as f64 } else { 0.0 }
            };
            assert_matches_lu(&t, 30);
        }
    }

    #[test]
    fn singular_blocks_use_the_qr_path() {
        // rank-deficient leading blocks every third size, no sublattice structure
        let t = |k: i64| match k {
            0 => 0.0,
            _ => 1.0 / (1.0 + k as f64 * k as f64) * if k % 3 == 0 { 2.0 } else { 1.0 },
        };
        let dets = leading_minors(&t, 40);
        assert!(dets.iter().any(|&(_, m)| m == Method::PivotedFallback));
        assert_matches_lu(&t, 40);
    }
}
