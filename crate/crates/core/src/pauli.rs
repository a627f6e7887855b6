//! Pauli strings with exact phases, Jordan–Wigner Majoranas and the dual
//! string operators `τ_j` of index `ν`.
//!
//! Sites are 1-based. In the computational basis bit `j−1` set means spin down,
//! which is an occupied fermion site: `c_j = −σ⁺_j Π_{k<j} σᶻ_k`, so
//! `a_j = −σˣ_j S_j` and `b_j = −σʸ_j S_j` with `S_j = Π_{k<j} σᶻ_k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    // σ^a σ^b = i^k σ^c
    fn mul(self, other: Pauli) -> (u8, Option<Pauli>) {
        use Pauli::*;
        match (self, other) {
            (a, b) if a == b => (0, None),
            (X, Y) => (1, Some(Z)),
            (Y, Z) => (1, Some(X)),
            (Z, X) => (1, Some(Y)),
            (Y, X) => (3, Some(Z)),
            (Z, Y) => (3, Some(X)),
            (X, Z) => (3, Some(Y)),
            _ => unreachable!(),
        }
    }

    fn swap_xy(self) -> Pauli {
        match self {
            Pauli::X => Pauli::Y,
            Pauli::Y => Pauli::X,
            Pauli::Z => Pauli::Z,
        }
    }
}

/// `i^phase · Π_j σ^{op_j}_j`
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    pub phase: u8,
    pub ops: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn identity() -> Self {
        PauliString::default()
    }

    pub fn single(site: usize, p: Pauli) -> Self {
        PauliString { phase: 0, ops: BTreeMap::from([(site, p)]) }
    }

    pub fn from_ops(phase: u8, ops: &[(usize, Pauli)]) -> Self {
        ops.iter().fold(PauliString { phase: phase % 4, ops: BTreeMap::new() }, |acc, &(s, p)| acc * PauliString::single(s, p))
    }

    pub fn scaled(mut self, phase: u8) -> Self {
        self.phase = (self.phase + phase) % 4;
        self
    }

    pub fn neg(self) -> Self {
        self.scaled(2)
    }

    pub fn coefficient(&self) -> Complex64 {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
            [self.phase as usize]
    }

    pub fn adjoint(&self) -> Self {
        PauliString { phase: (4 - self.phase) % 4, ops: self.ops.clone() }
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self.ops.iter().filter(|(s, p)| other.ops.get(s).is_some_and(|q| q != *p)).count();
        anti % 2 == 0
    }

    pub fn support(&self) -> Option<(usize, usize)> {
        Some((*self.ops.keys().next()?, *self.ops.keys().next_back()?))
    }

    /// `σᶻ_1 ⋯ σᶻ_{j−1}`
    pub fn z_string(j: usize) -> Self {
        PauliString { phase: 0, ops: (1..j).map(|k| (k, Pauli::Z)).collect() }
    }

    /// Action on a basis state: `P|s⟩ = amp |s'⟩`.
    pub fn apply(&self, state: u64) -> (u64, Complex64) {
        let mut s = state;
        let mut ph = self.phase;
        for (&site, &p) in &self.ops {
            let bit = 1u64 << (site - 1);
            let down = s & bit != 0;
            match p {
                Pauli::X => s ^= bit,
                Pauli::Y => {
                    // σʸ|↑⟩ = i|↓⟩, σʸ|↓⟩ = −i|↑⟩
                    ph += if down { 3 } else { 1 };
                    s ^= bit;
                }
                Pauli::Z => {
                    if down {
                        ph += 2;
                    }
                }
            }
        }
        (s, PauliString { phase: ph % 4, ops: BTreeMap::new() }.coefficient())
    }

    fn swap_xy(&self) -> Self {
        PauliString { phase: self.phase, ops: self.ops.iter().map(|(&s, &p)| (s, p.swap_xy())).collect() }
    }
}

impl Mul for PauliString {
    type Output = PauliString;

    fn mul(self, rhs: PauliString) -> PauliString {
        let mut phase = self.phase + rhs.phase;
        let mut ops = self.ops;
        for (site, q) in rhs.ops {
            match ops.remove(&site) {
                None => {
                    ops.insert(site, q);
                }
                Some(p) => {
                    let (k, r) = p.mul(q);
                    phase += k;
                    if let Some(r) = r {
                        ops.insert(site, r);
                    }
                }
            }
        }
        PauliString { phase: phase % 4, ops }
    }
}

impl<'a> Mul<&'a PauliString> for &'a PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        self.clone() * rhs.clone()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.phase as usize])?;
        if self.ops.is_empty() {
            return f.write_str("1");
        }
        for (s, p) in &self.ops {
            write!(f, " {:?}{}", p, s)?;
        }
        Ok(())
    }
}

/// `a_j = c†_j + c_j = −σˣ_j S_j`
pub fn majorana_a(j: usize) -> PauliString {
    (PauliString::single(j, Pauli::X) * PauliString::z_string(j)).neg()
}

/// `b_j = i(c†_j − c_j) = −σʸ_j S_j`
pub fn majorana_b(j: usize) -> PauliString {
    (PauliString::single(j, Pauli::Y) * PauliString::z_string(j)).neg()
}

/// `−i b_l a_{l+ν}`, which is `B_l A_{l+ν}` with `B = c† − c`, `A = c† + c`.
pub fn bond(l: usize, nu: i64) -> PauliString {
    let target = (l as i64 + nu) as usize;
    (majorana_b(l) * majorana_a(target)).scaled(3)
}

/// The dual operator `τ_j` of index `ν`, supported on sites `j..=j+|ν|−1`
/// (plus a leading σᶻ string and a sign `(−1)^{j+1}` for even `ν`).
pub fn dual_operator(nu: i64, j: usize, l: usize) -> Result<PauliString> {
    if nu == 0 {
        return Err(Error::ZeroWinding);
    }
    let len = nu.unsigned_abs() as usize;
    let last = j as i64 + len as i64 - 1;
    if j == 0 || last > l as i64 {
        return Err(Error::SupportOverflow { first: j as i64, last, length: l });
    }
    let p = len / 2;
    let op = if len % 2 == 1 {
        // σˣ_j Π_{l=1}^{p} σʸ_{j+2l−1} σˣ_{j+2l}
        let mut ops = vec![(j, Pauli::X)];
        for k in 1..=p {
            ops.push((j + 2 * k - 1, Pauli::Y));
            ops.push((j + 2 * k, Pauli::X));
        }
        PauliString::from_ops(0, &ops)
    } else {
        // −S_j Π_{l=1}^{p} σʸ_{j+2l−2} σˣ_{j+2l−1}
        let mut ops: Vec<(usize, Pauli)> = Vec::new();
        for k in 1..=p {
            ops.push((j + 2 * k - 2, Pauli::Y));
            ops.push((j + 2 * k - 1, Pauli::X));
        }
        (PauliString::z_string(j) * PauliString::from_ops(0, &ops)).neg()
    };
    let op = if nu > 0 { op } else { op.swap_xy() };
    // for even |ν| the site sign (−1)^{j+1} makes τ_i τ_{i+r} equal the bond
    // string for every r, not only even r
    Ok(if len % 2 == 0 && j % 2 == 0 { op.neg() } else { op })
}

/// The fermionic form of `τ_i τ_{i+r}`: `Π_l (−i b_l a_{l+ν})` over the `r`
/// bonds joining sites `p` and `p + |ν|`, `p = i..i+r−1`.
pub fn bond_string(nu: i64, i: usize, r: usize) -> PauliString {
    let shift = if nu < 0 { nu.unsigned_abs() as usize } else { 0 };
    (i + shift..i + shift + r).fold(PauliString::identity(), |acc, l| acc * bond(l, nu))
}

/// The same product written directly in spins,
/// `Π_p σ^α_p (Π_{k=p+1}^{p+|ν|−1} σᶻ_k) σ^α_{p+|ν|}`, `α = x` for `ν > 0` and `y` for `ν < 0`.
pub fn spin_string(nu: i64, i: usize, r: usize) -> PauliString {
    let n = nu.unsigned_abs() as usize;
    let alpha = if nu > 0 { Pauli::X } else { Pauli::Y };
    let mut acc = PauliString::identity();
    for p in i..i + r {
        let mut ops = vec![(p, alpha)];
        ops.extend((p + 1..p + n).map(|k| (k, Pauli::Z)));
        ops.push((p + n, alpha));
        acc = acc * PauliString::from_ops(0, &ops);
    }
    acc
}

/// Verifies `τ_i τ_{i+r} = Π (−i b_l a_{l+ν})` symbolically, phase included.
pub fn dual_product_check(nu: i64, i: usize, r: usize, l: usize) -> Result<bool> {
    let lhs = dual_operator(nu, i, l)? * dual_operator(nu, i + r, l)?;
    Ok(lhs == bond_string(nu, i, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Pauli::*;

    #[test]
    fn pauli_algebra() {
        let x = PauliString::single(1, X);
        let y = PauliString::single(1, Y);
        assert_eq!(&x * &y, PauliString::single(1, Z).scaled(1));
        assert_eq!(&y * &x, PauliString::single(1, Z).scaled(3));
        assert_eq!(&x * &x, PauliString::identity());
        assert!(!x.commutes_with(&y));
        assert!(PauliString::from_ops(0, &[(1, X), (2, X)]).commutes_with(&PauliString::from_ops(0, &[(1, Y), (2, Y)])));
    }

    #[test]
    fn majoranas_anticommute_and_square_to_one() {
        let ms: Vec<PauliString> = (1..=4).flat_map(|j| [majorana_a(j), majorana_b(j)]).collect();
        for (i, m) in ms.iter().enumerate() {
            assert_eq!(m * m, PauliString::identity());
            for n in &ms[i + 1..] {
                assert!(!m.commutes_with(n));
            }
        }
    }

    #[test]
    fn occupation_is_half_one_minus_sigma_z() {
        // i a b = 2n − 1 = −σᶻ
        let iab = (majorana_a(3) * majorana_b(3)).scaled(1);
        assert_eq!(iab, PauliString::single(3, Z).neg());
    }

    #[test]
    fn nearest_neighbour_bonds() {
        assert_eq!(bond(2, 1), PauliString::from_ops(0, &[(2, X), (3, X)]));
        assert_eq!(bond(3, -1), PauliString::from_ops(0, &[(2, Y), (3, Y)]));
        assert_eq!(bond(1, 3), PauliString::from_ops(0, &[(1, X), (2, Z), (3, Z), (4, X)]));
    }

    #[test]
    fn dual_operators_of_low_index() {
        assert_eq!(dual_operator(1, 4, 8).unwrap(), PauliString::single(4, X));
        assert_eq!(dual_operator(-1, 4, 8).unwrap(), PauliString::single(4, Y));
        assert_eq!(dual_operator(3, 1, 8).unwrap(), PauliString::from_ops(0, &[(1, X), (2, Y), (3, X)]));
        assert_eq!(dual_operator(2, 3, 8).unwrap(), PauliString::from_ops(2, &[(1, Z), (2, Z), (3, Y), (4, X)]));
        assert_eq!(dual_operator(-2, 2, 8).unwrap(), PauliString::from_ops(0, &[(1, Z), (2, X), (3, Y)]));
        assert!(matches!(dual_operator(3, 7, 8), Err(Error::SupportOverflow { .. })));
    }

    #[test]
    fn dual_products_reproduce_bond_strings() {
        for nu in [-4i64, -3, -2, -1, 1, 2, 3, 4] {
            let n = nu.unsigned_abs() as usize;
            for i in 1..=4 {
                for r in 1..=6 {
                    let l = i + r + n + 2;
                    assert!(dual_product_check(nu, i, r, l).unwrap(), "nu={nu} i={i} r={r}");
                    assert_eq!(bond_string(nu, i, r), spin_string(nu, i, r), "nu={nu} i={i} r={r}");
                }
            }
        }
    }
}
