//! Exact 2×2 matrix arithmetic over `Z/m`.
//!
//! Everything downstream (subgroup closures, genus computations, the
//! classification) is built on [`ResidueMatrix`]: a 2×2 matrix over `Z/m`
//! stored with entries reduced to `[0, m)`.  Moduli here are always small
//! (the catalog tops out at level 96), so entries are `u64` and products are
//! computed in `u128`-free fashion via `u64` (safe for `m < 2^32`).

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from modular matrix arithmetic.
#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ModArithError {
    /// The matrix determinant is not a unit mod `m`, so no inverse exists.
    #[error("determinant {det} is not a unit modulo {m}")]
    NonUnitDeterminant { det: u64, m: u64 },
    /// Two operands live over different moduli.
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    /// A CRT split/join was requested for factors that are not coprime or do
    /// not multiply to the modulus.
    #[error("invalid factorization {m1}*{m2} of {m}")]
    BadFactorization { m1: u64, m2: u64, m: u64 },
    /// A reduction was requested to a non-divisor of the modulus.
    #[error("{d} does not divide modulus {m}")]
    NotADivisor { d: u64, m: u64 },
}

/// A 2×2 matrix `[[a, b], [c, d]]` over `Z/m`, entries reduced to `[0, m)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueMatrix {
    pub m: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]] mod {}", self.a, self.b, self.c, self.d, self.m)
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

#[inline]
fn modn(x: i64, m: u64) -> u64 {
    x.rem_euclid(m as i64) as u64
}

impl ResidueMatrix {
    /// Build a matrix from possibly-unreduced signed entries.
    pub fn new(m: u64, a: i64, b: i64, c: i64, d: i64) -> Self {
        assert!(m >= 1, "modulus must be positive");
        ResidueMatrix { m, a: modn(a, m), b: modn(b, m), c: modn(c, m), d: modn(d, m) }
    }

    /// The identity matrix mod `m`.
    pub fn identity(m: u64) -> Self {
        ResidueMatrix::new(m, 1, 0, 0, 1)
    }

    /// The matrix `-I` mod `m` (equal to `I` when `m ≤ 2`).
    pub fn minus_identity(m: u64) -> Self {
        ResidueMatrix::new(m, -1, 0, 0, -1)
    }

    /// The scalar matrix `λI` mod `m`.
    pub fn scalar(m: u64, lambda: i64) -> Self {
        ResidueMatrix::new(m, lambda, 0, 0, lambda)
    }

    /// Determinant `ad - bc` mod `m`.
    #[inline]
    pub fn det(&self) -> u64 {
        let m = self.m;
        (self.a * self.d % m + m - self.b * self.c % m) % m
    }

    /// Trace `a + d` mod `m`.
    #[inline]
    pub fn tr(&self) -> u64 {
        (self.a + self.d) % self.m
    }

    /// Whether the determinant is a unit mod `m`.
    pub fn is_invertible(&self) -> bool {
        self.det().gcd(&self.m) == 1
    }

    /// Whether this is a scalar matrix `λI`.
    pub fn is_scalar(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    /// Pack the entries into a single `u64` key, suitable for ordering and
    /// hashing inside a fixed modulus.  Lexicographic in `(a, b, c, d)`.
    #[inline]
    pub fn pack(&self) -> u64 {
        let m = self.m;
        ((self.a * m + self.b) * m + self.c) * m + self.d
    }

    /// Inverse of `pack` for a given modulus.
    pub fn unpack(m: u64, key: u64) -> Self {
        let d = key % m;
        let c = key / m % m;
        let b = key / (m * m) % m;
        let a = key / (m * m * m) % m;
        ResidueMatrix { m, a, b, c, d }
    }

    /// Matrix product (panics on modulus mismatch; moduli are an internal
    /// invariant, not user input, everywhere this is called in a hot loop).
    #[inline]
    pub fn mat_mul(&self, other: &ResidueMatrix) -> ResidueMatrix {
        debug_assert_eq!(self.m, other.m);
        let m = self.m;
        ResidueMatrix {
            m,
            a: (self.a * other.a + self.b * other.c) % m,
            b: (self.a * other.b + self.b * other.d) % m,
            c: (self.c * other.a + self.d * other.c) % m,
            d: (self.c * other.b + self.d * other.d) % m,
        }
    }

    /// Matrix inverse; errors when the determinant is not a unit.
    pub fn mat_inv(&self) -> Result<ResidueMatrix, ModArithError> {
        let m = self.m;
        let det = self.det();
        let di = inv_mod(det, m)
            .ok_or(ModArithError::NonUnitDeterminant { det, m })?;
        Ok(ResidueMatrix {
            m,
            a: self.d * di % m,
            b: (m - self.b % m) % m * di % m,
            c: (m - self.c % m) % m * di % m,
            d: self.a * di % m,
        })
    }

    /// `g h g^{-1}`; errors if `g` is not invertible.
    pub fn conjugate_by(&self, g: &ResidueMatrix) -> Result<ResidueMatrix, ModArithError> {
        Ok(g.mat_mul(self).mat_mul(&g.mat_inv()?))
    }

    /// Entrywise reduction to a divisor `d | m`.
    pub fn reduce(&self, d: u64) -> Result<ResidueMatrix, ModArithError> {
        if d == 0 || self.m % d != 0 {
            return Err(ModArithError::NotADivisor { d, m: self.m });
        }
        Ok(ResidueMatrix { m: d, a: self.a % d, b: self.b % d, c: self.c % d, d: self.d % d })
    }

    /// Split mod `m = m1 * m2` (coprime factors) into the pair of reductions.
    pub fn crt_split(&self, m1: u64, m2: u64) -> Result<(ResidueMatrix, ResidueMatrix), ModArithError> {
        if m1 * m2 != self.m || m1.gcd(&m2) != 1 || m1 == 0 || m2 == 0 {
            return Err(ModArithError::BadFactorization { m1, m2, m: self.m });
        }
        Ok((self.reduce(m1)?, self.reduce(m2)?))
    }

    /// Join reductions mod coprime `m1`, `m2` into the matrix mod `m1 * m2`.
    pub fn crt_join(x1: &ResidueMatrix, x2: &ResidueMatrix) -> Result<ResidueMatrix, ModArithError> {
        let (m1, m2) = (x1.m, x2.m);
        if m1.gcd(&m2) != 1 {
            return Err(ModArithError::BadFactorization { m1, m2, m: m1 * m2 });
        }
        let m = m1 * m2;
        let j = |r1: u64, r2: u64| crt2(r1, m1, r2, m2);
        Ok(ResidueMatrix {
            m,
            a: j(x1.a, x2.a),
            b: j(x1.b, x2.b),
            c: j(x1.c, x2.c),
            d: j(x1.d, x2.d),
        })
    }
}

/// Modular inverse of `x` mod `m`, if it exists.
pub fn inv_mod(x: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (x as i64).extended_gcd(&(m as i64));
    if e.gcd != 1 {
        None
    } else {
        Some(e.x.rem_euclid(m as i64) as u64)
    }
}

/// CRT recombination of `r1 mod m1`, `r2 mod m2` for coprime moduli.
fn crt2(r1: u64, m1: u64, r2: u64, m2: u64) -> u64 {
    // x = r1 + m1 * k with k ≡ (r2 - r1)/m1 (mod m2)
    let inv = inv_mod(m1 % m2, m2).expect("coprime moduli");
    let k = (r2 as i64 - r1 as i64).rem_euclid(m2 as i64) as u64 * inv % m2;
    r1 + m1 * k
}

/// Order of `GL₂(Z/m)`: `m^4 ∏_{p|m} (1 - 1/p)(1 - 1/p²)`.
pub fn gl2_order(m: u64) -> u64 {
    let mut n = m * m * m * m;
    for (p, _) in factorize(m) {
        n = n / (p * p * p) * (p - 1) * (p * p - 1);
    }
    n
}

/// Order of `SL₂(Z/m)`: `m^3 ∏_{p|m} (1 - 1/p²)`.
pub fn sl2_order(m: u64) -> u64 {
    let mut n = m * m * m;
    for (p, _) in factorize(m) {
        n = n / (p * p) * (p * p - 1);
    }
    n
}

/// Number of units mod `m`.
pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    for (p, _) in factorize(m) {
        n = n / p * (p - 1);
    }
    n
}

/// Prime factorization of a small integer, ascending.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Sorted list of divisors of `m`.
pub fn divisors(m: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
    out.sort_unstable();
    out
}

/// Iterate over all of `GL₂(Z/m)` without storing it: calls `f` on every
/// invertible matrix.  Used for conjugator scans and ambient enumerations.
pub fn for_each_gl2<F: FnMut(&ResidueMatrix)>(m: u64, mut f: F) {
    for a in 0..m {
        for d in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let x = ResidueMatrix { m, a, b, c, d };
                    if x.is_invertible() {
                        f(&x);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_identity() {
        let x = ResidueMatrix::new(7, -1, 8, 14, 3);
        assert_eq!((x.a, x.b, x.c, x.d), (6, 1, 0, 3));
        assert_eq!(ResidueMatrix::identity(5).det(), 1);
        assert_eq!(ResidueMatrix::minus_identity(2), ResidueMatrix::identity(2));
    }

    #[test]
    fn mul_inv_roundtrip() {
        let x = ResidueMatrix::new(28, 5, 19, 21, 8);
        let xi = x.mat_inv().unwrap();
        assert_eq!(x.mat_mul(&xi), ResidueMatrix::identity(28));
        assert_eq!(xi.mat_mul(&x), ResidueMatrix::identity(28));
    }

    #[test]
    fn non_unit_determinant() {
        let x = ResidueMatrix::new(6, 2, 0, 0, 1);
        assert_eq!(
            x.mat_inv(),
            Err(ModArithError::NonUnitDeterminant { det: 2, m: 6 })
        );
    }

    #[test]
    fn crt_split_28_example() {
        // hand-checked: [[5,19],[21,8]] mod 28 ↦ ([[1,3],[1,0]] mod 4, [[5,5],[0,1]] mod 7)
        let x = ResidueMatrix::new(28, 5, 19, 21, 8);
        let (x4, x7) = x.crt_split(4, 7).unwrap();
        assert_eq!(x4, ResidueMatrix::new(4, 1, 3, 1, 0));
        assert_eq!(x7, ResidueMatrix::new(7, 5, 5, 0, 1));
        assert_eq!(ResidueMatrix::crt_join(&x4, &x7).unwrap(), x);
    }

    #[test]
    fn crt_split_rejects_bad_factorizations() {
        let x = ResidueMatrix::new(28, 5, 19, 21, 8);
        assert!(x.crt_split(2, 14).is_err());
        assert!(x.crt_split(4, 6).is_err());
    }

    #[test]
    fn group_orders() {
        // |GL2(Z/m)| for m = 2..10: multiplicative over prime powers;
        // values checked by direct enumeration below for m ≤ 8.
        let expected = [(2, 6), (3, 48), (4, 96), (5, 480), (6, 288), (7, 2016), (8, 1536), (9, 3888), (10, 2880), (12, 4608), (14, 12096), (28, 193536)];
        for (m, n) in expected {
            assert_eq!(gl2_order(m), n, "gl2_order({m})");
        }
        for m in 2..=8u64 {
            let mut count = 0u64;
            for_each_gl2(m, |_| count += 1);
            assert_eq!(count, gl2_order(m), "enumeration mod {m}");
        }
        assert_eq!(sl2_order(2), 6);
        assert_eq!(sl2_order(8), 384);
        assert_eq!(sl2_order(9), 648);
        assert_eq!(sl2_order(28), 16128);
        for m in [2, 6, 12, 28] {
            assert_eq!(gl2_order(m), sl2_order(m) * euler_phi(m));
        }
    }

    #[test]
    fn pack_is_injective_and_ordered() {
        let x = ResidueMatrix::new(12, 3, 1, 4, 1);
        assert_eq!(ResidueMatrix::unpack(12, x.pack()), x);
        let y = ResidueMatrix::new(12, 3, 1, 4, 2);
        assert!(x.pack() < y.pack());
    }
}
