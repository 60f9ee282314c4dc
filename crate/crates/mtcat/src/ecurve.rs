//! Elliptic curves over `Q` from the catalog families.
//!
//! A family with `j`-map `j(t)` and twist `d(t, D)` specializes to the short
//! Weierstrass curve
//!
//! ```text
//! y² = x³ + A x + B,   A = d²·108j/(1728−j),   B = d³·432j/(1728−j),
//! ```
//!
//! which has `j`-invariant `j(t₀)` and absorbs the quadratic twist by `d`.
//! This module computes traces of Frobenius `a_p = p + 1 − #E(F_p)` by
//! exhaustive point counting with a quadratic-residue table, runs trace
//! censuses modulo `m`, and evaluates division polynomials `ψ_n` (`n ≤ 9`)
//! exactly over `Q` to verify the claimed torsion-point factors and the
//! quadratic subfields `Q(√(x₀³ + Ax₀ + B))` they generate.
//!
//! Long Weierstrass models `(a₁, a₂, a₃, a₄, a₆)` are accepted at ingestion
//! so that published `a_p` sequences (which start at `p = 2` on the curve's
//! own minimal model) can be reproduced bit-for-bit.

use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::qpoly::{squarefree_part, QPolyError, RatExpr, UniPoly, Q, Z};

/// Errors from curve specialization and point counting.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EcurveError {
    /// The specialization lands on a pole of `j` or the twist, on
    /// `j ∈ {0, 1728}`, or on a vanishing twist or discriminant.
    #[error("singular specialization: {0}")]
    SingularSpecialization(String),
    /// `a_p` was requested at a prime of bad reduction (or `p ≤ 3` on a
    /// short model).
    #[error("bad prime {0}")]
    BadPrime(u64),
    /// Division polynomials are implemented for `2 ≤ n ≤ 9` only.
    #[error("division polynomial index {0} out of range 2..=9")]
    DivisionPolyIndex(u32),
    /// The point is 2-torsion, so `x₀³ + Ax₀ + B = 0` generates nothing.
    #[error("x-coordinate is 2-torsion")]
    TwoTorsionPoint,
    #[error(transparent)]
    QPoly(#[from] QPolyError),
}

// ---------------------------------------------------------------------------
// curve instances
// ---------------------------------------------------------------------------

/// A specialized curve `y² = x³ + Ax + B` over `Q`.
///
/// Alongside the rational model the instance carries the integral model
/// `(u⁴A, u⁶B)` with `u` the least common denominator, used for reduction
/// mod `p`; `a_p` is model-invariant, so the scaling is harmless at good
/// primes.  Primes dividing `u` or the integral discriminant are classed
/// bad (this may over-count bad primes for non-minimal models, which only
/// ever shrinks a census).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveInstance {
    /// Coefficient `A` of the rational model.
    pub a: Q,
    /// Coefficient `B` of the rational model.
    pub b: Q,
    /// Discriminant `Δ = −16(4A³ + 27B²)` of the rational model.
    pub disc: Q,
    /// The `j`-invariant `1728·4A³/(4A³ + 27B²)`.
    pub j: Q,
    /// Integral model coefficient `u⁴A`.
    ia: Z,
    /// Integral model coefficient `u⁶B`.
    ib: Z,
    /// `u¹²Δ` times `u`: any prime dividing this is treated as bad.
    bad_mask: Z,
}

impl CurveInstance {
    /// Build an instance from a rational short model; errors if singular.
    pub fn from_short(a: Q, b: Q) -> Result<Self, EcurveError> {
        let four_a3 = Q::from_integer(Z::from(4)) * a.pow(3);
        let twenty7_b2 = Q::from_integer(Z::from(27)) * b.pow(2);
        let c = &four_a3 + &twenty7_b2;
        if c.is_zero() {
            return Err(EcurveError::SingularSpecialization("Δ = 0".into()));
        }
        let disc = Q::from_integer(Z::from(-16)) * &c;
        let j = Q::from_integer(Z::from(1728)) * &four_a3 / &c;
        let u = a.denom().lcm(b.denom());
        let u4 = u.pow(4);
        let ia = (&a * Q::from_integer(u4.clone())).to_integer();
        let ib = (&b * Q::from_integer(&u4 * u.pow(2))).to_integer();
        let idisc = -Z::from(16) * (Z::from(4) * ia.pow(3) + Z::from(27) * ib.pow(2));
        let bad_mask = idisc * &u;
        Ok(CurveInstance { a, b, disc, j, ia, ib, bad_mask })
    }

    /// Whether `p` has (possibly only apparently) bad reduction.
    pub fn is_bad(&self, p: u64) -> bool {
        self.bad_mask.is_multiple_of(&Z::from(p))
    }

    /// Squarefree part of the discriminant: `Q(√Δ) = Q(√result)`.
    pub fn sqrt_disc_field(&self) -> Z {
        squarefree_part(&self.disc)
    }

    /// Trace of Frobenius at a good prime `p > 3`, by exhaustive point
    /// counting with a quadratic-residue table.
    pub fn ap(&self, p: u64) -> Result<i64, EcurveError> {
        if p <= 3 || self.is_bad(p) {
            return Err(EcurveError::BadPrime(p));
        }
        let ra = zmod(&self.ia, p);
        let rb = zmod(&self.ib, p);
        let sq = square_table(p);
        let mut n: i64 = 1; // point at infinity
        for x in 0..p {
            let rhs = (mulmod(mulmod(x, x, p), x, p) + mulmod(ra, x, p) + rb) % p;
            n += 1 + chi(rhs, &sq);
        }
        let ap = p as i64 + 1 - n;
        assert!(ap * ap <= 4 * p as i64, "Hasse bound violated at p = {p}");
        Ok(ap)
    }
}

/// Specialize a family given by `j`-map and twist expressions at
/// `(t₀, D₀)`: the curve `y² = x³ + d²·108c·x + d³·432c` with
/// `c = j/(1728−j)` and `d = d(t₀, D₀)`.
pub fn specialize_exprs(
    j: &RatExpr,
    d: &RatExpr,
    t0: &Q,
    d0: &Q,
) -> Result<CurveInstance, EcurveError> {
    let j0 = match j.eval(t0, d0) {
        Ok(v) => v,
        Err(QPolyError::Pole) => {
            return Err(EcurveError::SingularSpecialization("pole of j".into()))
        }
        Err(e) => return Err(e.into()),
    };
    let dv = match d.eval(t0, d0) {
        Ok(v) => v,
        Err(QPolyError::Pole) => {
            return Err(EcurveError::SingularSpecialization("pole of the twist".into()))
        }
        Err(e) => return Err(e.into()),
    };
    if j0.is_zero() || j0 == Q::from_integer(Z::from(1728)) {
        return Err(EcurveError::SingularSpecialization(format!("j = {j0}")));
    }
    if dv.is_zero() {
        return Err(EcurveError::SingularSpecialization("twist vanishes".into()));
    }
    let c = &j0 / (Q::from_integer(Z::from(1728)) - &j0);
    let a = dv.pow(2) * Q::from_integer(Z::from(108)) * &c;
    let b = dv.pow(3) * Q::from_integer(Z::from(432)) * &c;
    CurveInstance::from_short(a, b)
}

// ---------------------------------------------------------------------------
// long Weierstrass models
// ---------------------------------------------------------------------------

/// A long Weierstrass model `y² + a₁xy + a₃y = x³ + a₂x² + a₄x + a₆`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongCurve {
    pub a1: Z,
    pub a2: Z,
    pub a3: Z,
    pub a4: Z,
    pub a6: Z,
}

impl LongCurve {
    pub fn new(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Self {
        LongCurve {
            a1: Z::from(a1),
            a2: Z::from(a2),
            a3: Z::from(a3),
            a4: Z::from(a4),
            a6: Z::from(a6),
        }
    }

    /// Discriminant of the long model.
    pub fn discriminant(&self) -> Z {
        let b2 = &self.a1 * &self.a1 + Z::from(4) * &self.a2;
        let b4 = Z::from(2) * &self.a4 + &self.a1 * &self.a3;
        let b6 = &self.a3 * &self.a3 + Z::from(4) * &self.a6;
        let b8 = &self.a1 * &self.a1 * &self.a6 + Z::from(4) * &self.a2 * &self.a6
            - &self.a1 * &self.a3 * &self.a4
            + &self.a2 * &self.a3 * &self.a3
            - &self.a4 * &self.a4;
        -&b2 * &b2 * &b8 - Z::from(8) * b4.pow(3) - Z::from(27) * &b6 * &b6
            + Z::from(9) * &b2 * &b4 * &b6
    }

    /// Whether `p` divides the long-model discriminant.
    pub fn is_bad(&self, p: u64) -> bool {
        self.discriminant().is_multiple_of(&Z::from(p))
    }

    /// The `Q`-isomorphic short model `y² = x³ − 27c₄x − 54c₆`.
    pub fn to_short(&self) -> Result<CurveInstance, EcurveError> {
        let b2 = &self.a1 * &self.a1 + Z::from(4) * &self.a2;
        let b4 = Z::from(2) * &self.a4 + &self.a1 * &self.a3;
        let b6 = &self.a3 * &self.a3 + Z::from(4) * &self.a6;
        let c4 = &b2 * &b2 - Z::from(24) * &b4;
        let c6 = -b2.pow(3) + Z::from(36) * &b2 * &b4 - Z::from(216) * &b6;
        CurveInstance::from_short(
            Q::from_integer(Z::from(-27) * c4),
            Q::from_integer(Z::from(-54) * c6),
        )
    }

    /// Trace of Frobenius at any good prime, including `p ∈ {2, 3}`, by
    /// counting the solutions of `y² + (a₁x + a₃)y = x³ + a₂x² + a₄x + a₆`
    /// for each `x` (root count of the quadratic in `y`).
    pub fn ap(&self, p: u64) -> Result<i64, EcurveError> {
        if self.is_bad(p) {
            return Err(EcurveError::BadPrime(p));
        }
        let (ra1, ra2, ra3, ra4, ra6) =
            (zmod(&self.a1, p), zmod(&self.a2, p), zmod(&self.a3, p), zmod(&self.a4, p), zmod(&self.a6, p));
        let mut n: i64 = 1; // point at infinity
        if p == 2 {
            for x in 0..2u64 {
                let rhs = (x + ra2 * x + ra4 * x + ra6) % 2;
                let lin = (ra1 * x + ra3) % 2;
                for y in 0..2u64 {
                    if (y * y + lin * y) % 2 == rhs {
                        n += 1;
                    }
                }
            }
        } else {
            let sq = square_table(p);
            for x in 0..p {
                let x2 = mulmod(x, x, p);
                let rhs =
                    (mulmod(x2, x, p) + mulmod(ra2, x2, p) + mulmod(ra4, x, p) + ra6) % p;
                let lin = (mulmod(ra1, x, p) + ra3) % p;
                // complete the square: y² + lin·y − rhs has
                // 1 + χ(lin² + 4·rhs) roots
                let disc = (mulmod(lin, lin, p) + 4 * rhs) % p;
                n += 1 + chi(disc, &sq);
            }
        }
        let ap = p as i64 + 1 - n;
        assert!((ap * ap) as u64 <= 4 * p, "Hasse bound violated at p = {p}");
        Ok(ap)
    }
}

// ---------------------------------------------------------------------------
// censuses
// ---------------------------------------------------------------------------

/// Residue counts of `a_p mod m` over a range of good primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceCensus {
    /// The census modulus `m`.
    pub modulus: u64,
    /// Primes up to this bound were scanned.
    pub bound: u64,
    /// `counts[r]` = number of scanned primes with `a_p ≡ r (mod m)`.
    pub counts: Vec<u64>,
    /// `a_p mod m` in ascending order of `p`.
    pub sequence: Vec<u64>,
}

impl TraceCensus {
    /// Residues mod `m` that never occurred.
    pub fn missing(&self) -> Vec<u64> {
        (0..self.modulus).filter(|&r| self.counts[r as usize] == 0).collect()
    }

    fn from_sequence(modulus: u64, bound: u64, sequence: Vec<u64>) -> Self {
        let mut counts = vec![0u64; modulus as usize];
        for &r in &sequence {
            counts[r as usize] += 1;
        }
        TraceCensus { modulus, bound, counts, sequence }
    }
}

/// Census of `a_p mod m` for a short-model instance over good primes
/// `5 ≤ p ≤ bound` with `p ∤ m` (the range where the mod-`m` Galois
/// constraint on Frobenius applies and the short model counts reliably).
pub fn trace_census(curve: &CurveInstance, m: u64, bound: u64) -> TraceCensus {
    assert!(m >= 2);
    let residues: Vec<u64> = primes_up_to(bound)
        .into_par_iter()
        .filter(|&p| p > 3 && m % p != 0 && !curve.is_bad(p))
        .map(|p| curve.ap(p).unwrap().rem_euclid(m as i64) as u64)
        .collect();
    TraceCensus::from_sequence(m, bound, residues)
}

/// Census of `a_p mod m` for a long model over all its good primes,
/// starting at `p = 2` — the form in which published sequences are quoted.
pub fn ap_scan(curve: &LongCurve, m: u64, bound: u64) -> TraceCensus {
    assert!(m >= 2);
    let residues: Vec<u64> = primes_up_to(bound)
        .into_par_iter()
        .filter(|&p| !curve.is_bad(p))
        .map(|p| curve.ap(p).unwrap().rem_euclid(m as i64) as u64)
        .collect();
    TraceCensus::from_sequence(m, bound, residues)
}

// ---------------------------------------------------------------------------
// division polynomials and torsion factors
// ---------------------------------------------------------------------------

/// The `n`-th division polynomial of the curve, `2 ≤ n ≤ 9`, as a
/// polynomial in `x`: `ψ_n` itself for odd `n`, and the standard `ψ_n/y`
/// for even `n` (so `ψ₂ ↦ 2`).  Roots are the `x`-coordinates of the
/// nontrivial `n`-torsion.
pub fn division_poly(curve: &CurveInstance, n: u32) -> Result<UniPoly, EcurveError> {
    if !(2..=9).contains(&n) {
        return Err(EcurveError::DivisionPolyIndex(n));
    }
    Ok(division_polys(&curve.a, &curve.b, n as usize)[n as usize].clone())
}

/// `p[k]` such that `ψ_k = p[k]` for odd `k` and `ψ_k = p[k]·y` for even
/// `k`, with `y² = x³ + ax + b`, via the doubling recurrences.
fn division_polys(a: &Q, b: &Q, nmax: usize) -> Vec<UniPoly> {
    let qi = |n: i64| Q::from_integer(Z::from(n));
    let f = UniPoly::from_coeffs(vec![b.clone(), a.clone(), Q::zero(), Q::one()]);
    let f2 = f.mul(&f);
    let a2 = a * a;
    let mut p: Vec<UniPoly> = vec![
        UniPoly::zero(),
        UniPoly::one(),
        UniPoly::constant(qi(2)),
        // ψ₃ = 3x⁴ + 6ax² + 12bx − a²
        UniPoly::from_coeffs(vec![-&a2, qi(12) * b, qi(6) * a, Q::zero(), qi(3)]),
        // ψ₄/y = 4(x⁶ + 5ax⁴ + 20bx³ − 5a²x² − 4abx − 8b² − a³)
        UniPoly::from_coeffs(vec![
            qi(-8) * b * b - a.pow(3),
            qi(-4) * (a * b),
            qi(-5) * &a2,
            qi(20) * b,
            qi(5) * a,
            Q::zero(),
            Q::one(),
        ])
        .mul_scalar(&qi(4)),
    ];
    for n in 5..=nmax {
        let m = n / 2;
        let next = if n % 2 == 1 {
            // ψ_{2m+1} = ψ_{m+2}ψ_m³ − ψ_{m−1}ψ_{m+1}³; the term whose
            // factors have even index carries y⁴ = f²
            let t1 = p[m + 2].mul(&p[m].pow(3));
            let t2 = p[m - 1].mul(&p[m + 1].pow(3));
            if m % 2 == 0 {
                t1.mul(&f2).sub(&t2)
            } else {
                t1.sub(&t2.mul(&f2))
            }
        } else {
            // ψ_{2m}/y = ψ_m(ψ_{m+2}ψ_{m−1}² − ψ_{m−2}ψ_{m+1}²)/(2y²·y⁻¹…)
            // reduces to p_m(p_{m+2}p_{m−1}² − p_{m−2}p_{m+1}²)/2 for
            // either parity of m
            let inner = p[m + 2].mul(&p[m - 1].pow(2)).sub(&p[m - 2].mul(&p[m + 1].pow(2)));
            p[m].mul(&inner).mul_scalar(&Q::new(Z::one(), Z::from(2)))
        };
        p.push(next);
    }
    p
}

/// Verify that a claimed monic degree-`k` factor (coefficients
/// `c₀, …, c_{k−1}` as expressions in `t, D`) divides the `n`-th division
/// polynomial of the *generic* family curve
/// `y² = x³ + D²·108c·x + D³·432c`, `c = j(t)/(1728 − j(t))`,
/// exactly at every sample `(t₀, D₀)`.
pub fn verify_torsion_factor(
    j: &RatExpr,
    n: u32,
    factor_low_coeffs: &[RatExpr],
    samples: &[(Q, Q)],
) -> Result<bool, EcurveError> {
    let free_twist = RatExpr::var_d();
    for (t0, d0) in samples {
        let curve = specialize_exprs(j, &free_twist, t0, d0)?;
        let psi = division_poly(&curve, n)?;
        let mut coeffs: Vec<Q> = Vec::with_capacity(factor_low_coeffs.len() + 1);
        for c in factor_low_coeffs {
            coeffs.push(c.eval(t0, d0)?);
        }
        coeffs.push(Q::one());
        let factor = UniPoly::from_coeffs(coeffs);
        if !psi.divides(&factor) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The quadratic subfield `Q(y₀) = Q(√(x₀³ + Ax₀ + B))` generated by the
/// `y`-coordinate over a rational torsion `x`-coordinate, as a squarefree
/// integer.
pub fn quad_subfield_of_point(curve: &CurveInstance, x0: &Q) -> Result<Z, EcurveError> {
    let v = x0.pow(3) + &curve.a * x0 + &curve.b;
    if v.is_zero() {
        return Err(EcurveError::TwoTorsionPoint);
    }
    Ok(squarefree_part(&v))
}

// ---------------------------------------------------------------------------
// small helpers
// ---------------------------------------------------------------------------

/// Primes `≤ n` by sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut is_p = vec![true; n + 1];
    is_p[0] = false;
    is_p[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is_p[i] {
            for j in (i * i..=n).step_by(i) {
                is_p[j] = false;
            }
        }
        i += 1;
    }
    (2..=n as u64).filter(|&k| is_p[k as usize]).collect()
}

fn zmod(z: &Z, p: u64) -> u64 {
    use num_traits::ToPrimitive;
    z.mod_floor(&Z::from(p)).to_u64().unwrap()
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Table of nonzero squares mod `p`.
fn square_table(p: u64) -> Vec<bool> {
    let mut sq = vec![false; p as usize];
    for y in 1..p {
        sq[mulmod(y, y, p) as usize] = true;
    }
    sq
}

/// Quadratic character: `χ(0) = 0`, `+1` on squares, `−1` otherwise.
fn chi(v: u64, sq: &[bool]) -> i64 {
    if v == 0 {
        0
    } else if sq[v as usize] {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::parse_expr;

    fn q(n: i64) -> Q {
        Q::from_integer(Z::from(n))
    }
    fn qr(n: i64, d: i64) -> Q {
        Q::new(Z::from(n), Z::from(d))
    }

    #[test]
    fn ap_small_known_curve() {
        // y² = x³ + x over F₅ has 4 points, so a₅ = 2
        let e = CurveInstance::from_short(q(1), q(0)).unwrap();
        assert_eq!(e.ap(5).unwrap(), 2);
        // y² = x³ − x: Δ = 64, squarefree part 1, bad only at 2
        let e2 = CurveInstance::from_short(q(-1), q(0)).unwrap();
        assert_eq!(e2.sqrt_disc_field(), Z::from(1));
        assert!(e2.is_bad(2));
        assert!(!e2.is_bad(5));
        // supersingular at p ≡ 3 mod 4
        assert_eq!(e2.ap(7).unwrap(), 0);
        assert_eq!(e2.ap(3), Err(EcurveError::BadPrime(3)));
    }

    #[test]
    fn ap_model_invariance() {
        // (A, B) ↦ (u⁴A, u⁶B) and the long form give the same a_p
        let e = CurveInstance::from_short(q(-2), q(3)).unwrap();
        let scaled = CurveInstance::from_short(qr(-2, 81), qr(3, 729)).unwrap();
        let long = LongCurve::new(0, 0, 0, -2, 3);
        for p in primes_up_to(60) {
            if e.is_bad(p) || p <= 3 {
                continue;
            }
            let ap = e.ap(p).unwrap();
            assert_eq!(scaled.ap(p).unwrap(), ap, "scaled model at {p}");
            assert_eq!(long.ap(p).unwrap(), ap, "long model at {p}");
        }
    }

    #[test]
    fn specialize_and_singularities() {
        let j3 = parse_expr("27*(t+1)*(t+9)^3/t^3").unwrap();
        let d = RatExpr::var_d();
        let e = specialize_exprs(&j3, &d, &q(1), &q(1)).unwrap();
        assert_eq!(e.j, q(54000));
        // pole of j at t = 0
        assert!(matches!(
            specialize_exprs(&j3, &d, &q(0), &q(1)),
            Err(EcurveError::SingularSpecialization(_))
        ));
        // j = 0 at t = −1
        assert!(matches!(
            specialize_exprs(&j3, &d, &q(-1), &q(1)),
            Err(EcurveError::SingularSpecialization(_))
        ));
        // vanishing twist
        assert!(matches!(
            specialize_exprs(&j3, &d, &q(1), &q(0)),
            Err(EcurveError::SingularSpecialization(_))
        ));
    }

    #[test]
    fn division_poly_shapes() {
        let e = CurveInstance::from_short(q(-2), q(3)).unwrap();
        // textbook ψ₃ = 3x⁴ + 6Ax² + 12Bx − A²
        assert_eq!(
            division_poly(&e, 3).unwrap(),
            UniPoly::from_coeffs(vec![q(-4), q(36), q(-12), q(0), q(3)])
        );
        // degrees: (n²−1)/2 for odd n, (n²−4)/2 for even n (ψ_n/y form)
        for (n, deg) in [(2u32, 0usize), (3, 4), (4, 6), (5, 12), (6, 16), (7, 24), (8, 30), (9, 40)]
        {
            assert_eq!(division_poly(&e, n).unwrap().degree(), Some(deg), "ψ_{n}");
        }
        assert_eq!(division_poly(&e, 1), Err(EcurveError::DivisionPolyIndex(1)));
        assert_eq!(division_poly(&e, 10), Err(EcurveError::DivisionPolyIndex(10)));
        // 3-torsion divides 6- and 9-torsion: ψ₃ | ψ₆/y and ψ₃ | ψ₉
        let psi3 = division_poly(&e, 3).unwrap();
        assert!(division_poly(&e, 6).unwrap().divides(&psi3));
        assert!(division_poly(&e, 9).unwrap().divides(&psi3));
        // ψ₂ convention
        assert_eq!(division_poly(&e, 2).unwrap(), UniPoly::constant(q(2)));
    }

    #[test]
    fn torsion_point_on_known_curve() {
        // (0, 2) is a 3-torsion point of y² = x³ + 4
        let e = CurveInstance::from_short(q(0), q(4)).unwrap();
        let psi3 = division_poly(&e, 3).unwrap();
        assert!(psi3.eval(&q(0)).is_zero());
        assert_eq!(quad_subfield_of_point(&e, &q(0)).unwrap(), Z::from(1));
        // a 2-torsion x-coordinate is rejected
        let e2 = CurveInstance::from_short(q(-1), q(0)).unwrap();
        assert_eq!(quad_subfield_of_point(&e2, &q(1)), Err(EcurveError::TwoTorsionPoint));
    }

    #[test]
    fn census_of_three_torsion_family() {
        // a specialization with rational 3-torsion has 3 | #E(F_p), i.e.
        // a_p ≡ p + 1 mod 3, so residue 1 mod 3 never occurs
        let j3 = parse_expr("27*(t+1)*(t+9)^3/t^3").unwrap();
        let d3 = parse_expr("6*(t+1)*(t+9)/(t^2-18*t-27)").unwrap();
        let e = specialize_exprs(&j3, &d3, &q(1), &q(1)).unwrap();
        let census = trace_census(&e, 3, 500);
        assert!(census.counts[0] > 0 && census.counts[2] > 0);
        assert_eq!(census.missing(), vec![1]);
        assert_eq!(
            census.sequence.len() as u64,
            census.counts.iter().sum::<u64>()
        );
    }

    #[test]
    fn torsion_factor_generic_family() {
        // the 3-division polynomial of the generic level-3 family curve has
        // the rational root 18D(t+1)(t+9)/(t²−18t−27)
        let j3 = parse_expr("27*(t+1)*(t+9)^3/t^3").unwrap();
        let x0 = parse_expr("18*D*(t+1)*(t+9)/(t^2-18*t-27)").unwrap();
        let factor = [x0.neg()]; // x − x₀
        let samples = [(q(1), q(1)), (q(2), q(-1)), (q(5), q(2))];
        assert!(verify_torsion_factor(&j3, 3, &factor, &samples).unwrap());
        // negative control: perturb the constant term
        let bad = [x0.neg().add(&RatExpr::from_int(1))];
        assert!(!verify_torsion_factor(&j3, 3, &bad, &samples).unwrap());
    }

    #[test]
    fn long_model_scan_includes_small_primes() {
        // y² + y = x³ − x² (conductor 11): good at 2 and 3,
        // a₂ = −2, a₃ = −1
        let e = LongCurve::new(0, -1, 1, 0, 0);
        assert!(e.is_bad(11));
        assert_eq!(e.ap(2).unwrap(), -2);
        assert_eq!(e.ap(3).unwrap(), -1);
        let scan = ap_scan(&e, 5, 30);
        // primes 2,3,5,7,13,17,19,23,29 (11 bad): a_p = −2,−1,1,−2,4,−2,0,−1,0
        assert_eq!(scan.sequence, vec![3, 4, 1, 3, 4, 3, 0, 4, 0]);
    }
}
