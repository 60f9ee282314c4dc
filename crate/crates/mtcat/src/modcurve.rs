//! Genus of the modular curve `X_G` and a rational-point criterion.
//!
//! For `G ≤ GL₂(Z/m)` with full determinant, the curve `X_G` is determined
//! by `±S := ⟨G, -I⟩ ∩ SL₂(Z/m)`, acting on the upper half plane through
//! `PSL₂(Z)`.  The genus comes from the Riemann–Hurwitz count over `X(1)`:
//!
//! ```text
//! g = 1 + μ/12 − ν₂/4 − ν₃/3 − ν_∞/2
//! ```
//!
//! where `μ` is the index of `±S` in `SL₂(Z/m)` (equal to the `PSL₂` index
//! since `-I ∈ ±S`), `ν₂`/`ν₃` count elliptic points of order 2/3, and
//! `ν_∞` counts cusps.  The cosets of `±S` are enumerated by a breadth-first
//! walk under the standard generators — the ambient `SL₂(Z/m)` is never
//! materialized.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grouplat::{GroupError, SubgroupSpec};
use crate::modarith::{factorize, for_each_gl2, sl2_order, ResidueMatrix};

/// Errors from modular-curve computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModCurveError {
    /// The rational-point criterion only applies at prime-power level.
    #[error("modulus {0} is not a prime power")]
    NotPrimePowerLevel(u64),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Ramification data and genus of `X_G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusReport {
    /// Index `μ = [PSL₂(Z) : ±S]`.
    pub mu: u64,
    /// Elliptic points of order 2.
    pub nu2: u64,
    /// Elliptic points of order 3.
    pub nu3: u64,
    /// Number of cusps `ν_∞`.
    pub cusps: u64,
    /// Genus of `X_G`.
    pub genus: u64,
}

impl GenusReport {
    /// The Riemann–Hurwitz invariant `12(g−1) + 3ν₂ + 4ν₃ + 6ν_∞ = μ`,
    /// which every report must satisfy.
    pub fn invariant_holds(&self) -> bool {
        12 * (self.genus as i64 - 1) + 3 * self.nu2 as i64 + 4 * self.nu3 as i64
            + 6 * self.cusps as i64
            == self.mu as i64
    }
}

/// Genus and ramification of `X_G` for `G ≤ GL₂(Z/m)`.
pub fn genus(group: &SubgroupSpec) -> Result<GenusReport, ModCurveError> {
    let m = group.modulus();
    let h = group.adjoin_minus_identity()?;
    let s = h.sl2_part()?;
    let s_elems: Vec<ResidueMatrix> = s.elements()?;
    let s_order = s_elems.len() as u64;

    // canonical key of the coset ±S·x
    let coset_key = |x: &ResidueMatrix| -> u64 {
        s_elems.iter().map(|se| se.mat_mul(x).pack()).min().unwrap()
    };

    let gen_s = ResidueMatrix::new(m, 0, -1, 1, 0); // order-4 lift of the order-2 elliptic element
    let gen_t = ResidueMatrix::new(m, 1, 1, 0, 1); // the cusp translation
    let gen_e3 = ResidueMatrix::new(m, 0, -1, 1, 1); // order-6 lift of the order-3 elliptic element

    // enumerate cosets by BFS under right multiplication (S and T generate SL₂(Z/m))
    let id = ResidueMatrix::identity(m);
    let mut reps: Vec<ResidueMatrix> = vec![id];
    let mut index: HashMap<u64, usize> = HashMap::new();
    index.insert(coset_key(&id), 0);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in [&gen_s, &gen_t] {
            let y = x.mat_mul(g);
            let k = coset_key(&y);
            if !index.contains_key(&k) {
                index.insert(k, reps.len());
                reps.push(y);
                frontier.push(y);
            }
        }
    }
    let mu = reps.len() as u64;
    debug_assert_eq!(mu * s_order, sl2_order(m));

    let act = |i: usize, g: &ResidueMatrix| -> usize { index[&coset_key(&reps[i].mat_mul(g))] };

    let nu2 = (0..reps.len()).filter(|&i| act(i, &gen_s) == i).count() as u64;
    let nu3 = (0..reps.len()).filter(|&i| act(i, &gen_e3) == i).count() as u64;

    let mut seen = vec![false; reps.len()];
    let mut cusps = 0u64;
    for i in 0..reps.len() {
        if seen[i] {
            continue;
        }
        cusps += 1;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = act(j, &gen_t);
        }
    }

    let num = 12i64 + mu as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * cusps as i64;
    assert!(num >= 0 && num % 12 == 0, "non-integral genus: mu={mu} nu2={nu2} nu3={nu3} cusps={cusps}");
    let report = GenusReport { mu, nu2, nu3, cusps, genus: (num / 12) as u64 };
    debug_assert!(report.invariant_holds());
    Ok(report)
}

/// Rational-point criterion at prime-power level: `X_G` (for `G` of
/// prime-power level with `X_G ≅ P¹` a genus-zero curve) has a rational
/// point iff `G̃ = ⟨G, -I⟩` contains an element conjugate in `GL₂(Z/m)` to
/// `[[1,0],[0,-1]]` or `[[1,1],[0,-1]]`.
pub fn sz_rational_point_test(group: &SubgroupSpec) -> Result<bool, ModCurveError> {
    let m = group.modulus();
    if factorize(m).len() != 1 {
        return Err(ModCurveError::NotPrimePowerLevel(m));
    }
    let h = group.adjoin_minus_identity()?;
    let targets = [ResidueMatrix::new(m, 1, 0, 0, -1), ResidueMatrix::new(m, 1, 1, 0, -1)];
    // collect the two conjugation orbits and intersect with G̃
    let mut orbit: std::collections::HashSet<u64> = std::collections::HashSet::new();
    for_each_gl2(m, |g| {
        let gi = g.mat_inv().unwrap();
        for t in &targets {
            orbit.insert(g.mat_mul(t).mat_mul(&gi).pack());
        }
    });
    for k in h.element_keys()? {
        if orbit.contains(&k) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Classical genus of `X₀(N)` from the standard index/elliptic/cusp
    /// counts (independent oracle).
    fn x0_genus_classical(n: u64) -> (u64, u64, u64, u64, u64) {
        let fac = factorize(n);
        let mut mu = n;
        for (p, _) in &fac {
            mu = mu / p * (p + 1);
        }
        let nu2 = if n % 4 == 0 {
            0
        } else {
            fac.iter()
                .map(|(p, _)| match p % 4 {
                    1 => 2,
                    3 => 0,
                    _ => 1, // p = 2
                })
                .product()
        };
        let nu3 = if n % 9 == 0 {
            0
        } else {
            fac.iter()
                .map(|(p, _)| match p % 3 {
                    1 => 2,
                    2 => 0,
                    _ => 1, // p = 3
                })
                .product()
        };
        let mut cusps = 0u64;
        for d in crate::modarith::divisors(n) {
            cusps += crate::modarith::euler_phi(num_integer::Integer::gcd(&d, &(n / d)));
        }
        let num = 12 + mu as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * cusps as i64;
        (mu, nu2, nu3, cusps, (num / 12) as u64)
    }

    #[test]
    fn x0_oracle_small() {
        for n in 2..=30u64 {
            let b = SubgroupSpec::borel(n);
            let r = genus(&b).unwrap();
            let (mu, nu2, nu3, cusps, g) = x0_genus_classical(n);
            assert_eq!((r.mu, r.nu2, r.nu3, r.cusps, r.genus), (mu, nu2, nu3, cusps, g), "X0({n})");
            assert!(r.invariant_holds());
        }
    }

    #[test]
    fn full_level_curves() {
        // X(1) via the full group: genus 0, one cusp
        let full = SubgroupSpec::full_gl2(2);
        // the full group mod 2 gives X(1) data? no: ±S = SL2(Z/2), mu = 1
        let r = genus(&full).unwrap();
        assert_eq!((r.mu, r.genus), (1, 0));
        // X(5): mu=60, nu2=nu3=0, 12 cusps, genus 0 — use the scalar subgroup
        // (its SL2-part is trivial, ±S = {±I})
        let scal = SubgroupSpec::new(
            5,
            vec![ResidueMatrix::new(5, 2, 0, 0, 2)],
        )
        .unwrap();
        let r5 = genus(&scal).unwrap();
        assert_eq!((r5.mu, r5.nu2, r5.nu3, r5.cusps, r5.genus), (60, 0, 0, 12, 0));
        // X(7): mu=168, 24 cusps, genus 3
        let scal7 = SubgroupSpec::new(7, vec![ResidueMatrix::new(7, 3, 0, 0, 3)]).unwrap();
        let r7 = genus(&scal7).unwrap();
        assert_eq!((r7.mu, r7.nu2, r7.nu3, r7.cusps, r7.genus), (168, 0, 0, 24, 3));
    }

    #[test]
    fn rational_point_test_requires_prime_power() {
        let b6 = SubgroupSpec::borel(6);
        assert_eq!(sz_rational_point_test(&b6), Err(ModCurveError::NotPrimePowerLevel(6)));
    }

    #[test]
    fn rational_point_test_borel() {
        // X0(8) has rational points (e.g. cusps), and the Borel contains
        // [[1,0],[0,-1]] itself.
        let b8 = SubgroupSpec::borel(8);
        assert!(sz_rational_point_test(&b8).unwrap());
    }
}
