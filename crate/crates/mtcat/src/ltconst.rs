//! Truncated Lang–Trotter constants.
//!
//! For an elliptic curve `E/Q` with mod-`m_E` image `G` and a fixed trace
//! `r`, the Lang–Trotter constant factors as
//!
//! ```text
//! C_{E,r} = (2/π) · (m_E·|G_r| / |G|) · ∏_{ℓ ∤ m_E} ℓ·|GL₂(F_ℓ)_r| / |GL₂(F_ℓ)|
//! ```
//!
//! where `H_r` denotes the trace-`r` fiber `{g ∈ H : tr g ≡ r}`.  The
//! constant vanishes exactly when some reduction of `G` has an empty trace
//! fiber at `r` — the missing-trace condition.  This module computes the
//! fiber counts in `GL₂(F_ℓ)` exactly by enumeration, assembles truncated
//! products over `ℓ ≤ L` as exact rationals, and only at the end applies the
//! `2/π` prefactor through a high-precision rational approximation of `π`.

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::grouplat::{GroupError, SubgroupSpec};
use crate::modarith::{divisors, gl2_order};
use crate::mtclassify::{trace_fiber, trace_set, ClassifyError};
use crate::qpoly::{Q, Z};

/// Largest prime at which `GL₂(F_ℓ)` fibers are enumerated.
pub const PRIME_CAP: u64 = 97;

/// Errors from Lang–Trotter computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtError {
    /// Enumeration is capped at `ℓ ≤ 97`.
    #[error("prime {0} exceeds the enumeration cap {PRIME_CAP}")]
    PrimeTooLarge(u64),
    /// The modulus passed as `ℓ` is not prime.
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// `|{g ∈ GL₂(F_ℓ) : tr g ≡ r}|` by exhaustive enumeration (`ℓ ≤ 97`).
pub fn gl2_trace_count(l: u64, r: u64) -> Result<u64, LtError> {
    if l > PRIME_CAP {
        return Err(LtError::PrimeTooLarge(l));
    }
    let fac = crate::modarith::factorize(l);
    if l < 2 || fac.len() != 1 || fac[0].1 != 1 {
        return Err(LtError::NotPrime(l));
    }
    let r = r % l;
    let mut count = 0u64;
    for a in 0..l {
        let d = (r + l - a) % l;
        let ad = (a * d) % l;
        for b in 0..l {
            for c in 0..l {
                if ad != (b * c) % l {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// The Euler factor `ℓ·|GL₂(F_ℓ)_r| / |GL₂(F_ℓ)|`.
pub fn euler_factor(l: u64, r: u64) -> Result<Q, LtError> {
    let count = gl2_trace_count(l, r)?;
    Ok(Q::new(Z::from(l * count), Z::from(gl2_order(l))))
}

/// The factored truncated constant, with exact rationals rendered as
/// decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LtFactorization {
    /// The level `m_E` (taken as the `GL₂`-level of the supplied group).
    pub level: u64,
    /// The trace `r`, reduced mod `level`.
    pub r: u64,
    /// `m_E·|G(m_E)_r| / |G(m_E)|` as an exact fraction string.
    pub group_ratio: String,
    /// Per-prime factors `(ℓ, ℓ·|GL₂(F_ℓ)_r|/|GL₂(F_ℓ)|)` for `ℓ ∤ m_E`.
    pub euler_factors: Vec<(u64, String)>,
    /// `(2/π)·group_ratio·∏ factors` at 30 significant digits.
    pub truncated_value: String,
    /// Whether the constant is exactly zero: some divisor `d | m_E` has no
    /// trace `≡ r mod d` in the reduced group.
    pub zero: bool,
}

/// Truncated Lang–Trotter constant for the mod-`m_E` image `G` at trace
/// `r`, over primes `ℓ ≤ l_bound`, `ℓ ∤ m_E` (the identification
/// `m_E := gl2_level(G)` is used throughout).
pub fn lt_truncated(g: &SubgroupSpec, r: u64, l_bound: u64) -> Result<LtFactorization, LtError> {
    if l_bound > PRIME_CAP + 3 {
        return Err(LtError::PrimeTooLarge(l_bound));
    }
    let level = g.gl2_level()?;
    let gm = g.reduce(level)?;
    let r = r % level;
    let fiber = trace_fiber(&gm, r)?;
    let order = gm.order()?;
    let group_ratio = Q::new(Z::from(level * fiber.elements.len() as u64), Z::from(order));

    let mut euler_factors = Vec::new();
    let mut product = group_ratio.clone();
    for l in crate::ecurve::primes_up_to(l_bound) {
        if level % l == 0 {
            continue;
        }
        let f = euler_factor(l, r)?;
        product *= &f;
        euler_factors.push((l, format_fraction(&f)));
    }

    let zero = divisors(level)
        .into_iter()
        .filter(|&d| d >= 2)
        .any(|d| !trace_set(&gm, d).map(|s| s.contains(&(r % d))).unwrap_or(true));

    let value = product * two_over_pi();
    Ok(LtFactorization {
        level,
        r,
        group_ratio: format_fraction(&group_ratio),
        euler_factors,
        truncated_value: format_significant(&value, 30),
        zero,
    })
}

/// Exact fraction rendering `num/den` (or just `num` when integral).
pub fn format_fraction(q: &Q) -> String {
    if q.denom() == &Z::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A rational approximation of `2/π` accurate to 48 decimal digits.
fn two_over_pi() -> Q {
    // π to 49 significant digits
    let pi_num: Z = "31415926535897932384626433832795028841971693993751".parse().unwrap();
    let pow: Z = Z::from(10).pow(49);
    Q::new(Z::from(2) * pow, pi_num)
}

/// Decimal rendering of `q` rounded to `sig` significant digits.
pub fn format_significant(q: &Q, sig: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.is_negative();
    let n = q.numer().abs();
    let d = q.denom().clone();
    let mut k = sig as i64 - 1 - (n.to_string().len() as i64 - d.to_string().len() as i64);
    loop {
        let (num, den) = if k >= 0 {
            (&n * Z::from(10).pow(k as u32), d.clone())
        } else {
            (n.clone(), &d * Z::from(10).pow((-k) as u32))
        };
        let scaled = (Z::from(2) * num + &den) / (Z::from(2) * &den); // round to nearest
        let s = scaled.to_string();
        if s.len() > sig {
            k -= 1;
            continue;
        }
        if s.len() < sig {
            k += 1;
            continue;
        }
        // value = scaled · 10^(−k)
        let int_digits = sig as i64 - k;
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if int_digits <= 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat('0').take((-int_digits) as usize));
            out.push_str(&s);
        } else if int_digits as usize >= sig {
            out.push_str(&s);
            out.extend(std::iter::repeat('0').take(int_digits as usize - sig));
        } else {
            out.push_str(&s[..int_digits as usize]);
            out.push('.');
            out.push_str(&s[int_digits as usize..]);
        }
        return out;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::ResidueMatrix;

    #[test]
    fn trace_counts_small() {
        // GL₂(F₂): 4 of the 6 elements have trace 0
        assert_eq!(gl2_trace_count(2, 0).unwrap(), 4);
        assert_eq!(gl2_trace_count(2, 1).unwrap(), 2);
        for l in [2u64, 3, 5, 7, 11] {
            let total: u64 = (0..l).map(|r| gl2_trace_count(l, r).unwrap()).sum();
            assert_eq!(total, gl2_order(l), "partition of GL₂(F_{l})");
        }
        assert_eq!(gl2_trace_count(101, 0), Err(LtError::PrimeTooLarge(101)));
        assert_eq!(gl2_trace_count(6, 0), Err(LtError::NotPrime(6)));
    }

    #[test]
    fn euler_factor_values() {
        assert_eq!(euler_factor(2, 0).unwrap(), Q::new(Z::from(4), Z::from(3)));
        // every factor is positive, and fluctuates by at most ~1/ℓ
        for l in crate::ecurve::primes_up_to(97) {
            for r in [0u64, 1, 2] {
                let f = euler_factor(l, r).unwrap();
                assert!(f.is_positive(), "ℓ = {l}, r = {r}");
                let dev = (f - Q::new(Z::from(1), Z::from(1))).abs();
                assert!(dev <= Q::new(Z::from(3), Z::from(l * l)), "ℓ = {l}, r = {r}");
            }
        }
    }

    #[test]
    fn truncated_full_group_positive() {
        // the full group has GL₂-level 1: every fiber is full
        let g = SubgroupSpec::full_gl2(2);
        let f = lt_truncated(&g, 1, 50).unwrap();
        assert!(!f.zero);
        assert_eq!((f.level, f.group_ratio.as_str()), (1, "1"));
        assert_ne!(f.truncated_value, "0");
        // Borel(2) = {I, [[1,1],[0,1]]} has trace set {0}: ratio 2 at r = 0
        let b2 = SubgroupSpec::borel(2);
        let f0 = lt_truncated(&b2, 0, 50).unwrap();
        assert!(!f0.zero);
        assert_eq!((f0.level, f0.group_ratio.as_str()), (2, "2"));
    }

    #[test]
    fn truncated_missing_trace_zero() {
        // the level-3 missing-trace group omits trace 1
        let g = SubgroupSpec::new(
            3,
            vec![ResidueMatrix::new(3, 1, 1, 0, 1), ResidueMatrix::new(3, 1, 0, 0, 2)],
        )
        .unwrap();
        let f = lt_truncated(&g, 1, 50).unwrap();
        assert!(f.zero);
        assert_eq!(f.group_ratio, "0");
        assert_eq!(f.truncated_value, "0");
        // the same group has nonzero constant at trace 0
        let f0 = lt_truncated(&g, 0, 50).unwrap();
        assert!(!f0.zero);
        assert_ne!(f0.truncated_value, "0");
    }

    #[test]
    fn formatting() {
        let third = Q::new(Z::from(1), Z::from(3));
        assert_eq!(format_significant(&third, 5), "0.33333");
        assert_eq!(format_significant(&Q::new(Z::from(2), Z::from(3)), 5), "0.66667");
        assert_eq!(format_significant(&Q::new(Z::from(-1234567), Z::from(100)), 4), "-12350");
        assert_eq!(format_significant(&Q::new(Z::from(999999), Z::from(1000)), 3), "1000");
        assert_eq!(format_significant(&Q::new(Z::from(1), Z::from(400)), 3), "0.00250");
        // 2/π to 30 digits
        assert_eq!(
            format_significant(&two_over_pi(), 30),
            "0.636619772367581343075535053490"
        );
    }
}
