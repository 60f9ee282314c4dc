//! Classification and arithmetic verification of the genus-zero
//! "missing trace" open subgroups of GL₂(Ẑ).
//!
//! An open subgroup `G ≤ GL₂(Ẑ)` with full determinant has a *missing trace*
//! if for some integer `r` no element of `G` has trace `r`; equivalently, for
//! some level `m` the reduction `G(m) ≤ GL₂(Z/m)` omits a trace residue.
//! For an elliptic curve `E/Q` whose adelic Galois image lies in such a `G`,
//! the residue `a_p mod m` avoids the missing classes for all good `p ∤ m`,
//! so the Lang–Trotter counts `π_{E,r}(X)` stay bounded for those `r`.
//!
//! This crate classifies the 52 maximal genus-zero missing-trace groups
//! (levels 2–28), stores the catalog together with the parametrizing
//! elliptic-curve families, and verifies both halves against each other:
//!
//! * [`modarith`] — exact 2×2 matrix arithmetic over `Z/m` with CRT support;
//! * [`grouplat`] — finite subgroups of `GL₂(Z/m)`: closure, levels,
//!   conjugacy, preimages, fingerprints;
//! * [`modcurve`] — genus of the modular curve `X_G` from the `PSL₂` coset
//!   action, plus a rational-point criterion for prime-power levels;
//! * [`mtclassify`] — the classification algorithm itself: cyclic-extension
//!   subgroup enumeration at prime-power levels, Goursat fibered products at
//!   composite levels, and the maximality filter;
//! * [`qpoly`] — exact rational-function arithmetic over `Q(t, D)`, cubic
//!   resolvents, companion cubics and splitting-field comparison;
//! * [`ecurve`] — specialized curve instances, trace censuses, division
//!   polynomials and torsion-field checks;
//! * [`ltconst`] — truncated Lang–Trotter constants;
//! * [`catalog`] — the reviewed-in group/family data and the end-to-end
//!   verification suites.

pub mod catalog;
pub mod ecurve;
pub mod grouplat;
pub mod ltconst;
pub mod modarith;
pub mod modcurve;
pub mod mtclassify;
pub mod qpoly;
