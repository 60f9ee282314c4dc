//! Finite subgroups of `GL₂(Z/m)`: lazy closures, levels, conjugacy.
//!
//! [`SubgroupSpec`] is a generator-based description of a subgroup.  The
//! element set is computed lazily (breadth-first closure, capped so runaway
//! inputs fail cleanly instead of exhausting memory) and cached; all derived
//! data (order, levels, fingerprint) is computed from it on demand.
//!
//! Conjugacy testing is exact: a fingerprint — order, whether `-I ∈ G`, and
//! the histogram of `(det, trace)` pairs — is conjugation-invariant and used
//! as a fast filter, after which a conjugator is searched by scanning the
//! ambient `GL₂(Z/m)` against the generators.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modarith::{
    self, divisors, factorize, for_each_gl2, gl2_order, sl2_order, ModArithError, ResidueMatrix,
};

/// Default cap on closure size: 2·10⁷ elements.
pub const DEFAULT_CLOSURE_CAP: usize = 20_000_000;

/// Errors from subgroup computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    /// Closure exceeded the element cap.
    #[error("subgroup closure exceeded the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },
    /// A generator is not invertible mod `m`.
    #[error("generator {gen} is not invertible mod {m}")]
    NonInvertibleGenerator { gen: String, m: u64 },
    /// Generators over mismatched moduli.
    #[error("generator modulus {found} does not match group modulus {expected}")]
    ModulusMismatch { expected: u64, found: u64 },
    /// Underlying matrix arithmetic error.
    #[error(transparent)]
    ModArith(#[from] ModArithError),
}

#[derive(Debug)]
struct GroupData {
    /// Packed element keys, ascending.  The canonical representation.
    sorted: Vec<u64>,
    /// Same elements as a hash set for O(1) membership.
    set: HashSet<u64>,
}

impl GroupData {
    fn from_set(m: u64, set: HashSet<u64>) -> Self {
        let _ = m;
        let mut sorted: Vec<u64> = set.iter().copied().collect();
        sorted.sort_unstable();
        GroupData { sorted, set }
    }
}

/// A subgroup of `GL₂(Z/m)` given by generators, with a lazily computed,
/// cached element set.  Cheap to clone (the element set is shared).
#[derive(Clone)]
pub struct SubgroupSpec {
    m: u64,
    gens: Vec<ResidueMatrix>,
    cap: usize,
    data: Arc<OnceLock<Result<Arc<GroupData>, GroupError>>>,
}

impl std::fmt::Debug for SubgroupSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SubgroupSpec(m={}, gens={:?})", self.m, self.gens)
    }
}

/// Conjugacy test mode: exact equality up to conjugation, or containment up
/// to conjugation (`G ⊆̇ H`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugacyMode {
    Equal,
    Contained,
}

/// Conjugation-invariant fingerprint: order, whether `-I ∈ G`, and the
/// sorted histogram of `(det, trace, multiplicity)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: u64,
    pub minus_identity: bool,
    pub det_trace_hist: Vec<(u64, u64, u64)>,
}

/// JSON-serializable subgroup record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubgroupRecord {
    pub m: u64,
    pub gens: Vec<[[i64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SubgroupRecord {
    pub fn to_subgroup(&self) -> Result<SubgroupSpec, GroupError> {
        let gens = self
            .gens
            .iter()
            .map(|g| ResidueMatrix::new(self.m, g[0][0], g[0][1], g[1][0], g[1][1]))
            .collect();
        SubgroupSpec::new(self.m, gens)
    }

    pub fn from_subgroup(g: &SubgroupSpec, label: Option<String>) -> Self {
        SubgroupRecord {
            m: g.modulus(),
            gens: g
                .gens()
                .iter()
                .map(|x| [[x.a as i64, x.b as i64], [x.c as i64, x.d as i64]])
                .collect(),
            label,
        }
    }
}

impl SubgroupSpec {
    /// Create a subgroup spec from generators; validates moduli and
    /// invertibility immediately, defers the closure.
    pub fn new(m: u64, gens: Vec<ResidueMatrix>) -> Result<Self, GroupError> {
        Self::with_cap(m, gens, DEFAULT_CLOSURE_CAP)
    }

    /// As [`SubgroupSpec::new`] with an explicit closure cap.
    pub fn with_cap(m: u64, gens: Vec<ResidueMatrix>, cap: usize) -> Result<Self, GroupError> {
        for g in &gens {
            if g.m != m {
                return Err(GroupError::ModulusMismatch { expected: m, found: g.m });
            }
            if !g.is_invertible() {
                return Err(GroupError::NonInvertibleGenerator { gen: g.to_string(), m });
            }
        }
        Ok(SubgroupSpec { m, gens, cap, data: Arc::new(OnceLock::new()) })
    }

    /// Build directly from a known-closed element set (internal fast path for
    /// images, intersections and classification products).  A small
    /// generating set is derived greedily for reporting and conjugacy tests.
    pub(crate) fn from_element_set(m: u64, set: HashSet<u64>) -> Self {
        let data = GroupData::from_set(m, set);
        let gens = greedy_generators(m, &data);
        let lock = OnceLock::new();
        let _ = lock.set(Ok(Arc::new(data)));
        SubgroupSpec { m, gens, cap: DEFAULT_CLOSURE_CAP, data: Arc::new(lock) }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn gens(&self) -> &[ResidueMatrix] {
        &self.gens
    }

    fn data(&self) -> Result<Arc<GroupData>, GroupError> {
        self.data
            .get_or_init(|| {
                let set = close_set(self.m, &self.gens, self.cap)?;
                Ok(Arc::new(GroupData::from_set(self.m, set)))
            })
            .clone()
    }

    /// Force the closure; errors if it exceeds the cap.
    pub fn close(&self) -> Result<(), GroupError> {
        self.data().map(|_| ())
    }

    /// Group order.
    pub fn order(&self) -> Result<u64, GroupError> {
        Ok(self.data()?.sorted.len() as u64)
    }

    /// Packed element keys, ascending (the canonical element encoding).
    pub fn element_keys(&self) -> Result<Vec<u64>, GroupError> {
        Ok(self.data()?.sorted.clone())
    }

    /// All elements, in ascending packed order.
    pub fn elements(&self) -> Result<Vec<ResidueMatrix>, GroupError> {
        let m = self.m;
        Ok(self.data()?.sorted.iter().map(|&k| ResidueMatrix::unpack(m, k)).collect())
    }

    pub fn contains(&self, x: &ResidueMatrix) -> Result<bool, GroupError> {
        if x.m != self.m {
            return Ok(false);
        }
        Ok(self.data()?.set.contains(&x.pack()))
    }

    pub fn contains_key(&self, key: u64) -> Result<bool, GroupError> {
        Ok(self.data()?.set.contains(&key))
    }

    pub fn has_minus_identity(&self) -> Result<bool, GroupError> {
        self.contains(&ResidueMatrix::minus_identity(self.m))
    }

    /// `⟨G, -I⟩`; since `-I` is central this is `G ∪ (-I)G`.
    pub fn adjoin_minus_identity(&self) -> Result<SubgroupSpec, GroupError> {
        let minus = ResidueMatrix::minus_identity(self.m);
        if self.contains(&minus)? {
            return Ok(self.clone());
        }
        let data = self.data()?;
        let mut set = data.set.clone();
        for &k in &data.sorted {
            set.insert(minus.mat_mul(&ResidueMatrix::unpack(self.m, k)).pack());
        }
        Ok(SubgroupSpec::from_element_set(self.m, set))
    }

    /// `G ∩ SL₂(Z/m)`.
    pub fn sl2_part(&self) -> Result<SubgroupSpec, GroupError> {
        let data = self.data()?;
        let set: HashSet<u64> = data
            .sorted
            .iter()
            .copied()
            .filter(|&k| ResidueMatrix::unpack(self.m, k).det() == 1)
            .collect();
        Ok(SubgroupSpec::from_element_set(self.m, set))
    }

    /// Sorted image of the determinant map (a subgroup of `(Z/m)^×`).
    pub fn det_image(&self) -> Result<Vec<u64>, GroupError> {
        let data = self.data()?;
        let mut dets: Vec<u64> = data
            .sorted
            .iter()
            .map(|&k| ResidueMatrix::unpack(self.m, k).det())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        dets.sort_unstable();
        Ok(dets)
    }

    /// Whether `det: G → (Z/m)^×` is surjective.
    pub fn det_surjective(&self) -> Result<bool, GroupError> {
        Ok(self.det_image()?.len() as u64 == modarith::euler_phi(self.m))
    }

    /// The commutator subgroup `[G, G]` (normal closure of the generator
    /// commutators).
    pub fn commutator_subgroup(&self) -> Result<SubgroupSpec, GroupError> {
        let gens = &self.gens;
        let mut kgens: Vec<ResidueMatrix> = Vec::new();
        let mut seen: HashSet<u64> = HashSet::new();
        for x in gens {
            for y in gens {
                let comm = x
                    .mat_mul(y)
                    .mat_mul(&x.mat_inv()?)
                    .mat_mul(&y.mat_inv()?);
                if seen.insert(comm.pack()) {
                    kgens.push(comm);
                }
            }
        }
        loop {
            let k = SubgroupSpec::with_cap(self.m, kgens.clone(), self.cap)?;
            k.close()?;
            let mut grew = false;
            for g in gens {
                for x in kgens.clone() {
                    let y = x.conjugate_by(g)?;
                    if !k.contains(&y)? && seen.insert(y.pack()) {
                        kgens.push(y);
                        grew = true;
                    }
                }
            }
            if !grew {
                return Ok(k);
            }
        }
    }

    /// Image of `G` under reduction to a divisor `d | m`.
    pub fn reduce(&self, d: u64) -> Result<SubgroupSpec, GroupError> {
        if d == 0 || self.m % d != 0 {
            return Err(GroupError::ModArith(ModArithError::NotADivisor { d, m: self.m }));
        }
        let data = self.data()?;
        let set: HashSet<u64> = data
            .sorted
            .iter()
            .map(|&k| ResidueMatrix::unpack(self.m, k).reduce(d).unwrap().pack())
            .collect();
        Ok(SubgroupSpec::from_element_set(d, set))
    }

    /// Full preimage of `G ≤ GL₂(Z/d)` under `GL₂(Z/m) → GL₂(Z/d)`, `d | m`.
    pub fn preimage(&self, m: u64) -> Result<SubgroupSpec, GroupError> {
        let d = self.m;
        if d == 0 || m % d != 0 {
            return Err(GroupError::ModArith(ModArithError::NotADivisor { d, m }));
        }
        if m == d {
            return Ok(self.clone());
        }
        // Kernel of the reduction map: I + d·Y with invertible determinant.
        let q = m / d;
        let mut kernel: Vec<ResidueMatrix> = Vec::new();
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for e in 0..q {
                        let x = ResidueMatrix::new(
                            m,
                            (1 + d * a) as i64,
                            (d * b) as i64,
                            (d * c) as i64,
                            (1 + d * e) as i64,
                        );
                        if x.is_invertible() {
                            kernel.push(x);
                        }
                    }
                }
            }
        }
        debug_assert_eq!(kernel.len() as u64, gl2_order(m) / gl2_order(d));
        let data = self.data()?;
        let mut set = HashSet::with_capacity(data.sorted.len() * kernel.len());
        for &gk in &data.sorted {
            let g = ResidueMatrix::unpack(d, gk);
            let lift = lift_invertible(&g, m);
            debug_assert!(lift.is_invertible() && lift.reduce(d).unwrap() == g);
            for k in &kernel {
                set.insert(lift.mat_mul(k).pack());
            }
        }
        debug_assert_eq!(set.len(), data.sorted.len() * kernel.len());
        Ok(SubgroupSpec::from_element_set(m, set))
    }

    /// Smallest `d | m` such that `G` is the full preimage of its reduction
    /// mod `d`, detected by order counting.
    pub fn gl2_level(&self) -> Result<u64, GroupError> {
        let n = self.order()?;
        for d in divisors(self.m) {
            let red = self.reduce(d)?;
            if n * gl2_order(d) == red.order()? * gl2_order(self.m) {
                return Ok(d);
            }
        }
        unreachable!("d = m always satisfies the level criterion")
    }

    /// Level of `G ∩ SL₂` inside `SL₂(Ẑ)`, by the same order count.
    pub fn sl2_level(&self) -> Result<u64, GroupError> {
        let s = self.sl2_part()?;
        let n = s.order()?;
        for d in divisors(self.m) {
            let red = s.reduce(d)?;
            if n * sl2_order(d) == red.order()? * sl2_order(self.m) {
                return Ok(d);
            }
        }
        unreachable!("d = m always satisfies the level criterion")
    }

    /// Set of traces of `G`, as residues mod `m`.
    pub fn trace_set(&self) -> Result<Vec<u64>, GroupError> {
        let data = self.data()?;
        let mut tr: Vec<u64> = data
            .sorted
            .iter()
            .map(|&k| ResidueMatrix::unpack(self.m, k).tr())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        tr.sort_unstable();
        Ok(tr)
    }

    /// Conjugation-invariant fingerprint.
    pub fn fingerprint(&self) -> Result<Fingerprint, GroupError> {
        let data = self.data()?;
        let mut hist = std::collections::BTreeMap::new();
        for &k in &data.sorted {
            let x = ResidueMatrix::unpack(self.m, k);
            *hist.entry((x.det(), x.tr())).or_insert(0u64) += 1;
        }
        Ok(Fingerprint {
            order: data.sorted.len() as u64,
            minus_identity: self.has_minus_identity()?,
            det_trace_hist: hist.into_iter().map(|((d, t), c)| (d, t, c)).collect(),
        })
    }

    /// Search for `g ∈ GL₂(Z/m)` with `g G g⁻¹ = H` (mode `Equal`) or
    /// `g G g⁻¹ ⊆ H` (mode `Contained`).  Returns a conjugator if found.
    pub fn conjugacy(
        &self,
        other: &SubgroupSpec,
        mode: ConjugacyMode,
    ) -> Result<Option<ResidueMatrix>, GroupError> {
        if self.m != other.m {
            return Ok(None);
        }
        let (n1, n2) = (self.order()?, other.order()?);
        match mode {
            ConjugacyMode::Equal => {
                if self.fingerprint()? != other.fingerprint()? {
                    return Ok(None);
                }
            }
            ConjugacyMode::Contained => {
                if n2 % n1 != 0 {
                    return Ok(None);
                }
                // the (det, trace) histogram of G must fit inside H's
                let (f1, f2) = (self.fingerprint()?, other.fingerprint()?);
                let mut h2 = std::collections::BTreeMap::new();
                for (d, t, c) in f2.det_trace_hist {
                    h2.insert((d, t), c);
                }
                for (d, t, c) in f1.det_trace_hist {
                    if h2.get(&(d, t)).copied().unwrap_or(0) < c {
                        return Ok(None);
                    }
                }
            }
        }
        other.data()?; // force, so `contains` in the scan is cheap
        let mut found = None;
        let gens = if self.gens.is_empty() {
            vec![ResidueMatrix::identity(self.m)]
        } else {
            self.gens.clone()
        };
        let check = |g: &ResidueMatrix| -> bool {
            let gi = g.mat_inv().unwrap();
            gens.iter().all(|x| {
                let y = g.mat_mul(x).mat_mul(&gi);
                other.contains(&y).unwrap_or(false)
            })
        };
        // identity first: the common case in dedup is literal containment
        if check(&ResidueMatrix::identity(self.m)) {
            return Ok(Some(ResidueMatrix::identity(self.m)));
        }
        for_each_gl2(self.m, |g| {
            if found.is_none() && check(g) {
                found = Some(*g);
            }
        });
        Ok(found)
    }

    /// `G ≐ H`: equal up to conjugacy.
    pub fn conjugate_equal(&self, other: &SubgroupSpec) -> Result<bool, GroupError> {
        Ok(self.conjugacy(other, ConjugacyMode::Equal)?.is_some())
    }

    /// `G ⊆̇ H`: contained in a conjugate of `H`.
    pub fn conjugate_contained(&self, other: &SubgroupSpec) -> Result<bool, GroupError> {
        Ok(self.conjugacy(other, ConjugacyMode::Contained)?.is_some())
    }

    /// Normalizer of `G` in `GL₂(Z/m)`, as an element list.
    pub fn normalizer_keys(&self) -> Result<Vec<u64>, GroupError> {
        let data = self.data()?;
        let mut out = Vec::new();
        for_each_gl2(self.m, |g| {
            let gi = g.mat_inv().unwrap();
            if self.gens.iter().all(|x| data.set.contains(&g.mat_mul(x).mat_mul(&gi).pack())) {
                out.push(g.pack());
            }
        });
        Ok(out)
    }

    /// The Borel subgroup of upper-triangular matrices in `GL₂(Z/m)`
    /// (so `X_G` for this `G` is the classical `X₀(m)`).
    pub fn borel(m: u64) -> SubgroupSpec {
        let mut set = HashSet::new();
        for_each_gl2(m, |g| {
            if g.c == 0 {
                set.insert(g.pack());
            }
        });
        SubgroupSpec::from_element_set(m, set)
    }

    /// The full group `GL₂(Z/m)` as a `SubgroupSpec`.
    pub fn full_gl2(m: u64) -> SubgroupSpec {
        let mut set = HashSet::with_capacity(gl2_order(m) as usize);
        for_each_gl2(m, |g| {
            set.insert(g.pack());
        });
        SubgroupSpec::from_element_set(m, set)
    }
}

/// Greedy deterministic generating set from a closed element list.
fn greedy_generators(m: u64, data: &GroupData) -> Vec<ResidueMatrix> {
    let mut gens: Vec<ResidueMatrix> = Vec::new();
    let mut span: HashSet<u64> = HashSet::new();
    span.insert(ResidueMatrix::identity(m).pack());
    for &k in &data.sorted {
        if span.contains(&k) {
            continue;
        }
        gens.push(ResidueMatrix::unpack(m, k));
        span = close_set(m, &gens, data.sorted.len() + 1).expect("bounded by known order");
        if span.len() == data.sorted.len() {
            break;
        }
    }
    gens
}

/// Breadth-first closure of a generating set, with cap.
fn close_set(
    m: u64,
    gens: &[ResidueMatrix],
    cap: usize,
) -> Result<HashSet<u64>, GroupError> {
    let mut all: Vec<ResidueMatrix> = Vec::new();
    for g in gens {
        all.push(*g);
        all.push(g.mat_inv()?);
    }
    let mut seen = HashSet::new();
    let id = ResidueMatrix::identity(m);
    seen.insert(id.pack());
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in &all {
            let y = x.mat_mul(g);
            if seen.insert(y.pack()) {
                if seen.len() > cap {
                    return Err(GroupError::ClosureCapExceeded { cap });
                }
                frontier.push(y);
            }
        }
    }
    Ok(seen)
}

/// Lift `g ∈ GL₂(Z/d)` to an invertible matrix mod `m` (`d | m`): entrywise
/// on the prime powers of `m` shared with `d`, identity on the rest.
fn lift_invertible(g: &ResidueMatrix, m: u64) -> ResidueMatrix {
    let d = g.m;
    let mut acc: Option<ResidueMatrix> = None;
    for (p, e) in factorize(m) {
        let pk = p.pow(e);
        let mut dj = 1;
        let mut dd = d;
        while dd % p == 0 {
            dj *= p;
            dd /= p;
        }
        let comp = if dj > 1 {
            let r = g.reduce(dj).unwrap();
            ResidueMatrix { m: pk, a: r.a, b: r.b, c: r.c, d: r.d }
        } else {
            ResidueMatrix::identity(pk)
        };
        acc = Some(match acc {
            None => comp,
            Some(prev) => ResidueMatrix::crt_join(&prev, &comp).unwrap(),
        });
    }
    acc.unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: u64, mats: &[[i64; 4]]) -> SubgroupSpec {
        SubgroupSpec::new(
            m,
            mats.iter().map(|v| ResidueMatrix::new(m, v[0], v[1], v[2], v[3])).collect(),
        )
        .unwrap()
    }

    #[test]
    fn closure_orders() {
        // Borel mod 3 has order 12; full GL2(Z/3) order 48; <T> mod 5 order 5.
        assert_eq!(g(3, &[[1, 1, 0, 1], [1, 0, 0, 2], [2, 0, 0, 1]]).order().unwrap(), 12);
        assert_eq!(SubgroupSpec::full_gl2(3).order().unwrap(), 48);
        assert_eq!(g(5, &[[1, 1, 0, 1]]).order().unwrap(), 5);
    }

    #[test]
    fn closure_cap() {
        let h = SubgroupSpec::with_cap(
            7,
            vec![ResidueMatrix::new(7, 0, 6, 1, 0), ResidueMatrix::new(7, 1, 1, 0, 1)],
            100,
        )
        .unwrap();
        assert!(matches!(h.close(), Err(GroupError::ClosureCapExceeded { cap: 100 })));
    }

    #[test]
    fn sl2_part_and_det() {
        let full = SubgroupSpec::full_gl2(5);
        let s = full.sl2_part().unwrap();
        assert_eq!(s.order().unwrap(), 120);
        assert_eq!(full.det_image().unwrap(), vec![1, 2, 3, 4]);
        assert!(full.det_surjective().unwrap());
    }

    #[test]
    fn adjoin_minus_identity() {
        let h = g(5, &[[1, 1, 0, 1]]);
        assert!(!h.has_minus_identity().unwrap());
        let h2 = h.adjoin_minus_identity().unwrap();
        assert_eq!(h2.order().unwrap(), 10);
        assert!(h2.has_minus_identity().unwrap());
    }

    #[test]
    fn commutator_subgroups() {
        // [GL2(F5), GL2(F5)] = SL2(F5); mod 2, GL2 ≅ S3 with commutator A3
        let c5 = SubgroupSpec::full_gl2(5).commutator_subgroup().unwrap();
        assert_eq!(c5.order().unwrap(), sl2_order(5));
        assert_eq!(c5.det_image().unwrap(), vec![1]);
        let c2 = SubgroupSpec::full_gl2(2).commutator_subgroup().unwrap();
        assert_eq!(c2.order().unwrap(), 3);
    }

    #[test]
    fn preimage_and_levels() {
        // Borel mod 2 pulled back to level 4
        let b2 = g(2, &[[1, 1, 0, 1], [1, 0, 0, 1]]);
        let pre = b2.preimage(4).unwrap();
        assert_eq!(pre.order().unwrap(), b2.order().unwrap() * (gl2_order(4) / gl2_order(2)));
        assert_eq!(pre.gl2_level().unwrap(), 2);
        assert_eq!(pre.reduce(2).unwrap().order().unwrap(), b2.order().unwrap());
        // full group has level 1
        assert_eq!(SubgroupSpec::full_gl2(6).gl2_level().unwrap(), 1);
        assert_eq!(SubgroupSpec::full_gl2(6).sl2_level().unwrap(), 1);
    }

    #[test]
    fn fingerprint_and_conjugacy() {
        // upper and lower triangular unipotents mod 7 are conjugate
        let u = g(7, &[[1, 1, 0, 1]]);
        let l = g(7, &[[1, 0, 1, 1]]);
        assert_eq!(u.fingerprint().unwrap(), l.fingerprint().unwrap());
        let conj = u.conjugacy(&l, ConjugacyMode::Equal).unwrap().unwrap();
        let ci = conj.mat_inv().unwrap();
        for x in u.elements().unwrap() {
            assert!(l.contains(&conj.mat_mul(&x).mat_mul(&ci)).unwrap());
        }
        // but <[[1,1],[0,1]]> mod 7 is not conjugate to a split torus
        let t = g(7, &[[3, 0, 0, 1]]);
        assert!(!u.conjugate_equal(&t).unwrap());
        // containment: unipotent inside Borel
        let borel = g(7, &[[1, 1, 0, 1], [3, 0, 0, 1], [1, 0, 0, 3]]);
        assert!(u.conjugate_contained(&borel).unwrap());
        assert!(l.conjugate_contained(&borel).unwrap());
        assert!(!borel.conjugate_contained(&u).unwrap());
    }

    #[test]
    fn trace_set_detects_missing_traces() {
        // the level-2 catalog group <[[1,1],[0,1]]> has trace set {0} mod 2
        let h = g(2, &[[1, 1, 0, 1]]);
        assert_eq!(h.trace_set().unwrap(), vec![0]);
        assert_eq!(SubgroupSpec::full_gl2(2).trace_set().unwrap(), vec![0, 1]);
    }

    #[test]
    fn record_roundtrip() {
        let rec: SubgroupRecord =
            serde_json::from_str(r#"{"m":6,"gens":[[[1,1],[0,5]]],"label":"demo"}"#).unwrap();
        let h = rec.to_subgroup().unwrap();
        assert_eq!(h.modulus(), 6);
        let back = SubgroupRecord::from_subgroup(&h, rec.label.clone());
        assert_eq!(back.m, 6);
        assert_eq!(back.label.as_deref(), Some("demo"));
    }

    #[test]
    fn normalizer_of_split_torus() {
        // normalizer of the full split torus mod 5 is torus + antidiagonal: order 32
        let t = g(5, &[[2, 0, 0, 1], [1, 0, 0, 2]]);
        assert_eq!(t.order().unwrap(), 16);
        assert_eq!(t.normalizer_keys().unwrap().len(), 32);
    }
}
