//! Classification of genus-zero missing-trace subgroups.
//!
//! A det-full open `G ≤ GL₂(Ẑ)` of level `m` has a *new* missing trace if
//! its reduction mod `m` omits some trace residue while every proper
//! reduction `G(m/p)` realizes all traces.  [`classify`] enumerates the
//! conjugacy classes of such groups of a given genus at a given level, and
//! filters them to the ⊆̇-maximal ones:
//!
//! * **Prime-power levels** are enumerated bottom-up.  First the subgroup
//!   classes of `SL₂(Z/m)` are built by cyclic extension (repeatedly
//!   adjoining a prime-order coset from the normalizer), seeded with the
//!   trivial group and the perfect subgroups.  Each genus-zero `SL₂`-part
//!   `S` is then completed to the det-full groups `G` with `G ∩ SL₂ = S`,
//!   which correspond to order-`φ(m)` subgroups of `N(S)/S` on which `det`
//!   is bijective.
//! * **Composite levels** `m = m₁m₂` (coprime prime powers) are assembled
//!   exclusively as Goursat fibered products `G₁ ×_ψ G₂` over pools of
//!   factor classes (det-full, full-trace, genus-zero — all forced on the
//!   projections of a level-`m` group by reduction and covering maps).
//!
//! Candidates are deduplicated by fingerprint-plus-conjugacy, and the
//! maximality filter drops any group contained in a conjugate of a larger
//! one from the same list.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::grouplat::{ConjugacyMode, Fingerprint, GroupError, SubgroupSpec};
use crate::modarith::{euler_phi, factorize, for_each_gl2, ResidueMatrix};
use crate::modcurve::{self, GenusReport, ModCurveError};

/// Errors from the classification machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    /// Level is outside the supported whitelist (prime powers ≤ 32 and
    /// products of two supported coprime prime powers).
    #[error("classification at level {0} is not supported")]
    UnsupportedLevel(u64),
    /// A fibered-product pairing is not an isomorphism of the two quotients.
    #[error("pairing is not an isomorphism of the quotient groups")]
    PairingNotIso,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    ModArith(#[from] crate::modarith::ModArithError),
    #[error(transparent)]
    ModCurve(#[from] ModCurveError),
}

// ---------------------------------------------------------------------------
// trace predicates
// ---------------------------------------------------------------------------

/// The fiber of the trace map over `r`: all elements of `G` with trace `r`.
#[derive(Debug, Clone)]
pub struct TraceFiber {
    pub m: u64,
    pub r: u64,
    pub elements: Vec<ResidueMatrix>,
}

impl TraceFiber {
    pub fn size(&self) -> u64 {
        self.elements.len() as u64
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Elements of `G` with trace `≡ r (mod m)`.
pub fn trace_fiber(g: &SubgroupSpec, r: u64) -> Result<TraceFiber, ClassifyError> {
    let m = g.modulus();
    let r = r % m;
    let elements = g.elements()?.into_iter().filter(|x| x.tr() == r).collect();
    Ok(TraceFiber { m, r, elements })
}

/// Trace set of the reduction of `G` mod `d | m`.
pub fn trace_set(g: &SubgroupSpec, d: u64) -> Result<Vec<u64>, ClassifyError> {
    Ok(g.reduce(d)?.trace_set()?)
}

/// Residues mod `m` missing from the trace set of `G`.
pub fn missing_traces(g: &SubgroupSpec) -> Result<Vec<u64>, ClassifyError> {
    let m = g.modulus();
    let have: HashSet<u64> = g.trace_set()?.into_iter().collect();
    Ok((0..m).filter(|r| !have.contains(r)).collect())
}

/// Whether `G` (whose modulus must be its level) misses a trace mod `m`
/// while realizing every trace mod `m/p` for each prime `p | m`.
pub fn is_new_missing_trace(g: &SubgroupSpec) -> Result<bool, ClassifyError> {
    let m = g.modulus();
    if missing_traces(g)?.is_empty() {
        return Ok(false);
    }
    for (p, _) in factorize(m) {
        let d = m / p;
        if d > 1 && trace_set(g, d)?.len() as u64 != d {
            return Ok(false);
        }
        if d == 1 {
            // trace mod 1 is always "full"
        }
    }
    Ok(true)
}

/// The invariant `d_G`: the largest divisor of
/// `|(G(m_S) ∩ SL₂) / [G(m_S), G(m_S)]|` supported on the primes of the
/// `SL₂`-level `m_S`.
pub fn d_of_group(g: &SubgroupSpec) -> Result<u64, ClassifyError> {
    let ms = g.sl2_level()?;
    if ms == 1 {
        return Ok(1);
    }
    let gs = g.reduce(ms)?;
    let s = gs.sl2_part()?;
    let c = gs.commutator_subgroup()?;
    let q = s.order()? / c.order()?;
    let mut d = 1u64;
    for (p, _) in factorize(ms) {
        let mut q2 = q;
        while q2 % p == 0 {
            d *= p;
            q2 /= p;
        }
    }
    Ok(d)
}

/// `d`-admissibility: some trace value `t` mod `m` is realized only by
/// matrices that are scalar modulo every prime `p | d`.
pub fn is_d_admissible(g: &SubgroupSpec, d: u64) -> Result<bool, ClassifyError> {
    let m = g.modulus();
    let elements = g.elements()?;
    let primes: Vec<u64> = factorize(d).into_iter().map(|(p, _)| p).collect();
    'trace: for t in 0..m {
        for x in &elements {
            if x.tr() != t {
                continue;
            }
            for &p in &primes {
                if !x.reduce(p)?.is_scalar() {
                    continue 'trace;
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// Goursat decomposition and fibered products
// ---------------------------------------------------------------------------

/// A Goursat presentation of `G ≤ GL₂(Z/m₁m₂)`: projections `G₁`, `G₂`,
/// kernels `K₁ = {x : (x, 1) ∈ G}`, `K₂`, and the induced pairing between
/// the two quotients, recorded as pairs of canonical coset keys.
#[derive(Debug, Clone)]
pub struct FiberedProductSpec {
    pub g1: SubgroupSpec,
    pub k1: SubgroupSpec,
    pub g2: SubgroupSpec,
    pub k2: SubgroupSpec,
    /// `(coset key of K₁g₁, coset key of K₂g₂)` for matched cosets.
    pub pairing: Vec<(u64, u64)>,
}

impl FiberedProductSpec {
    /// Order of the common quotient `G₁/K₁ ≅ G₂/K₂`.
    pub fn quotient_order(&self) -> u64 {
        self.pairing.len() as u64
    }
}

/// Canonical key of the coset `K·x` (minimum packed element).
fn coset_key(k_elems: &[ResidueMatrix], x: &ResidueMatrix) -> u64 {
    k_elems.iter().map(|k| k.mat_mul(x).pack()).min().unwrap()
}

/// Decompose `G ≤ GL₂(Z/m)` along the coprime factorization `m = m₁·m₂`.
pub fn goursat_decompose(
    g: &SubgroupSpec,
    m1: u64,
    m2: u64,
) -> Result<FiberedProductSpec, ClassifyError> {
    let m = g.modulus();
    assert_eq!(m1 * m2, m, "factors must multiply to the modulus");
    let g1 = g.reduce(m1)?;
    let g2 = g.reduce(m2)?;
    let id2 = ResidueMatrix::identity(m2);
    let id1 = ResidueMatrix::identity(m1);
    let mut k1set = HashSet::new();
    let mut k2set = HashSet::new();
    for x in g.elements()? {
        let (x1, x2) = x.crt_split(m1, m2)?;
        if x2 == id2 {
            k1set.insert(x1.pack());
        }
        if x1 == id1 {
            k2set.insert(x2.pack());
        }
    }
    let k1 = SubgroupSpec::from_element_set(m1, k1set);
    let k2 = SubgroupSpec::from_element_set(m2, k2set);
    let k1e = k1.elements()?;
    let k2e = k2.elements()?;
    let mut pairing: Vec<(u64, u64)> = Vec::new();
    let mut seen = HashSet::new();
    for x in g.elements()? {
        let (x1, x2) = x.crt_split(m1, m2)?;
        let c1 = coset_key(&k1e, &x1);
        if seen.insert(c1) {
            pairing.push((c1, coset_key(&k2e, &x2)));
        }
    }
    pairing.sort_unstable();
    Ok(FiberedProductSpec { g1, k1, g2, k2, pairing })
}

/// Multiplication table of the quotient `G/K` (cosets indexed by canonical
/// key order).
struct QuotientTable {
    keys: Vec<u64>,
    reps: Vec<ResidueMatrix>,
    index: HashMap<u64, usize>,
    mul: Vec<Vec<usize>>,
    id: usize,
}

fn quotient_table(g: &SubgroupSpec, k: &SubgroupSpec) -> Result<QuotientTable, ClassifyError> {
    let ke = k.elements()?;
    let mut index = HashMap::new();
    let mut keys = Vec::new();
    let mut reps = Vec::new();
    for x in g.elements()? {
        let c = coset_key(&ke, &x);
        if !index.contains_key(&c) {
            index.insert(c, keys.len());
            keys.push(c);
            reps.push(x);
        }
    }
    // reorder by key for determinism
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by_key(|&i| keys[i]);
    let keys: Vec<u64> = order.iter().map(|&i| keys[i]).collect();
    let reps: Vec<ResidueMatrix> = order.iter().map(|&i| reps[i]).collect();
    let index: HashMap<u64, usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let n = keys.len();
    let mut mul = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            mul[i][j] = index[&coset_key(&ke, &reps[i].mat_mul(&reps[j]))];
        }
    }
    let id = index[&coset_key(&ke, &ResidueMatrix::identity(g.modulus()))];
    Ok(QuotientTable { keys, reps, index, mul, id })
}

impl QuotientTable {
    fn order_of(&self, i: usize) -> usize {
        let mut x = i;
        let mut n = 1;
        while x != self.id {
            x = self.mul[x][i];
            n += 1;
        }
        n
    }
}

/// All isomorphisms between two quotient tables, as index maps.
fn quotient_isos(q1: &QuotientTable, q2: &QuotientTable) -> Vec<Vec<usize>> {
    let n = q1.keys.len();
    if n != q2.keys.len() {
        return Vec::new();
    }
    if n == 1 {
        return vec![vec![0]];
    }
    // order histograms must match
    let mut h1: Vec<usize> = (0..n).map(|i| q1.order_of(i)).collect();
    let h2: Vec<usize> = (0..n).map(|i| q2.order_of(i)).collect();
    {
        let mut a = h1.clone();
        let mut b = h2.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Vec::new();
        }
    }
    // greedy generating sequence for q1
    let mut gens: Vec<usize> = Vec::new();
    let mut span = vec![false; n];
    span[q1.id] = true;
    let mut span_count = 1;
    for i in 0..n {
        if span[i] {
            continue;
        }
        gens.push(i);
        // close span under existing elements and the new generator
        loop {
            let mut grew = false;
            for a in 0..n {
                if !span[a] {
                    continue;
                }
                for &g in &gens {
                    let b = q1.mul[a][g];
                    if !span[b] {
                        span[b] = true;
                        span_count += 1;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        if span_count == n {
            break;
        }
    }
    let mut out = Vec::new();
    let mut images = vec![0usize; gens.len()];
    fn rec(
        q1: &QuotientTable,
        q2: &QuotientTable,
        gens: &[usize],
        images: &mut Vec<usize>,
        depth: usize,
        h1: &[usize],
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = q1.keys.len();
        if depth == gens.len() {
            // build the full map by spanning words
            let mut map = vec![usize::MAX; n];
            map[q1.id] = q2.id;
            let mut frontier = vec![q1.id];
            while let Some(a) = frontier.pop() {
                for (gi, &g) in gens.iter().enumerate() {
                    let b = q1.mul[a][g];
                    let img = q2.mul[map[a]][images[gi]];
                    if map[b] == usize::MAX {
                        map[b] = img;
                        frontier.push(b);
                    } else if map[b] != img {
                        return;
                    }
                }
            }
            if map.iter().any(|&v| v == usize::MAX) {
                return;
            }
            let mut seen = vec![false; n];
            for &v in &map {
                if seen[v] {
                    return;
                }
                seen[v] = true;
            }
            for a in 0..n {
                for b in 0..n {
                    if map[q1.mul[a][b]] != q2.mul[map[a]][map[b]] {
                        return;
                    }
                }
            }
            out.push(map);
            return;
        }
        for cand in 0..n {
            if q2.order_of(cand) == h1[gens[depth]] {
                images[depth] = cand;
                rec(q1, q2, gens, images, depth + 1, h1, out);
            }
        }
    }
    h1 = (0..n).map(|i| q1.order_of(i)).collect();
    rec(q1, q2, &gens, &mut images, 0, &h1, &mut out);
    out
}

/// Assemble the fibered product from a [`FiberedProductSpec`], validating
/// that the pairing is an isomorphism of the two quotients.
pub fn fibered_product(spec: &FiberedProductSpec) -> Result<SubgroupSpec, ClassifyError> {
    let (m1, m2) = (spec.g1.modulus(), spec.g2.modulus());
    let q1 = quotient_table(&spec.g1, &spec.k1)?;
    let q2 = quotient_table(&spec.g2, &spec.k2)?;
    if q1.keys.len() != spec.pairing.len() || q2.keys.len() != spec.pairing.len() {
        return Err(ClassifyError::PairingNotIso);
    }
    let mut map = vec![usize::MAX; q1.keys.len()];
    for &(c1, c2) in &spec.pairing {
        let (Some(&i1), Some(&i2)) = (q1.index.get(&c1), q2.index.get(&c2)) else {
            return Err(ClassifyError::PairingNotIso);
        };
        if map[i1] != usize::MAX {
            return Err(ClassifyError::PairingNotIso);
        }
        map[i1] = i2;
    }
    let mut seen = vec![false; q2.keys.len()];
    for &v in &map {
        if v == usize::MAX || seen[v] {
            return Err(ClassifyError::PairingNotIso);
        }
        seen[v] = true;
    }
    for a in 0..map.len() {
        for b in 0..map.len() {
            if map[q1.mul[a][b]] != q2.mul[map[a]][map[b]] {
                return Err(ClassifyError::PairingNotIso);
            }
        }
    }
    // build the element set: cosets matched by the pairing
    let k1e = spec.k1.elements()?;
    let k2e = spec.k2.elements()?;
    let mut by_coset1: HashMap<usize, Vec<ResidueMatrix>> = HashMap::new();
    for x in spec.g1.elements()? {
        by_coset1.entry(q1.index[&coset_key(&k1e, &x)]).or_default().push(x);
    }
    let mut by_coset2: HashMap<usize, Vec<ResidueMatrix>> = HashMap::new();
    for x in spec.g2.elements()? {
        by_coset2.entry(q2.index[&coset_key(&k2e, &x)]).or_default().push(x);
    }
    let mut set = HashSet::new();
    for (i1, list1) in &by_coset1 {
        let list2 = &by_coset2[&map[*i1]];
        for x1 in list1 {
            for x2 in list2 {
                set.insert(ResidueMatrix::crt_join(x1, x2)?.pack());
            }
        }
    }
    let _ = (m1, m2);
    Ok(SubgroupSpec::from_element_set(m1 * m2, set))
}

/// Whether the automorphism `η` of `G/K` (given as canonical-coset-key
/// pairs) is induced by conjugation by some element of `GL₂(Z/m)` that
/// normalizes `G` (and `K`).
pub fn is_gl2_induced(
    g: &SubgroupSpec,
    k: &SubgroupSpec,
    eta: &[(u64, u64)],
) -> Result<bool, ClassifyError> {
    let m = g.modulus();
    let ke = k.elements()?;
    let eta_map: HashMap<u64, u64> = eta.iter().copied().collect();
    let q = quotient_table(g, k)?;
    let gens = g.gens().to_vec();
    let mut found = false;
    for_each_gl2(m, |x| {
        if found {
            return;
        }
        let xi = x.mat_inv().unwrap();
        // must normalize G
        for gg in &gens {
            let y = x.mat_mul(gg).mat_mul(&xi);
            if !g.contains(&y).unwrap_or(false) {
                return;
            }
        }
        // must induce eta on the cosets
        for rep in &q.reps {
            let y = x.mat_mul(rep).mat_mul(&xi);
            if !g.contains(&y).unwrap_or(false) {
                return;
            }
            let from = coset_key(&ke, rep);
            let to = coset_key(&ke, &y);
            if eta_map.get(&from) != Some(&to) {
                return;
            }
        }
        found = true;
    });
    Ok(found)
}

// ---------------------------------------------------------------------------
// subgroup-class enumeration at prime-power level
// ---------------------------------------------------------------------------

/// Conjugacy classes (under `GL₂(Z/m)`) of subgroups of `SL₂(Z/m)`, by the
/// cyclic-extension method: starting from the trivial group and the perfect
/// subgroups, repeatedly adjoin a prime-order coset of the normalizer.
fn sl2_subgroup_classes(m: u64) -> Result<Vec<SubgroupSpec>, ClassifyError> {
    // ambient SL₂(Z/m)
    let mut sl2: Vec<ResidueMatrix> = Vec::new();
    for_each_gl2(m, |x| {
        if x.det() == 1 {
            sl2.push(*x);
        }
    });
    let sl2_set: HashSet<u64> = sl2.iter().map(|x| x.pack()).collect();

    let mut seeds: Vec<SubgroupSpec> = vec![SubgroupSpec::from_element_set(
        m,
        [ResidueMatrix::identity(m).pack()].into_iter().collect(),
    )];
    // perfect subgroups: trivial for 2- and 3-power moduli; SL₂ itself for
    // m ∈ {5, 7, 25} (and no proper nontrivial perfect subgroups there)
    if m == 5 || m == 7 || m == 25 {
        seeds.push(SubgroupSpec::from_element_set(m, sl2_set.clone()));
    }

    let mut classes: Vec<SubgroupSpec> = Vec::new();
    let mut by_fp: HashMap<Fingerprint, Vec<usize>> = HashMap::new();
    let mut queue: Vec<usize> = Vec::new();

    let try_add = |h: SubgroupSpec,
                       classes: &mut Vec<SubgroupSpec>,
                       by_fp: &mut HashMap<Fingerprint, Vec<usize>>,
                       queue: &mut Vec<usize>|
     -> Result<(), ClassifyError> {
        let fp = h.fingerprint()?;
        if let Some(bucket) = by_fp.get(&fp) {
            for &i in bucket {
                if h.conjugate_equal(&classes[i])? {
                    return Ok(());
                }
            }
        }
        by_fp.entry(fp).or_default().push(classes.len());
        queue.push(classes.len());
        classes.push(h);
        Ok(())
    };

    for s in seeds {
        try_add(s, &mut classes, &mut by_fp, &mut queue)?;
    }

    while let Some(i) = queue.pop() {
        let h = classes[i].clone();
        let h_elems = h.elements()?;
        let h_set: HashSet<u64> = h_elems.iter().map(|x| x.pack()).collect();
        // normalizer of H inside SL₂(Z/m)
        let gens = h.gens().to_vec();
        let mut norm: Vec<ResidueMatrix> = Vec::new();
        for x in &sl2 {
            let xi = x.mat_inv().unwrap();
            if gens.iter().all(|g| h_set.contains(&x.mat_mul(g).mat_mul(&xi).pack())) {
                norm.push(*x);
            }
        }
        // cosets of H in N(H), keeping one representative each
        let mut coset_reps: Vec<ResidueMatrix> = Vec::new();
        let mut seen_cosets: HashSet<u64> = HashSet::new();
        for x in &norm {
            let key = coset_key(&h_elems, x);
            if seen_cosets.insert(key) {
                coset_reps.push(*x);
            }
        }
        // prime-order cosets give the cyclic extensions
        let mut seen_ext: HashSet<Vec<u64>> = HashSet::new();
        for rep in &coset_reps {
            if h_set.contains(&rep.pack()) {
                continue;
            }
            // order of the coset in N/H
            let mut pow = *rep;
            let mut ord = 1u64;
            while !h_set.contains(&pow.pack()) {
                pow = pow.mat_mul(rep);
                ord += 1;
            }
            if factorize(ord).len() != 1 || factorize(ord)[0].1 != 1 {
                continue; // not prime order
            }
            // K = H ∪ H·rep ∪ … ∪ H·rep^(ord−1)
            let mut kset: HashSet<u64> = h_set.clone();
            let mut x = *rep;
            for _ in 1..ord {
                for he in &h_elems {
                    kset.insert(he.mat_mul(&x).pack());
                }
                x = x.mat_mul(rep);
            }
            let mut ksort: Vec<u64> = kset.iter().copied().collect();
            ksort.sort_unstable();
            if !seen_ext.insert(ksort) {
                continue;
            }
            let k = SubgroupSpec::from_element_set(m, kset);
            try_add(k, &mut classes, &mut by_fp, &mut queue)?;
        }
    }
    Ok(classes)
}

/// Subgroups of a small abstract group (given by its multiplication table)
/// whose order divides `n_target` and whose elements carry pairwise-distinct
/// labels, returned as index sets.  The label constraint is hereditary, so
/// pruning on it during the bottom-up search loses no valid subgroup.
fn small_subgroups(
    mul: &[Vec<usize>],
    id: usize,
    n_target: usize,
    label: &[u64],
) -> Vec<Vec<usize>> {
    let n = mul.len();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let trivial = vec![id];
    seen.insert(trivial.clone());
    let mut queue = vec![trivial.clone()];
    out.push(trivial);
    while let Some(h) = queue.pop() {
        if h.len() == n_target {
            continue;
        }
        let hset: HashSet<usize> = h.iter().copied().collect();
        for x in 0..n {
            if hset.contains(&x) {
                continue;
            }
            // closure of h ∪ {x}, aborted as soon as it exceeds the target
            let mut kset = hset.clone();
            kset.insert(x);
            'closure: loop {
                let mut grew = false;
                let items: Vec<usize> = kset.iter().copied().collect();
                for &a in &items {
                    for &b in &items {
                        if kset.insert(mul[a][b]) {
                            grew = true;
                            if kset.len() > n_target {
                                break 'closure;
                            }
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            if kset.len() > n_target || n_target % kset.len() != 0 {
                continue;
            }
            let labels: HashSet<u64> = kset.iter().map(|&i| label[i]).collect();
            if labels.len() != kset.len() {
                continue;
            }
            let mut ks: Vec<usize> = kset.into_iter().collect();
            ks.sort_unstable();
            if seen.insert(ks.clone()) {
                queue.push(ks.clone());
                out.push(ks);
            }
        }
    }
    out.retain(|h| h.len() == n_target || h.len() < n_target);
    out
}

/// Det-full subgroup classes of `GL₂(Z/m)` whose `SL₂`-part has genus-zero
/// modular curve: for each genus-zero `SL₂`-part class `S`, the groups `G`
/// with `G ∩ SL₂ = S` correspond to order-`φ(m)` subgroups of `N(S)/S` on
/// which `det` is a bijection onto `(Z/m)^×`.
fn det_full_genus0_classes(m: u64) -> Result<Vec<SubgroupSpec>, ClassifyError> {
    let phi = euler_phi(m);
    let mut out: Vec<SubgroupSpec> = Vec::new();
    for s in sl2_subgroup_classes(m)? {
        if modcurve::genus(&s)?.genus != 0 {
            continue;
        }
        let s_elems = s.elements()?;
        let s_set: HashSet<u64> = s_elems.iter().map(|x| x.pack()).collect();
        let gens = s.gens().to_vec();
        // normalizer of S in GL₂(Z/m)
        let mut norm: Vec<ResidueMatrix> = Vec::new();
        for_each_gl2(m, |x| {
            let xi = x.mat_inv().unwrap();
            if gens.iter().all(|g| s_set.contains(&x.mat_mul(g).mat_mul(&xi).pack())) {
                norm.push(*x);
            }
        });
        // quotient N/S as a small group
        let mut keys: Vec<u64> = Vec::new();
        let mut reps: Vec<ResidueMatrix> = Vec::new();
        let mut index: HashMap<u64, usize> = HashMap::new();
        for x in &norm {
            let key = coset_key(&s_elems, x);
            if !index.contains_key(&key) {
                index.insert(key, keys.len());
                keys.push(key);
                reps.push(*x);
            }
        }
        let q = keys.len();
        let mut mul = vec![vec![0usize; q]; q];
        for i in 0..q {
            for j in 0..q {
                mul[i][j] = index[&coset_key(&s_elems, &reps[i].mat_mul(&reps[j]))];
            }
        }
        let id = index[&coset_key(&s_elems, &ResidueMatrix::identity(m))];
        // dets are constant on cosets (det S = 1)
        let coset_det: Vec<u64> = reps.iter().map(|r| r.det()).collect();
        for hbar in small_subgroups(&mul, id, phi as usize, &coset_det) {
            if hbar.len() as u64 != phi {
                continue;
            }
            let dets: HashSet<u64> = hbar.iter().map(|&i| coset_det[i]).collect();
            if dets.len() as u64 != phi {
                continue; // det not bijective on the quotient subgroup
            }
            let mut set: HashSet<u64> = HashSet::new();
            for &i in &hbar {
                for se in &s_elems {
                    set.insert(se.mat_mul(&reps[i]).pack());
                }
            }
            out.push(SubgroupSpec::from_element_set(m, set));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// normal subgroups (for Goursat assembly)
// ---------------------------------------------------------------------------

/// All normal subgroups of `G`, by closing unions of conjugacy classes.
fn normal_subgroups(g: &SubgroupSpec) -> Result<Vec<SubgroupSpec>, ClassifyError> {
    let m = g.modulus();
    let elems = g.elements()?;
    let gens = g.gens().to_vec();
    // conjugacy classes of G
    let mut class_of: HashMap<u64, usize> = HashMap::new();
    let mut classes: Vec<Vec<ResidueMatrix>> = Vec::new();
    for x in &elems {
        if class_of.contains_key(&x.pack()) {
            continue;
        }
        let mut orbit = vec![*x];
        class_of.insert(x.pack(), classes.len());
        let mut frontier = vec![*x];
        while let Some(y) = frontier.pop() {
            for gg in &gens {
                let z = gg.mat_mul(&y).mat_mul(&gg.mat_inv().unwrap());
                if !class_of.contains_key(&z.pack()) {
                    class_of.insert(z.pack(), classes.len());
                    orbit.push(z);
                    frontier.push(z);
                }
            }
        }
        classes.push(orbit);
    }
    // BFS over normal subgroups
    let id_set: HashSet<u64> = [ResidueMatrix::identity(m).pack()].into_iter().collect();
    let mut found: Vec<HashSet<u64>> = vec![id_set.clone()];
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(vec![ResidueMatrix::identity(m).pack()]);
    let mut queue = vec![id_set];
    while let Some(nset) = queue.pop() {
        for class in &classes {
            if nset.contains(&class[0].pack()) {
                continue;
            }
            // normal closure of N ∪ class: generated set is conjugation-stable
            let mut kgens: Vec<ResidueMatrix> = Vec::new();
            let n_sub = SubgroupSpec::from_element_set(m, nset.clone());
            kgens.extend(n_sub.gens().iter().copied());
            kgens.extend(class.iter().copied());
            let k = SubgroupSpec::new(m, kgens)?;
            let mut ks = k.element_keys()?;
            ks.sort_unstable();
            if seen.insert(ks.clone()) {
                let kset: HashSet<u64> = ks.iter().copied().collect();
                queue.push(kset.clone());
                found.push(kset);
            }
        }
    }
    Ok(found.into_iter().map(|s| SubgroupSpec::from_element_set(m, s)).collect())
}

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

/// Options for [`classify`].
#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Allow the slow deep levels (48, 96).
    pub deep_levels: bool,
    /// Closure cap override.
    pub cap: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { deep_levels: false, cap: crate::grouplat::DEFAULT_CLOSURE_CAP }
    }
}

/// One classified group: representative, invariants and provenance data.
#[derive(Debug, Clone)]
pub struct ClassifiedGroup {
    pub group: SubgroupSpec,
    pub order: u64,
    pub minus_identity: bool,
    pub sl2_level: u64,
    pub missing: Vec<u64>,
    pub genus: GenusReport,
    pub fingerprint: Fingerprint,
}

/// JSON-friendly view of a [`ClassifiedGroup`].
#[derive(Debug, Clone, Serialize)]
pub struct ClassifiedGroupReport {
    pub m: u64,
    pub gens: Vec<[[u64; 2]; 2]>,
    pub order: u64,
    pub minus_identity: bool,
    pub sl2_level: u64,
    pub missing: Vec<u64>,
    pub genus: GenusReport,
}

impl ClassifiedGroup {
    pub fn report(&self) -> ClassifiedGroupReport {
        ClassifiedGroupReport {
            m: self.group.modulus(),
            gens: self
                .group
                .gens()
                .iter()
                .map(|x| [[x.a, x.b], [x.c, x.d]])
                .collect(),
            order: self.order,
            minus_identity: self.minus_identity,
            sl2_level: self.sl2_level,
            missing: self.missing.clone(),
            genus: self.genus,
        }
    }
}

const SUPPORTED_PRIME_POWERS: [u64; 11] = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32];

fn supported_factors(m: u64, deep: bool) -> Option<Vec<u64>> {
    if m < 2 {
        return None;
    }
    let fac = factorize(m);
    let parts: Vec<u64> = fac.iter().map(|&(p, e)| p.pow(e)).collect();
    if parts.iter().any(|pp| !SUPPORTED_PRIME_POWERS.contains(pp)) {
        return None;
    }
    if parts.len() > 2 {
        return None;
    }
    if !deep && (m == 48 || m == 96 || parts.iter().any(|&pp| pp >= 16)) {
        return None;
    }
    Some(parts)
}

/// Classify the ⊆̇-maximal new-missing-trace subgroup classes of the given
/// genus and level.  Levels must be supported prime powers or products of
/// two coprime supported prime powers; levels involving prime powers ≥ 16
/// require `deep_levels`.
pub fn classify(
    genus_target: u64,
    level: u64,
    opts: &ClassifyOptions,
) -> Result<Vec<ClassifiedGroup>, ClassifyError> {
    let parts =
        supported_factors(level, opts.deep_levels).ok_or(ClassifyError::UnsupportedLevel(level))?;
    let candidates: Vec<SubgroupSpec> = if parts.len() == 1 {
        det_full_genus0_classes(level)?
    } else {
        composite_candidates(parts[0], parts[1])?
    };
    // filter: exact level, det-full, new missing trace, genus
    let mut kept: Vec<ClassifiedGroup> = Vec::new();
    for g in candidates {
        if !g.det_surjective()? {
            continue;
        }
        if g.gl2_level()? != level {
            continue;
        }
        if !is_new_missing_trace(&g)? {
            continue;
        }
        let gr = modcurve::genus(&g)?;
        if gr.genus != genus_target {
            continue;
        }
        kept.push(ClassifiedGroup {
            order: g.order()?,
            minus_identity: g.has_minus_identity()?,
            sl2_level: g.sl2_level()?,
            missing: missing_traces(&g)?,
            genus: gr,
            fingerprint: g.fingerprint()?,
            group: g,
        });
    }
    // dedup: exact element set, then fingerprint + conjugacy
    let mut by_keys: HashMap<Vec<u64>, ClassifiedGroup> = HashMap::new();
    for c in kept {
        by_keys.entry(c.group.element_keys()?).or_insert(c);
    }
    let mut uniq: Vec<ClassifiedGroup> = Vec::new();
    'outer: for (_, c) in by_keys {
        for u in &uniq {
            if u.fingerprint == c.fingerprint && c.group.conjugate_equal(&u.group)? {
                continue 'outer;
            }
        }
        uniq.push(c);
    }
    // maximality filter
    let groups: Vec<SubgroupSpec> = uniq.iter().map(|c| c.group.clone()).collect();
    let maximal = maximal_filter(&groups)?;
    let maximal_keys: HashSet<Vec<u64>> = maximal
        .iter()
        .map(|g| g.element_keys())
        .collect::<Result<_, _>>()?;
    let mut out: Vec<ClassifiedGroup> = uniq
        .into_iter()
        .filter(|c| c.group.element_keys().map(|k| maximal_keys.contains(&k)).unwrap_or(false))
        .collect();
    // deterministic order: by (order desc, element encoding)
    out.sort_by(|a, b| {
        b.order
            .cmp(&a.order)
            .then_with(|| a.group.element_keys().unwrap().cmp(&b.group.element_keys().unwrap()))
    });
    Ok(out)
}

/// Candidates at composite level `m₁·m₂` via Goursat fibered products.
fn composite_candidates(m1: u64, m2: u64) -> Result<Vec<SubgroupSpec>, ClassifyError> {
    let full_trace = |g: &SubgroupSpec| -> Result<bool, ClassifyError> {
        Ok(g.trace_set()?.len() as u64 == g.modulus())
    };
    let mut pool1: Vec<SubgroupSpec> = Vec::new();
    for g in det_full_genus0_classes(m1)? {
        if full_trace(&g)? {
            pool1.push(g);
        }
    }
    let mut pool2: Vec<SubgroupSpec> = Vec::new();
    for g in det_full_genus0_classes(m2)? {
        if full_trace(&g)? {
            pool2.push(g);
        }
    }
    let norms1: Vec<Vec<SubgroupSpec>> =
        pool1.iter().map(normal_subgroups).collect::<Result<_, _>>()?;
    let norms2: Vec<Vec<SubgroupSpec>> =
        pool2.iter().map(normal_subgroups).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for (i1, g1) in pool1.iter().enumerate() {
        let o1 = g1.order()?;
        for (i2, g2) in pool2.iter().enumerate() {
            let o2 = g2.order()?;
            for k1 in &norms1[i1] {
                let n1 = o1 / k1.order()?;
                for k2 in &norms2[i2] {
                    let n2 = o2 / k2.order()?;
                    if n1 != n2 {
                        continue;
                    }
                    let q1 = quotient_table(g1, k1)?;
                    let q2 = quotient_table(g2, k2)?;
                    for iso in quotient_isos(&q1, &q2) {
                        let spec = FiberedProductSpec {
                            g1: g1.clone(),
                            k1: k1.clone(),
                            g2: g2.clone(),
                            k2: k2.clone(),
                            pairing: (0..q1.keys.len())
                                .map(|i| (q1.keys[i], q2.keys[iso[i]]))
                                .collect(),
                        };
                        out.push(fibered_product(&spec)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Drop every group contained (up to conjugacy) in a strictly larger group
/// from the same list.
pub fn maximal_filter(groups: &[SubgroupSpec]) -> Result<Vec<SubgroupSpec>, ClassifyError> {
    let mut keep = Vec::new();
    'outer: for (i, g) in groups.iter().enumerate() {
        let gi = g.order()?;
        for (j, h) in groups.iter().enumerate() {
            if i == j {
                continue;
            }
            if h.order()? > gi && g.conjugacy(h, ConjugacyMode::Contained)?.is_some() {
                continue 'outer;
            }
        }
        keep.push(g.clone());
    }
    Ok(keep)
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
    fn trace_predicates() {
        let h = g(3, &[[1, 1, 0, 1], [1, 0, 0, 2]]);
        assert_eq!(missing_traces(&h).unwrap(), vec![1]);
        assert!(is_new_missing_trace(&h).unwrap());
        assert_eq!(trace_fiber(&h, 2).unwrap().size(), 3);
        assert!(trace_fiber(&h, 1).unwrap().is_empty());
        // the full group has no missing trace
        assert!(!is_new_missing_trace(&SubgroupSpec::full_gl2(3)).unwrap());
    }

    #[test]
    fn goursat_roundtrip_direct_product() {
        // Borel(2) × full(3) as a level-6 group (trivial common quotient)
        let b6 = SubgroupSpec::borel(2).preimage(6).unwrap();
        let spec = goursat_decompose(&b6, 2, 3).unwrap();
        assert_eq!(spec.quotient_order(), 1);
        let back = fibered_product(&spec).unwrap();
        assert_eq!(back.element_keys().unwrap(), b6.element_keys().unwrap());
    }

    #[test]
    fn goursat_roundtrip_nontrivial() {
        // a genuinely fibered level-6 group from the catalog
        let h = g(6, &[[1, 1, 0, 5], [5, 1, 3, 2], [3, 2, 4, 3]]);
        assert_eq!(h.order().unwrap(), 48);
        let spec = goursat_decompose(&h, 2, 3).unwrap();
        assert!(spec.quotient_order() > 1);
        let back = fibered_product(&spec).unwrap();
        assert_eq!(back.element_keys().unwrap(), h.element_keys().unwrap());
    }

    #[test]
    fn fibered_product_rejects_bad_pairing() {
        let h = g(6, &[[1, 1, 0, 5], [5, 1, 3, 2], [3, 2, 4, 3]]);
        let mut spec = goursat_decompose(&h, 2, 3).unwrap();
        // corrupt the pairing: duplicate one target coset
        let first_target = spec.pairing[0].1;
        for p in spec.pairing.iter_mut() {
            p.1 = first_target;
        }
        assert!(matches!(fibered_product(&spec), Err(ClassifyError::PairingNotIso)));
    }

    #[test]
    fn classify_level_2_and_3() {
        let opts = ClassifyOptions::default();
        let r2 = classify(0, 2, &opts).unwrap();
        assert_eq!(r2.len(), 1);
        assert_eq!(r2[0].order, 2);
        assert_eq!(r2[0].missing, vec![1]);
        let r3 = classify(0, 3, &opts).unwrap();
        assert_eq!(r3.len(), 2);
        for c in &r3 {
            assert_eq!(c.order, 6);
            assert_eq!(c.missing, vec![1]);
        }
        assert!(!r3[0].group.conjugate_equal(&r3[1].group).unwrap());
    }

    #[test]
    fn classify_rejects_unsupported_level() {
        let opts = ClassifyOptions::default();
        assert!(matches!(classify(0, 11 * 13, &opts), Err(ClassifyError::UnsupportedLevel(_))));
        assert!(matches!(classify(0, 48, &opts), Err(ClassifyError::UnsupportedLevel(48))));
    }

    #[test]
    fn d_invariant_of_borel3() {
        let h = g(3, &[[1, 1, 0, 1], [1, 0, 0, 2], [2, 0, 0, 1]]);
        // S = upper unipotent (order 3), commutator contains it; d = 1 or 3
        let d = d_of_group(&h).unwrap();
        assert!(d == 1 || d == 3);
    }

    #[test]
    fn admissibility_examples() {
        // full GL₂(Z/4): every trace residue is hit by a matrix that is not
        // scalar mod 2, so it is not 2-admissible
        assert!(!is_d_admissible(&SubgroupSpec::full_gl2(4), 2).unwrap());
        // a missing-trace group has an empty fiber, which is vacuously
        // scalar: the level-2 group misses trace 1
        let h2 = g(2, &[[1, 1, 0, 1]]);
        assert!(is_d_admissible(&h2, 2).unwrap());
        // d = 1 is vacuously admissible for any group
        assert!(is_d_admissible(&h2, 1).unwrap());
    }

    #[test]
    fn maximal_filter_drops_contained() {
        let u = g(7, &[[1, 1, 0, 1]]);
        let borel = g(7, &[[1, 1, 0, 1], [3, 0, 0, 1], [1, 0, 0, 3]]);
        let kept = maximal_filter(&[u, borel.clone()]).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].order().unwrap(), borel.order().unwrap());
    }
}
