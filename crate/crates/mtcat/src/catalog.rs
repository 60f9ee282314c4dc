//! The reviewed-in catalog of the 52 genus-zero missing-trace groups and
//! their parametrizing curve families, with end-to-end verification suites.
//!
//! Two JSON files ship inside the crate:
//!
//! * `groups.json` — for each group: level `m`, generators mod `m`, order,
//!   `−I` membership, `SL₂`-level, and the missing trace residues;
//! * `families.json` — named rational-function definitions (`j`-maps,
//!   twists, and the auxiliary maps they compose from), the 50
//!   label → (j, d) family assignments, the composition/substitution
//!   identities tying the tables together, and the torsion-field data
//!   (division-polynomial factors and quadratic-subfield radicands).
//!
//! The data is *reviewed in*, not generated: the verification suites here
//! recompute every claimed invariant from scratch ([`verify_catalog`]),
//! check the expression identities exactly ([`run_identity_suite`]), run
//! randomized trace censuses against the missing residues
//! ([`census_suite`]), and confirm the torsion-factor and radicand claims
//! ([`torsion_suite`]).  Two groups — `8,2,1` and `9,5,1` — have no family:
//! their modular curves fail the rational-point criterion.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ecurve::{
    division_poly, specialize_exprs, trace_census, verify_torsion_factor, CurveInstance,
    EcurveError,
};
use crate::grouplat::{GroupError, SubgroupSpec};
use crate::modarith::{factorize, gl2_order, ResidueMatrix};
use crate::modcurve::{genus, sz_rational_point_test, ModCurveError};
use crate::mtclassify::{d_of_group, is_new_missing_trace, missing_traces, ClassifyError};
use crate::qpoly::{
    parse_expr, rational_roots, rational_sqrt, resultant, QPolyError, RatExpr, UniPoly, Q, Z,
};

/// Embedded group catalog (52 entries).
pub const GROUPS_JSON: &str = include_str!("../data/groups.json");
/// Embedded family/identity/torsion data.
pub const FAMILIES_JSON: &str = include_str!("../data/families.json");

/// Errors from catalog loading and verification.
#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog data does not parse: {0}")]
    Parse(String),
    #[error("unknown catalog label {0:?}")]
    UnknownLabel(String),
    #[error("group {0} has no parametrizing family")]
    NoFamily(String),
    #[error(transparent)]
    QPoly(#[from] QPolyError),
    #[error(transparent)]
    Ecurve(#[from] EcurveError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    ModCurve(#[from] ModCurveError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

// ---------------------------------------------------------------------------
// raw JSON shapes
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct RawGroups {
    groups: Vec<RawGroup>,
}

#[derive(Deserialize)]
struct RawGroup {
    label: String,
    m: u64,
    gens: Vec<[[i64; 2]; 2]>,
    order: u64,
    minus_identity: bool,
    sl2_level: u64,
    missing: Vec<u64>,
}

#[derive(Deserialize)]
struct RawFamilies {
    defs: Vec<RawDef>,
    families: Vec<RawFamily>,
    identities: Vec<RawIdentity>,
    torsion: RawTorsion,
    notes: Vec<String>,
}

#[derive(Deserialize)]
struct RawDef {
    name: String,
    #[serde(default)]
    expr: Option<String>,
    #[serde(default)]
    compose: Option<Vec<String>>,
    #[serde(default)]
    product: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct RawFamily {
    label: String,
    j: String,
    d: String,
}

#[derive(Deserialize)]
struct RawIdentity {
    name: String,
    lhs: RawSide,
    rhs: RawSide,
}

#[derive(Deserialize)]
struct RawSide {
    compose: Vec<String>,
}

#[derive(Deserialize)]
struct RawTorsion {
    linear3: RawLinear3,
    cubic7: RawCubic7,
    radicands: Vec<RawRadicand>,
}

#[derive(Deserialize)]
struct RawLinear3 {
    j: String,
    n: u32,
    x0: String,
    radicand: String,
}

#[derive(Deserialize)]
struct RawCubic7 {
    j: String,
    n: u32,
    c2: String,
    c1: String,
    c0: String,
}

#[derive(Deserialize)]
struct RawRadicand {
    j: String,
    n: u32,
    value: String,
}

// ---------------------------------------------------------------------------
// resolved catalog
// ---------------------------------------------------------------------------

/// A parametrizing family: `j`-map and twist, as resolved expressions.
#[derive(Debug, Clone)]
pub struct Family {
    /// Name of the `j`-map definition (e.g. `"j3_1"`).
    pub j_name: String,
    /// Name of the twist definition, or `"D"` for a free quadratic twist.
    pub d_name: String,
    pub j: RatExpr,
    pub d: RatExpr,
}

/// One catalog group with its recorded invariants and optional family.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    /// Label `m,i,k`.
    pub label: String,
    /// The (GL₂-) level `m`.
    pub m: u64,
    pub group: SubgroupSpec,
    /// Recorded group order.
    pub order: u64,
    /// Recorded `−I ∈ G`.
    pub minus_identity: bool,
    /// Recorded `SL₂`-level.
    pub sl2_level: u64,
    /// Recorded missing trace residues mod `m`.
    pub missing: Vec<u64>,
    pub family: Option<Family>,
}

/// A named exact rational-function identity from the tables.
#[derive(Debug, Clone)]
pub struct Identity {
    pub name: String,
    pub lhs: RatExpr,
    pub rhs: RatExpr,
}

impl Identity {
    /// Whether the identity holds exactly in `Q(t, D)`.
    pub fn holds(&self) -> bool {
        self.lhs.identity_eq(&self.rhs)
    }
}

/// Division-polynomial factor and radicand data for the torsion fields.
#[derive(Debug, Clone)]
pub struct TorsionData {
    /// `(j_name, j, x0)`: `x − x0` divides `ψ₃` of the generic level-3 curve.
    pub linear3: (String, RatExpr, RatExpr),
    /// `(j_name, j, [c0, c1, c2])`: monic cubic factor of `ψ₇` of the
    /// generic level-7 curve.
    pub cubic7: (String, RatExpr, Vec<RatExpr>),
    /// `(j_name, n, value)`: the torsion field of the generic curve contains
    /// `√value`; the first entry per `j` is the one anchored directly to the
    /// curve (torsion-point `y`-coordinate, resp. cubic-factor norm).
    pub radicands: Vec<(String, u32, RatExpr)>,
}

/// The fully resolved catalog.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    pub identities: Vec<Identity>,
    pub torsion: TorsionData,
    /// Free-text caveats shipped with the data.
    pub notes: Vec<String>,
    defs: HashMap<String, RatExpr>,
}

impl Catalog {
    pub fn entry(&self, label: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    /// A named expression from the definition table.
    pub fn def(&self, name: &str) -> Option<&RatExpr> {
        self.defs.get(name)
    }

    /// Specialize the family of `label` at `(t₀, D₀)`.
    pub fn specialize(&self, label: &str, t0: &Q, d0: &Q) -> Result<CurveInstance, CatalogError> {
        let entry = self
            .entry(label)
            .ok_or_else(|| CatalogError::UnknownLabel(label.to_string()))?;
        let fam = entry
            .family
            .as_ref()
            .ok_or_else(|| CatalogError::NoFamily(label.to_string()))?;
        Ok(specialize_exprs(&fam.j, &fam.d, t0, d0)?)
    }
}

/// Parse and resolve the embedded catalog.
pub fn load() -> Result<Catalog, CatalogError> {
    let raw_groups: RawGroups =
        serde_json::from_str(GROUPS_JSON).map_err(|e| CatalogError::Parse(e.to_string()))?;
    let raw_fams: RawFamilies =
        serde_json::from_str(FAMILIES_JSON).map_err(|e| CatalogError::Parse(e.to_string()))?;

    let defs = resolve_defs(&raw_fams.defs)?;
    let resolve = |name: &str| -> Result<RatExpr, CatalogError> {
        match defs.get(name) {
            Some(e) => Ok(e.clone()),
            None => Ok(parse_expr(name)?),
        }
    };
    let resolve_side = |side: &RawSide| -> Result<RatExpr, CatalogError> {
        compose_chain(&side.compose, &defs)
    };

    let mut families: HashMap<String, Family> = HashMap::new();
    for f in &raw_fams.families {
        families.insert(
            f.label.clone(),
            Family {
                j_name: f.j.clone(),
                d_name: f.d.clone(),
                j: resolve(&f.j)?,
                d: resolve(&f.d)?,
            },
        );
    }

    let mut entries = Vec::new();
    for g in &raw_groups.groups {
        let gens = g
            .gens
            .iter()
            .map(|m| ResidueMatrix::new(g.m, m[0][0], m[0][1], m[1][0], m[1][1]))
            .collect();
        entries.push(CatalogEntry {
            label: g.label.clone(),
            m: g.m,
            group: SubgroupSpec::new(g.m, gens)?,
            order: g.order,
            minus_identity: g.minus_identity,
            sl2_level: g.sl2_level,
            missing: g.missing.clone(),
            family: families.remove(&g.label),
        });
    }
    if !families.is_empty() {
        let orphan = families.keys().next().unwrap().clone();
        return Err(CatalogError::UnknownLabel(orphan));
    }

    let mut identities = Vec::new();
    for id in &raw_fams.identities {
        identities.push(Identity {
            name: id.name.clone(),
            lhs: resolve_side(&id.lhs)?,
            rhs: resolve_side(&id.rhs)?,
        });
    }

    let t = &raw_fams.torsion;
    let torsion = TorsionData {
        linear3: (t.linear3.j.clone(), resolve(&t.linear3.j)?, parse_expr(&t.linear3.x0)?),
        cubic7: (
            t.cubic7.j.clone(),
            resolve(&t.cubic7.j)?,
            vec![
                parse_expr(&t.cubic7.c0)?,
                parse_expr(&t.cubic7.c1)?,
                parse_expr(&t.cubic7.c2)?,
            ],
        ),
        radicands: t
            .radicands
            .iter()
            .map(|r| Ok((r.j.clone(), r.n, parse_expr(&r.value)?)))
            .collect::<Result<_, CatalogError>>()?,
    };
    debug_assert_eq!(t.linear3.n, 3);
    debug_assert_eq!(t.cubic7.n, 7);
    let _ = &t.linear3.radicand; // duplicated in the radicand list

    Ok(Catalog { entries, identities, torsion, notes: raw_fams.notes, defs })
}

/// Resolve the named definitions (plain expressions, compositions
/// `f ∘ g ∘ h` written left-to-right, and products) in dependency order.
fn resolve_defs(raw: &[RawDef]) -> Result<HashMap<String, RatExpr>, CatalogError> {
    let mut out: HashMap<String, RatExpr> = HashMap::new();
    // definitions only refer backwards, so one pass suffices
    for d in raw {
        let expr = if let Some(e) = &d.expr {
            parse_expr(e)?
        } else if let Some(items) = &d.compose {
            compose_chain(items, &out)?
        } else if let Some(items) = &d.product {
            let mut acc = RatExpr::from_int(1);
            for item in items {
                let e = match out.get(item.as_str()) {
                    Some(e) => e.clone(),
                    None => parse_expr(item)?,
                };
                acc = acc.mul(&e);
            }
            acc
        } else {
            return Err(CatalogError::Parse(format!("definition {} has no body", d.name)));
        };
        out.insert(d.name.clone(), expr);
    }
    Ok(out)
}

/// `items = [f, g, h]` ↦ `f ∘ g ∘ h`; each item is a definition name or an
/// inline expression.
fn compose_chain(
    items: &[String],
    defs: &HashMap<String, RatExpr>,
) -> Result<RatExpr, CatalogError> {
    let get = |name: &str| -> Result<RatExpr, CatalogError> {
        match defs.get(name) {
            Some(e) => Ok(e.clone()),
            None => Ok(parse_expr(name)?),
        }
    };
    let mut acc = get(items.last().ok_or_else(|| {
        CatalogError::Parse("empty composition".to_string())
    })?)?;
    for item in items[..items.len() - 1].iter().rev() {
        acc = get(item)?.compose(&acc)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// verification: groups
// ---------------------------------------------------------------------------

/// Recomputed invariants of one catalog entry.
#[derive(Debug, Clone, Serialize)]
pub struct EntryReport {
    pub label: String,
    /// Closure order equals the recorded order.
    pub order_ok: bool,
    pub det_surjective: bool,
    /// `gl2_level(G) = m` (the level is exact, not just a modulus).
    pub level_ok: bool,
    pub sl2_level_ok: bool,
    pub minus_identity_ok: bool,
    pub genus: u64,
    pub genus_ok: bool,
    /// Missing traces match the record and survive every proper reduction.
    pub missing_ok: bool,
    /// Level bound: `m_SL | m_GL`, `m_GL/m_SL ∈ {1, 2}`, and
    /// `m_GL | d_G·m_SL` for the commutator invariant `d_G`.
    pub level_bound_ok: bool,
    /// Rational-point criterion at prime-power level (`None` otherwise);
    /// must equal "a family exists".
    pub sz_rational_point: Option<bool>,
    pub family_ok: bool,
}

impl EntryReport {
    pub fn ok(&self) -> bool {
        self.order_ok
            && self.det_surjective
            && self.level_ok
            && self.sl2_level_ok
            && self.minus_identity_ok
            && self.genus_ok
            && self.missing_ok
            && self.level_bound_ok
            && self.family_ok
    }
}

/// Full catalog verification report.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub entries: Vec<EntryReport>,
    /// Labels are unique.
    pub labels_unique: bool,
    /// No two same-level entries are conjugate.
    pub pairwise_distinct: bool,
    /// No same-level entry is conjugate into another.
    pub maximal_within_level: bool,
    /// Cross-level containments (expected empty): `(contained, container)`.
    pub cross_level_containments: Vec<(String, String)>,
    pub count_by_level: BTreeMap<u64, usize>,
    pub ok: bool,
}

/// Recompute every claimed invariant of the catalog from scratch.
pub fn verify_catalog(cat: &Catalog) -> Result<VerifyReport, CatalogError> {
    let mut entries = Vec::new();
    for e in &cat.entries {
        let g = &e.group;
        let genus_report = genus(g)?;
        let missing = missing_traces(g)?;
        let m_gl = g.gl2_level()?;
        let m_sl = g.sl2_level()?;
        let d_g = d_of_group(g)?;
        let ratio_ok = m_sl != 0 && m_gl % m_sl == 0 && (m_gl / m_sl == 1 || m_gl / m_sl == 2);
        let sz = if factorize(e.m).len() == 1 {
            Some(sz_rational_point_test(g)?)
        } else {
            None
        };
        entries.push(EntryReport {
            label: e.label.clone(),
            order_ok: g.order()? == e.order,
            det_surjective: g.det_surjective()?,
            level_ok: m_gl == e.m,
            sl2_level_ok: m_sl == e.sl2_level,
            minus_identity_ok: g.has_minus_identity()? == e.minus_identity,
            genus: genus_report.genus,
            genus_ok: genus_report.genus == 0,
            missing_ok: missing == e.missing && !missing.is_empty() && is_new_missing_trace(g)?,
            level_bound_ok: ratio_ok && (d_g * m_sl) % m_gl == 0,
            sz_rational_point: sz,
            // the family exists exactly when the curve has rational points
            family_ok: sz.map_or(e.family.is_some(), |has_pt| has_pt == e.family.is_some()),
        });
    }

    let mut labels: Vec<&str> = cat.entries.iter().map(|e| e.label.as_str()).collect();
    labels.sort_unstable();
    let labels_unique = labels.windows(2).all(|w| w[0] != w[1]);

    let mut pairwise_distinct = true;
    let mut maximal_within_level = true;
    for (i, a) in cat.entries.iter().enumerate() {
        for b in cat.entries.iter().skip(i + 1) {
            if a.m != b.m {
                continue;
            }
            if a.group.conjugate_equal(&b.group)? {
                pairwise_distinct = false;
            }
            if a.group.conjugate_contained(&b.group)? || b.group.conjugate_contained(&a.group)? {
                maximal_within_level = false;
            }
        }
    }

    let cross_level_containments = cross_level_audit(cat)?;

    let mut count_by_level: BTreeMap<u64, usize> = BTreeMap::new();
    for e in &cat.entries {
        *count_by_level.entry(e.m).or_insert(0) += 1;
    }

    let ok = entries.iter().all(EntryReport::ok)
        && labels_unique
        && pairwise_distinct
        && maximal_within_level
        && cross_level_containments.is_empty();
    Ok(VerifyReport {
        entries,
        labels_unique,
        pairwise_distinct,
        maximal_within_level,
        cross_level_containments,
        count_by_level,
        ok,
    })
}

/// Search for containments between entries of *different* levels:
/// `G ⊆̇ H` (as open subgroups of `GL₂(Ẑ)`) iff the full preimage of
/// `G(gcd)` in `GL₂(Z/m_H)` is conjugate-contained in `H`.  An order
/// prefilter removes almost every pair.
fn cross_level_audit(cat: &Catalog) -> Result<Vec<(String, String)>, CatalogError> {
    let mut found = Vec::new();
    for a in &cat.entries {
        for b in &cat.entries {
            if a.m == b.m {
                continue;
            }
            let g = num_integer::Integer::gcd(&a.m, &b.m);
            if g < 2 {
                continue; // preimage is all of GL₂(Z/m_b), never contained
            }
            // |preimage| = |A(g)|·|GL₂(m_b)|/|GL₂(g)| must divide |B|
            let ag = a.group.reduce(g)?;
            let pre_order = ag.order()? * (gl2_order(b.m) / gl2_order(g));
            if pre_order == 0 || b.order % pre_order != 0 {
                continue;
            }
            let pre = ag.preimage(b.m)?;
            if pre.conjugate_contained(&b.group)? {
                found.push((a.label.clone(), b.label.clone()));
            }
        }
    }
    Ok(found)
}

// ---------------------------------------------------------------------------
// verification: identities
// ---------------------------------------------------------------------------

/// Result of checking the expression identities.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// `(name, holds)` per identity, in file order.
    pub identities: Vec<(String, bool)>,
    pub ok: bool,
}

/// Check every composition/substitution identity exactly in `Q(t, D)`.
pub fn run_identity_suite(cat: &Catalog) -> IdentityReport {
    let identities: Vec<(String, bool)> =
        cat.identities.iter().map(|i| (i.name.clone(), i.holds())).collect();
    let ok = identities.iter().all(|(_, h)| *h);
    IdentityReport { identities, ok }
}

// ---------------------------------------------------------------------------
// verification: censuses
// ---------------------------------------------------------------------------

/// Census outcome for one family.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyCensusReport {
    pub label: String,
    /// The `(t₀, D₀)` pairs actually censused.
    pub specializations: Vec<(String, String)>,
    /// Every recorded missing residue had count 0 in every census.
    pub missing_ok: bool,
}

/// Result of the randomized census suite.
#[derive(Debug, Clone, Serialize)]
pub struct CensusSuiteReport {
    pub bound: u64,
    pub families: Vec<FamilyCensusReport>,
    /// The deliberately mis-twisted curve exhibits the residue the correct
    /// twist forbids.
    pub negative_control_ok: bool,
    pub ok: bool,
}

/// For every family, census `a_p mod m` at `n_spec` random nonsingular
/// specializations over good `p ≤ bound` and check the recorded missing
/// residues never occur.  The negative control negates the `3,1,1` twist
/// (changing its square class away from the discriminant class) and checks
/// that the previously missing residue reappears.
pub fn census_suite(
    cat: &Catalog,
    bound: u64,
    n_spec: usize,
    seed: u64,
) -> Result<CensusSuiteReport, CatalogError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut families = Vec::new();
    for e in &cat.entries {
        let Some(fam) = &e.family else { continue };
        let mut specializations = Vec::new();
        let mut missing_ok = true;
        let mut attempts = 0;
        while specializations.len() < n_spec && attempts < 300 {
            attempts += 1;
            let t0 = random_rational(&mut rng);
            let d0 = random_nonzero(&mut rng);
            let Ok(curve) = specialize_exprs(&fam.j, &fam.d, &t0, &d0) else { continue };
            let census = trace_census(&curve, e.m, bound);
            if e.missing.iter().any(|&r| census.counts[r as usize] != 0) {
                missing_ok = false;
            }
            specializations.push((t0.to_string(), d0.to_string()));
        }
        if specializations.len() < n_spec {
            missing_ok = false; // could not find enough nonsingular points
        }
        families.push(FamilyCensusReport { label: e.label.clone(), specializations, missing_ok });
    }

    // negative control: twisting 𝓔_{3,1,1} by −1 (a non-square multiple
    // that, unlike −3, is not the discriminant class of the family) flips
    // a_p at p ≡ 3 mod 4 and must *hit* the forbidden residue 1 mod 3
    let negative_control_ok = match cat.entry("3,1,1").and_then(|e| e.family.as_ref()) {
        Some(fam) => {
            let one = Q::from_integer(Z::from(1));
            let wrong_d = fam.d.neg();
            let curve = specialize_exprs(&fam.j, &wrong_d, &one, &one)?;
            let census = trace_census(&curve, 3, bound);
            census.counts[1] != 0
        }
        None => false,
    };

    let ok = families.iter().all(|f| f.missing_ok) && negative_control_ok;
    Ok(CensusSuiteReport { bound, families, negative_control_ok, ok })
}

fn random_rational(rng: &mut ChaCha8Rng) -> Q {
    let num = rng.gen_range(-12i64..=12);
    let den = rng.gen_range(1i64..=3);
    Q::new(Z::from(num), Z::from(den))
}

fn random_nonzero(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let q = random_rational(rng);
        if !q.is_zero() {
            return q;
        }
    }
}

// ---------------------------------------------------------------------------
// verification: torsion factors and radicands
// ---------------------------------------------------------------------------

/// Result of the torsion-field suite.
#[derive(Debug, Clone, Serialize)]
pub struct TorsionReport {
    /// `x − x₀` divides `ψ₃` of the generic level-3 curve at all samples.
    pub linear3_divides: bool,
    /// The recorded cubic divides `ψ₇` of the generic level-7 curve.
    pub cubic7_divides: bool,
    /// Per `j`-map: the anchored radicand matches the curve (torsion-point
    /// `y`-class for `n ∈ {3, 5}`, cubic-norm class for `n = 7`).
    pub anchored: Vec<(String, bool)>,
    /// Per `j`-map: the two radicands differ by the cyclotomic class
    /// (`−3`, `5`, `−7` for `n = 3, 5, 7`).
    pub pairs: Vec<(String, bool)>,
    pub ok: bool,
}

/// Sample points per `j`-map, chosen nonsingular and (for `n ∈ {3, 5}`)
/// such that the division polynomial has rational roots.
fn torsion_samples(j_name: &str) -> Vec<(Q, Q)> {
    let q = |n: i64| Q::from_integer(Z::from(n));
    match j_name {
        "j3_1" => vec![(q(1), q(1)), (q(2), q(-1)), (q(5), q(2))],
        // ψ₅ of this curve has rational roots only at t₀ = ±1
        "j5_2" => vec![(q(1), q(1)), (q(1), q(2)), (q(-1), q(1))],
        _ => vec![(q(1), q(1)), (q(2), q(1)), (q(3), q(2))],
    }
}

/// Nonzero rationals in the same square class: `ab` a square.
fn same_square_class(a: &Q, b: &Q) -> bool {
    !a.is_zero() && !b.is_zero() && rational_sqrt(&(a * b)).is_some()
}

/// Verify the division-polynomial factors and quadratic-subfield radicands
/// of the torsion data against exact curve computations.
pub fn torsion_suite(cat: &Catalog) -> Result<TorsionReport, CatalogError> {
    let t = &cat.torsion;
    let free = RatExpr::var_d();

    let (j3_name, j3, x0) = &t.linear3;
    let linear3_divides =
        verify_torsion_factor(j3, 3, &[x0.neg()], &torsion_samples(j3_name))?;

    let (j7_name, j7, cubic) = &t.cubic7;
    let cubic7_divides =
        verify_torsion_factor(j7, 7, cubic, &torsion_samples(j7_name))?;

    // group radicands by j-map, preserving order
    let mut by_j: Vec<(String, u32, Vec<&RatExpr>)> = Vec::new();
    for (name, n, value) in &t.radicands {
        match by_j.iter_mut().find(|(jn, _, _)| jn == name) {
            Some((_, _, vs)) => vs.push(value),
            None => by_j.push((name.clone(), *n, vec![value])),
        }
    }

    let mut anchored = Vec::new();
    let mut pairs = Vec::new();
    for (j_name, n, values) in &by_j {
        let j = cat
            .def(j_name)
            .ok_or_else(|| CatalogError::UnknownLabel(j_name.clone()))?
            .clone();
        let samples = torsion_samples(j_name);
        let primary = values[0];

        let mut anchor_ok = true;
        let mut roots_seen = false;
        for (t0, d0) in &samples {
            let curve = specialize_exprs(&j, &free, t0, d0)?;
            let want = primary.eval(t0, d0)?;
            if *n == 7 {
                // no rational 7-torsion x-coordinate exists; anchor via the
                // norm of y² over the cubic factor: ∏ (x₀³+Ax₀+B) is in the
                // same square class as the radicand
                let coeffs: Vec<Q> = cubic
                    .iter()
                    .map(|c| c.eval(t0, d0))
                    .collect::<Result<_, _>>()?;
                let mut cs = coeffs;
                cs.push(Q::from_integer(Z::from(1)));
                let cubic_poly = UniPoly::from_coeffs(cs);
                let f = UniPoly::from_coeffs(vec![
                    curve.b.clone(),
                    curve.a.clone(),
                    Q::zero(),
                    Q::from_integer(Z::from(1)),
                ]);
                let norm = resultant(&cubic_poly, &f);
                roots_seen = true;
                if !same_square_class(&norm, &want) {
                    anchor_ok = false;
                }
            } else {
                let psi = division_poly(&curve, *n)?;
                for x0 in rational_roots(&psi) {
                    let v = x0.pow(3) + &curve.a * &x0 + &curve.b;
                    if v.is_zero() {
                        continue;
                    }
                    roots_seen = true;
                    if !same_square_class(&v, &want) {
                        anchor_ok = false;
                    }
                }
            }
        }
        anchored.push((j_name.clone(), anchor_ok && roots_seen));

        // both radicands generate subfields of the same torsion field: they
        // differ exactly by the cyclotomic quadratic class
        let cyclo = Q::from_integer(Z::from(match n {
            3 => -3,
            5 => 5,
            _ => -7,
        }));
        let mut pair_ok = values.len() == 2;
        if pair_ok {
            for (t0, d0) in &samples {
                let r1 = values[0].eval(t0, d0)?;
                let r2 = values[1].eval(t0, d0)?;
                if !same_square_class(&(r1 * r2), &cyclo) {
                    pair_ok = false;
                }
            }
        }
        pairs.push((j_name.clone(), pair_ok));
    }

    let _ = j7_name;
    let ok = linear3_divides
        && cubic7_divides
        && anchored.iter().all(|(_, b)| *b)
        && pairs.iter().all(|(_, b)| *b);
    Ok(TorsionReport { linear3_divides, cubic7_divides, anchored, pairs, ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(Z::from(n))
    }

    #[test]
    fn catalog_loads_and_counts() {
        let cat = load().unwrap();
        assert_eq!(cat.entries.len(), 52);
        let with_family = cat.entries.iter().filter(|e| e.family.is_some()).count();
        assert_eq!(with_family, 50);
        for label in ["8,2,1", "9,5,1"] {
            assert!(cat.entry(label).unwrap().family.is_none(), "{label}");
        }
        assert_eq!(cat.identities.len(), 21);
        assert!(!cat.notes.is_empty());
    }

    #[test]
    fn specialization_examples() {
        let cat = load().unwrap();
        // 𝓔_{3,1,1}(1, 1) has j = 54000 and a rational 3-torsion
        // x-coordinate: 18·d(1)·(t+1)(t+9)/(t²−18t−27)|_{t=1} = 2700/121
        // on the twist-absorbed model (d(1) = −30/11)
        let e3 = cat.specialize("3,1,1", &q(1), &q(1)).unwrap();
        assert_eq!(e3.j, q(54000));
        let psi3 = division_poly(&e3, 3).unwrap();
        assert!(psi3.eval(&Q::new(Z::from(2700), Z::from(121))).is_zero());
        // the label exists but has no family
        assert!(matches!(
            cat.specialize("8,2,1", &q(1), &q(1)),
            Err(CatalogError::NoFamily(_))
        ));
        assert!(matches!(
            cat.specialize("99,1,1", &q(1), &q(1)),
            Err(CatalogError::UnknownLabel(_))
        ));
        // j_{2,1}(−1) = 0 is singular
        assert!(matches!(
            cat.specialize("2,1,1", &q(-1), &q(1)),
            Err(CatalogError::Ecurve(EcurveError::SingularSpecialization(_)))
        ));
    }

    #[test]
    fn identity_suite_and_negative_control() {
        let cat = load().unwrap();
        let report = run_identity_suite(&cat);
        assert!(report.ok, "failing identities: {:?}", report
            .identities
            .iter()
            .filter(|(_, h)| !h)
            .collect::<Vec<_>>());
        // negative control: a sign flip breaks an identity
        let lhs = cat.def("j3_1").unwrap().clone();
        let flipped = Identity { name: "flip".into(), lhs: lhs.clone(), rhs: lhs.neg() };
        assert!(!flipped.holds());
    }

    #[test]
    fn torsion_suite_passes() {
        let cat = load().unwrap();
        let report = torsion_suite(&cat).unwrap();
        assert!(report.linear3_divides);
        assert!(report.cubic7_divides);
        assert!(report.ok, "{report:?}");
        assert_eq!(report.anchored.len(), 4);
    }

    #[test]
    fn census_small_smoke() {
        let cat = load().unwrap();
        // one deterministic specialization per family at a small bound is
        // enough for a smoke signal; the full run lives in the acceptance
        // suite
        let e3 = cat.specialize("3,1,1", &q(1), &q(1)).unwrap();
        let census = trace_census(&e3, 3, 300);
        assert_eq!(census.missing(), vec![1]);
        // the sibling family 3,1,2 (twist −3·d) keeps the same missing
        // residue — χ₋₃ is trivial exactly on p ≡ 1 mod 3
        let e32 = cat.specialize("3,1,2", &q(1), &q(1)).unwrap();
        let census2 = trace_census(&e32, 3, 300);
        assert_eq!(census2.missing(), vec![1]);
        // a −1 twist is a genuinely wrong twist: residue 1 appears
        let fam = cat.entry("3,1,1").unwrap().family.as_ref().unwrap();
        let wrong = specialize_exprs(&fam.j, &fam.d.neg(), &q(1), &q(1)).unwrap();
        let census3 = trace_census(&wrong, 3, 300);
        assert!(census3.counts[1] > 0);
    }

    #[test]
    fn verify_catalog_level_2_entry() {
        // exercise the per-entry checks on a small slice: level ≤ 4
        let cat = load().unwrap();
        let small = Catalog {
            entries: cat.entries.iter().filter(|e| e.m <= 4).cloned().collect(),
            identities: Vec::new(),
            torsion: cat.torsion.clone(),
            notes: cat.notes.clone(),
            defs: cat.defs.clone(),
        };
        let report = verify_catalog(&small).unwrap();
        assert!(report.ok, "{report:?}");
        assert_eq!(report.count_by_level.get(&2), Some(&1));
        assert_eq!(report.count_by_level.get(&3), Some(&2));
        assert_eq!(report.count_by_level.get(&4), Some(&1));
    }

    #[test]
    fn verify_catalog_rejects_duplicate() {
        let cat = load().unwrap();
        let mut entries: Vec<CatalogEntry> =
            cat.entries.iter().filter(|e| e.m == 3).cloned().collect();
        entries.push(entries[0].clone());
        let dup = Catalog {
            entries,
            identities: Vec::new(),
            torsion: cat.torsion.clone(),
            notes: Vec::new(),
            defs: cat.defs.clone(),
        };
        let report = verify_catalog(&dup).unwrap();
        assert!(!report.labels_unique);
        assert!(!report.pairwise_distinct);
        assert!(!report.ok);
    }
}
