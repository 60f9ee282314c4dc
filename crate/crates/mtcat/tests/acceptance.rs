//! End-to-end acceptance suite.  Each test is one acceptance criterion, so
//! the `cargo test` output carries one pass/fail line per criterion.

use std::time::Instant;

use mtcat::catalog::{self, Catalog};
use mtcat::ecurve::{ap_scan, LongCurve};
use mtcat::grouplat::SubgroupSpec;
use mtcat::ltconst::{euler_factor, lt_truncated, PRIME_CAP};
use mtcat::modarith::factorize;
use mtcat::modcurve::{genus, sz_rational_point_test};
use mtcat::mtclassify::{
    classify, d_of_group, fibered_product, goursat_decompose, trace_fiber, ClassifyOptions,
};
use mtcat::qpoly::{Q, Z};

fn cat() -> Catalog {
    catalog::load().expect("catalog loads")
}

/// Criterion 1: the three golden a_p-mod-m scans match exactly, each < 1 s.
#[test]
fn acceptance_01_golden_ap_scans() {
    let cases: [(&LongCurve, u64, u64, &[u64]); 3] = [
        (
            &LongCurve::new(1, -1, 1, -56, 163),
            3,
            150,
            &[
                0, 2, 0, 2, 0, 2, 0, 0, 2, 2, 0, 2, 0, 0, 0, 2, 2, 0, 2, 2, 0, 0, 2, 0, 2, 0, 2,
                0, 2, 0, 0, 2, 0,
            ],
        ),
        (
            &LongCurve::new(0, 0, 0, -15876, -777924),
            6,
            150,
            &[
                4, 4, 5, 2, 5, 4, 0, 5, 0, 0, 5, 0, 2, 2, 5, 1, 2, 5, 5, 4, 0, 1, 0, 1, 0, 1, 0,
                5, 4, 0, 0, 4,
            ],
        ),
        (
            &LongCurve::new(0, 0, 0, -7138223372, 232131092574192),
            28,
            580,
            &[
                0, 1, 2, 26, 25, 22, 24, 19, 10, 9, 26, 22, 2, 24, 1, 10, 6, 10, 10, 16, 21, 21,
                25, 22, 18, 23, 6, 20, 0, 19, 16, 11, 4, 17, 6, 16, 21, 16, 5, 24, 19, 15, 10,
                26, 0, 14, 1, 3, 6, 14, 14, 21, 4, 18, 14, 3, 27, 14, 5, 14, 18, 21, 27, 20, 27,
                16, 9, 25, 24, 0, 11, 22, 6, 3, 13, 10, 25, 2, 19, 18, 21, 20, 4, 6, 3, 2, 6, 20,
                4, 12, 26, 18, 26, 21, 14, 8, 11, 26, 23, 4, 3, 16, 18,
            ],
        ),
    ];
    for (curve, m, bound, expected) in cases {
        let start = Instant::now();
        let census = ap_scan(curve, m, bound);
        let elapsed = start.elapsed();
        assert_eq!(census.sequence, expected, "scan mod {m} up to {bound}");
        assert!(elapsed.as_secs_f64() < 1.0, "scan mod {m} took {elapsed:?}");
    }
    println!("criterion 1 (golden a_p scans): PASS");
}

/// Criterion 2: classification reproduces the catalog counts per level,
/// levels <= 12 in under a minute each and 14/28 in under ten minutes.
#[test]
fn acceptance_02_classification_counts() {
    let expected: [(u64, usize); 12] = [
        (2, 1),
        (3, 2),
        (4, 1),
        (5, 4),
        (6, 4),
        (7, 6),
        (8, 2),
        (9, 5),
        (10, 5),
        (12, 5),
        (14, 12),
        (28, 5),
    ];
    let opts = ClassifyOptions::default();
    let mut total = 0;
    for (level, count) in expected {
        let start = Instant::now();
        let groups = classify(0, level, &opts).expect("classification succeeds");
        let elapsed = start.elapsed();
        assert_eq!(groups.len(), count, "group count at level {level}");
        let limit = if level <= 12 { 60.0 } else { 600.0 };
        assert!(elapsed.as_secs_f64() < limit, "level {level} took {elapsed:?}");
        total += count;
    }
    assert_eq!(total, 52);
    println!("criterion 2 (classification counts 52 = 1+2+1+4+4+6+2+5+5+5+12+5): PASS");
}

/// Criterion 3: genus 0 for all 52 catalog groups, and the coset-action genus
/// matches the classical X_0(N) formulas for N in 2..=30.
#[test]
fn acceptance_03_genus_suite() {
    let cat = cat();
    assert_eq!(cat.entries.len(), 52);
    for e in &cat.entries {
        let g = genus(&e.group).expect("genus computes");
        assert_eq!(g.genus, 0, "genus of {}", e.label);
    }
    for n in 2..=30u64 {
        let r = genus(&SubgroupSpec::borel(n)).expect("Borel genus computes");
        let (mu, nu2, nu3, cusps, g) = x0_classical(n);
        assert_eq!(
            (r.mu, r.nu2, r.nu3, r.cusps, r.genus),
            (mu, nu2, nu3, cusps, g),
            "X0({n})"
        );
    }
    println!("criterion 3 (genus 0 for all 52; X0(N) oracle 2..=30): PASS");
}

/// Classical invariants of X_0(N): index, elliptic points, cusps, genus.
fn x0_classical(n: u64) -> (u64, u64, u64, u64, u64) {
    let primes: Vec<u64> = factorize(n).iter().map(|&(p, _)| p).collect();
    let mut mu = n;
    for &p in &primes {
        mu = mu / p * (p + 1);
    }
    let nu2 = if n % 4 == 0 {
        0
    } else {
        primes
            .iter()
            .map(|&p| match p % 4 {
                1 => 2,
                3 => 0,
                _ => 1, // p = 2
            })
            .product()
    };
    let nu3 = if n % 9 == 0 {
        0
    } else {
        primes
            .iter()
            .map(|&p| match p % 3 {
                1 => 2,
                2 => 0,
                _ => 1, // p = 3
            })
            .product()
    };
    let phi = |m: u64| (1..=m).filter(|k| gcd(*k, m) == 1).count() as u64;
    let cusps: u64 = (1..=n).filter(|d| n % d == 0).map(|d| phi(gcd(d, n / d))).sum();
    // 12g = 12 + mu - 3*nu2 - 4*nu3 - 6*cusps
    let g = (12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps) / 12;
    (mu, nu2, nu3, cusps, g)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Criterion 4: rational-point criterion on the level-8 and level-9 curves.
#[test]
fn acceptance_04_rational_point_tests() {
    let cat = cat();
    let expected = [("8,1,1", true), ("8,2,1", false), ("9,5,1", false)];
    for (label, want) in expected {
        let e = cat.entry(label).expect("catalog label exists");
        let got = sz_rational_point_test(&e.group).expect("test runs");
        assert_eq!(got, want, "rational point on X for {label}");
    }
    println!("criterion 4 (rational points: 8,1 yes; 8,2 no; 9,5 no): PASS");
}

/// Criterion 5: level bounds for every catalog group.
#[test]
fn acceptance_05_level_bounds() {
    let cat = cat();
    for e in &cat.entries {
        let m_gl = e.group.gl2_level().expect("gl2 level");
        let m_sl = e.group.sl2_level().expect("sl2 level");
        let d_g = d_of_group(&e.group).expect("d_G");
        assert_eq!(m_gl, e.m, "gl2 level of {}", e.label);
        assert_eq!(m_gl % m_sl, 0, "sl2 | gl2 for {}", e.label);
        let ratio = m_gl / m_sl;
        assert!(ratio == 1 || ratio == 2, "ratio {} for {}", ratio, e.label);
        assert_eq!((d_g * m_sl) % m_gl, 0, "gl2 | d_G*sl2 for {}", e.label);
    }
    println!("criterion 5 (level bounds: sl2 | gl2, ratio in {{1,2}}, gl2 | d_G*sl2): PASS");
}

/// Criterion 6: Goursat decompose-then-rebuild is the identity on every
/// composite-level catalog group, with common quotient of order 2, 3, or 6.
#[test]
fn acceptance_06_goursat_round_trip() {
    let cat = cat();
    let mut composite = 0;
    for e in &cat.entries {
        let fac = factorize(e.m);
        if fac.len() < 2 {
            continue;
        }
        composite += 1;
        let (p, k) = fac[0];
        let m1 = p.pow(k);
        let spec = goursat_decompose(&e.group, m1, e.m / m1).expect("decomposition");
        let q = spec.quotient_order();
        assert!(q == 2 || q == 3 || q == 6, "quotient order {q} for {}", e.label);
        let back = fibered_product(&spec).expect("rebuild");
        assert_eq!(
            back.element_keys().unwrap(),
            e.group.element_keys().unwrap(),
            "round trip for {}",
            e.label
        );
    }
    assert_eq!(composite, 31, "levels 6, 10, 12, 14, 28 hold 4+5+5+12+5 entries");
    println!("criterion 6 (Goursat round-trip on composite levels, quotient in {{2,3,6}}): PASS");
}

/// Criterion 7: every shipped rational-function identity holds exactly.
#[test]
fn acceptance_07_identity_suite() {
    let cat = cat();
    let report = catalog::run_identity_suite(&cat);
    for (name, ok) in &report.identities {
        assert!(*ok, "identity {name}");
    }
    // the suite must cover at least the named composition/substitution
    // families plus the conic identity
    for needle in ["level9", "level12", "level14", "level28", "conic"] {
        assert!(
            report.identities.iter().any(|(n, _)| n.contains(needle)),
            "no identity named *{needle}*"
        );
    }
    assert!(report.ok);
    println!("criterion 7 (rational-function identity suite, {} identities): PASS",
        report.identities.len());
}

/// Criterion 8: torsion factors divide the division polynomials and the
/// quadratic subfields match the recorded radicands.
#[test]
fn acceptance_08_torsion_verification() {
    let cat = cat();
    let report = catalog::torsion_suite(&cat).expect("torsion suite runs");
    assert!(report.linear3_divides, "3-division linear factor");
    assert!(report.cubic7_divides, "7-division cubic factor");
    for (name, ok) in &report.anchored {
        assert!(*ok, "radicand anchoring for {name}");
    }
    for (name, ok) in &report.pairs {
        assert!(*ok, "radicand pair product for {name}");
    }
    assert!(report.ok);
    println!("criterion 8 (torsion factors and quadratic subfields): PASS");
}

/// Criterion 9: random specializations of every family miss the recorded
/// residue for good p <= 1000, and the wrong twist class does not.
#[test]
fn acceptance_09_census_consequence() {
    let cat = cat();
    let report = catalog::census_suite(&cat, 1000, 5, 1).expect("census suite runs");
    for f in &report.families {
        assert!(f.missing_ok, "census for {}", f.label);
        assert!(f.specializations.len() >= 5, "specializations for {}", f.label);
    }
    assert!(report.negative_control_ok, "wrong twist must expose the residue");
    assert!(report.ok);
    println!("criterion 9 (missing residue absent for p <= 1000; negative control): PASS");
}

/// Criterion 10: Lang-Trotter Euler factors.
#[test]
fn acceptance_10_lt_factors() {
    // enumeration oracle at l = 2, r = 0
    assert_eq!(euler_factor(2, 0).unwrap(), Q::new(Z::from(4), Z::from(3)));
    // positivity for all primes l <= 100 and every residue r
    for l in (2..=PRIME_CAP).filter(|&l| factorize(l) == vec![(l, 1)]) {
        for r in 0..l {
            let f = euler_factor(l, r).unwrap();
            assert!(f > Q::from_integer(Z::from(0)), "euler_factor({l},{r})");
        }
    }
    // zero-flag agrees with trace-fiber emptiness across the catalog
    let cat = cat();
    for e in &cat.entries {
        for r in 0..e.m {
            let lt = lt_truncated(&e.group, r, 10).expect("lt computes");
            let fiber = trace_fiber(&e.group, r).expect("fiber computes");
            assert_eq!(lt.zero, fiber.is_empty(), "zero flag for {} at r = {r}", e.label);
        }
    }
    println!("criterion 10 (LT factors: 4/3 oracle, positivity, zero flags): PASS");
}
