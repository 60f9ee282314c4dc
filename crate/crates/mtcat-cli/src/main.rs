//! Thin command-line surface over the `mtcat` library.
//!
//! Every command parses its inputs, calls a library operation, and prints a
//! JSON report; no arithmetic lives here.  Exit codes: `0` success, `2`
//! verification failure, `3` input error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use mtcat::catalog;
use mtcat::ecurve::{ap_scan, trace_census, LongCurve, TraceCensus};
use mtcat::grouplat::SubgroupSpec;
use mtcat::ltconst::lt_truncated;
use mtcat::modarith::{factorize, ResidueMatrix};
use mtcat::modcurve::{genus, sz_rational_point_test};
use mtcat::mtclassify::{classify, goursat_decompose, ClassifyOptions};
use mtcat::qpoly::Q;

#[derive(Parser)]
#[command(name = "mtcat", version, about = "missing-trace catalog tools")]
struct Cli {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Compact single-line JSON (default is pretty-printed).
    #[arg(long, global = true)]
    json: bool,
    /// Closure cap override for classification.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Worker threads for parallel censuses (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the genus-zero missing-trace groups at one level.
    Classify {
        /// The level `m` to classify.
        #[arg(long)]
        level: u64,
        /// Target genus (only 0 is expected to be interesting).
        #[arg(long, default_value_t = 0)]
        genus: u64,
        /// Allow the slow deep levels (48, 96).
        #[arg(long)]
        deep: bool,
    },
    /// Recompute every invariant of the shipped 52-group catalog.
    VerifyCatalog {
        /// Also run randomized trace censuses up to this prime bound.
        #[arg(long)]
        census_bound: Option<u64>,
        /// Specializations per family for the census suite.
        #[arg(long, default_value_t = 5)]
        specializations: usize,
        /// RNG seed for the census suite.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Check the composition/substitution identities of the family tables.
    Identities,
    /// Census `a_p mod m` for a catalog family or an explicit long model.
    ApScan {
        /// Catalog label `m,i,k` (e.g. `3,1,1`).
        #[arg(long, conflicts_with = "long")]
        family: Option<String>,
        /// Parameter `t₀` (rational, e.g. `1` or `-3/2`).
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        t: String,
        /// Twist parameter `D₀`.
        #[arg(long = "D", default_value = "1", allow_hyphen_values = true)]
        d: String,
        /// Census modulus.
        #[arg(long = "mod")]
        modulus: u64,
        /// Scan primes up to this bound.
        #[arg(long)]
        pmax: u64,
        /// Long Weierstrass model `a1,a2,a3,a4,a6` (scanned from `p = 2`).
        #[arg(long, allow_hyphen_values = true)]
        long: Option<String>,
    },
    /// Genus (and rational-point criterion at prime-power level) of a group.
    Genus {
        /// Catalog label or path to a group JSON file (`{"m":…,"gens":…}`).
        #[arg(long)]
        group: String,
    },
    /// Truncated Lang–Trotter constant for a group and trace.
    Lt {
        /// Catalog label or path to a group JSON file.
        #[arg(long)]
        group: String,
        /// The trace residue `r`.
        #[arg(long)]
        r: u64,
        /// Euler factors over primes up to this bound (≤ 100).
        #[arg(long, default_value_t = 100)]
        l: u64,
    },
    /// Goursat decomposition of a composite-level group.
    Goursat {
        /// Catalog label or path to a group JSON file.
        #[arg(long)]
        group: String,
        /// First factor of the level (default: largest prime-power factor).
        #[arg(long)]
        m1: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok((value, ok)) => {
            let rendered = if cli.json {
                value.to_string()
            } else {
                serde_json::to_string_pretty(&value).unwrap()
            };
            let write_result = match &cli.out {
                Some(path) => std::fs::write(path, rendered + "\n").map_err(|e| e.to_string()),
                None => {
                    println!("{rendered}");
                    Ok(())
                }
            };
            if let Err(e) = write_result {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

/// Returns the JSON report and whether verification (if any) succeeded.
fn run(cli: &Cli) -> Result<(Value, bool)> {
    match &cli.cmd {
        Cmd::Classify { level, genus, deep } => {
            let mut opts = ClassifyOptions { deep_levels: *deep, ..Default::default() };
            if let Some(cap) = cli.cap {
                opts.cap = cap;
            }
            let groups = classify(*genus, *level, &opts)?;
            let reports: Vec<_> = groups.iter().map(|g| g.report()).collect();
            Ok((json!({ "level": level, "count": reports.len(), "groups": reports }), true))
        }
        Cmd::VerifyCatalog { census_bound, specializations, seed } => {
            let cat = catalog::load()?;
            let groups = catalog::verify_catalog(&cat)?;
            let identities = catalog::run_identity_suite(&cat);
            let torsion = catalog::torsion_suite(&cat)?;
            let mut ok = groups.ok && identities.ok && torsion.ok;
            let census = match census_bound {
                Some(bound) => {
                    let report = catalog::census_suite(&cat, *bound, *specializations, *seed)?;
                    ok = ok && report.ok;
                    Some(report)
                }
                None => None,
            };
            Ok((
                json!({
                    "groups": groups,
                    "identities": identities,
                    "torsion": torsion,
                    "census": census,
                    "ok": ok,
                }),
                ok,
            ))
        }
        Cmd::Identities => {
            let cat = catalog::load()?;
            let report = catalog::run_identity_suite(&cat);
            let ok = report.ok;
            Ok((serde_json::to_value(report)?, ok))
        }
        Cmd::ApScan { family, t, d, modulus, pmax, long } => {
            let census = match (family, long) {
                (_, Some(model)) => {
                    let coeffs: Vec<i64> = model
                        .split(',')
                        .map(|s| s.trim().parse::<i64>())
                        .collect::<Result<_, _>>()
                        .context("--long expects five integers a1,a2,a3,a4,a6")?;
                    let [a1, a2, a3, a4, a6] = coeffs[..] else {
                        bail!("--long expects exactly five integers");
                    };
                    ap_scan(&LongCurve::new(a1, a2, a3, a4, a6), *modulus, *pmax)
                }
                (Some(label), None) => {
                    let cat = catalog::load()?;
                    let t0 = parse_rational(t)?;
                    let d0 = parse_rational(d)?;
                    let curve = cat.specialize(label, &t0, &d0)?;
                    trace_census(&curve, *modulus, *pmax)
                }
                (None, None) => bail!("either --family or --long is required"),
            };
            Ok((census_json(&census), true))
        }
        Cmd::Genus { group } => {
            let g = load_group(group)?;
            let report = genus(&g)?;
            let sz = if factorize(g.modulus()).len() == 1 {
                Some(sz_rational_point_test(&g)?)
            } else {
                None
            };
            Ok((json!({ "modulus": g.modulus(), "genus": report, "rational_point": sz }), true))
        }
        Cmd::Lt { group, r, l } => {
            let g = load_group(group)?;
            let report = lt_truncated(&g, *r, *l)?;
            Ok((serde_json::to_value(report)?, true))
        }
        Cmd::Goursat { group, m1 } => {
            let g = load_group(group)?;
            let m = g.modulus();
            let fac = factorize(m);
            if fac.len() < 2 {
                bail!("level {m} is a prime power; nothing to decompose");
            }
            let m1 = match m1 {
                Some(v) => {
                    if *v < 2 || m % v != 0 || num_integer_gcd(*v, m / v) != 1 {
                        bail!("--m1 must be a nontrivial coprime factor of {m}");
                    }
                    *v
                }
                None => {
                    let (p, e) = fac.iter().max_by_key(|(p, e)| p.pow(*e)).unwrap();
                    p.pow(*e)
                }
            };
            let m2 = m / m1;
            let spec = goursat_decompose(&g, m1, m2)?;
            Ok((
                json!({
                    "m1": m1,
                    "m2": m2,
                    "g1_order": spec.g1.order()?,
                    "k1_order": spec.k1.order()?,
                    "g2_order": spec.g2.order()?,
                    "k2_order": spec.k2.order()?,
                    "quotient_order": spec.quotient_order(),
                    "pairing": spec.pairing,
                }),
                true,
            ))
        }
    }
}

fn parse_rational(s: &str) -> Result<Q> {
    Q::from_str(s).map_err(|e| anyhow!("bad rational {s:?}: {e}"))
}

fn num_integer_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_integer_gcd(b, a % b)
    }
}

/// Resolve a catalog label, or else read a group file
/// `{"m": u64, "gens": [[[a,b],[c,d]], …]}`.
fn load_group(spec: &str) -> Result<SubgroupSpec> {
    let cat = catalog::load()?;
    if let Some(entry) = cat.entry(spec) {
        return Ok(entry.group.clone());
    }
    let text = std::fs::read_to_string(spec)
        .with_context(|| format!("{spec:?} is neither a catalog label nor a readable file"))?;
    #[derive(serde::Deserialize)]
    struct GroupFile {
        m: u64,
        gens: Vec<[[i64; 2]; 2]>,
    }
    let raw: GroupFile = serde_json::from_str(&text).context("bad group file")?;
    let gens = raw
        .gens
        .iter()
        .map(|g| ResidueMatrix::new(raw.m, g[0][0], g[0][1], g[1][0], g[1][1]))
        .collect();
    Ok(SubgroupSpec::new(raw.m, gens)?)
}

/// Present a census as `{"sequence": …, "counts": {"r": n}, "missing": …}`.
fn census_json(census: &TraceCensus) -> Value {
    let counts: serde_json::Map<String, Value> = census
        .counts
        .iter()
        .enumerate()
        .map(|(r, n)| (r.to_string(), json!(n)))
        .collect();
    json!({
        "modulus": census.modulus,
        "bound": census.bound,
        "sequence": census.sequence,
        "counts": counts,
        "missing": census.missing(),
    })
}
