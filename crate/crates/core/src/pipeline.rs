//! End-to-end driver: from `(F, e, N)` to a certified lower bound on the
//! number of distinct fields among `Q(F(1)^(1/e)), ..., Q(F(N)^(1/e))`.
//!
//! The chain is: scale `F` by `a^e` to integral coefficients, strip
//! multiplicities modulo `e`, take the separable radical kernel `f`, pick
//! sieve parameters, classify `f(1..N)`, and count S-equality classes of the
//! good values. With `e = 2` the count is cross-checked against exact
//! quadratic-field keys.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    certify_classes, class_size_limit, count_distinct_lower, quadratic_key_of, ClassCount, FieldValue, SClassKey,
};
use crate::padic::{factor_u64, is_prime, ValueFactorizer};
use crate::poly::{
    invariants, parse_factored_poly, radical_kernel, reduce_multiplicities, scale_to_integer, FactoredPoly,
    PolyInvariants,
};
use crate::report::{render_rows_csv, write_output, OutputFormat};
use crate::sieve::{
    choose_parameters_with, classify_range_with, n0_for, smallest_prime_outside, ChosenParameters, SieveParams,
    SieveReport,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub poly: String,
    pub e: u64,
    /// Defaults to `max(10 N0, 1000)`.
    pub n: Option<u64>,
    pub primes: Option<BTreeSet<u64>>,
    pub ell: Option<u32>,
    /// Primes ramified in the base field, when it is not `Q`.
    pub extra_ramified_primes: BTreeSet<u64>,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(poly: impl Into<String>, e: u64) -> Self {
        RunConfig {
            poly: poly.into(),
            e,
            n: None,
            primes: None,
            ell: None,
            extra_ramified_primes: BTreeSet::new(),
            jobs: None,
        }
    }
}

/// The JSON-facing part of a run, with stable key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportSummary {
    pub poly: String,
    pub e: u64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "S")]
    pub primes: Vec<u64>,
    pub ell: u32,
    #[serde(rename = "P")]
    pub p: u64,
    #[serde(rename = "N0")]
    pub n0: u64,
    pub d: u64,
    pub ell0: u32,
    #[serde(rename = "U")]
    pub u: u64,
    #[serde(rename = "V")]
    pub v: u64,
    pub skipped_roots: Vec<u64>,
    pub exceptional_count: u64,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub paper_bound: BigRational,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub sharp_bound: BigRational,
    pub class_count: u64,
    pub oracle_count: Option<u64>,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub lemma13_floor: BigRational,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub c: BigRational,
    #[serde(rename = "cN", serialize_with = "crate::report::ser_rational")]
    pub c_n: BigRational,
    pub certified: bool,
}

/// Full result of [`run_superelliptic`].
#[derive(Debug, Clone)]
pub struct CountReport {
    pub summary: ReportSummary,
    /// `F` after scaling by `a^e` and reducing multiplicities modulo `e`.
    pub reduced: FactoredPoly,
    pub scale: BigInt,
    /// Separable radical kernel `f` of `reduced`.
    pub kernel: FactoredPoly,
    pub invariants: PolyInvariants,
    pub chosen: ChosenParameters,
    pub sieve: SieveReport,
    pub values: Vec<FieldValue>,
    pub classes: ClassCount,
    pub certified_pairs: u64,
}

impl CountReport {
    /// Human-readable verdicts.
    pub fn verdicts(&self) -> Vec<String> {
        let s = &self.summary;
        let mut lines = vec![
            format!("distinct fields >= {}", s.class_count),
            format!(
                "class count {} >= c*N = {}: {}",
                s.class_count,
                crate::report::rational_string(&s.c_n),
                if s.certified { "yes" } else { "no" }
            ),
        ];
        if let Some(oracle) = s.oracle_count {
            lines.push(format!("quadratic oracle: {oracle} distinct fields among the counted values"));
        }
        if s.n < s.n0 {
            lines.push(format!("note: N = {} is below N0 = {}", s.n, s.n0));
        }
        lines
    }
}

/// `1 / (4 d (ell + 1)^|S|)`.
pub fn effective_constant(degree: u64, primes: &BTreeSet<u64>, ell: u32) -> BigRational {
    let limit = BigInt::from(class_size_limit(primes, ell));
    BigRational::new(BigInt::one(), 2 * BigInt::from(degree) * limit)
}

fn to_u64(x: &BigInt, what: &str) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::Internal(format!("{what} = {x} does not fit in 64 bits")))
}

/// Resolves `S` and `ell`: overrides or the chosen parameters, then unions
/// the primes of `e` and the extra ramified primes into `S`.
fn resolve_params(config: &RunConfig, chosen: &ChosenParameters) -> Result<(BTreeSet<u64>, u32)> {
    let mut primes = config.primes.clone().unwrap_or_else(|| chosen.primes.clone());
    primes.extend(factor_u64(config.e)?.primes());
    for &p in &config.extra_ramified_primes {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        primes.insert(p);
    }
    Ok((primes, config.ell.unwrap_or(chosen.ell)))
}

pub fn run_superelliptic(config: &RunConfig) -> Result<CountReport> {
    match config.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            pool.install(|| run_chain(config))
        }
        None => run_chain(config),
    }
}

/// The polynomial side of the chain: input, `a^e` scaling, multiplicity
/// reduction and radical kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prepared {
    pub original: FactoredPoly,
    pub scale: BigInt,
    pub reduced: FactoredPoly,
    pub kernel: FactoredPoly,
}

pub fn prepare(poly: &str, e: u64) -> Result<Prepared> {
    let original = parse_factored_poly(poly)?;
    let (scaled, scale) = scale_to_integer(&original, e)?;
    let (reduced, _) = reduce_multiplicities(&scaled, e)?;
    let kernel = radical_kernel(&reduced, e)?;
    Ok(Prepared { original, scale, reduced, kernel })
}

fn run_chain(config: &RunConfig) -> Result<CountReport> {
    let e = config.e;
    let Prepared { original: big_f, scale, reduced, kernel } = prepare(&config.poly, e)?;
    let inv = invariants(&kernel)?;
    let chosen = choose_parameters_with(&inv)?;
    let (primes, ell) = resolve_params(config, &chosen)?;
    let n0 = if primes == chosen.primes { chosen.n0 } else { n0_for(&inv, &primes) };
    let n_max = config.n.unwrap_or_else(|| (10 * n0).max(1000));
    if n_max == 0 {
        return Err(Error::ZeroArgument("N must be positive"));
    }

    let params = SieveParams { primes: primes.clone(), ell, n_max };
    let sieve = classify_range_with(&kernel, &inv, &params)?;
    // n with F(n) = 0 includes roots dropped by the multiplicity reduction
    let skipped_roots = big_f.integer_roots_in(1, n_max);

    let big_factorizer = ValueFactorizer::new(&reduced)?;
    let values: Vec<FieldValue> = sieve
        .rows
        .iter()
        .filter(|r| r.is_good() && skipped_roots.binary_search(&r.n).is_err())
        .map(|r| Ok(FieldValue { n: r.n, a: r.factorization.clone(), big_a: big_factorizer.factor_at(r.n)? }))
        .collect::<Result<_>>()?;

    let classes = count_distinct_lower(&values, &primes, ell, e)?;
    let certified_pairs = certify_classes(&classes, &values, &primes, e)?;
    let oracle_count = if e == 2 { Some(quadratic_oracle(&values, &primes)?) } else { None };

    let c = effective_constant(inv.degree, &primes, ell);
    let c_n = &c * BigRational::from_integer(n_max.into());
    let class_count = classes.class_count() as u64;
    if let Some(oracle) = oracle_count {
        if class_count > oracle {
            return Err(Error::Internal(format!("class count {class_count} exceeds oracle count {oracle}")));
        }
    }
    let certified = BigRational::from_integer(class_count.into()) >= c_n;

    let summary = ReportSummary {
        poly: big_f.to_string(),
        e,
        n: n_max,
        primes: primes.iter().copied().collect(),
        ell,
        p: smallest_prime_outside(&primes),
        n0,
        d: inv.degree,
        ell0: inv.ell0,
        u: to_u64(&inv.u, "U")?,
        v: to_u64(&inv.v, "V")?,
        skipped_roots,
        exceptional_count: sieve.exceptional_count(),
        paper_bound: sieve.bounds.paper.clone(),
        sharp_bound: sieve.bounds.sharp.clone(),
        class_count,
        oracle_count,
        lemma13_floor: classes.floor.clone(),
        c,
        c_n,
        certified,
    };
    Ok(CountReport {
        summary,
        reduced,
        scale,
        kernel,
        invariants: inv,
        chosen,
        sieve,
        values,
        classes,
        certified_pairs,
    })
}

/// Number of distinct quadratic fields `Q(sqrt(A_n))` among the values, after
/// checking that no quadratic key is shared by two S-classes.
fn quadratic_oracle(values: &[FieldValue], primes: &BTreeSet<u64>) -> Result<u64> {
    let mut owner: BTreeMap<BigInt, SClassKey> = BTreeMap::new();
    for v in values {
        let key = quadratic_key_of(&v.big_a);
        let class = SClassKey::from_factorization(&v.a, primes);
        match owner.get(&key) {
            Some(existing) if *existing != class => {
                return Err(Error::Internal(format!("quadratic key {key} shared by two S-classes (n = {})", v.n)));
            }
            Some(_) => {}
            None => {
                owner.insert(key, class);
            }
        }
    }
    Ok(owner.len() as u64)
}

pub fn render_json(report: &CountReport) -> String {
    let mut s = serde_json::to_string_pretty(&report.summary).expect("summary serializes");
    s.push('\n');
    s
}

pub fn render_report(report: &CountReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => render_json(report),
        OutputFormat::Csv => render_rows_csv(&report.sieve.rows),
    }
}

/// Writes the JSON summary or the per-n CSV to `path`.
pub fn emit_report(report: &CountReport, format: OutputFormat, path: &Path) -> Result<()> {
    write_output(path, &render_report(report, format))
}
