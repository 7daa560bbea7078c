//! Classification of `f(1), ..., f(N)` as (S, ell)-square-free or exceptional,
//! with the explicit upper bound on the number of exceptions and the
//! parameter recipe that makes exceptions at most half of the range.
//!
//! All comparisons are done in exact rational arithmetic. Zeta values are
//! certified upper bounds (partial sum plus integral tail), and every
//! irrational quantity in the bounds is rounded upward.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{is_prime, next_prime, primes_below, Factorization, ValueFactorizer};
use crate::poly::{invariants, FactoredPoly, PolyInvariants};

/// Number of explicit terms used for certified zeta upper bounds.
pub const DEFAULT_ZETA_TERMS: u64 = 1000;

/// Reported bounds are rounded up to this denominator.
const BOUND_DENOMINATOR: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveParams {
    pub primes: BTreeSet<u64>,
    pub ell: u32,
    pub n_max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExceptionReason {
    /// `ord_p(f(n)) > ell` for some `p` in `S`.
    SOverflow,
    /// `ord_p(f(n)) > 1` for some `p` outside `S`.
    OutsideSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Exception {
    pub n: u64,
    pub reason: ExceptionReason,
    pub witness: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveRow {
    pub n: u64,
    pub factorization: Factorization,
    /// `None` when `f(n)` is (S, ell)-square-free.
    pub exception: Option<(ExceptionReason, u64)>,
}

impl SieveRow {
    pub fn value(&self) -> BigInt {
        self.factorization.value()
    }

    pub fn is_good(&self) -> bool {
        self.exception.is_none()
    }
}

/// Upper bounds on the number of exceptional `n`: `paper` evaluates the
/// printed formula with the full zeta value, `sharp` replaces it by
/// `zeta - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundPair {
    pub paper: BigRational,
    pub sharp: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveReport {
    pub total: u64,
    pub rows: Vec<SieveRow>,
    pub skipped_roots: Vec<u64>,
    pub good_count: u64,
    pub bounds: BoundPair,
}

impl SieveReport {
    pub fn exceptional(&self) -> impl Iterator<Item = Exception> + '_ {
        self.rows.iter().filter_map(|r| r.exception.map(|(reason, witness)| Exception { n: r.n, reason, witness }))
    }

    pub fn exceptional_count(&self) -> u64 {
        self.rows.len() as u64 - self.good_count
    }
}

/// True iff every `p` outside `primes` has exponent at most 1 and every `p`
/// in `primes` has exponent at most `ell`.
pub fn is_s_ell_squarefree(fac: &Factorization, primes: &BTreeSet<u64>, ell: u32) -> bool {
    first_witness(fac, primes, ell).is_none()
}

fn first_witness(fac: &Factorization, primes: &BTreeSet<u64>, ell: u32) -> Option<(ExceptionReason, u64)> {
    fac.factors().iter().find_map(|(&p, &k)| {
        if primes.contains(&p) {
            (k > ell).then_some((ExceptionReason::SOverflow, p))
        } else {
            (k > 1).then_some((ExceptionReason::OutsideSquare, p))
        }
    })
}

/// Refuses parameters for which the exception bound is not guaranteed.
pub fn validate_params(inv: &PolyInvariants, params: &SieveParams) -> Result<()> {
    if let Some(&p) = params.primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::NotPrime(p));
    }
    if params.ell == 0 {
        return Err(Error::Hypothesis("ell must be positive".into()));
    }
    let missing: Vec<u64> = inv.s0.difference(&params.primes).copied().collect();
    if !missing.is_empty() {
        return Err(Error::Hypothesis(format!("S does not contain S0 primes {missing:?}")));
    }
    if params.ell < 2 * inv.ell0 {
        return Err(Error::Hypothesis(format!("ell = {} is below 2*ell0 = {}", params.ell, 2 * inv.ell0)));
    }
    Ok(())
}

/// Classifies every `n` in `[1, N]` with `f(n) != 0`.
///
/// Runs on the current rayon pool; rows come back ordered by `n` whatever the
/// schedule.
pub fn classify_range(f: &FactoredPoly, params: &SieveParams) -> Result<SieveReport> {
    let inv = invariants(f)?;
    classify_range_with(f, &inv, params)
}

pub fn classify_range_with(f: &FactoredPoly, inv: &PolyInvariants, params: &SieveParams) -> Result<SieveReport> {
    validate_params(inv, params)?;
    let factorizer = ValueFactorizer::new(f)?;
    let skipped_roots = f.integer_roots_in(1, params.n_max);
    let rows: Vec<Option<SieveRow>> = (1..=params.n_max)
        .into_par_iter()
        .map(|n| {
            if skipped_roots.binary_search(&n).is_ok() {
                return Ok(None);
            }
            let factorization = factorizer.factor_at(n)?;
            let exception = first_witness(&factorization, &params.primes, params.ell);
            Ok(Some(SieveRow { n, factorization, exception }))
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SieveRow> = rows.into_iter().flatten().collect();
    let good_count = rows.iter().filter(|r| r.is_good()).count() as u64;
    let bounds = paper_bound(inv, params)?;
    Ok(SieveReport { total: params.n_max, rows, skipped_roots, good_count, bounds })
}

fn lcm_upto(t: u64) -> BigUint {
    let mut acc = BigUint::one();
    for p in primes_below(t + 1) {
        let mut pk = p;
        while pk.checked_mul(p).is_some_and(|x| x <= t) {
            pk *= p;
        }
        acc *= pk;
    }
    acc
}

/// Certified upper bound on `zeta(s)`:
/// `sum_{k <= terms} k^-s + terms^(1-s) / (s - 1)`.
///
/// Exact; nonincreasing in `terms`.
pub fn zeta_upper(s: i64, terms: u64) -> Result<BigRational> {
    if s < 2 {
        return Err(Error::ZetaRange(s));
    }
    if terms == 0 {
        return Err(Error::ZeroArgument("zeta needs at least one term"));
    }
    let s_u = s as u32;
    let common = lcm_upto(terms).pow(s_u);
    let mut numer = BigUint::zero();
    for k in 1..=terms {
        let mut share = common.clone();
        for _ in 0..s_u {
            share /= k;
        }
        numer += share;
    }
    let partial = BigRational::new(numer.into(), common.into());
    let tail_den = BigInt::from(s - 1) * BigInt::from(terms).pow(s_u - 1);
    Ok(partial + BigRational::new(BigInt::one(), tail_den))
}

fn ceil_sqrt(x: &BigInt) -> BigInt {
    let r = x.sqrt();
    if &r * &r == *x {
        r
    } else {
        r + 1
    }
}

pub(crate) fn round_up(x: &BigRational, den: u64) -> BigRational {
    let den = BigInt::from(den);
    let scaled = (x * BigRational::from_integer(den.clone())).ceil();
    BigRational::new(scaled.to_integer(), den)
}

/// Smallest prime not in `primes`.
pub fn smallest_prime_outside(primes: &BTreeSet<u64>) -> u64 {
    let mut p = 2;
    while primes.contains(&p) {
        p = next_prime(p);
    }
    p
}

/// The exception bound
/// `d (zeta(ell + 1 - ell0) + 1/(P - 1)) N + d (V N + U)^(1/2) + d |S|`
/// and its sharpened form with `zeta - 1`.
///
/// Zeta uses [`zeta_upper`], the square root is rounded up and the results
/// are rounded up to a multiple of `1e-9`, so both values remain upper bounds
/// of the exact expressions.
pub fn paper_bound(inv: &PolyInvariants, params: &SieveParams) -> Result<BoundPair> {
    let s = i64::from(params.ell) + 1 - i64::from(inv.ell0);
    let zeta = zeta_upper(s, DEFAULT_ZETA_TERMS)?;
    let big_p = smallest_prime_outside(&params.primes);
    let d = BigRational::from_integer(inv.degree.into());
    let n = BigRational::from_integer(params.n_max.into());
    let root = ceil_sqrt(&(&inv.v * BigInt::from(params.n_max) + &inv.u));
    let tail = &d * BigRational::from_integer(root) + &d * BigRational::from_integer(params.primes.len().into());
    let big_p_term = BigRational::new(BigInt::one(), BigInt::from(big_p - 1));
    let paper = &d * (&zeta + &big_p_term) * &n + &tail;
    let sharp = &d * (zeta - BigRational::one() + big_p_term) * &n + tail;
    Ok(BoundPair { paper: round_up(&paper, BOUND_DENOMINATOR), sharp: round_up(&sharp, BOUND_DENOMINATOR) })
}

/// Parameters after which at most half of `f(1..N)` are exceptional for
/// `N >= n0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChosenParameters {
    pub primes: BTreeSet<u64>,
    pub ell: u32,
    pub p1: u64,
    pub n0: u64,
}

/// Smallest `N` with `d (V N + U)^(1/2) + d |S| <= N / 6`, by upward scan.
pub fn n0_for(inv: &PolyInvariants, primes: &BTreeSet<u64>) -> u64 {
    let d = BigInt::from(inv.degree);
    let offset: BigInt = BigInt::from(6) * &d * BigInt::from(primes.len());
    let start = offset.to_u64().expect("offset fits in u64").max(1);
    let scale: BigInt = BigInt::from(36) * &d * &d;
    let mut n = start;
    loop {
        let nb = BigInt::from(n);
        let gap = &nb - &offset;
        if &scale * (&inv.v * &nb + &inv.u) <= &gap * &gap {
            return n;
        }
        n += 1;
    }
}

/// Picks `ell1`, `P1`, `S1` and `N0`.
///
/// `ell1` is the least integer `>= max(2 ell0, ell0 + 1)` with
/// `d (zeta(ell1 + 1 - ell0) - 1) < 1/6`; `P1` the least prime with
/// `d / (P1 - 1) < 1/6`; `S1 = S0 + {primes < P1}`.
pub fn choose_parameters(f: &FactoredPoly) -> Result<ChosenParameters> {
    let inv = invariants(f)?;
    choose_parameters_with(&inv)
}

pub fn choose_parameters_with(inv: &PolyInvariants) -> Result<ChosenParameters> {
    let d = BigRational::from_integer(inv.degree.into());
    let sixth = BigRational::new(BigInt::one(), BigInt::from(6));
    let mut ell = (2 * inv.ell0).max(inv.ell0 + 1);
    loop {
        let s = i64::from(ell) + 1 - i64::from(inv.ell0);
        let excess = zeta_upper(s, DEFAULT_ZETA_TERMS)? - BigRational::one();
        if &d * excess < sixth {
            break;
        }
        ell += 1;
    }
    // d / (p - 1) < 1/6  <=>  p - 1 > 6d
    let mut p1 = 2;
    while p1 - 1 <= 6 * inv.degree {
        p1 = next_prime(p1);
    }
    let mut primes = inv.s0.clone();
    primes.extend(primes_below(p1));
    let n0 = n0_for(inv, &primes);
    Ok(ChosenParameters { primes, ell, p1, n0 })
}
