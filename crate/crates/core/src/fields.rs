//! S-equality classes of integers and ramification certificates separating
//! the radical fields they generate.
//!
//! Two S-square-free integers in different S-equality classes differ at some
//! prime `p` outside `S` with exponents `{0, 1}`. With `a | A | a^(e-1)` this
//! forces `1 <= ord_p(A) <= e - 1` on one side and `ord_p(B) = 0` on the
//! other, so `p` ramifies in exactly one of the two radical fields. The class
//! count is therefore a lower bound on the number of distinct fields.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{factor_integer, factor_u64, Factorization};
use crate::sieve::is_s_ell_squarefree;

/// `prod_{p not in S} p^{ord_p(a)}`: equal keys iff the integers are S-equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SClassKey(BigUint);

impl SClassKey {
    pub fn from_factorization(fac: &Factorization, primes: &BTreeSet<u64>) -> Self {
        let mut acc = BigUint::one();
        for (&p, &k) in fac.factors() {
            if !primes.contains(&p) {
                acc *= BigUint::from(p).pow(k);
            }
        }
        SClassKey(acc)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

pub fn s_free_kernel(a: &BigInt, primes: &BTreeSet<u64>) -> Result<SClassKey> {
    if a.is_zero() {
        return Err(Error::ZeroArgument("S-free kernel of 0"));
    }
    Ok(SClassKey::from_factorization(&factor_integer(a)?, primes))
}

pub fn s_equal(a: &BigInt, b: &BigInt, primes: &BTreeSet<u64>) -> Result<bool> {
    Ok(s_free_kernel(a, primes)? == s_free_kernel(b, primes)?)
}

/// `2 (ell + 1)^|S|`.
pub fn class_size_limit(primes: &BTreeSet<u64>, ell: u32) -> BigUint {
    BigUint::from(2u32) * BigUint::from(ell + 1).pow(primes.len() as u32)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSizeCheck {
    pub observed: usize,
    pub bound: BigUint,
}

/// Checks that a family of distinct, pairwise S-equal (S, ell)-square-free
/// integers has at most `2 (ell + 1)^|S|` members.
pub fn class_size_bound(members: &[BigInt], primes: &BTreeSet<u64>, ell: u32) -> Result<ClassSizeCheck> {
    let mut seen = BTreeSet::new();
    let mut key: Option<SClassKey> = None;
    for a in members {
        if !seen.insert(a.clone()) {
            return Err(Error::Hypothesis(format!("{a} appears twice")));
        }
        let fac = factor_integer(a)?;
        if !is_s_ell_squarefree(&fac, primes, ell) {
            return Err(Error::Hypothesis(format!("{a} is not (S, {ell})-square-free")));
        }
        let k = SClassKey::from_factorization(&fac, primes);
        match &key {
            None => key = Some(k),
            Some(first) if *first != k => {
                return Err(Error::Hypothesis(format!("{a} is S-distinct from {}", members[0])));
            }
            Some(_) => {}
        }
    }
    let bound = class_size_limit(primes, ell);
    if BigUint::from(members.len()) > bound {
        return Err(Error::Internal(format!("class of size {} exceeds {bound}", members.len())));
    }
    Ok(ClassSizeCheck { observed: members.len(), bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ramified {
    /// `p` ramifies in the field of `A`, not of `B`.
    First,
    Second,
}

/// A prime outside `S` ramified in exactly one of two radical fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistinctnessCertificate {
    pub prime: u64,
    pub ord_first: u32,
    pub ord_second: u32,
    pub ramified: Ramified,
}

impl DistinctnessCertificate {
    /// Re-checks the valuation pattern against `S` and `e`.
    pub fn validate(&self, primes: &BTreeSet<u64>, e: u64) -> bool {
        let in_range = |k: u32| k >= 1 && u64::from(k) < e;
        let pattern = match self.ramified {
            Ramified::First => in_range(self.ord_first) && self.ord_second == 0,
            Ramified::Second => in_range(self.ord_second) && self.ord_first == 0,
        };
        pattern && crate::padic::is_prime(self.prime) && !primes.contains(&self.prime)
    }
}

fn check_exponent_primes(e: u64, primes: &BTreeSet<u64>) -> Result<()> {
    if e < 2 {
        return Err(Error::BadExponent(e));
    }
    let missing: Vec<u64> = factor_u64(e)?.primes().filter(|p| !primes.contains(p)).collect();
    if !missing.is_empty() {
        return Err(Error::Hypothesis(format!("prime divisors {missing:?} of e = {e} are not in S")));
    }
    Ok(())
}

/// `a | A` and `A | a^(e-1)`, up to sign.
fn sandwiched(a: &Factorization, big_a: &Factorization, e: u64) -> bool {
    let a_pow = {
        let mut x = Factorization::one();
        x.mul_pow(a, (e - 1) as u32);
        x
    };
    a.divides(big_a) && big_a.divides(&a_pow)
}

/// Certificate from factorizations whose hypotheses the caller has already
/// established: `a`, `b` S-square-free and sandwiched.
pub(crate) fn certificate_from(
    a: &Factorization,
    big_a: &Factorization,
    b: &Factorization,
    big_b: &Factorization,
    primes: &BTreeSet<u64>,
) -> Option<DistinctnessCertificate> {
    let support: BTreeSet<u64> = a.primes().chain(b.primes()).collect();
    support.into_iter().filter(|p| !primes.contains(p)).find_map(|p| match (a.exponent(p), b.exponent(p)) {
        (1, 0) => Some(DistinctnessCertificate {
            prime: p,
            ord_first: big_a.exponent(p),
            ord_second: big_b.exponent(p),
            ramified: Ramified::First,
        }),
        (0, 1) => Some(DistinctnessCertificate {
            prime: p,
            ord_first: big_a.exponent(p),
            ord_second: big_b.exponent(p),
            ramified: Ramified::Second,
        }),
        _ => None,
    })
}

/// Ramification witness that the fields generated by `A^(1/e)` and
/// `B^(1/e)` differ, for S-distinct S-square-free `a`, `b` with
/// `a | A | a^(e-1)` and `b | B | b^(e-1)`.
///
/// Every prime divisor of `e` must lie in `S`. The caller is responsible for
/// `S` also containing the primes ramified in the base field.
pub fn fields_distinct(
    a: &BigInt,
    b: &BigInt,
    big_a: &BigInt,
    big_b: &BigInt,
    primes: &BTreeSet<u64>,
    e: u64,
) -> Result<DistinctnessCertificate> {
    check_exponent_primes(e, primes)?;
    let fa = factor_integer(a)?;
    let fb = factor_integer(b)?;
    let f_big_a = factor_integer(big_a)?;
    let f_big_b = factor_integer(big_b)?;
    for (x, fx) in [(a, &fa), (b, &fb)] {
        if !is_s_ell_squarefree(fx, primes, u32::MAX) {
            return Err(Error::Hypothesis(format!("{x} is not S-square-free")));
        }
    }
    if !sandwiched(&fa, &f_big_a, e) {
        return Err(Error::Hypothesis(format!("{a} | {big_a} | {a}^{} fails", e - 1)));
    }
    if !sandwiched(&fb, &f_big_b, e) {
        return Err(Error::Hypothesis(format!("{b} | {big_b} | {b}^{} fails", e - 1)));
    }
    certificate_from(&fa, &f_big_a, &fb, &f_big_b, primes)
        .ok_or_else(|| Error::Hypothesis(format!("{a} and {b} are S-equal")))
}

/// One fiber value: `a = f(n)` and `A = F(n)`, both factored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldValue {
    pub n: u64,
    pub a: Factorization,
    pub big_a: Factorization,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCount {
    /// S-class kernel -> the `n` in that class, ascending.
    pub classes: BTreeMap<SClassKey, Vec<u64>>,
    pub distinct_values: usize,
    /// `#distinct a / (2 (ell + 1)^|S|)`.
    pub floor: BigRational,
}

impl ClassCount {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// Partitions (S, ell)-square-free values into S-equality classes.
///
/// The number of classes is a lower bound on the number of distinct fields
/// generated by the `A^(1/e)`; [`certify_classes`] produces the pairwise
/// witnesses. Signs are ignored.
pub fn count_distinct_lower(values: &[FieldValue], primes: &BTreeSet<u64>, ell: u32, e: u64) -> Result<ClassCount> {
    check_exponent_primes(e, primes)?;
    let mut classes: BTreeMap<SClassKey, Vec<u64>> = BTreeMap::new();
    let mut distinct = BTreeSet::new();
    for v in values {
        if !is_s_ell_squarefree(&v.a, primes, ell) {
            return Err(Error::Hypothesis(format!("f({}) is not (S, {ell})-square-free", v.n)));
        }
        if !sandwiched(&v.a, &v.big_a, e) {
            return Err(Error::Internal(format!("f({0}) | F({0}) | f({0})^{1} fails", v.n, e - 1)));
        }
        distinct.insert(v.a.value());
        classes.entry(SClassKey::from_factorization(&v.a, primes)).or_default().push(v.n);
    }
    for members in classes.values_mut() {
        members.sort_unstable();
    }
    let limit = BigInt::from(class_size_limit(primes, ell));
    Ok(ClassCount {
        classes,
        distinct_values: distinct.len(),
        floor: BigRational::new(BigInt::from(distinct.len()), limit),
    })
}

/// Builds and re-validates a distinctness certificate for every pair of
/// classes, using the smallest `n` of each class as representative. Returns
/// the number of certified pairs.
pub fn certify_classes(count: &ClassCount, values: &[FieldValue], primes: &BTreeSet<u64>, e: u64) -> Result<u64> {
    let by_n: BTreeMap<u64, &FieldValue> = values.iter().map(|v| (v.n, v)).collect();
    let reps: Vec<&FieldValue> = count
        .classes
        .values()
        .map(|ns| by_n.get(&ns[0]).copied().ok_or_else(|| Error::Internal(format!("no value for n = {}", ns[0]))))
        .collect::<Result<_>>()?;
    let certified = (0..reps.len())
        .into_par_iter()
        .map(|i| {
            let x = reps[i];
            for y in &reps[i + 1..] {
                let cert = certificate_from(&x.a, &x.big_a, &y.a, &y.big_a, primes)
                    .filter(|c| c.validate(primes, e))
                    .ok_or_else(|| {
                    Error::Internal(format!("no certificate separating n = {} and n = {}", x.n, y.n))
                })?;
                debug_assert!(!primes.contains(&cert.prime));
            }
            Ok((reps.len() - i - 1) as u64)
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(certified.into_iter().sum())
}

/// Signed squarefree part `k` of `A = k m^2`. Equal keys iff the quadratic
/// fields agree.
pub fn quadratic_field_key(a: &BigInt) -> Result<BigInt> {
    if a.is_zero() {
        return Err(Error::ZeroArgument("quadratic field of 0"));
    }
    Ok(quadratic_key_of(&factor_integer(a)?))
}

pub fn quadratic_key_of(fac: &Factorization) -> BigInt {
    let mut key = BigInt::from(fac.sign());
    for (&p, &k) in fac.factors() {
        if k % 2 == 1 {
            key *= p;
        }
    }
    key
}
