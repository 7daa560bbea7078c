//! p-adic valuations, integer factorizations and the root localizer.
//!
//! Values of a polynomial with rational roots split as
//! `f(n) = c_f * prod (v_i n - u_i)^{m_i}`, so factoring `f(n)` only ever
//! needs trial division of integers bounded by `V n + U` plus one
//! factorization of the constant `c_f`, which [`ValueFactorizer`] caches.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::FactoredPoly;

/// Deterministic primality test by trial division. Intended for the small
/// primes that index valuations, not for factoring.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// All primes strictly below `bound` (sieve of Eratosthenes).
pub fn primes_below(bound: u64) -> Vec<u64> {
    if bound <= 2 {
        return Vec::new();
    }
    let size = bound as usize;
    let mut composite = vec![false; size];
    let mut out = Vec::new();
    for i in 2..size {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j < size {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut m = n + 1;
    while !is_prime(m) {
        m += 1;
    }
    m
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// A p-adic valuation; `Infinite` is the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

fn ord_biguint(p: u64, x: &BigUint) -> i64 {
    debug_assert!(!x.is_zero());
    let p = BigUint::from(p);
    let mut x = x.clone();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        x = q;
        k += 1;
    }
}

/// Valuation of an integer at an already-validated prime.
pub(crate) fn ord_int_unchecked(p: u64, x: &BigInt) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    if let Some(m) = x.magnitude().to_u64() {
        let mut m = m;
        let mut k = 0;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        return Valuation::Finite(k);
    }
    Valuation::Finite(ord_biguint(p, x.magnitude()))
}

pub(crate) fn ord_rational_unchecked(p: u64, x: &BigRational) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let num = ord_int_unchecked(p, x.numer()).finite().unwrap_or(0);
    let den = ord_int_unchecked(p, x.denom()).finite().unwrap_or(0);
    Valuation::Finite(num - den)
}

/// `ord_p(x)` for an integer.
pub fn ord_int(p: u64, x: &BigInt) -> Result<Valuation> {
    require_prime(p)?;
    Ok(ord_int_unchecked(p, x))
}

/// `ord_p(x)` for a rational; negative when `p` divides the reduced
/// denominator.
pub fn ord(p: u64, x: &BigRational) -> Result<Valuation> {
    require_prime(p)?;
    Ok(ord_rational_unchecked(p, x))
}

/// Signed prime factorization of a nonzero integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Factorization {
    sign: i8,
    factors: BTreeMap<u64, u32>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization { sign: 1, factors: BTreeMap::new() }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn factors(&self) -> &BTreeMap<u64, u32> {
        &self.factors
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    /// Multiplies `p^k` into the factorization.
    pub fn push(&mut self, p: u64, k: u32) {
        if k > 0 {
            *self.factors.entry(p).or_insert(0) += k;
        }
    }

    /// `self * other^k`.
    pub fn mul_pow(&mut self, other: &Factorization, k: u32) {
        if k == 0 {
            return;
        }
        if other.sign < 0 && k % 2 == 1 {
            self.sign = -self.sign;
        }
        for (&p, &e) in &other.factors {
            self.push(p, e * k);
        }
    }

    pub fn abs(&self) -> Factorization {
        Factorization { sign: 1, factors: self.factors.clone() }
    }

    /// Recomposes the integer.
    pub fn value(&self) -> BigInt {
        let mut acc = BigUint::one();
        for (&p, &e) in &self.factors {
            acc *= BigUint::from(p).pow(e);
        }
        let sign = if self.sign < 0 { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, acc)
    }

    /// `self` divides `other` (signs ignored).
    pub fn divides(&self, other: &Factorization) -> bool {
        self.factors.iter().all(|(&p, &e)| other.exponent(p) >= e)
    }

    /// Space-separated `p^e` terms, primes ascending; `1` renders as "".
    pub fn render(&self) -> String {
        let parts: Vec<String> = self.factors.iter().map(|(p, e)| format!("{p}^{e}")).collect();
        parts.join(" ")
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign < 0 { "-" } else { "+" };
        if self.factors.is_empty() {
            write!(f, "{sign}1")
        } else {
            write!(f, "{sign}{}", self.render())
        }
    }
}

fn factor_u64_into(mut n: u64, out: &mut Factorization) {
    for p in [2u64, 3, 5] {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        out.push(p, k);
    }
    // wheel mod 30
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = 7u64;
    let mut i = 0;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push(d, k);
        }
        d += STEPS[i];
        i = (i + 1) % 8;
    }
    if n > 1 {
        out.push(n, 1);
    }
}

fn factor_biguint_into(n: &BigUint, out: &mut Factorization) -> Result<()> {
    if let Some(small) = n.to_u64() {
        factor_u64_into(small, out);
        return Ok(());
    }
    let mut n = n.clone();
    let mut d = 2u64;
    loop {
        if let Some(small) = n.to_u64() {
            // everything below d is already stripped
            factor_u64_into(small, out);
            return Ok(());
        }
        let big_d = BigUint::from(d);
        if &big_d * &big_d > n {
            return Err(Error::Internal(format!("prime factor {n} exceeds 64 bits")));
        }
        let mut k = 0;
        loop {
            let (q, r) = n.div_rem(&big_d);
            if !r.is_zero() {
                break;
            }
            n = q;
            k += 1;
        }
        out.push(d, k);
        d += if d == 2 { 1 } else { 2 };
    }
}

/// Complete factorization of a nonzero integer by trial division.
pub fn factor_integer(x: &BigInt) -> Result<Factorization> {
    if x.is_zero() {
        return Err(Error::ZeroArgument("cannot factor 0"));
    }
    let mut out = Factorization { sign: if x.is_negative() { -1 } else { 1 }, factors: BTreeMap::new() };
    factor_biguint_into(x.magnitude(), &mut out)?;
    Ok(out)
}

pub fn factor_u64(x: u64) -> Result<Factorization> {
    if x == 0 {
        return Err(Error::ZeroArgument("cannot factor 0"));
    }
    let mut out = Factorization::one();
    factor_u64_into(x, &mut out);
    Ok(out)
}

/// Factors values of one polynomial at many integers.
///
/// Holds the factored constant `c_f = leading / prod v_i^{m_i}` so that it is
/// computed once, before any parallel section; afterwards the factorizer is
/// read-only and can be shared freely.
#[derive(Debug, Clone)]
pub struct ValueFactorizer {
    constant: Factorization,
    linear: Vec<(BigInt, BigInt, u32)>,
}

impl ValueFactorizer {
    pub fn new(f: &FactoredPoly) -> Result<Self> {
        let c = f.value_constant();
        if !c.is_integer() {
            return Err(Error::NonIntegral(c.to_string()));
        }
        let constant = factor_integer(c.numer())?;
        let linear = f.roots().iter().map(|(r, m)| (r.denom().clone(), r.numer().clone(), *m)).collect();
        Ok(ValueFactorizer { constant, linear })
    }

    pub fn factor(&self, n: &BigInt) -> Result<Factorization> {
        let mut out = self.constant.clone();
        for (v, u, m) in &self.linear {
            let lin = v * n - u;
            if lin.is_zero() {
                return Err(Error::ZeroValue(n.to_string()));
            }
            out.mul_pow(&factor_integer(&lin)?, *m);
        }
        Ok(out)
    }

    pub fn factor_at(&self, n: u64) -> Result<Factorization> {
        self.factor(&BigInt::from(n))
    }
}

/// Factorization of `f(n)` via the linear-factor decomposition.
pub fn factor_value(f: &FactoredPoly, n: &BigInt) -> Result<Factorization> {
    ValueFactorizer::new(f)?.factor(n)
}

/// Output of [`hensel_locate`]: the located root and both sides of the
/// identity `ord_p(n - gamma_j) = ord_p(f(n)) - lambda_j(p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HenselCertificate {
    pub prime: u64,
    /// Zero-based index into the roots of `f`.
    pub index: usize,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub root: BigRational,
    pub ord_n_minus_root: i64,
    pub ord_value: i64,
    pub lambda_j: i64,
    pub lambda: i64,
}

/// Locates the unique root `gamma_j` of a separable `f` that `n` is p-adically
/// close to, provided `ord_p(f(n)) > 2 lambda(p)`.
///
/// The root chosen is the one maximizing `ord_p(n - gamma_i)`; the identity,
/// p-integrality of the root and `ord_p(n - gamma_j) > lambda_j` are checked
/// before returning.
pub fn hensel_locate(f: &FactoredPoly, n: &BigInt, p: u64) -> Result<HenselCertificate> {
    require_prime(p)?;
    let nq = BigRational::from_integer(n.clone());
    let value = f.eval(&nq);
    if value.is_zero() {
        return Err(Error::ZeroValue(n.to_string()));
    }
    let lambdas = crate::poly::lambda_at(f, p)?;
    let ord_value = ord_rational_unchecked(p, &value).finite().expect("nonzero value");
    if ord_value <= 2 * lambdas.max {
        return Err(Error::HenselNotApplicable { p, ord: ord_value, twice_lambda: 2 * lambdas.max });
    }
    let mut best: Option<(usize, i64)> = None;
    for (i, (root, _)) in f.roots().iter().enumerate() {
        let v = ord_rational_unchecked(p, &(&nq - root)).finite().expect("n is not a root");
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (index, ord_diff) = best.expect("degree >= 1");
    let root = f.roots()[index].0.clone();
    let lambda_j = lambdas.per_root[index];
    if ord_rational_unchecked(p, &root) < Valuation::Finite(0) {
        return Err(Error::Internal(format!("located root {root} is not {p}-integral")));
    }
    if ord_diff <= lambda_j {
        return Err(Error::Internal(format!("ord_{p}(n - {root}) = {ord_diff} does not exceed lambda_j = {lambda_j}")));
    }
    if ord_diff != ord_value - lambda_j {
        return Err(Error::Internal(format!(
            "ord_{p}(n - {root}) = {ord_diff} but ord_{p}(f(n)) - lambda_j = {}",
            ord_value - lambda_j
        )));
    }
    Ok(HenselCertificate {
        prime: p,
        index,
        root,
        ord_n_minus_root: ord_diff,
        ord_value,
        lambda_j,
        lambda: lambdas.max,
    })
}
