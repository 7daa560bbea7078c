//! Polynomials with rational roots and their local invariants.
//!
//! A polynomial is stored by leading coefficient and `(root, multiplicity)`
//! pairs. Coefficients are only materialized on demand by [`expand`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{factor_integer, ord_int_unchecked, ord_rational_unchecked, require_prime, Valuation};

/// Parses `a` or `a/b` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(s.parse::<BigInt>().map_err(|_| bad())?)),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `leading * prod (T - root)^mult` over pairwise distinct rational roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredPoly {
    leading: BigRational,
    roots: Vec<(BigRational, u32)>,
}

impl FactoredPoly {
    pub fn new(leading: BigRational, roots: Vec<(BigRational, u32)>) -> Result<Self> {
        if leading.is_zero() {
            return Err(Error::ZeroLeading);
        }
        let mut seen = BTreeSet::new();
        for (r, m) in &roots {
            if *m == 0 {
                return Err(Error::Parse(format!("multiplicity of root {} is zero", fmt_rational(r))));
            }
            if !seen.insert(r.clone()) {
                return Err(Error::DuplicateRoot(fmt_rational(r)));
            }
        }
        if roots.is_empty() {
            return Err(Error::ConstantPolynomial);
        }
        Ok(FactoredPoly { leading, roots })
    }

    /// Constant polynomial; only used for the extracted factor of
    /// [`reduce_multiplicities`] when nothing is extracted.
    fn constant(leading: BigRational) -> Self {
        FactoredPoly { leading, roots: Vec::new() }
    }

    pub fn leading(&self) -> &BigRational {
        &self.leading
    }

    pub fn roots(&self) -> &[(BigRational, u32)] {
        &self.roots
    }

    pub fn degree(&self) -> u64 {
        self.roots.iter().map(|(_, m)| u64::from(*m)).sum()
    }

    pub fn is_separable(&self) -> bool {
        self.roots.iter().all(|(_, m)| *m == 1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = self.leading.clone();
        for (r, m) in &self.roots {
            let diff = x - r;
            for _ in 0..*m {
                acc *= &diff;
            }
        }
        acc
    }

    pub fn eval_int(&self, n: &BigInt) -> BigRational {
        self.eval(&BigRational::from_integer(n.clone()))
    }

    /// `leading / prod v_i^{m_i}`: the constant `c` in
    /// `f = c * prod (v_i T - u_i)^{m_i}`. The product is primitive, so `f` has
    /// integer coefficients iff `c` is an integer.
    pub fn value_constant(&self) -> BigRational {
        let mut den = BigInt::one();
        for (r, m) in &self.roots {
            den *= r.denom().pow(*m);
        }
        &self.leading / BigRational::from_integer(den)
    }

    /// `f'(gamma_i) = leading * prod_{k != i} (gamma_i - gamma_k)` for a
    /// separable polynomial.
    pub fn derivative_at_root(&self, i: usize) -> BigRational {
        let gi = &self.roots[i].0;
        let mut acc = self.leading.clone();
        for (k, (gk, _)) in self.roots.iter().enumerate() {
            if k != i {
                acc *= gi - gk;
            }
        }
        acc
    }

    /// Integer roots inside `[lo, hi]`, ascending.
    pub fn integer_roots_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        let lo = BigInt::from(lo);
        let hi = BigInt::from(hi);
        let mut out: Vec<u64> = self
            .roots
            .iter()
            .filter(|(r, _)| r.is_integer() && r.numer() >= &lo && r.numer() <= &hi)
            .map(|(r, _)| u64::try_from(r.numer()).expect("within u64 range"))
            .collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Display for FactoredPoly {
    /// Renders in the same grammar [`parse_factored_poly`] accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let roots: Vec<String> = self.roots.iter().map(|(r, m)| format!("{}:{m}", fmt_rational(r))).collect();
        write!(f, "lead={}; roots={}", fmt_rational(&self.leading), roots.join(","))
    }
}

/// Parses `lead=<rational>; roots=<rational>:<mult>[,<rational>:<mult>]*`.
pub fn parse_factored_poly(spec: &str) -> Result<FactoredPoly> {
    let mut leading = None;
    let mut roots = None;
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) =
            part.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
        match key.trim() {
            "lead" => leading = Some(parse_rational(value)?),
            "roots" => {
                let mut list = Vec::new();
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (r, m) = item
                        .rsplit_once(':')
                        .ok_or_else(|| Error::Parse(format!("expected root:mult, got '{item}'")))?;
                    let m: u32 =
                        m.trim().parse().map_err(|_| Error::Parse(format!("invalid multiplicity in '{item}'")))?;
                    list.push((parse_rational(r)?, m));
                }
                roots = Some(list);
            }
            other => return Err(Error::Parse(format!("unknown key '{other}'"))),
        }
    }
    let leading = leading.ok_or_else(|| Error::Parse("missing 'lead='".into()))?;
    let roots = roots.ok_or_else(|| Error::Parse("missing 'roots='".into()))?;
    FactoredPoly::new(leading, roots)
}

/// Dense polynomial with integer coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coefficients: Vec<BigInt>,
}

impl IntPoly {
    /// Trailing zero coefficients are trimmed; the zero polynomial is empty.
    pub fn new(mut coefficients: Vec<BigInt>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        IntPoly { coefficients }
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coefficients.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coefficients
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(self.coefficients.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// Nonnegative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        self.coefficients.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn pow(&self, k: u32) -> IntPoly {
        let mut acc = IntPoly::new(vec![BigInt::one()]);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient in `Z[T]`: `Some(q)` iff `self = divisor * q` with `q`
    /// integral. Long division over the rationals, then an integrality check.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        let dlen = divisor.coefficients.len();
        if dlen == 0 {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.coefficients.len() < dlen {
            return None;
        }
        let lead = BigRational::from_integer(divisor.coefficients[dlen - 1].clone());
        let mut rem: Vec<BigRational> =
            self.coefficients.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let mut quot = vec![BigRational::zero(); rem.len() - dlen + 1];
        for k in (0..quot.len()).rev() {
            let coef = &rem[k + dlen - 1] / &lead;
            for (j, d) in divisor.coefficients.iter().enumerate() {
                rem[k + j] -= &coef * BigRational::from_integer(d.clone());
            }
            quot[k] = coef;
        }
        if rem.iter().any(|c| !c.is_zero()) || quot.iter().any(|c| !c.is_integer()) {
            return None;
        }
        Some(IntPoly::new(quot.into_iter().map(|c| c.to_integer()).collect()))
    }
}

fn rational_poly_mul_linear(poly: &mut Vec<BigRational>, root: &BigRational) {
    // poly *= (T - root)
    poly.push(BigRational::zero());
    for i in (0..poly.len()).rev() {
        let lower = if i > 0 { poly[i - 1].clone() } else { BigRational::zero() };
        poly[i] = lower - &poly[i] * root;
    }
}

/// Coefficient form `alpha_0, ..., alpha_d`. Fails when a coefficient is not
/// an integer.
pub fn expand(f: &FactoredPoly) -> Result<IntPoly> {
    let mut coeffs = vec![f.leading.clone()];
    for (r, m) in &f.roots {
        for _ in 0..*m {
            rational_poly_mul_linear(&mut coeffs, r);
        }
    }
    if let Some(bad) = coeffs.iter().find(|c| !c.is_integer()) {
        return Err(Error::NonIntegral(fmt_rational(bad)));
    }
    Ok(IntPoly::new(coeffs.into_iter().map(|c| c.to_integer()).collect()))
}

fn check_exponent(e: u64) -> Result<()> {
    if e < 2 {
        return Err(Error::BadExponent(e));
    }
    Ok(())
}

/// Replaces `F` by `a^e F` with the least positive integer `a` that makes all
/// coefficients integral. Returns the scaled polynomial and `a`.
pub fn scale_to_integer(f: &FactoredPoly, e: u64) -> Result<(FactoredPoly, BigInt)> {
    check_exponent(e)?;
    let c = f.value_constant();
    let mut a = BigInt::one();
    if !c.denom().is_one() {
        let den = factor_integer(c.denom())?;
        for (&p, &k) in den.factors() {
            let need = u64::from(k).div_ceil(e);
            a *= BigInt::from(p).pow(need as u32);
        }
    }
    let scale = BigRational::from_integer(a.pow(e as u32));
    let scaled = FactoredPoly { leading: &f.leading * scale, roots: f.roots.clone() };
    Ok((scaled, a))
}

/// Splits `F = G^e * F_red` with every multiplicity of `F_red` in `[1, e-1]`.
///
/// The whole leading coefficient stays with `F_red`; `G` is monic. Fails when
/// every multiplicity is divisible by `e`, i.e. `F` is an `e`-th power over
/// the algebraic closure.
pub fn reduce_multiplicities(f: &FactoredPoly, e: u64) -> Result<(FactoredPoly, FactoredPoly)> {
    check_exponent(e)?;
    let mut reduced = Vec::new();
    let mut extracted = Vec::new();
    for (r, m) in &f.roots {
        let m = u64::from(*m);
        if m % e != 0 {
            reduced.push((r.clone(), (m % e) as u32));
        }
        if m / e != 0 {
            extracted.push((r.clone(), (m / e) as u32));
        }
    }
    if reduced.is_empty() {
        return Err(Error::PerfectPower(e));
    }
    let reduced = FactoredPoly { leading: f.leading.clone(), roots: reduced };
    let extracted = if extracted.is_empty() {
        FactoredPoly::constant(BigRational::one())
    } else {
        FactoredPoly { leading: BigRational::one(), roots: extracted }
    };
    Ok((reduced, extracted))
}

/// `cont(F) * prod (v_i T - u_i)` over the distinct roots of `F`.
///
/// The result `f` is separable with `f | F` and `F | f^(e-1)`; both
/// divisibilities are verified in `Z[T]` before returning.
pub fn radical_kernel(f: &FactoredPoly, e: u64) -> Result<FactoredPoly> {
    check_exponent(e)?;
    for (_, m) in &f.roots {
        if u64::from(*m) > e - 1 {
            return Err(Error::MultiplicityOutOfRange { mult: *m, max: e - 1 });
        }
    }
    let big_f = expand(f)?;
    let mut leading = BigRational::from_integer(big_f.content());
    for (r, _) in &f.roots {
        leading *= BigRational::from_integer(r.denom().clone());
    }
    let kernel = FactoredPoly { leading, roots: f.roots.iter().map(|(r, _)| (r.clone(), 1)).collect() };
    let small_f = expand(&kernel)?;
    if big_f.div_exact(&small_f).is_none() {
        return Err(Error::Internal("radical kernel does not divide F".into()));
    }
    if small_f.pow((e - 1) as u32).div_exact(&big_f).is_none() {
        return Err(Error::Internal("F does not divide kernel^(e-1)".into()));
    }
    Ok(kernel)
}

/// `lambda_i(p) = ord_p(f'(gamma_i))` per root, and their maximum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaValues {
    pub per_root: Vec<i64>,
    pub max: i64,
}

fn require_separable(f: &FactoredPoly) -> Result<()> {
    if f.is_separable() {
        Ok(())
    } else {
        Err(Error::NotSeparable)
    }
}

pub fn lambda_at(f: &FactoredPoly, p: u64) -> Result<LambdaValues> {
    require_prime(p)?;
    require_separable(f)?;
    let per_root: Vec<i64> = (0..f.roots.len())
        .map(|i| {
            ord_rational_unchecked(p, &f.derivative_at_root(i))
                .finite()
                .expect("separable: derivative is nonzero at roots")
        })
        .collect();
    let max = per_root.iter().copied().max().expect("degree >= 1");
    Ok(LambdaValues { per_root, max })
}

/// Content valuation `min_i ord_p(alpha_i)` over all coefficients, cross-checked
/// against `ord_p(alpha_d) + sum min(0, ord_p(gamma_i))`.
pub fn delta_at(f: &FactoredPoly, p: u64) -> Result<i64> {
    require_prime(p)?;
    let coeffs = expand(f)?;
    let content = coeffs
        .coefficients()
        .iter()
        .filter_map(|c| ord_int_unchecked(p, c).finite())
        .min()
        .expect("nonzero polynomial");
    let gauss = gauss_content_valuation(f, p);
    if content != gauss {
        return Err(Error::Internal(format!(
            "content valuation {content} at p = {p} disagrees with root formula {gauss}"
        )));
    }
    Ok(content)
}

/// `ord_p(leading) + sum m_i min(0, ord_p(gamma_i))`; a zero root contributes 0.
pub fn gauss_content_valuation(f: &FactoredPoly, p: u64) -> i64 {
    let lead = ord_rational_unchecked(p, &f.leading).finite().expect("leading != 0");
    f.roots.iter().fold(lead, |acc, (r, m)| {
        let v = match ord_rational_unchecked(p, r) {
            Valuation::Finite(v) => v.min(0),
            Valuation::Infinite => 0,
        };
        acc + i64::from(*m) * v
    })
}

/// Derived local constants of a separable integral polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyInvariants {
    pub degree: u64,
    #[serde(serialize_with = "crate::report::ser_display")]
    pub u: BigInt,
    #[serde(serialize_with = "crate::report::ser_display")]
    pub v: BigInt,
    pub s0: BTreeSet<u64>,
    pub ell0: u32,
    pub lambda_table: BTreeMap<u64, LambdaValues>,
    pub delta_table: BTreeMap<u64, i64>,
}

impl PolyInvariants {
    /// `lambda(p)`, zero outside `S0`.
    pub fn lambda(&self, p: u64) -> i64 {
        self.lambda_table.get(&p).map_or(0, |l| l.max)
    }
}

/// `S0`, `ell0`, `U`, `V` and the lambda/delta tables on `S0`.
///
/// Candidate primes come from factoring the numerators and denominators of
/// `f'(gamma_i)`, the root denominators and the leading coefficient; any
/// other prime has every `lambda_i(p) = 0` and every root p-integral.
pub fn invariants(f: &FactoredPoly) -> Result<PolyInvariants> {
    require_separable(f)?;
    expand(f)?;
    let mut candidates = BTreeSet::new();
    let mut collect = |x: &BigInt| -> Result<()> {
        if !x.is_zero() {
            candidates.extend(factor_integer(x)?.primes());
        }
        Ok(())
    };
    for i in 0..f.roots.len() {
        let d = f.derivative_at_root(i);
        collect(d.numer())?;
        collect(d.denom())?;
        collect(f.roots[i].0.denom())?;
    }
    collect(&f.leading.to_integer())?;

    let mut s0 = BTreeSet::new();
    let mut lambda_table = BTreeMap::new();
    let mut delta_table = BTreeMap::new();
    for &p in &candidates {
        let lambdas = lambda_at(f, p)?;
        let non_integral_root = f.roots.iter().any(|(r, _)| ord_rational_unchecked(p, r) < Valuation::Finite(0));
        if lambdas.per_root.iter().any(|&l| l != 0) || non_integral_root {
            s0.insert(p);
            delta_table.insert(p, delta_at(f, p)?);
            lambda_table.insert(p, lambdas);
        }
    }
    let ell0 = lambda_table.values().map(|l| l.max).max().unwrap_or(0);
    let u = f.roots.iter().map(|(r, _)| r.numer().abs()).max().expect("degree >= 1");
    let v = f.roots.iter().map(|(r, _)| r.denom().clone()).max().expect("degree >= 1");
    Ok(PolyInvariants {
        degree: f.degree(),
        u,
        v,
        s0,
        ell0: u32::try_from(ell0).expect("lambda(p) is nonnegative"),
        lambda_table,
        delta_table,
    })
}
