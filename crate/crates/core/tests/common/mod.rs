//! Brute-force oracles for the integration suites.
//!
//! Everything here uses plain `i128` arithmetic and naive trial division so
//! that it shares no code path with the library under test.

#![allow(dead_code)]

use std::collections::BTreeMap;

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Q {
    pub n: i128,
    pub d: i128,
}

pub fn q(n: i128, d: i128) -> Q {
    assert!(d != 0);
    let g = gcd(n, d).max(1);
    let s = if d < 0 { -1 } else { 1 };
    Q { n: s * n / g, d: s * d / g }
}

impl Q {
    pub fn int(n: i128) -> Q {
        Q { n, d: 1 }
    }
    pub fn add(self, o: Q) -> Q {
        q(self.n * o.d + o.n * self.d, self.d * o.d)
    }
    pub fn sub(self, o: Q) -> Q {
        q(self.n * o.d - o.n * self.d, self.d * o.d)
    }
    pub fn mul(self, o: Q) -> Q {
        q(self.n * o.n, self.d * o.d)
    }
    pub fn div(self, o: Q) -> Q {
        q(self.n * o.d, self.d * o.n)
    }
    pub fn is_zero(self) -> bool {
        self.n == 0
    }
}

/// `None` for zero.
pub fn ord_int(p: i128, x: i128) -> Option<i64> {
    if x == 0 {
        return None;
    }
    let mut x = x.abs();
    let mut k = 0;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    Some(k)
}

pub fn ord_q(p: i128, x: Q) -> Option<i64> {
    Some(ord_int(p, x.n)? - ord_int(p, x.d).unwrap())
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn primes_upto(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

/// Prime -> exponent for `|x|`, `x != 0`.
pub fn naive_factor(x: i128) -> BTreeMap<u64, u32> {
    assert!(x != 0);
    let mut x = x.unsigned_abs();
    let mut out = BTreeMap::new();
    let mut d: u128 = 2;
    while d * d <= x {
        while x.is_multiple_of(d) {
            *out.entry(d as u64).or_insert(0) += 1;
            x /= d;
        }
        d += 1;
    }
    if x > 1 {
        *out.entry(x as u64).or_insert(0) += 1;
    }
    out
}

pub fn squarefree_part_signed(x: i128) -> i128 {
    let mut k = x.signum();
    for (p, e) in naive_factor(x) {
        if e % 2 == 1 {
            k *= p as i128;
        }
    }
    k
}

/// Polynomial with rational coefficients, lowest degree first.
pub type Poly = Vec<Q>;

pub fn from_roots(lead: Q, roots: &[(Q, u32)]) -> Poly {
    let mut p: Poly = vec![lead];
    for &(r, m) in roots {
        for _ in 0..m {
            let mut next = vec![Q::int(0); p.len() + 1];
            for (i, &c) in p.iter().enumerate() {
                next[i + 1] = next[i + 1].add(c);
                next[i] = next[i].sub(c.mul(r));
            }
            p = next;
        }
    }
    p
}

pub fn eval(p: &Poly, x: Q) -> Q {
    p.iter().rev().fold(Q::int(0), |acc, &c| acc.mul(x).add(c))
}

pub fn derivative(p: &Poly) -> Poly {
    p.iter().enumerate().skip(1).map(|(i, &c)| c.mul(Q::int(i as i128))).collect()
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Q::int(0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(x.mul(y));
        }
    }
    out
}

/// Quotient if `b` divides `a` in `Z[T]`.
pub fn poly_div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    let mut rem = a.clone();
    let lb = *b.last().unwrap();
    if a.len() < b.len() {
        return None;
    }
    let mut quot = vec![Q::int(0); a.len() - b.len() + 1];
    for k in (0..quot.len()).rev() {
        let c = rem[k + b.len() - 1].div(lb);
        for (j, &bj) in b.iter().enumerate() {
            rem[k + j] = rem[k + j].sub(c.mul(bj));
        }
        quot[k] = c;
    }
    (rem.iter().all(|c| c.is_zero()) && quot.iter().all(|c| c.d == 1)).then_some(quot)
}

/// Test fixture: leading coefficient, roots and the input string.
pub struct Fixture {
    pub spec: &'static str,
    pub lead: Q,
    pub roots: Vec<Q>,
}

impl Fixture {
    pub fn coeffs(&self) -> Poly {
        let roots: Vec<(Q, u32)> = self.roots.iter().map(|&r| (r, 1)).collect();
        from_roots(self.lead, &roots)
    }

    /// `ord_p(f'(gamma_i))` from the differentiated coefficient form.
    pub fn lambdas(&self, p: i128) -> Vec<i64> {
        let d = derivative(&self.coeffs());
        self.roots.iter().map(|&r| ord_q(p, eval(&d, r)).unwrap()).collect()
    }

    pub fn value(&self, n: i128) -> i128 {
        let v = eval(&self.coeffs(), Q::int(n));
        assert_eq!(v.d, 1);
        v.n
    }
}

pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture { spec: "lead=1; roots=0:1,1:1", lead: Q::int(1), roots: vec![Q::int(0), Q::int(1)] },
        Fixture { spec: "lead=4; roots=1/2:1,-1/2:1", lead: Q::int(4), roots: vec![q(1, 2), q(-1, 2)] },
        Fixture { spec: "lead=1; roots=0:1,1:1,-2:1", lead: Q::int(1), roots: vec![Q::int(0), Q::int(1), Q::int(-2)] },
    ]
}
