//! Acceptance suite. Each criterion prints one `[PASS]` / `[FAIL]` line;
//! run with `--nocapture` to see them.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{fixtures, naive_factor, ord_q, primes_upto, squarefree_part_signed, Fixture, Q};
use fibercount::fields::{class_size_bound, class_size_limit};
use fibercount::sieve::{classify_range, SieveParams, DEFAULT_ZETA_TERMS};
use fibercount::{
    choose_parameters, delta_at, factor_value, hensel_locate, invariants, lambda_at, parse_factored_poly,
    radical_kernel, run_superelliptic, zeta_upper, Error, FactoredPoly, RunConfig,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn poly(fx: &Fixture) -> FactoredPoly {
    parse_factored_poly(fx.spec).unwrap()
}

/// Brute-force factorization of f(n), one linear factor `v n - u` at a time.
fn oracle_value_factors(fx: &Fixture, n: i128) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut rest = fx.lead;
    for r in &fx.roots {
        rest = rest.div(Q::int(r.d));
        for (p, k) in naive_factor(r.d * n - r.n) {
            *out.entry(p).or_insert(0) += k;
        }
    }
    assert_eq!(rest.d, 1);
    for (p, k) in naive_factor(rest.n) {
        *out.entry(p).or_insert(0) += k;
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let primes = primes_upto(100);
    let mut checked = 0u64;
    for fx in fixtures() {
        let f = poly(&fx);
        for &p in &primes {
            let lambdas = fx.lambdas(p as i128);
            let lambda = *lambdas.iter().max().unwrap();
            for n in 1..=1000i128 {
                let value = fx.value(n);
                if value == 0 {
                    continue;
                }
                let ord_value = common::ord_int(p as i128, value).unwrap();
                let result = hensel_locate(&f, &BigInt::from(n), p);
                if ord_value <= 2 * lambda {
                    ensure!(
                        matches!(result, Err(Error::HenselNotApplicable { .. })),
                        "{}: n={n} p={p} should be refused",
                        fx.spec
                    );
                    continue;
                }
                let cert = result.map_err(|e| format!("{}: n={n} p={p}: {e}", fx.spec))?;
                let dists: Vec<i64> = fx.roots.iter().map(|&r| ord_q(p as i128, Q::int(n).sub(r)).unwrap()).collect();
                let exact: Vec<usize> = (0..dists.len()).filter(|&j| dists[j] == ord_value - lambdas[j]).collect();
                let close: Vec<usize> = (0..dists.len()).filter(|&j| dists[j] > lambdas[j]).collect();
                ensure!(
                    exact == vec![cert.index] && close == vec![cert.index],
                    "{}: n={n} p={p}: library {} vs brute {exact:?}/{close:?}",
                    fx.spec,
                    cert.index
                );
                ensure!(
                    cert.ord_n_minus_root == dists[cert.index]
                        && cert.lambda_j == lambdas[cert.index]
                        && cert.ord_value == ord_value
                        && cert.lambda == lambda,
                    "{}: n={n} p={p}: certificate fields disagree with brute force",
                    fx.spec
                );
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{checked} located cases, {elapsed:.2?}"))
}

/// Lower-rounded evaluation of the exception bound: floor square root and
/// the zeta partial sum without its tail.
fn lower_bound(inv: &fibercount::PolyInvariants, primes: &BTreeSet<u64>, ell: u32, n: u64, sharp: bool) -> BigRational {
    let s = ell + 1 - inv.ell0;
    let mut zeta = BigRational::zero();
    for k in 1..=DEFAULT_ZETA_TERMS {
        zeta += BigRational::new(BigInt::one(), BigInt::from(k).pow(s));
    }
    if sharp {
        zeta -= BigRational::one();
    }
    let big_p = (2..).find(|p| common::is_prime(*p) && !primes.contains(p)).unwrap();
    let d = int(inv.degree as i64);
    let root = (&inv.v * BigInt::from(n) + &inv.u).sqrt();
    &d * (zeta + BigRational::new(BigInt::one(), BigInt::from(big_p - 1))) * int(n as i64)
        + &d * BigRational::from_integer(root)
        + &d * int(primes.len() as i64)
}

fn criterion_2() -> Outcome {
    let mut lines = Vec::new();
    for fx in fixtures() {
        let f = poly(&fx);
        let inv = invariants(&f).unwrap();
        let chosen = choose_parameters(&f).unwrap();
        for n_max in [100u64, 1000, 10_000] {
            let params = SieveParams { primes: chosen.primes.clone(), ell: chosen.ell, n_max };
            let report = classify_range(&f, &params).unwrap();
            let mut brute = 0u64;
            for n in 1..=n_max as i128 {
                if fx.value(n) == 0 {
                    continue;
                }
                let good = oracle_value_factors(&fx, n).iter().all(|(p, &k)| {
                    if chosen.primes.contains(p) {
                        k <= chosen.ell
                    } else {
                        k <= 1
                    }
                });
                brute += u64::from(!good);
            }
            let count = report.exceptional_count();
            ensure!(count == brute, "{} N={n_max}: sieve {count} vs brute {brute}", fx.spec);
            let c = int(count as i64);
            ensure!(
                c <= report.bounds.paper && c <= report.bounds.sharp,
                "{} N={n_max}: count {count} above bound",
                fx.spec
            );
            let low_paper = lower_bound(&inv, &chosen.primes, chosen.ell, n_max, false);
            let low_sharp = lower_bound(&inv, &chosen.primes, chosen.ell, n_max, true);
            ensure!(low_paper <= report.bounds.paper && low_sharp <= report.bounds.sharp, "bounds not upper-rounded");
            ensure!(c <= low_sharp, "{} N={n_max}: count {count} above exact sharp bound", fx.spec);
            lines.push(format!("{count}<={}", low_sharp.to_integer()));
        }
    }
    Ok(lines.join(" "))
}

fn criterion_3() -> Outcome {
    let f = parse_factored_poly("lead=1; roots=0:1,1:1").unwrap();
    let inv = invariants(&f).unwrap();
    let chosen = choose_parameters(&f).unwrap();
    let zeta = zeta_upper(i64::from(chosen.ell + 1 - inv.ell0), DEFAULT_ZETA_TERMS).unwrap();
    let lhs = int(inv.degree as i64) * (zeta - BigRational::one());
    ensure!(lhs < BigRational::new(1.into(), 6.into()), "d(zeta-1) = {lhs} is not below 1/6");
    let mut counts = Vec::new();
    for n_max in [chosen.n0, 2 * chosen.n0, 10 * chosen.n0] {
        let params = SieveParams { primes: chosen.primes.clone(), ell: chosen.ell, n_max };
        let count = classify_range(&f, &params).unwrap().exceptional_count();
        ensure!(2 * count <= n_max, "N={n_max}: {count} exceptional");
        counts.push(format!("{count}/{n_max}"));
    }
    Ok(format!("N0={} ell1={} exceptional {}", chosen.n0, chosen.ell, counts.join(", ")))
}

fn criterion_4() -> Outcome {
    let pool = [2u64, 3, 5];
    let mut sets: Vec<BTreeSet<u64>> = vec![BTreeSet::new()];
    for (i, &a) in pool.iter().enumerate() {
        sets.push([a].into());
        for &b in &pool[i + 1..] {
            sets.push([a, b].into());
        }
    }
    let mut attained = Vec::new();
    let mut classes_seen = 0;
    for primes in &sets {
        for ell in 1..=3u32 {
            let limit = class_size_limit(primes, ell).to_u64().unwrap();
            let span: i128 = 50 * primes.iter().map(|&p| (p as i128).pow(ell)).product::<i128>();
            let mut classes: BTreeMap<i128, Vec<i128>> = BTreeMap::new();
            for a in (-span..=span).filter(|&a| a != 0) {
                let fac = naive_factor(a);
                if !fac.iter().all(|(p, &k)| if primes.contains(p) { k <= ell } else { k <= 1 }) {
                    continue;
                }
                let kernel: i128 = fac.iter().filter(|(p, _)| !primes.contains(p)).map(|(&p, _)| p as i128).product();
                if kernel <= 50 {
                    classes.entry(kernel).or_default().push(a);
                }
            }
            for (k, members) in classes {
                classes_seen += 1;
                let size = members.len() as u64;
                ensure!(size <= limit, "S={primes:?} ell={ell} k={k}: size {size} > {limit}");
                let big: Vec<BigInt> = members.iter().map(|&a| a.into()).collect();
                let check = class_size_bound(&big, primes, ell).map_err(|e| e.to_string())?;
                ensure!(check.observed as u64 == size, "library size mismatch");
                if size == limit {
                    attained.push((primes.clone(), ell, k));
                }
            }
        }
    }
    let s2: BTreeSet<u64> = [2].into();
    ensure!(attained.contains(&(s2, 1, 3)), "no equality at S={{2}}, ell=1, k=3");
    Ok(format!("{classes_seen} classes, equality in {} of them", attained.len()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut config = RunConfig::new("lead=1; roots=0:1,1:1", 2);
    config.n = Some(1000);
    let report = run_superelliptic(&config).map_err(|e| e.to_string())?;
    let s = &report.summary;
    ensure!(s.c == BigRational::new(1.into(), 32768.into()), "c = {}", s.c);
    ensure!(int(s.class_count as i64) >= s.c_n, "class count {} below cN", s.class_count);
    let parts: BTreeSet<i128> =
        (1..=1000i128).filter(|n| n * (n - 1) != 0).map(|n| squarefree_part_signed(n * (n - 1))).collect();
    ensure!(s.class_count as usize <= parts.len(), "{} classes > {} squarefree parts", s.class_count, parts.len());
    let mut class_of_part = BTreeMap::new();
    for (key, members) in &report.classes.classes {
        for &n in members {
            let part = squarefree_part_signed(n as i128 * (n as i128 - 1));
            if let Some(prev) = class_of_part.insert(part, key.clone()) {
                ensure!(prev == *key, "squarefree part {part} shared by two S-classes");
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("class count {} <= {} squarefree parts, {elapsed:.2?}", s.class_count, parts.len()))
}

fn criterion_6() -> Outcome {
    let big_f = parse_factored_poly("lead=1; roots=0:1,1:2").unwrap();
    let f = radical_kernel(&big_f, 3).map_err(|e| e.to_string())?;
    let coeffs = |g: &FactoredPoly| {
        let roots: Vec<(Q, u32)> = g
            .roots()
            .iter()
            .map(|(r, m)| (common::q(r.numer().to_i128().unwrap(), r.denom().to_i128().unwrap()), *m))
            .collect();
        let lead = g.leading();
        common::from_roots(common::q(lead.numer().to_i128().unwrap(), lead.denom().to_i128().unwrap()), &roots)
    };
    let (small, big) = (coeffs(&f), coeffs(&big_f));
    ensure!(common::poly_div_exact(&big, &small).is_some(), "f does not divide F");
    ensure!(common::poly_div_exact(&common::poly_mul(&small, &small), &big).is_some(), "F does not divide f^2");
    for n in 1..=500i128 {
        let fv = common::eval(&small, Q::int(n)).n;
        let bv = common::eval(&big, Q::int(n)).n;
        if bv == 0 {
            continue;
        }
        ensure!(bv % fv == 0 && (fv * fv) % bv == 0, "n={n}: f(n)={fv}, F(n)={bv}");
    }
    Ok(format!("f = {f}"))
}

fn criterion_7() -> Outcome {
    let primes = primes_upto(1000);
    for fx in fixtures() {
        let f = poly(&fx);
        let coeffs = fx.coeffs();
        for &p in &primes {
            let pi = p as i128;
            let lam = lambda_at(&f, p).unwrap();
            let delta = delta_at(&f, p).unwrap();
            ensure!(lam.per_root == fx.lambdas(pi), "{} p={p}: lambda mismatch", fx.spec);
            ensure!(lam.max >= delta, "{} p={p}: lambda {} < delta {delta}", fx.spec, lam.max);
            let content = coeffs.iter().filter_map(|c| common::ord_int(pi, c.n)).min().unwrap();
            let gauss = ord_q(pi, fx.lead).unwrap()
                + fx.roots.iter().map(|&r| ord_q(pi, r).map_or(0, |v| v.min(0))).sum::<i64>();
            ensure!(content == gauss && delta == gauss, "{} p={p}: Gauss identity fails", fx.spec);
        }
        for n in 1..=1000i128 {
            let value = fx.value(n);
            if value == 0 {
                continue;
            }
            let fac = factor_value(&f, &BigInt::from(n)).unwrap();
            ensure!(fac.value() == BigInt::from(value), "{} n={n}: recomposition", fx.spec);
            let listed: BTreeMap<u64, u32> = fac.factors().clone();
            ensure!(listed == naive_factor(value), "{} n={n}: factor list", fx.spec);
        }
    }
    Ok(format!("{} fixtures, {} primes", fixtures().len(), primes.len()))
}

fn criterion_8() -> Outcome {
    let run = |jobs: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_fibercount"))
            .args(["count-fields", "--poly", "lead=1; roots=0:1,1:1,-2:1", "--N", "3000", "--jobs", jobs])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let (a, b) = (run("1"), run("8"));
    ensure!(!a.is_empty() && a == b, "reports differ between --jobs 1 and --jobs 8");
    Ok(format!("{} identical bytes", a.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("root localization exhaustive", criterion_1),
        ("exception bound dominance", criterion_2),
        ("half of values good past N0", criterion_3),
        ("class size limit exhaustive", criterion_4),
        ("distinct fields, T(T-1), e=2", criterion_5),
        ("divisibility sandwich, T(T-1)^2, e=3", criterion_6),
        ("local invariant identities", criterion_7),
        ("determinism across thread counts", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name}: {detail}", i + 1);
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
