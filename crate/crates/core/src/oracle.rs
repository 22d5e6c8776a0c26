//! Direct numeric evaluation at concrete primes, independent of the symbolic code.
//!
//! All values are exact rationals. Long chain sums are accumulated as integer
//! numerators over a fixed common denominator.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{bernoulli, padic_valuation, Rational, Valuation};
use crate::composition::Composition;
use crate::expansions::QuantitySpec;
use crate::series::MhsSeries;
use crate::{Error, Result};

/// Default limit on elementary chain steps per evaluation.
pub const DEFAULT_WORK_BUDGET: u64 = 100_000_000;

/// `sum_{hi >= n_1 > ... > n_k > lo} prod n_i^{-s_i}` over indices passing `allowed`.
///
/// Exponents may be any integers.
pub fn chain_sum(hi: u64, lo: u64, exps: &[i64], allowed: &dyn Fn(u64) -> bool) -> Rational {
    let k = exps.len();
    if k == 0 {
        return Rational::one();
    }
    if hi <= lo {
        return Rational::zero();
    }
    let l = if exps.iter().any(|&s| s > 0) {
        let mut l = BigInt::one();
        for n in lo + 1..=hi {
            if allowed(n) {
                l = l.lcm(&BigInt::from(n));
            }
        }
        l
    } else {
        BigInt::one()
    };
    // totals[i] = numerator of sum over chains n_i > ... > n_k with n_i <= current m
    let mut totals = vec![BigInt::zero(); k + 1];
    totals[k] = BigInt::one();
    for m in lo + 1..=hi {
        if !allowed(m) {
            continue;
        }
        let bm = BigInt::from(m);
        let cofactor = &l / &bm;
        // deepest level first so totals[i+1] still excludes m when level i reads it
        for i in 0..k {
            let s = exps[i];
            let w = if s >= 0 {
                num_traits::pow(cofactor.clone(), s as usize)
            } else {
                num_traits::pow(bm.clone(), (-s) as usize)
            };
            let add = w * &totals[i + 1];
            totals[i] += add;
        }
    }
    let e: usize = exps.iter().map(|&s| s.max(0) as usize).sum();
    Rational::new(totals.swap_remove(0), num_traits::pow(l, e))
}

/// `H_N(s)`.
pub fn eval_mhs(n: u64, s: &Composition) -> Rational {
    let exps: Vec<i64> = s.parts().iter().map(|&x| x as i64).collect();
    chain_sum(n, 0, &exps, &|_| true)
}

/// `S_{N,M}(exps)`, restricted to indices prime to `restricted_at` when given.
pub fn eval_power_sum(n: u64, m: u64, exps: &[i64], restricted_at: Option<u64>) -> Rational {
    match restricted_at {
        Some(p) => chain_sum(n, m, exps, &|x| x % p != 0),
        None => chain_sum(n, m, exps, &|_| true),
    }
}

/// `sum_{N >= n_1 > ... > n_k >= 1} prod z_i^{n_i} / n_i^{s_i}`.
pub fn eval_polylog_sum(n: u64, exps: &[u32], zs: &[Rational]) -> Result<Rational> {
    if exps.len() != zs.len() {
        return Err(Error::InvalidArgument(String::from(
            "exponent and parameter lists differ in length",
        )));
    }
    let k = exps.len();
    let mut totals = vec![Rational::zero(); k + 1];
    totals[k] = Rational::one();
    let mut zpow: Vec<Rational> = vec![Rational::one(); k];
    for m in 1..=n {
        let bm = Rational::from_integer(m.into());
        for i in 0..k {
            zpow[i] = &zpow[i] * &zs[i];
        }
        for i in 0..k {
            let w = &zpow[i] / num_traits::pow(bm.clone(), exps[i] as usize);
            let add = w * &totals[i + 1];
            totals[i] += add;
        }
    }
    Ok(totals.swap_remove(0))
}

/// `C(n, k)` for `0 <= k <= n`, zero otherwise.
pub fn binomial_big(n: &BigInt, k: &BigInt) -> BigInt {
    if k.is_negative() || k > n || n.is_negative() {
        return BigInt::zero();
    }
    let k = core::cmp::min(k.clone(), n - k)
        .to_u64()
        .expect("binomial index fits u64");
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    c
}

/// Curious sum `C_{r,k,p}` via the chain form
/// `k!/p^r * sum_{p^r = m_1 > ... > m_k > 0} 1/(m_2...m_k)` with consecutive
/// partial sums (and `m_{k+1} = 0`) in distinct residue classes.
pub fn eval_curious(r: u32, k: u32, p: u64, budget: u64) -> Result<Rational> {
    let big_p = p.checked_pow(r).ok_or(Error::WorkBudget {
        budget,
        needed: u64::MAX,
    })?;
    let needed = (k as u64).saturating_mul(big_p);
    if needed > budget {
        return Err(Error::WorkBudget { budget, needed });
    }
    if k <= 1 {
        return Ok(Rational::zero());
    }
    let levels = (k - 1) as usize;
    let mut l = BigInt::one();
    for m in 1..big_p {
        l = l.lcm(&BigInt::from(m));
    }
    // level j holds chains m_{j+2} > ... > m_k; totals and per-residue totals over m < current
    let mut totals = vec![BigInt::zero(); levels];
    let mut by_res = vec![vec![BigInt::zero(); p as usize]; levels];
    for m in 1..big_p {
        let res = (m % p) as usize;
        let cofactor = &l / BigInt::from(m);
        let mut fresh = Vec::with_capacity(levels);
        for j in 0..levels {
            let v = if j == 0 {
                // m_k is itself a part
                if res == 0 {
                    BigInt::zero()
                } else {
                    cofactor.clone()
                }
            } else {
                &cofactor * (&totals[j - 1] - &by_res[j - 1][res])
            };
            fresh.push(v);
        }
        for (j, v) in fresh.into_iter().enumerate() {
            by_res[j][res] += &v;
            totals[j] += v;
        }
    }
    let top = levels - 1;
    let chains = Rational::new(
        totals[top].clone() - &by_res[top][0],
        num_traits::pow(l, levels),
    );
    let kfact: BigInt = (1..=k as u64).map(BigInt::from).product();
    Ok(chains * Rational::new(kfact, BigInt::from(big_p)))
}

/// `C_{r,k,p}` modulo `p^prec`: the chain sum of [`eval_curious`] done with
/// the integers `p^{r-1}/m` modulo a power of `p` instead of exact fractions.
///
/// The returned rational agrees with the exact value to `O(p^prec)`.
pub fn eval_curious_mod(r: u32, k: u32, p: u64, prec: i64, budget: u64) -> Result<Rational> {
    let big_p = p.checked_pow(r).ok_or(Error::WorkBudget {
        budget,
        needed: u64::MAX,
    })?;
    let needed = (k as u64).saturating_mul(big_p);
    if needed > budget {
        return Err(Error::WorkBudget { budget, needed });
    }
    if k <= 1 || r == 0 {
        return eval_curious(r, k, p, budget);
    }
    let levels = (k - 1) as usize;
    // every chain term times p^{levels (r-1)} is integral; one more p^r from the prefactor
    let shift = r as i64 + levels as i64 * (r as i64 - 1);
    let m_pow = (prec + shift).max(1) as usize;
    let bp = BigInt::from(p);
    let q = num_traits::pow(bp.clone(), m_pow);
    let scaled_inv = |m: u64| -> BigInt {
        let mut u = m;
        let mut v = 0u32;
        while u.is_multiple_of(p) {
            u /= p;
            v += 1;
        }
        let g = BigInt::from(u).extended_gcd(&q);
        let inv = g.x.mod_floor(&q);
        (inv * num_traits::pow(bp.clone(), (r - 1 - v) as usize)) % &q
    };
    let mut totals = vec![BigInt::zero(); levels];
    let mut by_res = vec![vec![BigInt::zero(); p as usize]; levels];
    for m in 1..big_p {
        let res = (m % p) as usize;
        let inv = scaled_inv(m);
        let mut fresh = Vec::with_capacity(levels);
        for j in 0..levels {
            let v = if j == 0 {
                if res == 0 {
                    BigInt::zero()
                } else {
                    inv.clone()
                }
            } else {
                (&inv * (&totals[j - 1] - &by_res[j - 1][res])).mod_floor(&q)
            };
            fresh.push(v);
        }
        for (j, v) in fresh.into_iter().enumerate() {
            by_res[j][res] = (&by_res[j][res] + &v) % &q;
            totals[j] = (&totals[j] + v) % &q;
        }
    }
    let top = levels - 1;
    let x = (&totals[top] - &by_res[top][0]).mod_floor(&q);
    let kfact: BigInt = (1..=k as u64).map(BigInt::from).product();
    Ok(Rational::new(kfact * x, num_traits::pow(bp, shift as usize)))
}

/// Apery number `b_n = sum_k C(n,k)^2 C(n+k,k)^2`.
pub fn apery_number(n: u64) -> BigInt {
    let bn = BigInt::from(n);
    let mut c1 = BigInt::one();
    let mut c2 = BigInt::one();
    let mut acc = BigInt::zero();
    for k in 0..=n {
        if k > 0 {
            let bk = BigInt::from(k);
            c1 = c1 * (&bn - &bk + 1u32) / &bk;
            c2 = c2 * (&bn + &bk) / &bk;
        }
        acc += &c1 * &c1 * &c2 * &c2;
    }
    acc
}

/// Approximation of `p^k zeta_p(k)` from a Kummer-congruent Bernoulli number.
///
/// Correct modulo `p^{k+t+1}`; only for small `p` and `t` since the Bernoulli
/// index grows like `p^{t+1}`.
pub fn zeta_p_approx(k: u32, p: u64, t: u32) -> Rational {
    let m = (p - 1) * p.pow(t) + 1 - k as u64;
    let b = bernoulli(m as usize) / Rational::from_integer(m.into());
    let pk = Rational::from_integer(num_traits::pow(BigInt::from(p), k as usize));
    -b * pk
}

fn eval_poly_at(poly: &crate::IntPoly, p: u64, what: &str) -> Result<u64> {
    let v = poly.eval(&BigInt::from(p));
    v.to_u64().ok_or_else(|| {
        Error::InvalidArgument(alloc::format!(
            "{what} = {v} at p = {p} is negative or too large"
        ))
    })
}

/// Exact value of the quantity at the prime `p`, by direct summation.
pub fn eval_quantity(q: &QuantitySpec, p: u64, budget: u64) -> Result<Rational> {
    let bp = BigInt::from(p);
    let charge = |needed: u64| {
        if needed > budget {
            Err(Error::WorkBudget { budget, needed })
        } else {
            Ok(())
        }
    };
    Ok(match q {
        QuantitySpec::BinomialPP { a, b, r } => {
            let pr = num_traits::pow(bp.clone(), *r as usize);
            let (n, k) = (&pr * a, &pr * b);
            charge(k.to_u64().unwrap_or(u64::MAX))?;
            Rational::from_integer(binomial_big(&n, &k))
        }
        QuantitySpec::BinomialPoly { f, g } => {
            let (n, k) = (f.eval(&bp), g.eval(&bp));
            charge(core::cmp::min(k.clone(), &n - &k).to_u64().unwrap_or(0))?;
            Rational::from_integer(binomial_big(&n, &k))
        }
        QuantitySpec::Apery => Rational::from_integer(apery_number(p - 1)),
        QuantitySpec::ZetaP(k) => {
            return Err(Error::NotRational(alloc::format!(
                "zetap({k}) is not rational"
            )))
        }
        QuantitySpec::PowerSum {
            f,
            g,
            exps,
            restricted,
        } => {
            let n = eval_poly_at(f, p, "upper bound")?;
            let m = eval_poly_at(g, p, "lower bound")?;
            charge((exps.len() as u64).saturating_mul(n.saturating_sub(m)))?;
            eval_power_sum(n, m, exps, restricted.then_some(p))
        }
        QuantitySpec::RestrictedHarmonic(r) => {
            let n = p.checked_pow(*r).ok_or(Error::WorkBudget {
                budget,
                needed: u64::MAX,
            })?;
            charge(n)?;
            eval_power_sum(n, 0, &[1], Some(p))
        }
        QuantitySpec::Curious { r, k } => eval_curious(*r, *k, p, budget)?,
        QuantitySpec::SumPolyMhs { poly, s } => eval_sum_poly(poly, s, p),
        QuantitySpec::HalfHarmonic(k) => {
            let h = eval_power_sum((p - 1) / 2, 0, &[*k as i64], None);
            h * Rational::from_integer(num_traits::pow(bp, *k as usize))
        }
        QuantitySpec::AlternatingHarmonic(k) => {
            let h = eval_polylog_sum(p - 1, &[*k], &[-Rational::one()])?;
            h * Rational::from_integer(num_traits::pow(bp, *k as usize))
        }
        QuantitySpec::RationalFn { num, den } => {
            let d = den.eval(&bp);
            if d.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            Rational::new(num.eval(&bp), d)
        }
    })
}

/// `sum_{k=1}^{p-1} P(k) H_k(s)`.
fn eval_sum_poly(poly: &[Rational], s: &Composition, p: u64) -> Rational {
    let parts = s.parts();
    let d = parts.len();
    // h[i] = H_k(s_{i+1},...,s_d); h[d] = 1
    let mut h = vec![Rational::zero(); d + 1];
    h[d] = Rational::one();
    let mut acc = Rational::zero();
    for k in 1..p {
        let bk = Rational::from_integer(k.into());
        for i in 0..d {
            let add = &h[i + 1] / num_traits::pow(bk.clone(), parts[i] as usize);
            h[i] += add;
        }
        let mut pk = Rational::zero();
        for c in poly.iter().rev() {
            pk = pk * &bk + c;
        }
        acc += pk * &h[0];
    }
    acc
}

/// Value of the explicit terms of a series at `p` (the error term is ignored).
pub fn eval_series(series: &MhsSeries, p: u64) -> Rational {
    let bp = Rational::from_integer(p.into());
    let mut cache: alloc::collections::BTreeMap<Composition, Rational> = Default::default();
    let mut acc = Rational::zero();
    for t in series.terms() {
        let h = cache
            .entry(t.comp.clone())
            .or_insert_with(|| eval_mhs(p - 1, &t.comp))
            .clone();
        acc += t.coeff * crate::arith::pow_i(&bp, t.p_exponent) * h;
    }
    acc
}

/// Primes in `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeWindow {
    pub lo: u64,
    pub hi: u64,
}

impl Default for PrimeWindow {
    fn default() -> Self {
        PrimeWindow { lo: 11, hi: 97 }
    }
}

impl PrimeWindow {
    pub fn new(lo: u64, hi: u64) -> Self {
        PrimeWindow { lo, hi }
    }

    pub fn primes(&self) -> Vec<u64> {
        (self.lo.max(2)..=self.hi)
            .filter(|&n| is_prime(n))
            .collect()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericRecord {
    pub p: u64,
    pub required: i64,
    pub achieved: Valuation,
    pub pass: bool,
}

impl NumericRecord {
    /// Record for a difference that must vanish modulo `p^required`.
    pub fn from_difference(p: u64, required: i64, difference: &Rational) -> Self {
        let achieved = padic_valuation(difference, p);
        NumericRecord {
            p,
            required,
            achieved,
            pass: achieved.at_least(required),
        }
    }

    /// As [`from_difference`](Self::from_difference) for a difference only
    /// known modulo `p^precision`; the achieved valuation is capped there.
    pub fn from_approximate_difference(p: u64, required: i64, difference: &Rational, precision: i64) -> Self {
        let achieved = padic_valuation(difference, p).min(Valuation::Finite(precision));
        NumericRecord {
            p,
            required,
            achieved,
            pass: achieved.at_least(required),
        }
    }

    pub fn line(&self) -> String {
        alloc::format!(
            "p={} req={} got={} {}",
            self.p,
            self.required,
            self.achieved,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Per-prime valuation checks; passes iff every record passes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NumericReport {
    pub records: Vec<NumericRecord>,
}

impl NumericReport {
    /// Records are kept sorted by prime.
    pub fn from_records(mut records: Vec<NumericRecord>) -> Self {
        records.sort_by_key(|r| r.p);
        NumericReport { records }
    }

    pub fn pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.line());
            out.push('\n');
        }
        out
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>6} {:>9} {:>9} {:>6}",
            "prime", "required", "achieved", "result"
        );
        for r in &self.records {
            let v = alloc::format!("{}", r.achieved);
            let _ = writeln!(
                out,
                "{:>6} {:>9} {:>9} {:>6}",
                r.p,
                r.required,
                v,
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            out,
            "summary: {}",
            if self.pass() { "PASS" } else { "FAIL" }
        );
        out
    }
}

/// Evaluates `difference(p)` at every prime of the window and requires valuation `>= n`.
pub fn check_numeric(
    difference: impl Fn(u64) -> Result<Rational>,
    window: PrimeWindow,
    n: i64,
) -> Result<NumericReport> {
    let mut records = Vec::new();
    for p in window.primes() {
        records.push(NumericRecord::from_difference(p, n, &difference(p)?));
    }
    Ok(NumericReport::from_records(records))
}

/// Numeric check that `series` approximates `q` to its order.
pub fn check_expansion(
    q: &QuantitySpec,
    series: &MhsSeries,
    window: PrimeWindow,
    budget: u64,
) -> Result<NumericReport> {
    check_numeric(
        |p| Ok(eval_quantity(q, p, budget)? - eval_series(series, p)),
        window,
        series.order(),
    )
}
