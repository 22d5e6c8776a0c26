//! Exact rationals, Bernoulli numbers, power sums, Laurent expansion and
//! p-adic valuation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::IntPoly;
use crate::{Error, Result, EXACT};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `x^e` for an integer exponent (negative allowed when `x != 0`).
pub fn pow_i(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

fn bernoulli_extend(table: &mut Vec<Rational>, n: usize) {
    if table.is_empty() {
        table.push(Rational::one());
    }
    while table.len() <= n {
        let m = table.len();
        // sum_{k=0}^{m} C(m+1,k) B_k = 0
        let mut acc = Rational::zero();
        let mut c = BigInt::one();
        for (k, b) in table.iter().enumerate() {
            acc += b * Rational::from_integer(c.clone());
            c = c * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        table.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
    }
}

/// Owned Bernoulli memo table (usable without `std`).
#[derive(Clone, Debug, Default)]
pub struct BernoulliTable {
    values: Vec<Rational>,
}

impl BernoulliTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, n: usize) -> Rational {
        bernoulli_extend(&mut self.values, n);
        self.values[n].clone()
    }
}

#[cfg(feature = "std")]
static BERNOULLI_CACHE: std::sync::Mutex<Vec<Rational>> = std::sync::Mutex::new(Vec::new());

/// Bernoulli number `B_n` with `x/(e^x-1) = sum B_n x^n/n!` (so `B_1 = -1/2`).
///
/// With the `std` feature results are memoized in a process-wide table behind
/// a mutex; otherwise each call recomputes (use [`BernoulliTable`] instead).
pub fn bernoulli(n: usize) -> Rational {
    #[cfg(feature = "std")]
    {
        let mut table = BERNOULLI_CACHE.lock().unwrap_or_else(|e| e.into_inner());
        bernoulli_extend(&mut table, n);
        table[n].clone()
    }
    #[cfg(not(feature = "std"))]
    {
        BernoulliTable::new().get(n)
    }
}

/// Generalized binomial coefficient `a(a-1)...(a-k+1)/k!` for any integer `a`.
pub fn binomial(a: i64, k: u32) -> Rational {
    Rational::from_integer(binomial_int(&BigInt::from(a), k))
}

pub fn binomial_int(a: &BigInt, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= a - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Finite Laurent polynomial in `p` with an error term `O(p^order)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyInP {
    coeffs: BTreeMap<i64, Rational>,
    order: i64,
}

impl PolyInP {
    pub fn new(order: i64) -> Self {
        PolyInP {
            coeffs: BTreeMap::new(),
            order,
        }
    }

    pub fn exact_from(terms: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        let mut out = PolyInP::new(EXACT);
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order == EXACT
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, e: i64) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, e: i64, c: Rational) {
        if e >= self.order || c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn add(&self, other: &PolyInP) -> PolyInP {
        let mut out = PolyInP::new(self.order.min(other.order));
        for (e, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn mul(&self, other: &PolyInP) -> PolyInP {
        let va = self.min_exponent().unwrap_or(self.order).min(self.order);
        let vb = other.min_exponent().unwrap_or(other.order).min(other.order);
        let order = shift(self.order, vb).min(shift(other.order, va));
        let mut out = PolyInP::new(order);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }

    /// Evaluates the stored terms at a concrete `p`.
    pub fn eval(&self, p: &Rational) -> Rational {
        self.coeffs.iter().map(|(e, c)| c * pow_i(p, *e)).sum()
    }
}

/// Adds a finite shift to an order, keeping [`EXACT`] fixed.
pub fn shift(order: i64, d: i64) -> i64 {
    if order == EXACT || d == EXACT {
        EXACT
    } else {
        order + d
    }
}

/// `sum_{a=0}^{p-1} a^m` as an exact polynomial in `p` (Faulhaber).
pub fn faulhaber_power_sum(m: usize) -> PolyInP {
    let mut out = PolyInP::new(EXACT);
    for (k, c) in faulhaber_coeffs(m).into_iter().enumerate() {
        out.add_term(k as i64, c);
    }
    out
}

/// Coefficients `c_k` (index = power of `x`) with `sum_{a=0}^{x-1} a^m = sum c_k x^k`.
pub fn faulhaber_coeffs(m: usize) -> Vec<Rational> {
    let mut out = alloc::vec![Rational::zero(); m + 2];
    let inv = Rational::new(BigInt::one(), BigInt::from(m + 1));
    for k in 1..=m + 1 {
        let c = binomial((m + 1) as i64, k as u32) * bernoulli(m + 1 - k) * &inv;
        out[k] = c;
    }
    out
}

/// Laurent expansion of `num(p)/den(p)` around `p = 0`, up to `O(p^order)`.
///
/// A constant denominator gives an exact polynomial.
pub fn laurent_expand(num: &IntPoly, den: &IntPoly, order: i64) -> Result<PolyInP> {
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if let Some(d) = den.as_constant() {
        let d = int(d);
        return Ok(PolyInP::exact_from(
            num.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| (i as i64, int(*c) / &d)),
        ));
    }
    let v = den.coeffs().iter().position(|c| *c != 0).unwrap_or(0);
    let d: Vec<Rational> = den.coeffs()[v..].iter().map(|c| int(*c)).collect();
    // num/den = p^{-v} * num/d with d(0) != 0; need series of num/d to degree order+v-1.
    let needed = order + v as i64;
    let mut out = PolyInP::new(order);
    if needed <= 0 {
        return Ok(out);
    }
    let needed = needed as usize;
    let inv0 = d[0].recip();
    let n: Vec<Rational> = num.coeffs().iter().map(|c| int(*c)).collect();
    let mut q: Vec<Rational> = Vec::with_capacity(needed);
    for i in 0..needed {
        let mut acc = n.get(i).cloned().unwrap_or_else(Rational::zero);
        for j in 1..=i.min(d.len() - 1) {
            acc -= &d[j] * &q[i - j];
        }
        q.push(acc * &inv0);
    }
    for (i, c) in q.into_iter().enumerate() {
        out.add_term(i as i64 - v as i64, c);
    }
    Ok(out)
}

/// p-adic valuation; [`Valuation::Infinite`] for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn at_least(self, n: i64) -> bool {
        match self {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= n,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

pub fn int_valuation(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn padic_valuation(q: &Rational, p: u64) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(int_valuation(q.numer(), p) - int_valuation(q.denom(), p))
}

/// Renders a rational as `a` or `a/b`.
pub fn fmt_rational(q: &Rational) -> alloc::string::String {
    use alloc::string::ToString;
    if q.is_integer() {
        q.numer().to_string()
    } else {
        alloc::format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `a` or `a/b` (optional sign on `a`), the inverse of [`fmt_rational`].
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}
