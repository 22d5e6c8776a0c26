//! Truncated series `sum c_i p^{b_i} H_{p-1}(s_i) + O(p^N)` and congruence statements.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{fmt_rational, Rational};
use crate::composition::{stuffle, Composition};
use crate::{Error, Result, EXACT};

/// One term `coeff * p^p_exponent * H_{p-1}(comp)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MhsTerm {
    pub coeff: Rational,
    pub p_exponent: i64,
    pub comp: Composition,
}

impl MhsTerm {
    /// `p_exponent == |comp|`, i.e. the term is a multiple of `h_p(comp)`.
    pub fn is_weighted(&self) -> bool {
        self.p_exponent == self.comp.weight() as i64
    }
}

/// A prime-indexed quantity known up to `O(p^order)`.
///
/// `order == EXACT` means there is no error term. Terms with `p_exponent >= order`
/// are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MhsSeries {
    terms: BTreeMap<(i64, Composition), Rational>,
    order: i64,
}

impl Default for MhsSeries {
    fn default() -> Self {
        Self::zero()
    }
}

impl MhsSeries {
    /// Exact zero.
    pub fn zero() -> Self {
        MhsSeries {
            terms: BTreeMap::new(),
            order: EXACT,
        }
    }

    /// `O(p^order)`.
    pub fn big_o(order: i64) -> Self {
        MhsSeries {
            terms: BTreeMap::new(),
            order,
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, 0, Composition::empty())
    }

    /// Exact single term.
    pub fn term(c: Rational, b: i64, s: Composition) -> Self {
        let mut out = Self::zero();
        out.add_term(c, b, s);
        out
    }

    /// `h_p(s)` (exact).
    pub fn weighted(s: Composition) -> Self {
        let b = s.weight() as i64;
        Self::term(Rational::one(), b, s)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = MhsTerm>, order: i64) -> Self {
        let mut out = Self::big_o(order);
        for t in terms {
            out.add_term(t.coeff, t.p_exponent, t.comp);
        }
        out
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order == EXACT
    }

    /// No explicit terms (the value is `O(p^order)`).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c p^b H(s)`; dropped if `b >= order`.
    pub fn add_term(&mut self, c: Rational, b: i64, s: Composition) {
        if c.is_zero() || b >= self.order {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry((b, s)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, b: i64, s: &Composition) -> Rational {
        self.terms
            .get(&(b, s.clone()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Terms sorted by p-exponent, then composition order.
    pub fn terms(&self) -> impl Iterator<Item = MhsTerm> + '_ {
        self.terms.iter().map(|((b, s), c)| MhsTerm {
            coeff: c.clone(),
            p_exponent: *b,
            comp: s.clone(),
        })
    }

    pub(crate) fn raw_terms(&self) -> &BTreeMap<(i64, Composition), Rational> {
        &self.terms
    }

    /// `min(min_i b_i, order)`: a guaranteed lower bound on the valuation.
    pub fn minval(&self) -> i64 {
        self.terms
            .keys()
            .map(|(b, _)| *b)
            .min()
            .unwrap_or(self.order)
            .min(self.order)
    }

    /// Lowers the order (never raises it) and drops absorbed terms.
    pub fn with_order(mut self, n: i64) -> Self {
        if n < self.order {
            self.order = n;
            self.terms.retain(|(b, _), _| *b < n);
        }
        self
    }

    pub fn truncate(&self, n: i64) -> Result<Self> {
        if n > self.order {
            return Err(Error::TruncationBeyondOrder {
                requested: n,
                known: self.order,
            });
        }
        Ok(self.clone().with_order(n))
    }

    pub fn add(&self, other: &MhsSeries) -> MhsSeries {
        let mut out = MhsSeries::big_o(self.order.min(other.order));
        for ((b, s), c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(c.clone(), *b, s.clone());
        }
        out
    }

    pub fn neg(&self) -> MhsSeries {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &MhsSeries) -> MhsSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> MhsSeries {
        if k.is_zero() {
            return MhsSeries::zero();
        }
        MhsSeries {
            terms: self
                .terms
                .iter()
                .map(|(key, c)| (key.clone(), c * k))
                .collect(),
            order: self.order,
        }
    }

    /// Multiplies by `p^d`.
    pub fn shift(&self, d: i64) -> MhsSeries {
        MhsSeries {
            terms: self
                .terms
                .iter()
                .map(|((b, s), c)| ((b + d, s.clone()), c.clone()))
                .collect(),
            order: crate::arith::shift(self.order, d),
        }
    }

    pub fn mul(&self, other: &MhsSeries) -> MhsSeries {
        self.mul_with_bounds(self.minval(), other, other.minval(), EXACT)
    }

    /// Product where `va`, `vb` are proven lower bounds on the valuations of the
    /// two quantities, and only terms below `cap` are wanted.
    ///
    /// A bound larger than the syntactic one must hold for the quantity itself.
    pub fn mul_with_bounds(&self, va: i64, other: &MhsSeries, vb: i64, cap: i64) -> MhsSeries {
        let va = va.max(self.minval()).min(self.order);
        let vb = vb.max(other.minval()).min(other.order);
        let order = [
            add_orders(self.order, vb),
            add_orders(other.order, va),
            add_orders(self.order, other.order),
            cap,
        ]
        .into_iter()
        .min()
        .unwrap();
        let mut out = MhsSeries::big_o(order);
        let mut cache: BTreeMap<(&Composition, &Composition), crate::CompLinComb> = BTreeMap::new();
        for ((b1, s1), c1) in &self.terms {
            for ((b2, s2), c2) in &other.terms {
                let b = b1 + b2;
                if b >= order {
                    continue;
                }
                let c = c1 * c2;
                let key = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
                let prod = cache.entry(key).or_insert_with(|| stuffle(key.0, key.1));
                for (u, m) in prod.iter() {
                    out.add_term(&c * m, b, u.clone());
                }
            }
        }
        out
    }

    /// Constant term (`b == 0`, empty composition).
    pub fn constant_term(&self) -> Rational {
        self.coeff(0, &Composition::empty())
    }

    /// Inverse of `c (1 + u)` with every term of `u` at `p_exponent >= 1`, to the input order.
    pub fn invert_unit(&self) -> Result<MhsSeries> {
        self.invert_unit_to(self.order)
    }

    /// As [`invert_unit`](Self::invert_unit) but truncated at `min(n, order)`; allows exact input.
    pub fn invert_unit_to(&self, n: i64) -> Result<MhsSeries> {
        let n = n.min(self.order);
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::NotAUnit(alloc::format!(
                "zero constant term in {self}"
            )));
        }
        let mut u = self.clone();
        u.add_term(-c.clone(), 0, Composition::empty());
        if let Some(((b, s), _)) = u.terms.iter().find(|((b, _), _)| *b <= 0) {
            return Err(Error::NotAUnit(alloc::format!(
                "term p^{b} H{s} is not in the maximal ideal"
            )));
        }
        let cinv = c.recip();
        if u.is_zero() {
            return Ok(MhsSeries::constant(cinv).with_order(n));
        }
        if n == EXACT {
            return Err(Error::NotAUnit(String::from(
                "inverse of an exact non-constant series is infinite",
            )));
        }
        let minus_u = u.scale(&-cinv.clone()).with_order(n);
        let mut acc = MhsSeries::one().with_order(n);
        let mut power = MhsSeries::one().with_order(n);
        loop {
            power = power.mul_with_bounds(power.minval(), &minus_u, minus_u.minval(), n);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc.scale(&cinv).with_order(n))
    }

    /// Inverse of `c p^b (1 + u)` where the lowest term is the constant monomial `c p^b`.
    pub fn invert_monomial_unit(&self) -> Result<MhsSeries> {
        let (b0, lead) = match self.terms.iter().next() {
            Some(((b, s), c)) if s.is_empty() => (*b, c.clone()),
            _ => {
                return Err(Error::NotAUnit(alloc::format!(
                    "no leading constant monomial in {self}"
                )))
            }
        };
        if self.terms.keys().skip(1).any(|(b, _)| *b <= b0) {
            return Err(Error::NotAUnit(alloc::format!(
                "leading monomial not isolated in {self}"
            )));
        }
        let normalized = self.shift(-b0).scale(&lead.recip());
        let inv = normalized.invert_unit_to(normalized.order)?;
        Ok(inv.scale(&lead.recip()).shift(-b0))
    }
}

/// Saturating sum where `EXACT` absorbs.
fn add_orders(x: i64, y: i64) -> i64 {
    if x == EXACT || y == EXACT {
        EXACT
    } else {
        x.saturating_add(y).min(EXACT - 1)
    }
}

impl fmt::Display for MhsSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((b, s), c) in &self.terms {
            // later negative terms are written as subtractions
            let c = if first {
                c.clone()
            } else if c.is_negative() {
                write!(f, " - ")?;
                -c
            } else {
                write!(f, " + ")?;
                c.clone()
            };
            first = false;
            // unit coefficients are implicit when a factor follows
            let mut factors = Vec::new();
            match *b {
                0 => {}
                1 => factors.push(String::from("p")),
                _ => factors.push(alloc::format!("p^{b}")),
            }
            if !s.is_empty() {
                factors.push(alloc::format!("H{s}"));
            }
            if factors.is_empty() {
                write!(f, "{}", fmt_rational(&c))?;
            } else if c.is_one() {
                write!(f, "{}", factors.join(" * "))?;
            } else if (-&c).is_one() {
                write!(f, "-{}", factors.join(" * "))?;
            } else {
                write!(f, "{} * {}", fmt_rational(&c), factors.join(" * "))?;
            }
        }
        if self.order != EXACT {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O(p^{})", self.order)?;
        } else if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CongruenceKind {
    /// Every term has `p_exponent == weight`.
    Weighted,
    /// Every term has `p_exponent <= weight`.
    Mixed,
    /// Some term has `p_exponent > weight`.
    General,
}

/// `lhs_minus_rhs == 0 mod p^modulus_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceStatement {
    lhs_minus_rhs: MhsSeries,
    modulus_power: i64,
    kind: CongruenceKind,
}

impl CongruenceStatement {
    /// Classifies the statement; fails if the series is not known to `p^n`.
    pub fn new(lhs_minus_rhs: MhsSeries, n: i64) -> Result<Self> {
        if n > lhs_minus_rhs.order() {
            return Err(Error::InsufficientOrder {
                modulus: n,
                order: lhs_minus_rhs.order(),
            });
        }
        let kind = classify(&lhs_minus_rhs);
        Ok(CongruenceStatement {
            lhs_minus_rhs: lhs_minus_rhs.with_order(n),
            modulus_power: n,
            kind,
        })
    }

    pub fn weighted(lhs_minus_rhs: MhsSeries, n: i64) -> Result<Self> {
        let st = Self::new(lhs_minus_rhs, n)?;
        if st.kind != CongruenceKind::Weighted {
            return Err(Error::NotWeighted(alloc::format!("{}", st.lhs_minus_rhs)));
        }
        Ok(st)
    }

    /// From `lhs` and `rhs` series.
    pub fn between(lhs: &MhsSeries, rhs: &MhsSeries, n: i64) -> Result<Self> {
        Self::new(lhs.sub(rhs), n)
    }

    pub fn series(&self) -> &MhsSeries {
        &self.lhs_minus_rhs
    }

    pub fn modulus_power(&self) -> i64 {
        self.modulus_power
    }

    pub fn kind(&self) -> CongruenceKind {
        self.kind
    }

    /// Splits by offset `k = |s| - b` into weighted statements modulo `p^{n+k}`.
    ///
    /// The conjunction of the parts implies `self`. Groups with `n + k <= 0`
    /// are omitted since they hold trivially.
    pub fn decompose_weighted(&self) -> BTreeMap<i64, CongruenceStatement> {
        let mut groups: BTreeMap<i64, MhsSeries> = BTreeMap::new();
        for ((b, s), c) in self.lhs_minus_rhs.raw_terms() {
            let w = s.weight() as i64;
            let k = w - b;
            groups
                .entry(k)
                .or_default()
                .add_term(c.clone(), w, s.clone());
        }
        if self.kind == CongruenceKind::Weighted && groups.is_empty() {
            groups.insert(0, MhsSeries::zero());
        }
        groups
            .into_iter()
            .filter(|(k, _)| self.modulus_power + k > 0)
            .map(|(k, series)| {
                let n = self.modulus_power + k;
                let st = CongruenceStatement {
                    lhs_minus_rhs: series.with_order(n),
                    modulus_power: n,
                    kind: CongruenceKind::Weighted,
                };
                (k, st)
            })
            .collect()
    }
}

fn classify(s: &MhsSeries) -> CongruenceKind {
    let mut kind = CongruenceKind::Weighted;
    for (b, c) in s.raw_terms().keys() {
        let w = c.weight() as i64;
        if *b > w {
            return CongruenceKind::General;
        }
        if *b < w {
            kind = CongruenceKind::Mixed;
        }
    }
    kind
}

impl fmt::Display for CongruenceStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut exact = self.lhs_minus_rhs.clone();
        exact.order = EXACT;
        write!(f, "{exact} = 0 mod p^{}", self.modulus_power)
    }
}

/// Terms of a weighted series as `(coefficient, composition)` pairs.
pub fn weighted_terms(s: &MhsSeries) -> Result<Vec<(Rational, Composition)>> {
    s.raw_terms()
        .iter()
        .map(|((b, comp), c)| {
            if *b != comp.weight() as i64 {
                Err(Error::NotWeighted(alloc::format!("p^{b} H{comp}")))
            } else {
                Ok((c.clone(), comp.clone()))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, padic_valuation, rat};
    use crate::oracle::{eval_series, PrimeWindow};
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn c(parts: &[u32]) -> Composition {
        Composition::from(parts)
    }

    fn t(coeff: Rational, b: i64, s: &[u32]) -> MhsSeries {
        MhsSeries::term(coeff, b, c(s))
    }

    #[test]
    fn add_examples() {
        let a = t(int(2), 1, &[1]).with_order(5);
        assert_eq!(a.add(&MhsSeries::zero()), a);
        let x = t(int(1), 1, &[1]).with_order(3);
        let y = t(int(-1), 1, &[1]).with_order(4);
        assert_eq!(x.add(&y), MhsSeries::big_o(3));
        let x = MhsSeries::constant(int(2)).with_order(5);
        let y = t(int(3), 2, &[2]).with_order(4);
        let sum = x.add(&y);
        assert_eq!(sum.order(), 4);
        assert_eq!(sum.to_string(), "2 + 3 * p^2 * H(2) + O(p^4)");
    }

    #[test]
    fn mul_examples() {
        let ph1 = t(int(1), 1, &[1]);
        let sq = ph1.mul(&ph1);
        assert_eq!(sq, t(int(2), 2, &[1, 1]).add(&t(int(1), 2, &[2])));
        let a = t(int(5), 3, &[2, 1])
            .add(&MhsSeries::constant(rat(1, 2)))
            .with_order(7);
        assert_eq!(a.mul(&MhsSeries::one()), a);
        let x = t(int(1), 1, &[2]).with_order(3);
        let y = t(int(1), 1, &[3]).with_order(3);
        let prod = x.mul(&y);
        assert_eq!(prod.order(), 4);
        assert_eq!(
            prod.to_string(),
            "p^2 * H(2,3) + p^2 * H(3,2) + p^2 * H(5) + O(p^4)"
        );
    }

    #[test]
    fn invert_examples() {
        assert_eq!(
            MhsSeries::one().invert_unit_to(EXACT).unwrap(),
            MhsSeries::one()
        );
        let two = MhsSeries::constant(int(2)).with_order(4);
        assert_eq!(
            two.invert_unit().unwrap(),
            MhsSeries::constant(rat(1, 2)).with_order(4)
        );
        let a = MhsSeries::one().add(&t(int(1), 1, &[1])).with_order(3);
        let inv = a.invert_unit().unwrap();
        let expected = MhsSeries::one()
            .add(&t(int(-1), 1, &[1]))
            .add(&t(int(2), 2, &[1, 1]))
            .add(&t(int(1), 2, &[2]))
            .with_order(3);
        assert_eq!(inv, expected);
        assert_eq!(a.mul(&inv), MhsSeries::one().with_order(3));
        assert!(matches!(
            t(int(1), 1, &[1]).with_order(3).invert_unit(),
            Err(Error::NotAUnit(_))
        ));
        let bad = MhsSeries::one().add(&t(int(1), 0, &[1])).with_order(3);
        assert!(matches!(bad.invert_unit(), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn invert_monomial() {
        // p^2 (3 + p H(1))
        let a = MhsSeries::constant(int(3))
            .add(&t(int(1), 1, &[1]))
            .shift(2)
            .with_order(7);
        let inv = a.invert_monomial_unit().unwrap();
        assert_eq!(inv.minval(), -2);
        assert_eq!(inv.order(), 3);
        let prod = a.mul(&inv);
        assert_eq!(prod, MhsSeries::one().with_order(prod.order()));
        assert!(prod.order() >= 5);
    }

    #[test]
    fn truncate_examples() {
        let a = MhsSeries::constant(int(2))
            .add(&t(int(1), 1, &[1]))
            .add(&t(int(1), 2, &[1, 1]))
            .with_order(5);
        assert_eq!(
            a.truncate(2).unwrap().to_string(),
            "2 + p * H(1) + O(p^2)"
        );
        assert_eq!(a.truncate(5).unwrap(), a);
        assert!(matches!(
            a.truncate(6),
            Err(Error::TruncationBeyondOrder { .. })
        ));
    }

    #[test]
    fn display_forms() {
        assert_eq!(MhsSeries::zero().to_string(), "0");
        assert_eq!(MhsSeries::big_o(3).to_string(), "O(p^3)");
        assert_eq!(
            t(rat(-59, 15), 5, &[4, 1]).to_string(),
            "-59/15 * p^5 * H(4,1)"
        );
        assert_eq!(t(int(7), -2, &[]).to_string(), "7 * p^-2");
        let s = MhsSeries::one().add(&t(rat(-59, 15), 5, &[4, 1])).add(&t(int(-1), 1, &[])).with_order(6);
        assert_eq!(s.to_string(), "1 - p - 59/15 * p^5 * H(4,1) + O(p^6)");
    }

    #[test]
    fn decompose_eqmix() {
        // (3-2p)H(1) + pH(2) + 2pH(1,1) - 1/3 p^2 (2p-1) H(2,1) mod p^4
        let s = t(int(3), 0, &[1])
            .add(&t(int(-2), 1, &[1]))
            .add(&t(int(1), 1, &[2]))
            .add(&t(int(2), 1, &[1, 1]))
            .add(&t(rat(-2, 3), 3, &[2, 1]))
            .add(&t(rat(1, 3), 2, &[2, 1]));
        let st = CongruenceStatement::new(s, 4).unwrap();
        assert_eq!(st.kind(), CongruenceKind::Mixed);
        let parts = st.decompose_weighted();
        assert_eq!(parts.len(), 2);
        let k1 = &parts[&1];
        assert_eq!(k1.modulus_power(), 5);
        let expect1 = MhsSeries::weighted(c(&[1]))
            .scale(&int(3))
            .add(&MhsSeries::weighted(c(&[2])))
            .add(&MhsSeries::weighted(c(&[1, 1])).scale(&int(2)))
            .add(&MhsSeries::weighted(c(&[2, 1])).scale(&rat(1, 3)));
        assert_eq!(k1.series(), &expect1.with_order(5));
        let k0 = &parts[&0];
        assert_eq!(k0.modulus_power(), 4);
        let expect0 = MhsSeries::weighted(c(&[1]))
            .scale(&int(-2))
            .add(&MhsSeries::weighted(c(&[2, 1])).scale(&rat(-2, 3)));
        assert_eq!(k0.series(), &expect0.with_order(4));
    }

    #[test]
    fn decompose_restricted_harmonic() {
        // pH(1) + (p^2/2 - p^3/2)H(2) + (p^3/6 - p^4/2 + p^5/3)H(3) - p^5/4 H(4) - p^5/30 H(5) - p^2 H(1), mod p^6
        let s = t(int(1), 1, &[1])
            .add(&t(rat(1, 2), 2, &[2]))
            .add(&t(rat(-1, 2), 3, &[2]))
            .add(&t(rat(1, 6), 3, &[3]))
            .add(&t(rat(-1, 2), 4, &[3]))
            .add(&t(rat(1, 3), 5, &[3]))
            .add(&t(rat(-1, 4), 5, &[4]))
            .add(&t(rat(-1, 30), 5, &[5]))
            .add(&t(int(-1), 2, &[1]));
        let parts = CongruenceStatement::new(s, 6).unwrap().decompose_weighted();
        let mods: Vec<(i64, i64)> = parts
            .iter()
            .map(|(k, st)| (*k, st.modulus_power()))
            .collect();
        assert_eq!(mods, alloc::vec![(-2, 4), (-1, 5), (0, 6)]);
        assert_eq!(parts[&0].series().coeff(5, &c(&[5])), rat(-1, 30));
        assert_eq!(parts[&-1].series().coeff(1, &c(&[1])), int(-1));
        assert_eq!(parts[&-2].series().coeff(3, &c(&[3])), rat(1, 3));
    }

    #[test]
    fn weighted_statement_checks() {
        let w = MhsSeries::weighted(c(&[1, 1]));
        assert!(CongruenceStatement::weighted(w.clone(), 3).is_ok());
        let parts = CongruenceStatement::new(w, 3).unwrap().decompose_weighted();
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), alloc::vec![0]);
        assert!(CongruenceStatement::weighted(t(int(1), 1, &[2]), 3).is_err());
        let empty = CongruenceStatement::new(MhsSeries::zero(), 9).unwrap();
        assert_eq!(empty.decompose_weighted().len(), 1);
        assert!(matches!(
            CongruenceStatement::new(MhsSeries::big_o(3), 4),
            Err(Error::InsufficientOrder { .. })
        ));
    }

    #[test]
    fn product_evaluates_to_product() {
        let a = MhsSeries::constant(int(2))
            .add(&t(rat(1, 3), 1, &[2]))
            .add(&t(int(-1), 2, &[1, 1]));
        let b = t(int(1), 0, &[1]).add(&t(rat(5, 7), 3, &[3, 1]));
        let ab = a.mul(&b);
        for p in PrimeWindow::new(11, 31).primes() {
            assert_eq!(eval_series(&ab, p), eval_series(&a, p) * eval_series(&b, p));
        }
        let a = a.with_order(4);
        let inv = a.invert_unit().unwrap();
        for p in PrimeWindow::new(11, 31).primes() {
            let d = eval_series(&inv, p) * eval_series(&a, p) - int(1);
            assert!(padic_valuation(&d, p).at_least(4));
        }
    }

    fn arb_series() -> impl Strategy<Value = MhsSeries> {
        let term = (
            -5i64..6,
            1i64..4,
            0i64..4,
            proptest::collection::vec(1u32..3, 0..3),
        );
        (
            proptest::collection::vec(term, 0..4),
            prop_oneof![Just(EXACT), 2i64..7],
        )
            .prop_map(|(terms, order)| {
                let mut s = MhsSeries::big_o(order);
                for (n, d, b, parts) in terms {
                    s.add_term(rat(n, d), b, Composition::new(parts));
                }
                s
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws(a in arb_series(), b in arb_series(), cc in arb_series()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&cc), a.add(&b.add(&cc)));
            let left = a.mul(&b).mul(&cc);
            let right = a.mul(&b.mul(&cc));
            let n = left.order().min(right.order());
            prop_assert_eq!(left.with_order(n), right.with_order(n));
            let dl = a.mul(&b.add(&cc));
            let dr = a.mul(&b).add(&a.mul(&cc));
            let n = dl.order().min(dr.order());
            prop_assert_eq!(dl.with_order(n), dr.with_order(n));
        }

        #[test]
        fn unit_inverse(a in arb_series(), c0 in 1i64..5) {
            let mut u = MhsSeries::constant(int(c0)).with_order(a.order().min(6));
            for term in a.terms().filter(|t| t.p_exponent >= 1) {
                u.add_term(term.coeff, term.p_exponent, term.comp);
            }
            let inv = u.invert_unit().unwrap();
            prop_assert_eq!(u.mul(&inv), MhsSeries::one().with_order(u.order()));
        }

        #[test]
        fn decomposition_reassembles(a in arb_series(), n in 1i64..6) {
            let n = n.min(a.order());
            let a = a.with_order(n);
            let st = CongruenceStatement::new(a.clone(), n).unwrap();
            let mut back = MhsSeries::big_o(n);
            let mut all = MhsSeries::zero();
            for (k, part) in st.decompose_weighted() {
                for term in part.series().terms() {
                    prop_assert!(term.is_weighted());
                    back.add_term(term.coeff.clone(), term.p_exponent - k, term.comp.clone());
                }
            }
            for term in a.terms() {
                if n + term.comp.weight() as i64 - term.p_exponent > 0 {
                    all.add_term(term.coeff, term.p_exponent, term.comp);
                }
            }
            prop_assert_eq!(back, all.with_order(n));
        }
    }
}
