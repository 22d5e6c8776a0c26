//! Compositions, their `{x,y}` word encoding, and the shuffle and stuffle
//! products.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::{Error, Result};

/// Finite ordered list of positive integers; the index of a multiple harmonic sum.
///
/// Ordered by weight, then lexicographically on the parts. This ordering is
/// the column order of every relation matrix and is kept stable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Composition(Vec<u32>);

impl Composition {
    /// Panics if a part is zero.
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(
            parts.iter().all(|&s| s >= 1),
            "composition parts must be positive"
        );
        Composition(parts)
    }

    pub fn try_new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "zero part in {parts:?}"
            )));
        }
        Ok(Composition(parts))
    }

    pub fn empty() -> Self {
        Composition(Vec::new())
    }

    /// `(1,1,...,1)` with `n` ones.
    pub fn ones(n: usize) -> Self {
        Composition(alloc::vec![1; n])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Composition(self.0.iter().rev().copied().collect())
    }

    fn prepend(&self, first: u32) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(first);
        v.extend_from_slice(&self.0);
        Composition(v)
    }

    pub fn concat(&self, other: &Composition) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Composition(v)
    }
}

impl Ord for Composition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Composition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

impl From<&[u32]> for Composition {
    fn from(parts: &[u32]) -> Self {
        Composition::new(parts.to_vec())
    }
}

/// Parses the [`Display`](fmt::Display) form `(2,1)` or `()`.
pub fn parse_composition(s: &str) -> Result<Composition> {
    let bad = || Error::InvalidArgument(alloc::format!("bad composition: {s}"));
    let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
    if inner.trim().is_empty() {
        return Ok(Composition::empty());
    }
    let parts = inner
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<Vec<u32>>>()?;
    Composition::try_new(parts)
}

/// Finite rational linear combination of compositions; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CompLinComb {
    terms: BTreeMap<Composition, Rational>,
}

impl CompLinComb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(c: Composition) -> Self {
        let mut out = Self::new();
        out.add(c, Rational::one());
        out
    }

    pub fn add(&mut self, c: Composition, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(c) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &CompLinComb, scale: &Rational) {
        for (c, v) in &other.terms {
            self.add(c.clone(), v * scale);
        }
    }

    pub fn get(&self, c: &Composition) -> Rational {
        self.terms.get(c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Composition, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of all coefficients.
    pub fn mass(&self) -> Rational {
        self.terms.values().sum()
    }
}

impl FromIterator<(Composition, Rational)> for CompLinComb {
    fn from_iter<I: IntoIterator<Item = (Composition, Rational)>>(iter: I) -> Self {
        let mut out = CompLinComb::new();
        for (c, v) in iter {
            out.add(c, v);
        }
        out
    }
}

/// `(s_1,...,s_k) -> x^{s_1-1} y ... x^{s_k-1} y`.
pub fn comp_to_word(s: &Composition) -> String {
    let mut w = String::with_capacity(s.weight() as usize);
    for &part in s.parts() {
        for _ in 1..part {
            w.push('x');
        }
        w.push('y');
    }
    w
}

pub fn word_to_comp(w: &str) -> Result<Composition> {
    let mut parts = Vec::new();
    let mut run = 0u32;
    for ch in w.chars() {
        match ch {
            'x' => run += 1,
            'y' => {
                parts.push(run + 1);
                run = 0;
            }
            _ => {
                return Err(Error::InvalidArgument(alloc::format!(
                    "bad letter {ch:?} in word"
                )))
            }
        }
    }
    if run > 0 {
        return Err(Error::WordEndsInX(w.into()));
    }
    Ok(Composition(parts))
}

fn shuffle_words(
    a: &[u8],
    b: &[u8],
    memo: &mut BTreeMap<(usize, usize), BTreeMap<Vec<u8>, u64>>,
) -> BTreeMap<Vec<u8>, u64> {
    let key = (a.len(), b.len());
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let mut out: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    if a.is_empty() || b.is_empty() {
        out.insert([a, b].concat(), 1);
    } else {
        for (head, rest) in [
            (a[0], shuffle_words(&a[1..], b, memo)),
            (b[0], shuffle_words(a, &b[1..], memo)),
        ] {
            for (w, m) in rest {
                let mut v = Vec::with_capacity(w.len() + 1);
                v.push(head);
                v.extend_from_slice(&w);
                *out.entry(v).or_insert(0) += m;
            }
        }
    }
    memo.insert(key, out.clone());
    out
}

/// Shuffle product of the word encodings, converted back to compositions.
pub fn shuffle(s: &Composition, t: &Composition) -> CompLinComb {
    let a = comp_to_word(s).into_bytes();
    let b = comp_to_word(t).into_bytes();
    // memo keyed on suffix lengths, valid because a and b are fixed for this call
    let mut memo = BTreeMap::new();
    shuffle_words(&a, &b, &mut memo)
        .into_iter()
        .map(|(w, m)| {
            let w = String::from_utf8(w).expect("ascii word");
            let c = word_to_comp(&w).expect("shuffle of y-terminated words ends in y");
            (c, Rational::from_integer(m.into()))
        })
        .collect()
}

/// Stuffle (quasi-shuffle) product: `H_N(s) H_N(t) = sum c_u H_N(u)` for every `N`.
pub fn stuffle(s: &Composition, t: &Composition) -> CompLinComb {
    let mut memo = BTreeMap::new();
    stuffle_rec(s.parts(), t.parts(), &mut memo)
        .into_iter()
        .map(|(c, m)| (c, Rational::from_integer(m.into())))
        .collect()
}

fn stuffle_rec(
    s: &[u32],
    t: &[u32],
    memo: &mut BTreeMap<(usize, usize), BTreeMap<Composition, u64>>,
) -> BTreeMap<Composition, u64> {
    let key = (s.len(), t.len());
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let mut out = BTreeMap::new();
    if s.is_empty() || t.is_empty() {
        out.insert(Composition([s, t].concat()), 1);
    } else {
        let cases = [
            (s[0], stuffle_rec(&s[1..], t, memo)),
            (t[0], stuffle_rec(s, &t[1..], memo)),
            (s[0] + t[0], stuffle_rec(&s[1..], &t[1..], memo)),
        ];
        for (head, rest) in cases {
            for (c, m) in rest {
                *out.entry(c.prepend(head)).or_insert(0) += m;
            }
        }
    }
    memo.insert(key, out.clone());
    out
}

/// All compositions of weight `<= max_weight`, by weight then lexicographically.
pub fn enumerate_compositions(max_weight: u32) -> Vec<Composition> {
    let mut out = Vec::new();
    for w in 0..=max_weight {
        out.extend(compositions_of_weight(w));
    }
    out
}

pub fn compositions_of_weight(w: u32) -> Vec<Composition> {
    fn rec(rem: u32, prefix: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if rem == 0 {
            out.push(Composition(prefix.clone()));
            return;
        }
        for first in 1..=rem {
            prefix.push(first);
            rec(rem - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(w, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use alloc::string::ToString;

    fn c(parts: &[u32]) -> Composition {
        Composition::from(parts)
    }

    /// H_N(s) by brute force over index tuples.
    fn brute_mhs(n: u32, s: &[u32]) -> Rational {
        fn rec(upper: u32, s: &[u32]) -> Rational {
            if s.is_empty() {
                return Rational::one();
            }
            let mut acc = Rational::zero();
            for m in 1..=upper {
                let term = Rational::new(
                    1.into(),
                    num_traits::pow(num_bigint::BigInt::from(m), s[0] as usize),
                );
                acc += term * rec(m - 1, &s[1..]);
            }
            acc
        }
        rec(n, s)
    }

    #[test]
    fn word_encoding_examples() {
        assert_eq!(comp_to_word(&c(&[1])), "y");
        assert_eq!(comp_to_word(&c(&[2])), "xy");
        assert_eq!(comp_to_word(&Composition::empty()), "");
        assert_eq!(word_to_comp("yxy").unwrap(), c(&[1, 2]));
        assert_eq!(word_to_comp("xyy").unwrap(), c(&[2, 1]));
        assert_eq!(word_to_comp("").unwrap(), Composition::empty());
        assert!(matches!(word_to_comp("yx"), Err(Error::WordEndsInX(_))));
        for s in enumerate_compositions(8) {
            let w = comp_to_word(&s);
            assert_eq!(w.len() as u32, s.weight());
            assert_eq!(w.chars().filter(|&ch| ch == 'y').count(), s.depth());
            assert_eq!(word_to_comp(&w).unwrap(), s);
        }
    }

    #[test]
    fn shuffle_examples() {
        let sh = shuffle(&c(&[1]), &c(&[2]));
        assert_eq!(sh.get(&c(&[1, 2])), int(1));
        assert_eq!(sh.get(&c(&[2, 1])), int(2));
        assert_eq!(sh.len(), 2);
        assert_eq!(
            shuffle(&c(&[3, 1]), &Composition::empty()),
            CompLinComb::single(c(&[3, 1]))
        );
        let sh = shuffle(&c(&[1]), &c(&[1]));
        assert_eq!(sh.get(&c(&[1, 1])), int(2));
        assert_eq!(sh.len(), 1);
    }

    #[test]
    fn shuffle_mass_is_binomial() {
        let comps = enumerate_compositions(6);
        for s in &comps {
            for t in &comps {
                let n = s.weight() + t.weight();
                if n > 6 {
                    continue;
                }
                let expected = crate::arith::binomial(n as i64, s.weight());
                assert_eq!(shuffle(s, t).mass(), expected, "{s} sh {t}");
            }
        }
    }

    #[test]
    fn stuffle_examples() {
        let st = stuffle(&c(&[2]), &c(&[3]));
        assert_eq!(
            st,
            [
                (c(&[2, 3]), int(1)),
                (c(&[3, 2]), int(1)),
                (c(&[5]), int(1))
            ]
            .into_iter()
            .collect()
        );
        assert_eq!(
            stuffle(&c(&[1, 2]), &Composition::empty()),
            CompLinComb::single(c(&[1, 2]))
        );
        let st = stuffle(&c(&[1]), &c(&[1]));
        assert_eq!(st.get(&c(&[1, 1])), int(2));
        assert_eq!(st.get(&c(&[2])), int(1));
        for n in 0..=20 {
            let h1 = brute_mhs(n, &[1]);
            assert_eq!(
                &h1 * &h1,
                int(2) * brute_mhs(n, &[1, 1]) + brute_mhs(n, &[2])
            );
        }
    }

    #[test]
    fn products_commutative_and_associative() {
        let comps: Vec<_> = enumerate_compositions(4)
            .into_iter()
            .filter(|s| s.weight() >= 1)
            .collect();
        let extend = |f: fn(&Composition, &Composition) -> CompLinComb,
                      lc: &CompLinComb,
                      t: &Composition| {
            let mut out = CompLinComb::new();
            for (u, v) in lc.iter() {
                out.add_scaled(&f(u, t), v);
            }
            out
        };
        for f in [
            shuffle as fn(&Composition, &Composition) -> CompLinComb,
            stuffle,
        ] {
            for (i, a) in comps.iter().enumerate().step_by(3) {
                for b in comps.iter().skip(i % 5).step_by(4) {
                    assert_eq!(f(a, b), f(b, a));
                    for cc in comps.iter().step_by(5) {
                        if a.weight() + b.weight() + cc.weight() > 6 {
                            continue;
                        }
                        let left = extend(f, &f(a, b), cc);
                        let right = extend(f, &f(b, cc), a);
                        assert_eq!(left, right, "{a} {b} {cc}");
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_compositions(0), alloc::vec![Composition::empty()]);
        assert_eq!(
            enumerate_compositions(2),
            alloc::vec![Composition::empty(), c(&[1]), c(&[1, 1]), c(&[2])]
        );
        assert_eq!(compositions_of_weight(5).len(), 16);
        let all = enumerate_compositions(7);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(c(&[2, 1]).to_string(), "(2,1)");
        assert_eq!(Composition::empty().to_string(), "()");
    }
}
