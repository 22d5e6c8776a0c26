//! Proving weighted congruences by linear algebra over truncated Jarossay relations.
//!
//! A relation comes from a triple `(s, t, u)`. The series identity
//! `h(s sh t) = (-1)^{|t|} sum_a prod C(a_i+t_i-1, t_i-1) h(t_m+a_m, ..., t_1+a_1, s)`
//! is multiplied by `h(u)` and truncated below weight `n`, giving a vector that
//! vanishes mod `p^n`. A weighted statement is proved when its coefficient vector
//! is an exact rational combination of such vectors.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{binomial, fmt_rational, Rational};
use crate::composition::{enumerate_compositions, shuffle, stuffle, CompLinComb, Composition};
use crate::series::{weighted_terms, CongruenceKind, CongruenceStatement, MhsSeries};
use crate::{Error, Result, EXACT};

/// Largest modulus power a [`Prover`] builds a basis for unless told otherwise.
pub const DEFAULT_MAX_MODULUS: u32 = 11;

/// The triple a relation was generated from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    pub s: Composition,
    pub t: Composition,
    pub u: Composition,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s={};t={};u={}", self.s, self.t, self.u)
    }
}

/// Coefficients of `h_p(s)` in a combination that vanishes mod `p^modulus_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationVector {
    pub coords: CompLinComb,
    pub modulus_power: u32,
    pub provenance: Provenance,
}

/// `h(s sh t)` minus the right side of the series identity, below weight `n`.
///
/// `s` may be empty (the identity is then the reversal `n -> p - n`).
fn jarossay_identity(s: &Composition, t: &Composition, n: u32) -> CompLinComb {
    let mut out = CompLinComb::new();
    let base = s.weight() + t.weight();
    if base >= n {
        return out;
    }
    for (c, m) in shuffle(s, t).iter() {
        out.add(c.clone(), m.clone());
    }
    let sign = if t.weight().is_multiple_of(2) { -Rational::one() } else { Rational::one() };
    let tr: Vec<u32> = t.parts().iter().rev().copied().collect();
    let mut shifts = vec![0u32; tr.len()];
    // every a with sum a_i <= n - 1 - base, in a fixed order
    fn rec(
        i: usize,
        left: u32,
        tr: &[u32],
        shifts: &mut Vec<u32>,
        s: &Composition,
        sign: &Rational,
        out: &mut CompLinComb,
    ) {
        if i == tr.len() {
            let mut coeff = sign.clone();
            let mut parts = Vec::with_capacity(tr.len() + s.depth());
            for (ti, ai) in tr.iter().zip(shifts.iter()) {
                coeff *= binomial((ai + ti - 1) as i64, ti - 1);
                parts.push(ti + ai);
            }
            parts.extend_from_slice(s.parts());
            out.add(Composition::new(parts), coeff);
            return;
        }
        for a in 0..=left {
            shifts[i] = a;
            rec(i + 1, left - a, tr, shifts, s, sign, out);
        }
        shifts[i] = 0;
    }
    rec(0, n - 1 - base, &tr, &mut shifts, s, &sign, &mut out);
    out
}

/// The truncated relation for `(s, t)` mod `p^n`.
pub fn jarossay_relation(s: &Composition, t: &Composition, n: u32) -> Result<RelationVector> {
    relation_for(&Provenance { s: s.clone(), t: t.clone(), u: Composition::empty() }, n)
}

/// The relation for a triple: the `(s, t)` identity times `h(u)`, below weight `n`.
pub fn relation_for(prov: &Provenance, n: u32) -> Result<RelationVector> {
    if prov.t.is_empty() {
        return Err(Error::InvalidArgument("relation needs a nonempty t".into()));
    }
    let total = prov.s.weight() + prov.t.weight() + prov.u.weight();
    if total >= n {
        return Err(Error::InvalidArgument(format!(
            "|s|+|t|+|u| = {total} leaves nothing below weight {n}"
        )));
    }
    let uw = prov.u.weight();
    let identity = jarossay_identity(&prov.s, &prov.t, n - uw);
    let coords = if prov.u.is_empty() {
        identity
    } else {
        let mut out = CompLinComb::new();
        for (w, c) in identity.iter() {
            for (v, m) in stuffle(&prov.u, w).iter() {
                out.add(v.clone(), c * m);
            }
        }
        out
    };
    Ok(RelationVector { coords, modulus_power: n, provenance: prov.clone() })
}

/// Every triple used for modulus `p^n`, in a fixed order.
pub fn relation_triples(n: u32) -> Vec<Provenance> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let comps = enumerate_compositions(n - 1);
    for t in comps.iter().filter(|t| !t.is_empty()) {
        for s in &comps {
            if s.weight() + t.weight() >= n {
                continue;
            }
            for u in &comps {
                if s.weight() + t.weight() + u.weight() < n {
                    out.push(Provenance { s: s.clone(), t: t.clone(), u: u.clone() });
                }
            }
        }
    }
    out
}

// A Mersenne prime for the independence prefilter.
const Q: u64 = (1 << 61) - 1;

fn mulq(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % Q as u128) as u64
}

fn powq(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulq(r, a);
        }
        a = mulq(a, a);
        e >>= 1;
    }
    r
}

fn int_mod_q(x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(Q)).to_u64().expect("reduced below Q")
}

// None when the denominator vanishes mod Q.
fn rat_mod_q(x: &Rational) -> Option<u64> {
    let d = int_mod_q(x.denom());
    if d == 0 {
        return None;
    }
    Some(mulq(int_mod_q(x.numer()), powq(d, Q - 2)))
}

/// Row echelon form over the rationals, remembering how each row was built.
///
/// Row `i` was made from source row `i` as `inv_i * (R_i - sum f_j E_j)`, with
/// the `(j, f_j)` kept in `steps[i]`. Expanding back to source rows is done
/// only when a certificate is needed.
#[derive(Clone, Debug, Default)]
struct Echelon {
    // (column, value), sorted, first entry is (pivot, 1)
    rows: Vec<Vec<(usize, Rational)>>,
    steps: Vec<Vec<(usize, Rational)>>,
    invs: Vec<Rational>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    fn new(ncols: usize) -> Self {
        Echelon { rows: Vec::new(), steps: Vec::new(), invs: Vec::new(), pivot_row: vec![None; ncols] }
    }

    /// Reduce `work` in place; returns the multiples of echelon rows subtracted.
    fn reduce(&self, work: &mut [Rational]) -> Vec<(usize, Rational)> {
        let mut used = Vec::new();
        for c in 0..work.len() {
            if work[c].is_zero() {
                continue;
            }
            let Some(r) = self.pivot_row[c] else { continue };
            let f = work[c].clone();
            for (j, v) in &self.rows[r] {
                work[*j] -= &f * v;
            }
            used.push((r, f));
        }
        used
    }

    /// Add the next source row (dense) if it is independent.
    fn insert(&mut self, mut work: Vec<Rational>) -> bool {
        let used = self.reduce(&mut work);
        let Some(pivot) = work.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = work[pivot].recip();
        let row: Vec<(usize, Rational)> = work
            .into_iter()
            .enumerate()
            .skip(pivot)
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| (j, x * &inv))
            .collect();
        self.pivot_row[pivot] = Some(self.rows.len());
        self.rows.push(row);
        self.steps.push(used);
        self.invs.push(inv);
        true
    }

    /// Rewrite `sum f_j E_j` as multipliers of the source rows.
    fn to_sources(&self, used: &[(usize, Rational)]) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.rows.len()];
        for (j, f) in used {
            c[*j] += f;
        }
        let mut out = vec![Rational::zero(); self.rows.len()];
        for i in (0..self.rows.len()).rev() {
            if c[i].is_zero() {
                continue;
            }
            let ci = core::mem::take(&mut c[i]) * &self.invs[i];
            for (j, f) in &self.steps[i] {
                c[*j] -= &ci * f;
            }
            out[i] = ci;
        }
        out
    }
}

/// Independent truncated relations mod `p^n`, with an exact echelon form.
///
/// Columns are the compositions of weight `< n` in weight-then-lexicographic order.
/// Pivots are the smallest columns, so the compositions left over by
/// [`RelationBasis::reduce`] are the lexicographically largest ones.
#[derive(Clone, Debug)]
pub struct RelationBasis {
    modulus_power: u32,
    columns: Vec<Composition>,
    index: BTreeMap<Composition, usize>,
    rows: Vec<RelationVector>,
    echelon: Echelon,
}

/// Result of reducing a vector against a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    /// What is left after subtracting relations; zero iff the vector is in the span.
    pub residual: CompLinComb,
    /// Multipliers of [`RelationBasis::rows`] that were subtracted.
    pub combination: Vec<(Provenance, Rational)>,
}

impl RelationBasis {
    /// Filter `relations` down to an independent set and put it in echelon form.
    pub fn from_relations(n: u32, relations: Vec<RelationVector>) -> Self {
        let columns = if n == 0 { Vec::new() } else { enumerate_compositions(n - 1) };
        let index: BTreeMap<Composition, usize> =
            columns.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let ncols = columns.len();

        // cheap independence test mod Q, exact elimination only on survivors
        let mut modrows: Vec<Vec<u64>> = Vec::new();
        let mut modpivot: Vec<Option<usize>> = vec![None; ncols];
        let mut kept: Vec<RelationVector> = Vec::new();
        for rel in relations {
            debug_assert_eq!(rel.modulus_power, n);
            let mut work = vec![0u64; ncols];
            let mut ok = true;
            for (c, v) in rel.coords.iter() {
                match rat_mod_q(v) {
                    Some(x) => work[index[c]] = x,
                    None => ok = false,
                }
            }
            if !ok {
                // rare enough to just keep; the exact pass decides
                kept.push(rel);
                continue;
            }
            for c in 0..ncols {
                if work[c] == 0 {
                    continue;
                }
                if let Some(r) = modpivot[c] {
                    let f = work[c];
                    for (j, v) in modrows[r].iter().enumerate().skip(c) {
                        if *v != 0 {
                            work[j] = (work[j] + Q - mulq(f, *v)) % Q;
                        }
                    }
                } else {
                    let inv = powq(work[c], Q - 2);
                    for x in work.iter_mut().skip(c) {
                        *x = mulq(*x, inv);
                    }
                    modpivot[c] = Some(modrows.len());
                    modrows.push(work);
                    kept.push(rel);
                    break;
                }
            }
        }

        let mut echelon = Echelon::new(ncols);
        let mut rows = Vec::new();
        for rel in kept {
            let mut work = vec![Rational::zero(); ncols];
            for (c, v) in rel.coords.iter() {
                work[index[c]] = v.clone();
            }
            if echelon.insert(work) {
                rows.push(rel);
            }
        }
        RelationBasis { modulus_power: n, columns, index, rows, echelon }
    }

    pub fn modulus_power(&self) -> u32 {
        self.modulus_power
    }

    /// The independent relations kept.
    pub fn rows(&self) -> &[RelationVector] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Column compositions, in the order used for elimination.
    pub fn columns(&self) -> &[Composition] {
        &self.columns
    }

    /// Compositions that are not pivots: a basis of the quotient.
    pub fn free_columns(&self) -> Vec<Composition> {
        self.columns
            .iter()
            .zip(&self.echelon.pivot_row)
            .filter(|(_, r)| r.is_none())
            .map(|(c, _)| c.clone())
            .collect()
    }

    /// Echelon rows as `(pivot, entries)` over the columns.
    pub fn echelon_rows(&self) -> impl Iterator<Item = CompLinComb> + '_ {
        self.echelon
            .rows
            .iter()
            .map(|r| r.iter().map(|(j, v)| (self.columns[*j].clone(), v.clone())).collect())
    }

    /// Reduce `v` (terms of weight `>= n` are dropped, they vanish mod `p^n`).
    pub fn reduce(&self, v: &CompLinComb) -> Reduction {
        let ncols = self.columns.len();
        let mut work = vec![Rational::zero(); ncols];
        for (c, x) in v.iter() {
            if let Some(&i) = self.index.get(c) {
                work[i] += x;
            }
        }
        let used = self.echelon.reduce(&mut work);
        let residual = work
            .into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (self.columns[i].clone(), x))
            .collect();
        let mut combination = Vec::new();
        for (r, x) in self.echelon.to_sources(&used).into_iter().enumerate() {
            if !x.is_zero() {
                combination.push((self.rows[r].provenance.clone(), x));
            }
        }
        Reduction { residual, combination }
    }
}

/// All relations mod `p^n`, built serially.
pub fn generate_relations(n: u32) -> RelationBasis {
    let rels = relation_triples(n)
        .iter()
        .map(|t| relation_for(t, n).expect("triples are in range"))
        .collect();
    RelationBasis::from_relations(n, rels)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Proved,
    Unproven,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Proved => "proved",
            Verdict::Unproven => "unproven",
        })
    }
}

/// A weighted statement together with the relations that prove it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofCertificate {
    pub target: CongruenceStatement,
    pub combination: Vec<(Provenance, Rational)>,
    pub verdict: Verdict,
    /// Normal form of the target when unproven; empty when proved.
    pub residual: CompLinComb,
}

/// Coefficients of `h_p(s)` in a weighted series, keeping weights below `n`.
pub fn target_vector(series: &MhsSeries, n: i64) -> Result<CompLinComb> {
    let mut v = CompLinComb::new();
    for (c, s) in weighted_terms(series)? {
        if (s.weight() as i64) < n {
            v.add(s, c);
        }
    }
    Ok(v)
}

impl ProofCertificate {
    /// Rebuild every relation from its triple and check the sum equals the target.
    pub fn replay(&self) -> Result<bool> {
        if self.verdict != Verdict::Proved {
            return Ok(false);
        }
        let n = self.target.modulus_power();
        let target = target_vector(self.target.series(), n)?;
        if n <= 0 {
            return Ok(true);
        }
        let mut sum = CompLinComb::new();
        for (prov, m) in &self.combination {
            let rel = relation_for(prov, n as u32)?;
            sum.add_scaled(&rel.coords, m);
        }
        Ok(sum == target)
    }

    pub fn is_proved(&self) -> bool {
        self.verdict == Verdict::Proved
    }

    /// Plain-text form: header lines then one line per relation.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("target: {}\n", self.target.series()));
        out.push_str(&format!("modulus: p^{}\n", self.target.modulus_power()));
        out.push_str(&format!("verdict: {}\n", self.verdict));
        for (prov, m) in &self.combination {
            out.push_str(&format!("{} * R[{}]\n", fmt_rational(m), prov));
        }
        out
    }
}

/// Membership test of a weighted statement in the span of `basis`.
pub fn prove_weighted(stmt: &CongruenceStatement, basis: &RelationBasis) -> Result<ProofCertificate> {
    if stmt.kind() != CongruenceKind::Weighted && !stmt.series().is_empty() {
        return Err(Error::NotWeighted(format!("{}", stmt.series())));
    }
    if stmt.modulus_power() != basis.modulus_power as i64 {
        return Err(Error::InvalidArgument(format!(
            "statement is mod p^{} but basis is mod p^{}",
            stmt.modulus_power(),
            basis.modulus_power
        )));
    }
    let v = target_vector(stmt.series(), stmt.modulus_power())?;
    let red = basis.reduce(&v);
    let proved = red.residual.is_empty();
    Ok(ProofCertificate {
        target: stmt.clone(),
        combination: if proved { red.combination } else { Vec::new() },
        verdict: if proved { Verdict::Proved } else { Verdict::Unproven },
        residual: red.residual,
    })
}

/// Builds the basis for a modulus power; lets callers add caching or parallelism.
#[derive(Clone)]
pub struct BasisSource(Arc<dyn Fn(u32) -> RelationBasis + Send + Sync>);

impl BasisSource {
    pub fn new(f: impl Fn(u32) -> RelationBasis + Send + Sync + 'static) -> Self {
        BasisSource(Arc::new(f))
    }
}

impl fmt::Debug for BasisSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasisSource")
    }
}

/// Holds relation bases by modulus power and builds missing ones on demand.
#[derive(Clone, Debug)]
pub struct Prover {
    bases: BTreeMap<u32, RelationBasis>,
    max_modulus: u32,
    source: Option<BasisSource>,
}

impl Default for Prover {
    fn default() -> Self {
        Self::new()
    }
}

impl Prover {
    pub fn new() -> Self {
        Prover { bases: BTreeMap::new(), max_modulus: DEFAULT_MAX_MODULUS, source: None }
    }

    /// Build missing bases with `source` instead of [`generate_relations`].
    pub fn with_source(mut self, source: BasisSource) -> Self {
        self.source = Some(source);
        self
    }

    /// Refuse to build bases beyond `p^max` (they grow like `2^max`).
    pub fn with_max_modulus(mut self, max: u32) -> Self {
        self.max_modulus = max;
        self
    }

    pub fn max_modulus(&self) -> u32 {
        self.max_modulus
    }

    /// Supply a basis built elsewhere (for example in parallel, or from a cache).
    pub fn insert_basis(&mut self, basis: RelationBasis) {
        self.bases.insert(basis.modulus_power, basis);
    }

    pub fn has_basis(&self, n: u32) -> bool {
        self.bases.contains_key(&n)
    }

    pub fn basis(&mut self, n: u32) -> Result<&RelationBasis> {
        if n > self.max_modulus {
            return Err(Error::InvalidArgument(format!(
                "modulus p^{n} is above the configured limit p^{}",
                self.max_modulus
            )));
        }
        let source = &self.source;
        Ok(self.bases.entry(n).or_insert_with(|| match source {
            Some(f) => (f.0)(n),
            None => generate_relations(n),
        }))
    }

    /// Moduli of the weighted parts of `stmt`.
    pub fn required_moduli(stmt: &CongruenceStatement) -> Vec<u32> {
        stmt.decompose_weighted().values().map(|p| p.modulus_power() as u32).collect()
    }

    pub fn prove_weighted(&mut self, stmt: &CongruenceStatement) -> Result<ProofCertificate> {
        let n = stmt.modulus_power();
        if n <= 0 {
            return Ok(ProofCertificate {
                target: stmt.clone(),
                combination: Vec::new(),
                verdict: Verdict::Proved,
                residual: CompLinComb::new(),
            });
        }
        let basis = self.basis(n as u32)?;
        prove_weighted(stmt, basis)
    }

    /// Split into weighted parts and prove each one.
    pub fn prove_mixed(&mut self, stmt: &CongruenceStatement) -> Result<Vec<ProofCertificate>> {
        stmt.decompose_weighted().values().map(|part| self.prove_weighted(part)).collect()
    }

    /// Prove `lhs == rhs mod p^n`.
    pub fn prove_supercongruence(
        &mut self,
        lhs: &MhsSeries,
        rhs: &MhsSeries,
        n: i64,
    ) -> Result<Vec<ProofCertificate>> {
        let stmt = CongruenceStatement::between(lhs, rhs, n)?;
        self.prove_mixed(&stmt)
    }

    /// Largest `n <= series.order()` for which `series == 0 mod p^n` is proved.
    ///
    /// An exact nonzero series is searched up to its smallest exponent plus
    /// the configured modulus limit.
    pub fn provable_valuation(&mut self, series: &MhsSeries) -> Result<i64> {
        if series.is_empty() {
            return Ok(series.order());
        }
        let cap = series.order().min(series.minval().saturating_add(self.max_modulus as i64));
        let mut best = series.minval().min(0);
        let mut n = best + 1;
        while n <= cap {
            let stmt = CongruenceStatement::new(series.truncate(n)?, n)?;
            if Self::required_moduli(&stmt).iter().any(|&m| m > self.max_modulus) {
                break;
            }
            if !all_proved(&self.prove_mixed(&stmt)?) {
                break;
            }
            best = n;
            n += 1;
        }
        Ok(best)
    }

    /// Reduce each weighted part of `series` to its normal form mod `p^{series.order()}`.
    ///
    /// The result differs from `series` by combinations of relations, so it is
    /// the same quantity to the same order. Exact series are returned unchanged.
    pub fn normal_form(&mut self, series: &MhsSeries) -> Result<MhsSeries> {
        let n = series.order();
        if n == EXACT {
            return Ok(series.clone());
        }
        let stmt = CongruenceStatement::new(series.clone(), n)?;
        let mut out = MhsSeries::big_o(n);
        for (k, part) in stmt.decompose_weighted() {
            let m = part.modulus_power();
            let v = target_vector(part.series(), m)?;
            let residual = if m > 0 { self.basis(m as u32)?.reduce(&v).residual } else { v };
            for (s, c) in residual.iter() {
                let b = s.weight() as i64 - k;
                out.add_term(c.clone(), b, s.clone());
            }
        }
        Ok(out)
    }
}

pub fn all_proved(certs: &[ProofCertificate]) -> bool {
    certs.iter().all(ProofCertificate::is_proved)
}

/// Parse `R[s=(..);t=(..);u=(..)]`.
pub fn parse_provenance(text: &str) -> Result<Provenance> {
    let bad = || Error::InvalidArgument(format!("bad relation reference: {text}"));
    let inner = text.trim().strip_prefix("R[").and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    let fields: Vec<&str> = inner.split(';').collect();
    if fields.len() != 3 {
        return Err(bad());
    }
    let mut comps = Vec::new();
    for (field, key) in fields.iter().zip(["s=", "t=", "u="]) {
        let body = field.trim().strip_prefix(key).ok_or_else(bad)?;
        comps.push(crate::composition::parse_composition(body)?);
    }
    let u = comps.pop().expect("three");
    let t = comps.pop().expect("three");
    let s = comps.pop().expect("three");
    Ok(Provenance { s, t, u })
}

/// Parse one certificate line `<multiplier> * R[s=(..);t=(..);u=(..)]`.
pub fn parse_certificate_line(line: &str) -> Result<(Provenance, Rational)> {
    let bad = || Error::InvalidArgument(format!("bad certificate line: {line}"));
    let (m, rest) = line.split_once('*').ok_or_else(bad)?;
    let m = crate::arith::parse_rational(m.trim()).ok_or_else(bad)?;
    Ok((parse_provenance(rest)?, m))
}

/// Sum of `m * relation` over the lines of a certificate body.
pub fn replay_combination(entries: &[(Provenance, Rational)], n: u32) -> Result<CompLinComb> {
    let mut sum = CompLinComb::new();
    for (prov, m) in entries {
        let rel = relation_for(prov, n)?;
        sum.add_scaled(&rel.coords, m);
    }
    Ok(sum)
}
