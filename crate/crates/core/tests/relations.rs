//! Relation generation and certificates, checked against direct evaluation.

use std::collections::BTreeMap;

use mhs_core::arith::{int, padic_valuation, rat};
use mhs_core::composition::CompLinComb;
use mhs_core::oracle::{eval_mhs, PrimeWindow};
use mhs_core::prover::{
    generate_relations, parse_certificate_line, relation_for, relation_triples, replay_combination,
    target_vector,
};
use mhs_core::{Composition, CongruenceStatement, MhsSeries, Prover, RelationBasis, Rational};
use proptest::prelude::*;

fn c(p: &[u32]) -> Composition {
    Composition::new(p.to_vec())
}

fn value(v: &CompLinComb, p: u64, cache: &mut BTreeMap<Composition, Rational>) -> Rational {
    let bp = int(p as i64);
    let mut acc = Rational::from_integer(0.into());
    for (s, k) in v.iter() {
        let h = cache.entry(s.clone()).or_insert_with(|| eval_mhs(p - 1, s));
        acc += k * mhs_core::arith::pow_i(&bp, s.weight() as i64) * &*h;
    }
    acc
}

#[test]
fn every_relation_vanishes_numerically() {
    for n in 1..=7u32 {
        let rels: Vec<_> = relation_triples(n)
            .iter()
            .map(|t| relation_for(t, n).unwrap())
            .collect();
        assert!(!rels.is_empty() || n == 1);
        for p in PrimeWindow::new(11, 97).primes() {
            let mut cache = BTreeMap::new();
            for r in &rels {
                let v = value(&r.coords, p, &mut cache);
                assert!(
                    padic_valuation(&v, p).at_least(n as i64),
                    "n={n} p={p} {}",
                    r.provenance
                );
            }
        }
    }
}

#[test]
fn basis_is_deterministic_and_order_free() {
    let a = generate_relations(7);
    let b = generate_relations(7);
    assert_eq!(a.free_columns(), b.free_columns());
    assert_eq!(a.rank(), b.rank());
    let mut rels: Vec<_> = relation_triples(7)
        .iter()
        .map(|t| relation_for(t, 7).unwrap())
        .collect();
    rels.reverse();
    let r = RelationBasis::from_relations(7, rels);
    assert_eq!(r.free_columns(), a.free_columns());
    assert_eq!(r.rank(), a.rank());
}

#[test]
fn free_columns_are_a_numeric_basis_at_every_weight() {
    // rank + free columns covers every composition of weight < n
    for n in 2..=8u32 {
        let b = generate_relations(n);
        assert_eq!(b.rank() + b.free_columns().len(), b.columns().len());
    }
}

#[test]
fn certificate_text_replays() {
    let mut pr = Prover::new();
    // h(1) + h(2)/2 is O(p^3) (Wolstenholme at weight one)
    let s = MhsSeries::weighted(c(&[1])).add(&MhsSeries::weighted(c(&[2])).scale(&rat(1, 2)));
    let st = CongruenceStatement::weighted(s.truncate(3).unwrap(), 3).unwrap();
    let cert = pr.prove_weighted(&st).unwrap();
    assert!(cert.is_proved());
    let text = cert.dump();
    let entries: Vec<_> = text
        .lines()
        .filter(|l| l.contains("R["))
        .map(|l| parse_certificate_line(l).unwrap())
        .collect();
    assert_eq!(entries, cert.combination);
    let sum = replay_combination(&entries, 3).unwrap();
    assert_eq!(sum, target_vector(st.series(), 3).unwrap());
    // a tampered multiplier no longer replays
    let mut bad = entries.clone();
    bad[0].1 += int(1);
    assert_ne!(replay_combination(&bad, 3).unwrap(), sum);
}

fn span_element(basis: &RelationBasis, picks: &[(usize, i64)]) -> CompLinComb {
    let rows: Vec<_> = basis.echelon_rows().collect();
    let mut v = CompLinComb::new();
    for &(i, k) in picks {
        if !rows.is_empty() {
            v.add_scaled(&rows[i % rows.len()], &int(k));
        }
    }
    v
}

fn series_of(v: &CompLinComb) -> MhsSeries {
    let mut s = MhsSeries::zero();
    for (comp, k) in v.iter() {
        s = s.add(&MhsSeries::weighted(comp.clone()).scale(k));
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn span_members_are_proved(n in 2u32..7, picks in proptest::collection::vec((0usize..100, -3i64..4), 0..5)) {
        let mut pr = Prover::new();
        let v = span_element(pr.basis(n).unwrap(), &picks);
        let st = CongruenceStatement::weighted(series_of(&v).with_order(n as i64), n as i64).unwrap();
        let cert = pr.prove_weighted(&st).unwrap();
        prop_assert!(cert.is_proved());
        prop_assert!(cert.replay().unwrap());
    }

    #[test]
    fn free_column_perturbation_is_unproven(n in 3u32..7, picks in proptest::collection::vec((0usize..100, -3i64..4), 0..5), which in 0usize..10, k in 1i64..5) {
        let mut pr = Prover::new();
        let basis = pr.basis(n).unwrap();
        let free = basis.free_columns();
        let mut v = span_element(basis, &picks);
        v.add(free[which % free.len()].clone(), int(k));
        let st = CongruenceStatement::weighted(series_of(&v).with_order(n as i64), n as i64).unwrap();
        let cert = pr.prove_weighted(&st).unwrap();
        prop_assert!(!cert.is_proved());
    }

    #[test]
    fn proofs_descend_to_smaller_moduli(n in 3u32..7, picks in proptest::collection::vec((0usize..100, -3i64..4), 0..5), m in 1u32..6) {
        let m = m.min(n - 1);
        let mut pr = Prover::new();
        let v = span_element(pr.basis(n).unwrap(), &picks);
        let s = series_of(&v).truncate(m as i64).unwrap();
        let st = CongruenceStatement::weighted(s, m as i64).unwrap();
        prop_assert!(pr.prove_weighted(&st).unwrap().is_proved());
    }
}
