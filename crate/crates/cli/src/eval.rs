//! Evaluation of parsed expressions, as series and as numbers at a prime.

use mhs_core::arith::{padic_valuation, pow_i};
use mhs_core::oracle::{
    eval_curious_mod, eval_mhs, eval_quantity, eval_series, NumericRecord, NumericReport, PrimeWindow,
};
use mhs_core::{Composition, Error, Expander, MhsSeries, Prover, QuantitySpec, Rational, Result, Valuation, EXACT};
use num_traits::Zero;
use rayon::prelude::*;

use crate::expr::{Congruence, Expr};

/// How far past the requested order sub-expressions may be expanded when
/// negative powers of `p` eat into the precision.
pub const MAX_SLACK: i64 = 8;

pub struct Evaluator {
    ex: Expander,
    budget: u64,
}

impl Evaluator {
    pub fn new(prover: Prover, budget: u64) -> Self {
        Evaluator { ex: Expander::with_budget(budget).with_prover(prover), budget }
    }

    pub fn prover_mut(&mut self) -> &mut Prover {
        self.ex.prover_mut()
    }

    /// `e` as a series known to at least `O(p^order)`; exact results stay exact.
    pub fn series(&mut self, e: &Expr, order: i64) -> Result<MhsSeries> {
        let mut known = i64::MIN;
        for slack in 0..=MAX_SLACK {
            let s = self.series_at(e, order + slack)?;
            if s.order() >= order {
                return if s.is_exact() { Ok(s) } else { s.truncate(order) };
            }
            known = known.max(s.order());
        }
        Err(Error::TruncationBeyondOrder { requested: order, known })
    }

    fn series_at(&mut self, e: &Expr, w: i64) -> Result<MhsSeries> {
        Ok(match e {
            Expr::Num(q) => MhsSeries::constant(q.clone()),
            Expr::PPow(k) => MhsSeries::term(Rational::from_integer(1.into()), *k, Composition::empty()),
            Expr::H(s) => MhsSeries::term(Rational::from_integer(1.into()), 0, s.clone()),
            Expr::Weighted(s) => MhsSeries::weighted(s.clone()),
            Expr::BigO(n) => MhsSeries::big_o(*n),
            Expr::Quantity(q) => self.ex.expand(q, w)?,
            Expr::Add(a, b) => self.series_at(a, w)?.add(&self.series_at(b, w)?),
            Expr::Sub(a, b) => self.series_at(a, w)?.sub(&self.series_at(b, w)?),
            Expr::Mul(a, b) => self.series_at(a, w)?.mul(&self.series_at(b, w)?),
            Expr::Neg(a) => self.series_at(a, w)?.neg(),
            Expr::Inv(a) => {
                let s = self.series_at(a, w)?;
                if s.constant_term().is_zero() {
                    s.invert_monomial_unit()?
                } else {
                    s.invert_unit_to(w)?
                }
            }
        })
    }

    /// Value of `e` at the prime `p` with the precision it is known to.
    ///
    /// The precision is `i64::MAX` for exact values. Quantities without a
    /// rational value (`zetap`) are replaced by their expansion to `O(p^order)`
    /// and curious sums with `r >= 2` are summed modulo a power of `p`;
    /// error terms count as zero.
    pub fn value(&mut self, e: &Expr, p: u64, order: i64) -> Result<(Rational, i64)> {
        let budget = self.budget;
        value_with(e, p, budget, order, &mut |q: &Expr| {
            let s = self.series(q, order)?;
            Ok((eval_series(&s, p), s.order()))
        })
    }

    /// Numeric check of `c` at every prime of the window, primes in parallel.
    pub fn verify(&mut self, c: &Congruence, window: PrimeWindow) -> Result<NumericReport> {
        let budget = self.budget;
        let n = c.modulus;
        let diff = Expr::Sub(Box::new(c.lhs.clone()), Box::new(c.rhs.clone()));
        let direct: Vec<(u64, Result<(Rational, i64)>)> = window
            .primes()
            .into_par_iter()
            .map(|p| (p, value_with(&diff, p, budget, n, &mut |_| Err(Error::NotRational(String::new())))))
            .collect();
        let mut records = Vec::new();
        for (p, d) in direct {
            let (d, prec) = match d {
                Err(Error::NotRational(_)) => self.value(&diff, p, n)?,
                d => d?,
            };
            if prec < n {
                return Err(Error::InsufficientOrder { modulus: n, order: prec });
            }
            records.push(if prec == EXACT {
                NumericRecord::from_difference(p, n, &d)
            } else {
                NumericRecord::from_approximate_difference(p, n, &d, prec)
            });
        }
        Ok(NumericReport::from_records(records))
    }

    /// Both sides of `c` as series to `O(p^modulus)`.
    pub fn sides(&mut self, c: &Congruence) -> Result<(MhsSeries, MhsSeries)> {
        Ok((self.series(&c.lhs, c.modulus)?, self.series(&c.rhs, c.modulus)?))
    }
}

/// Extra powers of `p` carried by approximate atoms beyond the requested order.
const MARGIN: i64 = 4;

/// Valuation of an approximate value, at most its precision.
fn approx_val(x: &Rational, prec: i64, p: u64) -> i64 {
    match padic_valuation(x, p) {
        Valuation::Finite(v) => v.min(prec),
        Valuation::Infinite => prec,
    }
}

/// Value of `e` at `p` and its precision; `fallback` supplies quantities with no rational value.
fn value_with(
    e: &Expr,
    p: u64,
    budget: u64,
    order: i64,
    fallback: &mut dyn FnMut(&Expr) -> Result<(Rational, i64)>,
) -> Result<(Rational, i64)> {
    let bp = Rational::from_integer(p.into());
    let v = |x: &Expr, f: &mut dyn FnMut(&Expr) -> Result<(Rational, i64)>| value_with(x, p, budget, order, f);
    let exact = |x: Rational| (x, EXACT);
    Ok(match e {
        Expr::Num(q) => exact(q.clone()),
        Expr::PPow(k) => exact(pow_i(&bp, *k)),
        Expr::H(s) => exact(eval_mhs(p - 1, s)),
        Expr::Weighted(s) => exact(pow_i(&bp, s.weight() as i64) * eval_mhs(p - 1, s)),
        Expr::BigO(n) => (Rational::zero(), *n),
        Expr::Quantity(QuantitySpec::Curious { r, k }) if *r >= 2 => {
            let prec = order.saturating_add(MARGIN);
            (eval_curious_mod(*r, *k, p, prec, budget)?, prec)
        }
        Expr::Quantity(q) => match eval_quantity(q, p, budget) {
            Err(Error::NotRational(_)) => fallback(e)?,
            r => exact(r?),
        },
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (x, px) = v(a, fallback)?;
            let (y, py) = v(b, fallback)?;
            let z = if matches!(e, Expr::Add(..)) { x + y } else { x - y };
            (z, px.min(py))
        }
        Expr::Mul(a, b) => {
            let (x, px) = v(a, fallback)?;
            let (y, py) = v(b, fallback)?;
            let prec = if px == EXACT && py == EXACT {
                EXACT
            } else {
                px.saturating_add(approx_val(&y, py, p)).min(py.saturating_add(approx_val(&x, px, p)))
            };
            (x * y, prec)
        }
        Expr::Neg(a) => {
            let (x, px) = v(a, fallback)?;
            (-x, px)
        }
        Expr::Inv(a) => {
            let (x, px) = v(a, fallback)?;
            let vx = approx_val(&x, px, p);
            if x.is_zero() || (px != EXACT && vx >= px) {
                return Err(Error::NotAUnit(format!("{a} vanishes to the known precision at p = {p}")));
            }
            let prec = if px == EXACT { EXACT } else { px - 2 * vx };
            (x.recip(), prec)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_congruence, parse_expr};
    use mhs_core::arith::{int, rat};
    use mhs_core::oracle::DEFAULT_WORK_BUDGET;

    fn ev() -> Evaluator {
        Evaluator::new(Prover::new(), DEFAULT_WORK_BUDGET)
    }

    #[test]
    fn apery_renders_like_the_session() {
        let s = ev().series(&parse_expr("apery()").unwrap(), 4).unwrap();
        assert_eq!(s.to_string(), "1 + 2/3 * p^3 * H(2,1) + O(p^4)");
    }

    #[test]
    fn exact_stays_exact() {
        let s = ev().series(&parse_expr("rat(p^2)").unwrap(), 9).unwrap();
        assert!(s.is_exact());
        assert_eq!(s.to_string(), "p^2");
    }

    #[test]
    fn negative_powers_use_slack() {
        let mut e = ev();
        let s = e.series(&parse_expr("p^-2*alt(2)").unwrap(), 3).unwrap();
        assert_eq!(s.order(), 3);
        let t = e.series(&parse_expr("alt(2)").unwrap(), 5).unwrap().shift(-2);
        assert_eq!(s, t.truncate(3).unwrap());
    }

    #[test]
    fn rendering_parses_back() {
        let mut e = ev();
        for src in ["apery()", "binp(2,1,1)", "curious(2,3)", "zetap(3)", "inv(binp(2,1))"] {
            let s = e.series(&parse_expr(src).unwrap(), 6).unwrap();
            let back = e.series(&parse_expr(&s.to_string()).unwrap(), 6).unwrap();
            assert_eq!(s, back, "{src}");
        }
    }

    #[test]
    fn inverse_of_binomial() {
        let mut e = ev();
        let s = e.series(&parse_expr("binp(2,1)*inv(binp(2,1))").unwrap(), 5).unwrap();
        assert_eq!(s, MhsSeries::one().with_order(5));
        let s = e.series(&parse_expr("inv(p*binp(2,1))").unwrap(), 3).unwrap();
        assert_eq!(s.coeff(-1, &Composition::empty()), rat(1, 2));
        assert!(e.series(&parse_expr("inv(H(1))").unwrap(), 3).is_err());
    }

    #[test]
    fn values_match_direct_sums() {
        let mut e = ev();
        let v = e.value(&parse_expr("1/2*H(1) + p^2*hp(1) - O(p^3)").unwrap(), 5, 3).unwrap();
        assert_eq!(v, (rat(1, 2) * rat(25, 12) + int(125) * rat(25, 12), 3));
        let v = e.value(&parse_expr("binp(2,1)").unwrap(), 7, 3).unwrap();
        assert_eq!(v, (int(3432), EXACT));
        assert!(e.value(&parse_expr("inv(binp(2,1)-3432)").unwrap(), 7, 3).is_err());
    }

    #[test]
    fn verify_reports_pass_and_fail() {
        let mut e = ev();
        let good = parse_congruence("p*H(1) + p^2*H(1,1) = 0 mod p^3").unwrap();
        assert!(e.verify(&good, PrimeWindow::new(7, 61)).unwrap().pass());
        let bad = parse_congruence("H(1) = 1 mod p").unwrap();
        let r = e.verify(&bad, PrimeWindow::new(7, 61)).unwrap();
        assert_eq!(r.failures(), PrimeWindow::new(7, 61).primes().len());
    }

    #[test]
    fn precision_follows_the_arithmetic() {
        let mut e = ev();
        // multiplying by p^-2 loses two digits of precision
        let (_, prec) = e.value(&parse_expr("curious(3,3)").unwrap(), 7, 5).unwrap();
        assert_eq!(prec, 5 + MARGIN);
        let (_, prec) = e.value(&parse_expr("p^-2*curious(3,3)").unwrap(), 7, 5).unwrap();
        assert_eq!(prec, 3 + MARGIN);
        let (_, prec) = e.value(&parse_expr("inv(1 + curious(2,3))").unwrap(), 7, 5).unwrap();
        assert_eq!(prec, 5 + MARGIN);
        assert!(e.value(&parse_expr("inv(O(p^3))").unwrap(), 7, 5).is_err());
    }

    #[test]
    fn curious_sums_verify_fast() {
        let mut e = ev();
        let c = parse_congruence("curious(3,4) = -24/5*p^3*H(4,1) + 28/15*p^4*H(4,1,1) mod p^5").unwrap();
        let r = e.verify(&c, PrimeWindow::new(11, 13)).unwrap();
        assert!(r.pass(), "{}", r.table());
        let c = parse_congruence("curious(3,4) = -23/5*p^3*H(4,1) mod p^5").unwrap();
        assert!(!e.verify(&c, PrimeWindow::new(11, 13)).unwrap().pass());
    }

    #[test]
    fn zeta_values_fall_back_to_series() {
        let mut e = ev();
        let c = parse_congruence("apery() = 1 + 2*zetap(3) mod p^5").unwrap();
        assert!(e.verify(&c, PrimeWindow::new(11, 31)).unwrap().pass());
    }
}
