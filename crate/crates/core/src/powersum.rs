//! Power sums `S_{F,G}(s) = sum_{F >= n_1 > ... > n_k > G} prod n_i^{-s_i}` with
//! polynomial bounds `F = f(p)`, `G = g(p)` and arbitrary integer exponents,
//! expanded as MHS series.
//!
//! Indices below `(U+1)p` are written `n = A p + j` with `0 <= j < p`. Runs of
//! equal `A` form groups; the `A`-sums become power sums with the smaller bound
//! `U`, and the `j`-sums become sums over `p-1 >= j_1 > ... > 0`, which reduce
//! to `H_{p-1}` by Faulhaber's formula.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{binomial, faulhaber_coeffs, pow_i, Rational};
use crate::composition::Composition;
use crate::poly::IntPoly;
use crate::series::MhsSeries;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum ChainMode {
    Plain,
    /// Indices divisible by `p` are skipped.
    Restricted,
    /// First and last `j` nonzero, consecutive `j` distinct; no top index.
    Curious,
}

/// Valuation guaranteed for `S_{F,.}(s)`.
pub(crate) fn lower_bound(f: &IntPoly, s: &[i64], restricted: bool) -> i64 {
    if restricted {
        0
    } else {
        -(f.deg0() as i64) * s.iter().map(|&x| x.max(0)).sum::<i64>()
    }
}

/// `x * y` to `O(p^n)` where the factors have valuations at least `xlb`, `ylb`.
fn product_planned<S>(
    state: &mut S,
    x: impl FnOnce(&mut S, i64) -> Result<MhsSeries>,
    xlb: i64,
    y: impl FnOnce(&mut S, i64) -> Result<MhsSeries>,
    ylb: i64,
    n: i64,
) -> Result<MhsSeries> {
    if xlb.saturating_add(ylb) >= n {
        return Ok(MhsSeries::big_o(n));
    }
    let xs = x(state, n - ylb)?;
    let ys = y(state, n - xlb)?;
    Ok(xs.mul_with_bounds(xlb, &ys, ylb, n).with_order(n))
}

/// `sum_{c >= n_1 > ... > n_k >= 1} prod n_i^{-t_i}` for a small constant `c`.
fn const_power_sum(c: i64, t: &[i64]) -> Rational {
    if t.is_empty() {
        return Rational::one();
    }
    let k = t.len();
    let mut totals = vec![Rational::zero(); k + 1];
    totals[k] = Rational::one();
    for m in 1..=c {
        let bm = Rational::from_integer(m.into());
        for i in 0..k {
            let add = pow_i(&bm, -t[i]) * &totals[i + 1];
            totals[i] += add;
        }
    }
    totals.swap_remove(0)
}

fn binom_neg(s: i64, m: u32) -> Rational {
    binomial(-s, m)
}

fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Memoised expansion engine.
#[derive(Default)]
pub(crate) struct PowerSums {
    normal: BTreeMap<Vec<i64>, MhsSeries>,
    groups: BTreeMap<Vec<Vec<i64>>, MhsSeries>,
    f0: BTreeMap<(IntPoly, Vec<i64>, bool), MhsSeries>,
    chains: BTreeMap<(IntPoly, Vec<i64>, ChainMode), MhsSeries>,
    /// Leaf evaluations performed, for budget accounting.
    pub(crate) work: u64,
    pub(crate) budget: u64,
}

impl PowerSums {
    pub(crate) fn new(budget: u64) -> Self {
        PowerSums {
            budget,
            ..Default::default()
        }
    }

    fn charge(&mut self) -> Result<()> {
        self.work += 1;
        if self.work > self.budget {
            return Err(Error::WorkBudget {
                budget: self.budget,
                needed: self.work,
            });
        }
        Ok(())
    }

    /// `S_{p-1,0}(u)` exactly, for arbitrary integer exponents.
    pub(crate) fn normalize_hp1(&mut self, u: &[i64]) -> MhsSeries {
        if let Some(hit) = self.normal.get(u) {
            return hit.clone();
        }
        let out = self.normalize_uncached(u);
        self.normal.insert(u.to_vec(), out.clone());
        out
    }

    fn normalize_uncached(&mut self, u: &[i64]) -> MhsSeries {
        let k = u.len();
        let Some(i) = u.iter().position(|&x| x <= 0) else {
            let parts = u.iter().map(|&x| x as u32).collect();
            return MhsSeries::term(Rational::one(), 0, Composition::new(parts));
        };
        let d = (-u[i]) as usize;
        let fc = faulhaber_coeffs(d);
        let mut rest: Vec<i64> = u.to_vec();
        rest.remove(i);
        // (p-exponent, exponents) -> coefficient
        let mut pending: BTreeMap<(i64, Vec<i64>), Rational> = BTreeMap::new();
        let mut push = |b: i64, v: Vec<i64>, c: Rational| {
            if !c.is_zero() {
                *pending.entry((b, v)).or_insert_with(Rational::zero) += c;
            }
        };
        // upper end: F_d(n_{i-1}) or F_d(p)
        for (j, c) in fc.iter().enumerate().skip(1) {
            if i == 0 {
                push(j as i64, rest.clone(), c.clone());
            } else {
                let mut v = rest.clone();
                v[i - 1] -= j as i64;
                push(0, v, c.clone());
            }
        }
        // lower end: -F_d(n_{i+1} + 1), or -F_d(1) = -[d == 0]
        if i == k - 1 {
            if d == 0 {
                push(0, rest.clone(), -Rational::one());
            }
        } else {
            for (j, c) in fc.iter().enumerate().skip(1) {
                for m in 0..=j {
                    let mut v = rest.clone();
                    v[i] -= m as i64;
                    push(0, v, -c * binomial(j as i64, m as u32));
                }
            }
        }
        let mut out = MhsSeries::zero();
        for ((b, v), c) in pending {
            if c.is_zero() {
                continue;
            }
            out = out.add(&self.normalize_hp1(&v).scale(&c).shift(b));
        }
        out
    }

    /// Exact product of `S_{p-1,0}` over independent blocks.
    fn block_product(&mut self, blocks: &[Vec<i64>]) -> MhsSeries {
        if let Some(hit) = self.groups.get(blocks) {
            return hit.clone();
        }
        let mut out = MhsSeries::one();
        for b in blocks {
            if b.is_empty() {
                continue;
            }
            let nb = self.normalize_hp1(b);
            out = out.mul(&nb);
        }
        self.groups.insert(blocks.to_vec(), out.clone());
        out
    }

    /// `S_{f(p),g(p)}(s)` to `O(p^n)`.
    pub(crate) fn power_sum(
        &mut self,
        f: &IntPoly,
        g: &IntPoly,
        s: &[i64],
        restricted: bool,
        n: i64,
    ) -> Result<MhsSeries> {
        if f.eventual_sign() < 0 || g.eventual_sign() < 0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "bounds {f} and {g} must be eventually nonnegative"
            )));
        }
        if g.is_zero() {
            return self.f0(f, s, restricted, n);
        }
        if f.sub(g).eventual_sign() <= 0 {
            return Ok(if s.is_empty() {
                MhsSeries::one()
            } else {
                MhsSeries::zero()
            }
            .with_order(n));
        }
        // S_{F,0}(s) = sum_i S_{F,G}(s_1..s_i) S_{G,0}(s_{i+1}..s_k)
        let mut out = self.f0(f, s, restricted, n)?;
        for i in 0..s.len() {
            let xlb = lower_bound(f, &s[..i], restricted);
            let ylb = lower_bound(g, &s[i..], restricted);
            let prod = product_planned(
                self,
                |ps, m| ps.power_sum(f, g, &s[..i], restricted, m),
                xlb,
                |ps, m| ps.f0(g, &s[i..], restricted, m),
                ylb,
                n,
            );
            out = out.sub(&prod?);
        }
        Ok(out.with_order(n))
    }

    /// `S_{F,0}(s)`.
    pub(crate) fn f0(
        &mut self,
        f: &IntPoly,
        s: &[i64],
        restricted: bool,
        n: i64,
    ) -> Result<MhsSeries> {
        if s.is_empty() {
            return Ok(MhsSeries::one().with_order(n));
        }
        if f.eventual_sign() <= 0 {
            return Ok(MhsSeries::big_o(n));
        }
        if lower_bound(f, s, restricted) >= n {
            return Ok(MhsSeries::big_o(n));
        }
        let key = (f.clone(), s.to_vec(), restricted);
        if let Some(hit) = self.f0.get(&key) {
            if hit.order() >= n {
                return Ok(hit.clone().with_order(n));
            }
        }
        let out = self.f0_uncached(f, s, restricted, n)?;
        self.f0.insert(key, out.clone());
        Ok(out.with_order(n))
    }

    fn f0_uncached(
        &mut self,
        f: &IntPoly,
        s: &[i64],
        restricted: bool,
        n: i64,
    ) -> Result<MhsSeries> {
        let r = f.deg0();
        if r == 0 {
            // small constant bound; no index is divisible by a large p
            return Ok(MhsSeries::constant(const_power_sum(f.leading(), s)));
        }
        let a = f.leading();
        let c = f.tail();
        if r == 1 && a == 1 && c == IntPoly::constant(-1) {
            return Ok(self.normalize_hp1(s));
        }
        if c.is_zero() {
            return self.top_power(r, a, s, restricted, n);
        }
        let apr = IntPoly::monomial(a, r);
        if c.eventual_sign() > 0 {
            // split at a p^r: the part above is a shifted sum with bound c(p)
            let mut out = MhsSeries::big_o(n);
            for i in 0..=s.len() {
                let xlb = lower_bound(&c, &s[..i], restricted);
                let ylb = lower_bound(&apr, &s[i..], restricted);
                let prod = product_planned(
                    self,
                    |ps, m| ps.above(r, a, &c, &s[..i], restricted, m),
                    xlb,
                    |ps, m| ps.f0(&apr, &s[i..], restricted, m),
                    ylb,
                    n,
                )?;
                out = out.add(&prod);
            }
            Ok(out)
        } else {
            // S_{F,0} = S_{ap^r,0} - sum_{i>=1} S_{ap^r,F}(s_1..s_i) S_{F,0}(s_{i+1}..)
            let d = c.neg();
            let mut out = self.f0(&apr, s, restricted, n)?;
            for i in 1..=s.len() {
                let xlb = self.below_lb(r, &d, &s[..i], restricted);
                let ylb = lower_bound(f, &s[i..], restricted);
                let prod = product_planned(
                    self,
                    |ps, m| ps.below(r, a, &d, &s[..i], restricted, m),
                    xlb,
                    |ps, m| ps.f0(f, &s[i..], restricted, m),
                    ylb,
                    n,
                )?;
                out = out.sub(&prod);
            }
            Ok(out)
        }
    }

    /// `S_{ap^r + c, ap^r}(t)` with `c(p) > 0`, `deg c < r`.
    fn above(
        &mut self,
        r: usize,
        a: i64,
        c: &IntPoly,
        t: &[i64],
        restricted: bool,
        n: i64,
    ) -> Result<MhsSeries> {
        // (a p^r + m)^{-t} = sum_u C(-t,u) a^u p^{ru} m^{-t-u}
        let mut out = MhsSeries::big_o(n);
        let mut u = vec![0i64; t.len()];
        self.above_dfs(r as i64, a, c, t, restricted, n, 0, &mut u, &mut out)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn above_dfs(
        &mut self,
        r: i64,
        a: i64,
        c: &IntPoly,
        t: &[i64],
        restricted: bool,
        n: i64,
        pos: usize,
        u: &mut Vec<i64>,
        out: &mut MhsSeries,
    ) -> Result<()> {
        let bound = |u: &[i64]| {
            let exps: Vec<i64> = t.iter().zip(u.iter()).map(|(x, y)| x + y).collect();
            r * u.iter().sum::<i64>() + lower_bound(c, &exps, restricted)
        };
        if bound(u) >= n {
            return Ok(());
        }
        if pos == t.len() {
            self.charge()?;
            let mut coeff = Rational::one();
            for (tj, uj) in t.iter().zip(u.iter()) {
                coeff *= binom_neg(*tj, *uj as u32) * pow_i(&Rational::from_integer(a.into()), *uj);
            }
            if coeff.is_zero() {
                return Ok(());
            }
            let usum: i64 = u.iter().sum();
            let exps: Vec<i64> = t.iter().zip(u.iter()).map(|(x, y)| x + y).collect();
            let inner = self.f0(c, &exps, restricted, n - r * usum)?;
            *out = out.add(&inner.scale(&coeff).shift(r * usum));
            return Ok(());
        }
        loop {
            if t[pos] <= 0 && u[pos] > -t[pos] {
                break;
            }
            self.above_dfs(r, a, c, t, restricted, n, pos + 1, u, out)?;
            u[pos] += 1;
            if bound(u) >= n {
                break;
            }
        }
        u[pos] = 0;
        Ok(())
    }

    fn below_lb(&self, r: usize, d: &IntPoly, t: &[i64], restricted: bool) -> i64 {
        let dm1 = d.sub(&IntPoly::constant(1));
        let base = lower_bound(&dm1, t, restricted);
        if restricted {
            base
        } else {
            base.min(-(r as i64) * t[0] + lower_bound(&dm1, &t[1..], restricted))
        }
    }

    /// `S_{ap^r, ap^r - d}(t)` with `d(p) > 0`, `deg d < r`.
    fn below(
        &mut self,
        r: usize,
        a: i64,
        d: &IntPoly,
        t: &[i64],
        restricted: bool,
        n: i64,
    ) -> Result<MhsSeries> {
        let dm1 = d.sub(&IntPoly::constant(1));
        let mut out = self.below_tail(r as i64, a, &dm1, t, restricted, n)?;
        if !restricted {
            // n_1 = a p^r exactly
            let s1 = t[0];
            let shift = -(r as i64) * s1;
            let rest = self.below_tail(r as i64, a, &dm1, &t[1..], restricted, n - shift)?;
            let c = pow_i(&Rational::from_integer(a.into()), -s1);
            out = out.add(&rest.scale(&c).shift(shift));
        }
        Ok(out.with_order(n))
    }

    /// Sum over `a p^r > n_1 > ... > n_i > a p^r - d` written as `n = a p^r - m`,
    /// `1 <= m_1 < ... < m_i <= d-1`.
    fn below_tail(
        &mut self,
        r: i64,
        a: i64,
        dm1: &IntPoly,
        t: &[i64],
        restricted: bool,
        n: i64,
    ) -> Result<MhsSeries> {
        if t.is_empty() {
            return Ok(MhsSeries::one().with_order(n));
        }
        // (a p^r - m)^{-t} = (-1)^t sum_u C(-t,u) (-1)^u a^u p^{ru} m^{-t-u}
        let mut out = MhsSeries::big_o(n);
        let mut u = vec![0i64; t.len()];
        self.below_dfs(r, a, dm1, t, restricted, n, 0, &mut u, &mut out)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn below_dfs(
        &mut self,
        r: i64,
        a: i64,
        dm1: &IntPoly,
        t: &[i64],
        restricted: bool,
        n: i64,
        pos: usize,
        u: &mut Vec<i64>,
        out: &mut MhsSeries,
    ) -> Result<()> {
        let bound = |u: &[i64]| {
            let exps: Vec<i64> = t.iter().zip(u.iter()).map(|(x, y)| x + y).collect();
            r * u.iter().sum::<i64>() + lower_bound(dm1, &exps, restricted)
        };
        if bound(u) >= n {
            return Ok(());
        }
        if pos == t.len() {
            self.charge()?;
            let mut coeff = Rational::one();
            for (tj, uj) in t.iter().zip(u.iter()) {
                coeff *= sign(tj + uj)
                    * binom_neg(*tj, *uj as u32)
                    * pow_i(&Rational::from_integer(a.into()), *uj);
            }
            if coeff.is_zero() {
                return Ok(());
            }
            let usum: i64 = u.iter().sum();
            let rev: Vec<i64> = t.iter().zip(u.iter()).map(|(x, y)| x + y).rev().collect();
            let inner = self.f0(dm1, &rev, restricted, n - r * usum)?;
            *out = out.add(&inner.scale(&coeff).shift(r * usum));
            return Ok(());
        }
        loop {
            if t[pos] <= 0 && u[pos] > -t[pos] {
                break;
            }
            self.below_dfs(r, a, dm1, t, restricted, n, pos + 1, u, out)?;
            u[pos] += 1;
            if bound(u) >= n {
                break;
            }
        }
        u[pos] = 0;
        Ok(())
    }

    /// `S_{a p^r, 0}(s)`, `r >= 1`.
    fn top_power(
        &mut self,
        r: usize,
        a: i64,
        s: &[i64],
        restricted: bool,
        n: i64,
    ) -> Result<MhsSeries> {
        let u = IntPoly::monomial(a, r - 1).sub(&IntPoly::constant(1));
        let mode = if restricted {
            ChainMode::Restricted
        } else {
            ChainMode::Plain
        };
        let mut out = self.chain(&u, s, mode, n)?;
        if !restricted {
            let s1 = s[0];
            let shift = -(r as i64) * s1;
            let rest = self.chain(&u, &s[1..], ChainMode::Plain, n - shift)?;
            let c = pow_i(&Rational::from_integer(a.into()), -s1);
            out = out.add(&rest.scale(&c).shift(shift));
        }
        Ok(out.with_order(n))
    }

    /// Curious sum `C_{r,k,p}` to `O(p^n)`.
    pub(crate) fn curious(&mut self, r: u32, k: u32, n: i64) -> Result<MhsSeries> {
        if k <= 1 || r == 0 {
            return Ok(MhsSeries::zero().with_order(n));
        }
        let r = r as i64;
        let u = IntPoly::monomial(1, (r - 1) as usize).sub(&IntPoly::constant(1));
        let exps = vec![1i64; (k - 1) as usize];
        let chains = self.chain(&u, &exps, ChainMode::Curious, n + r)?;
        let kfact: BigInt = (1..=k as u64).map(BigInt::from).product();
        Ok(chains
            .scale(&Rational::from_integer(kfact))
            .shift(-r)
            .with_order(n))
    }

    /// Sum over chains of indices below `(U+1) p`.
    fn chain(&mut self, u: &IntPoly, s: &[i64], mode: ChainMode, n: i64) -> Result<MhsSeries> {
        if s.is_empty() {
            return Ok(MhsSeries::one().with_order(n));
        }
        let key = (u.clone(), s.to_vec(), mode);
        if let Some(hit) = self.chains.get(&key) {
            if hit.order() >= n {
                return Ok(hit.clone().with_order(n));
            }
        }
        let out = self.chain_uncached(u, s, mode, n)?;
        self.chains.insert(key, out.clone());
        Ok(out)
    }

    fn chain_uncached(
        &mut self,
        u: &IntPoly,
        s: &[i64],
        mode: ChainMode,
        n: i64,
    ) -> Result<MhsSeries> {
        let k = s.len();
        let mut out = MhsSeries::big_o(n);
        for sizes in crate::composition::compositions_of_weight(k as u32) {
            let sizes: Vec<usize> = sizes.parts().iter().map(|&x| x as usize).collect();
            let q = sizes.len();
            for mask in 0u32..(1 << q) {
                let zero: Vec<bool> = (0..q).map(|g| mask & (1 << g) != 0).collect();
                if !allowed(&sizes, &zero, mode) {
                    continue;
                }
                let mut layout = Vec::with_capacity(k);
                for (g, &len) in sizes.iter().enumerate() {
                    for pos in 0..len {
                        layout.push((g, zero[g] && pos == len - 1));
                    }
                }
                let mut m = vec![0i64; k];
                let ctx = ChainCtx {
                    u,
                    s,
                    mode,
                    n,
                    sizes: &sizes,
                    zero: &zero,
                    layout: &layout,
                };
                self.chain_dfs(&ctx, 0, &mut m, &mut out)?;
            }
        }
        Ok(out)
    }

    fn chain_dfs(
        &mut self,
        ctx: &ChainCtx<'_>,
        pos: usize,
        m: &mut Vec<i64>,
        out: &mut MhsSeries,
    ) -> Result<()> {
        if ctx.bound(m) >= ctx.n {
            return Ok(());
        }
        if pos == ctx.s.len() {
            return self.chain_leaf(ctx, m, out);
        }
        if ctx.layout[pos].1 {
            return self.chain_dfs(ctx, pos + 1, m, out);
        }
        loop {
            if ctx.s[pos] <= 0 && m[pos] > -ctx.s[pos] {
                break;
            }
            self.chain_dfs(ctx, pos + 1, m, out)?;
            m[pos] += 1;
            if ctx.bound(m) >= ctx.n {
                break;
            }
        }
        m[pos] = 0;
        Ok(())
    }

    fn chain_leaf(&mut self, ctx: &ChainCtx<'_>, m: &[i64], out: &mut MhsSeries) -> Result<()> {
        self.charge()?;
        let (p_exp, e) = ctx.exponents(m);
        let mut coeff = Rational::one();
        for (i, &(_, is_zero)) in ctx.layout.iter().enumerate() {
            if !is_zero {
                coeff *= binom_neg(ctx.s[i], m[i] as u32);
            }
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let q = ctx.sizes.len();
        let need = ctx.n - p_exp;
        let neg_e: Vec<i64> = e.iter().map(|x| -x).collect();
        let mut a_part = self.f0(ctx.u, &neg_e, false, need)?;
        if !ctx.zero[q - 1] && e[q - 1] == 0 {
            // last group at A = 0
            a_part = a_part.add(&self.f0(ctx.u, &neg_e[..q - 1], false, need)?);
        }
        if a_part.is_zero() {
            return Ok(());
        }
        let j_part = self.j_sum(ctx, m);
        let a_lb = lower_bound(ctx.u, &neg_e, false);
        let piece = a_part
            .mul_with_bounds(a_lb, &j_part, 0, need)
            .scale(&coeff)
            .shift(p_exp);
        *out = out.add(&piece);
        Ok(())
    }

    /// Product of the `j`-sums of all groups.
    fn j_sum(&mut self, ctx: &ChainCtx<'_>, m: &[i64]) -> MhsSeries {
        let q = ctx.sizes.len();
        let mut blocks: Vec<Vec<i64>> = Vec::with_capacity(q);
        let mut start = 0;
        for g in 0..q {
            let len = ctx.sizes[g];
            let b: Vec<i64> = (start..start + len)
                .filter(|&i| !ctx.layout[i].1)
                .map(|i| ctx.s[i] + m[i])
                .collect();
            blocks.push(b);
            start += len;
        }
        if ctx.mode != ChainMode::Curious {
            return self.block_product(&blocks);
        }
        // j_i != j_{i+1} across a boundary between two nonzero members:
        // inclusion-exclusion, where equality glues the two chains at one index
        let linkable: Vec<usize> = (0..q.saturating_sub(1))
            .filter(|&g| !ctx.zero[g] && !(ctx.zero[g + 1] && ctx.sizes[g + 1] == 1))
            .collect();
        let mut out = MhsSeries::zero();
        for mask in 0u32..(1 << linkable.len()) {
            let mut merged: Vec<Vec<i64>> = Vec::new();
            let mut cur: Vec<i64> = blocks[0].clone();
            for g in 0..q - 1 {
                let link = linkable
                    .iter()
                    .position(|&x| x == g)
                    .is_some_and(|bit| mask & (1 << bit) != 0);
                if link {
                    let next = &blocks[g + 1];
                    let last = cur.pop().expect("linked group has a nonzero last member");
                    cur.push(last + next[0]);
                    cur.extend_from_slice(&next[1..]);
                } else {
                    merged.push(core::mem::take(&mut cur));
                    cur = blocks[g + 1].clone();
                }
            }
            merged.push(cur);
            let sgn = sign(mask.count_ones() as i64);
            out = out.add(&self.block_product(&merged).scale(&sgn));
        }
        out
    }
}

fn allowed(sizes: &[usize], zero: &[bool], mode: ChainMode) -> bool {
    let q = sizes.len();
    match mode {
        ChainMode::Plain => true,
        ChainMode::Restricted => zero.iter().all(|z| !z),
        ChainMode::Curious => {
            if zero[q - 1] || (sizes[0] == 1 && zero[0]) {
                return false;
            }
            // two consecutive members with j = 0
            !(0..q - 1).any(|g| zero[g] && zero[g + 1] && sizes[g + 1] == 1)
        }
    }
}

struct ChainCtx<'a> {
    u: &'a IntPoly,
    s: &'a [i64],
    mode: ChainMode,
    n: i64,
    sizes: &'a [usize],
    zero: &'a [bool],
    /// (group, member has j = 0) per index
    layout: &'a [(usize, bool)],
}

impl ChainCtx<'_> {
    /// p-exponent and per-group A-exponents.
    fn exponents(&self, m: &[i64]) -> (i64, Vec<i64>) {
        let mut p_exp = 0;
        let mut e = vec![0i64; self.sizes.len()];
        for (i, &(g, is_zero)) in self.layout.iter().enumerate() {
            if is_zero {
                p_exp -= self.s[i];
                e[g] -= self.s[i];
            } else {
                p_exp += m[i];
                e[g] += m[i];
            }
        }
        (p_exp, e)
    }

    /// Lower bound on the valuation of every term reachable by raising `m`.
    fn bound(&self, m: &[i64]) -> i64 {
        let (p_exp, e) = self.exponents(m);
        let deg = self.u.deg0() as i64;
        p_exp - deg * e.iter().map(|x| (-x).max(0)).sum::<i64>()
    }
}
