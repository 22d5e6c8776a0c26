//! Integer polynomials in one variable, used as symbolic bounds `f(p)`.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Polynomial with `i64` coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: i64) -> Self {
        Self::new(alloc::vec![c])
    }

    /// `c * x^d`
    pub fn monomial(c: i64, d: usize) -> Self {
        let mut coeffs = alloc::vec![0; d + 1];
        coeffs[d] = c;
        Self::new(coeffs)
    }

    pub fn x() -> Self {
        Self::monomial(1, 1)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> i64 {
        self.coeffs.get(d).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has degree `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial treated as degree 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// Sign of `f(p)` for all sufficiently large `p`.
    pub fn eventual_sign(&self) -> i64 {
        self.leading().signum()
    }

    pub fn as_constant(&self) -> Option<i64> {
        match self.coeffs.len() {
            0 => Some(0),
            1 => Some(self.coeffs[0]),
            _ => None,
        }
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigInt::from(*c);
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> i64 {
        self.coeffs.iter().rev().fold(0i64, |acc, c| acc * x + c)
    }

    /// Parity of `f(p)` for odd `p` (`f(p) = f(1) mod 2`).
    pub fn parity_at_odd(&self) -> i64 {
        self.coeffs.iter().sum::<i64>().rem_euclid(2)
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = alloc::vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Drops the leading term: `f - lead * x^deg`.
    pub fn tail(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.pop();
        IntPoly::new(c)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }
}

impl fmt::Display for IntPoly {
    /// Renders in the variable `p`, e.g. `p^2-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            write!(f, "{sign}")?;
            match d {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != 1 {
                        write!(f, "{mag}*")?;
                    }
                    if d == 1 {
                        write!(f, "p")?;
                    } else {
                        write!(f, "p^{d}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn display_and_eval() {
        let f = IntPoly::new(alloc::vec![-1, 0, 1]);
        assert_eq!(f.to_string(), "p^2-1");
        assert_eq!(f.eval_i64(7), 48);
        assert_eq!(f.degree(), Some(2));
        assert_eq!(IntPoly::new(alloc::vec![0, 0]).degree(), None);
        assert_eq!(IntPoly::new(alloc::vec![3, -2]).to_string(), "-2*p+3");
    }

    #[test]
    fn parity_matches_odd_primes() {
        let f = IntPoly::new(alloc::vec![3, 2, 1]);
        for p in [3i64, 5, 7, 11] {
            assert_eq!(f.eval_i64(p).rem_euclid(2), f.parity_at_odd());
        }
    }
}
