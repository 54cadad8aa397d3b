//! Univariate integer polynomials, ascending coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c * t^k`
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `t - a`
    pub fn linear(a: &BigInt) -> Self {
        Self::new(vec![-a, BigInt::one()])
    }

    /// `prod (t - a_i)`
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a BigInt>) -> Self {
        roots
            .into_iter()
            .fold(Self::one(), |acc, a| &acc * &Self::linear(a))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Drops every term of degree above `k`.
    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().take(k + 1).cloned().collect())
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, o: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, o: &IntPolynomial) -> IntPolynomial {
        self + &(-o)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, o: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || o.is_zero() {
            return IntPolynomial::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        IntPolynomial::new(v)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let unit = mag.is_one() && k > 0;
            if !unit {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_roots() {
        let p = IntPolynomial::from_roots(&[BigInt::from(2), BigInt::from(2)]);
        assert_eq!(p, IntPolynomial::from_i64(&[4, -4, 1]));
        assert_eq!(p.to_string(), "t^2 - 4t + 4");
        assert_eq!(IntPolynomial::from_i64(&[0, -1]).to_string(), "-t");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn trailing_zeros_stripped() {
        let p = IntPolynomial::from_i64(&[1, 0, 0]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!((&p - &p).degree(), None);
    }
}
