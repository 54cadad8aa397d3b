//! Characteristic polynomial factorization, Poincaré polynomials and
//! lower central series ranks from the counts `a_i` of a chain.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::IntPolynomial;
use crate::poset::{FinitePoset, PosetError};
use crate::ssolv::IdealChain;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error(
        "chain is not strict; the characteristic polynomial need not factor over the integers"
    )]
    NotStrict,
    #[error(
        "product of linear factors {product} differs from the characteristic polynomial {chi}"
    )]
    FactorMismatch {
        product: IntPolynomial,
        chi: IntPolynomial,
    },
    #[error("Poincaré polynomial requires v > 0")]
    CompactFactor,
    #[error("the product formula gives {product}, the substitution gives {substituted}")]
    PoincareMismatch {
        product: IntPolynomial,
        substituted: IntPolynomial,
    },
    #[error("j_max must be at least 1")]
    EmptyRange,
    #[error("no nonnegative integer solution at j = {0}")]
    NotIntegral(usize),
    #[error("re-expansion disagrees at degree {0}")]
    Reexpansion(usize),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factored {
    pub poly: IntPolynomial,
    /// Roots `a_1, ..., a_n`.
    pub roots: Vec<BigInt>,
}

/// `prod (t - a_i)` over a strict chain, checked against the Möbius sum.
pub fn charpoly_factored(p: &FinitePoset, chain: &IdealChain) -> Result<Factored, InvariantError> {
    if !chain.strict {
        return Err(InvariantError::NotStrict);
    }
    let roots: Vec<BigInt> = chain.a.iter().map(|&a| BigInt::from(a)).collect();
    let product = IntPolynomial::from_roots(&roots);
    let chi = p.char_poly()?;
    if chi != product {
        return Err(InvariantError::FactorMismatch { product, chi });
    }
    Ok(Factored {
        poly: product,
        roots,
    })
}

/// `prod ((1+t)^d + a_i t^(d+v-1))`.
pub fn poincare(a: &[BigInt], d: usize, v: usize) -> Result<IntPolynomial, InvariantError> {
    if v == 0 {
        return Err(InvariantError::CompactFactor);
    }
    let k = d + v - 1;
    let base = IntPolynomial::from_i64(&[1, 1]).pow(d);
    Ok(a.iter().fold(IntPolynomial::one(), |acc, ai| {
        &acc * &(&base + &IntPolynomial::monomial(ai.clone(), k))
    }))
}

/// `(-t^k)^n chi(-(1+t)^d / t^k)` with `k = d+v-1` and `n = deg chi`.
pub fn poincare_from_charpoly(
    chi: &IntPolynomial,
    d: usize,
    v: usize,
) -> Result<IntPolynomial, InvariantError> {
    if v == 0 {
        return Err(InvariantError::CompactFactor);
    }
    let k = d + v - 1;
    let n = chi.degree().unwrap_or(0);
    let base = IntPolynomial::from_i64(&[1, 1]).pow(d);
    let mut out = IntPolynomial::zero();
    for (j, c) in chi.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let sign = if (n + j).is_multiple_of(2) {
            c.clone()
        } else {
            -c
        };
        let term = &base.pow(j) * &IntPolynomial::monomial(sign, k * (n - j));
        out = &out + &term;
    }
    Ok(out)
}

/// Both routes to the Poincaré polynomial; they must agree exactly.
pub fn poincare_checked(
    a: &[BigInt],
    chi: &IntPolynomial,
    d: usize,
    v: usize,
) -> Result<IntPolynomial, InvariantError> {
    let product = poincare(a, d, v)?;
    let substituted = poincare_from_charpoly(chi, d, v)?;
    if product != substituted {
        return Err(InvariantError::PoincareMismatch {
            product,
            substituted,
        });
    }
    Ok(product)
}

/// Exponents `phi_1..phi_jmax` with `prod (1-t^j)^phi_j = prod (1-(a_i+1)t)`.
pub fn lcs_ranks(a: &[BigInt], j_max: usize) -> Result<Vec<BigInt>, InvariantError> {
    if j_max == 0 {
        return Err(InvariantError::EmptyRange);
    }
    let r: Vec<BigInt> = a.iter().map(|x| x + 1).collect();
    let mut phi: Vec<BigInt> = Vec::with_capacity(j_max);
    for k in 1..=j_max {
        let mut s: BigInt = r.iter().map(|x| num_traits::pow(x.clone(), k)).sum();
        for e in 1..k {
            if k % e == 0 {
                s -= &phi[e - 1] * e;
            }
        }
        let (q, rem) = s.div_rem(&BigInt::from(k));
        if !rem.is_zero() || q.is_negative() {
            return Err(InvariantError::NotIntegral(k));
        }
        phi.push(q);
    }
    check_reexpansion(&r, &phi)?;
    Ok(phi)
}

fn check_reexpansion(r: &[BigInt], phi: &[BigInt]) -> Result<(), InvariantError> {
    let j_max = phi.len();
    let target = r
        .iter()
        .fold(IntPolynomial::one(), |acc, x| {
            &acc * &IntPolynomial::new(vec![BigInt::one(), -x])
        })
        .truncate(j_max);
    let mut lhs = IntPolynomial::one();
    for (idx, f) in phi.iter().enumerate() {
        let j = idx + 1;
        // (1 - t^j)^f through degree j_max
        let mut coeffs = vec![BigInt::zero(); j_max + 1];
        let mut binom = BigInt::one();
        let mut m = 0usize;
        while j * m <= j_max {
            coeffs[j * m] = if m.is_multiple_of(2) {
                binom.clone()
            } else {
                -&binom
            };
            binom = binom * (f - m) / (m + 1);
            m += 1;
        }
        lhs = (&lhs * &IntPolynomial::new(coeffs)).truncate(j_max);
    }
    for k in 0..=j_max {
        if lhs.coeff(k) != target.coeff(k) {
            return Err(InvariantError::Reexpansion(k));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn poincare_examples() {
        let chi = IntPolynomial::from_i64(&[4, -4, 1]);
        let p = poincare_checked(&big(&[2, 2]), &chi, 1, 1).unwrap();
        assert_eq!(p, IntPolynomial::from_i64(&[1, 6, 9]));
        assert_eq!(
            poincare(&big(&[5]), 0, 2).unwrap(),
            IntPolynomial::from_i64(&[1, 5])
        );
        let chi = IntPolynomial::from_i64(&[2, -3, 1]);
        assert_eq!(
            poincare_checked(&big(&[1, 2]), &chi, 0, 2).unwrap(),
            IntPolynomial::from_i64(&[1, 3, 2])
        );
        assert_eq!(
            poincare(&big(&[1]), 1, 0),
            Err(InvariantError::CompactFactor)
        );
    }

    #[test]
    fn lcs_examples() {
        assert_eq!(lcs_ranks(&big(&[2, 2]), 3).unwrap(), big(&[6, 6, 16]));
        assert_eq!(lcs_ranks(&big(&[1]), 5).unwrap(), big(&[2, 1, 2, 3, 6]));
        assert_eq!(lcs_ranks(&big(&[0]), 4).unwrap(), big(&[1, 0, 0, 0]));
        assert_eq!(lcs_ranks(&big(&[0]), 0), Err(InvariantError::EmptyRange));
    }
}
