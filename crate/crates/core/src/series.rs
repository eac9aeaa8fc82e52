//! Truncated formal power series with exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::factorial;
use crate::error::{Error, Result};

/// Coefficients `a_0 … a_N` of a power series truncated after `x^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

fn rational_from(v: &num_bigint::BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v.clone()))
}

impl PowerSeries {
    /// Series with the given coefficients; the truncation order is `len − 1`.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series keeps at least a_0");
        PowerSeries { coeffs }
    }

    /// `e^x` truncated at `x^order`.
    pub fn exp(order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| BigRational::new(BigInt::one(), BigInt::from(factorial(k))))
            .collect();
        PowerSeries { coeffs }
    }

    /// `cosh x` truncated at `x^order`.
    pub fn cosh(order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| {
                if k % 2 == 0 {
                    BigRational::new(BigInt::one(), BigInt::from(factorial(k)))
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        PowerSeries { coeffs }
    }

    /// The monomial `c · x^power` truncated at `x^order`.
    pub fn monomial(c: BigRational, power: usize, order: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); order + 1];
        if power <= order {
            coeffs[power] = c;
        }
        PowerSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigRational> {
        self.coeffs
    }

    /// `n! · a_n` for every `n`, i.e. the EGF coefficients.
    pub fn egf_terms(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * rational_from(&factorial(n)))
            .collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &PowerSeries) -> Self {
        let order = self.order().min(other.order());
        PowerSeries {
            coeffs: (0..=order)
                .map(|k| &self.coeffs[k] + &other.coeffs[k])
                .collect(),
        }
    }

    pub fn sub(&self, other: &PowerSeries) -> Self {
        let order = self.order().min(other.order());
        PowerSeries {
            coeffs: (0..=order)
                .map(|k| &self.coeffs[k] - &other.coeffs[k])
                .collect(),
        }
    }

    pub fn mul(&self, other: &PowerSeries) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|n| {
                (0..=n)
                    .filter(|&k| !self.coeffs[k].is_zero() && !other.coeffs[n - k].is_zero())
                    .map(|k| &self.coeffs[k] * &other.coeffs[n - k])
                    .fold(BigRational::zero(), |acc, t| acc + t)
            })
            .collect();
        PowerSeries { coeffs }
    }

    /// `1 / f`, requiring `a_0 ≠ 0`.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::Domain(
                "reciprocal of a series with zero constant term".into(),
            ));
        }
        let inv0 = a0.recip();
        let mut out: Vec<BigRational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let mut acc = BigRational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &out[n - k];
                }
            }
            out.push(-(acc * &inv0));
        }
        Ok(PowerSeries { coeffs: out })
    }

    /// `log f` for a series with `a_0 = 1`.
    ///
    /// Uses `f · g' = f'` coefficientwise: `n g_n = n f_n − Σ_{k=1}^{n−1} k g_k f_{n−k}`.
    #[allow(clippy::needless_range_loop)]
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Domain(
                "exact series logarithm needs constant term 1".into(),
            ));
        }
        let mut out: Vec<BigRational> = Vec::with_capacity(self.coeffs.len());
        out.push(BigRational::zero());
        for n in 1..self.coeffs.len() {
            let mut acc = &self.coeffs[n] * BigInt::from(n);
            for k in 1..n {
                if !out[k].is_zero() && !self.coeffs[n - k].is_zero() {
                    acc -= &out[k] * &self.coeffs[n - k] * BigInt::from(k);
                }
            }
            out.push(acc / BigInt::from(n));
        }
        Ok(PowerSeries { coeffs: out })
    }

    pub fn neg(&self) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}
