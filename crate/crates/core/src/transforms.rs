//! Moment ↔ cumulant conversion and joint cumulants from mixed moments.
//!
//! The univariate transforms use the triangular recurrences
//!
//! ```text
//! κ_n = m_n − Σ_{k=1}^{n−1} C(n−1, k−1) κ_k m_{n−k}
//! m_n =       Σ_{k=1}^{n}   C(n−1, k−1) κ_k m_{n−k},   m_0 = 1
//! ```
//!
//! which are equal to the partition sums `Σ_π (−1)^{|π|−1}(|π|−1)! Π_B m_|B|`
//! and `Σ_π Π_B κ_|B|`. Joint cumulants are evaluated directly from the
//! partition sum over labelled slots.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{enumerate_partitions, factorial};
use crate::error::{Error, Result};
use crate::numeric;

/// A moment value that is either exact or only known in floating point.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Approx(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => numeric::to_f64(r),
            Scalar::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(x) => *x == 0.0,
        }
    }

    /// Natural log of the magnitude, usable for values outside the f64 range.
    pub fn ln_abs(&self) -> f64 {
        match self {
            Scalar::Exact(r) => numeric::ln_abs_rational(r),
            Scalar::Approx(x) => x.abs().ln(),
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Approx(x)
    }
}

/// Raw moments `m_1 … m_n` with optional absolute moments and law flags.
///
/// `abs_values` holds `μ_k = E|X|^k`; `central_abs_values` holds
/// `μ_k^{(c)} = E|X − EX|^k`. When the mean is known to be zero the two coincide
/// and the central list may be omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    values: Vec<BigRational>,
    abs_values: Option<Vec<Scalar>>,
    central_abs_values: Option<Vec<Scalar>>,
    mean_known_zero: bool,
    symmetric: bool,
}

// relative slack for float checks of the moment inequalities
const FLOAT_CHECK_TOL: f64 = 1e-12;

impl MomentSequence {
    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(MomentSequence {
            values,
            abs_values: None,
            central_abs_values: None,
            mean_known_zero: false,
            symmetric: false,
        })
    }

    pub fn with_abs_moments(mut self, abs: Vec<Scalar>) -> Result<Self> {
        self.check_len(abs.len())?;
        self.abs_values = Some(abs);
        Ok(self)
    }

    pub fn with_central_abs_moments(mut self, abs: Vec<Scalar>) -> Result<Self> {
        self.check_len(abs.len())?;
        self.central_abs_values = Some(abs);
        Ok(self)
    }

    /// Sets the "known centered" flag; checked by [`MomentSequence::validate`].
    pub fn with_mean_zero(mut self, flag: bool) -> Self {
        self.mean_known_zero = flag;
        self
    }

    /// Sets the symmetry flag; checked by [`MomentSequence::validate`].
    pub fn with_symmetric(mut self, flag: bool) -> Self {
        self.symmetric = flag;
        self
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.values.len() {
            return Err(Error::LengthMismatch {
                left: self.values.len(),
                right: len,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// `m_n` for `1 ≤ n ≤ len`.
    pub fn moment(&self, n: usize) -> &BigRational {
        &self.values[n - 1]
    }

    pub fn abs_values(&self) -> Option<&[Scalar]> {
        self.abs_values.as_deref()
    }

    pub fn abs_moment(&self, n: usize) -> Option<&Scalar> {
        self.abs_values
            .as_ref()
            .and_then(|v| v.get(n.checked_sub(1)?))
    }

    /// `E|X − EX|^n`, falling back to `E|X|^n` when the mean is known to be zero.
    pub fn central_abs_moment(&self, n: usize) -> Option<&Scalar> {
        let idx = n.checked_sub(1)?;
        match &self.central_abs_values {
            Some(v) => v.get(idx),
            None if self.mean_known_zero => self.abs_values.as_ref()?.get(idx),
            None => None,
        }
    }

    pub fn mean_known_zero(&self) -> bool {
        self.mean_known_zero
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    /// Checks the flags and the moment inequalities.
    ///
    /// * symmetric ⇒ every odd raw moment is zero;
    /// * centered ⇒ `m_1 = 0`;
    /// * `|m_k| ≤ μ_k` (exact when both sides are exact);
    /// * Lyapunov: `μ_j^{1/j}` is non-decreasing in `j` (float, relative 1e−12).
    pub fn validate(&self) -> Result<()> {
        if self.symmetric {
            for (i, m) in self.values.iter().enumerate() {
                if (i + 1) % 2 == 1 && !m.is_zero() {
                    return Err(Error::SymmetryViolated(i + 1));
                }
            }
        }
        if self.mean_known_zero && !self.values[0].is_zero() {
            return Err(Error::MeanNotZero);
        }
        if let Some(abs) = &self.abs_values {
            for (i, (m, mu)) in self.values.iter().zip(abs).enumerate() {
                let ok = match mu {
                    Scalar::Exact(mu) => &m.abs() <= mu,
                    Scalar::Approx(mu) => {
                        mu.is_finite()
                            && *mu >= 0.0
                            && numeric::to_f64(&m.abs()) <= mu * (1.0 + FLOAT_CHECK_TOL)
                    }
                };
                if !ok {
                    return Err(Error::Inconsistent {
                        order: i + 1,
                        reason: "|m_k| exceeds the absolute moment".into(),
                    });
                }
            }
            check_lyapunov(abs)?;
        }
        if let Some(central) = &self.central_abs_values {
            check_lyapunov(central)?;
        }
        Ok(())
    }

    /// The float view `m_1 … m_n`.
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(numeric::to_f64).collect()
    }
}

fn check_lyapunov(abs: &[Scalar]) -> Result<()> {
    for j in 1..abs.len() {
        let lo = &abs[j - 1];
        let hi = &abs[j];
        if lo.is_zero() {
            continue;
        }
        if hi.is_zero() {
            return Err(Error::Inconsistent {
                order: j + 1,
                reason: "absolute moment vanishes after a nonzero one".into(),
            });
        }
        let lhs = lo.ln_abs() / j as f64;
        let rhs = hi.ln_abs() / (j + 1) as f64;
        if lhs > rhs + FLOAT_CHECK_TOL * lhs.abs().max(1.0) {
            return Err(Error::Inconsistent {
                order: j + 1,
                reason: "Lyapunov monotonicity of mu_j^(1/j) fails".into(),
            });
        }
    }
    Ok(())
}

/// Cumulants `κ_1 … κ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSequence {
    values: Vec<BigRational>,
}

impl CumulantSequence {
    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(CumulantSequence { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// `κ_n` for `1 ≤ n ≤ len`.
    pub fn kappa(&self, n: usize) -> &BigRational {
        &self.values[n - 1]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(numeric::to_f64).collect()
    }

    /// The first `n` cumulants.
    pub fn truncated(&self, n: usize) -> CumulantSequence {
        CumulantSequence {
            values: self.values[..n.min(self.values.len())].to_vec(),
        }
    }
}

fn binomial_rows(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![BigInt::one(); i + 1];
        for k in 1..i {
            row[k] = &rows[i - 1][k - 1] + &rows[i - 1][k];
        }
        rows.push(row);
    }
    rows
}

/// Cumulants from raw moments over exact rationals.
pub fn cumulants_from_moments(m: &[BigRational]) -> Result<Vec<BigRational>> {
    if m.is_empty() {
        return Err(Error::EmptySequence);
    }
    let binom = binomial_rows(m.len());
    let mut kappa: Vec<BigRational> = Vec::with_capacity(m.len());
    for n in 1..=m.len() {
        let mut value = m[n - 1].clone();
        for k in 1..n {
            let term = &kappa[k - 1] * &m[n - k - 1];
            if !term.is_zero() {
                value -= term * &binom[n - 1][k - 1];
            }
        }
        kappa.push(value);
    }
    Ok(kappa)
}

/// Raw moments from cumulants over exact rationals.
pub fn moments_from_cumulants(kappa: &[BigRational]) -> Result<Vec<BigRational>> {
    if kappa.is_empty() {
        return Err(Error::EmptySequence);
    }
    let binom = binomial_rows(kappa.len());
    // m[0] = 1
    let mut m: Vec<BigRational> = Vec::with_capacity(kappa.len() + 1);
    m.push(BigRational::one());
    for n in 1..=kappa.len() {
        let mut value = BigRational::zero();
        for k in 1..=n {
            let term = &kappa[k - 1] * &m[n - k];
            if !term.is_zero() {
                value += term * &binom[n - 1][k - 1];
            }
        }
        m.push(value);
    }
    m.remove(0);
    Ok(m)
}

/// `κ_1 … κ_n` of the law with raw moments `m`.
pub fn moments_to_cumulants(m: &MomentSequence) -> CumulantSequence {
    CumulantSequence {
        values: cumulants_from_moments(m.values()).expect("moment sequences are nonempty"),
    }
}

/// Raw moments with the given cumulants. Flags are left unset.
pub fn cumulants_to_moments(k: &CumulantSequence) -> MomentSequence {
    let values = moments_from_cumulants(k.values()).expect("cumulant sequences are nonempty");
    MomentSequence::new(values).expect("nonempty")
}

/// Raw moments of `X + c`: `E[(X+c)^k] = Σ_j C(k,j) c^{k−j} m_j`.
pub fn shift_moments(m: &[BigRational], c: &BigRational) -> Vec<BigRational> {
    let binom = binomial_rows(m.len());
    let mut powers = vec![BigRational::one()];
    for _ in 0..m.len() {
        let next = powers.last().expect("nonempty") * c;
        powers.push(next);
    }
    (1..=m.len())
        .map(|k| {
            let mut acc = &powers[k] * &binom[k][0];
            for j in 1..=k {
                acc += &m[j - 1] * &powers[k - j] * &binom[k][j];
            }
            acc
        })
        .collect()
}

/// Central raw moments `E[(X − m_1)^k]`; the result is flagged centered.
///
/// The absolute moments of the result are the central absolute moments of
/// the input when those were supplied.
pub fn center_moments(m: &MomentSequence) -> MomentSequence {
    let mean = m.moment(1).clone();
    let mut values = shift_moments(m.values(), &-mean);
    values[0] = BigRational::zero();
    let central_abs = match (&m.central_abs_values, m.mean_known_zero) {
        (Some(c), _) => Some(c.clone()),
        (None, true) => m.abs_values.clone(),
        (None, false) => None,
    };
    MomentSequence {
        values,
        abs_values: central_abs.clone(),
        central_abs_values: central_abs,
        mean_known_zero: true,
        symmetric: m.symmetric,
    }
}

/// Float mirror of [`cumulants_from_moments`].
pub fn moments_to_cumulants_f64(m: &[f64]) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut kappa: Vec<f64> = Vec::with_capacity(m.len());
    for n in 1..=m.len() {
        let mut value = m[n - 1];
        let mut binom = 1.0; // C(n-1, k-1)
        for k in 1..n {
            value -= binom * kappa[k - 1] * m[n - k - 1];
            binom = binom * (n - k) as f64 / k as f64;
        }
        kappa.push(value);
    }
    Ok(kappa)
}

/// Float mirror of [`moments_from_cumulants`].
pub fn cumulants_to_moments_f64(kappa: &[f64]) -> Result<Vec<f64>> {
    if kappa.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut m = vec![1.0];
    for n in 1..=kappa.len() {
        let mut value = 0.0;
        let mut binom = 1.0;
        for k in 1..=n {
            value += binom * kappa[k - 1] * m[n - k];
            binom = binom * (n - k) as f64 / k as f64;
        }
        m.push(value);
    }
    m.remove(0);
    Ok(m)
}

/// Exponent vector `ν = (ν_1, …, ν_d)` of a joint cumulant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    nu: Vec<u32>,
}

impl MultiIndex {
    pub fn new(nu: Vec<u32>) -> Result<Self> {
        if nu.is_empty() {
            return Err(Error::InvalidParameter("multi-index needs d >= 1".into()));
        }
        if nu.iter().all(|&v| v == 0) {
            return Err(Error::InvalidParameter(
                "multi-index needs total order >= 1".into(),
            ));
        }
        Ok(MultiIndex { nu })
    }

    pub fn nu(&self) -> &[u32] {
        &self.nu
    }

    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    /// Total order `N = Σ ν_j`.
    pub fn total(&self) -> usize {
        self.nu.iter().map(|&v| v as usize).sum()
    }

    /// Canonical slot map: the first `ν_1` slots belong to variable 0, and so on.
    pub fn slot_map(&self) -> Vec<usize> {
        self.nu
            .iter()
            .enumerate()
            .flat_map(|(j, &count)| std::iter::repeat_n(j, count as usize))
            .collect()
    }
}

/// Mixed moments `E[Π_j X_j^{e_j}]` keyed by exponent vector, plus optional
/// per-component absolute moments `E|X_j|^r` and `E|X_j − EX_j|^r`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MixedMomentTable {
    dim: usize,
    entries: HashMap<Vec<u32>, BigRational>,
    abs_moments: HashMap<(usize, u32), Scalar>,
    central_abs_moments: HashMap<(usize, u32), Scalar>,
}

impl MixedMomentTable {
    /// Empty table in `dim` variables with the zero-vector entry set to 1.
    pub fn new(dim: usize) -> Self {
        let mut entries = HashMap::new();
        entries.insert(vec![0; dim], BigRational::one());
        MixedMomentTable {
            dim,
            entries,
            abs_moments: HashMap::new(),
            central_abs_moments: HashMap::new(),
        }
    }

    /// Mixed moments of a finitely supported law up to total degree `max_degree`.
    ///
    /// `atoms` are `(probability, point)` pairs; probabilities must be positive
    /// and sum to one.
    pub fn from_atoms(atoms: &[(BigRational, Vec<BigRational>)], max_degree: u32) -> Result<Self> {
        let dim = atoms
            .first()
            .map(|(_, x)| x.len())
            .ok_or_else(|| Error::InvalidParameter("law without atoms".into()))?;
        if atoms.iter().any(|(_, x)| x.len() != dim) {
            return Err(Error::InvalidParameter(
                "atoms of different dimension".into(),
            ));
        }
        if atoms.iter().any(|(p, _)| !p.is_positive()) {
            return Err(Error::InvalidParameter(
                "atom probabilities must be positive".into(),
            ));
        }
        let total: BigRational = atoms.iter().map(|(p, _)| p.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}"
            )));
        }

        let mut table = MixedMomentTable::new(dim);
        for exps in exponent_vectors(dim, max_degree) {
            let value = atoms
                .iter()
                .map(|(p, x)| {
                    x.iter().zip(&exps).fold(p.clone(), |acc, (xi, &e)| {
                        acc * num_traits::pow(xi.clone(), e as usize)
                    })
                })
                .sum();
            table.entries.insert(exps, value);
        }
        for j in 0..dim {
            let mean: BigRational = atoms.iter().map(|(p, x)| p * &x[j]).sum();
            for r in 1..=max_degree {
                let abs: BigRational = atoms
                    .iter()
                    .map(|(p, x)| p * num_traits::pow(x[j].abs(), r as usize))
                    .sum();
                let central: BigRational = atoms
                    .iter()
                    .map(|(p, x)| p * num_traits::pow((&x[j] - &mean).abs(), r as usize))
                    .sum();
                table.abs_moments.insert((j, r), Scalar::Exact(abs));
                table
                    .central_abs_moments
                    .insert((j, r), Scalar::Exact(central));
            }
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn insert(&mut self, exponents: Vec<u32>, value: BigRational) -> Result<()> {
        if exponents.len() != self.dim {
            return Err(Error::LengthMismatch {
                left: self.dim,
                right: exponents.len(),
            });
        }
        self.entries.insert(exponents, value);
        Ok(())
    }

    pub fn insert_abs_moment(&mut self, component: usize, order: u32, value: Scalar) {
        self.abs_moments.insert((component, order), value);
    }

    pub fn insert_central_abs_moment(&mut self, component: usize, order: u32, value: Scalar) {
        self.central_abs_moments.insert((component, order), value);
    }

    pub fn get(&self, exponents: &[u32]) -> Result<&BigRational> {
        self.entries
            .get(exponents)
            .ok_or_else(|| Error::MissingMixedMoment(exponents.to_vec()))
    }

    /// `E|X_j|^order`.
    pub fn abs_moment(&self, component: usize, order: u32) -> Result<&Scalar> {
        self.abs_moments
            .get(&(component, order))
            .ok_or(Error::MissingAbsMoment(order as usize))
    }

    /// `E|X_j − EX_j|^order`.
    pub fn central_abs_moment(&self, component: usize, order: u32) -> Result<&Scalar> {
        self.central_abs_moments
            .get(&(component, order))
            .ok_or(Error::MissingCentralAbsMoment(order as usize))
    }

    /// Univariate moment sequence of one component, `E[X_j^k]` for `k ≤ n`.
    pub fn marginal(&self, component: usize, n: u32) -> Result<Vec<BigRational>> {
        (1..=n)
            .map(|k| {
                let mut e = vec![0; self.dim];
                e[component] = k;
                self.get(&e).cloned()
            })
            .collect()
    }
}

/// All exponent vectors in `dim` variables with total degree `≤ max_degree`.
pub fn exponent_vectors(dim: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == dim {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(dim, budget - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, max_degree, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// The joint cumulant `κ_ν` as the partition sum over the `N` labelled slots
/// of `ν` under the canonical slot map.
pub fn joint_cumulant(table: &MixedMomentTable, nu: &MultiIndex) -> Result<BigRational> {
    if nu.dim() != table.dim() {
        return Err(Error::LengthMismatch {
            left: table.dim(),
            right: nu.dim(),
        });
    }
    let slots = nu.slot_map();
    let n = slots.len();
    let partitions = enumerate_partitions(n, crate::combinatorics::PartitionClass::All)?;
    let factorials: Vec<BigInt> = (0..=n).map(|k| BigInt::from(factorial(k))).collect();

    let mut total = BigRational::zero();
    let mut exps = vec![0u32; table.dim()];
    for partition in partitions {
        let mut product = BigRational::one();
        for block in partition.blocks() {
            exps.iter_mut().for_each(|e| *e = 0);
            for &slot in block {
                exps[slots[slot]] += 1;
            }
            product *= table.get(&exps)?;
            if product.is_zero() {
                break;
            }
        }
        if product.is_zero() {
            continue;
        }
        let k = partition.len();
        let weight = &factorials[k - 1];
        if k % 2 == 1 {
            total += product * weight;
        } else {
            total -= product * weight;
        }
    }
    Ok(total)
}
