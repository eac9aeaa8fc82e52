//! Bernstein-type tail bounds from the cumulant condition
//! `|κ_n| ≤ (n−1)! v b^{n−2}`, and the parameters obtained from the centered
//! coefficient family under the growth condition `E|X|^n ≤ v L^{n−2}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::asymptotics::rate;
use crate::combinatorics::{coefficient_mass, factorial, PartitionClass};
use crate::error::{Error, Result};
use crate::numeric;
use crate::transforms::{CumulantSequence, MomentSequence};

/// Default sweep depth for [`compute_a_cen`].
pub const DEFAULT_A_CEN_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinParams {
    v: f64,
    b: f64,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

impl BernsteinParams {
    pub fn new(v: f64, b: f64) -> Result<Self> {
        positive("v", v)?;
        positive("b", b)?;
        Ok(BernsteinParams { v, b })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Right end of the CGF domain `[0, 1/b)`.
    pub fn t_max(&self) -> f64 {
        1.0 / self.b
    }
}

/// `exp(−x²/(2(v + bx)))`, doubled when two-sided, capped at 1.
pub fn bernstein_tail(p: &BernsteinParams, x: f64, two_sided: bool) -> Result<f64> {
    positive("x", x)?;
    let one = (-x * x / (2.0 * (p.v + p.b * x))).exp();
    let value = if two_sided { 2.0 * one } else { one };
    Ok(value.min(1.0))
}

/// `v t² / (2(1 − bt))` for `0 ≤ t < 1/b`.
pub fn cgf_quadratic_bound(p: &BernsteinParams, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 || p.b * t >= 1.0 {
        return Err(Error::Domain(format!(
            "t = {t} outside [0, 1/b) with b = {}",
            p.b
        )));
    }
    Ok(p.v * t * t / (2.0 * (1.0 - p.b * t)))
}

/// The Chernoff parameter `t_x = x/(v + bx)`.
pub fn optimal_t(p: &BernsteinParams, x: f64) -> Result<f64> {
    positive("x", x)?;
    Ok(x / (p.v + p.b * x))
}

/// `−tx + vt²/(2(1 − bt))`, the Chernoff exponent under the quadratic bound.
pub fn chernoff_exponent(p: &BernsteinParams, x: f64, t: f64) -> Result<f64> {
    Ok(-t * x + cgf_quadratic_bound(p, t)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ACen {
    /// `max(1, max_n ratio_n)`
    pub value: f64,
    /// Order attaining the maximum ratio.
    pub argmax: usize,
    /// `(n, C_cen(n) ρ^n/(n−1)!)` for `2 ≤ n ≤ n_max`.
    pub ratios: Vec<(usize, f64)>,
}

/// `A_cen = max(1, max_{2≤n≤n_max} C_cen(n) ρ_cen^n/(n−1)!)`.
pub fn compute_a_cen(n_max: usize) -> Result<ACen> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "n_max must be >= 2, got {n_max}"
        )));
    }
    let rho = rate(PartitionClass::NoSingletons).rho;
    let ratios: Vec<(usize, f64)> = (2..=n_max)
        .map(|n| {
            let exact = BigRational::new(
                BigInt::from(coefficient_mass(PartitionClass::NoSingletons, n)),
                BigInt::from(factorial(n - 1)),
            );
            (n, numeric::to_f64(&exact) * rho.powi(n as i32))
        })
        .collect();
    let (argmax, max) = ratios
        .iter()
        .copied()
        .fold((2, f64::NEG_INFINITY), |best, (n, r)| {
            if r > best.1 {
                (n, r)
            } else {
                best
            }
        });
    Ok(ACen {
        value: max.max(1.0),
        argmax,
        ratios,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub v: f64,
    pub l: f64,
    pub a_cen: f64,
    /// `A_cen v / ρ_cen²`
    pub v_prime: f64,
    /// `L / ρ_cen`
    pub b: f64,
}

impl DerivedParams {
    pub fn bernstein(&self) -> BernsteinParams {
        BernsteinParams {
            v: self.v_prime,
            b: self.b,
        }
    }
}

/// `(v', b)` from the variance scale `v` and growth scale `L`.
pub fn derive_params(v: f64, l: f64, n_max: usize) -> Result<DerivedParams> {
    positive("v", v)?;
    positive("L", l)?;
    let rho = rate(PartitionClass::NoSingletons).rho;
    let a_cen = compute_a_cen(n_max)?.value;
    Ok(DerivedParams {
        v,
        l,
        a_cen,
        // (A/ρ²) is exactly 1 when the maximum sits at n = 2
        v_prime: (a_cen / rho.powi(2)) * v,
        b: l / rho,
    })
}

/// [`derive_params`] after checking `E|X − EX|^n ≤ v L^{n−2}` for `2 ≤ n ≤ len`.
pub fn derive_params_validated(
    v: f64,
    l: f64,
    n_max: usize,
    law: &MomentSequence,
) -> Result<DerivedParams> {
    positive("v", v)?;
    positive("L", l)?;
    for n in 2..=law.len() {
        let moment = law
            .central_abs_moment(n)
            .ok_or(Error::MissingCentralAbsMoment(n))?;
        let ln_limit = v.ln() + (n - 2) as f64 * l.ln();
        let ln_moment = moment.ln_abs();
        if !moment.is_zero() && ln_moment > ln_limit + 1e-12 * ln_limit.abs().max(1.0) {
            return Err(Error::MomentGrowth {
                order: n,
                moment: moment.to_f64(),
                limit: ln_limit.exp(),
            });
        }
    }
    derive_params(v, l, n_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub holds: bool,
    pub first_violation: Option<usize>,
    /// Orders where `|κ_n| = (n−1)! v b^{n−2}` exactly.
    pub equality_orders: Vec<usize>,
}

/// `|κ_n| ≤ (n−1)! v b^{n−2}` for `2 ≤ n ≤ len`, decided exactly on the
/// rational values of `v` and `b`.
pub fn cumulant_condition_check(
    k: &CumulantSequence,
    p: &BernsteinParams,
) -> Result<ConditionCheck> {
    if !k.kappa(1).is_zero() {
        return Err(Error::NotCentered(k.kappa(1).to_string()));
    }
    let v = numeric::from_f64(p.v).expect("finite");
    let b = numeric::from_f64(p.b).expect("finite");
    let mut first_violation = None;
    let mut equality_orders = Vec::new();
    let mut b_power = BigRational::from_integer(1.into());
    for n in 2..=k.len() {
        if n > 2 {
            b_power *= &b;
        }
        let rhs = BigRational::from_integer(BigInt::from(factorial(n - 1))) * &v * &b_power;
        let lhs = k.kappa(n).abs();
        if lhs > rhs {
            first_violation.get_or_insert(n);
        } else if lhs == rhs {
            equality_orders.push(n);
        }
    }
    Ok(ConditionCheck {
        holds: first_violation.is_none(),
        first_violation,
        equality_orders,
    })
}

/// `log E[e^{t(X − 1)}] = −t − log(1 − t)` for `X ~ Exponential(1)`, `t < 1`.
pub fn centered_exponential_cgf(t: f64) -> Result<f64> {
    if t >= 1.0 {
        return Err(Error::Domain(format!(
            "centered exponential CGF needs t < 1, got {t}"
        )));
    }
    Ok(-t - (-t).ln_1p())
}
