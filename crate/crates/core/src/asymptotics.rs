//! Rate constants, leading-order asymptotics of the coefficient masses,
//! exact EGF expansions and the Rademacher efficiency gap.
//!
//! Each class has an EGF whose dominant singularity sits at `ρ`:
//!
//! ```text
//! All           1/(2 − e^x)        (ordered Bell numbers)   ρ = ln 2
//! NoSingletons  −log(2 − e^x + x)                           e^ρ = 2 + ρ
//! EvenBlocks    −log(2 − cosh x)                            ρ = arcosh 2
//! ```
//!
//! and `C_n ∼ A (n−1)!/ρ^n` with `A = 1`, `1`, `2` (even `n`) respectively.

use std::f64::consts::{FRAC_PI_2, LN_2};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{
    coefficient_mass, factorial, CoefficientTable, PartitionClass, Provenance,
};
use crate::error::{Error, Result};
use crate::numeric;
use crate::series::PowerSeries;
use crate::transforms::cumulants_from_moments;

/// Largest order accepted by [`egf_coefficients`].
pub const EGF_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConstant {
    pub class: PartitionClass,
    pub rho: f64,
    pub defining_equation: &'static str,
}

impl RateConstant {
    /// Residual of the defining equation at `rho`.
    pub fn residual(&self) -> f64 {
        match self.class {
            PartitionClass::All => self.rho.exp() - 2.0,
            PartitionClass::NoSingletons => self.rho.exp() - 2.0 - self.rho,
            PartitionClass::EvenBlocks => self.rho.cosh() - 2.0,
        }
    }
}

/// Root of `e^ρ = 2 + ρ` by Newton from 1.0, falling back to bisection on
/// `[1, 1.5]` whenever a step leaves the bracket.
pub fn solve_rho_cen() -> f64 {
    let f = |x: f64| x.exp() - 2.0 - x;
    let (mut lo, mut hi) = (1.0_f64, 1.5_f64);
    let mut x = 1.0_f64;
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = x - fx / (x.exp() - 1.0);
        let next = if step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= f64::EPSILON * x {
            return next;
        }
        x = next;
    }
    x
}

fn rho_cen() -> f64 {
    static RHO: OnceLock<f64> = OnceLock::new();
    *RHO.get_or_init(solve_rho_cen)
}

pub fn rate(class: PartitionClass) -> RateConstant {
    match class {
        PartitionClass::All => RateConstant {
            class,
            rho: LN_2,
            defining_equation: "e^rho = 2",
        },
        PartitionClass::NoSingletons => RateConstant {
            class,
            rho: rho_cen(),
            defining_equation: "e^rho = 2 + rho",
        },
        PartitionClass::EvenBlocks => RateConstant {
            class,
            rho: (2.0 + 3f64.sqrt()).ln(),
            defining_equation: "cosh rho = 2",
        },
    }
}

/// `ln((n−1)!)` as a sum of logs; exact enough for `n ≤ 10^4`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn prefactor(class: PartitionClass) -> f64 {
    match class {
        PartitionClass::EvenBlocks => 2.0,
        _ => 1.0,
    }
}

fn check_asymptotic_order(class: PartitionClass, n: usize) -> Result<()> {
    let ok = match class {
        PartitionClass::NoSingletons => n >= 2,
        _ => n >= 1,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidOrder { class, n })
    }
}

/// `ln(A (n−1)!/ρ^n)`; `−∞` for odd `n` in the symmetric class.
pub fn ln_asymptotic_coefficient(class: PartitionClass, n: usize) -> Result<f64> {
    check_asymptotic_order(class, n)?;
    if class == PartitionClass::EvenBlocks && n % 2 == 1 {
        return Ok(f64::NEG_INFINITY);
    }
    let rho = rate(class).rho;
    Ok(prefactor(class).ln() + ln_factorial(n - 1) - n as f64 * rho.ln())
}

/// `A (n−1)!/ρ^n` in float (may be `+∞` past the f64 range).
pub fn asymptotic_coefficient(class: PartitionClass, n: usize) -> Result<f64> {
    Ok(ln_asymptotic_coefficient(class, n)?.exp())
}

/// `C_n / (A (n−1)!/ρ^n)` for the admissible `n ≤ n_max`, as `(n, ratio)`.
///
/// The quotient `C_n/(n−1)!` is formed exactly and only then rounded, so the
/// ratio carries roughly `n · ε` relative error from the power of `ρ`.
pub fn ratio_diagnostic(class: PartitionClass, n_max: usize) -> Result<Vec<(usize, f64)>> {
    if n_max > 200 {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} exceeds 200"
        )));
    }
    let start = if class == PartitionClass::NoSingletons {
        2
    } else {
        1
    };
    let mut out = Vec::new();
    for n in start..=n_max {
        if let Some(ratio) = exact_asymptotic_ratio(class, n)? {
            out.push((n, ratio));
        }
    }
    Ok(out)
}

/// `C_n / (A (n−1)!/ρ^n)` at one order; `None` for odd symmetric orders.
pub fn exact_asymptotic_ratio(class: PartitionClass, n: usize) -> Result<Option<f64>> {
    check_asymptotic_order(class, n)?;
    if class == PartitionClass::EvenBlocks && n % 2 == 1 {
        return Ok(None);
    }
    let rho = rate(class).rho;
    let exact = BigRational::new(
        BigInt::from(coefficient_mass(class, n)),
        BigInt::from(factorial(n - 1)),
    );
    Ok(Some(
        numeric::to_f64(&exact) * (n as f64 * rho.ln()).exp() / prefactor(class),
    ))
}

/// `c_0 … c_N` of the class EGF, so that `n! c_n = C_n` for `n ≥ 1`.
///
/// For [`PartitionClass::All`] the series is `1/(2 − e^x)`, whose `n`-th term
/// is the ordered Bell number rather than `C_raw(n)`; see [`egf_table`].
pub fn egf_coefficients(class: PartitionClass, order: usize) -> Result<Vec<BigRational>> {
    if order > EGF_CAP {
        return Err(Error::SeriesCap {
            order,
            cap: EGF_CAP,
        });
    }
    let two = PowerSeries::monomial(BigRational::from_integer(2.into()), 0, order);
    let x = PowerSeries::monomial(BigRational::one(), 1, order);
    let series = match class {
        PartitionClass::All => two.sub(&PowerSeries::exp(order)).reciprocal()?,
        PartitionClass::NoSingletons => two.sub(&PowerSeries::exp(order)).add(&x).log()?.neg(),
        PartitionClass::EvenBlocks => two.sub(&PowerSeries::cosh(order)).log()?.neg(),
    };
    Ok(series.into_coeffs())
}

/// Coefficient masses `C_1 … C_N` read off the class EGF.
///
/// The raw masses come from the ordered Bell terms as `C_1 = 1`,
/// `C_n = 2 · Bell(n−1)`.
pub fn egf_table(class: PartitionClass, max_order: usize) -> Result<CoefficientTable> {
    let series_order = match class {
        PartitionClass::All => max_order.saturating_sub(1),
        _ => max_order,
    };
    let coeffs = egf_coefficients(class, series_order)?;
    let terms: Vec<BigUint> = PowerSeries::new(coeffs)
        .egf_terms()
        .into_iter()
        .map(|t| {
            assert!(t.is_integer() && !t.is_negative(), "EGF terms are counts");
            t.to_integer().to_biguint().expect("nonnegative")
        })
        .collect();
    let values = match class {
        PartitionClass::All => (1..=max_order)
            .map(|n| {
                if n == 1 {
                    BigUint::one()
                } else {
                    &terms[n - 1] * 2u32
                }
            })
            .collect(),
        _ => terms.into_iter().skip(1).collect(),
    };
    Ok(CoefficientTable::new(class, values, Provenance::EgfSeries))
}

/// `ρ/L`, the guaranteed CGF radius under `E|X|^n ≤ ... L^n` growth; `∞` at `L = 0`.
pub fn cgf_radius_lower_bound(rho: f64, l: f64) -> Result<f64> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive, got {rho}"
        )));
    }
    if !l.is_finite() || l < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "L must be nonnegative, got {l}"
        )));
    }
    if l == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(rho / l)
}

/// The `1/(e L)` radius obtainable from `n^n`-type coefficients.
pub fn crude_radius(l: f64) -> Result<f64> {
    cgf_radius_lower_bound(1.0 / std::f64::consts::E, l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyGap {
    pub rho_sym: f64,
    pub pi_half: f64,
    /// `ρ_sym / (π/2)`
    pub eta: f64,
}

pub fn efficiency_gap() -> EfficiencyGap {
    let rho_sym = rate(PartitionClass::EvenBlocks).rho;
    EfficiencyGap {
        rho_sym,
        pi_half: FRAC_PI_2,
        eta: rho_sym / FRAC_PI_2,
    }
}

/// Exact cumulants `κ_1 … κ_n` of the Rademacher law.
pub fn rademacher_cumulants(n: usize) -> Result<Vec<BigRational>> {
    let m: Vec<BigRational> = (1..=n)
        .map(|k| {
            if k % 2 == 0 {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    cumulants_from_moments(&m)
}

fn check_even(order: usize) -> Result<()> {
    if order < 2 || order % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "Rademacher rates need an even order >= 2, got {order}"
        )));
    }
    Ok(())
}

/// `|κ_{2m}/(2m)!|^{−1/(2m)}` at `order = 2m`.
///
/// This tends to `π/2` but only like `m^{1/(2m)}`.
pub fn rademacher_rate(order: usize) -> Result<f64> {
    check_even(order)?;
    let kappa = &rademacher_cumulants(order)?[order - 1];
    let ln = numeric::ln_abs_rational(kappa) - ln_factorial(order);
    Ok((-ln / order as f64).exp())
}

/// `|κ_{2m}/(2 (2m−1)!)|^{−1/(2m)}` at `order = 2m`, the rate with the
/// leading prefactor removed.
pub fn rademacher_normalized_rate(order: usize) -> Result<f64> {
    check_even(order)?;
    let kappa = &rademacher_cumulants(order)?[order - 1];
    let ln = numeric::ln_abs_rational(kappa) - 2f64.ln() - ln_factorial(order - 1);
    Ok((-ln / order as f64).exp())
}

/// `|κ_{2m}| / (2 (2m−1)! (2/π)^{2m})` at `order = 2m`.
pub fn rademacher_asymptotic_ratio(order: usize) -> Result<f64> {
    check_even(order)?;
    let kappa = &rademacher_cumulants(order)?[order - 1];
    let exact = BigRational::new(kappa.abs().to_integer(), BigInt::from(factorial(order - 1)));
    debug_assert!(kappa.is_integer());
    Ok(numeric::to_f64(&exact) * (order as f64 * FRAC_PI_2.ln()).exp() / 2.0)
}
