//! Reference laws with closed-form moments and cumulants, and a seeded sampler.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Exp, Normal, Poisson, Uniform};

use crate::asymptotics::{efficiency_gap, ln_factorial, EfficiencyGap};
use crate::bounds::{bound_report, converse_profile, BoundReport, ConverseCheck};
use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::numeric;
use crate::transforms::{center_moments, cumulants_from_moments, MomentSequence, Scalar};

/// The closed registry of reference laws. Parameters are exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceLaw {
    /// `±1` with probability 1/2 each.
    Rademacher,
    /// `N(0, σ²)`; `σ = 0` is the point mass at 0.
    Gaussian {
        sigma: BigRational,
    },
    /// `P(X = 1) = p`, `P(X = 0) = 1 − p`.
    Bernoulli {
        p: BigRational,
    },
    Poisson {
        lambda: BigRational,
    },
    /// Density `λ e^{−λx}` on `x > 0`.
    Exponential {
        rate: BigRational,
    },
    /// Uniform on `[−a, a]`.
    Uniform {
        a: BigRational,
    },
}

/// What a law can supply exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub exact_moments: bool,
    pub exact_abs_moments: bool,
    pub exact_cumulants: bool,
    pub symmetric: bool,
    pub centered: bool,
    /// `E|X|^n = 1` for every `n`.
    pub unit_moment: bool,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn pow(x: &BigRational, n: usize) -> BigRational {
    num_traits::pow(x.clone(), n)
}

fn double_factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

impl ReferenceLaw {
    pub fn gaussian(sigma: BigRational) -> Result<Self> {
        let law = ReferenceLaw::Gaussian { sigma };
        law.validate()?;
        Ok(law)
    }

    pub fn bernoulli(p: BigRational) -> Result<Self> {
        let law = ReferenceLaw::Bernoulli { p };
        law.validate()?;
        Ok(law)
    }

    pub fn poisson(lambda: BigRational) -> Result<Self> {
        let law = ReferenceLaw::Poisson { lambda };
        law.validate()?;
        Ok(law)
    }

    pub fn exponential(rate: BigRational) -> Result<Self> {
        let law = ReferenceLaw::Exponential { rate };
        law.validate()?;
        Ok(law)
    }

    pub fn uniform(a: BigRational) -> Result<Self> {
        let law = ReferenceLaw::Uniform { a };
        law.validate()?;
        Ok(law)
    }

    /// The six laws with unit-scale parameters.
    pub fn registry() -> Vec<ReferenceLaw> {
        vec![
            ReferenceLaw::Rademacher,
            ReferenceLaw::Gaussian { sigma: int(1) },
            ReferenceLaw::Bernoulli {
                p: BigRational::new(1.into(), 2.into()),
            },
            ReferenceLaw::Poisson { lambda: int(1) },
            ReferenceLaw::Exponential { rate: int(1) },
            ReferenceLaw::Uniform { a: int(1) },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReferenceLaw::Rademacher => "rademacher",
            ReferenceLaw::Gaussian { .. } => "gaussian",
            ReferenceLaw::Bernoulli { .. } => "bernoulli",
            ReferenceLaw::Poisson { .. } => "poisson",
            ReferenceLaw::Exponential { .. } => "exponential",
            ReferenceLaw::Uniform { .. } => "uniform",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        match self {
            ReferenceLaw::Rademacher => Ok(()),
            ReferenceLaw::Gaussian { sigma } if sigma.is_negative() => bad("sigma must be >= 0"),
            ReferenceLaw::Bernoulli { p } if p.is_negative() || p > &int(1) => {
                bad("p must lie in [0, 1]")
            }
            ReferenceLaw::Poisson { lambda } if !lambda.is_positive() => bad("lambda must be > 0"),
            ReferenceLaw::Exponential { rate } if !rate.is_positive() => bad("rate must be > 0"),
            ReferenceLaw::Uniform { a } if a.is_negative() => bad("a must be >= 0"),
            _ => Ok(()),
        }
    }

    pub fn capabilities(&self) -> Capabilities {
        let symmetric = matches!(
            self,
            ReferenceLaw::Rademacher | ReferenceLaw::Gaussian { .. } | ReferenceLaw::Uniform { .. }
        );
        let unit_moment = match self {
            ReferenceLaw::Rademacher => true,
            ReferenceLaw::Bernoulli { p } => p.is_one(),
            _ => false,
        };
        Capabilities {
            exact_moments: true,
            exact_abs_moments: !matches!(self, ReferenceLaw::Gaussian { sigma } if !sigma.is_zero()),
            exact_cumulants: true,
            symmetric,
            centered: symmetric,
            unit_moment,
        }
    }

    /// `E[X]`.
    pub fn mean(&self) -> BigRational {
        match self {
            ReferenceLaw::Bernoulli { p } => p.clone(),
            ReferenceLaw::Poisson { lambda } => lambda.clone(),
            ReferenceLaw::Exponential { rate } => rate.recip(),
            _ => BigRational::zero(),
        }
    }
}

impl fmt::Display for ReferenceLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceLaw::Rademacher => write!(f, "rademacher"),
            ReferenceLaw::Gaussian { sigma } => write!(f, "gaussian:sigma={sigma}"),
            ReferenceLaw::Bernoulli { p } => write!(f, "bernoulli:p={p}"),
            ReferenceLaw::Poisson { lambda } => write!(f, "poisson:lambda={lambda}"),
            ReferenceLaw::Exponential { rate } => write!(f, "exponential:rate={rate}"),
            ReferenceLaw::Uniform { a } => write!(f, "uniform:a={a}"),
        }
    }
}

/// Parses `name` or `name:key=value`, e.g. `gaussian:sigma=2`, `poisson:lambda=3/2`.
/// A missing parameter takes its unit default.
impl FromStr for ReferenceLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let mut value: Option<(String, BigRational)> = None;
        for part in params.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected key=value, got '{part}'"))
            })?;
            let v = numeric::parse_rational(v)
                .ok_or_else(|| Error::InvalidParameter(format!("not a rational: '{v}'")))?;
            if value.is_some() {
                return Err(Error::InvalidParameter(
                    "each law takes one parameter".into(),
                ));
            }
            value = Some((k.trim().to_ascii_lowercase(), v));
        }
        let take = |keys: &[&str]| -> Result<BigRational> {
            match &value {
                None => Ok(int(1)),
                Some((k, v)) if keys.contains(&k.as_str()) => Ok(v.clone()),
                Some((k, _)) => Err(Error::InvalidParameter(format!(
                    "unknown parameter '{k}' for {name} (expected {})",
                    keys.join(" or ")
                ))),
            }
        };
        let law = match name.trim().to_ascii_lowercase().as_str() {
            "rademacher" => {
                if value.is_some() {
                    return Err(Error::InvalidParameter(
                        "rademacher takes no parameters".into(),
                    ));
                }
                ReferenceLaw::Rademacher
            }
            "gaussian" | "normal" => ReferenceLaw::Gaussian {
                sigma: take(&["sigma"])?,
            },
            "bernoulli" => ReferenceLaw::Bernoulli {
                p: match &value {
                    None => BigRational::new(1.into(), 2.into()),
                    Some(_) => take(&["p"])?,
                },
            },
            "poisson" => ReferenceLaw::Poisson {
                lambda: take(&["lambda"])?,
            },
            "exponential" => ReferenceLaw::Exponential {
                rate: take(&["rate", "lambda"])?,
            },
            "uniform" => ReferenceLaw::Uniform { a: take(&["a"])? },
            other => return Err(Error::InvalidParameter(format!("unknown law '{other}'"))),
        };
        law.validate()?;
        Ok(law)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("moment order must be >= 1".into()));
    }
    Ok(())
}

/// Raw moments `m_1 … m_n`, all exact.
pub fn law_moments(law: &ReferenceLaw, n: usize) -> Result<Vec<BigRational>> {
    law.validate()?;
    check_n(n)?;
    let values = match law {
        ReferenceLaw::Rademacher => (1..=n).map(|k| int((k % 2 == 0) as i64)).collect(),
        ReferenceLaw::Gaussian { sigma } => (1..=n)
            .map(|k| {
                if k % 2 == 1 {
                    BigRational::zero()
                } else {
                    pow(sigma, k) * double_factorial(k - 1)
                }
            })
            .collect(),
        ReferenceLaw::Bernoulli { p } => vec![p.clone(); n],
        ReferenceLaw::Poisson { lambda } => {
            // m_{k+1} = λ Σ_j C(k, j) m_j with m_0 = 1
            let mut m = vec![BigRational::one()];
            let mut row = vec![BigInt::one()];
            for k in 0..n {
                let s: BigRational = (0..=k).map(|j| &m[j] * &row[j]).sum();
                m.push(lambda * s);
                let mut next = vec![BigInt::one(); k + 2];
                for j in 1..=k {
                    next[j] = &row[j - 1] + &row[j];
                }
                row = next;
            }
            m.remove(0);
            m
        }
        ReferenceLaw::Exponential { rate } => (1..=n)
            .map(|k| BigRational::from_integer(BigInt::from(factorial(k))) / pow(rate, k))
            .collect(),
        ReferenceLaw::Uniform { a } => (1..=n)
            .map(|k| {
                if k % 2 == 1 {
                    BigRational::zero()
                } else {
                    pow(a, k) / int(k as i64 + 1)
                }
            })
            .collect(),
    };
    Ok(values)
}

pub fn law_moment(law: &ReferenceLaw, n: usize) -> Result<Scalar> {
    Ok(Scalar::Exact(law_moments(law, n)?.pop().expect("n >= 1")))
}

/// `E|X|^n`; float only for odd Gaussian orders.
pub fn law_abs_moment(law: &ReferenceLaw, n: usize) -> Result<Scalar> {
    law.validate()?;
    check_n(n)?;
    Ok(match law {
        ReferenceLaw::Rademacher => Scalar::Exact(int(1)),
        ReferenceLaw::Gaussian { sigma } => {
            if n.is_multiple_of(2) || sigma.is_zero() {
                Scalar::Exact(pow(sigma, n) * double_factorial(n.saturating_sub(1)))
            } else {
                // √(2/π) (n−1)!! σ^n
                let ln = 0.5 * (2.0 / std::f64::consts::PI).ln()
                    + numeric::ln_biguint(double_factorial(n - 1).magnitude())
                    + n as f64 * numeric::ln_abs_rational(sigma);
                Scalar::Approx(ln.exp())
            }
        }
        ReferenceLaw::Bernoulli { p } => Scalar::Exact(p.clone()),
        ReferenceLaw::Poisson { .. } | ReferenceLaw::Exponential { .. } => law_moment(law, n)?,
        ReferenceLaw::Uniform { a } => Scalar::Exact(pow(a, n) / int(n as i64 + 1)),
    })
}

/// `E|X − EX|^n`; exact for even orders, float for odd Poisson and
/// Exponential orders.
pub fn law_central_abs_moment(law: &ReferenceLaw, n: usize) -> Result<Scalar> {
    law.validate()?;
    check_n(n)?;
    if law.capabilities().centered {
        return law_abs_moment(law, n);
    }
    if n.is_multiple_of(2) {
        let central = center_moments(&MomentSequence::new(law_moments(law, n)?)?);
        return Ok(Scalar::Exact(central.moment(n).clone()));
    }
    Ok(match law {
        ReferenceLaw::Bernoulli { p } => {
            let q = int(1) - p;
            Scalar::Exact(p * pow(&q, n) + &q * pow(p, n))
        }
        ReferenceLaw::Poisson { lambda } => {
            Scalar::Approx(poisson_central_abs(numeric::to_f64(lambda), n))
        }
        ReferenceLaw::Exponential { rate } => {
            // ∫_1^∞ (y−1)^n e^{−y} dy = n!/e and ∫_0^1 u^n e^{u−1} du = e^{−1} Σ_k 1/(k!(n+k+1))
            let mut tail = 0.0;
            let mut inv_fact = 1.0;
            for k in 0..60 {
                if k > 0 {
                    inv_fact /= k as f64;
                }
                tail += inv_fact / (n + k + 1) as f64;
            }
            let ln_unit = -1.0 + (ln_factorial(n).exp() + tail).ln();
            Scalar::Approx((ln_unit - n as f64 * numeric::ln_abs_rational(rate)).exp())
        }
        _ => unreachable!("centered laws are handled above"),
    })
}

fn poisson_central_abs(lambda: f64, n: usize) -> f64 {
    let k_max = (lambda + 20.0 * (lambda + 1.0).sqrt() + 5.0 * n as f64 + 200.0) as usize;
    let mut total = 0.0;
    let mut ln_pmf = -lambda;
    for k in 0..=k_max {
        if k > 0 {
            ln_pmf += lambda.ln() - (k as f64).ln();
        }
        let d = (k as f64 - lambda).abs();
        if d > 0.0 {
            total += (ln_pmf + n as f64 * d.ln()).exp();
        }
    }
    total
}

/// Cumulants `κ_1 … κ_n` in closed form.
pub fn law_cumulants(law: &ReferenceLaw, n: usize) -> Result<Vec<BigRational>> {
    law.validate()?;
    check_n(n)?;
    Ok(match law {
        ReferenceLaw::Gaussian { sigma } => (1..=n)
            .map(|k| {
                if k == 2 {
                    pow(sigma, 2)
                } else {
                    BigRational::zero()
                }
            })
            .collect(),
        ReferenceLaw::Poisson { lambda } => vec![lambda.clone(); n],
        ReferenceLaw::Exponential { rate } => (1..=n)
            .map(|k| BigRational::from_integer(BigInt::from(factorial(k - 1))) / pow(rate, k))
            .collect(),
        _ => cumulants_from_moments(&law_moments(law, n)?)?,
    })
}

pub fn law_cumulant(law: &ReferenceLaw, n: usize) -> Result<Scalar> {
    Ok(Scalar::Exact(law_cumulants(law, n)?.pop().expect("n >= 1")))
}

/// Raw, absolute and central absolute moments up to `n` with the law's flags.
pub fn moment_sequence(law: &ReferenceLaw, n: usize) -> Result<MomentSequence> {
    let caps = law.capabilities();
    let abs = (1..=n)
        .map(|k| law_abs_moment(law, k))
        .collect::<Result<Vec<_>>>()?;
    let central = (1..=n)
        .map(|k| law_central_abs_moment(law, k))
        .collect::<Result<Vec<_>>>()?;
    MomentSequence::new(law_moments(law, n)?)?
        .with_abs_moments(abs)?
        .with_central_abs_moments(central)
        .map(|m| {
            m.with_mean_zero(caps.centered)
                .with_symmetric(caps.symmetric)
        })
}

/// Efficiency record for unit-moment laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitMomentCheck {
    pub gap: EfficiencyGap,
    /// `|κ_n / (2 (n−1)!)|^{−1/n}` at the largest even `n ≤ n_max`; `None`
    /// when that cumulant vanishes.
    pub empirical_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawCheck {
    pub law: ReferenceLaw,
    pub reports: Vec<BoundReport>,
    pub converse: Vec<ConverseCheck>,
    pub unit_moment: Option<UnitMomentCheck>,
}

impl LawCheck {
    /// Rows with `|κ_n|` above the bound (beyond float tolerance).
    pub fn violations(&self) -> Vec<&BoundReport> {
        self.reports
            .iter()
            .filter(|r| r.slack > 1.0 + crate::bounds::STRICT_TOL)
            .collect()
    }
}

/// Forward reports, converse checks and, for unit-moment laws, the
/// efficiency-gap record up to `n_max`.
pub fn verify_law(law: &ReferenceLaw, n_max: usize) -> Result<LawCheck> {
    let m = moment_sequence(law, n_max)?;
    let reports = bound_report(&m, n_max)?;
    let converse = converse_profile(&m);
    let unit_moment = if law.capabilities().unit_moment && n_max >= 2 {
        let even = n_max - n_max % 2;
        let kappa = &law_cumulants(law, even)?[even - 1];
        let empirical_rate = (!kappa.is_zero()).then(|| {
            let ln = numeric::ln_abs_rational(kappa) - 2f64.ln() - ln_factorial(even - 1);
            (-ln / even as f64).exp()
        });
        Some(UnitMomentCheck {
            gap: efficiency_gap(),
            empirical_rate,
        })
    } else {
        None
    };
    Ok(LawCheck {
        law: law.clone(),
        reports,
        converse,
        unit_moment,
    })
}

/// `count` i.i.d. draws from `law` using ChaCha8 seeded with `seed`.
pub fn sample(law: &ReferenceLaw, count: usize, seed: u64) -> Result<Vec<f64>> {
    law.validate()?;
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let param = |r: &BigRational| numeric::to_f64(r);
    let invalid = |e: &dyn fmt::Display| Error::InvalidParameter(e.to_string());
    let out = match law {
        ReferenceLaw::Rademacher => (0..count)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect(),
        ReferenceLaw::Gaussian { sigma } => {
            let d = Normal::new(0.0, param(sigma)).map_err(|e| invalid(&e))?;
            d.sample_iter(&mut rng).take(count).collect()
        }
        ReferenceLaw::Bernoulli { p } => {
            let d = Bernoulli::new(param(p)).map_err(|e| invalid(&e))?;
            d.sample_iter(&mut rng)
                .take(count)
                .map(|b| b as u8 as f64)
                .collect()
        }
        ReferenceLaw::Poisson { lambda } => {
            let d = Poisson::new(param(lambda)).map_err(|e| invalid(&e))?;
            d.sample_iter(&mut rng).take(count).collect()
        }
        ReferenceLaw::Exponential { rate } => {
            let d = Exp::new(param(rate)).map_err(|e| invalid(&e))?;
            d.sample_iter(&mut rng).take(count).collect()
        }
        ReferenceLaw::Uniform { a } => {
            let a = param(a);
            if a == 0.0 {
                vec![0.0; count]
            } else {
                let d = Uniform::new_inclusive(-a, a).map_err(|e| invalid(&e))?;
                d.sample_iter(&mut rng).take(count).collect()
            }
        }
    };
    Ok(out)
}

/// Plug-in raw and absolute moments `1 … n_max` of the empirical law.
///
/// The float estimates are stored as their exact rational values; absolute
/// moments are on the float path.
pub fn empirical_moments(samples: &[f64], n_max: usize) -> Result<MomentSequence> {
    if samples.is_empty() {
        return Err(Error::EmptySequence);
    }
    check_n(n_max)?;
    let count = samples.len() as f64;
    let mut raw = vec![0.0; n_max];
    let mut abs = vec![0.0; n_max];
    for &x in samples {
        let mut p = 1.0;
        for k in 0..n_max {
            p *= x;
            raw[k] += p;
            abs[k] += p.abs();
        }
    }
    let values = raw
        .iter()
        .map(|s| {
            numeric::from_f64(s / count)
                .ok_or_else(|| Error::InvalidParameter("non-finite sample moment".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    MomentSequence::new(values)?
        .with_abs_moments(abs.iter().map(|s| Scalar::Approx(s / count)).collect())
}
