//! Forward cumulant bounds, converse envelope checks and the multivariate
//! extension.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::combinatorics::{
    bell_ordinary, coefficient_mass, enumerate_partitions, no_singleton_bell, PartitionClass,
};
use crate::error::{Error, Result};
use crate::numeric;
use crate::transforms::{
    center_moments, moments_to_cumulants, CumulantSequence, MixedMomentTable, MomentSequence,
    MultiIndex, Scalar,
};

/// Relative tolerance for float strictness verdicts.
pub const STRICT_TOL: f64 = 1e-9;

/// Result of a forward bound: either a number or the exact statement `κ_n = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForwardBound {
    Bound(f64),
    /// Odd order under symmetry: the cumulant vanishes identically.
    Vanishes,
}

impl ForwardBound {
    pub fn value(self) -> f64 {
        match self {
            ForwardBound::Bound(v) => v,
            ForwardBound::Vanishes => 0.0,
        }
    }

    pub fn vanishes(self) -> bool {
        matches!(self, ForwardBound::Vanishes)
    }
}

fn check_order(class: PartitionClass, n: usize) -> Result<bool> {
    let ok = match class {
        PartitionClass::All => n >= 1,
        PartitionClass::NoSingletons => n >= 2,
        PartitionClass::EvenBlocks => n >= 1,
    };
    if !ok {
        return Err(Error::InvalidOrder { class, n });
    }
    Ok(class == PartitionClass::EvenBlocks && n % 2 == 1)
}

/// `C · f` in float, going through logs when `C` leaves the f64 range.
fn scaled(coefficient: &BigUint, functional: f64) -> f64 {
    if functional == 0.0 {
        return 0.0;
    }
    let c = numeric::biguint_to_f64(coefficient);
    if c.is_finite() {
        c * functional
    } else {
        (numeric::ln_biguint(coefficient) + functional.ln()).exp()
    }
}

fn check_functional(f: f64) -> Result<()> {
    if !f.is_finite() || f < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "moment functional must be finite and nonnegative, got {f}"
        )));
    }
    Ok(())
}

/// `C_n(class) · functional`.
pub fn forward_bound(class: PartitionClass, n: usize, functional: f64) -> Result<ForwardBound> {
    check_functional(functional)?;
    if check_order(class, n)? {
        return Ok(ForwardBound::Vanishes);
    }
    Ok(ForwardBound::Bound(scaled(
        &coefficient_mass(class, n),
        functional,
    )))
}

/// Exact `C_n(class) · functional`; `None` means the cumulant vanishes.
pub fn forward_bound_exact(
    class: PartitionClass,
    n: usize,
    functional: &BigRational,
) -> Result<Option<BigRational>> {
    if functional.is_negative() {
        return Err(Error::InvalidParameter(
            "moment functional is negative".into(),
        ));
    }
    if check_order(class, n)? {
        return Ok(None);
    }
    let c = BigRational::from_integer(BigInt::from(coefficient_mass(class, n)));
    Ok(Some(c * functional))
}

/// Which inequality a report row evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// `C_raw(n) · E|X|^n`.
    Raw,
    /// `C_raw(n) · E|X − EX|^n`, the raw coefficient on the centered variable.
    RawCentral,
    /// `C_cen(n) · E|X − EX|^n`.
    Central,
    /// `C_sym(n) · E|X|^n` for symmetric X.
    Symmetric,
}

impl BoundKind {
    pub fn class(self) -> PartitionClass {
        match self {
            BoundKind::Raw | BoundKind::RawCentral => PartitionClass::All,
            BoundKind::Central => PartitionClass::NoSingletons,
            BoundKind::Symmetric => PartitionClass::EvenBlocks,
        }
    }

    pub fn functional(self) -> Functional {
        match self {
            BoundKind::Raw => Functional::Raw,
            BoundKind::RawCentral | BoundKind::Central => Functional::Central,
            BoundKind::Symmetric => Functional::Symmetric,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Raw => "raw",
            BoundKind::RawCentral => "raw-central",
            BoundKind::Central => "central",
            BoundKind::Symmetric => "symmetric",
        }
    }
}

/// The moment functional paired with a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Functional {
    /// `μ_n = E|X|^n`
    Raw,
    /// `μ_n^{(c)} = E|X − EX|^n`
    Central,
    /// `μ_n` of a symmetric law
    Symmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub order: usize,
    pub kind: BoundKind,
    /// Whether this row is the tightest bound the flags allow.
    pub tightest: bool,
    pub cumulant: BigRational,
    pub cumulant_abs: f64,
    pub coefficient: BigUint,
    pub functional_kind: Functional,
    pub functional: f64,
    pub bound: f64,
    /// `|κ_n| / bound`, with `0/0` read as 1.
    pub slack: f64,
    pub strict: bool,
    /// The odd-order symmetric row: `κ_n = 0` exactly.
    pub vanishes: bool,
    /// Whether strictness was decided in exact arithmetic.
    pub decided_exactly: bool,
}

fn make_report(
    order: usize,
    kind: BoundKind,
    cumulant: &BigRational,
    functional: &Scalar,
) -> Result<BoundReport> {
    let class = kind.class();
    let functional_f = functional.to_f64();
    check_functional(functional_f)?;
    let coefficient = coefficient_mass(class, order);
    let cumulant_abs = numeric::to_f64(&cumulant.abs());

    if check_order(class, order)? {
        if !cumulant.is_zero() {
            return Err(Error::Inconsistent {
                order,
                reason: "odd cumulant of a symmetric law is nonzero".into(),
            });
        }
        return Ok(BoundReport {
            order,
            kind,
            tightest: false,
            cumulant: cumulant.clone(),
            cumulant_abs,
            coefficient,
            functional_kind: kind.functional(),
            functional: functional_f,
            bound: 0.0,
            slack: 0.0,
            strict: false,
            vanishes: true,
            decided_exactly: true,
        });
    }

    let bound = scaled(&coefficient, functional_f);
    // n = 2 under centering or symmetry: κ_2 = E|X − EX|^2 identically
    let identity = order == 2 && matches!(kind, BoundKind::Central | BoundKind::Symmetric);

    let (strict, decided_exactly) = match functional {
        Scalar::Exact(f) => {
            let exact_bound = BigRational::from_integer(BigInt::from(coefficient.clone())) * f;
            (cumulant.abs() < exact_bound, true)
        }
        Scalar::Approx(_) => (cumulant_abs < bound * (1.0 - STRICT_TOL), false),
    };
    let strict = strict && !identity;

    let slack = if bound > 0.0 {
        cumulant_abs / bound
    } else if cumulant_abs == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };

    Ok(BoundReport {
        order,
        kind,
        tightest: false,
        cumulant: cumulant.clone(),
        cumulant_abs,
        coefficient,
        functional_kind: kind.functional(),
        functional: functional_f,
        bound,
        slack,
        strict,
        vanishes: false,
        decided_exactly,
    })
}

/// Every applicable bound for orders `1 ≤ n ≤ n_max`, tightest first per order.
///
/// Preference is symmetric > central > raw. Central rows need central absolute
/// moments (or absolute moments of a known-centered law); raw rows need
/// absolute moments. An order with no applicable bound is an error.
pub fn bound_report(m: &MomentSequence, n_max: usize) -> Result<Vec<BoundReport>> {
    m.validate()?;
    if n_max > m.len() {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} exceeds the {} supplied moments",
            m.len()
        )));
    }
    let kappa = moments_to_cumulants(m);
    let mut out = Vec::new();
    for n in 1..=n_max {
        let k = kappa.kappa(n);
        let mut rows = Vec::new();
        if m.symmetric() {
            let f = m.abs_moment(n).ok_or(Error::MissingAbsMoment(n))?;
            rows.push(make_report(n, BoundKind::Symmetric, k, f)?);
        }
        if let Some(fc) = m.central_abs_moment(n) {
            if n >= 2 {
                rows.push(make_report(n, BoundKind::Central, k, fc)?);
            }
            if n >= 2 && (!m.mean_known_zero() || m.abs_moment(n).is_none()) {
                rows.push(make_report(n, BoundKind::RawCentral, k, fc)?);
            }
        }
        if let Some(f) = m.abs_moment(n) {
            rows.push(make_report(n, BoundKind::Raw, k, f)?);
        }
        if rows.is_empty() {
            return Err(Error::MissingAbsMoment(n));
        }
        rows[0].tightest = true;
        out.extend(rows);
    }
    Ok(out)
}

/// `K_n = max_{1≤j≤n} |κ_j|^{n/j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantEnvelope {
    pub n: usize,
    pub value: f64,
}

/// Envelope at the full length of `k`.
pub fn envelope(k: &CumulantSequence) -> CumulantEnvelope {
    envelope_at(k, k.len())
}

/// Envelope of the first `n` cumulants.
pub fn envelope_at(k: &CumulantSequence, n: usize) -> CumulantEnvelope {
    let value = (1..=n.min(k.len()))
        .filter(|&j| !k.kappa(j).is_zero())
        .map(|j| (numeric::ln_abs_rational(k.kappa(j)) * n as f64 / j as f64).exp())
        .fold(0.0, f64::max);
    CumulantEnvelope { n, value }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverseCheck {
    pub n: usize,
    pub raw_ok: bool,
    pub central_ok: bool,
    /// `|m_n| / (B_n K_n)`
    pub raw_slack: f64,
    /// `|m_n^{(c)}| / (B_n^{(0)} K_n)`
    pub central_slack: f64,
}

// envelope powers are evaluated in float
const CONVERSE_TOL: f64 = 1e-12;

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `|m_n| ≤ B_n K_n` and `|m_n^{(c)}| ≤ B_n^{(0)} K_n` at `n = len`.
pub fn converse_check(k: &CumulantSequence, m: &MomentSequence) -> Result<ConverseCheck> {
    if k.len() != m.len() {
        return Err(Error::LengthMismatch {
            left: k.len(),
            right: m.len(),
        });
    }
    let n = m.len();
    let envelope = envelope_at(k, n).value;
    let raw = numeric::to_f64(&m.moment(n).abs());
    let central = numeric::to_f64(&center_moments(m).moment(n).abs());
    let raw_bound = numeric::biguint_to_f64(&bell_ordinary(n)) * envelope;
    let central_bound = numeric::biguint_to_f64(&no_singleton_bell(n)) * envelope;
    Ok(ConverseCheck {
        n,
        raw_ok: raw <= raw_bound * (1.0 + CONVERSE_TOL),
        central_ok: central <= central_bound * (1.0 + CONVERSE_TOL),
        raw_slack: ratio(raw, raw_bound),
        central_slack: ratio(central, central_bound),
    })
}

/// [`converse_check`] for every prefix `1 ≤ n ≤ len`.
pub fn converse_profile(m: &MomentSequence) -> Vec<ConverseCheck> {
    let k = moments_to_cumulants(m);
    (1..=m.len())
        .map(|n| {
            let prefix = MomentSequence::new(m.values()[..n].to_vec()).expect("nonempty");
            converse_check(&k.truncated(n), &prefix).expect("aligned lengths")
        })
        .collect()
}

/// `C_N(class) · Π_j f_j^{ν_j/N}`.
pub fn multivariate_bound(
    nu: &MultiIndex,
    functionals: &[f64],
    class: PartitionClass,
) -> Result<ForwardBound> {
    if functionals.len() != nu.dim() {
        return Err(Error::LengthMismatch {
            left: nu.dim(),
            right: functionals.len(),
        });
    }
    for &f in functionals {
        check_functional(f)?;
    }
    let n = nu.total();
    if check_order(class, n)? {
        return Ok(ForwardBound::Vanishes);
    }
    let product: f64 = nu
        .nu()
        .iter()
        .zip(functionals)
        .filter(|(&e, _)| e > 0)
        .map(|(&e, &f)| f.powf(e as f64 / n as f64))
        .product();
    Ok(ForwardBound::Bound(scaled(
        &coefficient_mass(class, n),
        product,
    )))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderCheck {
    pub holds: bool,
    /// Largest `Π_B |E[...]| / Π_j (E|X_j|^N)^{ν_j/N}` over all partitions.
    pub max_ratio: f64,
    pub partitions: usize,
}

// relative slack for the float comparison of the product collapse
const HOLDER_TOL: f64 = 1e-10;

/// Blockwise Hölder product collapse over every partition of the `N` slots.
pub fn holder_block_check(table: &MixedMomentTable, nu: &MultiIndex) -> Result<HolderCheck> {
    let slots = nu.slot_map();
    let n = slots.len();
    let mut ln_rhs = 0.0;
    let mut rhs_zero = false;
    for (j, &e) in nu.nu().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let mu = table.abs_moment(j, n as u32)?;
        if mu.is_zero() {
            rhs_zero = true;
        } else {
            ln_rhs += mu.ln_abs() * e as f64 / n as f64;
        }
    }

    let mut holds = true;
    let mut max_ratio: f64 = 0.0;
    let mut count = 0;
    let mut exps = vec![0u32; table.dim()];
    for partition in enumerate_partitions(n, PartitionClass::All)? {
        count += 1;
        let mut ln_lhs = 0.0;
        let mut lhs_zero = false;
        for block in partition.blocks() {
            exps.iter_mut().for_each(|e| *e = 0);
            for &s in block {
                exps[slots[s]] += 1;
            }
            let v = table.get(&exps)?;
            if v.is_zero() {
                lhs_zero = true;
            } else {
                ln_lhs += numeric::ln_abs_rational(v);
            }
        }
        if lhs_zero {
            continue;
        }
        if rhs_zero {
            holds = false;
            max_ratio = f64::INFINITY;
            continue;
        }
        let r = (ln_lhs - ln_rhs).exp();
        max_ratio = max_ratio.max(r);
        if r > 1.0 + HOLDER_TOL {
            holds = false;
        }
    }
    Ok(HolderCheck {
        holds,
        max_ratio,
        partitions: count,
    })
}
