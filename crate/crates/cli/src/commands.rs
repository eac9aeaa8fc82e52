//! Subcommand bodies. Each builds an [`output::Record`]; usage problems come
//! back as [`CliError`] and failed inequality checks as record violations.

use std::str::FromStr;

use cumulant_bounds::asymptotics::{
    efficiency_gap, exact_asymptotic_ratio, ln_asymptotic_coefficient, rate,
};
use cumulant_bounds::bounds::{bound_report, converse_profile, envelope_at, STRICT_TOL};
use cumulant_bounds::combinatorics::{bell_ordinary, no_singleton_bell};
use cumulant_bounds::distributions::{
    empirical_moments, law_abs_moment, law_moment, moment_sequence, sample as draw, verify_law,
    ReferenceLaw,
};
use cumulant_bounds::numeric::{biguint_to_f64, parse_rational, to_f64};
use cumulant_bounds::tail::{
    bernstein_tail, compute_a_cen, derive_params, derive_params_validated, optimal_t,
    BernsteinParams,
};
use cumulant_bounds::transforms::{
    center_moments, cumulants_from_moments, moments_from_cumulants, moments_to_cumulants,
};
use cumulant_bounds::{BigRational, CoefficientTable, MomentSequence, PartitionClass, Scalar};
use num_traits::Signed;

use crate::output::{scientific_from_ln, Cell, Record, Row};

/// A usage error; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError(pub String);

impl From<cumulant_bounds::Error> for CliError {
    fn from(e: cumulant_bounds::Error) -> Self {
        CliError(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError(msg.into()))
}

/// Largest order accepted by `coeffs`.
pub const COEFFS_MAX_N: usize = 300;
/// Orders of `E|X − EX|^n ≤ v L^{n−2}` checked by `tail --derive --law`.
pub const LAW_CHECK_ORDERS: usize = 16;
/// Largest order accepted by `bound --law`, `sample` and `check`.
pub const LAW_MAX_N: usize = 64;
pub const SAMPLE_MAX_COUNT: usize = 10_000_000;

fn parse_rationals(flag: &str, text: &str) -> Result<Vec<BigRational>, CliError> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        match parse_rational(token) {
            Some(q) => out.push(q),
            None => return usage(format!("{flag}: cannot parse '{token}' as a rational")),
        }
    }
    Ok(out)
}

fn parse_floats(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError(format!("{flag}: cannot parse '{t}' as a number")))
        })
        .collect()
}

fn parse_law(text: &str) -> Result<ReferenceLaw, CliError> {
    ReferenceLaw::from_str(text).map_err(|e| {
        let names: Vec<String> = ReferenceLaw::registry()
            .iter()
            .map(|l| l.to_string())
            .collect();
        CliError(format!("{e}; registry: {}", names.join(", ")))
    })
}

fn check_law_order(n: usize) -> Result<(), CliError> {
    if n == 0 || n > LAW_MAX_N {
        return usage(format!("--max-n must lie in 1..={LAW_MAX_N}"));
    }
    Ok(())
}

fn classes(text: &str) -> Result<Vec<PartitionClass>, CliError> {
    if text == "all-three" {
        return Ok(PartitionClass::ALL.to_vec());
    }
    PartitionClass::from_str(text)
        .map(|c| vec![c])
        .map_err(|_| {
            CliError(format!(
                "unknown class '{text}'; expected raw, cen, sym or all-three"
            ))
        })
}

fn row(cells: impl IntoIterator<Item = (&'static str, Cell)>) -> Row {
    cells.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn nat(n: usize) -> Cell {
    Cell::Int(n.to_string())
}

pub fn coeffs(
    class: &str,
    max_n: usize,
    asymptotic: bool,
    scientific: bool,
) -> Result<Record, CliError> {
    let classes = classes(class)?;
    if !(2..=COEFFS_MAX_N).contains(&max_n) {
        return usage(format!("--max-n must lie in 2..={COEFFS_MAX_N}"));
    }
    let tables: Vec<CoefficientTable> = classes
        .iter()
        .map(|&c| CoefficientTable::from_recurrence(c, max_n))
        .collect();
    let mut record = Record::new("coeffs");
    record.scientific = scientific;
    for n in 2..=max_n {
        let mut r: Row = vec![("n".into(), nat(n))];
        for t in &tables {
            let c = t.class().short_name();
            r.push((c.into(), Cell::int(t.get(n).expect("table covers max_n"))));
        }
        if asymptotic {
            for t in &tables {
                let c = t.class().short_name();
                let ln = ln_asymptotic_coefficient(t.class(), n)?;
                let approx = ln.exp();
                let cell = if scientific || approx.is_infinite() {
                    Cell::Decimal(scientific_from_ln(ln))
                } else {
                    Cell::Float(approx)
                };
                r.push((format!("{c}_asymptotic"), cell));
                let ratio = exact_asymptotic_ratio(t.class(), n)?.map_or(Cell::Null, Cell::Float);
                r.push((format!("{c}_ratio"), ratio));
            }
        }
        record.push(r);
    }
    Ok(record)
}

pub fn transform(
    moments: Option<&str>,
    cumulants: Option<&str>,
    direction: Option<&str>,
) -> Result<Record, CliError> {
    let mut record = Record::new("transform");
    match (moments, cumulants, direction) {
        (Some(m), None, None | Some("to-cumulants")) => {
            let m = parse_rationals("--moments", m)?;
            let k = cumulants_from_moments(&m)?;
            for (i, (mi, ki)) in m.iter().zip(&k).enumerate() {
                record.push(row([
                    ("n", nat(i + 1)),
                    ("moment", Cell::rational(mi)),
                    ("cumulant", Cell::rational(ki)),
                ]));
            }
        }
        (Some(m), None, Some("center")) => {
            let m = MomentSequence::new(parse_rationals("--moments", m)?)?;
            let c = center_moments(&m);
            for n in 1..=m.len() {
                record.push(row([
                    ("n", nat(n)),
                    ("moment", Cell::rational(m.moment(n))),
                    ("central_moment", Cell::rational(c.moment(n))),
                ]));
            }
        }
        (None, Some(k), None | Some("to-moments")) => {
            let k = parse_rationals("--cumulants", k)?;
            let m = moments_from_cumulants(&k)?;
            for (i, (ki, mi)) in k.iter().zip(&m).enumerate() {
                record.push(row([
                    ("n", nat(i + 1)),
                    ("cumulant", Cell::rational(ki)),
                    ("moment", Cell::rational(mi)),
                ]));
            }
        }
        (_, _, Some(d)) if !["to-cumulants", "to-moments", "center"].contains(&d) => {
            return usage(format!(
                "unknown direction '{d}'; expected to-cumulants, to-moments or center"
            ));
        }
        (_, _, Some(d)) => {
            return usage(format!("direction '{d}' does not match the given input"));
        }
        _ => return usage("give exactly one of --moments or --cumulants"),
    }
    Ok(record)
}

pub enum BoundInput {
    Law(String),
    Moments {
        moments: String,
        abs: Option<String>,
        central_abs: Option<String>,
        symmetric: bool,
        centered: bool,
    },
}

fn exact_scalars(flag: &str, text: &str) -> Result<Vec<Scalar>, CliError> {
    Ok(parse_rationals(flag, text)?
        .into_iter()
        .map(Scalar::Exact)
        .collect())
}

pub fn bound(input: BoundInput, max_n: Option<usize>, converse: bool) -> Result<Record, CliError> {
    let m = match input {
        BoundInput::Law(text) => {
            let law = parse_law(&text)?;
            let n = max_n.unwrap_or(8);
            check_law_order(n)?;
            moment_sequence(&law, n)?
        }
        BoundInput::Moments {
            moments,
            abs,
            central_abs,
            symmetric,
            centered,
        } => {
            let values = parse_rationals("--moments", &moments)?;
            let mut m = MomentSequence::new(values)?;
            if let Some(a) = abs {
                m = m.with_abs_moments(exact_scalars("--abs-moments", &a)?)?;
            }
            if let Some(a) = central_abs {
                m = m.with_central_abs_moments(exact_scalars("--central-abs-moments", &a)?)?;
            }
            let m = m.with_mean_zero(centered).with_symmetric(symmetric);
            match max_n {
                Some(n) if n == 0 || n > m.len() => {
                    return usage(format!("--max-n must lie in 1..={}", m.len()));
                }
                Some(n) => truncate(&m, n)?,
                None => m,
            }
        }
    };
    let n_max = m.len();
    let mut record = Record::new("bound");
    for r in bound_report(&m, n_max)? {
        if r.slack > 1.0 + STRICT_TOL {
            record.violations.push(format!(
                "n = {}, {}: |kappa| = {} exceeds {}",
                r.order,
                r.kind.name(),
                r.cumulant_abs,
                r.bound
            ));
        }
        record.push(row([
            ("row_type", Cell::text("bound")),
            ("n", nat(r.order)),
            ("kind", Cell::text(r.kind.name())),
            ("tightest", Cell::Bool(r.tightest)),
            ("cumulant", Cell::rational(&r.cumulant)),
            ("cumulant_abs", Cell::Float(r.cumulant_abs)),
            ("coefficient", Cell::int(&r.coefficient)),
            ("functional_kind", Cell::text(functional_name(r.kind))),
            ("functional", Cell::Float(r.functional)),
            ("bound", Cell::Float(r.bound)),
            ("slack", Cell::Float(r.slack)),
            ("strict", Cell::Bool(r.strict)),
            ("vanishes", Cell::Bool(r.vanishes)),
        ]));
    }
    if converse {
        let k = moments_to_cumulants(&m);
        let centered = center_moments(&m);
        for c in converse_profile(&m) {
            let n = c.n;
            let envelope = envelope_at(&k, n).value;
            let raw_bell = bell_ordinary(n);
            let cen_bell = no_singleton_bell(n);
            let entries = [
                (
                    "converse-raw",
                    m.moment(n).abs(),
                    raw_bell,
                    c.raw_slack,
                    c.raw_ok,
                ),
                (
                    "converse-central",
                    centered.moment(n).abs(),
                    cen_bell,
                    c.central_slack,
                    c.central_ok,
                ),
            ];
            for (kind, moment, bell, slack, ok) in entries {
                if !ok {
                    record.violations.push(format!(
                        "n = {n}, {kind}: |m| = {} exceeds B K",
                        to_f64(&moment)
                    ));
                }
                record.push(row([
                    ("row_type", Cell::text(kind)),
                    ("n", nat(n)),
                    ("moment", Cell::rational(&moment)),
                    ("envelope", Cell::Float(envelope)),
                    ("bell", Cell::int(&bell)),
                    ("bound", Cell::Float(biguint_to_f64(&bell) * envelope)),
                    ("slack", Cell::Float(slack)),
                    ("ok", Cell::Bool(ok)),
                ]));
            }
        }
    }
    Ok(record)
}

fn functional_name(kind: cumulant_bounds::bounds::BoundKind) -> &'static str {
    use cumulant_bounds::bounds::Functional;
    match kind.functional() {
        Functional::Raw => "abs-moment",
        Functional::Central => "central-abs-moment",
        Functional::Symmetric => "abs-moment",
    }
}

fn truncate(m: &MomentSequence, n: usize) -> Result<MomentSequence, CliError> {
    let mut out = MomentSequence::new(m.values()[..n].to_vec())?;
    if let Some(a) = m.abs_values() {
        out = out.with_abs_moments(a[..n.min(a.len())].to_vec())?;
    }
    let central: Option<Vec<Scalar>> = (1..=n).map(|j| m.central_abs_moment(j).cloned()).collect();
    if let Some(c) = central {
        out = out.with_central_abs_moments(c)?;
    }
    Ok(out
        .with_mean_zero(m.mean_known_zero())
        .with_symmetric(m.symmetric()))
}

pub struct TailInput {
    pub v: Option<f64>,
    pub b: Option<f64>,
    pub x: Option<String>,
    pub two_sided: bool,
    pub derive: Option<String>,
    pub law: Option<String>,
    pub n_max: usize,
}

pub fn tail(input: TailInput) -> Result<Record, CliError> {
    let xs = match &input.x {
        Some(text) => parse_floats("--x", text)?,
        None => Vec::new(),
    };
    let mut record = Record::new("tail");
    let (params, derived) = match &input.derive {
        Some(text) => {
            let vl = parse_floats("--derive", text)?;
            let [v, l] = vl[..] else {
                return usage("--derive expects \"v,L\"");
            };
            let d = match &input.law {
                Some(law) => {
                    let law = parse_law(law)?;
                    let m = moment_sequence(&law, LAW_CHECK_ORDERS)?;
                    derive_params_validated(v, l, input.n_max, &m)?
                }
                None => derive_params(v, l, input.n_max)?,
            };
            let argmax = compute_a_cen(input.n_max)?.argmax;
            (d.bernstein(), Some((d, argmax)))
        }
        None => {
            let (Some(v), Some(b)) = (input.v, input.b) else {
                return usage("give --v and --b, or --derive v,L");
            };
            if xs.is_empty() {
                return usage("--x is required without --derive");
            }
            (BernsteinParams::new(v, b)?, None)
        }
    };
    let derived_cells = |r: &mut Row| {
        if let Some((d, argmax)) = &derived {
            r.push(("L".into(), Cell::Float(d.l)));
            r.push(("a_cen".into(), Cell::Float(d.a_cen)));
            r.push(("a_cen_argmax".into(), nat(*argmax)));
            r.push(("v_prime".into(), Cell::Float(d.v_prime)));
        }
    };
    let v_in = derived.as_ref().map_or(params.v(), |(d, _)| d.v);
    if xs.is_empty() {
        let mut r = row([("v", Cell::Float(v_in))]);
        derived_cells(&mut r);
        r.push(("b".into(), Cell::Float(params.b())));
        record.push(r);
    }
    for x in xs {
        let mut r = row([("x", Cell::Float(x)), ("v", Cell::Float(v_in))]);
        derived_cells(&mut r);
        r.push(("b".into(), Cell::Float(params.b())));
        r.push(("t_opt".into(), Cell::Float(optimal_t(&params, x)?)));
        r.push(("two_sided".into(), Cell::Bool(input.two_sided)));
        r.push((
            "tail".into(),
            Cell::Float(bernstein_tail(&params, x, input.two_sided)?),
        ));
        record.push(r);
    }
    Ok(record)
}

/// Digits after the point above which `f64` stops carrying information.
pub const RATES_MAX_PRECISION: usize = 16;

pub fn rates(precision: usize) -> Result<Record, CliError> {
    if precision > RATES_MAX_PRECISION {
        return usage(format!("--precision must be at most {RATES_MAX_PRECISION}"));
    }
    let mut record = Record::new("rates");
    let fixed = |x: f64| Cell::Decimal(format!("{x:.precision$}"));
    for (name, class) in [
        ("rho_raw", PartitionClass::All),
        ("rho_cen", PartitionClass::NoSingletons),
        ("rho_sym", PartitionClass::EvenBlocks),
    ] {
        let r = rate(class);
        record.push(row([
            ("name", Cell::text(name)),
            ("value", fixed(r.rho)),
            ("residual", Cell::Float(r.residual())),
            ("definition", Cell::text(r.defining_equation)),
        ]));
    }
    let gap = efficiency_gap();
    record.push(row([
        ("name", Cell::text("pi_half")),
        ("value", fixed(gap.pi_half)),
        ("residual", Cell::Null),
        ("definition", Cell::text("Rademacher cumulant rate")),
    ]));
    record.push(row([
        ("name", Cell::text("eta")),
        ("value", fixed(gap.eta)),
        ("residual", Cell::Null),
        ("definition", Cell::text("rho_sym / (pi/2)")),
    ]));
    Ok(record)
}

pub fn sample(law: &str, count: usize, seed: u64, max_n: usize) -> Result<Record, CliError> {
    let law = parse_law(law)?;
    check_law_order(max_n)?;
    if count == 0 || count > SAMPLE_MAX_COUNT {
        return usage(format!("--count must lie in 1..={SAMPLE_MAX_COUNT}"));
    }
    let xs = draw(&law, count, seed)?;
    let emp = empirical_moments(&xs, max_n)?;
    let mut record = Record::new("sample");
    for n in 1..=max_n {
        let abs = emp.abs_moment(n).map_or(f64::NAN, Scalar::to_f64);
        record.push(row([
            ("law", Cell::text(law.to_string())),
            ("n", nat(n)),
            ("count", nat(count)),
            ("seed", Cell::Int(seed.to_string())),
            ("empirical_moment", Cell::Float(to_f64(emp.moment(n)))),
            ("exact_moment", Cell::Float(law_moment(&law, n)?.to_f64())),
            ("empirical_abs_moment", Cell::Float(abs)),
            (
                "exact_abs_moment",
                Cell::Float(law_abs_moment(&law, n)?.to_f64()),
            ),
        ]));
    }
    Ok(record)
}

pub fn check(max_n: usize) -> Result<Record, CliError> {
    check_law_order(max_n)?;
    let mut record = Record::new("check");
    for law in ReferenceLaw::registry() {
        let report = verify_law(&law, max_n)?;
        let violations = report.violations();
        for v in &violations {
            record.violations.push(format!(
                "{law}: n = {}, {} bound exceeded",
                v.order,
                v.kind.name()
            ));
        }
        let converse_failures = report
            .converse
            .iter()
            .filter(|c| !c.raw_ok || !c.central_ok)
            .count();
        if converse_failures > 0 {
            record
                .violations
                .push(format!("{law}: {converse_failures} converse checks failed"));
        }
        let max_slack = report.reports.iter().map(|r| r.slack).fold(0.0, f64::max);
        let rate = report
            .unit_moment
            .and_then(|u| u.empirical_rate)
            .map_or(Cell::Null, Cell::Float);
        record.push(row([
            ("law", Cell::text(law.to_string())),
            ("max_n", nat(max_n)),
            ("bound_rows", nat(report.reports.len())),
            (
                "strict_rows",
                nat(report.reports.iter().filter(|r| r.strict).count()),
            ),
            ("max_slack", Cell::Float(max_slack)),
            ("violations", nat(violations.len())),
            ("converse_failures", nat(converse_failures)),
            ("unit_moment_rate", rate),
        ]));
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_lists_report_the_bad_token() {
        assert_eq!(
            parse_rationals("--moments", " 1, -2/3 ,0.5").unwrap().len(),
            3
        );
        let err = parse_rationals("--moments", "1,2/0,3").unwrap_err();
        assert!(err.0.contains("'2/0'"), "{}", err.0);
    }

    #[test]
    fn class_names() {
        assert_eq!(classes("all-three").unwrap().len(), 3);
        assert_eq!(classes("cen").unwrap(), vec![PartitionClass::NoSingletons]);
        assert!(classes("odd").is_err());
    }

    #[test]
    fn oversized_requests_are_usage_errors() {
        assert!(coeffs("raw", COEFFS_MAX_N + 1, false, false).is_err());
        assert!(rates(RATES_MAX_PRECISION + 1).is_err());
        assert!(check(LAW_MAX_N + 1).is_err());
    }
}
