//! Independent checks on every solution the crate produces, and an audit of
//! the commonly printed coefficient formulas against the ones derived from
//! the reduced field.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closed_form::{h_function, ln_h, model_b_r2_profile, ClosedFormSolution, CubicShape};
use crate::constitutive::ConstitutiveModel;
use crate::error::{Error, Result};
use crate::par;
use crate::profile::{
    closed_form_profile, closed_form_stress, integrate_on_grid, integrate_profile, measure_width, quadrature_profile,
    sample_slopes, stress_grid, IntegratorConfig, Method, Profile, UnitPoint, DEFAULT_SAMPLES,
};
use crate::wave::{
    existence_gate, find_equilibria, integration_constant, reduced_field, wave_speed_squared, BoundaryStates,
    ReducedField, SpeedSign, Stability, WaveProblem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `measured <= tolerance` (target is zero).
    AtMost,
    /// `|measured − target| <= tolerance`.
    Within,
    /// `measured >= target`; negative controls that must fail loudly.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub rule: Rule,
    pub target: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self::build(name.into(), Rule::AtMost, 0.0, measured, tolerance)
    }

    pub fn within(name: impl Into<String>, target: f64, measured: f64, tolerance: f64) -> Self {
        Self::build(name.into(), Rule::Within, target, measured, tolerance)
    }

    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::build(name.into(), Rule::AtLeast, bound, measured, 0.0)
    }

    /// A boolean property, recorded as `1` (holds) or `0` against target `1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::build(name.into(), Rule::Within, 1.0, if ok { 1.0 } else { 0.0 }, 0.0)
    }

    /// A check whose computation failed.
    pub fn errored(name: impl Into<String>, err: &Error) -> Self {
        Check {
            name: name.into(),
            rule: Rule::AtMost,
            target: 0.0,
            measured: f64::MAX,
            tolerance: 0.0,
            passed: false,
            note: Some(err.to_string()),
        }
    }

    fn build(name: String, rule: Rule, target: f64, measured: f64, tolerance: f64) -> Self {
        let passed = measured.is_finite()
            && match rule {
                Rule::AtMost => measured <= tolerance,
                Rule::Within => (measured - target).abs() <= tolerance,
                Rule::AtLeast => measured >= target,
            };
        // keep the report free of NaN/inf
        let measured = if measured.is_finite() { measured } else { f64::MAX };
        Check { name, rule, target, measured, tolerance, passed, note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// One printed formula compared against its derivation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub location: String,
    pub printed: String,
    pub derived: String,
    pub adopted: String,
    /// Printed formula evaluated at the probe configuration.
    pub printed_value: f64,
    pub derived_value: f64,
    /// Set when the printed and derived values disagree.
    pub flagged: bool,
}

/// Relative disagreement above which an audit entry is flagged.
pub const AUDIT_TOL: f64 = 1e-9;

impl AuditEntry {
    fn compare(
        location: &str,
        printed: &str,
        derived: &str,
        printed_value: f64,
        derived_value: f64,
        adopted_if_flagged: &str,
    ) -> Self {
        let scale = printed_value.abs().max(derived_value.abs()).max(f64::MIN_POSITIVE);
        let flagged = !((printed_value - derived_value).abs() <= AUDIT_TOL * scale);
        AuditEntry {
            location: location.into(),
            printed: printed.into(),
            derived: derived.into(),
            adopted: if flagged { adopted_if_flagged.into() } else { "printed (agrees with derivation)".into() },
            printed_value,
            derived_value,
            flagged,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub audit: Vec<AuditEntry>,
}

impl ValidationReport {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
        self.audit.extend(other.audit);
    }

    /// Sorts checks by name and audit entries by location (stable).
    pub fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.audit.sort_by(|a, b| a.location.cmp(&b.location));
        self.audit.dedup_by(|a, b| a.location == b.location);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn discrepancies(&self) -> impl Iterator<Item = &AuditEntry> {
        self.audit.iter().filter(|a| a.flagged)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report contains only finite numbers and strings")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "ok  " } else { "FAIL" };
            let _ = write!(out, "{status} {:<52} measured={:.3e}", c.name, c.measured);
            let _ = match c.rule {
                Rule::AtMost => write!(out, " tol={:.1e}", c.tolerance),
                Rule::Within => write!(out, " target={} tol={:.1e}", c.target, c.tolerance),
                Rule::AtLeast => write!(out, " min={:.1e}", c.target),
            };
            if let Some(n) = &c.note {
                let _ = write!(out, " ({n})");
            }
            out.push('\n');
        }
        let flagged: Vec<_> = self.discrepancies().collect();
        let _ = writeln!(out, "\n{} printed formulas audited, {} flagged:", self.audit.len(), flagged.len());
        for a in flagged {
            let _ = writeln!(
                out,
                "  {}: printed {} ; derived {} ; adopted {}",
                a.location, a.printed, a.derived, a.adopted
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "\n{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

/// `|dT/dξ − f(T)|` maximized over 501 points of `[−10d, 10d]`, with the
/// derivative from a five-point central difference of step `1e−5·d`.
pub fn residual_of<F>(stress: F, field: &ReducedField, d: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let h = 1e-5 * d;
    let mut worst: f64 = 0.0;
    for i in 0..=500 {
        let xi = -10.0 * d + 20.0 * d * i as f64 / 500.0;
        let d1 = (-stress(xi + 2.0 * h)? + 8.0 * stress(xi + h)? - 8.0 * stress(xi - h)? + stress(xi - 2.0 * h)?)
            / (12.0 * h);
        worst = worst.max((d1 - field.eval(stress(xi)?)?).abs());
    }
    Ok(worst)
}

pub fn residual_check_solution(solution: &ClosedFormSolution, field: &ReducedField) -> Result<f64> {
    let d = solution.effective_width()?;
    residual_of(|xi| closed_form_stress(solution, &field.boundary, xi), field, d)
}

/// `|T' − f(T)|` over the samples of a profile, with `T'` from five-point
/// Lagrange stencils on the sample grid.
pub fn residual_check_profile(profile: &Profile, field: &ReducedField) -> Result<f64> {
    let slopes = sample_slopes(&profile.samples);
    let mut worst: f64 = 0.0;
    for (s, d1) in profile.samples.iter().zip(slopes) {
        worst = worst.max((d1 - field.eval(s.t)?).abs());
    }
    Ok(worst)
}

pub const RESIDUAL_TOL: f64 = 1e-5;

/// Sample spacing, in widths, below which stencil error stays far under
/// [`RESIDUAL_TOL`].
pub const CHECK_SPACING: f64 = 1e-2;

/// Samples needed on `config`'s domain for a spacing of [`CHECK_SPACING`]`·d`.
fn check_samples(field: &ReducedField, config: &IntegratorConfig) -> Result<usize> {
    let span = (config.xi_max - config.xi_min) / field.width()?;
    Ok((span / CHECK_SPACING).ceil() as usize + 1)
}

/// Computes a profile by `method` (the closed form when available if
/// `None`, otherwise the ODE) and rejects it unless its residual is within
/// [`RESIDUAL_TOL`]. Quadrature profiles use `config.samples` grid stresses.
/// Output grids coarser than [`CHECK_SPACING`] are checked on a finer rerun
/// of the same method, so the verdict does not depend on output resolution.
pub fn verified_profile(field: &ReducedField, method: Option<Method>, config: &IntegratorConfig) -> Result<Profile> {
    let method = match method {
        Some(m) => m,
        None => match ClosedFormSolution::for_field(field) {
            Ok(_) => Method::ClosedForm,
            Err(Error::NoClosedForm(_)) => Method::Ode,
            Err(e) => return Err(e),
        },
    };
    let (profile, residual) = match method {
        Method::ClosedForm => {
            let sol = ClosedFormSolution::for_field(field)?;
            let p = closed_form_profile(&sol, field, config)?;
            (p, residual_check_solution(&sol, field)?)
        }
        Method::Ode => {
            let p = integrate_profile(field, config)?;
            let check = check_samples(field, config)?;
            let r = if check > config.samples {
                residual_check_profile(
                    &integrate_profile(field, &IntegratorConfig { samples: check, ..*config })?,
                    field,
                )?
            } else {
                residual_check_profile(&p, field)?
            };
            (p, r)
        }
        Method::Quadrature => {
            let p = quadrature_profile(field, &stress_grid(&field.boundary, config.samples | 1))?;
            let check = check_samples(field, config)?.max(DEFAULT_SAMPLES);
            let r = if check > config.samples {
                residual_check_profile(&quadrature_profile(field, &stress_grid(&field.boundary, check | 1))?, field)?
            } else {
                residual_check_profile(&p, field)?
            };
            (p, r)
        }
    };
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::ResidualCheck { residual, tolerance: RESIDUAL_TOL });
    }
    Ok(profile)
}
/// Negative controls must miss by at least this factor of [`RESIDUAL_TOL`].
pub const CONTROL_MARGIN: f64 = 1e3;

/// Deliberately wrong solutions that [`residual_of`] must reject: the
/// reflected logistic `T(−ξ)` and a logistic with twice the rate.
pub fn negative_controls(nu: f64) -> Result<Vec<Check>> {
    let m = ConstitutiveModel::Quadratic { gp0: 1.0, gpp0: -0.6 };
    let field = reduced_field(&WaveProblem::normalized(m, nu, SpeedSign::Positive)?)?;
    let sol = ClosedFormSolution::for_field(&field)?;
    let ClosedFormSolution::Logistic { a2 } = sol else {
        return Err(Error::NoClosedForm("expected the logistic wave".into()));
    };
    let d = sol.effective_width()?;
    let bound = CONTROL_MARGIN * RESIDUAL_TOL;
    let flipped = residual_of(|xi| sol.stress(-xi), &field, d)?;
    let fast = ClosedFormSolution::Logistic { a2: 2.0 * a2 };
    let wrong_rate = residual_of(|xi| fast.stress(xi), &field, d)?;
    let constant = residual_of(|_| Ok(1.0), &field, d)?;
    Ok(vec![
        Check::at_least("control/reflected-logistic", flipped, bound),
        Check::at_least("control/doubled-rate-logistic", wrong_rate, bound),
        Check::at_most("control/constant-equilibrium", constant, 1e-12),
    ])
}

/// `c²·[g(T⁻) − g(T⁺)] = T⁻ − T⁺` and `f(T⁻) = f(T⁺) = 0` with the
/// integration constant from the boundary states.
pub fn speed_consistency_check(model: &ConstitutiveModel, boundary: &BoundaryStates) -> Check {
    let name = format!("speed/{}", model.name());
    let run = || -> Result<f64> {
        let c2 = wave_speed_squared(model, boundary)?;
        let gm = model.eval(boundary.t_minus)?;
        let gp = model.eval(boundary.t_plus)?;
        let identity = (c2 * (gm - gp) - (boundary.t_minus - boundary.t_plus)).abs();
        let a = integration_constant(model, boundary, c2)?;
        // νc f(T) = T − c² g(T) − A
        let end_m = (boundary.t_minus - c2 * gm - a).abs();
        let end_p = (boundary.t_plus - c2 * gp - a).abs();
        Ok(identity.max(end_m).max(end_p) / boundary.jump().max(1.0))
    };
    match run() {
        Ok(v) => Check::at_most(name, v, 1e-12),
        Err(e) => Check::errored(name, &e),
    }
}

pub const DERIVATIVE_AUDIT_POINTS: usize = 1000;
pub const DERIVATIVE_AUDIT_TOL: f64 = 1e-6;
pub const DERIVATIVE_AUDIT_SEED: u64 = 0x6b696e6b;
/// Points this close to `T = 0` are skipped; laws with `|T|` are only
/// one-sided differentiable there.
pub const KINK_EXCLUSION: f64 = 1e-3;

fn five_point(f: &impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    Ok((-f(x + 2.0 * h)? + 8.0 * f(x + h)? - 8.0 * f(x - h)? + f(x - 2.0 * h)?) / (12.0 * h))
}

/// Five-point one-sided difference on `[x, x + 4h]`.
fn forward_five_point(f: &impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let v = |k: f64| f(x + k * h);
    Ok((-25.0 * v(0.0)? + 48.0 * v(1.0)? - 36.0 * v(2.0)? + 16.0 * v(3.0)? - 3.0 * v(4.0)?) / (12.0 * h))
}

/// Five-point differences at steps `h` and `2h`, Richardson-combined.
fn richardson(f: &impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let fine = five_point(f, x, h)?;
    let coarse = five_point(f, x, 2.0 * h)?;
    Ok(fine + (fine - coarse) / 15.0)
}

/// Analytic `g'`, `g''`, `g'''` against differences of the next lower order
/// at seeded random points of `[−5, 5]`; one check per order with the worst
/// error relative to `max(|analytic|, 1)`.
pub fn derivative_audit(model: &ConstitutiveModel, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<f64> = (0..DERIVATIVE_AUDIT_POINTS)
        .map(|_| rng.random_range(-5.0..5.0))
        .filter(|t: &f64| t.abs() >= KINK_EXCLUSION)
        .collect();
    (1..=3u8)
        .map(|order| {
            let name = format!("derivative/{}/order-{order}", model.name());
            let lower = |t: f64| if order == 1 { model.eval(t) } else { model.derivative(t, order - 1) };
            let mut worst: f64 = 0.0;
            for &t in &points {
                // keep the stencil on one side of T = 0
                let h = (1e-3 * t.abs().max(1.0)).min(0.2 * t.abs());
                let res = model.derivative(t, order).and_then(|a| Ok((a, richardson(&lower, t, h)?)));
                match res {
                    Ok((a, fd)) => worst = worst.max((a - fd).abs() / a.abs().max(1.0)),
                    Err(e) => return Check::errored(name, &e),
                }
            }
            Check::at_most(name, worst, DERIVATIVE_AUDIT_TOL)
        })
        .collect()
}

pub const EIGENVALUE_AUDIT_TOL: f64 = 1e-8;

/// Equilibrium eigenvalues `f'(T*)` against a difference quotient of `f`.
pub fn eigenvalue_audit(field: &ReducedField) -> Check {
    let name = format!("eigenvalue/{}", field.model.name());
    let run = || -> Result<f64> {
        let rep = find_equilibria(field, field.default_search_interval())?;
        let f = |t: f64| field.eval(t);
        let mut worst: f64 = 0.0;
        for e in &rep.equilibria {
            let h = 1e-3;
            // at the kink of |T| use the right-hand difference, as the analytic side does
            let fd = if e.value.abs() < 4.0 * h {
                let fine = forward_five_point(&f, e.value, 0.25 * h)?;
                fine + (fine - forward_five_point(&f, e.value, 0.5 * h)?) / 15.0
            } else {
                richardson(&f, e.value, h)?
            };
            worst = worst.max((e.eigenvalue - fd).abs() / e.eigenvalue.abs().max(1.0));
        }
        Ok(worst)
    };
    match run() {
        Ok(v) => Check::at_most(name, v, EIGENVALUE_AUDIT_TOL),
        Err(e) => Check::errored(name, &e),
    }
}

/// `νc · d(ln H)/dT = 1/f(T)` on `(0, 1)`, plus `H(1) = 0` and `H(1e−6) > 1e6`.
pub fn h_function_checks(nu: f64) -> Vec<Check> {
    let run = || -> Result<f64> {
        let field =
            reduced_field(&WaveProblem::normalized(ConstitutiveModel::ModelB { r: 2.0 }, nu, SpeedSign::Positive)?)?;
        let ClosedFormSolution::ModelBR2 { c, .. } = model_b_r2_profile(nu, SpeedSign::Positive)? else {
            unreachable!()
        };
        let lnh = |t: f64| Ok(ln_h(UnitPoint::new(t)));
        let mut worst: f64 = 0.0;
        for i in 1..100 {
            let t = i as f64 / 100.0;
            let h = 1e-4 * t.min(1.0 - t);
            let d = five_point(&lnh, t, h)?;
            worst = worst.max((nu * c * d * field.eval(t)? - 1.0).abs());
        }
        Ok(worst)
    };
    let deriv = match run() {
        Ok(v) => Check::at_most("modelB-r2/h-function-derivative", v, 1e-6),
        Err(e) => Check::errored("modelB-r2/h-function-derivative", &e),
    };
    vec![
        deriv,
        Check::holds("modelB-r2/h-function-root-at-one", h_function(1.0).is_ok_and(|h| h == 0.0)),
        Check::holds("modelB-r2/h-function-blows-up-at-zero", h_function(1e-6).is_ok_and(|h| h > 1e6)),
    ]
}

fn p2(x: f64) -> f64 {
    x * x
}

/// Printed coefficient formulas for one family, evaluated at a fixed probe
/// configuration and compared with the values derived from the reduced field.
pub fn printed_formula_audit(family: AuditFamily) -> Result<Vec<AuditEntry>> {
    let half = 0.5;
    match family {
        AuditFamily::Quadratic => {
            let (gp0, gpp0, nu) = (1.0, -0.6, 0.5);
            let m = ConstitutiveModel::Quadratic { gp0, gpp0 };
            let field = reduced_field(&WaveProblem::normalized(m, nu, SpeedSign::Positive)?)?;
            let c = field.c;
            let a2 = -c * gpp0 / (2.0 * nu);
            let fitted = field.eval(-1.0)? / 2.0 + field.eval(1.0)? / 2.0 - field.eval(0.0)?;
            let xi = 1.3;
            let t = 1.0 / (1.0 + (a2 * xi).exp());
            let slope = -a2 * (a2 * xi).exp() / p2(1.0 + (a2 * xi).exp());
            Ok(vec![
                AuditEntry::compare(
                    "quadratic/bernoulli-form",
                    "T' = a2 T(1 - T)",
                    "T' = -a2 T(1 - T)",
                    a2 * half * (1.0 - half),
                    field.eval(half)?,
                    "derived sign: T' = -a2 T(1 - T)",
                ),
                AuditEntry::compare(
                    "quadratic/rate-definition",
                    "a2 = -c g''(0) / (2 nu)",
                    "quadratic coefficient of f",
                    a2,
                    fitted,
                    "fitted coefficient",
                ),
                AuditEntry::compare(
                    "quadratic/logistic-solution",
                    "T = 1 / (1 + exp(a2 xi))",
                    "solution of T' = f(T) through T(0) = 1/2",
                    slope,
                    field.eval(t)?,
                    "numerical solution",
                ),
            ])
        }
        AuditFamily::Cubic => {
            let (gp0, gpp0, gppp0, nu) = (1.0, 0.25, 0.5, 0.5);
            let m = ConstitutiveModel::Cubic { gp0, gpp0, gppp0 };
            let printed_sign = if gppp0 > 0.0 { SpeedSign::Positive } else { SpeedSign::Negative };
            let admissible = WaveProblem::normalized(m, nu, printed_sign)?
                .with_admissible_sign()
                .ok_or_else(|| Error::NoClosedForm("probe cubic admits no wave".into()))?;
            let field = reduced_field(&admissible)?;
            let shape = CubicShape::from_field(&field)?;
            Ok(vec![
                AuditEntry::compare(
                    "cubic/existence-sign",
                    "wave exists if g'''(0) and c have the same sign",
                    "wave exists iff c g'''(0) < 0 (rate c g'''(0)/(6 nu) must be negative)",
                    printed_sign.value() * gppp0.signum(),
                    field.c.signum() * gppp0.signum(),
                    "existence decided by the sign of f; c g'''(0) < 0",
                ),
                AuditEntry::compare(
                    "cubic/shape-constant",
                    "b = 1 + 3 g''(0) / g'''(0)",
                    "b fitted from f = k T(1 - T)(T + b)",
                    1.0 + 3.0 * gpp0 / gppp0,
                    shape.b,
                    "fitted b",
                ),
            ])
        }
        AuditFamily::ModelAN1 => {
            let (alpha, beta, gamma, nu) = (1.0, 0.0, 2.0, 0.5);
            let m = ConstitutiveModel::ModelA { alpha, beta, gamma, n: 1.0 };
            let field = reduced_field(&WaveProblem::normalized(m, nu, SpeedSign::Negative)?)?;
            let c = field.c;
            let printed = alpha * gamma / ((alpha * (1.0 + gamma) + beta) * nu * c);
            let fitted = CubicShape::from_field(&field)?.rate;
            Ok(vec![AuditEntry::compare(
                "model-a-n1/rate-denominator",
                "kappa = alpha gamma / ([alpha (1 + gamma) + beta] nu c)",
                "kappa = alpha gamma / (nu c [2 alpha + 2 beta + alpha gamma])",
                printed,
                fitted,
                "derived denominator 2 alpha + 2 beta + alpha gamma",
            )])
        }
        AuditFamily::ModelBR2 => {
            let nu = 0.5;
            let m = ConstitutiveModel::ModelB { r: 2.0 };
            let field = reduced_field(&WaveProblem::normalized(m, nu, SpeedSign::Positive)?)?;
            let c = field.c;
            let mut worst: f64 = 0.0;
            let mut at = half;
            for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let printed = t / (nu * c) * (1.0 - 2f64.sqrt() / (1.0 + t * t).sqrt());
                let e = (printed - field.eval(t)?).abs();
                if e >= worst {
                    worst = e;
                    at = t;
                }
            }
            let printed = at / (nu * c) * (1.0 - 2f64.sqrt() / (1.0 + at * at).sqrt());
            Ok(vec![AuditEntry::compare(
                "model-b/reduced-ode",
                "T' = (T / (nu c)) (1 - 2^(1/r) / (1 + |T|^r)^(1/r))",
                "f(T) from the two-state reduction",
                printed,
                field.eval(at)?,
                "derived f",
            )])
        }
        AuditFamily::Equilibrium => {
            let m = ConstitutiveModel::Quadratic { gp0: 1.0, gpp0: -0.6 };
            let field = reduced_field(&WaveProblem::normalized(m, 0.5, SpeedSign::Positive)?)?;
            let rep = find_equilibria(&field, field.default_search_interval())?;
            let zero = rep.equilibria.iter().find(|e| e.value.abs() < 1e-9).ok_or(Error::DegenerateProfile)?;
            // printed rule: unstable when g(1) != g'(T*)
            let printed_unstable = m.eval(1.0)? != m.derivative(zero.value, 1)?;
            let stable = zero.stability == Stability::Stable;
            Ok(vec![AuditEntry::compare(
                "equilibrium/stability-rule",
                "T* unstable if g(1) != g'(T*), stable if g(1) = g'(T*)",
                "T* stable iff lambda = f'(T*) < 0",
                if printed_unstable { 1.0 } else { -1.0 },
                if stable { -1.0 } else { 1.0 },
                "classify by the sign of lambda",
            )])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditFamily {
    Quadratic,
    Cubic,
    ModelAN1,
    ModelBR2,
    Equilibrium,
}

impl AuditFamily {
    pub const ALL: [AuditFamily; 5] = [
        AuditFamily::Quadratic,
        AuditFamily::Cubic,
        AuditFamily::ModelAN1,
        AuditFamily::ModelBR2,
        AuditFamily::Equilibrium,
    ];

    /// The families whose printed formulas concern `model`.
    pub fn for_model(model: &ConstitutiveModel) -> Vec<AuditFamily> {
        let mut out = vec![AuditFamily::Equilibrium];
        match model {
            ConstitutiveModel::Quadratic { .. } => out.push(AuditFamily::Quadratic),
            ConstitutiveModel::Cubic { .. } => out.push(AuditFamily::Cubic),
            ConstitutiveModel::ModelA { .. } => out.push(AuditFamily::ModelAN1),
            ConstitutiveModel::ModelB { .. } => out.push(AuditFamily::ModelBR2),
            _ => {}
        }
        out
    }
}

pub fn full_audit() -> Result<Vec<AuditEntry>> {
    let mut out = Vec::new();
    for f in AuditFamily::ALL {
        out.extend(printed_formula_audit(f)?);
    }
    Ok(out)
}

/// Tolerance for agreement between two solution methods.
pub const EQUIVALENCE_TOL: f64 = 1e-6;
pub const BOUNDARY_APPROACH_TOL: f64 = 1e-3;

/// All checks for one model at one viscosity on the normalized states.
pub fn validate_model(model: &ConstitutiveModel, nu: f64) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let name = model.name();
    rep.push(speed_consistency_check(model, &BoundaryStates::normalized()));
    rep.checks.extend(derivative_audit(model, DERIVATIVE_AUDIT_SEED));
    for family in AuditFamily::for_model(model) {
        match printed_formula_audit(family) {
            Ok(entries) => rep.audit.extend(entries),
            Err(e) => rep.push(Check::errored(format!("audit/{name}"), &e)),
        }
    }
    let problem = match WaveProblem::normalized(*model, nu, SpeedSign::Positive) {
        Ok(p) => p,
        Err(e) => {
            rep.push(Check::errored(format!("existence/{name}"), &e));
            return rep;
        }
    };
    let Some(problem) = problem.with_admissible_sign() else {
        // only the linear law is expected to have no wave
        let verdict = existence_gate(&problem);
        let expected = matches!(model, ConstitutiveModel::Linear { .. });
        rep.push(Check::holds(format!("existence/{name}"), expected).with_note(format!("{verdict:?}")));
        return rep;
    };
    rep.push(Check::holds(format!("existence/{name}"), !matches!(model, ConstitutiveModel::Linear { .. })));
    let field = match reduced_field(&problem) {
        Ok(f) => f,
        Err(e) => {
            rep.push(Check::errored(format!("field/{name}"), &e));
            return rep;
        }
    };
    rep.push(eigenvalue_audit(&field));
    match profile_checks(&field) {
        Ok(checks) => rep.checks.extend(checks),
        Err(e) => rep.push(Check::errored(format!("profile/{name}"), &e)),
    }
    rep
}

fn profile_checks(field: &ReducedField) -> Result<Vec<Check>> {
    let name = field.model.name();
    let cfg = IntegratorConfig::for_field(field)?;
    let profile = integrate_profile(field, &cfg)?;
    let mut out = Vec::new();
    out.push(Check::at_most(format!("residual/{name}/ode"), residual_check_profile(&profile, field)?, RESIDUAL_TOL));
    let first = profile.samples.first().expect("non-empty profile");
    let last = profile.samples.last().expect("non-empty profile");
    let approach = (first.t - field.boundary.t_minus).abs().max((last.t - field.boundary.t_plus).abs());
    out.push(Check::at_most(format!("boundary-approach/{name}"), approach, BOUNDARY_APPROACH_TOL));
    let d = measure_width(&profile)?;
    let exact = field.width()?;
    out.push(Check::at_most(format!("width/{name}"), (d / exact - 1.0).abs(), 5e-3));
    let anchor = profile.stress_at(0.0).unwrap_or(f64::NAN);
    out.push(Check::within(format!("anchor/{name}"), field.boundary.midpoint(), anchor, 1e-12));

    // quadrature against the same ODE evaluated at the quadrature coordinates
    let quad = quadrature_profile(field, &stress_grid(&field.boundary, 201))?;
    let xis: Vec<f64> = quad.samples.iter().map(|s| s.xi).collect();
    let ode = integrate_on_grid(field, &cfg, &xis)?;
    let diff = quad.samples.iter().zip(&ode).map(|(q, o)| (q.t - o.t).abs()).fold(0.0, f64::max);
    out.push(Check::at_most(format!("equivalence/{name}/quadrature-vs-ode"), diff, EQUIVALENCE_TOL));

    match ClosedFormSolution::for_field(field) {
        Ok(sol) => {
            let kind = sol.kind();
            out.push(Check::at_most(
                format!("residual/{name}/{kind}"),
                residual_check_solution(&sol, field)?,
                RESIDUAL_TOL,
            ));
            let span = 10.0 * sol.effective_width()?;
            let mut worst: f64 = 0.0;
            for s in profile.samples.iter().filter(|s| s.xi.abs() <= span) {
                worst = worst.max((closed_form_stress(&sol, &field.boundary, s.xi)? - s.t).abs());
            }
            out.push(Check::at_most(format!("equivalence/{name}/{kind}-vs-ode"), worst, EQUIVALENCE_TOL));
        }
        Err(Error::NoClosedForm(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(out)
}

/// Every catalog model at viscosity `nu` (in parallel), plus the full
/// printed-formula audit, the negative controls and the H-function checks.
pub fn validate_all(nu: f64) -> ValidationReport {
    let models = ConstitutiveModel::catalog();
    let reports = par::map(&models, |m| validate_model(m, nu));
    let mut rep = ValidationReport::default();
    for r in reports {
        rep.merge(r);
    }
    match full_audit() {
        Ok(a) => rep.audit.extend(a),
        Err(e) => rep.push(Check::errored("audit", &e)),
    }
    match negative_controls(nu) {
        Ok(c) => rep.checks.extend(c),
        Err(e) => rep.push(Check::errored("control", &e)),
    }
    rep.checks.extend(h_function_checks(nu));
    rep.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_flags_exactly_four() {
        let audit = full_audit().unwrap();
        let mut flagged: Vec<&str> = audit.iter().filter(|a| a.flagged).map(|a| a.location.as_str()).collect();
        flagged.sort();
        assert_eq!(
            flagged,
            [
                "cubic/existence-sign",
                "equilibrium/stability-rule",
                "model-a-n1/rate-denominator",
                "quadratic/bernoulli-form"
            ]
        );
        let kappa = audit.iter().find(|a| a.location == "model-a-n1/rate-denominator").unwrap();
        assert!((kappa.derived_value + 2f64.sqrt()).abs() < 1e-12);
        assert!((kappa.printed_value + 4.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn logistic_residual_is_tiny() {
        let m = ConstitutiveModel::Quadratic { gp0: 1.0, gpp0: -0.6 };
        let f = reduced_field(&WaveProblem::normalized(m, 0.5, SpeedSign::Positive).unwrap()).unwrap();
        let s = ClosedFormSolution::for_field(&f).unwrap();
        assert!(residual_check_solution(&s, &f).unwrap() <= 1e-8);
    }

    #[test]
    fn controls_fail_loudly() {
        let checks = negative_controls(0.5).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        // reflected logistic misses by about 2 max|f|
        let m = ConstitutiveModel::Quadratic { gp0: 1.0, gpp0: -0.6 };
        let f = reduced_field(&WaveProblem::normalized(m, 0.5, SpeedSign::Positive).unwrap()).unwrap();
        let max_f = f.max_slope().unwrap();
        assert!((checks[0].measured / (2.0 * max_f) - 1.0).abs() < 0.05);
    }

    #[test]
    fn speed_identity_on_catalog() {
        for m in ConstitutiveModel::catalog() {
            let c = speed_consistency_check(&m, &BoundaryStates::normalized());
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn derivative_audit_catalog() {
        for m in ConstitutiveModel::catalog() {
            for c in derivative_audit(&m, DERIVATIVE_AUDIT_SEED) {
                assert!(c.passed, "{c:?}");
            }
        }
    }

    #[test]
    fn report_is_sorted_and_deterministic() {
        let mut r = ValidationReport::default();
        r.push(Check::at_most("b", 0.0, 1.0));
        r.push(Check::at_most("a", f64::NAN, 1.0));
        let r = r.finish();
        assert_eq!(r.checks[0].name, "a");
        assert!(!r.checks[0].passed && r.checks[0].measured.is_finite());
        assert_eq!(r.to_json(), r.clone().finish().to_json());
    }

    #[test]
    fn coarse_output_is_verified_on_a_fine_grid() {
        let m = ConstitutiveModel::catalog_default("modelC").unwrap();
        let f = reduced_field(&WaveProblem::normalized(m, 0.5, SpeedSign::Positive).unwrap()).unwrap();
        let cfg = IntegratorConfig { samples: 101, ..IntegratorConfig::for_field(&f).unwrap() };
        for method in [Method::Ode, Method::Quadrature] {
            let p = verified_profile(&f, Some(method), &cfg).unwrap();
            assert!(
                residual_check_profile(&p, &f).unwrap() > RESIDUAL_TOL,
                "{method}: coarse grid should be stencil-limited"
            );
        }
        assert!(matches!(verified_profile(&f, Some(Method::ClosedForm), &cfg), Err(Error::NoClosedForm(_))));
    }
}
