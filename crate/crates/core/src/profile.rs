//! Numerical wave profiles: adaptive integration of `T' = f(T)` from the
//! anchor `T(0) = (T⁻+T⁺)/2`, quadrature of `ξ(T) = ∫ ds/f(s)`, inversion of
//! log-form implicit relations, and width measurement on sampled profiles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedFormSolution;
use crate::constitutive::ModelSpec;
use crate::error::{Error, Result};
use crate::ode::{Dopri5, StepControl};
use crate::quadrature::integrate;
use crate::roots::{find_root, RootTolerance};
use crate::wave::{existence_gate, BoundaryStates, Existence, ReducedField, SpeedSign, WaveProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Ode,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Ode => "ode",
            Method::Quadrature => "quadrature",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-form" => Ok(Method::ClosedForm),
            "ode" => Ok(Method::Ode),
            "quadrature" => Ok(Method::Quadrature),
            _ => Err(Error::Config(format!("unknown method `{s}` (expected closed-form, ode or quadrature)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub xi: f64,
    pub t: f64,
    /// `g(T)`.
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileMeta {
    pub model: ModelSpec,
    pub nu: f64,
    pub c: f64,
    pub boundary: BoundaryStates,
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl ProfileMeta {
    fn new(field: &ReducedField, method: Method, rel_tol: f64, abs_tol: f64) -> Self {
        ProfileMeta {
            model: ModelSpec::from(&field.model),
            nu: field.nu,
            c: field.c,
            boundary: field.boundary,
            method,
            rel_tol,
            abs_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub samples: Vec<Sample>,
    pub meta: ProfileMeta,
}

/// Slack allowed outside `[min(T⁻,T⁺), max(T⁻,T⁺)]`.
pub const RANGE_SLACK: f64 = 1e-6;

impl Profile {
    /// `T(ξ)` by linear interpolation, clamped to the end samples.
    pub fn stress_at(&self, xi: f64) -> Option<f64> {
        let s = &self.samples;
        let first = s.first()?;
        let last = s.last()?;
        if xi <= first.xi {
            return Some(first.t);
        }
        if xi >= last.xi {
            return Some(last.t);
        }
        let i = s.partition_point(|p| p.xi <= xi);
        let (a, b) = (s[i - 1], s[i]);
        let w = (xi - a.xi) / (b.xi - a.xi);
        Some(a.t + w * (b.t - a.t))
    }

    /// Checks ordering, range, and that the profile runs monotonically from
    /// `T⁻` to `T⁺`. Samples within `cutoff` of a boundary state may repeat
    /// (padding); everywhere else the change must be strict.
    pub fn check_invariants(&self, cutoff: f64) -> Result<()> {
        let b = self.meta.boundary;
        let (lo, hi) = (b.lower() - RANGE_SLACK, b.upper() + RANGE_SLACK);
        let dir = (b.t_plus - b.t_minus).signum();
        for w in self.samples.windows(2) {
            if !(w[1].xi > w[0].xi) {
                return Err(Error::InconsistentField { xi: w[1].xi, t: w[1].t });
            }
            let step = (w[1].t - w[0].t) * dir;
            let near = |t: f64| (t - b.t_minus).abs() <= cutoff || (t - b.t_plus).abs() <= cutoff;
            if step < 0.0 || (step == 0.0 && !(near(w[0].t) || near(w[1].t))) {
                return Err(Error::InconsistentField { xi: w[1].xi, t: w[1].t });
            }
        }
        if let Some(p) = self.samples.iter().find(|p| !(p.t >= lo && p.t <= hi)) {
            return Err(Error::InconsistentField { xi: p.xi, t: p.t });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub xi_min: f64,
    pub xi_max: f64,
    pub samples: usize,
    pub equilibrium_cutoff: f64,
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLES: usize = 4001;
/// Default half-width of the domain in effective widths.
pub const DEFAULT_SPAN_WIDTHS: f64 = 20.0;

impl IntegratorConfig {
    /// Tolerances `1e-10`, 4001 samples on `[-20d, 20d]`, with `d` the exact
    /// width `|T⁻ − T⁺| / max |f|` of the field.
    pub fn for_field(field: &ReducedField) -> Result<Self> {
        let d = field.width()?;
        Ok(IntegratorConfig {
            rel_tol: DEFAULT_TOL,
            abs_tol: DEFAULT_TOL,
            max_step: d,
            xi_min: -DEFAULT_SPAN_WIDTHS * d,
            xi_max: DEFAULT_SPAN_WIDTHS * d,
            samples: DEFAULT_SAMPLES,
            equilibrium_cutoff: DEFAULT_TOL,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, value: f64, reason: &'static str| {
            Err(Error::InvalidParameter { model: "integrator", field, value, reason })
        };
        for (field, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol), ("max_step", self.max_step)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(field, v, "must be positive and finite");
            }
        }
        if !(self.equilibrium_cutoff >= 0.0 && self.equilibrium_cutoff.is_finite()) {
            return bad("equilibrium_cutoff", self.equilibrium_cutoff, "must be non-negative and finite");
        }
        if !(self.xi_min < 0.0 && self.xi_min.is_finite()) {
            return bad("xi_min", self.xi_min, "must be negative and finite");
        }
        if !(self.xi_max > 0.0 && self.xi_max.is_finite()) {
            return bad("xi_max", self.xi_max, "must be positive and finite");
        }
        if self.samples < 3 {
            return bad("samples", self.samples as f64, "need at least 3 samples");
        }
        Ok(())
    }

    /// The uniform output grid on `[xi_min, xi_max]`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n)
            .map(|i| {
                let w = i as f64 / n as f64;
                self.xi_min * (1.0 - w) + self.xi_max * w
            })
            .collect()
    }
}

fn require_admissible(field: &ReducedField) -> Result<()> {
    let sign = if field.c > 0.0 { SpeedSign::Positive } else { SpeedSign::Negative };
    let problem = WaveProblem::new(field.model, field.nu, field.boundary, sign)?;
    match existence_gate(&problem) {
        Existence::Admissible => Ok(()),
        Existence::NoWave(reason) => Err(Error::NoWave(reason)),
    }
}

/// Integrates `T' = f(T)` outward from `T(0) = (T⁻+T⁺)/2` with an adaptive
/// Dormand–Prince 5(4) pair, sampling on the configured uniform grid.
pub fn integrate_profile(field: &ReducedField, config: &IntegratorConfig) -> Result<Profile> {
    config.validate()?;
    let samples = integrate_on_grid(field, config, &config.grid())?;
    let profile = Profile { samples, meta: ProfileMeta::new(field, Method::Ode, config.rel_tol, config.abs_tol) };
    profile.check_invariants(config.equilibrium_cutoff.max(config.abs_tol))?;
    Ok(profile)
}

/// Same integration as [`integrate_profile`], evaluated at arbitrary
/// increasing coordinates `xis` (the domain fields of `config` are ignored).
pub fn integrate_on_grid(field: &ReducedField, config: &IntegratorConfig, xis: &[f64]) -> Result<Vec<Sample>> {
    require_admissible(field)?;
    if xis.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("integration grid must be strictly increasing".into()));
    }
    let split = xis.partition_point(|&x| x < 0.0);
    let forward = integrate_branch(field, config, xis[split..].iter().copied(), field.boundary.t_plus)?;
    let backward = integrate_branch(field, config, xis[..split].iter().rev().copied(), field.boundary.t_minus)?;
    let mut samples = Vec::with_capacity(xis.len());
    samples.extend(backward.into_iter().rev());
    samples.extend(forward);
    Ok(samples)
}

fn integrate_branch(
    field: &ReducedField,
    config: &IntegratorConfig,
    targets: impl Iterator<Item = f64>,
    limit: f64,
) -> Result<Vec<Sample>> {
    let b = field.boundary;
    let ctl = StepControl { rel_tol: config.rel_tol, abs_tol: config.abs_tol, max_step: config.max_step };
    let mut ode = Dopri5::new(|t| field.eval(t), 0.0, b.midpoint(), ctl)?;
    let mut out = Vec::new();
    let mut settled = false;
    for xi in targets {
        let t = if settled {
            limit
        } else {
            let t = ode.advance_to(xi)?;
            if !(t >= b.lower() - RANGE_SLACK && t <= b.upper() + RANGE_SLACK) {
                return Err(Error::InconsistentField { xi, t });
            }
            if (t - limit).abs() < config.equilibrium_cutoff {
                settled = true;
            }
            t
        };
        out.push(Sample { xi, t, g: field.model.eval(t)? });
    }
    Ok(out)
}

/// Distance from the boundary states at which the stress grid is clipped.
pub const GRID_CLIP: f64 = 1e-9;

/// `n` stresses strictly between the boundary states, evenly spaced in the
/// logit of the normalized stress so both tails are resolved. With `n` odd
/// the midpoint is included.
pub fn stress_grid(boundary: &BoundaryStates, n: usize) -> Vec<f64> {
    let jump = boundary.jump();
    let u_min = GRID_CLIP / jump;
    let z_max = ((1.0 - u_min) / u_min).ln();
    let lo = boundary.lower();
    (0..n)
        .map(|i| {
            let k = (2 * i) as f64 - (n - 1) as f64;
            let z = if n == 1 { 0.0 } else { z_max * k / (n - 1) as f64 };
            if z == 0.0 {
                boundary.midpoint()
            } else {
                lo + jump / (1.0 + (-z).exp())
            }
        })
        .collect()
}

/// Absolute tolerance for each quadrature piece.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// `ξ(T) = ∫_{T₀}^{T} ds / f(s)` at every grid stress, accumulated piece by
/// piece outward from the midpoint `T₀`, then sorted by `ξ`. The midpoint is
/// always part of the output.
pub fn quadrature_profile(field: &ReducedField, grid: &[f64]) -> Result<Profile> {
    let b = field.boundary;
    let mid = b.midpoint();
    let want = field.required_sign();
    let mut ts: Vec<f64> = grid.to_vec();
    if let Some(&t) = ts.iter().find(|&&t| !(t > b.lower() && t < b.upper())) {
        return Err(Error::Domain(format!("stress grid point {t} is not strictly between the boundary states")));
    }
    ts.push(mid);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    for &t in &ts {
        let f = field.eval(t)?;
        if !(f * want > 0.0) {
            return Err(Error::BlockedConnection { t });
        }
    }
    let inv = |s: f64| -> Result<f64> {
        let f = field.eval(s)?;
        if f * want > 0.0 {
            Ok(1.0 / f)
        } else {
            Err(Error::BlockedConnection { t: s })
        }
    };
    let m = ts.partition_point(|&t| t < mid);
    let mut pts = Vec::with_capacity(ts.len());
    pts.push((0.0, mid));
    for side in [&ts[m + 1..], &ts[..m]] {
        let ordered: Vec<f64> =
            if side.first().is_some_and(|&t| t < mid) { side.iter().rev().copied().collect() } else { side.to_vec() };
        let (mut xi, mut prev) = (0.0, mid);
        for t in ordered {
            xi += integrate(inv, prev, t, QUADRATURE_TOL, 2000)?.value;
            pts.push((xi, t));
            prev = t;
        }
    }
    let mut samples = Vec::with_capacity(pts.len());
    for (xi, t) in pts {
        samples.push(Sample { xi, t, g: field.model.eval(t)? });
    }
    samples.sort_by(|a, b| a.xi.total_cmp(&b.xi));
    Ok(Profile { samples, meta: ProfileMeta::new(field, Method::Quadrature, QUADRATURE_TOL, QUADRATURE_TOL) })
}

/// Samples a closed-form solution on the configured grid. Where an implicit
/// solution is closer to a boundary state than the inversion bracket
/// resolves, that boundary state is used.
pub fn closed_form_profile(
    solution: &ClosedFormSolution,
    field: &ReducedField,
    config: &IntegratorConfig,
) -> Result<Profile> {
    config.validate()?;
    let mut samples = Vec::with_capacity(config.samples);
    for xi in config.grid() {
        let t = closed_form_stress(solution, &field.boundary, xi)?;
        samples.push(Sample { xi, t, g: field.model.eval(t)? });
    }
    Ok(Profile { samples, meta: ProfileMeta::new(field, Method::ClosedForm, 0.0, 0.0) })
}

/// `T(ξ)` of a closed form, saturating to the boundary state beyond the
/// inversion bracket.
pub fn closed_form_stress(solution: &ClosedFormSolution, boundary: &BoundaryStates, xi: f64) -> Result<f64> {
    match solution.stress(xi) {
        Ok(t) => Ok(t),
        Err(Error::OutOfRange { .. }) => Ok(if xi > 0.0 { boundary.t_plus } else { boundary.t_minus }),
        Err(e) => Err(e),
    }
}

/// A stress in `(0, 1)` carried with its complement `1 − T`, so that
/// relations involving `ln(1 − T)` keep full precision as `T → 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint {
    pub t: f64,
    pub complement: f64,
}

impl UnitPoint {
    pub fn new(t: f64) -> Self {
        UnitPoint { t, complement: 1.0 - t }
    }

    /// `T = 1/(1 + e^(−z))`.
    pub fn from_logit(z: f64) -> Self {
        UnitPoint { t: 1.0 / (1.0 + (-z).exp()), complement: 1.0 / (1.0 + z.exp()) }
    }
}

/// A relation `R(T, ξ) = 0` in log form, strictly monotone in `T` on `(0, 1)`.
pub trait ImplicitRelation {
    fn residual(&self, p: UnitPoint, xi: f64) -> f64;
}

/// Inversion bracket `T ∈ (ε, 1 − ε)`.
pub const INVERSION_EPS: f64 = 1e-14;
pub const INVERSION_TOL: f64 = 1e-12;

/// Solves `R(T, ξ) = 0` for `T`, searching in the logit of `T` so the
/// bracket ends resolve `ε` and `1 − ε` alike.
pub fn invert_implicit<R: ImplicitRelation + ?Sized>(relation: &R, xi: f64) -> Result<f64> {
    let z_max = ((1.0 - INVERSION_EPS) / INVERSION_EPS).ln();
    let r = |z: f64| relation.residual(UnitPoint::from_logit(z), xi);
    let (ra, rb) = (r(-z_max), r(z_max));
    if !(ra.signum() != rb.signum()) || ra.is_nan() || rb.is_nan() {
        return Err(Error::OutOfRange { xi });
    }
    let tol = RootTolerance { f_tol: INVERSION_TOL, x_tol: 0.0, max_iter: 400 };
    let z = find_root(r, -z_max, z_max, tol)?;
    Ok(UnitPoint::from_logit(z).t)
}

/// Derivative at `x` of the polynomial through the given points.
pub fn lagrange_derivative(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let mut total = 0.0;
    for j in 0..n {
        let mut lj = 0.0;
        for m in 0..n {
            if m == j {
                continue;
            }
            let mut term = 1.0 / (xs[j] - xs[m]);
            for k in 0..n {
                if k != j && k != m {
                    term *= (x - xs[k]) / (xs[j] - xs[k]);
                }
            }
            lj += term;
        }
        total += ys[j] * lj;
    }
    total
}

/// `T'` at every sample from a five-point Lagrange stencil (shifted inward
/// at the ends).
pub fn sample_slopes(samples: &[Sample]) -> Vec<f64> {
    let n = samples.len();
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(2).min(n.saturating_sub(5));
            let w = &samples[start..(start + 5).min(n)];
            let xs: Vec<f64> = w.iter().map(|s| s.xi).collect();
            let ys: Vec<f64> = w.iter().map(|s| s.t).collect();
            lagrange_derivative(&xs, &ys, samples[i].xi)
        })
        .collect()
}

pub const MIN_WIDTH_SAMPLES: usize = 16;

/// `d = |T⁻ − T⁺| / max |T'|`, with `|T'|` from five-point stencils and its
/// maximum refined by the vertex of the parabola through the three largest
/// neighbouring values.
pub fn measure_width(profile: &Profile) -> Result<f64> {
    let s = &profile.samples;
    if s.len() < MIN_WIDTH_SAMPLES {
        return Err(Error::Domain(format!("width needs at least {MIN_WIDTH_SAMPLES} samples, got {}", s.len())));
    }
    let slopes: Vec<f64> = sample_slopes(s).into_iter().map(f64::abs).collect();
    let (i, &m) = slopes.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    let span = s[s.len() - 1].xi - s[0].xi;
    if !(m * span > 1e-12 * profile.meta.boundary.jump()) {
        return Err(Error::DegenerateProfile);
    }
    let mut peak = m;
    if i > 0 && i + 1 < s.len() {
        let (y0, y1, y2) = (slopes[i - 1], slopes[i], slopes[i + 1]);
        let (h0, h1) = (s[i].xi - s[i - 1].xi, s[i + 1].xi - s[i].xi);
        // parabola through the three points, in offsets from s[i]
        let d1 = (y1 - y0) / h0;
        let d2 = (y2 - y1) / h1;
        let a = (d2 - d1) / (h0 + h1);
        if a < 0.0 {
            let b = d1 + a * h0;
            peak = peak.max(y1 - b * b / (4.0 * a));
        }
    }
    Ok(profile.meta.boundary.jump() / peak)
}
