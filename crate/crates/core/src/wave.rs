//! Traveling-wave reduction `T(ξ)`, `ξ = x − ct`.
//!
//! Integrating the traveling-wave equation twice with decaying derivatives at
//! both ends gives the first-order equation `T' = f(T)` with
//!
//! ```text
//! f(T) = (1/νc) { (T − (T⁻+T⁺)/2) − c² [g(T) − (g(T⁻)+g(T⁺))/2] }
//! c²   = (T⁻ − T⁺) / (g(T⁻) − g(T⁺))
//! ```
//!
//! A wave joining `T⁻` (at ξ → −∞) to `T⁺` (at ξ → +∞) is a heteroclinic
//! orbit of this scalar equation, so it exists exactly when `f` has no zero
//! strictly between the states and drives `T` from `T⁻` towards `T⁺`.

use serde::Serialize;

use crate::constitutive::ConstitutiveModel;
use crate::error::{Error, NoWaveReason, Result};
use crate::roots::{find_root, peak, RootTolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryStates {
    /// Stress as ξ → −∞.
    pub t_minus: f64,
    /// Stress as ξ → +∞.
    pub t_plus: f64,
}

impl BoundaryStates {
    pub fn new(t_minus: f64, t_plus: f64) -> Result<Self> {
        if !(t_minus.is_finite() && t_plus.is_finite()) {
            return Err(Error::InvalidBoundary("states must be finite".into()));
        }
        if t_minus == t_plus {
            return Err(Error::InvalidBoundary("states must differ".into()));
        }
        Ok(BoundaryStates { t_minus, t_plus })
    }

    /// `T⁻ = 1`, `T⁺ = 0`.
    pub const fn normalized() -> Self {
        BoundaryStates { t_minus: 1.0, t_plus: 0.0 }
    }

    pub fn is_normalized(&self) -> bool {
        self.t_minus == 1.0 && self.t_plus == 0.0
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.t_minus + self.t_plus)
    }

    pub fn jump(&self) -> f64 {
        (self.t_minus - self.t_plus).abs()
    }

    pub fn lower(&self) -> f64 {
        self.t_minus.min(self.t_plus)
    }

    pub fn upper(&self) -> f64 {
        self.t_minus.max(self.t_plus)
    }

    pub fn swapped(&self) -> Self {
        BoundaryStates { t_minus: self.t_plus, t_plus: self.t_minus }
    }
}

impl Default for BoundaryStates {
    fn default() -> Self {
        Self::normalized()
    }
}

/// Sign of the wave speed `c = ±√c²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpeedSign {
    Positive,
    Negative,
}

impl SpeedSign {
    pub fn value(self) -> f64 {
        match self {
            SpeedSign::Positive => 1.0,
            SpeedSign::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SpeedSign::Positive => SpeedSign::Negative,
            SpeedSign::Negative => SpeedSign::Positive,
        }
    }

    pub fn from_i8(s: i8) -> Option<Self> {
        match s {
            1 => Some(SpeedSign::Positive),
            -1 => Some(SpeedSign::Negative),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveProblem {
    pub model: ConstitutiveModel,
    /// Dimensionless viscosity. Zero is representable so the existence gate
    /// can report it; no field is built for it.
    pub nu: f64,
    pub boundary: BoundaryStates,
    pub c_sign: SpeedSign,
}

impl WaveProblem {
    pub fn new(model: ConstitutiveModel, nu: f64, boundary: BoundaryStates, c_sign: SpeedSign) -> Result<Self> {
        model.validate()?;
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(Error::InvalidParameter {
                model: model.name(),
                field: "nu",
                value: nu,
                reason: "viscosity must be finite and non-negative",
            });
        }
        Ok(WaveProblem { model, nu, boundary, c_sign })
    }

    pub fn normalized(model: ConstitutiveModel, nu: f64, c_sign: SpeedSign) -> Result<Self> {
        Self::new(model, nu, BoundaryStates::normalized(), c_sign)
    }

    /// The same problem with whichever speed sign the existence gate admits,
    /// if either does.
    pub fn with_admissible_sign(mut self) -> Option<Self> {
        for sign in [SpeedSign::Positive, SpeedSign::Negative] {
            self.c_sign = sign;
            if existence_gate(&self).is_admissible() {
                return Some(self);
            }
        }
        None
    }
}

/// The problem with the requested speed sign, or with whichever sign the
/// existence gate admits when none is requested. Fails with the gate's reason
/// when no wave exists.
pub fn admissible_problem(
    model: ConstitutiveModel,
    nu: f64,
    boundary: BoundaryStates,
    c_sign: Option<SpeedSign>,
) -> Result<WaveProblem> {
    let problem = WaveProblem::new(model, nu, boundary, c_sign.unwrap_or(SpeedSign::Positive))?;
    let problem = match c_sign {
        Some(_) => problem,
        None => problem.with_admissible_sign().unwrap_or(problem),
    };
    match existence_gate(&problem) {
        Existence::Admissible => Ok(problem),
        Existence::NoWave(reason) => Err(Error::NoWave(reason)),
    }
}

/// `c² = (T⁻ − T⁺)/(g(T⁻) − g(T⁺))`.
pub fn wave_speed_squared(model: &ConstitutiveModel, boundary: &BoundaryStates) -> Result<f64> {
    let gm = model.eval(boundary.t_minus)?;
    let gp = model.eval(boundary.t_plus)?;
    if gm == gp {
        return Err(Error::DegenerateSpeed);
    }
    let c2 = (boundary.t_minus - boundary.t_plus) / (gm - gp);
    if !(c2 > 0.0) || !c2.is_finite() {
        return Err(Error::NoWave(NoWaveReason::NonPositiveSpeedSquared { c2 }));
    }
    Ok(c2)
}

/// `A = ½ {T⁻ + T⁺ − c² [g(T⁻) + g(T⁺)]}`.
pub fn integration_constant(model: &ConstitutiveModel, boundary: &BoundaryStates, c2: f64) -> Result<f64> {
    let gm = model.eval(boundary.t_minus)?;
    let gp = model.eval(boundary.t_plus)?;
    Ok(0.5 * (boundary.t_minus + boundary.t_plus - c2 * (gm + gp)))
}

/// The scalar field `f` of `T' = f(T)` with its cached constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedField {
    pub model: ConstitutiveModel,
    pub nu: f64,
    pub boundary: BoundaryStates,
    pub c: f64,
    pub c2: f64,
    pub a: f64,
    pub g_minus: f64,
    pub g_plus: f64,
}

pub fn reduced_field(problem: &WaveProblem) -> Result<ReducedField> {
    if problem.nu == 0.0 {
        return Err(Error::NoWave(NoWaveReason::ZeroViscosity));
    }
    let c2 = wave_speed_squared(&problem.model, &problem.boundary)?;
    let a = integration_constant(&problem.model, &problem.boundary, c2)?;
    Ok(ReducedField {
        model: problem.model,
        nu: problem.nu,
        boundary: problem.boundary,
        c: problem.c_sign.value() * c2.sqrt(),
        c2,
        a,
        g_minus: problem.model.eval(problem.boundary.t_minus)?,
        g_plus: problem.model.eval(problem.boundary.t_plus)?,
    })
}

impl ReducedField {
    /// `f(T)` from the general two-state expression.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let g = self.model.eval(t)?;
        let b = &self.boundary;
        Ok(((t - b.midpoint()) - self.c2 * (g - 0.5 * (self.g_minus + self.g_plus))) / (self.nu * self.c))
    }

    /// `f(T) = [g(1) T − g(T)] / (ν c g(1))`, valid only for the normalized states.
    pub fn eval_normalized(&self, t: f64) -> Result<f64> {
        debug_assert!(self.boundary.is_normalized());
        let g1 = self.g_minus;
        Ok((g1 * t - self.model.eval(t)?) / (self.nu * self.c * g1))
    }

    /// `f'(T) = (1 − c² g'(T)) / (ν c)`.
    pub fn slope(&self, t: f64) -> Result<f64> {
        Ok((1.0 - self.c2 * self.model.derivative(t, 1)?) / (self.nu * self.c))
    }

    /// Sign the field must have strictly between the states: the profile runs
    /// from `T⁻` to `T⁺` as ξ increases.
    pub fn required_sign(&self) -> f64 {
        (self.boundary.t_plus - self.boundary.t_minus).signum()
    }

    /// Largest `|f|` between the states, i.e. `max |T'|` along the wave.
    pub fn max_slope(&self) -> Result<f64> {
        peak(|t| Ok(self.eval(t)?.abs()), self.boundary.lower(), self.boundary.upper(), 512)
    }

    /// Effective width `|T⁻ − T⁺| / max |T'|`.
    pub fn width(&self) -> Result<f64> {
        let m = self.max_slope()?;
        if m == 0.0 {
            return Err(Error::DegenerateProfile);
        }
        Ok(self.boundary.jump() / m)
    }

    pub fn default_search_interval(&self) -> (f64, f64) {
        (self.boundary.lower() - 1.0, self.boundary.upper() + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Existence {
    Admissible,
    NoWave(NoWaveReason),
}

impl Existence {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Existence::Admissible)
    }
}

const GATE_SAMPLES: usize = 4096;

/// Decides whether a heteroclinic wave joins the boundary states.
pub fn existence_gate(problem: &WaveProblem) -> Existence {
    let field = match reduced_field(problem) {
        Ok(f) => f,
        Err(Error::NoWave(reason)) => return Existence::NoWave(reason),
        Err(Error::DegenerateSpeed) => {
            return Existence::NoWave(NoWaveReason::NonPositiveSpeedSquared { c2: f64::INFINITY })
        }
        Err(_) => return Existence::NoWave(NoWaveReason::WrongDirection),
    };
    let (lo, hi) = (field.boundary.lower(), field.boundary.upper());
    let mut values = Vec::with_capacity(GATE_SAMPLES);
    for i in 0..GATE_SAMPLES {
        let t = lo + (hi - lo) * (i as f64 + 0.5) / GATE_SAMPLES as f64;
        match field.eval(t) {
            Ok(v) => values.push((t, v)),
            Err(_) => return Existence::NoWave(NoWaveReason::InteriorEquilibrium { near: t }),
        }
    }
    // f of a linear law is rounding noise around zero
    let scale = field.boundary.jump() / (field.nu * field.c.abs());
    if values.iter().all(|(_, v)| v.abs() <= 1e-12 * scale) {
        return Existence::NoWave(NoWaveReason::FieldVanishes);
    }
    let want = field.required_sign();
    if values.iter().all(|(_, v)| v * want > 0.0) {
        return Existence::Admissible;
    }
    if values.iter().all(|(_, v)| v * want < 0.0) {
        return Existence::NoWave(NoWaveReason::WrongDirection);
    }
    let near = values
        .windows(2)
        .find(|w| (w[0].1 * want > 0.0) != (w[1].1 * want > 0.0))
        .map(|w| 0.5 * (w[0].0 + w[1].0))
        .unwrap_or(field.boundary.midpoint());
    Existence::NoWave(NoWaveReason::InteriorEquilibrium { near })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub value: f64,
    /// Linearization rate `f'(T*)`.
    pub eigenvalue: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub equilibria: Vec<Equilibrium>,
    /// Set when `f` vanishes on the whole search interval (every point is an equilibrium).
    pub continuum: bool,
}

const EQUILIBRIUM_SUBINTERVALS: usize = 4096;
pub const EIGENVALUE_TOL: f64 = 1e-10;

/// Locates every sign-change zero of `f` in `interval` and classifies it by
/// the sign of `f'(T*)`.
pub fn find_equilibria(field: &ReducedField, interval: (f64, f64)) -> Result<EquilibriumReport> {
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::NonFiniteInterval);
    }
    let n = EQUILIBRIUM_SUBINTERVALS;
    let grid: Vec<(f64, Option<f64>)> = (0..=n)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            (t, field.eval(t).ok())
        })
        .collect();
    let scale = field.boundary.jump() / (field.nu * field.c.abs());
    if grid.iter().all(|(_, v)| v.is_some_and(|v| v.abs() <= 1e-12 * scale)) {
        return Ok(EquilibriumReport { equilibria: Vec::new(), continuum: true });
    }
    let mut roots = Vec::new();
    for (i, w) in grid.windows(2).enumerate() {
        let ((ta, fa), (tb, fb)) = (w[0], w[1]);
        let (Some(fa), Some(fb)) = (fa, fb) else { continue };
        if fa == 0.0 {
            roots.push(ta);
        } else if fb == 0.0 {
            if i + 1 == n {
                roots.push(tb);
            }
        } else if fa.signum() != fb.signum() {
            let tol = RootTolerance { f_tol: 0.0, x_tol: 0.0, max_iter: 200 };
            let r = find_root(|t| field.eval(t).unwrap_or(f64::NAN), ta, tb, tol)?;
            roots.push(r);
        }
    }
    let mut equilibria = Vec::with_capacity(roots.len());
    for value in roots {
        let eigenvalue = field.slope(value)?;
        let stability = if eigenvalue > EIGENVALUE_TOL {
            Stability::Unstable
        } else if eigenvalue < -EIGENVALUE_TOL {
            Stability::Stable
        } else {
            Stability::Degenerate
        };
        equilibria.push(Equilibrium { value, eigenvalue, stability });
    }
    Ok(EquilibriumReport { equilibria, continuum: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> ConstitutiveModel {
        ConstitutiveModel::Quadratic { gp0: 1.0, gpp0: -0.6 }
    }

    #[test]
    fn speed_examples() {
        let n = BoundaryStates::normalized();
        let c2 = wave_speed_squared(&ConstitutiveModel::ModelB { r: 2.0 }, &n).unwrap();
        assert!((c2 - 2f64.sqrt()).abs() < 1e-15);
        let c2 = wave_speed_squared(&quad(), &n).unwrap();
        assert!((c2 - 10.0 / 7.0).abs() < 1e-15);
        assert_eq!(wave_speed_squared(&ConstitutiveModel::Linear { gp0: 1.0 }, &n).unwrap(), 1.0);
    }

    #[test]
    fn speed_errors() {
        let n = BoundaryStates::normalized();
        let bad = ConstitutiveModel::ModelA { alpha: 0.0, beta: -0.01, gamma: 1.0, n: 1.0 };
        assert!(matches!(
            wave_speed_squared(&bad, &n),
            Err(Error::NoWave(NoWaveReason::NonPositiveSpeedSquared { .. }))
        ));
        // g(1) = g(-1) for an even law
        let even = ConstitutiveModel::Quadratic { gp0: 0.0, gpp0: 1.0 };
        let b = BoundaryStates::new(1.0, -1.0).unwrap();
        assert!(matches!(wave_speed_squared(&even, &b), Err(Error::DegenerateSpeed)));
    }

    #[test]
    fn integration_constants() {
        let n = BoundaryStates::normalized();
        let c2 = wave_speed_squared(&quad(), &n).unwrap();
        assert!(integration_constant(&quad(), &n, c2).unwrap().abs() < 1e-15);
        let lin = ConstitutiveModel::Linear { gp0: 1.0 };
        let b = BoundaryStates::new(2.0, -2.0).unwrap();
        assert_eq!(integration_constant(&lin, &b, 1.0).unwrap(), 0.0);
        let b = BoundaryStates::new(2.0, 1.0).unwrap();
        let c2 = wave_speed_squared(&quad(), &b).unwrap();
        assert!((c2 - 10.0).abs() < 1e-12);
        assert!((integration_constant(&quad(), &b, c2).unwrap() + 6.0).abs() < 1e-11);
    }

    #[test]
    fn quadratic_field_value() {
        let p = WaveProblem::normalized(quad(), 0.5, SpeedSign::Positive).unwrap();
        let f = reduced_field(&p).unwrap();
        assert!((f.eval(0.5).unwrap() + 0.1792843).abs() < 1e-7);
        assert!((f.eval(0.5).unwrap() - f.eval_normalized(0.5).unwrap()).abs() < 1e-15);
        assert!(f.eval(0.0).unwrap().abs() < 1e-15 && f.eval(1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn gate_verdicts() {
        let p = WaveProblem::normalized(quad(), 0.5, SpeedSign::Positive).unwrap();
        assert_eq!(existence_gate(&p), Existence::Admissible);
        let p = WaveProblem::normalized(quad(), 0.5, SpeedSign::Negative).unwrap();
        assert_eq!(existence_gate(&p), Existence::NoWave(NoWaveReason::WrongDirection));
        let p = WaveProblem::normalized(quad(), 0.0, SpeedSign::Positive).unwrap();
        assert_eq!(existence_gate(&p), Existence::NoWave(NoWaveReason::ZeroViscosity));
        let p = WaveProblem::normalized(ConstitutiveModel::Linear { gp0: 1.0 }, 0.5, SpeedSign::Positive).unwrap();
        assert_eq!(existence_gate(&p), Existence::NoWave(NoWaveReason::FieldVanishes));
        // cubic with b = -1/2: interior equilibrium at T = 1/2
        let m = ConstitutiveModel::Cubic { gp0: 1.0, gpp0: -0.5, gppp0: 1.0 };
        let p = WaveProblem::normalized(m, 0.5, SpeedSign::Positive).unwrap();
        let v = existence_gate(&p);
        assert!(
            matches!(v, Existence::NoWave(NoWaveReason::InteriorEquilibrium { near }) if (near - 0.5).abs() < 1e-3),
            "{v:?}"
        );
    }

    #[test]
    fn quadratic_equilibria() {
        let p = WaveProblem::normalized(quad(), 0.5, SpeedSign::Positive).unwrap();
        let f = reduced_field(&p).unwrap();
        let rep = find_equilibria(&f, f.default_search_interval()).unwrap();
        let values: Vec<f64> = rep.equilibria.iter().map(|e| e.value).collect();
        assert_eq!(values.len(), 2, "{values:?}");
        assert!(values[0].abs() < 1e-12 && (values[1] - 1.0).abs() < 1e-12);
        let lambda0 = (0.7 - 1.0) / (0.5 * (10f64 / 7.0).sqrt() * 0.7);
        assert!((rep.equilibria[0].eigenvalue - lambda0).abs() < 1e-12);
        assert!((lambda0 + 0.7171372).abs() < 1e-7);
        assert_eq!(rep.equilibria[0].stability, Stability::Stable);
        assert_eq!(rep.equilibria[1].stability, Stability::Unstable);
    }

    #[test]
    fn cubic_has_three_equilibria() {
        let m = ConstitutiveModel::Cubic { gp0: 1.0, gpp0: 0.0, gppp0: 0.5 };
        let p = WaveProblem::normalized(m, 0.5, SpeedSign::Negative).unwrap();
        let f = reduced_field(&p).unwrap();
        let rep = find_equilibria(&f, f.default_search_interval()).unwrap();
        let values: Vec<f64> = rep.equilibria.iter().map(|e| e.value).collect();
        assert_eq!(values.len(), 3, "{values:?}");
        for (v, want) in values.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_law_is_a_continuum() {
        let p = WaveProblem::normalized(ConstitutiveModel::Linear { gp0: 2.0 }, 0.5, SpeedSign::Positive).unwrap();
        let f = reduced_field(&p).unwrap();
        assert!(find_equilibria(&f, (-1.0, 2.0)).unwrap().continuum);
        assert!(find_equilibria(&f, (f64::NEG_INFINITY, 2.0)).is_err());
    }

    #[test]
    fn quadratic_width_closed_form() {
        let p = WaveProblem::normalized(quad(), 0.5, SpeedSign::Positive).unwrap();
        let f = reduced_field(&p).unwrap();
        let d = 8.0 * 0.5 / (0.6 * f.c);
        assert!((f.width().unwrap() - d).abs() < 1e-9);
    }
}
