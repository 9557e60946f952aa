//! Analytic traveling waves for the laws where `T' = f(T)` integrates in
//! closed form: quadratic (logistic), cubic (implicit, and explicit when
//! `g''(0) = 0`), Model A with `n = 1`, and Model B with `r = 2`.
//!
//! Rate constants are fitted from the reduced field itself rather than from
//! coefficient formulas, so every solution here solves the same `T' = f(T)`
//! that the numerical integrator uses. All solutions use `T⁻ = 1`, `T⁺ = 0`
//! and are anchored at `T(0) = 1/2`.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::constitutive::ConstitutiveModel;
use crate::error::{Error, NoWaveReason, Result};
use crate::profile::{invert_implicit, ImplicitRelation, UnitPoint};
use crate::roots::peak;
use crate::wave::{existence_gate, reduced_field, BoundaryStates, Existence, ReducedField, SpeedSign, WaveProblem};

/// Coefficients of `T' = a₂T² + a₁T + a₀` for the quadratic law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiccatiCoefficients {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
    /// `θ`; undefined when `T⁻ + T⁺ = 0`.
    pub theta: Option<f64>,
}

/// `c² > 0` for the quadratic law: `g'' > −2g'/(T⁻+T⁺)` with a positive sum,
/// or `g'' < −2g'/(T⁻+T⁺)` with a negative one.
pub fn quadratic_speed_condition(gp0: f64, gpp0: f64, boundary: &BoundaryStates) -> bool {
    let s = boundary.t_minus + boundary.t_plus;
    if s > 0.0 {
        gpp0 > -2.0 * gp0 / s
    } else if s < 0.0 {
        gpp0 < -2.0 * gp0 / s
    } else {
        gp0 > 0.0
    }
}

pub fn riccati_coefficients(
    model: &ConstitutiveModel,
    boundary: &BoundaryStates,
    nu: f64,
    c_sign: SpeedSign,
) -> Result<RiccatiCoefficients> {
    let ConstitutiveModel::Quadratic { gp0, gpp0 } = *model else {
        return Err(Error::NoClosedForm(format!("Riccati form needs the quadratic law, got {}", model.name())));
    };
    if !quadratic_speed_condition(gp0, gpp0, boundary) {
        let c2 = 1.0 / (gp0 + 0.5 * gpp0 * (boundary.t_minus + boundary.t_plus));
        return Err(Error::NoWave(NoWaveReason::NonPositiveSpeedSquared { c2 }));
    }
    let field = reduced_field(&WaveProblem::new(*model, nu, *boundary, c_sign)?)?;
    // f is exactly quadratic: fit through T = -1, 0, 1
    let (fm, f0, fp) = (field.eval(-1.0)?, field.eval(0.0)?, field.eval(1.0)?);
    let s = boundary.t_minus + boundary.t_plus;
    let theta = (s != 0.0).then(|| {
        let q = boundary.t_minus.powi(2) + boundary.t_plus.powi(2);
        (gp0 + 0.5 * gpp0 * q / s) / (gp0 + 0.5 * gpp0 * s)
    });
    Ok(RiccatiCoefficients { a2: 0.5 * (fp + fm) - f0, a1: 0.5 * (fp - fm), a0: f0, theta })
}

/// Rate `k` and shape `b` of `T' = k T(1 − T)(T + b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicShape {
    pub rate: f64,
    pub b: f64,
}

impl CubicShape {
    /// Fits the cubic shape to a normalized field. Fails when `f` is not of
    /// that form.
    pub fn from_field(field: &ReducedField) -> Result<Self> {
        if !field.boundary.is_normalized() {
            return Err(Error::NoClosedForm("cubic shape needs the normalized states".into()));
        }
        let q = |t: f64| -> Result<f64> { Ok(field.eval(t)? / (t * (1.0 - t))) };
        let (q1, q3) = (q(0.25)?, q(0.75)?);
        let rate = 2.0 * (q3 - q1);
        if !(rate.abs() > 1e-10 * (q1.abs() + q3.abs())) || !rate.is_finite() {
            return Err(Error::NoClosedForm("reduced field has no cubic term".into()));
        }
        let b = q1 / rate - 0.25;
        let probe = q(0.5)?;
        if (probe - rate * (0.5 + b)).abs() > 1e-10 * probe.abs().max(rate.abs()) {
            return Err(Error::NoClosedForm("reduced field is not of the form kT(1-T)(T+b)".into()));
        }
        Ok(CubicShape { rate, b })
    }
}

/// Log form of `T^(1+b) / ((1−T)^b (T+b)) = exp(b(1+b) k ξ) / (1+2b)`.
impl ImplicitRelation for CubicShape {
    fn residual(&self, p: UnitPoint, xi: f64) -> f64 {
        let b = self.b;
        (1.0 + b) * p.t.ln() - b * p.complement.ln() - (p.t + b).ln() + (1.0 + 2.0 * b).ln()
            - b * (1.0 + b) * self.rate * xi
    }
}

/// Left side minus right side of the cubic implicit solution, non-log form.
pub fn cubic_implicit_relation(shape: &CubicShape, t: f64, xi: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("cubic implicit relation needs 0 < T < 1, got {t}")));
    }
    let b = shape.b;
    if !(b > 0.0) {
        return Err(Error::Domain(format!("cubic implicit relation needs b > 0, got {b}")));
    }
    let left = t.powf(1.0 + b) / ((1.0 - t).powf(b) * (t + b));
    let right = (b * (1.0 + b) * shape.rate * xi).exp() / (1.0 + 2.0 * b);
    Ok(left - right)
}

/// `T(ξ) = e^(kξ) / √(3 + e^(2kξ))`, the `b = 1` cubic wave. Needs `k < 0`.
pub fn cubic_explicit(rate: f64, xi: f64) -> Result<f64> {
    if !(rate < 0.0) {
        return Err(Error::NoWave(NoWaveReason::WrongRateSign { rate }));
    }
    Ok(cubic_explicit_unchecked(rate, xi))
}

fn cubic_explicit_unchecked(rate: f64, xi: f64) -> f64 {
    let z = rate * xi;
    if z > 0.0 {
        1.0 / (1.0 + 3.0 * (-2.0 * z).exp()).sqrt()
    } else {
        z.exp() / (3.0 + (2.0 * z).exp()).sqrt()
    }
}

/// `ln H(s)` for the Model B (`r = 2`) wave, with `1 − s` passed separately
/// so values near `s = 1` keep full precision.
///
/// ```text
/// H(s) = (1 − s²)² / (s [3 + s² + 2^(3/2) (1 + s²)^(1/2)]) · ((√(1+s²) + 1)/s)^√2
/// ```
pub fn ln_h(p: UnitPoint) -> f64 {
    let s = p.t;
    let w = (1.0 + s * s).sqrt();
    2.0 * (p.complement.ln() + s.ln_1p()) - s.ln() - (3.0 + s * s + 2.0 * SQRT_2 * w).ln()
        + SQRT_2 * ((w + 1.0) / s).ln()
}

/// `H(s)` for `s > 0`.
pub fn h_function(s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("H(s) needs s > 0, got {s}")));
    }
    if s == 1.0 {
        return Ok(0.0);
    }
    if s > 1.0 {
        // (1 - s²)² is even in (1 - s); only its magnitude enters the log
        return Ok(ln_h(UnitPoint { t: s, complement: s - 1.0 }).exp());
    }
    Ok(ln_h(UnitPoint::new(s)).exp())
}

/// `ln H(T) = ln H(1/2) + ξ/(νc)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HRelation {
    pub nu: f64,
    pub c: f64,
}

impl ImplicitRelation for HRelation {
    fn residual(&self, p: UnitPoint, xi: f64) -> f64 {
        ln_h(p) - ln_h(UnitPoint::new(0.5)) - xi / (self.nu * self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClosedFormSolution {
    /// `T = 1/(1 + e^(a₂ξ))`.
    Logistic {
        a2: f64,
    },
    /// `T = e^(kξ)/√(3 + e^(2kξ))`.
    CubicExplicit {
        rate: f64,
    },
    CubicImplicit {
        rate: f64,
        b: f64,
    },
    /// Model A with `n = 1`: the explicit cubic form with rate `κ`.
    ModelAN1 {
        rate: f64,
    },
    ModelBR2 {
        nu: f64,
        c: f64,
    },
}

impl ClosedFormSolution {
    pub fn kind(&self) -> &'static str {
        match self {
            ClosedFormSolution::Logistic { .. } => "logistic",
            ClosedFormSolution::CubicExplicit { .. } => "cubic-explicit",
            ClosedFormSolution::CubicImplicit { .. } => "cubic-implicit",
            ClosedFormSolution::ModelAN1 { .. } => "modelA-n1",
            ClosedFormSolution::ModelBR2 { .. } => "modelB-r2",
        }
    }

    /// `T(ξ)`.
    pub fn stress(&self, xi: f64) -> Result<f64> {
        match *self {
            ClosedFormSolution::Logistic { a2 } => Ok(1.0 / (1.0 + (a2 * xi).exp())),
            ClosedFormSolution::CubicExplicit { rate } | ClosedFormSolution::ModelAN1 { rate } => {
                Ok(cubic_explicit_unchecked(rate, xi))
            }
            ClosedFormSolution::CubicImplicit { rate, b } => invert_implicit(&CubicShape { rate, b }, xi),
            ClosedFormSolution::ModelBR2 { nu, c } => invert_implicit(&HRelation { nu, c }, xi),
        }
    }

    /// `T'` as a function of `T` along this solution.
    pub fn rate_law(&self, t: f64) -> f64 {
        match *self {
            ClosedFormSolution::Logistic { a2 } => -a2 * t * (1.0 - t),
            ClosedFormSolution::CubicExplicit { rate } | ClosedFormSolution::ModelAN1 { rate } => {
                rate * t * (1.0 - t * t)
            }
            ClosedFormSolution::CubicImplicit { rate, b } => rate * t * (1.0 - t) * (t + b),
            ClosedFormSolution::ModelBR2 { nu, c } => t / (nu * c) * (1.0 - SQRT_2 / (1.0 + t * t).sqrt()),
        }
    }

    /// `T'(ξ)`; the logistic case uses its explicit derivative.
    pub fn slope(&self, xi: f64) -> Result<f64> {
        match *self {
            ClosedFormSolution::Logistic { a2 } => {
                let e = (a2 * xi).exp();
                if e.is_finite() {
                    Ok(-a2 * e / ((1.0 + e) * (1.0 + e)))
                } else {
                    Ok(-a2 * (-a2 * xi).exp())
                }
            }
            _ => Ok(self.rate_law(self.stress(xi)?)),
        }
    }

    /// `d = 1 / max |T'|` (unit jump).
    pub fn effective_width(&self) -> Result<f64> {
        let m = peak(|t| Ok(self.rate_law(t).abs()), 0.0, 1.0, 512)?;
        if m == 0.0 {
            return Err(Error::DegenerateProfile);
        }
        Ok(1.0 / m)
    }

    /// Closed form for a normalized admissible field, when one exists.
    pub fn for_field(field: &ReducedField) -> Result<Self> {
        if !field.boundary.is_normalized() {
            return Err(Error::NoClosedForm("closed forms assume T- = 1, T+ = 0".into()));
        }
        let sign = if field.c > 0.0 { SpeedSign::Positive } else { SpeedSign::Negative };
        match field.model {
            ConstitutiveModel::Quadratic { .. } => {
                let k = riccati_coefficients(&field.model, &field.boundary, field.nu, sign)?;
                logistic_profile(k.a2)
            }
            ConstitutiveModel::Cubic { gpp0, .. } => {
                let shape = CubicShape::from_field(field)?;
                if !(shape.rate < 0.0) {
                    return Err(Error::NoWave(NoWaveReason::WrongRateSign { rate: shape.rate }));
                }
                if gpp0 == 0.0 {
                    Ok(ClosedFormSolution::CubicExplicit { rate: shape.rate })
                } else if shape.b > 0.0 {
                    Ok(ClosedFormSolution::CubicImplicit { rate: shape.rate, b: shape.b })
                } else {
                    Err(Error::NoClosedForm(format!("cubic implicit form needs b > 0, got b = {}", shape.b)))
                }
            }
            ConstitutiveModel::ModelA { n: 1.0, .. } => model_a_n1_profile(&field.model, field.nu, sign),
            ConstitutiveModel::ModelA { alpha, beta, gamma, n }
                if beta == 0.0 && n == -0.5 && alpha == 1.0 && gamma == 2.0 =>
            {
                model_b_r2_profile(field.nu, sign)
            }
            ConstitutiveModel::ModelB { r: 2.0 } => model_b_r2_profile(field.nu, sign),
            m => Err(Error::NoClosedForm(format!("no closed form for {m}; use the ode or quadrature method"))),
        }
    }
}

/// The logistic wave of the quadratic law. Needs `a₂ > 0`.
pub fn logistic_profile(a2: f64) -> Result<ClosedFormSolution> {
    if !(a2 > 0.0) {
        return Err(Error::NoWave(NoWaveReason::WrongRateSign { rate: a2 }));
    }
    Ok(ClosedFormSolution::Logistic { a2 })
}

/// Model A with `n = 1`: `g(1)T − g(T) = (αγ/2) T(1 − T²)`, so the wave is
/// the explicit cubic form with `κ = αγ / (2 ν c g(1))`.
pub fn model_a_n1_profile(model: &ConstitutiveModel, nu: f64, c_sign: SpeedSign) -> Result<ClosedFormSolution> {
    let ConstitutiveModel::ModelA { alpha, gamma, n, .. } = *model else {
        return Err(Error::NoClosedForm(format!("expected model A, got {}", model.name())));
    };
    if n != 1.0 {
        return Err(Error::NoClosedForm(format!("model A closed form needs n = 1, got {n}")));
    }
    if !(alpha > 0.0 && gamma > 0.0) {
        return Err(Error::NoWave(NoWaveReason::FieldVanishes));
    }
    let problem = WaveProblem::normalized(*model, nu, c_sign)?;
    if let Existence::NoWave(reason) = existence_gate(&problem) {
        return Err(Error::NoWave(reason));
    }
    let field = reduced_field(&problem)?;
    let shape = CubicShape::from_field(&field)?;
    debug_assert!((shape.b - 1.0).abs() < 1e-9);
    Ok(ClosedFormSolution::ModelAN1 { rate: shape.rate })
}

/// Model B with `r = 2`, defined implicitly by `H(T) = H(1/2) e^(ξ/νc)`.
/// Only `c > 0` gives the `1 → 0` wave; the other sign swaps the limits.
pub fn model_b_r2_profile(nu: f64, c_sign: SpeedSign) -> Result<ClosedFormSolution> {
    if c_sign == SpeedSign::Negative {
        return Err(Error::NoWave(NoWaveReason::WrongDirection));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::NoWave(NoWaveReason::ZeroViscosity));
    }
    Ok(ClosedFormSolution::ModelBR2 { nu, c: 2f64.powf(0.25) })
}
