//! Constitutive laws `g(T)` relating stress to the strain measure `ε + ν ε_t`.
//!
//! Every law satisfies `g(0) = 0`. Models B, C and D contain `|T|`; their
//! derivatives at `T = 0` are taken from the right.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Catalog of one-dimensional constitutive laws with dimensionless parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstitutiveModel {
    /// `g = g'(0) T`
    Linear { gp0: f64 },
    /// `g = g'(0) T + g''(0) T²/2`
    Quadratic { gp0: f64, gpp0: f64 },
    /// `g = g'(0) T + g''(0) T²/2 + g'''(0) T³/6`
    Cubic { gp0: f64, gpp0: f64, gppp0: f64 },
    /// `g = βT + α (1 + γT²/2)^n T`
    ModelA { alpha: f64, beta: f64, gamma: f64, n: f64 },
    /// `g = T / (1 + |T|^r)^(1/r)`
    ModelB { r: f64 },
    /// `g = α {[1 − exp(−βT/(1 + δ|T|))] + γT/(1 + |T|)}`
    ModelC { alpha: f64, beta: f64, gamma: f64, delta: f64 },
    /// `g = α (1 − 1/(1 + T/(1 + δ|T|))) + β (1 + 1/(1 + γT²))^n T`
    ModelD { alpha: f64, beta: f64, gamma: f64, delta: f64, n: f64 },
}

pub const MODEL_NAMES: [&str; 7] = ["linear", "quadratic", "cubic", "modelA", "modelB", "modelC", "modelD"];

/// Result of the `g(1) > 0` admissibility test for the normalized wave `1 → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    pub g1: f64,
    pub positive: bool,
    /// For Models C and D: the compressive stress closest to zero at which
    /// `|g(T)|` first exceeds one, if it does within `T ∈ [-10, 0)`.
    pub compressive_limit: Option<f64>,
}

impl ConstitutiveModel {
    pub fn name(&self) -> &'static str {
        match self {
            ConstitutiveModel::Linear { .. } => "linear",
            ConstitutiveModel::Quadratic { .. } => "quadratic",
            ConstitutiveModel::Cubic { .. } => "cubic",
            ConstitutiveModel::ModelA { .. } => "modelA",
            ConstitutiveModel::ModelB { .. } => "modelB",
            ConstitutiveModel::ModelC { .. } => "modelC",
            ConstitutiveModel::ModelD { .. } => "modelD",
        }
    }

    /// Default parameters for a catalog model, by name.
    pub fn catalog_default(name: &str) -> Option<Self> {
        use ConstitutiveModel::*;
        Some(match name {
            "linear" => Linear { gp0: 1.0 },
            "quadratic" => Quadratic { gp0: 1.0, gpp0: -0.6 },
            "cubic" => Cubic { gp0: 1.0, gpp0: 0.0, gppp0: 0.5 },
            "modelA" => ModelA { alpha: 0.5, beta: -0.01, gamma: 1.0, n: -0.5 },
            "modelB" => ModelB { r: 2.0 },
            "modelC" => ModelC { alpha: 0.5, beta: 0.01, gamma: 1.0, delta: 1.0 },
            "modelD" => ModelD { alpha: 0.5, beta: 0.01, gamma: 1.0, delta: 1.0, n: 0.5 },
            _ => return None,
        })
    }

    pub fn catalog() -> Vec<Self> {
        MODEL_NAMES.iter().map(|n| Self::catalog_default(n).unwrap()).collect()
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        use ConstitutiveModel::*;
        match *self {
            Linear { gp0 } => vec![("gp0", gp0)],
            Quadratic { gp0, gpp0 } => vec![("gp0", gp0), ("gpp0", gpp0)],
            Cubic { gp0, gpp0, gppp0 } => vec![("gp0", gp0), ("gpp0", gpp0), ("gppp0", gppp0)],
            ModelA { alpha, beta, gamma, n } => {
                vec![("alpha", alpha), ("beta", beta), ("gamma", gamma), ("n", n)]
            }
            ModelB { r } => vec![("r", r)],
            ModelC { alpha, beta, gamma, delta } => {
                vec![("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)]
            }
            ModelD { alpha, beta, gamma, delta, n } => {
                vec![("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta), ("n", n)]
            }
        }
    }

    /// Builds a model from a name and a parameter map. Parameters that are not
    /// given fall back to the catalog defaults; unknown names are rejected.
    pub fn from_params(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let base = Self::catalog_default(name)
            .ok_or_else(|| Error::Config(format!("unknown model `{name}`; expected one of {MODEL_NAMES:?}")))?;
        let known: Vec<&str> = base.params().iter().map(|(k, _)| *k).collect();
        if let Some(bad) = params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Config(format!("model `{name}` has no parameter `{bad}`; expected {known:?}")));
        }
        let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
        use ConstitutiveModel::*;
        let model = match base {
            Linear { gp0 } => Linear { gp0: get("gp0", gp0) },
            Quadratic { gp0, gpp0 } => Quadratic { gp0: get("gp0", gp0), gpp0: get("gpp0", gpp0) },
            Cubic { gp0, gpp0, gppp0 } => {
                Cubic { gp0: get("gp0", gp0), gpp0: get("gpp0", gpp0), gppp0: get("gppp0", gppp0) }
            }
            ModelA { alpha, beta, gamma, n } => ModelA {
                alpha: get("alpha", alpha),
                beta: get("beta", beta),
                gamma: get("gamma", gamma),
                n: get("n", n),
            },
            ModelB { r } => ModelB { r: get("r", r) },
            ModelC { alpha, beta, gamma, delta } => ModelC {
                alpha: get("alpha", alpha),
                beta: get("beta", beta),
                gamma: get("gamma", gamma),
                delta: get("delta", delta),
            },
            ModelD { alpha, beta, gamma, delta, n } => ModelD {
                alpha: get("alpha", alpha),
                beta: get("beta", beta),
                gamma: get("gamma", gamma),
                delta: get("delta", delta),
                n: get("n", n),
            },
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let model = self.name();
        for (field, value) in self.params() {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { model, field, value, reason: "must be finite" });
            }
        }
        match *self {
            ConstitutiveModel::ModelA { alpha, gamma, .. } => {
                if alpha < 0.0 {
                    return Err(Error::InvalidParameter {
                        model,
                        field: "alpha",
                        value: alpha,
                        reason: "must be non-negative",
                    });
                }
                if gamma < 0.0 {
                    return Err(Error::InvalidParameter {
                        model,
                        field: "gamma",
                        value: gamma,
                        reason: "must be non-negative",
                    });
                }
            }
            ConstitutiveModel::ModelB { r } if r <= 0.0 => {
                return Err(Error::InvalidParameter { model, field: "r", value: r, reason: "must be positive" });
            }
            _ => {}
        }
        Ok(())
    }

    /// `g(T)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = match *self {
            ConstitutiveModel::ModelB { r } => model_b_value(r, t),
            _ => self.jet(t).v,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DomainOverflow { model: self.name(), t })
        }
    }

    /// `d^order g / dT^order` for `order` in `1..=3`.
    pub fn derivative(&self, t: f64, order: u8) -> Result<f64> {
        assert!((1..=3).contains(&order), "derivative order must be 1, 2 or 3");
        let v = match *self {
            ConstitutiveModel::ModelB { r } => model_b_derivative(r, t, order),
            _ => self.jet(t).derivative(order),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DomainOverflow { model: self.name(), t })
        }
    }

    /// Value and first three derivatives at `t`, unchecked.
    pub fn jet(&self, t: f64) -> Jet {
        let x = Jet::variable(t);
        match *self {
            ConstitutiveModel::Linear { gp0 } => x * gp0,
            ConstitutiveModel::Quadratic { gp0, gpp0 } => {
                Jet { v: gp0 * t + 0.5 * gpp0 * t * t, d1: gp0 + gpp0 * t, d2: gpp0, d3: 0.0 }
            }
            ConstitutiveModel::Cubic { gp0, gpp0, gppp0 } => Jet {
                v: gp0 * t + 0.5 * gpp0 * t * t + gppp0 * t * t * t / 6.0,
                d1: gp0 + gpp0 * t + 0.5 * gppp0 * t * t,
                d2: gpp0 + gppp0 * t,
                d3: gppp0,
            },
            ConstitutiveModel::ModelA { alpha, beta, gamma, n } => {
                let u = 1.0 + 0.5 * gamma * (x * x);
                beta * x + alpha * (u.powf(n) * x)
            }
            ConstitutiveModel::ModelB { r } => Jet {
                v: model_b_value(r, t),
                d1: model_b_derivative(r, t, 1),
                d2: model_b_derivative(r, t, 2),
                d3: model_b_derivative(r, t, 3),
            },
            ConstitutiveModel::ModelC { alpha, beta, gamma, delta } => {
                let p = x / (1.0 + delta * x.abs());
                let q = x / (1.0 + x.abs());
                alpha * ((1.0 - (-beta * p).exp()) + gamma * q)
            }
            ConstitutiveModel::ModelD { alpha, beta, gamma, delta, n } => {
                let p = x / (1.0 + delta * x.abs());
                let v = 1.0 + 1.0 / (1.0 + gamma * (x * x));
                alpha * (1.0 - 1.0 / (1.0 + p)) + beta * (v.powf(n) * x)
            }
        }
    }

    /// `g(1)` and whether it is positive, as required for the wave `1 → 0`.
    pub fn check_g1_positive(&self) -> Admissibility {
        let g1 = self.eval(1.0).unwrap_or(f64::NAN);
        let compressive_limit = match self {
            ConstitutiveModel::ModelC { .. } | ConstitutiveModel::ModelD { .. } => {
                (1..=1000).map(|i| -(i as f64) * 0.01).find(|&t| self.eval(t).map(|g| g.abs() > 1.0).unwrap_or(true))
            }
            _ => None,
        };
        Admissibility { g1, positive: g1 > 0.0, compressive_limit }
    }
}

fn model_b_value(r: f64, t: f64) -> f64 {
    let s = t.abs();
    if s <= 1.0 {
        t / (1.0 + s.powf(r)).powf(1.0 / r)
    } else {
        // same expression divided through by |T|, avoiding overflow of |T|^r
        t.signum() / (s.powf(-r) + 1.0).powf(1.0 / r)
    }
}

fn model_b_derivative(r: f64, t: f64, order: u8) -> f64 {
    let s = t.abs();
    let sg = if t < 0.0 { -1.0 } else { 1.0 };
    let w = 1.0 + s.powf(r);
    let pow_s = |coef: f64, e: f64| if coef == 0.0 { 0.0 } else { coef * s.powf(e) };
    match order {
        1 => w.powf(-(1.0 + r) / r),
        2 => -(1.0 + r) * sg * pow_s(1.0, r - 1.0) * w.powf(-(1.0 + 2.0 * r) / r),
        _ => {
            -(1.0 + r)
                * (pow_s(r - 1.0, r - 2.0) * w.powf(-(1.0 + 2.0 * r) / r)
                    - pow_s(1.0 + 2.0 * r, 2.0 * r - 2.0) * w.powf(-(1.0 + 3.0 * r) / r))
        }
    }
}

impl fmt::Display for ConstitutiveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for (k, v) in self.params() {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Name plus flat parameter table, as written in config files:
/// `model = "quadratic"`, `params = { gp0 = 1.0, gpp0 = -0.6 }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub model: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<ConstitutiveModel> {
        ConstitutiveModel::from_params(&self.model, &self.params)
    }
}

impl From<&ConstitutiveModel> for ModelSpec {
    fn from(m: &ConstitutiveModel) -> Self {
        ModelSpec {
            model: m.name().to_string(),
            params: m.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

/// Inline form used on the command line: `quadratic` or `quadratic:gp0=1,gpp0=-0.6`.
impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), r),
            None => (s.trim(), ""),
        };
        if name.is_empty() {
            return Err(Error::Config("missing model name".into()));
        }
        let mut params = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) =
                item.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got `{item}`")))?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("parameter `{}`: malformed number `{}`", k.trim(), v.trim())))?;
            params.insert(k.trim().to_string(), value);
        }
        Ok(ModelSpec { model: name.to_string(), params })
    }
}

/// Characteristic scales used to remove units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalScales {
    /// Characteristic length `L`.
    pub length: f64,
    /// Stress scale `μ`.
    pub stress: f64,
    /// Mass density `ρ`.
    pub density: f64,
}

/// A dimensional state: position, time, stress, displacement and viscosity time-scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalQuantities {
    pub x: f64,
    pub t: f64,
    pub stress: f64,
    pub displacement: f64,
    pub viscosity: f64,
}

impl PhysicalScales {
    pub fn new(length: f64, stress: f64, density: f64) -> Result<Self> {
        for (field, value) in [("length", length), ("stress", stress), ("density", density)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidScale { field, value });
            }
        }
        Ok(PhysicalScales { length, stress, density })
    }

    fn time_factor(&self) -> f64 {
        (self.stress / self.density).sqrt() / self.length
    }

    pub fn nondimensionalize(&self, q: &PhysicalQuantities) -> Result<PhysicalQuantities> {
        if !(q.viscosity >= 0.0) {
            return Err(Error::InvalidScale { field: "viscosity", value: q.viscosity });
        }
        let k = self.time_factor();
        Ok(PhysicalQuantities {
            x: q.x / self.length,
            t: q.t * k,
            stress: q.stress / self.stress,
            displacement: q.displacement / self.length,
            viscosity: q.viscosity * k,
        })
    }

    pub fn dimensionalize(&self, q: &PhysicalQuantities) -> PhysicalQuantities {
        let k = self.time_factor();
        PhysicalQuantities {
            x: q.x * self.length,
            t: q.t / k,
            stress: q.stress * self.stress,
            displacement: q.displacement * self.length,
            viscosity: q.viscosity / k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central(model: &ConstitutiveModel, t: f64, order: u8) -> f64 {
        let h = 1e-3;
        let f = |x: f64| {
            if order == 1 {
                model.eval(x).unwrap()
            } else {
                model.derivative(x, order - 1).unwrap()
            }
        };
        (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn model_b_values() {
        let b = ConstitutiveModel::ModelB { r: 2.0 };
        assert!((b.eval(1.0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        assert!((b.derivative(1.0, 1).unwrap() - 0.3535534).abs() < 1e-7);
        // smooth at zero for r = 2: T - T^3/2 + ...
        assert_eq!(b.derivative(0.0, 2).unwrap(), 0.0);
        assert!((b.derivative(0.0, 3).unwrap() + 3.0).abs() < 1e-14);
    }

    #[test]
    fn model_a_figure_value() {
        let a = ConstitutiveModel::ModelA { alpha: 0.5, beta: -0.01, gamma: 1.0, n: -0.5 };
        let expected = -0.01 + 0.5 * 1.5f64.powf(-0.5);
        assert!((a.eval(1.0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.398_248_290_5).abs() < 1e-10);
    }

    #[test]
    fn every_law_vanishes_at_zero() {
        for m in ConstitutiveModel::catalog() {
            assert_eq!(m.eval(0.0).unwrap(), 0.0, "{m}");
        }
    }

    #[test]
    fn quadratic_slope() {
        let q = ConstitutiveModel::Quadratic { gp0: 1.0, gpp0: -0.6 };
        assert!((q.derivative(0.3, 1).unwrap() - 0.82).abs() < 1e-15);
        let l = ConstitutiveModel::Linear { gp0: 1.0 };
        assert_eq!(l.derivative(3.7, 2).unwrap(), 0.0);
    }

    #[test]
    fn catalog_derivatives_match_differences() {
        for m in ConstitutiveModel::catalog() {
            for &t in &[-2.3, -0.7, 0.2, 0.5, 1.4, 3.9] {
                for order in 1..=3 {
                    let a = m.derivative(t, order).unwrap();
                    let fd = central(&m, t, order);
                    assert!((a - fd).abs() <= 1e-6 * a.abs().max(1.0), "{m} T={t} order {order}: {a} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn g1_admissibility() {
        let b = ConstitutiveModel::ModelB { r: 2.0 }.check_g1_positive();
        assert!(b.positive && (b.g1 - 2f64.powf(-0.5)).abs() < 1e-15);
        let a = ConstitutiveModel::ModelA { alpha: 0.0, beta: -0.01, gamma: 1.0, n: 1.0 }.check_g1_positive();
        assert!(!a.positive);
        assert_eq!(a.g1, -0.01);
        let a = ConstitutiveModel::catalog_default("modelA").unwrap().check_g1_positive();
        assert!(a.positive && (a.g1 - 0.398_248_290_5).abs() < 1e-10);
    }

    #[test]
    fn compressive_advisory_for_model_d() {
        let d = ConstitutiveModel::catalog_default("modelD").unwrap().check_g1_positive();
        let limit = d.compressive_limit.expect("model D exceeds unit strain under compression");
        assert!(limit < -1.0 && limit > -3.0, "{limit}");
        let c = ConstitutiveModel::catalog_default("modelC").unwrap().check_g1_positive();
        assert_eq!(c.compressive_limit, None);
        assert_eq!(ConstitutiveModel::ModelB { r: 2.0 }.check_g1_positive().compressive_limit, None);
    }

    #[test]
    fn overflow_is_reported() {
        let c = ConstitutiveModel::ModelC { alpha: 1.0, beta: -800.0, gamma: 1.0, delta: 0.0 };
        let err = c.eval(2.0).unwrap_err();
        assert!(matches!(err, Error::DomainOverflow { model: "modelC", .. }));
    }

    #[test]
    fn invalid_parameters_name_the_field() {
        let err = ConstitutiveModel::ModelB { r: 0.0 }.validate().unwrap_err();
        assert!(err.to_string().contains("`r`"));
        let err = ConstitutiveModel::ModelA { alpha: -1.0, beta: 0.0, gamma: 1.0, n: 1.0 }.validate().unwrap_err();
        assert!(err.to_string().contains("`alpha`"));
        assert!(ConstitutiveModel::Linear { gp0: f64::NAN }.validate().is_err());
    }

    #[test]
    fn inline_spec() {
        let spec: ModelSpec = "quadratic:gp0=1,gpp0=-0.6".parse().unwrap();
        assert_eq!(spec.build().unwrap(), ConstitutiveModel::Quadratic { gp0: 1.0, gpp0: -0.6 });
        let spec: ModelSpec = "modelB".parse().unwrap();
        assert_eq!(spec.build().unwrap(), ConstitutiveModel::ModelB { r: 2.0 });
        assert!("modelB:s=1".parse::<ModelSpec>().unwrap().build().is_err());
        assert!("modelB:r=abc".parse::<ModelSpec>().is_err());
        assert!("nonsense".parse::<ModelSpec>().unwrap().build().is_err());
    }

    #[test]
    fn scaling() {
        let s = PhysicalScales::new(2.0, 4.0, 1.0).unwrap();
        let q = PhysicalQuantities { x: 2.0, t: 1.0, stress: 8.0, displacement: 1.0, viscosity: 3.0 };
        let d = s.nondimensionalize(&q).unwrap();
        assert_eq!(d.x, 1.0);
        assert_eq!(d.t, 1.0);
        assert_eq!(d.stress, 2.0);
        assert_eq!(d.displacement, 0.5);
        assert_eq!(d.viscosity, 3.0);
        let unit = PhysicalScales::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(unit.nondimensionalize(&q).unwrap(), q);
        assert!(PhysicalScales::new(0.0, 1.0, 1.0).is_err());
        assert!(PhysicalScales::new(1.0, -1.0, 1.0).is_err());
    }
}
