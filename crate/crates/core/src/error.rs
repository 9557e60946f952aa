use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a problem admits no heteroclinic connection between its boundary states.
#[derive(Debug, Clone, PartialEq)]
pub enum NoWaveReason {
    /// Without viscosity the reduced equation is algebraic and only has constant solutions.
    ZeroViscosity,
    /// The reduced field vanishes identically on the connection interval (linear law).
    FieldVanishes,
    /// The squared speed is not positive; neither of the two ordering cases holds.
    NonPositiveSpeedSquared { c2: f64 },
    /// The field has a zero strictly between the boundary states.
    InteriorEquilibrium { near: f64 },
    /// The field drives the profile away from the downstream state for this speed sign.
    WrongDirection,
    /// A closed-form rate constant has the sign that reverses the limits.
    WrongRateSign { rate: f64 },
}

impl fmt::Display for NoWaveReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoWaveReason::ZeroViscosity => write!(f, "viscosity is zero (elastic solid)"),
            NoWaveReason::FieldVanishes => {
                write!(f, "reduced field vanishes identically (linear constitutive law)")
            }
            NoWaveReason::NonPositiveSpeedSquared { c2 } => write!(
                f,
                "squared wave speed {c2} is not positive: need T- > T+ with g(T-) > g(T+), or T- < T+ with g(T-) < g(T+)"
            ),
            NoWaveReason::InteriorEquilibrium { near } => {
                write!(f, "interior equilibrium near T = {near} blocks the connection")
            }
            NoWaveReason::WrongDirection => {
                write!(f, "field has the wrong sign for this speed direction")
            }
            NoWaveReason::WrongRateSign { rate } => {
                write!(f, "rate constant {rate} has the wrong sign for a decreasing kink")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{model}: parameter `{field}` = {value} is invalid: {reason}")]
    InvalidParameter { model: &'static str, field: &'static str, value: f64, reason: &'static str },
    #[error("{model}: non-finite result at T = {t}")]
    DomainOverflow { model: &'static str, t: f64 },
    #[error("invalid scale `{field}` = {value}: must be positive and finite")]
    InvalidScale { field: &'static str, value: f64 },
    #[error("invalid boundary states: {0}")]
    InvalidBoundary(String),
    #[error("degenerate wave speed: g(T-) equals g(T+)")]
    DegenerateSpeed,
    #[error("no heteroclinic traveling wave: {0}")]
    NoWave(NoWaveReason),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("search interval endpoints must be finite and ordered")]
    NonFiniteInterval,
    #[error("no sign change on [{a}, {b}]")]
    NoSignChange { a: f64, b: f64 },
    #[error("step size underflow at xi = {xi} (step {step:e}); the field is too stiff for an explicit pair")]
    Stiffness { xi: f64, step: f64 },
    #[error("profile left the admissible stress range: T = {t} at xi = {xi}")]
    InconsistentField { xi: f64, t: f64 },
    #[error("reduced field vanishes at T = {t} inside the quadrature grid")]
    BlockedConnection { t: f64 },
    #[error("xi = {xi} is outside the invertible range")]
    OutOfRange { xi: f64 },
    #[error("profile is flat; width is undefined")]
    DegenerateProfile,
    #[error("solution fails the residual check: max |T' - f(T)| = {residual:e} exceeds {tolerance:e}")]
    ResidualCheck { residual: f64, tolerance: f64 },
    #[error("no closed-form solution: {0}")]
    NoClosedForm(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("profiles belong to different models: {0} vs {1}")]
    MixedModels(String, String),
    #[error("malformed profile csv at line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
