//! Heteroclinic traveling waves `T(x − ct)` of the one-dimensional
//! strain-limiting viscoelastic equation `T_xx + ν T_xxt = g(T)_tt`.
//!
//! The crate covers the whole pipeline: constitutive laws and their
//! derivatives ([`constitutive`]), the reduction to `T' = f(T)` with wave
//! speed, existence and equilibria ([`wave`]), the analytic solutions
//! ([`closed_form`]), numerical profiles ([`profile`]), independent checks
//! ([`validation`]) and file formats ([`config`], [`output`]).
//!
//! ```
//! use kinkwave::{ConstitutiveModel, WaveProblem, SpeedSign, reduced_field};
//!
//! let model = ConstitutiveModel::ModelB { r: 2.0 };
//! let field = reduced_field(&WaveProblem::normalized(model, 0.5, SpeedSign::Positive)?)?;
//! assert!((field.c2 - 2f64.sqrt()).abs() < 1e-12);
//! # Ok::<(), kinkwave::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod config;
pub mod constitutive;
pub mod error;
pub mod jet;
pub mod ode;
pub mod output;
pub mod par;
pub mod profile;
pub mod quadrature;
pub mod roots;
pub mod validation;
pub mod wave;

pub use closed_form::ClosedFormSolution;
pub use config::{parse_config, RunConfig};
pub use constitutive::{ConstitutiveModel, ModelSpec};
pub use error::{Error, NoWaveReason, Result};
pub use profile::{integrate_profile, quadrature_profile, IntegratorConfig, Method, Profile, Sample};
pub use validation::{validate_all, validate_model, ValidationReport};
pub use wave::{
    existence_gate, find_equilibria, reduced_field, BoundaryStates, Existence, ReducedField, SpeedSign, WaveProblem,
};
