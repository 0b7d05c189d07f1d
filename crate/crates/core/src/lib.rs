//! Spectral cutting planes for LP outer approximations of the PSD+RLT
//! relaxation of quadratically constrained quadratic programs.
//!
//! A problem is lifted to the McCormick LP with [`model::lift`], then
//! [`engine::run`] alternates LP solves with separation of PSD cuts
//! (optionally sparsified, optionally with minor cuts). [`harness`] turns the
//! resulting traces into gap-closed comparisons.

pub mod cuts;
pub mod engine;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod scalar;

pub use error::{Error, Result};

pub type Problem = model::QcqpProblem<f64>;
pub type Model = model::ExtendedModel<f64>;
pub type Xtilde = model::XtildeView<f64>;
pub type ProblemF32 = model::QcqpProblem<f32>;
pub type ModelF32 = model::ExtendedModel<f32>;
pub type XtildeF32 = model::XtildeView<f32>;
