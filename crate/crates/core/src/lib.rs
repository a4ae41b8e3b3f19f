//! Noise modelling and parameter inversion for homodyne measurements of
//! multi-spatial-mode two-mode squeezed light.
//!
//! * [`gaussian`]: covariance-matrix engine used as a first-principles oracle.
//! * [`noise_model`]: closed-form probe, conjugate and joint-quadrature noises.
//! * [`circuit`]: the `.qnet` text format for Gaussian optical networks.
//! * [`estimator`]: recovers gain and transmissions from measured noises.
//! * [`curves`]: theory-curve sweeps over gain or visibility.
//! * [`io`]: measurement CSV ingestion and deterministic number formatting.

// `!(x >= lo)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimator;
pub mod gaussian;
pub mod io;
pub mod circuit;
pub mod curves;
pub mod noise_model;

pub use curves::{SweepAxis, SweepSpec, SweepTable};
pub use error::{Error, Result};
pub use estimator::{Estimate, EstimateResult, Infeasibility, MeasurementPoint, Summary};
pub use circuit::{CircuitSpec, Diagnostic, DiagnosticKind, Element};
pub use gaussian::{GaussianState, ModeLabel, Sign};
pub use noise_model::{ModelParams, NoiseQuartet, Observable};
