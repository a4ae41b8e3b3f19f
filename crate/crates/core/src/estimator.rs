//! Recovers gain and arm transmissions from measured noises.
//!
//! For assumed thermal fractions and measured visibilities, the probe,
//! conjugate and squeezed noises fix `(G, eta_p, eta_c)` in closed form:
//!
//! ```text
//! w  = V^2 + eps (1 - V^2)
//! A  = (G-1) eta_p = (probe - 1) / (2 w_p)
//! B  = (G-1) eta_c = (conj  - 1) / (2 w_c)
//! K  = (1 + A w_p + B w_c - squeezed) / (2 V_p V_c sqrt(A B)) = sqrt(G / (G-1))
//! G  = K^2 / (K^2 - 1)
//! ```
//!
//! The anti-squeezed noise is not used for the solve; it is compared against
//! the model prediction as a consistency residual.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, invalid, Error, Result};
use crate::io::{remove_floor, FloorError};
use crate::noise_model::{self, from_db, to_db, ModelParams, NoiseQuartet};

/// Rounding slack on recovered transmissions before a point counts as
/// "transmission above unity".
const ETA_SLACK: f64 = 1e-9;

/// One measured operating point; noises in dB relative to shot noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPoint {
    pub label: String,
    pub probe_db: f64,
    pub conjugate_db: f64,
    pub squeezed_db: f64,
    pub antisqueezed_db: f64,
    pub v_p: f64,
    pub v_c: f64,
    /// Detector dark noise relative to shot noise, removed before inversion.
    pub electronic_floor_db: Option<f64>,
}

impl MeasurementPoint {
    /// The point the closed-form model predicts for `params`.
    pub fn from_model(label: impl Into<String>, params: &ModelParams) -> Result<Self> {
        let q = NoiseQuartet::from_params(params);
        Ok(MeasurementPoint {
            label: label.into(),
            probe_db: to_db(q.probe)?,
            conjugate_db: to_db(q.conjugate)?,
            squeezed_db: to_db(q.squeezed)?,
            antisqueezed_db: to_db(q.antisqueezed)?,
            v_p: params.v_p,
            v_c: params.v_c,
            electronic_floor_db: None,
        })
    }

    /// Linear, floor-corrected, shot-noise-normalized noises.
    pub fn linear_noises(&self) -> std::result::Result<NoiseQuartet, FloorError> {
        let floor = self.electronic_floor_db.map(from_db);
        let get = |column: &'static str, db: f64| remove_floor(column, from_db(db), floor);
        Ok(NoiseQuartet {
            probe: get("probe_db", self.probe_db)?,
            conjugate: get("conjugate_db", self.conjugate_db)?,
            squeezed: get("squeezed_db", self.squeezed_db)?,
            antisqueezed: get("antisqueezed_db", self.antisqueezed_db)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub gain: f64,
    pub eta_p: f64,
    pub eta_c: f64,
    /// Measured minus predicted anti-squeezing, dB.
    pub antisqueezed_residual_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    NoExcessNoise,
    CorrelationBelowBound { k: f64 },
    TransmissionAboveUnity { gain: f64, eta_p: f64, eta_c: f64 },
    InvalidMeasurement(String),
}

impl Infeasibility {
    /// Stable kebab-case identifier for machine-readable output.
    pub fn code(&self) -> &'static str {
        match self {
            Infeasibility::NoExcessNoise => "no-excess-noise",
            Infeasibility::CorrelationBelowBound { .. } => "correlation-below-bound",
            Infeasibility::TransmissionAboveUnity { .. } => "transmission-above-unity",
            Infeasibility::InvalidMeasurement(_) => "invalid-measurement",
        }
    }
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::NoExcessNoise => write!(f, "no excess noise"),
            Infeasibility::CorrelationBelowBound { k } => {
                write!(f, "joint-quadrature correlation below model bound for given visibilities (K = {k})")
            }
            Infeasibility::TransmissionAboveUnity { gain, eta_p, eta_c } => write!(
                f,
                "transmission above unity (G = {gain}, eta_p = {eta_p}, eta_c = {eta_c})"
            ),
            Infeasibility::InvalidMeasurement(m) => write!(f, "invalid measurement: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EstimateResult {
    Feasible(Estimate),
    Infeasible(Infeasibility),
}

impl EstimateResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, EstimateResult::Feasible(_))
    }

    pub fn estimate(&self) -> Option<&Estimate> {
        match self {
            EstimateResult::Feasible(e) => Some(e),
            EstimateResult::Infeasible(_) => None,
        }
    }
}

/// Solves for `(G, eta_p, eta_c)` at one measurement point.
pub fn invert_point(m: &MeasurementPoint, eps_p: f64, eps_c: f64) -> EstimateResult {
    use EstimateResult::Infeasible;

    for (name, x, lo, hi) in [("eps_p", eps_p, 0.0, 1.0), ("eps_c", eps_c, 0.0, 1.0), ("v_p", m.v_p, 0.0, 1.0), ("v_c", m.v_c, 0.0, 1.0)] {
        if let Err(e) = check_range(name, x, lo, hi) {
            return Infeasible(Infeasibility::InvalidMeasurement(e.to_string()));
        }
    }
    let q = match m.linear_noises() {
        Ok(q) => q,
        Err(e) => return Infeasible(Infeasibility::InvalidMeasurement(e.to_string())),
    };
    if m.v_p == 0.0 || m.v_c == 0.0 {
        return Infeasible(Infeasibility::InvalidMeasurement("zero visibility leaves the gain undetermined".into()));
    }
    if !(q.probe > 1.0 && q.conjugate > 1.0) {
        return Infeasible(Infeasibility::NoExcessNoise);
    }

    let wp = m.v_p * m.v_p + eps_p * (1.0 - m.v_p * m.v_p);
    let wc = m.v_c * m.v_c + eps_c * (1.0 - m.v_c * m.v_c);
    let a = (q.probe - 1.0) / (2.0 * wp);
    let b = (q.conjugate - 1.0) / (2.0 * wc);
    let k = (1.0 + a * wp + b * wc - q.squeezed) / (2.0 * m.v_p * m.v_c * (a * b).sqrt());
    if !(k > 1.0) || !k.is_finite() {
        return Infeasible(Infeasibility::CorrelationBelowBound { k });
    }
    let k2 = k * k;
    let gain = k2 / (k2 - 1.0);
    let (eta_p, eta_c) = (a / (gain - 1.0), b / (gain - 1.0));
    if eta_p > 1.0 + ETA_SLACK || eta_c > 1.0 + ETA_SLACK {
        return Infeasible(Infeasibility::TransmissionAboveUnity { gain, eta_p, eta_c });
    }

    let predicted = noise_model::antisqueezed_noise(&ModelParams {
        gain,
        eta_p,
        eta_c,
        v_p: m.v_p,
        v_c: m.v_c,
        eps_p,
        eps_c,
    });
    let antisqueezed_residual_db = match (to_db(q.antisqueezed), to_db(predicted)) {
        (Ok(meas), Ok(pred)) => meas - pred,
        _ => f64::NAN,
    };
    EstimateResult::Feasible(Estimate { gain, eta_p, eta_c, antisqueezed_residual_db })
}

/// [`invert_point`] over a batch, in input order.
pub fn invert_all(points: &[MeasurementPoint], eps_p: f64, eps_c: f64) -> Vec<EstimateResult> {
    points.par_iter().map(|m| invert_point(m, eps_p, eps_c)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample (n - 1) standard deviation.
    pub std: f64,
}

impl Stat {
    fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Stat { mean, std: var.sqrt() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub gain: Stat,
    pub eta_p: Stat,
    pub eta_c: Stat,
    pub feasible_count: usize,
    pub infeasible_count: usize,
}

/// Mean and sample standard deviation over the feasible results.
pub fn aggregate(results: &[EstimateResult]) -> Result<Summary> {
    let ok: Vec<&Estimate> = results.iter().filter_map(EstimateResult::estimate).collect();
    if ok.len() < 2 {
        return Err(Error::InsufficientData { feasible: ok.len(), required: 2 });
    }
    let column = |f: fn(&Estimate) -> f64| Stat::of(&ok.iter().map(|e| f(e)).collect::<Vec<_>>());
    Ok(Summary {
        gain: column(|e| e.gain),
        eta_p: column(|e| e.eta_p),
        eta_c: column(|e| e.eta_c),
        feasible_count: ok.len(),
        infeasible_count: results.len() - ok.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub eps_p: f64,
    pub eps_c: f64,
    pub summary: Summary,
}

/// Inverts every point at each `eps_p` in `grid` (with `eps_c` fixed) and
/// summarizes the scatter of the recovered parameters.
pub fn epsilon_scan(points: &[MeasurementPoint], grid: &[f64], eps_c: f64) -> Result<Vec<ScanRow>> {
    if grid.is_empty() {
        return Err(invalid("empty eps_p grid"));
    }
    for &e in grid {
        check_range("eps_p", e, 0.0, 1.0)?;
    }
    check_range("eps_c", eps_c, 0.0, 1.0)?;
    if points.len() < 2 {
        return Err(Error::InsufficientData { feasible: points.len(), required: 2 });
    }
    grid.iter()
        .map(|&eps_p| {
            let summary = aggregate(&invert_all(points, eps_p, eps_c))?;
            Ok(ScanRow { eps_p, eps_c, summary })
        })
        .collect()
}

/// The scan row with the least gain scatter.
pub fn most_consistent(rows: &[ScanRow]) -> Option<&ScanRow> {
    rows.iter().min_by(|a, b| a.summary.gain.std.total_cmp(&b.summary.gain.std))
}
