//! Theory curves: the model evaluated along one parameter axis.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::noise_model::{to_db, ModelParams, NoiseQuartet, Observable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SweepAxis {
    /// Probe visibility squared; the model sees `v_p = sqrt(x)`.
    #[serde(rename = "vp2")]
    ProbeVisibilitySq,
    #[serde(rename = "vc2")]
    ConjugateVisibilitySq,
    #[serde(rename = "gain")]
    Gain,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::ProbeVisibilitySq => "vp2",
            SweepAxis::ConjugateVisibilitySq => "vc2",
            SweepAxis::Gain => "gain",
        }
    }

    fn domain(self) -> (f64, f64) {
        match self {
            SweepAxis::Gain => (1.0, f64::INFINITY),
            _ => (0.0, 1.0),
        }
    }

    /// `base` with this axis set to `x`.
    pub fn apply(self, base: &ModelParams, x: f64) -> ModelParams {
        match self {
            SweepAxis::ProbeVisibilitySq => ModelParams { v_p: x.sqrt(), ..*base },
            SweepAxis::ConjugateVisibilitySq => ModelParams { v_c: x.sqrt(), ..*base },
            SweepAxis::Gain => ModelParams { gain: x, ..*base },
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vp2" => Ok(SweepAxis::ProbeVisibilitySq),
            "vc2" => Ok(SweepAxis::ConjugateVisibilitySq),
            "gain" => Ok(SweepAxis::Gain),
            _ => Err(invalid(format!("unknown axis `{s}` (expected vp2, vc2 or gain)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ModelParams,
    pub axis: SweepAxis,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    pub observables: Vec<Observable>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.n_points < 2 {
            return Err(invalid(format!("need at least 2 points, got {}", self.n_points)));
        }
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(invalid(format!("range [{}, {}] must satisfy lo < hi", self.lo, self.hi)));
        }
        let (dlo, dhi) = self.axis.domain();
        if self.lo < dlo || self.hi > dhi {
            return Err(invalid(format!(
                "range [{}, {}] leaves the {} domain [{dlo}, {dhi}]",
                self.lo, self.hi, self.axis
            )));
        }
        if self.observables.is_empty() {
            return Err(invalid("no observables selected"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| if i + 1 == self.n_points { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    /// Linear values, one per selected observable.
    pub linear: Vec<f64>,
    pub db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub observables: Vec<Observable>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, obs: Observable) -> Option<Vec<f64>> {
        let i = self.observables.iter().position(|&o| o == obs)?;
        Some(self.rows.iter().map(|r| r.linear[i]).collect())
    }

    /// CSV header: the axis, then `<observable>_linear, <observable>_db` pairs.
    pub fn header(&self) -> Vec<String> {
        let mut h = vec![self.axis.name().to_string()];
        for o in &self.observables {
            h.push(format!("{}_linear", o.name()));
            h.push(format!("{}_db", o.name()));
        }
        h
    }
}

fn evaluate_rows(base: &ModelParams, axis: SweepAxis, xs: &[f64], observables: &[Observable]) -> Result<Vec<SweepRow>> {
    xs.par_iter()
        .map(|&x| {
            let q = NoiseQuartet::from_params(&axis.apply(base, x));
            let linear: Vec<f64> = observables.iter().map(|&o| q.get(o)).collect();
            let db = linear.iter().map(|&v| to_db(v)).collect::<Result<Vec<_>>>()?;
            Ok(SweepRow { x, linear, db })
        })
        .collect()
}

/// Evaluates the model on a uniform grid along `spec.axis`.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let rows = evaluate_rows(&spec.base, spec.axis, &spec.grid(), &spec.observables)?;
    Ok(SweepTable { axis: spec.axis, observables: spec.observables.clone(), rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub x: f64,
    /// Linear model value at `x`.
    pub value: f64,
    pub value_db: f64,
    /// True when the grid minimum sits on the first or last point.
    pub at_edge: bool,
}

/// Minimum of `obs` along the sweep: grid argmin, then a three-point
/// parabolic step when the argmin is interior. The model is re-evaluated at
/// the refined abscissa.
pub fn optimum(spec: &SweepSpec, obs: Observable) -> Result<Optimum> {
    let spec = SweepSpec { observables: vec![obs], ..spec.clone() };
    let table = sweep(&spec)?;
    let ys = table.column(obs).expect("observable requested");
    let xs: Vec<f64> = table.rows.iter().map(|r| r.x).collect();
    let (i, _) = ys
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least two rows");
    let at_edge = i == 0 || i + 1 == ys.len();
    let x = if at_edge {
        xs[i]
    } else {
        let (y0, y1, y2) = (ys[i - 1], ys[i], ys[i + 1]);
        let curvature = y0 - 2.0 * y1 + y2;
        let h = xs[i + 1] - xs[i];
        if curvature > 0.0 {
            (xs[i] + 0.5 * h * (y0 - y2) / curvature).clamp(xs[i - 1], xs[i + 1])
        } else {
            xs[i]
        }
    };
    let value = NoiseQuartet::from_params(&spec.axis.apply(&spec.base, x)).get(obs);
    Ok(Optimum { x, value, value_db: to_db(value)?, at_edge })
}

/// One squeezing-vs-gain curve per visibility, applied to both detectors.
pub fn visibility_family(base: &ModelParams, gains: &[f64], visibilities: &[f64]) -> Result<Vec<(f64, SweepTable)>> {
    if visibilities.is_empty() {
        return Err(invalid("empty visibility list"));
    }
    if gains.is_empty() {
        return Err(invalid("empty gain list"));
    }
    visibilities
        .iter()
        .map(|&v| {
            let p = ModelParams { v_p: v, v_c: v, ..*base };
            p.validate()?;
            if let Some(g) = gains.iter().find(|g| !(**g >= 1.0)) {
                return Err(invalid(format!("gain {g} below 1")));
            }
            let rows = evaluate_rows(&p, SweepAxis::Gain, gains, &[Observable::Squeezed])?;
            Ok((v, SweepTable { axis: SweepAxis::Gain, observables: vec![Observable::Squeezed], rows }))
        })
        .collect()
}
