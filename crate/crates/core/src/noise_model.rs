//! Closed-form homodyne noise model for a two-mode squeezer followed by lumped
//! loss and imperfect detector visibility.
//!
//! All variances are linear and shot-noise normalized (vacuum = 1). The
//! visibility beam splitter couples in a mixture of vacuum and an uncorrelated
//! thermal mode carrying the same noise as the signal; `eps` is the thermal
//! fraction.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, invalid, Result};

/// Parameters of the noise model.
///
/// `eta_p`, `eta_c` are intensity transmittances applied after the ideal gain
/// medium, `v_p`, `v_c` the homodyne visibilities and `eps_p`, `eps_c` the
/// thermal fractions of the mode-mismatch ancilla.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub gain: f64,
    pub eta_p: f64,
    pub eta_c: f64,
    pub v_p: f64,
    pub v_c: f64,
    pub eps_p: f64,
    pub eps_c: f64,
}

impl ModelParams {
    pub fn new(
        gain: f64,
        eta_p: f64,
        eta_c: f64,
        v_p: f64,
        v_c: f64,
        eps_p: f64,
        eps_c: f64,
    ) -> Result<Self> {
        let p = ModelParams { gain, eta_p, eta_c, v_p, v_c, eps_p, eps_c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain >= 1.0) || !self.gain.is_finite() {
            return Err(invalid(format!("gain = {} must be finite and >= 1", self.gain)));
        }
        for (name, eta) in [("eta_p", self.eta_p), ("eta_c", self.eta_c)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(invalid(format!("{name} = {eta} outside (0, 1]")));
            }
        }
        check_range("v_p", self.v_p, 0.0, 1.0)?;
        check_range("v_c", self.v_c, 0.0, 1.0)?;
        check_range("eps_p", self.eps_p, 0.0, 1.0)?;
        check_range("eps_c", self.eps_c, 0.0, 1.0)
    }

    /// Same parameters with the probe and conjugate roles exchanged.
    pub fn swapped(&self) -> Self {
        ModelParams {
            eta_p: self.eta_c,
            eta_c: self.eta_p,
            v_p: self.v_c,
            v_c: self.v_p,
            eps_p: self.eps_c,
            eps_c: self.eps_p,
            ..*self
        }
    }
}

/// The four homodyne observables, linear shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseQuartet {
    pub probe: f64,
    pub conjugate: f64,
    pub squeezed: f64,
    pub antisqueezed: f64,
}

impl NoiseQuartet {
    pub fn from_params(p: &ModelParams) -> Self {
        NoiseQuartet {
            probe: probe_noise(p),
            conjugate: conjugate_noise(p),
            squeezed: squeezed_noise(p),
            antisqueezed: antisqueezed_noise(p),
        }
    }

    pub fn get(&self, obs: Observable) -> f64 {
        match obs {
            Observable::Probe => self.probe,
            Observable::Conjugate => self.conjugate,
            Observable::Squeezed => self.squeezed,
            Observable::Antisqueezed => self.antisqueezed,
        }
    }
}

/// Selects one member of a [`NoiseQuartet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Probe,
    Conjugate,
    Squeezed,
    Antisqueezed,
}

impl Observable {
    pub const ALL: [Observable; 4] = [
        Observable::Probe,
        Observable::Conjugate,
        Observable::Squeezed,
        Observable::Antisqueezed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Probe => "probe",
            Observable::Conjugate => "conjugate",
            Observable::Squeezed => "squeezed",
            Observable::Antisqueezed => "antisqueezed",
        }
    }
}

impl std::str::FromStr for Observable {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| invalid(format!("unknown observable `{s}`")))
    }
}

/// Interference visibility from the extreme powers of one beam-splitter port.
pub fn visibility(max_power: f64, min_power: f64) -> Result<f64> {
    if !(min_power >= 0.0) || !max_power.is_finite() {
        return Err(invalid(format!("powers must be finite and non-negative, got ({max_power}, {min_power})")));
    }
    if max_power < min_power {
        return Err(invalid(format!("max power {max_power} below min power {min_power}")));
    }
    if max_power == 0.0 {
        return Err(invalid("both powers are zero"));
    }
    Ok((max_power - min_power) / (max_power + min_power))
}

/// Gain from DC powers: the conjugate carries `(G - 1)` times the seed power.
pub fn gain_from_dc(p_conj: f64, p_seed: f64) -> Result<f64> {
    if !(p_seed > 0.0) || !p_seed.is_finite() {
        return Err(invalid(format!("seed power must be positive, got {p_seed}")));
    }
    if !(p_conj >= 0.0) || !p_conj.is_finite() {
        return Err(invalid(format!("conjugate power must be non-negative, got {p_conj}")));
    }
    Ok(1.0 + p_conj / p_seed)
}

fn single_arm(gain: f64, eta: f64, v: f64, eps: f64) -> f64 {
    let v2 = v * v;
    (1.0 + 2.0 * (gain - 1.0) * eta) * (eps * (1.0 - v2) + v2) + (1.0 - eps) * (1.0 - v2)
}

pub fn probe_noise(p: &ModelParams) -> f64 {
    single_arm(p.gain, p.eta_p, p.v_p, p.eps_p)
}

pub fn conjugate_noise(p: &ModelParams) -> f64 {
    single_arm(p.gain, p.eta_c, p.v_c, p.eps_c)
}

fn joint(p: &ModelParams, sign: f64) -> f64 {
    let g1 = p.gain - 1.0;
    let (vp2, vc2) = (p.v_p * p.v_p, p.v_c * p.v_c);
    1.0 + g1 * p.eta_p * (vp2 + p.eps_p * (1.0 - vp2)) + g1 * p.eta_c * (vc2 + p.eps_c * (1.0 - vc2))
        + sign * 2.0 * (p.gain * g1).sqrt() * p.v_p * p.v_c * (p.eta_p * p.eta_c).sqrt()
}

/// Variance of the squeezed joint quadrature.
pub fn squeezed_noise(p: &ModelParams) -> f64 {
    joint(p, -1.0)
}

/// Variance of the anti-squeezed joint quadrature.
pub fn antisqueezed_noise(p: &ModelParams) -> f64 {
    joint(p, 1.0)
}

pub fn to_db(linear: f64) -> Result<f64> {
    if linear > 0.0 {
        Ok(10.0 * linear.log10())
    } else {
        Err(invalid(format!("cannot express {linear} in dB")))
    }
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
