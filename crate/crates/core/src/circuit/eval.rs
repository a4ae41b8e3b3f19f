use super::{CircuitSpec, Element};
use crate::error::Result;
use crate::gaussian::GaussianState;

/// Phase at which `mode` is next read out after element `from`, or 0.
fn measured_phase(spec: &CircuitSpec, from: usize, mode: usize) -> f64 {
    spec.elements[from + 1..]
        .iter()
        .find_map(|e| match *e {
            Element::MeasureSingle { mode: m, phase } if m == mode => Some(phase),
            Element::MeasureJoint { a, phase_a, .. } if a == mode => Some(phase_a),
            Element::MeasureJoint { b, phase_b, .. } if b == mode => Some(phase_b),
            _ => None,
        })
        .unwrap_or(0.0)
}

/// Runs the network on an all-vacuum input and returns one variance per
/// measure statement, in order.
///
/// A `mix` without `anc_var` couples in thermal light with the target mode's
/// own variance at mix time, read at the phase the mode is later measured.
pub fn evaluate(spec: &CircuitSpec) -> Result<Vec<f64>> {
    let names: Vec<&str> = spec.modes.iter().map(|m| m.name.as_str()).collect();
    let mut state = GaussianState::vacuum_labeled(&names)?;
    let mut out = Vec::new();
    for (i, e) in spec.elements.iter().enumerate() {
        match *e {
            Element::Squeeze2 { a, b, gain } => state = state.apply_two_mode_squeeze(a, b, gain)?,
            Element::Loss { mode, t } => state = state.apply_loss(mode, t)?,
            Element::Mix { mode, v, eps, anc_var } => {
                let anc = match anc_var {
                    Some(a) => a,
                    None => state.quadrature_variance(mode, measured_phase(spec, i, mode))?,
                };
                state = state.apply_visibility_mixer(mode, v, eps, anc)?;
            }
            Element::MeasureSingle { mode, phase } => out.push(state.quadrature_variance(mode, phase)?),
            Element::MeasureJoint { a, b, phase_a, phase_b, sign } => {
                out.push(state.joint_quadrature_variance(a, phase_a, b, phase_b, sign)?)
            }
        }
    }
    Ok(out)
}
