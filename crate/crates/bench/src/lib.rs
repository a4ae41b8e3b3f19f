//! Deterministic workloads shared by the criterion benches.

use twinbeam_core::{MeasurementPoint, ModelParams};

pub const PIPELINE_CIRCUIT: &str = include_str!("../../../circuits/fig5.qnet");

/// Independent-arm product of gains, transmissions, visibilities and thermal
/// fractions used for oracle comparisons.
pub fn oracle_grid() -> Vec<ModelParams> {
    const GAINS: [f64; 6] = [1.0, 1.5, 2.0, 3.0, 5.0, 10.0];
    const ETAS: [f64; 4] = [0.5, 0.73, 0.78, 1.0];
    const VIS: [f64; 3] = [0.9, 0.986, 1.0];
    const EPS: [f64; 4] = [0.0, 0.5, 0.9, 1.0];
    let mut out = Vec::with_capacity(GAINS.len() * ETAS.len().pow(2) * VIS.len().pow(2) * EPS.len().pow(2));
    for gain in GAINS {
        for eta_p in ETAS {
            for eta_c in ETAS {
                for v_p in VIS {
                    for v_c in VIS {
                        for eps_p in EPS {
                            for eps_c in EPS {
                                out.push(ModelParams { gain, eta_p, eta_c, v_p, v_c, eps_p, eps_c });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `n` noise-free points on a gain/visibility lattice at fixed transmissions.
pub fn synthetic_points(n: usize) -> Vec<MeasurementPoint> {
    (0..n)
        .map(|i| {
            let gain = 1.5 + 8.0 * (i % 97) as f64 / 96.0;
            let v_p = 0.85 + 0.15 * (i % 13) as f64 / 12.0;
            let p = ModelParams { gain, eta_p: 0.73, eta_c: 0.77, v_p, v_c: 0.986, eps_p: 0.9, eps_c: 1.0 };
            MeasurementPoint::from_model(format!("p{i}"), &p).expect("positive noises")
        })
        .collect()
}
