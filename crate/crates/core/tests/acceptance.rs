//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p twinbeam-core --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use twinbeam_core::circuit::{evaluate, parse};
use twinbeam_core::curves::{optimum, sweep};
use twinbeam_core::estimator::{epsilon_scan, invert_point};
use twinbeam_core::noise_model::{antisqueezed_noise, probe_noise, squeezed_noise};
use twinbeam_core::{
    DiagnosticKind, GaussianState, MeasurementPoint, ModelParams, NoiseQuartet, Observable, Sign, SweepAxis,
    SweepSpec,
};

const ORACLE_REL_TOL: f64 = 1e-10;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(5);
const OPTIMUM_DB: f64 = -3.8;
const OPTIMUM_DB_TOL: f64 = 0.2;
const OPTIMUM_GAIN: f64 = 3.0;
const OPTIMUM_GAIN_TOL: f64 = 0.5;
const CURVE_POINTS: usize = 200;
const VISIBILITY_DRAWS: usize = 1000;
const ROUND_TRIP_DRAWS: usize = 10_000;
const ROUND_TRIP_REL_TOL: f64 = 1e-8;
const JITTER_DB: f64 = 0.1;
const SCAN_POINTS: usize = 20;
const SCATTER_RATIO: f64 = 3.0;
const DSL_REL_TOL: f64 = 1e-10;
const MIN_UNCERTAINTY_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn reference_point() -> ModelParams {
    ModelParams::new(3.0, 0.74, 0.78, 0.986, 0.986, 0.9, 1.0).unwrap()
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// vacuum -> squeeze -> loss on each arm -> visibility mixer on each arm,
/// each mixer's ancilla taken from that arm's variance just before it.
fn pipeline(p: &ModelParams) -> [f64; 4] {
    let mut s = GaussianState::vacuum(2).unwrap();
    s = s.apply_two_mode_squeeze(0, 1, p.gain).unwrap();
    s = s.apply_loss(0, p.eta_p).unwrap();
    s = s.apply_loss(1, p.eta_c).unwrap();
    let anc = s.quadrature_variance(0, 0.0).unwrap();
    s = s.apply_visibility_mixer(0, p.v_p, p.eps_p, anc).unwrap();
    let anc = s.quadrature_variance(1, 0.0).unwrap();
    s = s.apply_visibility_mixer(1, p.v_c, p.eps_c, anc).unwrap();
    [
        s.quadrature_variance(0, 0.0).unwrap(),
        s.quadrature_variance(1, 0.0).unwrap(),
        s.joint_quadrature_variance(0, 0.0, 1, 0.0, Sign::Minus).unwrap(),
        s.joint_quadrature_variance(0, 0.0, 1, 0.0, Sign::Plus).unwrap(),
    ]
}

fn quartet(q: &NoiseQuartet) -> [f64; 4] {
    [q.probe, q.conjugate, q.squeezed, q.antisqueezed]
}

/// Full independent-arm product of the oracle grid.
fn c1_oracle_equivalence() -> Outcome {
    const GAINS: [f64; 6] = [1.0, 1.5, 2.0, 3.0, 5.0, 10.0];
    const ETAS: [f64; 4] = [0.5, 0.73, 0.78, 1.0];
    const VIS: [f64; 3] = [0.9, 0.986, 1.0];
    const EPS: [f64; 4] = [0.0, 0.5, 0.9, 1.0];
    let start = Instant::now();
    let (mut configs, mut worst) = (0usize, 0.0f64);
    for g in GAINS {
        for ep in ETAS {
            for ec in ETAS {
                for vp in VIS {
                    for vc in VIS {
                        for sp in EPS {
                            for sc in EPS {
                                let p = ModelParams::new(g, ep, ec, vp, vc, sp, sc).unwrap();
                                let want = quartet(&NoiseQuartet::from_params(&p));
                                for (got, want) in pipeline(&p).iter().zip(want) {
                                    worst = worst.max(rel(*got, want));
                                }
                                configs += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= ORACLE_REL_TOL && elapsed < ORACLE_TIME_LIMIT,
        format!("{configs} configs x 4 observables, max rel err {worst:.2e} (tol {ORACLE_REL_TOL:e}), {elapsed:.2?}"),
    )
}

fn c2_operating_point() -> Outcome {
    let spec = SweepSpec {
        base: reference_point(),
        axis: SweepAxis::Gain,
        lo: 1.0,
        hi: 20.0,
        n_points: CURVE_POINTS,
        observables: vec![Observable::Squeezed],
    };
    let o = optimum(&spec, Observable::Squeezed).unwrap();
    outcome(
        !o.at_edge && (o.value_db - OPTIMUM_DB).abs() <= OPTIMUM_DB_TOL && (o.x - OPTIMUM_GAIN).abs() <= OPTIMUM_GAIN_TOL,
        format!("best {:.4} dB at G = {:.4} (want {OPTIMUM_DB} +/- {OPTIMUM_DB_TOL} dB at G = {OPTIMUM_GAIN} +/- {OPTIMUM_GAIN_TOL})", o.value_db, o.x),
    )
}

/// Grid over (1, 20]: 200 points, the first one step above G = 1.
fn squeezed_over_gain(base: ModelParams) -> Vec<(f64, f64)> {
    let step = 19.0 / CURVE_POINTS as f64;
    let spec = SweepSpec {
        base,
        axis: SweepAxis::Gain,
        lo: 1.0 + step,
        hi: 20.0,
        n_points: CURVE_POINTS,
        observables: vec![Observable::Squeezed],
    };
    sweep(&spec).unwrap().rows.iter().map(|r| (r.x, r.linear[0])).collect()
}

fn c3_single_mode_contrast() -> Outcome {
    let vacuum = squeezed_over_gain(ModelParams { eps_p: 0.0, eps_c: 0.0, ..reference_point() });
    let rises: Vec<f64> = vacuum.windows(2).filter(|w| w[1].1 >= w[0].1).map(|w| w[1].0).collect();
    let decreasing = rises.is_empty();
    let (vmin_g, vmin_db) = vacuum
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|&(g, v)| (g, 10.0 * v.log10()))
        .unwrap();

    let thermal = squeezed_over_gain(reference_point());
    let imin = (0..thermal.len()).min_by(|&a, &b| thermal[a].1.total_cmp(&thermal[b].1)).unwrap();
    let interior = imin > 0 && imin + 1 < thermal.len();

    let vacuum_note = if decreasing {
        "eps=0 curve strictly decreasing".to_string()
    } else {
        format!(
            "eps=0 curve turns up at G = {:.3} (minimum {vmin_db:.4} dB at G = {vmin_g:.3}, {} rising steps)",
            rises[0],
            rises.len()
        )
    };
    outcome(
        decreasing && interior,
        format!("{vacuum_note}; thermal minimum at G = {:.3} ({})", thermal[imin].0, if interior { "interior" } else { "edge" }),
    )
}

fn c4_visibility_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    for _ in 0..VISIBILITY_DRAWS {
        let g = rng.random_range(1.0..20.0);
        let eta = rng.random_range(0.01..=1.0);
        let at = |v| probe_noise(&ModelParams::new(g, eta, 0.8, v, 1.0, 1.0, 1.0).unwrap());
        if at(0.9) != at(1.0) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches}/{VISIBILITY_DRAWS} draws differ (exact comparison)"))
}

fn c5_estimator_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cases = vec![
        ModelParams::new(3.02, 0.73, 0.77, 0.986, 0.986, 0.9, 1.0).unwrap(),
        ModelParams::new(3.02, 0.72, 0.78, 0.986, 0.986, 0.9, 1.0).unwrap(),
    ];
    while cases.len() < ROUND_TRIP_DRAWS + 2 {
        cases.push(
            ModelParams::new(
                rng.random_range(1.1..10.0),
                rng.random_range(0.3..=1.0),
                rng.random_range(0.3..=1.0),
                rng.random_range(0.8..=1.0),
                rng.random_range(0.8..=1.0),
                rng.random_range(0.0..=1.0),
                rng.random_range(0.0..=1.0),
            )
            .unwrap(),
        );
    }
    let (mut worst, mut infeasible) = (0.0f64, 0usize);
    for p in &cases {
        let m = MeasurementPoint::from_model("draw", p).unwrap();
        match invert_point(&m, p.eps_p, p.eps_c).estimate() {
            Some(e) => {
                worst = worst.max(rel(e.gain, p.gain)).max(rel(e.eta_p, p.eta_p)).max(rel(e.eta_c, p.eta_c));
            }
            None => infeasible += 1,
        }
    }
    outcome(
        infeasible == 0 && worst <= ROUND_TRIP_REL_TOL,
        format!("{} points incl. reported triples, {infeasible} infeasible, max rel err {worst:.2e} (tol {ROUND_TRIP_REL_TOL:e})", cases.len()),
    )
}

/// Visibility scan at fixed gain and transmissions, generated with
/// eps_p = 0.9, eps_c = 1 and Gaussian dB jitter on every noise column.
fn jittered_scan_data(seed: u64) -> Vec<MeasurementPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, JITTER_DB).unwrap();
    (0..SCAN_POINTS)
        .map(|i| {
            let v_p = 0.85 + 0.14 * i as f64 / (SCAN_POINTS - 1) as f64;
            let p = ModelParams::new(3.02, 0.73, 0.77, v_p, 0.986, 0.9, 1.0).unwrap();
            let mut m = MeasurementPoint::from_model(format!("v{i}"), &p).unwrap();
            m.probe_db += jitter.sample(&mut rng);
            m.conjugate_db += jitter.sample(&mut rng);
            m.squeezed_db += jitter.sample(&mut rng);
            m.antisqueezed_db += jitter.sample(&mut rng);
            m
        })
        .collect()
}

fn c6_eps_scan_trend() -> Outcome {
    let rows = epsilon_scan(&jittered_scan_data(6), &[0.0, 0.5, 0.9], 1.0).unwrap();
    let s = |i: usize| rows[i].summary.gain;
    let ratio = s(0).std / s(2).std;
    outcome(
        ratio >= SCATTER_RATIO,
        format!(
            "G = {:.2} +/- {:.2} at eps_p = 0, {:.3} +/- {:.3} at eps_p = 0.9, ratio {ratio:.1} (need >= {SCATTER_RATIO})",
            s(0).mean,
            s(0).std,
            s(2).mean,
            s(2).std
        ),
    )
}

fn c7_dsl_conformance() -> Outcome {
    let root = repo_root();
    let text = std::fs::read_to_string(root.join("circuits/fig5.qnet")).unwrap();
    let spec = parse(&text).unwrap();
    let got = evaluate(&spec).unwrap();
    let p = ModelParams::new(3.02, 0.73, 0.77, 0.986, 0.986, 0.9, 1.0).unwrap();
    let want = quartet(&NoiseQuartet::from_params(&p));
    let worst = got.iter().zip(want).map(|(g, w)| rel(*g, w)).fold(0.0, f64::max);
    let values_ok = got.len() == 4 && worst <= DSL_REL_TOL;

    let mut round_trip_ok = true;
    for name in ["fig5.qnet", "ideal.qnet"] {
        let spec = parse(&std::fs::read_to_string(root.join("circuits").join(name)).unwrap()).unwrap();
        let rendered = spec.render();
        let back = parse(&rendered).unwrap();
        round_trip_ok &= back == spec && back.render() == rendered;
    }

    let corpus = root.join("crates/core/tests/data/malformed");
    let mut seen = Vec::new();
    let mut files: Vec<_> = std::fs::read_dir(&corpus).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    for f in &files {
        let err = parse(&std::fs::read_to_string(f).unwrap()).expect_err("corpus file must not parse");
        seen.extend(err.diagnostics.iter().map(|d| d.kind));
    }
    let missing: Vec<&str> =
        DiagnosticKind::ALL.iter().filter(|k| !seen.contains(k)).map(|k| k.as_str()).collect();

    outcome(
        values_ok && round_trip_ok && missing.is_empty(),
        format!(
            "pipeline max rel err {worst:.2e} (tol {DSL_REL_TOL:e}); round trip {}; {} corpus files, missing kinds {missing:?}",
            if round_trip_ok { "exact" } else { "MISMATCH" },
            files.len()
        ),
    )
}

fn c8_minimum_uncertainty() -> Outcome {
    let mut worst = 0.0f64;
    for g in [1.0, 1.5, 2.0, 5.0, 10.0] {
        let p = ModelParams::new(g, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        worst = worst.max((squeezed_noise(&p) * antisqueezed_noise(&p) - 1.0).abs());
        let v = pipeline(&p);
        worst = worst.max((v[2] * v[3] - 1.0).abs());
    }
    outcome(worst <= MIN_UNCERTAINTY_TOL, format!("max |sq * asq - 1| = {worst:.2e} (tol {MIN_UNCERTAINTY_TOL:e})"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("operating point", c2_operating_point),
        ("single-mode contrast", c3_single_mode_contrast),
        ("visibility independence at eps=1", c4_visibility_independence),
        ("estimator round trip", c5_estimator_round_trip),
        ("eps-scan scatter trend", c6_eps_scan_trend),
        ("circuit DSL conformance", c7_dsl_conformance),
        ("minimum-uncertainty identity", c8_minimum_uncertainty),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {} [{}] {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
