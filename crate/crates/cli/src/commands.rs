use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde_json::{json, Map, Value};
use twinbeam_core::circuit::{evaluate, parse, Override};
use twinbeam_core::curves::{optimum, sweep};
use twinbeam_core::estimator::{aggregate, invert_all, most_consistent, ScanRow, Stat};
use twinbeam_core::io::{csv_table, load_measurements, Cell};
use twinbeam_core::noise_model::to_db;
use twinbeam_core::{EstimateResult, MeasurementPoint, ModelParams, Observable, Summary, SweepAxis, SweepSpec};

use crate::output::{document, emit, num};
use crate::{Command, Failure, Format, OutputArgs, SweepArgs};

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Estimate { input, eps_p, eps_c, out } => estimate(&input, eps_p, eps_c, &out),
        Command::ScanEps { input, grid, eps_c, out } => scan_eps(&input, &grid, eps_c, &out),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Eval { circuit, overrides, out } => eval(&circuit, &overrides, &out),
    }
}

fn check_fraction(name: &str, x: f64) -> anyhow::Result<()> {
    if !(0.0..=1.0).contains(&x) {
        bail!("--{name} must lie in [0, 1], got {x}");
    }
    Ok(())
}

fn load(input: &Path) -> anyhow::Result<Vec<MeasurementPoint>> {
    load_measurements(input).with_context(|| format!("reading {}", input.display()))
}

fn stat_json(s: &Stat) -> Value {
    json!({ "mean": num(s.mean), "std": num(s.std) })
}

fn summary_json(s: &Summary) -> Value {
    json!({
        "gain": stat_json(&s.gain),
        "eta_p": stat_json(&s.eta_p),
        "eta_c": stat_json(&s.eta_c),
        "feasible": s.feasible_count,
        "infeasible": s.infeasible_count,
    })
}

fn estimate(input: &Path, eps_p: f64, eps_c: f64, out: &OutputArgs) -> Result<(), Failure> {
    check_fraction("eps-p", eps_p)?;
    check_fraction("eps-c", eps_c)?;
    let points = load(input)?;
    let results = invert_all(&points, eps_p, eps_c);
    let summary = aggregate(&results).ok();

    let text = match out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let rows: Vec<Value> = points
                .iter()
                .zip(&results)
                .map(|(m, r)| match r {
                    EstimateResult::Feasible(e) => json!({
                        "label": m.label,
                        "status": "feasible",
                        "gain": num(e.gain),
                        "eta_p": num(e.eta_p),
                        "eta_c": num(e.eta_c),
                        "antisqueezed_residual_db": num(e.antisqueezed_residual_db),
                        "reason": null,
                    }),
                    EstimateResult::Infeasible(why) => json!({
                        "label": m.label,
                        "status": "infeasible",
                        "gain": null,
                        "eta_p": null,
                        "eta_c": null,
                        "antisqueezed_residual_db": null,
                        "reason": { "code": why.code(), "message": why.to_string() },
                    }),
                })
                .collect();
            let mut body = Map::new();
            body.insert("eps_p".into(), num(eps_p));
            body.insert("eps_c".into(), num(eps_c));
            body.insert("points".into(), Value::Array(rows));
            body.insert("summary".into(), summary.as_ref().map_or(Value::Null, summary_json));
            document("estimate", body)
        }
        Format::Csv => {
            let rows: Vec<Vec<Cell>> = points
                .iter()
                .zip(&results)
                .map(|(m, r)| match r {
                    EstimateResult::Feasible(e) => vec![
                        m.label.as_str().into(),
                        "feasible".into(),
                        e.gain.into(),
                        e.eta_p.into(),
                        e.eta_c.into(),
                        e.antisqueezed_residual_db.into(),
                        Cell::Empty,
                    ],
                    EstimateResult::Infeasible(why) => {
                        let mut row = vec![m.label.as_str().into(), "infeasible".into()];
                        row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
                        row.push(why.code().into());
                        row
                    }
                })
                .collect();
            csv_table(&["label", "status", "gain", "eta_p", "eta_c", "antisqueezed_residual_db", "reason"], &rows)
        }
    };
    emit(out.out.as_deref(), &text)?;

    for (m, r) in points.iter().zip(&results) {
        if let EstimateResult::Infeasible(why) = r {
            eprintln!("{}: {why}", m.label);
        }
    }
    if results.iter().all(|r| !r.is_feasible()) {
        return Err(Failure::Infeasible(anyhow!("none of the {} points admits a physical solution", points.len())));
    }
    Ok(())
}

fn scan_eps(input: &Path, grid: &[f64], eps_c: f64, out: &OutputArgs) -> Result<(), Failure> {
    if grid.is_empty() {
        return Err(anyhow!("--grid is empty").into());
    }
    for &e in grid {
        check_fraction("grid", e)?;
    }
    check_fraction("eps-c", eps_c)?;
    let points = load(input)?;

    // rows whose eps_p leaves fewer than two feasible points carry no summary
    let rows: Vec<(f64, usize, Option<Summary>)> = grid
        .iter()
        .map(|&eps_p| {
            let results = invert_all(&points, eps_p, eps_c);
            let feasible = results.iter().filter(|r| r.is_feasible()).count();
            (eps_p, feasible, aggregate(&results).ok())
        })
        .collect();
    let summarized: Vec<ScanRow> =
        rows.iter().filter_map(|&(eps_p, _, s)| s.map(|summary| ScanRow { eps_p, eps_c, summary })).collect();
    let best = most_consistent(&summarized).map(|r| r.eps_p);

    let text = match out.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(eps_p, feasible, s)| {
                    json!({
                        "eps_p": num(*eps_p),
                        "feasible": feasible,
                        "infeasible": points.len() - feasible,
                        "summary": s.as_ref().map_or(Value::Null, summary_json),
                    })
                })
                .collect();
            let mut body = Map::new();
            body.insert("eps_c".into(), num(eps_c));
            body.insert("rows".into(), Value::Array(rows));
            body.insert("most_consistent_eps_p".into(), best.map_or(Value::Null, num));
            document("scan-eps", body)
        }
        Format::Csv => {
            let table: Vec<Vec<Cell>> = rows
                .iter()
                .map(|(eps_p, feasible, s)| {
                    let mut row: Vec<Cell> = vec![(*eps_p).into(), eps_c.into()];
                    match s {
                        Some(s) => {
                            for st in [s.gain, s.eta_p, s.eta_c] {
                                row.extend([st.mean.into(), st.std.into()]);
                            }
                        }
                        None => row.extend(std::iter::repeat_n(Cell::Empty, 6)),
                    }
                    row.extend([(*feasible as f64).into(), ((points.len() - feasible) as f64).into()]);
                    row
                })
                .collect();
            csv_table(
                &["eps_p", "eps_c", "gain_mean", "gain_std", "eta_p_mean", "eta_p_std", "eta_c_mean", "eta_c_std", "feasible", "infeasible"],
                &table,
            )
        }
    };
    emit(out.out.as_deref(), &text)?;
    if summarized.is_empty() {
        return Err(Failure::Infeasible(anyhow!("no eps_p value leaves two or more feasible points")));
    }
    Ok(())
}

fn parse_range(s: &str) -> anyhow::Result<(f64, f64)> {
    let (lo, hi) = s.split_once(':').with_context(|| format!("--range `{s}` must look like lo:hi"))?;
    let parse = |v: &str| v.trim().parse::<f64>().with_context(|| format!("--range: `{v}` is not a number"));
    Ok((parse(lo)?, parse(hi)?))
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let axis: SweepAxis = args.axis.parse().map_err(anyhow::Error::from)?;
    let (lo, hi) = parse_range(&args.range)?;
    let observables = args
        .observables
        .iter()
        .map(|o| o.parse::<Observable>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(anyhow::Error::from)?;
    let base = ModelParams {
        gain: args.gain,
        eta_p: args.eta_p,
        eta_c: args.eta_c,
        v_p: args.v_p,
        v_c: args.v_c,
        eps_p: args.eps_p,
        eps_c: args.eps_c,
    };
    let spec = SweepSpec { base, axis, lo, hi, n_points: args.points, observables };
    let table = sweep(&spec).map_err(anyhow::Error::from)?;
    let header = table.header();

    let text = match args.out.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    let mut row = Map::new();
                    row.insert(header[0].clone(), num(r.x));
                    for (i, (l, d)) in r.linear.iter().zip(&r.db).enumerate() {
                        row.insert(header[1 + 2 * i].clone(), num(*l));
                        row.insert(header[2 + 2 * i].clone(), num(*d));
                    }
                    Value::Object(row)
                })
                .collect();
            let mut minima = Map::new();
            for &obs in &spec.observables {
                let o = optimum(&spec, obs).map_err(anyhow::Error::from)?;
                minima.insert(
                    obs.name().into(),
                    json!({ "x": num(o.x), "linear": num(o.value), "db": num(o.value_db), "at_edge": o.at_edge }),
                );
            }
            let mut body = Map::new();
            body.insert(
                "params".into(),
                json!({
                    "gain": num(base.gain), "eta_p": num(base.eta_p), "eta_c": num(base.eta_c),
                    "v_p": num(base.v_p), "v_c": num(base.v_c), "eps_p": num(base.eps_p), "eps_c": num(base.eps_c),
                }),
            );
            body.insert("axis".into(), json!(axis.name()));
            body.insert("rows".into(), Value::Array(rows));
            body.insert("minima".into(), Value::Object(minima));
            document("sweep", body)
        }
        Format::Csv => {
            let rows: Vec<Vec<Cell>> = table
                .rows
                .iter()
                .map(|r| {
                    let mut row = vec![Cell::from(r.x)];
                    for (l, d) in r.linear.iter().zip(&r.db) {
                        row.extend([Cell::from(*l), Cell::from(*d)]);
                    }
                    row
                })
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            csv_table(&header, &rows)
        }
    };
    emit(args.out.out.as_deref(), &text)?;
    Ok(())
}

fn eval(circuit: &Path, overrides: &[String], out: &OutputArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(circuit).with_context(|| format!("reading {}", circuit.display()))?;
    let mut spec = parse(&text).map_err(|e| {
        let lines: Vec<String> = e.diagnostics.iter().map(|d| format!("{}: {d}", circuit.display())).collect();
        anyhow!("{} diagnostic(s)\n{}", lines.len(), lines.join("\n"))
    })?;
    for o in overrides {
        let parsed: Override = o.parse().map_err(anyhow::Error::from)?;
        spec.apply_override(&parsed).map_err(anyhow::Error::from)?;
    }
    let values = evaluate(&spec).map_err(anyhow::Error::from)?;
    let statements: Vec<String> = spec.measurements().map(|e| spec.render_element(e)).collect();
    let dbs = values.iter().map(|&v| to_db(v)).collect::<Result<Vec<_>, _>>().map_err(anyhow::Error::from)?;

    let text = match out.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let rows: Vec<Value> = statements
                .iter()
                .zip(values.iter().zip(&dbs))
                .map(|(s, (v, d))| json!({ "statement": s, "variance": num(*v), "variance_db": num(*d) }))
                .collect();
            let mut body = Map::new();
            body.insert("measurements".into(), Value::Array(rows));
            document("eval", body)
        }
        Format::Csv => {
            let rows: Vec<Vec<Cell>> = statements
                .iter()
                .zip(values.iter().zip(&dbs))
                .map(|(s, (v, d))| vec![s.as_str().into(), (*v).into(), (*d).into()])
                .collect();
            csv_table(&["statement", "variance", "variance_db"], &rows)
        }
    };
    emit(out.out.as_deref(), &text)?;
    Ok(())
}
