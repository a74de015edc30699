use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::catalog::{self, instantiate, Instance, UNGATED};
use crate::error::Error;
use crate::extension::{gn_closed, gn_recursive, ExtDerivValue, Extension, ExtensionParams};
use crate::verify::residual::SkippedPoint;
use crate::verify::{
    conservation_report, fd_bracket, independence_rank, integrate, kn_residual, pde_residual, sample_points,
    EulerKuruNegro, LocalSolution, Method, Observable, ResidualReport, SampleSpec, Sampled,
};

use super::config::{CommonArgs, MethodName, RunConfig};
use super::report::{to_json, Gate, Report};
use super::{Command, Failure};

pub const PDE_TOL: f64 = 1e-7;
pub const NEGATIVE_CONTROL_MIN: f64 = 1e-2;
pub const KN_TOL: f64 = 1e-5;
pub const BRACKET_TOL: f64 = 1e-5;
pub const DRIFT_TOL: f64 = 1e-6;
pub const RANK_THRESHOLD: f64 = 1e-6;
pub const GN_TOL: f64 = 1e-10;
/// Finite-difference step of the bracket spot checks.
pub const BRACKET_STEP: f64 = 1e-5;
/// Finite-difference step of the rank test.
pub const RANK_STEP: f64 = 1e-6;
/// Series whose values never exceed this in magnitude are reported but not gated.
pub const ZERO_SERIES: f64 = 1e-12;

const DEFAULT_T_FINAL: f64 = 10.0;
const DEFAULT_DT: f64 = 1e-3;
const DEFAULT_STEP_TOL: f64 = 1e-10;

pub fn dispatch(cmd: Command) -> Result<i32, Failure> {
    match cmd {
        Command::List => {
            print!("{}", list_table());
            Ok(0)
        }
        Command::Show { common } => show(&RunConfig::load(&common)?),
        Command::CheckPde { common } => {
            let cfg = RunConfig::load(&common)?;
            emit(&check_pde(&cfg, common.tol)?, &cfg)
        }
        Command::CheckKn { common, sign } => {
            let cfg = RunConfig::load(&common)?;
            emit(&check_kn(&cfg, sign, common.tol)?, &cfg)
        }
        Command::Extend { common } => {
            let cfg = RunConfig::load(&common)?;
            emit(&extend(&cfg, common.tol)?, &cfg)
        }
        Command::Integrate {
            common,
            method,
            dt,
            step_tol,
            t_final,
            base,
            csv,
        } => {
            let mut cfg = RunConfig::load(&common)?;
            let ic = &mut cfg.integration;
            ic.method = method.or(ic.method);
            ic.dt = dt.or(ic.dt);
            ic.tol = step_tol.or(ic.tol);
            ic.t_final = t_final.or(ic.t_final);
            if base {
                ic.base = Some(true);
            }
            if csv.is_some() {
                cfg.output.csv = csv;
            }
            emit(&integrate_cmd(&cfg, common.tol)?, &cfg)
        }
        Command::Bracket { common } => {
            let cfg = RunConfig::load(&common)?;
            emit(&bracket_cmd(&cfg, common.tol)?, &cfg)
        }
        Command::Rank {
            common,
            fields,
            expect,
            threshold,
        } => {
            let cfg = RunConfig::load(&common)?;
            emit(&rank_cmd(&cfg, fields, expect, threshold)?, &cfg)
        }
        Command::GnCompare {
            n_max,
            samples,
            seed,
            tol,
            report,
        } => {
            let cfg = RunConfig::load(&CommonArgs {
                seed,
                report,
                ..Default::default()
            })?;
            emit(&gn_compare(n_max, samples, cfg.seed(), tol)?, &cfg)
        }
    }
}

fn emit(report: &Report, cfg: &RunConfig) -> Result<i32, Failure> {
    let text = report.to_json();
    if let Some(path) = &cfg.output.report {
        write_file(path, &text)?;
    }
    print!("{text}");
    Ok(if report.passed() { 0 } else { 1 })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn list_table() -> String {
    let entries = catalog::list_entries();
    let width = entries.iter().map(|e| e.id.len()).max().unwrap_or(2);
    let mut out = format!("{:<width$}  dim  G    notes\n", "id");
    for e in entries {
        let g = if e.has_g { "yes" } else { "no" };
        let _ = writeln!(out, "{:<width$}  {:>3}  {:<3}  {}", e.id, e.dim, g, e.notes);
    }
    out
}

fn build(cfg: &RunConfig) -> Result<Instance, Failure> {
    let id = cfg.system_id()?;
    let info = catalog::entry_info(id)?;
    let params = cfg.merged_params(&info.params)?;
    Ok(instantiate(id, &params)?)
}

fn show(cfg: &RunConfig) -> Result<i32, Failure> {
    let inst = build(cfg)?;
    let info = catalog::entry_info(&inst.id)?;
    let solutions: Vec<Value> = inst
        .solutions
        .iter()
        .map(|s| {
            json!({
                "label": s.field.label(),
                "c": s.c,
                "c0": s.c0,
                "constraints": s.constraints,
                "global": s.global,
                "verification": s.verification,
            })
        })
        .collect();
    let out = json!({
        "id": inst.id,
        "dim": info.dim,
        "coords": info.coords,
        "notes": info.notes,
        "params": inst.params,
        "observables": inst.system.observables.keys().collect::<Vec<_>>(),
        "domain": inst.domain,
        "margin": inst.margin,
        "solutions": solutions,
    });
    print!("{}", to_json(&out));
    Ok(0)
}

fn echo(cfg: &RunConfig, inst: &Instance) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("system".into(), json!(inst.id));
    m.insert("params".into(), json!(inst.params));
    if let Some(s) = &cfg.state {
        m.insert("state".into(), json!(s));
    }
    m
}

fn base_spec(cfg: &RunConfig, inst: &Instance, count: usize) -> SampleSpec {
    let s = &cfg.sampling;
    SampleSpec::new(
        s.intervals.clone().unwrap_or_else(|| inst.domain.clone()),
        s.count.unwrap_or(count),
        cfg.seed(),
    )
    .with_margin(s.margin.unwrap_or(inst.margin))
}

fn ext_params(cfg: &RunConfig, inst: &Instance) -> Result<ExtensionParams, Failure> {
    let (c, c0) = inst.regime.ok_or_else(|| Error::NoGSolution(inst.id.clone()))?;
    let e = &cfg.extension;
    let mut p = ExtensionParams::new(
        c,
        c0,
        e.big_c.unwrap_or(1.0),
        e.omega.unwrap_or(0.0),
        e.m.unwrap_or(1),
        e.n.unwrap_or(1),
    );
    p.u0 = e.u0.unwrap_or(0.0);
    p.validate()?;
    Ok(p)
}

fn ext_spec(cfg: &RunConfig, inst: &Instance, params: &ExtensionParams, count: usize) -> SampleSpec {
    let s = &cfg.sampling;
    let mut spec = inst.extended_spec(params, s.count.unwrap_or(count), cfg.seed());
    if let Some(iv) = &s.intervals {
        spec.intervals = iv.clone();
    }
    if let Some(m) = s.margin {
        spec.margin = m;
    }
    spec
}

fn sample_extended(ext: &Extension, spec: &SampleSpec) -> Result<Sampled, Failure> {
    if spec.intervals.len() != ext.dim() {
        return Err(Error::DimensionMismatch {
            expected: ext.dim(),
            got: spec.intervals.len(),
        }
        .into());
    }
    let pred = |y: &[f64], m: f64| ext.is_singular(y, m);
    Ok(sample_points(spec, Some(&pred))?)
}

fn check_state(state: &[f64], dim: usize) -> Result<(), Failure> {
    if state.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: state.len(),
        }
        .into());
    }
    Ok(())
}

fn residual_metrics(r: &ResidualReport) -> Value {
    json!({
        "evaluated": r.evaluated,
        "max": r.max,
        "mean": r.mean,
        "worst_point": r.worst_point,
        "rejected": r.rejected,
        "skipped": r.skipped.len(),
    })
}

/// `c₀` moved by 10% of the scale of `(c, c₀)`.
pub fn perturbed_c0(c: f64, c0: f64) -> f64 {
    if c0 != 0.0 {
        1.1 * c0
    } else {
        c0 + 0.1 * c.abs()
    }
}

fn check_pde(cfg: &RunConfig, tol: Option<f64>) -> Result<Report, Failure> {
    let inst = build(cfg)?;
    let gsol = inst.solution()?;
    let spec = base_spec(cfg, &inst, catalog::GATE_POINTS);
    let mut echo = echo(cfg, &inst);
    echo.insert("sampling".into(), json!(spec));
    let mut report = Report::new("check-pde", Value::Object(echo));
    let tol = tol.unwrap_or(PDE_TOL);
    let r = pde_residual(&inst.system, gsol, gsol.c, gsol.c0, &spec)?;
    let c0_neg = perturbed_c0(gsol.c, gsol.c0);
    let neg = pde_residual(&inst.system, gsol, gsol.c, c0_neg, &spec)?;
    report.metric("c", gsol.c);
    report.metric("c0", gsol.c0);
    report.metric("residual", residual_metrics(&r));
    report.metric(
        "negative_control",
        json!({"c0": c0_neg, "residual": residual_metrics(&neg)}),
    );
    report.metric("verification", gsol.verification);
    let gated = inst.id != UNGATED;
    report.metric("gated", gated);
    if gated {
        report.gate(Gate::upper("pde_residual", r.max, tol).at(&r.worst_point));
        report.gate(Gate::lower("negative_control", neg.max, NEGATIVE_CONTROL_MIN).at(&neg.worst_point));
    }
    report.skipped_points = r.skipped;
    Ok(report)
}

fn param(inst: &Instance, name: &str) -> Result<f64, Failure> {
    inst.params
        .get(name)
        .and_then(Value::as_f64)
        .ok_or_else(|| Failure::Invalid(format!("missing parameter {name}")))
}

fn check_kn(cfg: &RunConfig, sign: f64, tol: Option<f64>) -> Result<Report, Failure> {
    let inst = build(cfg)?;
    let spec = base_spec(cfg, &inst, catalog::GATE_POINTS);
    let euler;
    let (solution, c, c0): (&dyn LocalSolution, f64, f64) = if inst.id == "euler_top" {
        let c = cfg.extension.c.unwrap_or(0.0);
        let c0 = cfg.extension.c0.unwrap_or(-1.0);
        let inertia = [param(&inst, "I1")?, param(&inst, "I2")?, param(&inst, "I3")?];
        euler = EulerKuruNegro::new(inertia, c, c0, sign)?;
        (&euler, c, c0)
    } else {
        let g = inst.solution()?;
        (g, g.c, g.c0)
    };
    let mut echo = echo(cfg, &inst);
    echo.insert("sign".into(), json!(sign));
    echo.insert("c".into(), json!(c));
    echo.insert("c0".into(), json!(c0));
    echo.insert("sampling".into(), json!(spec));
    let mut report = Report::new("check-kn", Value::Object(echo));
    let r = kn_residual(&inst.system, solution, c, c0, sign, &spec)?;
    report.metric("solution", solution.label());
    report.metric("residual", residual_metrics(&r));
    report.gate(Gate::upper("kn_residual", r.max, tol.unwrap_or(KN_TOL)).at(&r.worst_point));
    report.skipped_points = r.skipped;
    Ok(report)
}

type RealFn<'a> = Box<dyn Fn(&[f64]) -> crate::Result<f64> + Sync + 'a>;

/// Real fields on the extended state `[u, p_u, x…]` selected by name.
fn extended_field<'a>(ext: &'a Extension, name: &str) -> Result<RealFn<'a>, Failure> {
    let f: RealFn<'a> = match name {
        "H" => Box::new(move |y| ext.hamiltonian(y)),
        "K" | "K_re" => Box::new(move |y| ext.integral(y).map(|k| k.re)),
        "K_im" => Box::new(move |y| ext.integral(y).map(|k| k.im)),
        "L" => Box::new(move |y| ext.base_hamiltonian(y)),
        "u" => Box::new(|y| Ok(y[0])),
        "p_u" => Box::new(|y| Ok(y[1])),
        other => {
            if let Some(i) = ext.system.coord_names.iter().position(|c| c == other) {
                Box::new(move |y| Ok(y[2 + i]))
            } else if let Some(obs) = ext.system.observables.get(other) {
                Box::new(move |y| obs.value(&y[2..]))
            } else {
                return Err(Failure::Invalid(format!("unknown field `{other}`")));
            }
        }
    };
    Ok(f)
}

fn ext_echo(cfg: &RunConfig, inst: &Instance, params: &ExtensionParams, ext: &Extension) -> Map<String, Value> {
    let mut e = echo(cfg, inst);
    e.insert("extension".into(), json!(params));
    e.insert("indices".into(), json!(ext.indices()));
    e
}

/// Base observables at `x`; the vortex exponent also gets its integrality flag.
fn observable_metrics(report: &mut Report, sys: &crate::poisson::HamiltonianSystem, x: &[f64]) -> Result<(), Failure> {
    let mut values = Map::new();
    for (name, field) in &sys.observables {
        let v = field.value(x)?;
        if name == "exponent" {
            report.metric("single_valued", catalog::vortex::is_single_valued(v));
        }
        values.insert(name.clone(), json!(v));
    }
    report.metric("observables", Value::Object(values));
    Ok(())
}

fn extend(cfg: &RunConfig, tol: Option<f64>) -> Result<Report, Failure> {
    let inst = build(cfg)?;
    let params = ext_params(cfg, &inst)?;
    let ext = inst.extension(params)?;
    let state = match &cfg.state {
        Some(s) => s.clone(),
        None => sample_extended(&ext, &ext_spec(cfg, &inst, &params, 1))?
            .points
            .remove(0),
    };
    check_state(&state, ext.dim())?;
    let mut echo = ext_echo(cfg, &inst, &params, &ext);
    echo.insert("state".into(), json!(state));
    let mut report = Report::new("extend", Value::Object(echo));
    let k = ext.integral(&state)?;
    report.metric("H", ext.hamiltonian(&state)?);
    report.metric("L", ext.base_hamiltonian(&state)?);
    report.metric("K_re", k.re);
    report.metric("K_im", k.im);
    report.metric("flow", ext.flow(&state)?);
    observable_metrics(&mut report, &ext.system, &state[2..])?;
    let tol = tol.unwrap_or(BRACKET_TOL);
    let structure = ext.structure();
    let h = extended_field(&ext, "H")?;
    for name in ["K_re", "K_im", "L"] {
        let f = extended_field(&ext, name)?;
        let b = fd_bracket(&structure, &*h, &*f, &state, BRACKET_STEP)?;
        report.metric(
            &format!("bracket_H_{name}"),
            json!({"value": b.value, "scale": b.scale}),
        );
        report.gate(Gate::upper(format!("bracket_H_{name}"), b.normalized(), tol).at(&state));
    }
    Ok(report)
}

fn integrate_cmd(cfg: &RunConfig, tol: Option<f64>) -> Result<Report, Failure> {
    let inst = build(cfg)?;
    let ic = &cfg.integration;
    let method = match ic.method.unwrap_or(MethodName::Rk4) {
        MethodName::Rk4 => Method::Rk4 {
            dt: ic.dt.unwrap_or(DEFAULT_DT),
        },
        MethodName::Rkf45 => Method::Rkf45 {
            tol: ic.tol.unwrap_or(DEFAULT_STEP_TOL),
        },
    };
    let t_final = ic.t_final.unwrap_or(DEFAULT_T_FINAL);
    let base = ic.base.unwrap_or(false);
    let mut echo = echo(cfg, &inst);
    echo.insert(
        "integration".into(),
        json!({"method": method, "t_final": t_final, "base": base}),
    );

    let ext;
    let sys = &inst.system;
    let (y0, names, observables, flow): (Vec<f64>, Vec<String>, Vec<Observable>, RealVecFn) = if base {
        let y0 = match &cfg.state {
            Some(s) => s.clone(),
            None => {
                let spec = base_spec(cfg, &inst, 1);
                let sing = inst.singular_set();
                let pred = move |x: &[f64], m: f64| sing.as_ref().is_some_and(|p| p(x, m));
                sample_points(&SampleSpec { count: 1, ..spec }, Some(&pred))?
                    .points
                    .remove(0)
            }
        };
        check_state(&y0, sys.dim())?;
        let mut obs = vec![Observable::new("L", |x: &[f64]| sys.hamiltonian.value(x))];
        for (name, field) in &sys.observables {
            obs.push(Observable::new(name.clone(), move |x: &[f64]| field.value(x)));
        }
        (y0, sys.coord_names.clone(), obs, Box::new(|x: &[f64]| sys.flow(x)))
    } else {
        let params = ext_params(cfg, &inst)?;
        ext = inst.extension(params)?;
        echo.insert("extension".into(), json!(params));
        echo.insert("indices".into(), json!(ext.indices()));
        let y0 = match &cfg.state {
            Some(s) => s.clone(),
            None => sample_extended(&ext, &ext_spec(cfg, &inst, &params, 1))?
                .points
                .remove(0),
        };
        check_state(&y0, ext.dim())?;
        let mut names = vec!["u".to_string(), "p_u".to_string()];
        names.extend(sys.coord_names.iter().cloned());
        let e = &ext;
        let obs = vec![
            Observable::new("H", move |y: &[f64]| e.hamiltonian(y)),
            Observable::new("L", move |y: &[f64]| e.base_hamiltonian(y)),
            Observable::new("K_re", move |y: &[f64]| e.integral(y).map(|k| k.re)),
            Observable::new("K_im", move |y: &[f64]| e.integral(y).map(|k| k.im)),
        ];
        (y0, names, obs, Box::new(move |y: &[f64]| e.flow(y)))
    };
    echo.insert("state".into(), json!(y0));
    let mut report = Report::new("integrate", Value::Object(echo));
    observable_metrics(&mut report, sys, if base { &y0 } else { &y0[2..] })?;

    let traj = integrate(|y: &[f64]| flow(y), &y0, t_final, method)?;
    let conservation = conservation_report(&traj, &observables)?;
    let tol = tol.unwrap_or(DRIFT_TOL);
    let mut drifts = Map::new();
    let mut initial = Map::new();
    let mut ungated = Vec::new();
    for s in &conservation.series {
        drifts.insert(s.name.clone(), json!(s.drift));
        initial.insert(s.name.clone(), json!(s.values[0]));
        if s.values.iter().all(|v| v.abs() <= ZERO_SERIES) {
            ungated.push(s.name.clone());
            continue;
        }
        let worst = s
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| (a.1 - s.values[0]).abs().total_cmp(&(b.1 - s.values[0]).abs()))
            .map_or(0, |(i, _)| i);
        report.gate(Gate::upper(format!("drift_{}", s.name), s.drift, tol).at(&traj.states[worst]));
    }
    report.metric("steps", traj.steps);
    report.metric("rejected_steps", traj.rejected);
    report.metric("final_state", traj.states.last());
    report.metric("initial_values", Value::Object(initial));
    report.metric("drift", Value::Object(drifts));
    report.metric("ungated_zero_series", ungated);

    if let Some(path) = &cfg.output.csv {
        let mut header = vec!["t".to_string()];
        header.extend(names);
        header.extend(conservation.series.iter().map(|s| s.name.clone()));
        let mut csv = header.join(",");
        csv.push('\n');
        for (i, (t, y)) in traj.times.iter().zip(&traj.states).enumerate() {
            let mut row = vec![format!("{t:.16e}")];
            row.extend(y.iter().map(|v| format!("{v:.16e}")));
            row.extend(conservation.series.iter().map(|s| format!("{:.16e}", s.values[i])));
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        write_file(path, &csv)?;
        report.metric("csv", path.display().to_string());
    }
    Ok(report)
}

type RealVecFn<'a> = Box<dyn Fn(&[f64]) -> crate::Result<Vec<f64>> + 'a>;

fn bracket_cmd(cfg: &RunConfig, tol: Option<f64>) -> Result<Report, Failure> {
    let inst = build(cfg)?;
    let params = ext_params(cfg, &inst)?;
    let ext = inst.extension(params)?;
    let spec = ext_spec(cfg, &inst, &params, 50);
    let mut echo = ext_echo(cfg, &inst, &params, &ext);
    echo.insert("sampling".into(), json!(spec));
    let mut report = Report::new("bracket", Value::Object(echo));
    let sampled = sample_extended(&ext, &spec)?;
    let structure = ext.structure();
    let h = extended_field(&ext, "H")?;
    let tol = tol.unwrap_or(BRACKET_TOL);
    for name in ["K_re", "K_im", "L"] {
        let f = extended_field(&ext, name)?;
        let mut worst: (f64, Vec<f64>) = (0.0, Vec::new());
        let mut evaluated = 0;
        for y in &sampled.points {
            match fd_bracket(&structure, &*h, &*f, y, BRACKET_STEP) {
                Ok(b) => {
                    evaluated += 1;
                    let v = b.normalized();
                    if worst.1.is_empty() || v > worst.0 {
                        worst = (v, y.clone());
                    }
                }
                Err(e) => report.skipped_points.push(SkippedPoint {
                    point: y.clone(),
                    reason: format!("{{H, {name}}}: {e}"),
                }),
            }
        }
        if evaluated == 0 {
            return Err(Failure::Runtime(format!(
                "no state admitted evaluation of {{H, {name}}}"
            )));
        }
        report.metric(&format!("evaluated_H_{name}"), evaluated);
        report.gate(Gate::upper(format!("bracket_H_{name}"), worst.0, tol).at(&worst.1));
    }
    report.metric("rejected", sampled.rejected);
    Ok(report)
}

fn rank_cmd(
    cfg: &RunConfig,
    fields: Option<Vec<String>>,
    expect: Option<usize>,
    threshold: Option<f64>,
) -> Result<Report, Failure> {
    let inst = build(cfg)?;
    let params = ext_params(cfg, &inst)?;
    let ext = inst.extension(params)?;
    let names = fields.unwrap_or_else(|| vec!["H".into(), "K".into(), "L".into()]);
    let threshold = threshold.unwrap_or(RANK_THRESHOLD);
    let spec = ext_spec(cfg, &inst, &params, 20);
    let mut echo = ext_echo(cfg, &inst, &params, &ext);
    echo.insert("sampling".into(), json!(spec));
    echo.insert("fields".into(), json!(names));
    echo.insert("threshold".into(), json!(threshold));
    let mut report = Report::new("rank", Value::Object(echo));
    let boxed = names
        .iter()
        .map(|n| extended_field(&ext, n))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&dyn Fn(&[f64]) -> crate::Result<f64>> = boxed.iter().map(|b| b.as_ref() as _).collect();
    let states = sample_extended(&ext, &spec)?.points;
    let r = independence_rank(&refs, &states, RANK_STEP, threshold)?;
    let at = r
        .ranks
        .iter()
        .position(|&k| k == r.min_rank)
        .map(|i| states[i].clone())
        .unwrap_or_default();
    report.metric("min_rank", r.min_rank);
    report.metric("ranks", &r.ranks);
    report.metric("singular_values", &r.singular_values);
    let target = expect.unwrap_or(names.len());
    report.gate(Gate::equal("rank", r.min_rank as f64, target as f64).at(&at));
    Ok(report)
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// Maximum relative difference between the recursive and closed forms of
/// `(G_n, X_L G_n)` over `n ≤ n_max` and random triples `(G, X_L G, Λ)`.
pub fn gn_compare(n_max: u32, samples: usize, seed: u64, tol: f64) -> Result<Report, Failure> {
    if n_max == 0 || samples == 0 {
        return Err(Failure::Invalid("n-max and samples must be positive".into()));
    }
    let complex_samples = samples / 4;
    let mut report = Report::new(
        "gn-compare",
        json!({"n_max": n_max, "samples": samples, "complex_samples": complex_samples, "seed": seed}),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0, Vec::new());
    let mut record = |err: f64, at: Vec<f64>| {
        if worst.1.is_empty() || err > worst.0 {
            worst = (err, at);
        }
    };
    for _ in 0..samples {
        let (g, y, lambda): (f64, f64, f64) = (
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        for n in 1..=n_max {
            let a = gn_recursive(n, ExtDerivValue::new(g, y), lambda);
            let b = gn_closed(n, ExtDerivValue::new(g, y), lambda);
            let err = rel_err(a.value.into(), b.value.into()).max(rel_err(a.xl.into(), b.xl.into()));
            record(err, vec![n as f64, g, y, lambda]);
        }
    }
    for _ in 0..complex_samples {
        let mut draw = || Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let (g, y) = (draw(), draw());
        let lambda: f64 = rng.random_range(-2.0..2.0);
        for n in 1..=n_max {
            let a = gn_recursive(n, ExtDerivValue::new(g, y), lambda);
            let b = gn_closed(n, ExtDerivValue::new(g, y), lambda);
            let err = rel_err(a.value, b.value).max(rel_err(a.xl, b.xl));
            record(err, vec![n as f64, g.re, g.im, y.re, y.im, lambda]);
        }
    }
    report.metric("max_rel_err", worst.0);
    report.metric("worst_case", &worst.1);
    report.gate(Gate::upper("max_rel_err", worst.0, tol).at(&worst.1));
    Ok(report)
}
