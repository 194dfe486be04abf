//! `dbar` — verification, identity suites, homotopy diagnostics and the
//! gauge solver for connection data on finite resolutions over the disk.
//!
//! Exit codes: 0 success/converged, 1 completed without meeting the target
//! (verification failure, identity failure, tolerance not reached), 2 input
//! error, 3 runtime solver failure.

mod expr;
mod problem;

use clap::{Args, Parser, Subcommand};
use dbar_core::coeff::Coeff;
use dbar_core::grid::GridCoeff;
use dbar_core::koppelman::{homotopy_residual, operator_norm_probe, GridForm, QuadratureSpec};
use dbar_core::recalibration::{param_product, recalibrate};
use dbar_core::series::SeriesCoeff;
use dbar_core::solver::{iterate, PredictorConfig, SolveConfig, StopReason};
use dbar_core::suite;
use dbar_core::{holder, testgen, MatrixForm};
use num::complex::Complex64;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dbar", version, about = "gauge calculus on resolutions over the disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the integrability relations and composite products of a problem.
    Verify(VerifyArgs),
    /// Run the randomized exact-identity suites on the series backend.
    Identities(IdentityArgs),
    /// Run the rapid-convergence gauge solver on a grid problem.
    Solve(SolveArgs),
    /// Probe the homotopy formula and the interior estimate of the transform.
    Homotopy(HomotopyArgs),
    /// Report the Hölder weight sequence and norm diagnostics of a problem.
    Norms(NormArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Problem file (JSON).
    #[arg(long)]
    file: String,
    /// Largest acceptable residual.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct IdentityArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[arg(long, default_value_t = 2)]
    n_max: usize,
    #[arg(long, default_value_t = 2)]
    m_max: usize,
    #[arg(long, default_value_t = 2)]
    p_max: usize,
    #[arg(long, default_value_t = 4)]
    acc: u32,
    /// Negative control: corrupt the parameter product before the action
    /// check and confirm the failure is localized there.
    #[arg(long, default_value_t = false)]
    corrupt_product_law: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    file: String,
    /// Initial radius (overrides the problem file).
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 25)]
    max_iter: usize,
    /// Grid resolution NxM (overrides the problem file).
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    mu: Option<f64>,
    /// Unit-safety gate for the step parameters.
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Integrability gate on the input data.
    #[arg(long, default_value_t = 1e-6)]
    gate: f64,
    /// Write the per-step history as CSV.
    #[arg(long)]
    history: Option<String>,
}

#[derive(Args)]
struct HomotopyArgs {
    /// Grid resolution NxM.
    #[arg(long, default_value = "128x256")]
    grid: String,
    /// Probe coefficient: zero | dzbar | zzbar | z2zbar.
    #[arg(long, default_value = "dzbar")]
    probe: String,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

#[derive(Args)]
struct NormArgs {
    #[arg(long)]
    file: String,
    /// Derivative order of the reported norms.
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Largest weight index to build.
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    #[arg(long)]
    radius: Option<f64>,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Identities(args) => cmd_identities(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Homotopy(args) => cmd_homotopy(args),
        Command::Norms(args) => cmd_norms(args),
    };
    std::process::exit(code);
}

fn emit(report: &Value) {
    println!("{}", serde_json::to_string_pretty(report).expect("serializable report"));
}

fn input_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    2
}

fn residual_map<K: std::fmt::Display, V: Clone + Into<Value>>(
    map: &std::collections::BTreeMap<K, V>,
) -> Value {
    let mut obj = serde_json::Map::new();
    for (k, v) in map {
        obj.insert(k.to_string(), v.clone().into());
    }
    Value::Object(obj)
}

fn meta_json(meta: &problem::Meta) -> Value {
    json!({
        "n": meta.n,
        "m": meta.m,
        "p": meta.p,
        "backend": meta.backend,
        "mu": meta.mu,
        "series_degree": meta.series_degree,
        "grid": meta.grid.map(|(a, b)| json!({"n_rad": a, "n_ang": b})),
        "r0": meta.r0,
    })
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let loaded = match problem::load(&args.file) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let (residuals, composite, meta) = match &loaded {
        problem::Problem::Series { data, meta } => {
            let mut r = std::collections::BTreeMap::new();
            for ((s, k), v) in data.conn.integrability_residual() {
                r.insert(format!("{s},{k}"), v);
            }
            (r, data.conn.complex_residual(), meta)
        }
        problem::Problem::Grid { data, meta } => {
            let mut r = std::collections::BTreeMap::new();
            for ((s, k), v) in data.conn.integrability_residual() {
                r.insert(format!("{s},{k}"), v);
            }
            (r, data.conn.complex_residual(), meta)
        }
    };
    let max = residuals
        .values()
        .cloned()
        .chain(composite.values().cloned())
        .fold(0.0f64, f64::max);
    let pass = max <= args.tol;
    emit(&json!({
        "command": "verify",
        "config": { "file": args.file, "tol": args.tol, "problem": meta_json(meta) },
        "integrability_residuals": residual_map(&residuals),
        "composite_residuals": residual_map(&composite),
        "max_residual": max,
        "pass": pass,
    }));
    if pass {
        0
    } else {
        1
    }
}

fn outcome_json(outcomes: &[suite::IdentityOutcome]) -> Value {
    Value::Array(
        outcomes
            .iter()
            .map(|o| {
                json!({
                    "name": o.name,
                    "cases": o.cases,
                    "failures": o.failures,
                    "pass": o.passed(),
                })
            })
            .collect(),
    )
}

fn cmd_identities(args: IdentityArgs) -> i32 {
    let algebra = suite::exact_algebra_suite(args.seed, args.cases, args.n_max, args.m_max, args.p_max, args.acc);
    let action =
        suite::semigroup_action_suite(args.seed + 1, args.cases.div_ceil(2), args.n_max, args.m_max, args.p_max, args.acc);
    let expansion =
        suite::expansion_suite(args.seed + 2, args.cases.div_ceil(5).max(2), 4, args.m_max.max(1), args.p_max, 3);

    // Negative control: recompute the action law with a corrupted product.
    let mut corrupted = Vec::new();
    if args.corrupt_product_law {
        let mut rng = testgen::rng(args.seed + 3);
        let mut outcome = suite::IdentityOutcome { name: "action_check_corrupted_product", cases: 0, failures: vec![] };
        for case in 0..5usize {
            let inst = testgen::random_instance(&mut rng, args.n_max, args.m_max, args.p_max, args.acc);
            outcome.cases += 1;
            let two_step =
                recalibrate(&inst.eta2, &recalibrate(&inst.eta1, &inst.omega).unwrap()).unwrap();
            let mut product = param_product(&inst.eta1, &inst.eta2).unwrap();
            corrupt_param(&mut product);
            let one_step = recalibrate(&product, &inst.omega).unwrap();
            let mut exact = true;
            for (s, k) in inst.omega.index_range() {
                let delta =
                    two_step.entry(s as i64, k).sub(&one_step.entry(s as i64, k)).unwrap();
                exact &= delta.is_zero();
            }
            if !exact {
                outcome.failures.push(format!("case {case}: corrupted product detected"));
            }
        }
        corrupted.push(outcome);
    }

    let genuine_pass =
        suite::all_passed(&algebra) && suite::all_passed(&action) && suite::all_passed(&expansion);
    // The corrupted control must fail, and only in the action section.
    let control_triggered = corrupted.iter().any(|o| !o.failures.is_empty());
    emit(&json!({
        "command": "identities",
        "config": {
            "seed": args.seed, "cases": args.cases, "n_max": args.n_max,
            "m_max": args.m_max, "p_max": args.p_max, "acc": args.acc,
            "corrupt_product_law": args.corrupt_product_law,
        },
        "exact_algebra": outcome_json(&algebra),
        "semigroup_action": outcome_json(&action),
        "expansion": outcome_json(&expansion),
        "negative_control": outcome_json(&corrupted),
        "pass": genuine_pass,
        "negative_control_triggered": control_triggered,
    }));
    if args.corrupt_product_law {
        1 // a corrupted run reports failure by design
    } else if genuine_pass {
        0
    } else {
        1
    }
}

fn corrupt_param(param: &mut dbar_core::GaugeParam<SeriesCoeff>) {
    // Add a bogus z̄-term to the first stored block (or to the (0,0) block).
    let ctx = param.ctx().clone();
    let (rows, cols) = param.shape(0, 0);
    let mut bogus = MatrixForm::zero(&ctx, rows, cols, 0);
    let mut entries = vec![SeriesCoeff::zero(&ctx); rows * cols];
    let n = <SeriesCoeff as Coeff>::ambient(&ctx);
    entries[0] = SeriesCoeff::monomial(
        &ctx,
        dbar_core::coeff::crat(1, 1),
        &vec![0; n],
        &{
            let mut zb = vec![0; n];
            zb[0] = 1;
            zb
        },
        4,
    );
    bogus.set_component(vec![], entries).unwrap();
    let perturbed = param.entry(0, 0).add(&bogus).unwrap();
    param.set_entry(0, 0, perturbed).unwrap();
}

fn parse_grid(text: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = text.split(['x', 'X']).collect();
    if parts.len() != 2 {
        return Err(format!("bad grid '{text}': expected NxM"));
    }
    let a = parts[0].parse::<usize>().map_err(|_| format!("bad grid '{text}'"))?;
    let b = parts[1].parse::<usize>().map_err(|_| format!("bad grid '{text}'"))?;
    Ok((a, b))
}

fn cmd_solve(args: SolveArgs) -> i32 {
    let loaded = match problem::load(&args.file) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let problem::Problem::Grid { data, meta } = loaded else {
        return input_error(
            "solve needs a grid-backend problem (series problems are exact-verification input)",
        );
    };
    let r0 = args.r0.unwrap_or(meta.r0);
    let (n_rad, n_ang) = match &args.grid {
        Some(text) => match parse_grid(text) {
            Ok(v) => v,
            Err(e) => return input_error(&e),
        },
        None => meta.grid.unwrap_or((128, 256)),
    };
    let quad = match QuadratureSpec::new(n_rad, n_ang, 1.0) {
        Ok(q) => q,
        Err(e) => return input_error(&e.to_string()),
    };
    let config = SolveConfig {
        r0,
        tol: args.tol,
        max_iter: args.max_iter,
        quad,
        mu: args.mu.unwrap_or(meta.mu),
        eps: args.eps,
        integrability_gate: args.gate,
        h_max: 1,
        predictor: Some(PredictorConfig::default()),
        record_states: false,
    };
    // The problem grid and the solve grid may differ; the solver resamples
    // onto its own grid at r0 (which must not exceed the data radius).
    if r0 > meta.r0 {
        return input_error(&format!(
            "requested r0 = {r0} exceeds the problem data radius {}",
            meta.r0
        ));
    }
    let report = match iterate(&data, &config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };

    if let Some(path) = &args.history {
        if let Err(e) = write_history(path, &report, meta.m) {
            return input_error(&format!("cannot write history {path}: {e}"));
        }
    }

    let history: Vec<Value> = report
        .history
        .iter()
        .map(|rec| {
            json!({
                "k": rec.k,
                "r_k": rec.radius,
                "a_k": rec.a,
                "b_k": rec.b,
                "max_eta_sup": rec.max_eta_sup,
                "sigma_residual_psi": rec.sigma_psi,
                "sigma_residual_phi": rec.sigma_phi,
                "gauge_sup": rec.gauge_sup,
                "gauge_inv_sup": rec.gauge_inv_sup,
            })
        })
        .collect();
    let predictor: Vec<Value> = report
        .predictor
        .iter()
        .map(|p| json!({"k": p.k, "alpha": p.alpha, "beta": p.beta}))
        .collect();
    emit(&json!({
        "command": "solve",
        "config": {
            "file": args.file, "r0": r0, "tol": args.tol, "max_iter": args.max_iter,
            "grid": {"n_rad": n_rad, "n_ang": n_ang}, "mu": config.mu, "eps": args.eps,
            "integrability_gate": args.gate, "problem": meta_json(&meta),
        },
        "converged": report.converged,
        "stop": report.stop.to_string(),
        "iterations": report.iterations,
        "final_radius": report.final_radius,
        "r_infinity": report.r_infinity,
        "final_sigma_residual": {
            "psi": report.final_sigma.psi,
            "phi": report.final_sigma.phi,
            "max": report.final_sigma.max(),
        },
        "weights": report.weight_values,
        "history": history,
        "predictor": predictor,
    }));
    match report.stop {
        StopReason::Converged => 0,
        StopReason::ToleranceNotReached => 1,
        StopReason::DivergenceGuard { .. }
        | StopReason::StepFailure { .. }
        | StopReason::NotIntegrable { .. } => 3,
    }
}

fn write_history(
    path: &str,
    report: &dbar_core::solver::SolveReport,
    m: usize,
) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)?;
    let mut header = vec![
        "k".to_string(),
        "r_k".to_string(),
        "a_k".to_string(),
        "b_k".to_string(),
        "max_eta_sup".to_string(),
        "sigma_residual_psi".to_string(),
    ];
    for s in 1..=m {
        header.push(format!("sigma_residual_phi_{s}"));
    }
    header.push("gauge_sup".to_string());
    header.push("gauge_inv_sup".to_string());
    w.write_record(&header)?;
    for rec in &report.history {
        let mut row = vec![
            rec.k.to_string(),
            format!("{:.17e}", rec.radius),
            format!("{:.17e}", rec.a),
            format!("{:.17e}", rec.b),
            format!("{:.17e}", rec.max_eta_sup),
            rec.sigma_psi.map(|v| format!("{v:.17e}")).unwrap_or_default(),
        ];
        for s in 0..m {
            row.push(
                rec.sigma_phi.get(s).map(|v| format!("{v:.17e}")).unwrap_or_default(),
            );
        }
        row.push(format!("{:.17e}", rec.gauge_sup));
        row.push(format!("{:.17e}", rec.gauge_inv_sup));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_homotopy(args: HomotopyArgs) -> i32 {
    let (n_rad, n_ang) = match parse_grid(&args.grid) {
        Ok(v) => v,
        Err(e) => return input_error(&e),
    };
    let spec = match QuadratureSpec::new(n_rad, n_ang, 1.0) {
        Ok(s) => s,
        Err(e) => return input_error(&e.to_string()),
    };
    let probe_fn: Box<dyn Fn(Complex64) -> Complex64> = match args.probe.as_str() {
        "zero" => Box::new(|_| Complex64::new(0.0, 0.0)),
        "dzbar" => Box::new(|_| Complex64::new(1.0, 0.0)),
        "zzbar" => Box::new(|z| z * z.conj()),
        "z2zbar" => Box::new(|z| z * z * z.conj()),
        other => return input_error(&format!("unknown probe '{other}'")),
    };
    let run = |s: &QuadratureSpec| -> Result<f64, String> {
        let ctx = s.grid_ctx(args.radius).map_err(|e| e.to_string())?;
        let u = GridForm::scalar_form(&ctx, vec![1], GridCoeff::from_fn(&ctx, &probe_fn))
            .map_err(|e| e.to_string())?;
        homotopy_residual(&u, args.radius, s).map_err(|e| e.to_string())
    };
    let fine = match run(&spec) {
        Ok(v) => v,
        Err(e) => return input_error(&e),
    };
    let coarse_spec = match QuadratureSpec::new(n_rad / 2, n_ang / 2, 1.0) {
        Ok(s) => s,
        Err(e) => return input_error(&e.to_string()),
    };
    let coarse = match run(&coarse_spec) {
        Ok(v) => v,
        Err(e) => return input_error(&e),
    };
    let order = if fine > 0.0 && coarse > 0.0 { (coarse / fine).log2() } else { f64::NAN };

    let probe_report = match operator_norm_probe(0, 0.5, args.radius, &spec, 0.5, 2, 1.0) {
        Ok(p) => p,
        Err(e) => return input_error(&e.to_string()),
    };
    emit(&json!({
        "command": "homotopy",
        "config": {
            "grid": {"n_rad": n_rad, "n_ang": n_ang},
            "probe": args.probe,
            "radius": args.radius,
        },
        "residual": fine,
        "residual_coarse": coarse,
        "refinement_order": order,
        "operator_norm_probe": {
            "h": probe_report.h,
            "sigma": probe_report.sigma,
            "max_ratio": probe_report.max_ratio,
            "reference_bound": probe_report.bound,
            "ratios": probe_report.ratios,
        },
    }));
    0
}

fn cmd_norms(args: NormArgs) -> i32 {
    let loaded = match problem::load(&args.file) {
        Ok(p) => p,
        Err(e) => return input_error(&e),
    };
    let report = match &loaded {
        problem::Problem::Series { data, meta } => {
            norms_report(&data.conn, meta, args.order, args.k_max, args.radius.unwrap_or(1.0))
        }
        problem::Problem::Grid { data, meta } => {
            norms_report(&data.conn, meta, args.order, args.k_max, args.radius.unwrap_or(meta.r0))
        }
    };
    match report {
        Ok(v) => {
            emit(&v);
            0
        }
        Err(e) => input_error(&e),
    }
}

fn norms_report<F: Coeff>(
    conn: &dbar_core::ConnectionData<F>,
    meta: &problem::Meta,
    order: usize,
    k_max: usize,
    radius: f64,
) -> Result<Value, String> {
    let bounds = holder::derivative_bounds(conn, k_max).map_err(|e| e.to_string())?;
    let ctx = holder::WeightContext::from_uniform_bounds(meta.n, &bounds);
    let weights = holder::build_weights(&ctx, k_max).map_err(|e| e.to_string())?;
    let a = holder::diag_a(conn, radius, order, meta.mu, &weights).map_err(|e| e.to_string())?;
    let c = holder::diag_c(conn, radius, order, meta.mu).map_err(|e| e.to_string())?;
    let d_k: Vec<f64> = (1..=k_max).map(|k| holder::binomial_reciprocal(meta.n, k)).collect();
    Ok(json!({
        "command": "norms",
        "config": {
            "problem": meta_json(meta), "order": order, "k_max": k_max, "radius": radius,
        },
        "weights": weights.values(),
        "weight_provenance": {
            "a": weights.provenance.a,
            "b": weights.provenance.b,
            "d": weights.provenance.d,
        },
        "d_k": d_k,
        "diag_a": a,
        "diag_c": c,
        "invariant_violation": weights.invariant_violation(meta.n),
    }))
}
