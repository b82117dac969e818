use std::fmt;
use std::io::BufReader;
use std::path::Path;

use plgnet_core::estimators::{fit_plg, nlr_lambda_max, plg_lambda_max};
use plgnet_core::eval::{
    bench_fit, entry_scores, roc_curve, summarize, write_bench_csv, write_roc_csv, write_summary_csv, BenchLabels,
    BenchSettings, RocCurve, MIN_REPEATS,
};
use plgnet_core::io::{read_samples_csv, write_edge_list, write_samples_csv, CsvOptions};
use plgnet_core::sampling::{derive_seed, generate_graph, gibbs_sample, GibbsConfig, GraphSpec};
use plgnet_core::selection::{stars_select, write_curve_csv, StarsConfig};
use plgnet_core::solver::{geometric_grid, LambdaGrid};
use plgnet_core::{
    build_stacked, fit_direct_pl, fit_nlr, DirectConfig, Error, FitReport, Method, SampleMatrix, Screening,
    SolverConfig, Symmetrize, ThetaMatrix,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::*;
use crate::manifest::Run;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

pub const COEFFICIENTS_SCHEMA: &str = "plgnet.coefficients/1";
pub const SELECTION_SCHEMA: &str = "plgnet.selection/1";
pub const SIMULATION_SCHEMA: &str = "plgnet.simulation/1";

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NoFeasibleLambda { .. } => EXIT_INFEASIBLE,
            Error::NonConvergence { .. } | Error::PathIncomplete { .. } | Error::DegenerateResponse => EXIT_SOLVER,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

fn config_echo<T: Serialize>(global: &GlobalArgs, args: &T) -> serde_json::Value {
    json!({ "global": global, "args": args })
}

fn solver_config(a: &SolverArgs) -> CliResult<SolverConfig> {
    let cfg = SolverConfig {
        tol: a.tol,
        kkt_tol: a.kkt_tol,
        max_outer: a.max_outer,
        max_inner: a.max_inner,
        screening: match a.screening {
            ScreeningArg::Strong => Screening::Strong,
            ScreeningArg::None => Screening::None,
        },
        ..SolverConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn direct_config(a: &SolverArgs) -> DirectConfig {
    DirectConfig {
        tol: a.direct_tol,
        max_iter: a.direct_max_iter,
        ..DirectConfig::default()
    }
}

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::Plg => Method::Plg,
        MethodArg::Nlr => Method::Nlr,
        MethodArg::Direct => Method::DirectPl,
    }
}

fn symmetrize(s: SymmetrizeArg) -> Symmetrize {
    match s {
        SymmetrizeArg::Mean => Symmetrize::Mean,
        SymmetrizeArg::And => Symmetrize::And,
        SymmetrizeArg::Or => Symmetrize::Or,
    }
}

fn read_samples(run: &mut Run, data: &InputArgs) -> CliResult<SampleMatrix> {
    let bytes = run.read_input(&data.input)?;
    let parsed = read_samples_csv(
        BufReader::new(bytes.as_slice()),
        CsvOptions {
            impute_zero: data.impute_zero,
        },
    )?;
    if parsed.imputed > 0 {
        run.warnings.push(format!("{} entries imputed as 0", parsed.imputed));
    }
    Ok(parsed.samples)
}

fn graph_spec(p: usize, edge_prob: f64, diag: &[DiagOverride], seed: u64) -> GraphSpec {
    let mut spec = GraphSpec::new(p, edge_prob, seed);
    for d in diag {
        spec = spec.with_diagonal(d.vertex - 1, d.value);
    }
    spec
}

/// Graph and chain seeds of trial `t`.
fn trial_seeds(base: u64, t: u64) -> (u64, u64) {
    (derive_seed(base, 2 * t), derive_seed(base, 2 * t + 1))
}

pub fn simulate(global: &GlobalArgs, a: &SimulateArgs) -> CliResult {
    let mut run = Run::new(&global.output_dir, "simulate", config_echo(global, a))?;
    let (graph_seed, chain_seed) = trial_seeds(global.seed, 0);
    let spec = graph_spec(a.p, a.edge_prob, &a.diag, graph_seed);
    let gibbs = GibbsConfig {
        n_samples: a.n,
        burn_in: a.burn_in,
        thinning: a.thinning,
        seed: chain_seed,
    };
    let theta = generate_graph(&spec)?;
    let x = gibbs_sample(&theta, &gibbs)?;
    run.set_seeds(json!({ "base": global.seed, "graph": graph_seed, "gibbs": chain_seed }));

    run.write_json("theta.json", &theta, true)?;
    let mut csv = Vec::new();
    write_samples_csv(&x, &mut csv)?;
    run.write("samples.csv", &csv, true)?;
    run.write_json(
        "simulation.json",
        &json!({ "schema": SIMULATION_SCHEMA, "graph": spec, "gibbs": gibbs }),
        true,
    )?;
    run.finish()?;
    Ok(())
}

/// Deterministic part of a fit: estimates and convergence, no timings.
#[derive(Debug, Serialize, Deserialize)]
pub struct CoefficientsFile {
    pub schema: String,
    pub method: Method,
    /// Penalty levels on the pseudo-likelihood scale.
    pub lambdas: Vec<f64>,
    /// The levels the method was run at (half for NLR).
    pub method_lambdas: Vec<f64>,
    pub estimates: Vec<ThetaMatrix>,
    pub objective: Vec<f64>,
    pub converged: Vec<bool>,
    pub iterations: Vec<usize>,
}

fn resolve_fit_grid(x: &SampleMatrix, a: &FitArgs, cfg: &SolverConfig) -> CliResult<Vec<f64>> {
    match (a.lambda.is_empty(), a.auto_grid) {
        (false, _) => Ok(a.lambda.clone()),
        (true, Some(g)) => {
            let lmax = match a.method {
                MethodArg::Nlr => 2.0 * nlr_lambda_max(x, cfg)?,
                _ => plg_lambda_max(x, cfg)?,
            };
            Ok(geometric_grid(lmax, g.ratio, g.count)?)
        }
        (true, None) => Err(CliError::usage("give --lambda or --auto-grid")),
    }
}

pub fn fit(global: &GlobalArgs, a: &FitArgs) -> CliResult {
    let mut run = Run::new(&global.output_dir, "fit", config_echo(global, a))?;
    let x = read_samples(&mut run, &a.data)?;
    let cfg = solver_config(&a.solver)?;
    let lambdas = resolve_fit_grid(&x, a, &cfg)?;
    run.set_seeds(json!({ "base": global.seed }));

    let report: FitReport = match a.method {
        MethodArg::Plg => fit_plg(&x, &lambdas, &cfg)?,
        MethodArg::Nlr => {
            let half: Vec<f64> = lambdas.iter().map(|l| l / 2.0).collect();
            fit_nlr(&x, &half, &cfg, symmetrize(a.symmetrize))?
        }
        MethodArg::Direct => fit_direct_pl(&x, &lambdas, &direct_config(&a.solver))?,
    };
    run.warnings.extend(report.warnings.iter().cloned());

    let coefficients = CoefficientsFile {
        schema: COEFFICIENTS_SCHEMA.into(),
        method: report.method,
        lambdas: lambdas.clone(),
        method_lambdas: report.lambdas.clone(),
        estimates: report.estimates.clone(),
        objective: report.objective.iter().map(|o| o.total).collect(),
        converged: report.converged.clone(),
        iterations: report.iterations.clone(),
    };
    run.write_json("coefficients.json", &coefficients, true)?;
    run.write_json("fit_report.json", &report, false)?;
    for (k, theta) in report.estimates.iter().enumerate() {
        let mut edges = Vec::new();
        write_edge_list(theta, a.positive_only, &mut edges)?;
        run.write(&format!("edges_{}.csv", k + 1), &edges, true)?;
    }
    if a.export_design {
        let sp = build_stacked(&x)?;
        let mut coo = Vec::new();
        sp.design.write_coo(&mut coo, a.design_max_entries)?;
        run.write("design.coo", &coo, true)?;
    }
    run.finish()?;
    Ok(())
}

pub fn select(global: &GlobalArgs, a: &SelectArgs) -> CliResult {
    let mut run = Run::new(&global.output_dir, "select", config_echo(global, a))?;
    let x = read_samples(&mut run, &a.data)?;
    let estimator = match a.method {
        MethodArg::Plg => Method::Plg,
        MethodArg::Nlr => Method::Nlr,
        MethodArg::Direct => return Err(CliError::usage("select supports --method plg or nlr")),
    };
    // Explicit grids are on the pseudo-likelihood scale like `fit`.
    let scale = if estimator == Method::Nlr { 0.5 } else { 1.0 };
    let lambda_grid = match (a.lambda.is_empty(), a.auto_grid) {
        (false, _) => LambdaGrid::Explicit(a.lambda.iter().map(|l| l * scale).collect()),
        (true, Some(g)) => LambdaGrid::Auto {
            count: g.count,
            ratio: g.ratio,
        },
        (true, None) => LambdaGrid::Auto {
            count: 30,
            ratio: 0.01,
        },
    };
    let stars_seed = derive_seed(global.seed, 0);
    let cfg = StarsConfig {
        n_subsamples: a.subsamples,
        subsample_size: a.subsample_size,
        beta: a.beta,
        lambda_grid,
        seed: stars_seed,
        estimator,
        symmetrize: symmetrize(a.symmetrize),
        solver: solver_config(&a.solver)?,
    };
    run.set_seeds(json!({ "base": global.seed, "subsamples": stars_seed }));
    let result = stars_select(&x, &cfg)?;
    run.warnings.extend(result.warnings.iter().cloned());

    let (plg_scale, nlr_scale) = match estimator {
        Method::Nlr => (2.0 * result.selected_lambda, result.selected_lambda),
        _ => (result.selected_lambda, result.selected_lambda / 2.0),
    };
    let mut curve = Vec::new();
    write_curve_csv(&result, &mut curve)?;
    run.write("stars_curve.csv", &curve, true)?;
    run.write_json(
        "selection.json",
        &json!({
            "schema": SELECTION_SCHEMA,
            "estimator": estimator,
            "curve_scale": if estimator == Method::Nlr { "node" } else { "pseudo-likelihood" },
            "selected_index": result.selected_index + 1,
            "selected_lambda": plg_scale,
            "selected_lambda_nlr": nlr_scale,
            "beta": a.beta,
            "subsamples": result.n_subsamples,
            "subsample_size": result.subsample_size,
            "lambdas": result.lambdas,
            "instability": result.instability,
            "monotone_instability": result.monotone,
            "mean_edge_count": result.mean_edge_count,
        }),
        true,
    )?;
    run.finish()?;
    Ok(())
}

/// An estimate file: a single parameter matrix or a `fit` coefficients file.
fn read_estimates(bytes: &[u8]) -> CliResult<(Vec<f64>, Vec<ThetaMatrix>)> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| CliError::usage(format!("estimate file: {e}")))?;
    if value.get("schema").and_then(|s| s.as_str()) == Some(COEFFICIENTS_SCHEMA) {
        let file: CoefficientsFile =
            serde_json::from_value(value).map_err(|e| CliError::usage(format!("estimate file: {e}")))?;
        Ok((file.lambdas, file.estimates))
    } else {
        let theta: ThetaMatrix =
            serde_json::from_value(value).map_err(|e| CliError::usage(format!("estimate file: {e}")))?;
        Ok((vec![f64::NAN], vec![theta]))
    }
}

pub fn roc(global: &GlobalArgs, a: &RocArgs) -> CliResult {
    let mut run = Run::new(&global.output_dir, "roc", config_echo(global, a))?;
    let truth_bytes = run.read_input(&a.truth)?;
    let truth: ThetaMatrix =
        serde_json::from_slice(&truth_bytes).map_err(|e| CliError::usage(format!("truth file: {e}")))?;
    let estimate_bytes = run.read_input(&a.estimate)?;
    let (lambdas, estimates) = read_estimates(&estimate_bytes)?;

    let curves: Vec<(String, f64, RocCurve)> = match a.mode {
        RocMode::PerLambda => estimates
            .iter()
            .zip(&lambdas)
            .enumerate()
            .map(|(k, (e, l))| Ok(((k + 1).to_string(), *l, roc_curve(&truth, e)?)))
            .collect::<CliResult<_>>()?,
        RocMode::Path => {
            if lambdas.iter().any(|l| l.is_nan()) {
                return Err(CliError::usage("path mode needs a coefficients file from fit"));
            }
            let scores = entry_scores(&lambdas, &estimates)?;
            vec![("path".into(), f64::NAN, roc_curve(&truth, &scores)?)]
        }
    };
    let mut points = String::from("curve,threshold,fpr,tpr\n");
    let mut auc = String::from("curve,lambda,auc\n");
    for (label, lambda, curve) in &curves {
        let mut buf = Vec::new();
        write_roc_csv(curve, &mut buf)?;
        for line in String::from_utf8_lossy(&buf).lines().skip(1) {
            points.push_str(&format!("{label},{line}\n"));
        }
        let lambda = if lambda.is_nan() { String::new() } else { format!("{lambda:e}") };
        auc.push_str(&format!("{label},{lambda},{:e}\n", curve.auc));
    }
    run.write("roc.csv", points.as_bytes(), true)?;
    run.write("auc.csv", auc.as_bytes(), true)?;
    run.finish()?;
    for (label, _, curve) in &curves {
        println!("{label}\tAUC {:.6}", curve.auc);
    }
    Ok(())
}

pub fn bench(global: &GlobalArgs, a: &BenchArgs) -> CliResult {
    if a.repeats < MIN_REPEATS {
        return Err(CliError::usage(format!(
            "warning: --repeats {} is below the minimum of {MIN_REPEATS}",
            a.repeats
        )));
    }
    let mut run = Run::new(&global.output_dir, "bench", config_echo(global, a))?;
    let settings = BenchSettings {
        solver: solver_config(&a.solver)?,
        direct: direct_config(&a.solver),
        symmetrize: Symmetrize::Mean,
        repeats: a.repeats,
    };
    let mut records = Vec::new();
    let mut seeds = Vec::new();
    for &p in &a.p {
        for &edge_prob in &a.edge_prob {
            for t in 0..a.trials as u64 {
                let (graph_seed, chain_seed) = trial_seeds(global.seed, t);
                seeds.push(json!({ "p": p, "edge_prob": edge_prob, "trial": t + 1, "graph": graph_seed, "gibbs": chain_seed }));
                let theta = generate_graph(&graph_spec(p, edge_prob, &a.diag, graph_seed))?;
                let x = gibbs_sample(
                    &theta,
                    &GibbsConfig {
                        n_samples: a.n,
                        burn_in: a.burn_in,
                        thinning: 1,
                        seed: chain_seed,
                    },
                )?;
                for &m in &a.methods {
                    let lambdas: Vec<f64> = match m {
                        MethodArg::Nlr => a.lambda.iter().map(|l| l / 2.0).collect(),
                        _ => a.lambda.clone(),
                    };
                    let labels = BenchLabels {
                        edge_prob: Some(edge_prob),
                        trial_seed: graph_seed,
                    };
                    records.extend(bench_fit(method(m), &x, &lambdas, &settings, labels)?);
                }
            }
        }
    }
    run.set_seeds(json!({ "base": global.seed, "trials": seeds }));
    for r in records.iter().filter(|r| !r.converged) {
        let msg = format!("{} p={} lambda={}: not converged", r.method, r.p, r.lambda);
        if !run.warnings.contains(&msg) {
            run.warnings.push(msg);
        }
    }
    let mut buf = Vec::new();
    write_bench_csv(&records, &mut buf)?;
    run.write("bench_records.csv", &buf, false)?;
    let mut buf = Vec::new();
    write_summary_csv(&summarize(&records), &mut buf)?;
    run.write("bench_summary.csv", &buf, false)?;
    run.finish()?;
    Ok(())
}

pub fn ensure_output_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir)?;
    Ok(())
}
