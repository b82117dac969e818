//! The three network learners.
//!
//! * [`fit_plg`] solves the stacked logistic regression, so every pair shares
//!   a single coefficient and the estimate is symmetric by construction.
//! * [`fit_nlr`] runs one penalized logistic regression per vertex and
//!   symmetrizes afterwards.
//! * [`fit_direct_pl`] maximizes the penalized pseudo-likelihood directly on
//!   `Θ` by accelerated proximal gradient. It shares no code path with the
//!   stacked solver and serves as the reference optimizer.
//!
//! Penalty scales. The user-facing `λ` of PLG and the direct optimizer is
//! the one in `N λ Σ_{s<t} |θ_st|`. The stacked solver averages its loss over
//! `N p` observations, so PLG hands it `λ / p`. A node regression averages
//! over `N` observations and uses its own `λ` unchanged; splitting each
//! pair's penalty between its two conditionals makes the matching node-wise
//! value `λ / 2` (see [`crate::selection::half_lambda_translate`]).

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    curvature_bound_product, pseudo_likelihood, pseudo_likelihood_gradient, ObjectiveValue,
    SampleMatrix, ThetaMatrix,
};
use crate::numeric::{logit, soft_threshold};
use crate::solver::{self, validate_grid, Design, LogisticProblem, PathSolution, SolverConfig};
use crate::transform::{build_stacked, devectorize, ThetaVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Plg,
    Nlr,
    #[serde(rename = "direct")]
    DirectPl,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Plg => "plg",
            Method::Nlr => "nlr",
            Method::DirectPl => "direct",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plg" => Ok(Method::Plg),
            "nlr" => Ok(Method::Nlr),
            "direct" | "directpl" | "direct-pl" => Ok(Method::DirectPl),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// How NLR combines `θ̂_st^(s)` and `θ̂_ts^(t)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetrize {
    /// Average of the two estimates.
    #[default]
    Mean,
    /// Keep only if both are nonzero; value is their mean.
    And,
    /// Keep if either is nonzero; value is the mean of the nonzero ones.
    Or,
}

impl Symmetrize {
    pub fn combine(&self, a: f64, b: f64) -> f64 {
        match self {
            Symmetrize::Mean => 0.5 * (a + b),
            Symmetrize::And => {
                if a != 0.0 && b != 0.0 {
                    0.5 * (a + b)
                } else {
                    0.0
                }
            }
            Symmetrize::Or => match (a != 0.0, b != 0.0) {
                (true, true) => 0.5 * (a + b),
                (true, false) => a,
                (false, true) => b,
                (false, false) => 0.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectConfig {
    /// Threshold on the max-norm of the proximal gradient mapping of the
    /// unaveraged objective.
    pub tol: f64,
    pub max_iter: usize,
    pub power_iterations: usize,
    /// Nesterov momentum with gradient-based restarts.
    pub accelerated: bool,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 50_000,
            power_iterations: 100,
            accelerated: true,
        }
    }
}

/// Estimates and diagnostics for one method over a penalty grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub schema: String,
    pub method: Method,
    /// Penalty levels as passed in.
    pub lambdas: Vec<f64>,
    /// The penalty each level maps to inside the optimizer.
    pub internal_lambdas: Vec<f64>,
    pub estimates: Vec<ThetaMatrix>,
    /// Penalized pseudo-likelihood of each estimate at its `λ`.
    pub objective: Vec<ObjectiveValue>,
    pub wall_time_ns: Vec<u64>,
    /// Time spent before the first grid point (building the stacked
    /// problem for PLG, the step-size estimate for the direct optimizer).
    pub setup_ns: u64,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    /// KKT violation on the solver's scale (PLG, NLR: max over nodes) or
    /// the final proximal-gradient mapping norm (direct).
    pub optimality: Vec<f64>,
    /// NLR only: `max_{s<t} |θ̂_st^(s) − θ̂_ts^(t)|` before symmetrization.
    pub asymmetry: Vec<f64>,
    pub warnings: Vec<String>,
}

pub const FIT_REPORT_SCHEMA: &str = "plgnet.fit_report/1";

impl FitReport {
    fn new(method: Method) -> Self {
        Self {
            schema: FIT_REPORT_SCHEMA.into(),
            method,
            lambdas: Vec::new(),
            internal_lambdas: Vec::new(),
            estimates: Vec::new(),
            objective: Vec::new(),
            wall_time_ns: Vec::new(),
            setup_ns: 0,
            iterations: Vec::new(),
            converged: Vec::new(),
            optimality: Vec::new(),
            asymmetry: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

fn check_inputs(x: &SampleMatrix, lambdas: &[f64]) -> Result<()> {
    if x.p() < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 vertices, got {}", x.p())));
    }
    validate_grid(lambdas)
}

/// PLG: build the stacked problem, solve the path, unstack each solution.
/// Fails on the first grid point that does not converge.
pub fn fit_plg(x: &SampleMatrix, lambdas: &[f64], cfg: &SolverConfig) -> Result<FitReport> {
    plg_impl(x, lambdas, cfg, true)
}

/// As [`fit_plg`], but non-converged grid points keep their best iterate and
/// are flagged instead of ending the fit.
pub fn fit_plg_lenient(x: &SampleMatrix, lambdas: &[f64], cfg: &SolverConfig) -> Result<FitReport> {
    plg_impl(x, lambdas, cfg, false)
}

fn plg_impl(x: &SampleMatrix, lambdas: &[f64], cfg: &SolverConfig, strict: bool) -> Result<FitReport> {
    check_inputs(x, lambdas)?;
    let started = Instant::now();
    let sp = build_stacked(x)?;
    let setup_ns = started.elapsed().as_nanos() as u64;
    let p = x.p();
    let internal: Vec<f64> = lambdas.iter().map(|l| l / p as f64).collect();
    let path = solver::fit_path_over(&sp.as_logistic(), &internal, cfg, strict)?;

    let mut report = FitReport::new(Method::Plg);
    report.setup_ns = setup_ns;
    report.warnings = path.warnings.clone();
    for (k, coef) in path.coefficients.iter().enumerate() {
        let theta = devectorize(&ThetaVector::new(p, coef.clone())?);
        report.objective.push(pseudo_likelihood(&theta, x, lambdas[k])?);
        report.estimates.push(theta);
        report.lambdas.push(lambdas[k]);
        report.internal_lambdas.push(internal[k]);
        report.wall_time_ns.push(path.elapsed_ns[k]);
        report.iterations.push(path.n_iterations[k]);
        report.converged.push(path.converged[k]);
        report.optimality.push(path.kkt_max_violation[k]);
        report.asymmetry.push(0.0);
    }
    Ok(report)
}

/// Penalty above which PLG (and the direct optimizer) return no edges, on
/// the user-facing scale.
pub fn plg_lambda_max(x: &SampleMatrix, cfg: &SolverConfig) -> Result<f64> {
    let sp = build_stacked(x)?;
    Ok(x.p() as f64 * solver::lambda_max(&sp.as_logistic(), cfg)?)
}

/// Design of one node regression: the other sample columns, then an
/// intercept column.
struct NodeDesign<'a> {
    n: usize,
    columns: Vec<Option<&'a [f64]>>,
}

impl<'a> NodeDesign<'a> {
    fn new(all: &'a [Vec<f64>], s: usize) -> Self {
        let mut columns: Vec<Option<&[f64]>> = all
            .iter()
            .enumerate()
            .filter(|(t, _)| *t != s)
            .map(|(_, c)| Some(c.as_slice()))
            .collect();
        columns.push(None);
        Self {
            n: all[0].len(),
            columns,
        }
    }
}

impl Design for NodeDesign<'_> {
    fn n_rows(&self) -> usize {
        self.n
    }
    fn n_cols(&self) -> usize {
        self.columns.len()
    }
    fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        match self.columns[j] {
            Some(c) => c.iter().zip(v).map(|(a, b)| a * b).sum(),
            None => v.iter().sum(),
        }
    }
    fn col_axpy(&self, j: usize, a: f64, v: &mut [f64]) {
        match self.columns[j] {
            Some(c) => v.iter_mut().zip(c).for_each(|(vi, xi)| *vi += a * xi),
            None => v.iter_mut().for_each(|vi| *vi += a),
        }
    }
    fn col_weighted_axpy(&self, j: usize, a: f64, w: &[f64], v: &mut [f64]) {
        match self.columns[j] {
            Some(c) => v
                .iter_mut()
                .zip(c)
                .zip(w)
                .for_each(|((vi, xi), wi)| *vi += a * wi * xi),
            None => v.iter_mut().zip(w).for_each(|(vi, wi)| *vi += a * wi),
        }
    }
    fn col_weighted_sq_norm(&self, j: usize, w: &[f64]) -> f64 {
        // Binary columns: x² = x.
        self.col_dot(j, w)
    }
}

struct NodeFit {
    /// Coefficients per grid point: `p − 1` neighbour weights then intercept.
    coefficients: Vec<Vec<f64>>,
    elapsed_ns: Vec<u64>,
    iterations: Vec<usize>,
    converged: Vec<bool>,
    kkt: Vec<f64>,
    warnings: Vec<String>,
}

fn fit_node(columns: &[Vec<f64>], s: usize, grid: &[f64], cfg: &SolverConfig) -> Result<NodeFit> {
    let design = NodeDesign::new(columns, s);
    let y = &columns[s];
    let p = columns.len();
    let mut pf = vec![1.0; p];
    pf[p - 1] = 0.0;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    if mean == 0.0 || mean == 1.0 {
        // Constant response: the intercept runs off to ±∞; report the
        // clipped logit and no neighbours.
        let mut coef = vec![0.0; p];
        coef[p - 1] = if mean == 0.0 {
            logit(solver::PROB_CLIP)
        } else {
            -logit(solver::PROB_CLIP)
        };
        return Ok(NodeFit {
            coefficients: vec![coef; grid.len()],
            elapsed_ns: vec![0; grid.len()],
            iterations: vec![0; grid.len()],
            converged: vec![false; grid.len()],
            kkt: vec![0.0; grid.len()],
            warnings: vec![format!("node {s}: constant response, intercept clipped")],
        });
    }
    let prob = LogisticProblem::new(&design, y, &pf);
    let path: PathSolution = solver::fit_path_over(&prob, grid, cfg, false)?;
    let mut warnings: Vec<String> = path.warnings.iter().map(|w| format!("node {s}: {w}")).collect();
    for (k, c) in path.converged.iter().enumerate() {
        if !c {
            warnings.push(format!("node {s}: not converged at lambda {}", grid[k]));
        }
    }
    Ok(NodeFit {
        coefficients: path.coefficients,
        elapsed_ns: path.elapsed_ns,
        iterations: path.n_iterations,
        converged: path.converged,
        kkt: path.kkt_max_violation,
        warnings,
    })
}

/// Node-wise logistic regression. `lambdas` are node-regression penalties
/// (half the PLG scale for a comparable fit). Per-node non-convergence is
/// recorded as a warning and the fit continues.
pub fn fit_nlr(
    x: &SampleMatrix,
    lambdas: &[f64],
    cfg: &SolverConfig,
    symmetrize: Symmetrize,
) -> Result<FitReport> {
    check_inputs(x, lambdas)?;
    cfg.validate()?;
    let p = x.p();
    let columns: Vec<Vec<f64>> = (0..p).map(|t| x.column(t).map(f64::from).collect()).collect();
    let nodes: Vec<NodeFit> = (0..p)
        .into_par_iter()
        .map(|s| fit_node(&columns, s, lambdas, cfg))
        .collect::<Result<_>>()?;

    let mut report = FitReport::new(Method::Nlr);
    for node in &nodes {
        report.warnings.extend(node.warnings.iter().cloned());
    }
    // Neighbour t of node s sits at column t, or t − 1 past the skipped s.
    let slot = |s: usize, t: usize| if t < s { t } else { t - 1 };
    for (k, &lambda) in lambdas.iter().enumerate() {
        let raw = |s: usize, t: usize| nodes[s].coefficients[k][slot(s, t)];
        let mut asym = 0.0f64;
        let theta = ThetaMatrix::from_upper(p, |s, t| {
            if s == t {
                nodes[s].coefficients[k][p - 1]
            } else {
                let (a, b) = (raw(s, t), raw(t, s));
                asym = asym.max((a - b).abs());
                symmetrize.combine(a, b)
            }
        });
        report.objective.push(pseudo_likelihood(&theta, x, 2.0 * lambda)?);
        report.estimates.push(theta);
        report.lambdas.push(lambda);
        report.internal_lambdas.push(lambda);
        report.wall_time_ns.push(nodes.iter().map(|n| n.elapsed_ns[k]).sum());
        report.iterations.push(nodes.iter().map(|n| n.iterations[k]).sum());
        report.converged.push(nodes.iter().all(|n| n.converged[k]));
        report.optimality.push(nodes.iter().map(|n| n.kkt[k]).fold(0.0, f64::max));
        report.asymmetry.push(asym);
    }
    Ok(report)
}

/// Largest node-wise `λ_max` (node-regression scale).
pub fn nlr_lambda_max(x: &SampleMatrix, cfg: &SolverConfig) -> Result<f64> {
    let p = x.p();
    let columns: Vec<Vec<f64>> = (0..p).map(|t| x.column(t).map(f64::from).collect()).collect();
    let mut best = 0.0f64;
    for s in 0..p {
        let design = NodeDesign::new(&columns, s);
        let mut pf = vec![1.0; p];
        pf[p - 1] = 0.0;
        let prob = LogisticProblem::new(&design, &columns[s], &pf);
        match solver::lambda_max(&prob, cfg) {
            Ok(l) => best = best.max(l),
            Err(Error::DegenerateResponse) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

// Upper-triangle (including diagonal) vector helpers for the direct optimizer.

fn upper_dot(a: &ThetaMatrix, b: &ThetaMatrix) -> f64 {
    let p = a.p();
    let mut acc = 0.0;
    for s in 0..p {
        for t in s..p {
            acc += a.get(s, t) * b.get(s, t);
        }
    }
    acc
}

fn upper_max_abs_diff(a: &ThetaMatrix, b: &ThetaMatrix) -> f64 {
    let p = a.p();
    let mut m = 0.0f64;
    for s in 0..p {
        for t in s..p {
            m = m.max((a.get(s, t) - b.get(s, t)).abs());
        }
    }
    m
}

fn upper_combine(a: &ThetaMatrix, b: &ThetaMatrix, f: impl Fn(usize, usize, f64, f64) -> f64) -> ThetaMatrix {
    ThetaMatrix::from_upper(a.p(), |s, t| f(s, t, a.get(s, t), b.get(s, t)))
}

/// Largest eigenvalue of the curvature bound of the negated
/// pseudo-likelihood, by power iteration.
fn curvature_bound(x: &SampleMatrix, iterations: usize) -> Result<f64> {
    let p = x.p();
    let mut v = ThetaMatrix::from_upper(p, |s, t| if s == t { 1.0 } else { 0.5 });
    let mut estimate = 0.0;
    for _ in 0..iterations.max(1) {
        let norm = upper_dot(&v, &v).sqrt();
        v = ThetaMatrix::from_upper(p, |s, t| v.get(s, t) / norm);
        let hv = curvature_bound_product(&v, x)?;
        estimate = upper_dot(&v, &hv);
        v = hv;
    }
    // Slight inflation covers the power-iteration underestimate.
    Ok(estimate * 1.01)
}

struct DirectOutcome {
    theta: ThetaMatrix,
    iterations: usize,
    mapping_norm: f64,
    converged: bool,
}

/// Negated unpenalized pseudo-likelihood.
fn smooth_loss(theta: &ThetaMatrix, x: &SampleMatrix) -> Result<f64> {
    Ok(-pseudo_likelihood(theta, x, 0.0)?.loglik_part)
}

fn direct_solve(
    x: &SampleMatrix,
    lambda: f64,
    start: ThetaMatrix,
    step_max: f64,
    cfg: &DirectConfig,
) -> Result<DirectOutcome> {
    let threshold = x.n() as f64 * lambda;
    let prox = |point: &ThetaMatrix, grad: &ThetaMatrix, step: f64| {
        upper_combine(point, grad, |s, t, v, g| {
            let moved = v - step * g;
            if s == t {
                moved
            } else {
                soft_threshold(moved, step * threshold)
            }
        })
    };
    let penalized = |theta: &ThetaMatrix, loss: f64| loss + threshold * theta.off_diagonal_l1();

    let mut current = start;
    let mut current_obj = penalized(&current, smooth_loss(&current, x)?);
    let mut best = (current_obj, current.clone());
    let mut y = current.clone();
    let mut momentum = 1.0f64;
    let mut step = step_max;
    let mut mapping_norm = f64::INFINITY;

    for iter in 1..=cfg.max_iter {
        // Ascent direction of the pseudo-likelihood is minus the descent
        // gradient of the smooth loss.
        let grad = {
            let g = pseudo_likelihood_gradient(&y, x)?;
            ThetaMatrix::from_upper(g.p(), |s, t| -g.get(s, t))
        };
        let loss_y = smooth_loss(&y, x)?;
        let (next, next_loss) = loop {
            let candidate = prox(&y, &grad, step);
            let loss = smooth_loss(&candidate, x)?;
            let d = upper_combine(&candidate, &y, |_, _, a, b| a - b);
            let model = loss_y + upper_dot(&grad, &d) + upper_dot(&d, &d) / (2.0 * step);
            if loss <= model + 1e-12 * loss_y.abs().max(1.0) || step < 1e-300 {
                break (candidate, loss);
            }
            step *= 0.5;
        };
        mapping_norm = upper_max_abs_diff(&next, &y) / step;
        let next_obj = penalized(&next, next_loss);
        if next_obj < best.0 {
            best = (next_obj, next.clone());
        }
        if mapping_norm < cfg.tol {
            return Ok(DirectOutcome {
                theta: next,
                iterations: iter,
                mapping_norm,
                converged: true,
            });
        }
        if cfg.accelerated {
            // Restart momentum when it points against the prox step.
            let restart = {
                let a = upper_combine(&y, &next, |_, _, u, v| u - v);
                let b = upper_combine(&next, &current, |_, _, u, v| u - v);
                upper_dot(&a, &b) > 0.0
            };
            if restart {
                momentum = 1.0;
                y = next.clone();
            } else {
                let m_next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
                let beta = (momentum - 1.0) / m_next;
                y = upper_combine(&next, &current, |_, _, u, v| u + beta * (u - v));
                momentum = m_next;
            }
        } else {
            y = next.clone();
        }
        current = next;
        current_obj = next_obj;
    }
    let _ = current_obj;
    Ok(DirectOutcome {
        theta: best.1,
        iterations: cfg.max_iter,
        mapping_norm,
        converged: false,
    })
}

/// Direct proximal-gradient maximization of the penalized pseudo-likelihood
/// over `Θ`, warm-started down the grid.
pub fn fit_direct_pl(x: &SampleMatrix, lambdas: &[f64], cfg: &DirectConfig) -> Result<FitReport> {
    check_inputs(x, lambdas)?;
    if !(cfg.tol > 0.0) || cfg.max_iter == 0 {
        return Err(Error::InvalidConfig("direct optimizer needs tol > 0 and max_iter > 0".into()));
    }
    let started = Instant::now();
    let step_max = 1.0 / curvature_bound(x, cfg.power_iterations)?;
    let mut report = FitReport::new(Method::DirectPl);
    report.setup_ns = started.elapsed().as_nanos() as u64;

    let mut warm = ThetaMatrix::zeros(x.p());
    for &lambda in lambdas {
        let started = Instant::now();
        let out = direct_solve(x, lambda, warm, step_max, cfg)?;
        report.wall_time_ns.push(started.elapsed().as_nanos() as u64);
        if !out.converged {
            report.warnings.push(format!(
                "lambda {lambda}: not converged after {} iterations (mapping norm {:.3e})",
                out.iterations, out.mapping_norm
            ));
        }
        report.objective.push(pseudo_likelihood(&out.theta, x, lambda)?);
        report.lambdas.push(lambda);
        report.internal_lambdas.push(lambda);
        report.iterations.push(out.iterations);
        report.converged.push(out.converged);
        report.optimality.push(out.mapping_norm);
        report.asymmetry.push(0.0);
        warm = out.theta.clone();
        report.estimates.push(out.theta);
    }
    Ok(report)
}

/// `‖vec(a) − vec(b)‖₂ / ‖vec(b)‖₂` over the stacked coordinates (each pair
/// once, plus the diagonal).
pub fn relative_difference(a: &ThetaMatrix, b: &ThetaMatrix) -> Result<f64> {
    if a.p() != b.p() {
        return Err(Error::DimensionMismatch {
            what: "vertex count",
            expected: b.p(),
            found: a.p(),
        });
    }
    let denom = upper_dot(b, b).sqrt();
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let d = upper_combine(a, b, |_, _, u, v| u - v);
    Ok(upper_dot(&d, &d).sqrt() / denom)
}

/// Dispatch by method on the user-facing scale of that method.
pub fn fit_method(
    method: Method,
    x: &SampleMatrix,
    lambdas: &[f64],
    solver_cfg: &SolverConfig,
    direct_cfg: &DirectConfig,
    symmetrize: Symmetrize,
) -> Result<FitReport> {
    match method {
        Method::Plg => fit_plg(x, lambdas, solver_cfg),
        Method::Nlr => fit_nlr(x, lambdas, solver_cfg, symmetrize),
        Method::DirectPl => fit_direct_pl(x, lambdas, direct_cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{generate_graph, gibbs_sample, GibbsConfig, GraphSpec};

    fn simulated(p: usize, prob: f64, n: usize, seed: u64) -> (ThetaMatrix, SampleMatrix) {
        let truth = generate_graph(&GraphSpec::new(p, prob, seed)).unwrap();
        let x = gibbs_sample(
            &truth,
            &GibbsConfig {
                n_samples: n,
                seed: seed + 1,
                ..Default::default()
            },
        )
        .unwrap();
        (truth, x)
    }

    #[test]
    fn relative_difference_examples() {
        let b = ThetaMatrix::from_upper(3, |s, t| (s + 2 * t) as f64 - 1.5);
        assert_eq!(relative_difference(&b, &b).unwrap(), 0.0);
        let a = ThetaMatrix::from_upper(3, |s, t| 2.0 * b.get(s, t));
        assert!((relative_difference(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        let norm = upper_dot(&b, &b).sqrt();
        let mut a = b.clone();
        a.set(0, 1, b.get(0, 1) + norm);
        assert!((relative_difference(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            relative_difference(&b, &ThetaMatrix::zeros(3)),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn symmetrize_rules() {
        assert_eq!(Symmetrize::Mean.combine(1.0, 0.0), 0.5);
        assert_eq!(Symmetrize::And.combine(1.0, 0.0), 0.0);
        assert_eq!(Symmetrize::And.combine(1.0, 3.0), 2.0);
        assert_eq!(Symmetrize::Or.combine(1.0, 0.0), 1.0);
        assert_eq!(Symmetrize::Or.combine(0.0, 0.0), 0.0);
    }

    #[test]
    fn large_lambda_gives_null_model_for_all_methods() {
        let (_, x) = simulated(5, 0.3, 300, 21);
        let cfg = SolverConfig::default();
        let lmax = plg_lambda_max(&x, &cfg).unwrap();
        let lambda = 1.5 * lmax;
        let plg = fit_plg(&x, &[lambda], &cfg).unwrap();
        let direct = fit_direct_pl(&x, &[lambda], &DirectConfig::default()).unwrap();
        let nlr_lambda = 1.5 * nlr_lambda_max(&x, &cfg).unwrap();
        let nlr = fit_nlr(&x, &[nlr_lambda], &cfg, Symmetrize::Mean).unwrap();
        for report in [&plg, &direct, &nlr] {
            let theta = &report.estimates[0];
            assert_eq!(theta.edge_count(), 0, "{}", report.method);
            for s in 0..5 {
                let expected = logit(x.column_mean(s));
                assert!(
                    (theta.get(s, s) - expected).abs() < 1e-6,
                    "{} node {s}: {} vs {expected}",
                    report.method,
                    theta.get(s, s)
                );
            }
        }
    }

    #[test]
    fn plg_estimates_are_exactly_symmetric() {
        let (_, x) = simulated(6, 0.4, 400, 5);
        let report = fit_plg(&x, &[0.05, 0.02, 0.01], &SolverConfig::default()).unwrap();
        for theta in &report.estimates {
            for s in 0..6 {
                for t in 0..6 {
                    assert_eq!(theta.get(s, t).to_bits(), theta.get(t, s).to_bits());
                }
            }
        }
        assert_eq!(report.internal_lambdas[0], 0.05 / 6.0);
    }

    #[test]
    fn plg_and_direct_agree() {
        let (_, x) = simulated(5, 0.4, 500, 8);
        let lambdas = [0.05, 0.02];
        let plg = fit_plg(
            &x,
            &lambdas,
            &SolverConfig {
                tol: 1e-12,
                kkt_tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        let direct = fit_direct_pl(&x, &lambdas, &DirectConfig::default()).unwrap();
        assert!(direct.all_converged());
        for k in 0..2 {
            let (a, b) = (plg.objective[k].total, direct.objective[k].total);
            assert!(a >= b - 1e-6 * b.abs(), "PLG objective below direct: {a} < {b}");
            assert!((a - b).abs() < 1e-6 * b.abs());
            assert!(relative_difference(&plg.estimates[k], &direct.estimates[k]).unwrap() < 1e-4);
        }
    }

    #[test]
    fn direct_stationary_at_zero_lambda() {
        let (_, x) = simulated(3, 0.5, 50, 2);
        // λ must be positive on a grid; a negligible value leaves the first-order
        // condition of the unpenalized problem within tolerance.
        let report = fit_direct_pl(&x, &[1e-300], &DirectConfig::default()).unwrap();
        let g = pseudo_likelihood_gradient(&report.estimates[0], &x).unwrap();
        let max = g.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max < 1e-6, "gradient max-norm {max}");
    }

    #[test]
    fn nlr_and_or_containment() {
        let (_, x) = simulated(6, 0.4, 300, 13);
        let cfg = SolverConfig::default();
        let and = fit_nlr(&x, &[0.03], &cfg, Symmetrize::And).unwrap();
        let or = fit_nlr(&x, &[0.03], &cfg, Symmetrize::Or).unwrap();
        let or_edges: Vec<(usize, usize)> = or.estimates[0].edges().map(|(s, t, _)| (s, t)).collect();
        for (s, t, _) in and.estimates[0].edges() {
            assert!(or_edges.contains(&(s, t)));
        }
        assert!(and.asymmetry[0] >= 0.0);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("PLG".parse::<Method>().unwrap(), Method::Plg);
        assert_eq!("direct".parse::<Method>().unwrap(), Method::DirectPl);
        assert!("bmn".parse::<Method>().is_err());
    }
}
