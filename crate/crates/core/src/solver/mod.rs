//! L1-penalized logistic regression by IRLS and cyclic coordinate descent.
//!
//! Minimizes, for a penalty level `λ` on the solver's own scale,
//!
//! ```text
//! F(β) = (1/n) Σ_i [log(1 + exp(x_iᵀβ)) − y_i x_iᵀβ] + λ Σ_j w_j |β_j|
//! ```
//!
//! Each outer round forms the IRLS quadratic at the current iterate and
//! minimizes its penalized form by coordinate descent over the eligible set
//! (full sweep, then the active set until it settles). Small eligible sets
//! update through their weighted Gram matrix, larger ones through the
//! working residual. Along a decreasing
//! grid, the sequential strong rule discards penalized coordinates before
//! solving and the KKT check at every outer round re-admits violators, so
//! screening never changes the returned solution.
//!
//! A solution is returned as converged only when the weighted coefficient
//! change `max_j (x_jᵀWx_j / n)·Δβ_j²` is below `tol` *and* the KKT
//! violation over all coordinates is below `kkt_tol`.

mod design;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use design::{DenseDesign, Design, LogisticProblem};

use crate::error::{Error, Result};
use crate::numeric::{sigmoid, soft_threshold, softplus};

/// Fitted probabilities outside `[PROB_CLIP, 1 − PROB_CLIP]` are snapped to
/// 0 or 1 when forming the IRLS weights and residuals.
pub const PROB_CLIP: f64 = 1e-5;

/// Unpenalized coefficients beyond this magnitude trigger a separation
/// warning.
pub const SEPARATION_MAGNITUDE: f64 = 30.0;

const MAX_STEP_HALVINGS: u32 = 10;
/// Eligible sets up to this size run covariance updates on a weighted Gram
/// matrix instead of residual updates.
pub const GRAM_MAX_COLS: usize = 500;
const MIN_INNER_TOL: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Screening {
    None,
    Strong,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaGrid {
    /// Strictly decreasing positive values, on the solver's scale.
    Explicit(Vec<f64>),
    /// `count` log-spaced values from `λ_max` down to `ratio · λ_max`.
    Auto { count: usize, ratio: f64 },
}

impl LambdaGrid {
    pub fn resolve(&self, lambda_max: f64) -> Result<Vec<f64>> {
        let grid = match self {
            LambdaGrid::Explicit(v) => v.clone(),
            LambdaGrid::Auto { count, ratio } => geometric_grid(lambda_max, *ratio, *count)?,
        };
        validate_grid(&grid)?;
        Ok(grid)
    }
}

/// `count` values from `hi` down to `ratio · hi`, evenly spaced in log scale.
pub fn geometric_grid(hi: f64, ratio: f64, count: usize) -> Result<Vec<f64>> {
    if !(hi > 0.0 && hi.is_finite()) {
        return Err(Error::InvalidConfig(format!("grid upper end must be positive, got {hi}")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidConfig(format!("grid ratio must lie in (0, 1), got {ratio}")));
    }
    if count < 1 {
        return Err(Error::InvalidConfig("grid needs at least one value".into()));
    }
    if count == 1 {
        return Ok(vec![hi]);
    }
    let step = ratio.ln() / (count - 1) as f64;
    Ok((0..count).map(|k| hi * (step * k as f64).exp()).collect())
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty lambda grid".into()));
    }
    if grid.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidConfig("lambda grid values must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig("lambda grid must be strictly decreasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Threshold on the maximum weighted squared coefficient update.
    pub tol: f64,
    /// Threshold on the maximum KKT violation of a returned solution.
    pub kkt_tol: f64,
    /// IRLS rounds per penalty level.
    pub max_outer: usize,
    /// Coordinate sweeps per IRLS round.
    pub max_inner: usize,
    pub weight_floor: f64,
    pub screening: Screening,
    pub lambda_grid: LambdaGrid,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            kkt_tol: 1e-6,
            max_outer: 100,
            max_inner: 10_000,
            weight_floor: 1e-5,
            screening: Screening::Strong,
            lambda_grid: LambdaGrid::Auto {
                count: 100,
                ratio: 0.01,
            },
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.tol, "tol")?;
        positive(self.kkt_tol, "kkt_tol")?;
        positive(self.weight_floor, "weight_floor")?;
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::InvalidConfig("iteration limits must be positive".into()));
        }
        if let LambdaGrid::Explicit(g) = &self.lambda_grid {
            validate_grid(g)?;
        }
        Ok(())
    }
}

/// Result of one penalized fit plus its diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LassoFit {
    pub lambda: f64,
    pub coefficients: Vec<f64>,
    /// `F(β)` at the returned coefficients (minimization form).
    pub objective: f64,
    pub converged: bool,
    pub outer_iterations: usize,
    pub inner_sweeps: usize,
    pub kkt_max_violation: f64,
    pub screened_out: usize,
    pub kkt_readded: usize,
    pub step_halvings: usize,
    /// Rounds where halving did not restore descent and the step was
    /// accepted anyway.
    pub unresolved_increases: usize,
    /// `F` after every accepted IRLS round, starting with the initial point.
    pub objective_trace: Vec<f64>,
    pub warnings: Vec<String>,
    /// `(1/n) Xᵀ(y − μ)` at the returned coefficients.
    #[serde(skip)]
    pub score: Vec<f64>,
}

impl LassoFit {
    pub fn nonzero_penalized(&self, penalty_factors: &[f64]) -> usize {
        self.coefficients
            .iter()
            .zip(penalty_factors)
            .filter(|(b, w)| **w > 0.0 && **b != 0.0)
            .count()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreeningStats {
    pub screened_out: usize,
    pub kkt_readded: usize,
}

/// A warm-started solution path over a decreasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSolution {
    pub lambdas: Vec<f64>,
    pub lambda_max: f64,
    pub coefficients: Vec<Vec<f64>>,
    pub objective: Vec<f64>,
    pub n_iterations: Vec<usize>,
    pub inner_sweeps: Vec<usize>,
    pub kkt_max_violation: Vec<f64>,
    pub converged: Vec<bool>,
    pub screening_stats: Vec<ScreeningStats>,
    pub warnings: Vec<String>,
    /// Wall time of each grid point; not part of the serialized form.
    pub elapsed_ns: Vec<u64>,
}

impl PathSolution {
    fn empty(lambda_max: f64) -> Self {
        Self {
            lambdas: Vec::new(),
            lambda_max,
            coefficients: Vec::new(),
            objective: Vec::new(),
            n_iterations: Vec::new(),
            inner_sweeps: Vec::new(),
            kkt_max_violation: Vec::new(),
            converged: Vec::new(),
            screening_stats: Vec::new(),
            warnings: Vec::new(),
            elapsed_ns: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    fn push(&mut self, fit: LassoFit, elapsed_ns: u64) {
        self.lambdas.push(fit.lambda);
        self.objective.push(fit.objective);
        self.n_iterations.push(fit.outer_iterations);
        self.inner_sweeps.push(fit.inner_sweeps);
        self.kkt_max_violation.push(fit.kkt_max_violation);
        self.converged.push(fit.converged);
        self.screening_stats.push(ScreeningStats {
            screened_out: fit.screened_out,
            kkt_readded: fit.kkt_readded,
        });
        self.warnings
            .extend(fit.warnings.into_iter().map(|w| format!("lambda {}: {w}", fit.lambda)));
        self.coefficients.push(fit.coefficients);
        self.elapsed_ns.push(elapsed_ns);
    }

    /// JSON form: the grid, per-λ nonzero `[index, value]` lists with
    /// 1-based indices, and diagnostics. Timings are excluded so identical
    /// runs serialize identically.
    pub fn to_json(&self) -> serde_json::Value {
        let coefficients: Vec<Vec<(usize, f64)>> = self
            .coefficients
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, &v)| (j + 1, v))
                    .collect()
            })
            .collect();
        serde_json::json!({
            "schema": "plgnet.path_solution/1",
            "n_features": self.coefficients.first().map_or(0, Vec::len),
            "lambda_max": self.lambda_max,
            "lambdas": self.lambdas,
            "coefficients": coefficients,
            "diagnostics": {
                "objective": self.objective,
                "n_iterations": self.n_iterations,
                "inner_sweeps": self.inner_sweeps,
                "kkt_max_violation": self.kkt_max_violation,
                "converged": self.converged,
                "screening_stats": self.screening_stats,
                "warnings": self.warnings,
            }
        })
    }
}

/// Per-observation state at one iterate.
struct Irls {
    mu: Vec<f64>,
    weights: Vec<f64>,
    residual: Vec<f64>,
}

impl Irls {
    fn new(n: usize) -> Self {
        Self {
            mu: vec![0.0; n],
            weights: vec![0.0; n],
            residual: vec![0.0; n],
        }
    }

    fn update(&mut self, eta: &[f64], y: &[f64], floor: f64) {
        for i in 0..eta.len() {
            let q = sigmoid(eta[i]);
            let (mu, w) = if q < PROB_CLIP {
                (0.0, floor)
            } else if q > 1.0 - PROB_CLIP {
                (1.0, floor)
            } else {
                (q, (q * (1.0 - q)).max(floor))
            };
            self.mu[i] = mu;
            self.weights[i] = w;
            self.residual[i] = y[i] - mu;
        }
    }
}

fn penalized_objective(eta: &[f64], y: &[f64], beta: &[f64], pf: &[f64], lambda: f64) -> f64 {
    let n = eta.len() as f64;
    let loss: f64 = eta.iter().zip(y).map(|(&e, &yi)| softplus(e) - yi * e).sum();
    let l1: f64 = beta.iter().zip(pf).map(|(b, w)| w * b.abs()).sum();
    loss / n + lambda * l1
}

/// Maximum violation of the stationarity conditions given the score
/// `(1/n) Xᵀ(y − μ)`.
pub fn kkt_violation(score: &[f64], beta: &[f64], pf: &[f64], lambda: f64) -> f64 {
    score
        .iter()
        .zip(beta)
        .zip(pf)
        .map(|((&g, &b), &w)| {
            let thr = lambda * w;
            if b == 0.0 {
                (g.abs() - thr).max(0.0)
            } else {
                (g - thr * b.signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}

fn compute_score<D: Design>(prob: &LogisticProblem<'_, D>, residual: &[f64], out: &mut [f64]) {
    prob.design.rmatvec(residual, out);
    let inv_n = 1.0 / prob.n_obs() as f64;
    out.iter_mut().for_each(|g| *g *= inv_n);
}

/// Strong-rule eligibility from a precomputed score at the previous solution.
fn strong_rule_from_score(
    score: &[f64],
    beta_prev: &[f64],
    pf: &[f64],
    lambda_prev: f64,
    lambda_cur: f64,
) -> Vec<bool> {
    let cutoff = 2.0 * lambda_cur - lambda_prev;
    score
        .iter()
        .zip(beta_prev)
        .zip(pf)
        .map(|((&g, &b), &w)| w == 0.0 || b != 0.0 || g.abs() >= w * cutoff)
        .collect()
}

/// Sequential strong rule: coordinate `j` (penalized) is discarded when
/// `|score_j(β_prev)| < w_j (2λ_cur − λ_prev)`. Returns the eligibility mask.
/// Unpenalized coordinates and coordinates nonzero in `β_prev` always stay
/// eligible. The result is only safe together with the KKT repair loop that
/// [`fit_logistic_lasso`] and [`fit_path`] run.
pub fn strong_rule_screen<D: Design>(
    prob: &LogisticProblem<'_, D>,
    beta_prev: &[f64],
    lambda_prev: f64,
    lambda_cur: f64,
) -> Result<Vec<bool>> {
    if lambda_cur > lambda_prev {
        return Err(Error::InvalidConfig(format!(
            "strong rule needs lambda_cur <= lambda_prev ({lambda_cur} > {lambda_prev})"
        )));
    }
    check_len(beta_prev.len(), prob.n_features(), "previous coefficients")?;
    let mut eta = vec![0.0; prob.n_obs()];
    prob.design.matvec(beta_prev, &mut eta);
    let mut state = Irls::new(prob.n_obs());
    state.update(&eta, prob.response, SolverConfig::default().weight_floor);
    let mut score = vec![0.0; prob.n_features()];
    compute_score(prob, &state.residual, &mut score);
    Ok(strong_rule_from_score(
        &score,
        beta_prev,
        prob.penalty_factors,
        lambda_prev,
        lambda_cur,
    ))
}

fn check_len(found: usize, expected: usize, what: &'static str) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

/// Minimizes the penalized quadratic `(1/2n) Σ w_i (z_i − x_iᵀβ)² + λ Σ pf_j|β_j|`
/// over the eligible coordinates, where the weighted working residual
/// `r_i = w_i (z_i − x_iᵀβ)` is kept current. Returns the sweeps used.
#[allow(clippy::too_many_arguments)]
fn coordinate_descent<D: Design>(
    design: &D,
    eligible: &[usize],
    beta: &mut [f64],
    residual: &mut [f64],
    weights: &[f64],
    curvature: &[f64],
    pf: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
) -> usize {
    let inv_n = 1.0 / design.n_rows() as f64;
    let sweep = |set: &[usize], beta: &mut [f64], residual: &mut [f64]| {
        let mut max_change = 0.0f64;
        for &j in set {
            let a = curvature[j];
            if a <= 0.0 {
                continue;
            }
            let old = beta[j];
            let z = design.col_dot(j, residual) * inv_n + a * old;
            let new = soft_threshold(z, lambda * pf[j]) / a;
            let delta = new - old;
            if delta != 0.0 {
                beta[j] = new;
                design.col_weighted_axpy(j, -delta, weights, residual);
                max_change = max_change.max(a * delta * delta);
            }
        }
        max_change
    };

    let mut sweeps = 0;
    let mut active = Vec::with_capacity(eligible.len());
    loop {
        let change = sweep(eligible, beta, residual);
        sweeps += 1;
        if change < tol || sweeps >= max_sweeps {
            return sweeps;
        }
        active.clear();
        active.extend(eligible.iter().copied().filter(|&j| beta[j] != 0.0));
        loop {
            let change = sweep(&active, beta, residual);
            sweeps += 1;
            if sweeps >= max_sweeps {
                return sweeps;
            }
            if change < tol {
                break;
            }
        }
    }
}

/// As [`coordinate_descent`], on the Gram matrix `gram = X_Eᵀ W X_E / n` of
/// the eligible set and the gradient `grad = X_Eᵀ r / n`, both indexed by
/// position in `eligible`.
#[allow(clippy::too_many_arguments)]
fn coordinate_descent_gram(
    gram: &[f64],
    eligible: &[usize],
    beta: &mut [f64],
    grad: &mut [f64],
    pf: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
) -> usize {
    let k = eligible.len();
    let sweep = |set: &[usize], beta: &mut [f64], grad: &mut [f64]| {
        let mut max_change = 0.0f64;
        for &a in set {
            let aa = gram[a * k + a];
            if aa <= 0.0 {
                continue;
            }
            let j = eligible[a];
            let old = beta[j];
            let new = soft_threshold(grad[a] + aa * old, lambda * pf[j]) / aa;
            let delta = new - old;
            if delta != 0.0 {
                beta[j] = new;
                for (g, h) in grad.iter_mut().zip(&gram[a * k..(a + 1) * k]) {
                    *g -= h * delta;
                }
                max_change = max_change.max(aa * delta * delta);
            }
        }
        max_change
    };

    let all: Vec<usize> = (0..k).collect();
    let mut sweeps = 0;
    let mut active = Vec::with_capacity(k);
    loop {
        let change = sweep(&all, beta, grad);
        sweeps += 1;
        if change < tol || sweeps >= max_sweeps {
            return sweeps;
        }
        active.clear();
        active.extend((0..k).filter(|&a| beta[eligible[a]] != 0.0));
        loop {
            let change = sweep(&active, beta, grad);
            sweeps += 1;
            if sweeps >= max_sweeps {
                return sweeps;
            }
            if change < tol {
                break;
            }
        }
    }
}

/// Core solve from a given start and eligibility mask. Always returns the
/// best iterate seen; `converged` tells whether it is certified.
fn solve<D: Design>(
    prob: &LogisticProblem<'_, D>,
    lambda: f64,
    mut beta: Vec<f64>,
    mut eligible: Vec<bool>,
    cfg: &SolverConfig,
) -> LassoFit {
    let (n, p) = (prob.n_obs(), prob.n_features());
    let y = prob.response;
    let pf = prob.penalty_factors;
    let screened_out = eligible.iter().filter(|&&e| !e).count();

    let mut eta = vec![0.0; n];
    prob.design.matvec(&beta, &mut eta);
    let mut obj = penalized_objective(&eta, y, &beta, pf, lambda);
    let mut trace = vec![obj];
    let mut best = (obj, beta.clone());

    let mut state = Irls::new(n);
    let mut score = vec![0.0; p];
    let mut curvature = vec![0.0; p];
    let mut eta_new = vec![0.0; n];
    let mut eta_trial = vec![0.0; n];
    let mut beta_trial = vec![0.0; p];

    let mut inner_tol = cfg.tol;
    let mut last_change = f64::INFINITY;
    let mut kkt;
    let mut converged = false;
    let mut outer = 0;
    let mut sweeps_total = 0;
    let mut kkt_readded = 0;
    let mut step_halvings = 0;
    let mut unresolved = 0;

    loop {
        state.update(&eta, y, cfg.weight_floor);
        compute_score(prob, &state.residual, &mut score);
        kkt = kkt_violation(&score, &beta, pf, lambda);

        let mut added = 0;
        for j in 0..p {
            if !eligible[j] && score[j].abs() > lambda * pf[j] {
                eligible[j] = true;
                added += 1;
            }
        }
        kkt_readded += added;

        if last_change < cfg.tol && added == 0 {
            if kkt <= cfg.kkt_tol {
                converged = true;
                break;
            }
            inner_tol = (inner_tol * 1e-2).max(MIN_INNER_TOL);
        }
        if outer >= cfg.max_outer {
            break;
        }
        outer += 1;

        let eligible_list: Vec<usize> = (0..p).filter(|&j| eligible[j]).collect();
        let inv_n = 1.0 / n as f64;
        let beta_old = beta.clone();
        let k = eligible_list.len();
        if k <= GRAM_MAX_COLS && k <= n {
            let mut gram = prob.design.weighted_gram(&eligible_list, &state.weights);
            gram.iter_mut().for_each(|g| *g *= inv_n);
            for (a, &j) in eligible_list.iter().enumerate() {
                curvature[j] = gram[a * k + a];
            }
            let mut grad: Vec<f64> = eligible_list.iter().map(|&j| score[j]).collect();
            sweeps_total += coordinate_descent_gram(
                &gram,
                &eligible_list,
                &mut beta,
                &mut grad,
                pf,
                lambda,
                inner_tol,
                cfg.max_inner,
            );
        } else {
            for &j in &eligible_list {
                curvature[j] = prob.design.col_weighted_sq_norm(j, &state.weights) * inv_n;
            }
            sweeps_total += coordinate_descent(
                &prob.design,
                &eligible_list,
                &mut beta,
                &mut state.residual,
                &state.weights,
                &curvature,
                pf,
                lambda,
                inner_tol,
                cfg.max_inner,
            );
        }

        prob.design.matvec(&beta, &mut eta_new);
        let mut new_obj = penalized_objective(&eta_new, y, &beta, pf, lambda);

        if new_obj > obj + cfg.tol {
            let mut t = 1.0;
            for k in 1..=MAX_STEP_HALVINGS {
                t *= 0.5;
                step_halvings += 1;
                for j in 0..p {
                    beta_trial[j] = beta_old[j] + t * (beta[j] - beta_old[j]);
                }
                for i in 0..n {
                    eta_trial[i] = eta[i] + t * (eta_new[i] - eta[i]);
                }
                let trial_obj = penalized_objective(&eta_trial, y, &beta_trial, pf, lambda);
                let descent = trial_obj <= obj + cfg.tol;
                if descent || k == MAX_STEP_HALVINGS {
                    if !descent {
                        unresolved += 1;
                    }
                    beta.copy_from_slice(&beta_trial);
                    eta_new.copy_from_slice(&eta_trial);
                    new_obj = trial_obj;
                    break;
                }
            }
        }

        last_change = eligible_list
            .iter()
            .map(|&j| curvature[j] * (beta[j] - beta_old[j]).powi(2))
            .fold(0.0, f64::max);
        std::mem::swap(&mut eta, &mut eta_new);
        obj = new_obj;
        trace.push(obj);
        if obj < best.0 {
            best = (obj, beta.clone());
        }
    }

    let mut warnings = Vec::new();
    // The loop exits right after a score evaluation, so `score` and `kkt`
    // describe `beta` unless the best iterate replaces it.
    if !converged && best.1 != beta {
        beta = best.1;
        obj = best.0;
        prob.design.matvec(&beta, &mut eta);
        state.update(&eta, y, cfg.weight_floor);
        compute_score(prob, &state.residual, &mut score);
        kkt = kkt_violation(&score, &beta, pf, lambda);
    }
    if unresolved > 0 {
        warnings.push(format!("{unresolved} IRLS step(s) increased the objective after halving"));
    }
    if !converged {
        warnings.push(format!("not converged after {outer} IRLS rounds (max KKT violation {kkt:.3e})"));
    }
    if let Some((j, b)) = beta
        .iter()
        .enumerate()
        .find(|(j, b)| pf[*j] == 0.0 && b.abs() > SEPARATION_MAGNITUDE)
    {
        warnings.push(format!(
            "possible separation: unpenalized coefficient {j} reached {b:.3}"
        ));
    }

    LassoFit {
        lambda,
        coefficients: beta,
        objective: obj,
        converged,
        outer_iterations: outer,
        inner_sweeps: sweeps_total,
        kkt_max_violation: kkt,
        screened_out,
        kkt_readded,
        step_halvings,
        unresolved_increases: unresolved,
        objective_trace: trace,
        warnings,
        score,
    }
}

/// Fit with every penalized coefficient held at zero.
fn null_model<D: Design>(prob: &LogisticProblem<'_, D>, cfg: &SolverConfig) -> Result<LassoFit> {
    let y = prob.response;
    if y.is_empty() || y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateResponse);
    }
    let pf = prob.penalty_factors;
    let eligible: Vec<bool> = pf.iter().map(|&w| w == 0.0).collect();
    // Penalized coordinates must stay out; a huge λ keeps the repair loop
    // from re-admitting them.
    let lambda = f64::MAX / 4.0;
    let mut fit = solve(prob, lambda, vec![0.0; prob.n_features()], eligible, cfg);
    fit.lambda = 0.0;
    Ok(fit)
}

fn lambda_max_from_score(score: &[f64], pf: &[f64]) -> f64 {
    score
        .iter()
        .zip(pf)
        .filter(|(_, &w)| w > 0.0)
        .map(|(g, w)| g.abs() / w)
        .fold(0.0, f64::max)
}

/// Smallest penalty at which every penalized coefficient is zero.
pub fn lambda_max<D: Design>(prob: &LogisticProblem<'_, D>, cfg: &SolverConfig) -> Result<f64> {
    let null = null_model(prob, cfg)?;
    Ok(lambda_max_from_score(&null.score, prob.penalty_factors))
}

/// Single penalized fit. Without a warm start the fit begins at the null
/// model and screens relative to `λ_max`; with one, it screens with the
/// rule specialized to `λ_prev = λ`.
pub fn fit_logistic_lasso<D: Design>(
    prob: &LogisticProblem<'_, D>,
    lambda: f64,
    warm: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<LassoFit> {
    cfg.validate()?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("lambda must be nonnegative, got {lambda}")));
    }
    let pf = prob.penalty_factors;
    let (start, score, lambda_prev) = match warm {
        Some(w) => {
            check_len(w.len(), prob.n_features(), "warm start")?;
            let mut eta = vec![0.0; prob.n_obs()];
            prob.design.matvec(w, &mut eta);
            let mut state = Irls::new(prob.n_obs());
            state.update(&eta, prob.response, cfg.weight_floor);
            let mut score = vec![0.0; prob.n_features()];
            compute_score(prob, &state.residual, &mut score);
            (w.to_vec(), score, lambda)
        }
        None => {
            let null = null_model(prob, cfg)?;
            let lmax = lambda_max_from_score(&null.score, pf);
            (null.coefficients, null.score, lmax.max(lambda))
        }
    };
    let eligible = match cfg.screening {
        Screening::Strong => strong_rule_from_score(&score, &start, pf, lambda_prev, lambda),
        Screening::None => vec![true; prob.n_features()],
    };
    let fit = solve(prob, lambda, start, eligible, cfg);
    if fit.converged {
        Ok(fit)
    } else {
        Err(Error::NonConvergence {
            lambda,
            fit: Box::new(fit),
        })
    }
}

/// Path over an explicit grid. With `strict`, the first non-converged grid
/// point ends the path with [`Error::PathIncomplete`]; otherwise the best
/// iterate is kept, flagged, and used as the next warm start.
pub fn fit_path_over<D: Design>(
    prob: &LogisticProblem<'_, D>,
    grid: &[f64],
    cfg: &SolverConfig,
    strict: bool,
) -> Result<PathSolution> {
    cfg.validate()?;
    validate_grid(grid)?;
    let pf = prob.penalty_factors;
    let null = null_model(prob, cfg)?;
    let lmax = lambda_max_from_score(&null.score, pf);
    let mut path = PathSolution::empty(lmax);

    let mut beta_prev = null.coefficients;
    let mut score_prev = null.score;
    let mut lambda_prev = lmax.max(grid[0]);
    for (k, &lambda) in grid.iter().enumerate() {
        let started = Instant::now();
        let eligible = match cfg.screening {
            Screening::Strong => strong_rule_from_score(&score_prev, &beta_prev, pf, lambda_prev, lambda),
            Screening::None => vec![true; prob.n_features()],
        };
        let fit = solve(prob, lambda, beta_prev, eligible, cfg);
        let elapsed = started.elapsed().as_nanos() as u64;
        beta_prev = fit.coefficients.clone();
        score_prev = fit.score.clone();
        lambda_prev = lambda;
        let converged = fit.converged;
        let kkt = fit.kkt_max_violation;
        path.push(fit, elapsed);
        if !converged && strict {
            return Err(Error::PathIncomplete {
                failed_at: k,
                lambda,
                reason: format!("not converged (max KKT violation {kkt:.3e})"),
                partial: Box::new(path),
            });
        }
    }
    Ok(path)
}

/// Path over the configured grid, warm-started from the largest penalty.
pub fn fit_path<D: Design>(prob: &LogisticProblem<'_, D>, cfg: &SolverConfig) -> Result<PathSolution> {
    let grid = match &cfg.lambda_grid {
        LambdaGrid::Explicit(g) => g.clone(),
        auto => auto.resolve(lambda_max(prob, cfg)?)?,
    };
    fit_path_over(prob, &grid, cfg, true)
}
