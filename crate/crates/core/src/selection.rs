//! StARS: pick the smallest penalty whose edge selection stays stable across
//! random subsamples.

use std::io::Write;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{fit_nlr, fit_plg_lenient, nlr_lambda_max, plg_lambda_max, Method, Symmetrize};
use crate::model::SampleMatrix;
use crate::sampling::{derive_seed, stream_rng};
use crate::solver::{LambdaGrid, SolverConfig};
use crate::transform::n_pairs;

const STREAM_SUBSAMPLE: u64 = 11;

/// NLR penalty matching a PLG penalty.
pub fn half_lambda_translate(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("lambda must be positive, got {lambda}")));
    }
    Ok(lambda / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarsConfig {
    pub n_subsamples: usize,
    /// Defaults to `floor(10 √N)`.
    pub subsample_size: Option<usize>,
    pub beta: f64,
    /// On the estimator's own scale. `Auto` runs down from the largest
    /// `λ_max` over the full data and the subsamples.
    pub lambda_grid: LambdaGrid,
    pub seed: u64,
    pub estimator: Method,
    pub symmetrize: Symmetrize,
    pub solver: SolverConfig,
}

impl Default for StarsConfig {
    fn default() -> Self {
        Self {
            n_subsamples: 20,
            subsample_size: None,
            beta: 0.05,
            lambda_grid: LambdaGrid::Auto {
                count: 30,
                ratio: 0.01,
            },
            seed: 0,
            estimator: Method::Plg,
            symmetrize: Symmetrize::Mean,
            solver: SolverConfig::default(),
        }
    }
}

pub fn default_subsample_size(n: usize) -> usize {
    (10.0 * (n as f64).sqrt()).floor() as usize
}

impl StarsConfig {
    pub fn resolved_subsample_size(&self, n: usize) -> usize {
        self.subsample_size.unwrap_or_else(|| default_subsample_size(n))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.n_subsamples == 0 {
            return Err(Error::InvalidConfig("need at least one subsample".into()));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::InvalidConfig(format!("beta must lie in (0, 0.5), got {}", self.beta)));
        }
        let b = self.resolved_subsample_size(n);
        if b == 0 || b >= n {
            return Err(Error::InvalidConfig(format!(
                "subsample size {b} must lie in [1, N) with N = {n}"
            )));
        }
        if self.estimator == Method::DirectPl {
            return Err(Error::InvalidConfig("StARS supports the plg and nlr estimators".into()));
        }
        self.solver.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarsResult {
    pub estimator: Method,
    pub lambdas: Vec<f64>,
    /// `D(λ)`: mean of `2 φ (1 − φ)` over all pairs.
    pub instability: Vec<f64>,
    /// Running maximum of `D` from the largest `λ` down.
    pub monotone: Vec<f64>,
    pub mean_edge_count: Vec<f64>,
    pub selected_index: usize,
    pub selected_lambda: f64,
    pub subsample_size: usize,
    pub n_subsamples: usize,
    pub warnings: Vec<String>,
}

/// Row indices of subsample `b`, sorted.
pub fn subsample_indices(n: usize, size: usize, seed: u64, b: usize) -> Vec<usize> {
    let mut rng = stream_rng(derive_seed(seed, b as u64), STREAM_SUBSAMPLE);
    let mut idx = sample(&mut rng, n, size).into_vec();
    idx.sort_unstable();
    idx
}

/// Instability of one pair selected in `count` of `b` subsamples.
pub fn edge_instability(count: usize, b: usize) -> f64 {
    let phi = count as f64 / b as f64;
    2.0 * phi * (1.0 - phi)
}

/// Running maximum over a grid ordered from large to small `λ`.
pub fn monotonize(d: &[f64]) -> Vec<f64> {
    let mut running = f64::NEG_INFINITY;
    d.iter()
        .map(|&v| {
            running = running.max(v);
            running
        })
        .collect()
}

/// Index of the smallest `λ` with monotone instability at most `beta`.
pub fn select_index(monotone: &[f64], beta: f64) -> Result<usize> {
    monotone
        .iter()
        .rposition(|&d| d <= beta)
        .ok_or(Error::NoFeasibleLambda {
            beta,
            best: monotone.iter().copied().fold(f64::INFINITY, f64::min),
        })
}

pub fn stars_select(x: &SampleMatrix, cfg: &StarsConfig) -> Result<StarsResult> {
    let n = x.n();
    let p = x.p();
    cfg.validate(n)?;
    let size = cfg.resolved_subsample_size(n);
    let subsamples: Vec<SampleMatrix> = (0..cfg.n_subsamples)
        .map(|b| x.select_rows(&subsample_indices(n, size, cfg.seed, b)))
        .collect::<Result<_>>()?;
    // Subsamples are noisier than the full data, so an automatic grid starts
    // at the largest subsample λ_max to open with the empty graph everywhere.
    let lmax_of = |data: &SampleMatrix| match cfg.estimator {
        Method::Nlr => nlr_lambda_max(data, &cfg.solver),
        _ => plg_lambda_max(data, &cfg.solver),
    };
    let lambdas = match &cfg.lambda_grid {
        LambdaGrid::Explicit(_) => cfg.lambda_grid.resolve(f64::NAN)?,
        LambdaGrid::Auto { .. } => {
            let mut lmax = lmax_of(x)?;
            for data in &subsamples {
                lmax = lmax.max(lmax_of(data)?);
            }
            cfg.lambda_grid.resolve(lmax)?
        }
    };
    let m = n_pairs(p);

    // Per subsample: for each λ, the selected pairs in stacked order.
    let per_subsample: Vec<(Vec<Vec<bool>>, Vec<String>)> = (0..cfg.n_subsamples)
        .into_par_iter()
        .map(|b| {
            let xb = &subsamples[b];
            let report = match cfg.estimator {
                Method::Nlr => fit_nlr(xb, &lambdas, &cfg.solver, cfg.symmetrize)?,
                _ => fit_plg_lenient(xb, &lambdas, &cfg.solver)?,
            };
            let selected = report
                .estimates
                .iter()
                .map(|theta| {
                    let mut sel = Vec::with_capacity(m);
                    for s in 0..p {
                        for t in (s + 1)..p {
                            sel.push(theta.get(s, t) != 0.0);
                        }
                    }
                    sel
                })
                .collect();
            let warnings = report
                .converged
                .iter()
                .zip(&lambdas)
                .filter(|(c, _)| !**c)
                .map(|(_, l)| format!("subsample {b}: not converged at lambda {l}"))
                .collect();
            Ok((selected, warnings))
        })
        .collect::<Result<_>>()?;

    let b = cfg.n_subsamples;
    let mut instability = Vec::with_capacity(lambdas.len());
    let mut mean_edge_count = Vec::with_capacity(lambdas.len());
    for k in 0..lambdas.len() {
        let mut counts = vec![0usize; m];
        for (selected, _) in &per_subsample {
            for (c, &on) in counts.iter_mut().zip(&selected[k]) {
                *c += usize::from(on);
            }
        }
        let d = counts.iter().map(|&c| edge_instability(c, b)).sum::<f64>() / m as f64;
        instability.push(d);
        mean_edge_count.push(counts.iter().sum::<usize>() as f64 / b as f64);
    }
    let monotone = monotonize(&instability);
    let selected_index = select_index(&monotone, cfg.beta)?;
    Ok(StarsResult {
        estimator: cfg.estimator,
        selected_lambda: lambdas[selected_index],
        lambdas,
        instability,
        monotone,
        mean_edge_count,
        selected_index,
        subsample_size: size,
        n_subsamples: b,
        warnings: per_subsample.into_iter().flat_map(|(_, w)| w).collect(),
    })
}

/// `lambda,instability,monotone,mean_edge_count` with header.
pub fn write_curve_csv<W: Write>(result: &StarsResult, mut out: W) -> Result<()> {
    writeln!(out, "lambda,instability,monotone,mean_edge_count")?;
    for k in 0..result.lambdas.len() {
        writeln!(
            out,
            "{:e},{:e},{:e},{:e}",
            result.lambdas[k], result.instability[k], result.monotone[k], result.mean_edge_count[k]
        )?;
    }
    Ok(())
}
