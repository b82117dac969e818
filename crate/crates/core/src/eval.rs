//! Structure-recovery ROC curves and the timing harness.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{fit_direct_pl, fit_nlr, fit_plg_lenient, DirectConfig, FitReport, Method, Symmetrize};
use crate::model::{SampleMatrix, ThetaMatrix};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    /// Score cutoff of each point; the first is `+∞`.
    pub thresholds: Vec<f64>,
    pub auc: f64,
}

/// ROC over pairs `s < t`, ranking by `|scores_st|`. Truth edges are the
/// nonzero off-diagonal entries of `truth`. Tied scores enter together.
pub fn roc_curve(truth: &ThetaMatrix, scores: &ThetaMatrix) -> Result<RocCurve> {
    if truth.p() != scores.p() {
        return Err(Error::DimensionMismatch {
            what: "vertex count",
            expected: truth.p(),
            found: scores.p(),
        });
    }
    let p = truth.p();
    let mut ranked = Vec::new();
    for s in 0..p {
        for t in (s + 1)..p {
            ranked.push((scores.get(s, t).abs(), truth.get(s, t) != 0.0));
        }
    }
    let positives = ranked.iter().filter(|r| r.1).count();
    let negatives = ranked.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateTruth {
            edges: positives,
            pairs: ranked.len(),
        });
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < ranked.len() {
        let cut = ranked[i].0;
        while i < ranked.len() && ranked[i].0 == cut {
            if ranked[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
        thresholds.push(cut);
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum();
    Ok(RocCurve { points, thresholds, auc })
}

/// Score each pair by the largest `λ` at which it is in the estimate (0 if
/// it never enters). `lambdas` and `estimates` run along one path.
pub fn entry_scores(lambdas: &[f64], estimates: &[ThetaMatrix]) -> Result<ThetaMatrix> {
    let first = estimates.first().ok_or_else(|| Error::Empty("path has no estimates".into()))?;
    if lambdas.len() != estimates.len() {
        return Err(Error::DimensionMismatch {
            what: "path length",
            expected: lambdas.len(),
            found: estimates.len(),
        });
    }
    let p = first.p();
    Ok(ThetaMatrix::from_upper(p, |s, t| {
        if s == t {
            return 0.0;
        }
        lambdas
            .iter()
            .zip(estimates)
            .filter(|(_, e)| e.get(s, t) != 0.0)
            .map(|(l, _)| *l)
            .fold(0.0, f64::max)
    }))
}

/// ROC with pairs ranked by their entry point along the path.
pub fn path_roc(truth: &ThetaMatrix, report: &FitReport) -> Result<RocCurve> {
    roc_curve(truth, &entry_scores(&report.lambdas, &report.estimates)?)
}

/// `threshold,fpr,tpr` with header.
pub fn write_roc_csv<W: Write>(curve: &RocCurve, mut out: W) -> Result<()> {
    writeln!(out, "threshold,fpr,tpr")?;
    for (th, (f, t)) in curve.thresholds.iter().zip(&curve.points) {
        writeln!(out, "{th:e},{f:e},{t:e}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub p: usize,
    pub edge_prob: Option<f64>,
    pub lambda: f64,
    pub trial_seed: u64,
    pub repeat: usize,
    pub wall_time_ns: u64,
    pub converged: bool,
    pub iterations: usize,
}

/// Labels attached to every record of one benchmark call.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BenchLabels {
    pub edge_prob: Option<f64>,
    pub trial_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSettings {
    pub solver: SolverConfig,
    pub direct: DirectConfig,
    pub symmetrize: Symmetrize,
    pub repeats: usize,
}

impl Default for BenchSettings {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            direct: DirectConfig::default(),
            symmetrize: Symmetrize::Mean,
            repeats: 5,
        }
    }
}

pub const MIN_REPEATS: usize = 3;

fn single_fit(method: Method, x: &SampleMatrix, lambda: f64, settings: &BenchSettings) -> Result<FitReport> {
    let grid = [lambda];
    match method {
        Method::Plg => fit_plg_lenient(x, &grid, &settings.solver),
        Method::Nlr => fit_nlr(x, &grid, &settings.solver, settings.symmetrize),
        Method::DirectPl => fit_direct_pl(x, &grid, &settings.direct),
    }
}

/// Times a cold single-`λ` fit per grid value, `repeats` times after one
/// discarded warm-up pass. PLG timings include building the stacked design.
pub fn bench_fit(
    method: Method,
    x: &SampleMatrix,
    lambdas: &[f64],
    settings: &BenchSettings,
    labels: BenchLabels,
) -> Result<Vec<BenchRecord>> {
    if settings.repeats < MIN_REPEATS {
        return Err(Error::InvalidConfig(format!(
            "benchmarks need at least {MIN_REPEATS} repeats, got {}",
            settings.repeats
        )));
    }
    for &lambda in lambdas {
        single_fit(method, x, lambda, settings)?;
    }
    let mut records = Vec::with_capacity(lambdas.len() * settings.repeats);
    for repeat in 0..settings.repeats {
        for &lambda in lambdas {
            let started = Instant::now();
            let report = single_fit(method, x, lambda, settings)?;
            let elapsed = started.elapsed().as_nanos().max(1) as u64;
            records.push(BenchRecord {
                method,
                p: x.p(),
                edge_prob: labels.edge_prob,
                lambda,
                trial_seed: labels.trial_seed,
                repeat,
                wall_time_ns: elapsed,
                converged: report.converged[0],
                iterations: report.iterations[0],
            });
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub method: Method,
    pub p: usize,
    pub edge_prob: Option<f64>,
    pub lambda: f64,
    pub trial_seed: u64,
    pub repeats: usize,
    pub median_ns: f64,
    pub min_ns: u64,
    pub max_ns: u64,
    pub iterations: usize,
    pub all_converged: bool,
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Median and range per (method, p, edge_prob, λ, trial), in first-seen
/// order.
pub fn summarize(records: &[BenchRecord]) -> Vec<BenchSummary> {
    let mut order = Vec::new();
    let mut groups: BTreeMap<usize, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        let pos = order.iter().position(|k: &&BenchRecord| {
            k.method == r.method
                && k.p == r.p
                && k.edge_prob.map(f64::to_bits) == r.edge_prob.map(f64::to_bits)
                && k.lambda.to_bits() == r.lambda.to_bits()
                && k.trial_seed == r.trial_seed
        });
        let pos = pos.unwrap_or_else(|| {
            order.push(r);
            order.len() - 1
        });
        groups.entry(pos).or_default().push(r);
    }
    groups
        .into_values()
        .map(|g| {
            let mut times: Vec<f64> = g.iter().map(|r| r.wall_time_ns as f64).collect();
            BenchSummary {
                method: g[0].method,
                p: g[0].p,
                edge_prob: g[0].edge_prob,
                lambda: g[0].lambda,
                trial_seed: g[0].trial_seed,
                repeats: g.len(),
                median_ns: median(&mut times),
                min_ns: g.iter().map(|r| r.wall_time_ns).min().unwrap_or(0),
                max_ns: g.iter().map(|r| r.wall_time_ns).max().unwrap_or(0),
                iterations: g[0].iterations,
                all_converged: g.iter().all(|r| r.converged),
            }
        })
        .collect()
}

pub fn write_bench_csv<W: Write>(records: &[BenchRecord], mut out: W) -> Result<()> {
    writeln!(out, "method,p,edge_prob,lambda,trial_seed,repeat,wall_time_ns,converged,iterations")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{:e},{},{},{},{},{}",
            r.method,
            r.p,
            r.edge_prob.map(|v| v.to_string()).unwrap_or_default(),
            r.lambda,
            r.trial_seed,
            r.repeat,
            r.wall_time_ns,
            r.converged,
            r.iterations
        )?;
    }
    Ok(())
}

pub fn write_summary_csv<W: Write>(summaries: &[BenchSummary], mut out: W) -> Result<()> {
    writeln!(out, "method,p,edge_prob,lambda,trial_seed,repeats,median_ns,min_ns,max_ns,iterations,all_converged")?;
    for s in summaries {
        writeln!(
            out,
            "{},{},{},{:e},{},{},{},{},{},{},{}",
            s.method,
            s.p,
            s.edge_prob.map(|v| v.to_string()).unwrap_or_default(),
            s.lambda,
            s.trial_seed,
            s.repeats,
            s.median_ns,
            s.min_ns,
            s.max_ns,
            s.iterations,
            s.all_converged
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn truth() -> ThetaMatrix {
        let mut t = ThetaMatrix::zeros(4);
        t.set(0, 1, 0.8);
        t.set(2, 3, -0.5);
        t
    }

    #[test]
    fn perfect_scores() {
        let t = truth();
        let roc = roc_curve(&t, &t).unwrap();
        assert_eq!(roc.auc, 1.0);
        assert_eq!(roc.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(roc.points.last(), Some(&(1.0, 1.0)));
    }

    #[test]
    fn all_tied_scores() {
        let roc = roc_curve(&truth(), &ThetaMatrix::from_upper(4, |_, _| 0.3)).unwrap();
        assert_eq!(roc.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(roc.auc, 0.5);
    }

    #[test]
    fn hand_computed_curve() {
        // Pairs in order (1,2) (1,3) (1,4) (2,3) (2,4) (3,4); truth edges (1,2), (3,4).
        let mut scores = ThetaMatrix::zeros(4);
        scores.set(0, 1, 0.9);
        scores.set(0, 2, 0.7);
        scores.set(2, 3, 0.5);
        let roc = roc_curve(&truth(), &scores).unwrap();
        assert_eq!(
            roc.points,
            vec![(0.0, 0.0), (0.0, 0.5), (0.25, 0.5), (0.25, 1.0), (1.0, 1.0)]
        );
        assert!((roc.auc - 0.875).abs() < 1e-15);
    }

    #[test]
    fn degenerate_truth() {
        assert!(matches!(
            roc_curve(&ThetaMatrix::zeros(3), &ThetaMatrix::zeros(3)),
            Err(Error::DegenerateTruth { edges: 0, pairs: 3 })
        ));
        let full = ThetaMatrix::from_upper(3, |s, t| if s == t { 0.0 } else { 1.0 });
        assert!(roc_curve(&full, &full).is_err());
    }

    #[test]
    fn auc_invariant_under_monotone_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = ThetaMatrix::from_upper(8, |s, t| if s != t && rng.random_bool(0.3) { 1.0 } else { 0.0 });
        let scores = ThetaMatrix::from_upper(8, |_, _| rng.random_range(0.0..2.0));
        let squashed = ThetaMatrix::from_upper(8, |s, u| scores.get(s, u).powi(3) + 0.1);
        let a = roc_curve(&t, &scores).unwrap().auc;
        let b = roc_curve(&t, &squashed).unwrap().auc;
        assert_eq!(a, b);
    }

    #[test]
    fn random_scores_near_half() {
        let mut total = 0.0;
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = ThetaMatrix::from_upper(30, |s, u| if s != u && rng.random_bool(0.3) { 1.0 } else { 0.0 });
            let scores = ThetaMatrix::from_upper(30, |_, _| rng.random::<f64>());
            total += roc_curve(&t, &scores).unwrap().auc;
        }
        assert!((total / 50.0 - 0.5).abs() < 0.1);
    }

    #[test]
    fn entry_scores_rank_by_first_lambda() {
        let mut early = ThetaMatrix::zeros(3);
        early.set(0, 1, 0.2);
        let mut late = early.clone();
        late.set(1, 2, -0.1);
        let s = entry_scores(&[0.5, 0.1], &[early, late]).unwrap();
        assert_eq!(s.get(0, 1), 0.5);
        assert_eq!(s.get(1, 2), 0.1);
        assert_eq!(s.get(0, 2), 0.0);
    }

    #[test]
    fn bench_requires_three_repeats() {
        let x = SampleMatrix::new(4, 2, vec![0, 1, 1, 0, 1, 1, 0, 0]).unwrap();
        let settings = BenchSettings { repeats: 1, ..Default::default() };
        assert!(bench_fit(Method::Plg, &x, &[0.1], &settings, BenchLabels::default()).is_err());
    }

    #[test]
    fn summary_medians() {
        let rec = |repeat, ns| BenchRecord {
            method: Method::Plg,
            p: 5,
            edge_prob: Some(0.2),
            lambda: 0.1,
            trial_seed: 1,
            repeat,
            wall_time_ns: ns,
            converged: true,
            iterations: 4,
        };
        let s = summarize(&[rec(0, 30), rec(1, 10), rec(2, 20)]);
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].median_ns, s[0].min_ns, s[0].max_ns), (20.0, 10, 30));
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }
}
