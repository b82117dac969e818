//! Recasting the penalized pseudo-likelihood as one logistic regression.
//!
//! The parameter vector stacks the upper triangle of `Θ` column by column,
//! `(θ_01, θ_02, θ_12, θ_03, …)`, followed by the diagonal. Pair `(s, t)`
//! lands at position `min + max·(max − 1)/2` (0-based), the diagonal entry
//! `θ_ss` at `m + s` with `m = p(p − 1)/2`.
//!
//! The stacked design has `N·p` rows in vertex-major blocks: row `N·s + n`
//! is the conditional of vertex `s` in sample `n`. It carries `X_nt` in the
//! column of pair `(s, t)` for every `t ≠ s`, a 1 in column `m + s`, and the
//! response entry is `X_ns`. With these, the pseudo-likelihood equals
//!
//! ```text
//! ỹᵀ X̃ θ̃ − Σ_k log(1 + exp(x̃_kᵀ θ̃)) − N λ Σ_{pairs} |θ̃_j|
//! ```
//!
//! The design is never materialized; [`StructuredDesign`] answers column
//! products from the sample matrix directly.

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{ObjectiveValue, SampleMatrix, ThetaMatrix};
use crate::numeric::softplus;
use crate::solver::{Design, LogisticProblem};

/// Number of unordered vertex pairs.
#[inline]
pub fn n_pairs(p: usize) -> usize {
    p * p.saturating_sub(1) / 2
}

/// Position of pair `(s, t)` in the stacked parameter vector (0-based).
pub fn pair_index(s: usize, t: usize, p: usize) -> Result<usize> {
    if s == t {
        return Err(Error::InvalidIndex(format!("pair ({s}, {t}) is a diagonal entry")));
    }
    if s >= p || t >= p {
        return Err(Error::InvalidIndex(format!("pair ({s}, {t}) with p = {p}")));
    }
    Ok(pair_index_unchecked(s, t))
}

#[inline]
pub(crate) fn pair_index_unchecked(s: usize, t: usize) -> usize {
    let (lo, hi) = if s < t { (s, t) } else { (t, s) };
    lo + hi * (hi - 1) / 2
}

/// All pairs `(s, t)`, `s < t`, in stacked order.
pub fn pairs_in_order(p: usize) -> Vec<(usize, usize)> {
    (1..p).flat_map(|t| (0..t).map(move |s| (s, t))).collect()
}

/// `Θ` flattened to `m + p` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaVector {
    p: usize,
    values: Vec<f64>,
}

impl ThetaVector {
    pub fn new(p: usize, values: Vec<f64>) -> Result<Self> {
        let expected = n_pairs(p) + p;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "stacked parameter length",
                expected,
                found: values.len(),
            });
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: j, col: 0 });
        }
        Ok(Self { p, values })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

pub fn vectorize(theta: &ThetaMatrix) -> ThetaVector {
    let p = theta.p();
    let mut values: Vec<f64> = pairs_in_order(p).into_iter().map(|(s, t)| theta.get(s, t)).collect();
    values.extend((0..p).map(|s| theta.get(s, s)));
    ThetaVector { p, values }
}

pub fn devectorize(tv: &ThetaVector) -> ThetaMatrix {
    let p = tv.p;
    let m = n_pairs(p);
    ThetaMatrix::from_upper(p, |s, t| {
        if s == t {
            tv.values[m + s]
        } else {
            tv.values[pair_index_unchecked(s, t)]
        }
    })
}

/// Implicit `Np × (m + p)` stacked design backed by the sample columns.
#[derive(Debug, Clone)]
pub struct StructuredDesign {
    n: usize,
    p: usize,
    m: usize,
    /// Sample columns as floats, `columns[t][n] = X_nt`.
    columns: Vec<Vec<f64>>,
    pairs: Vec<(usize, usize)>,
}

enum Column {
    Pair(usize, usize),
    Indicator(usize),
}

impl StructuredDesign {
    pub fn new(x: &SampleMatrix) -> Self {
        let (n, p) = (x.n(), x.p());
        let columns = (0..p).map(|t| x.column(t).map(f64::from).collect()).collect();
        Self {
            n,
            p,
            m: n_pairs(p),
            columns,
            pairs: pairs_in_order(p),
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    fn column(&self, j: usize) -> Column {
        if j < self.m {
            let (s, t) = self.pairs[j];
            Column::Pair(s, t)
        } else {
            Column::Indicator(j - self.m)
        }
    }

    #[inline]
    fn block<'v>(&self, v: &'v [f64], s: usize) -> &'v [f64] {
        &v[s * self.n..(s + 1) * self.n]
    }

    /// Dense copy, row-major. Refuses when `rows × cols` exceeds `max_entries`.
    pub fn to_dense(&self, max_entries: usize) -> Result<Vec<Vec<f64>>> {
        let (rows, cols) = (self.n_rows(), self.n_cols());
        if rows.saturating_mul(cols) > max_entries {
            return Err(Error::InvalidConfig(format!(
                "refusing to materialize a {rows}x{cols} design (limit {max_entries} entries)"
            )));
        }
        let mut dense = vec![vec![0.0; cols]; rows];
        for (s, t) in pairs_in_order(self.p) {
            let j = pair_index_unchecked(s, t);
            for n in 0..self.n {
                dense[s * self.n + n][j] = self.columns[t][n];
                dense[t * self.n + n][j] = self.columns[s][n];
            }
        }
        for s in 0..self.p {
            for n in 0..self.n {
                dense[s * self.n + n][self.m + s] = 1.0;
            }
        }
        Ok(dense)
    }

    /// Writes the nonzeros as `row col value` lines with 1-based indices.
    pub fn write_coo<W: Write>(&self, mut out: W, max_entries: usize) -> Result<usize> {
        let nnz_bound = self.n * self.p * self.p;
        if nnz_bound > max_entries {
            return Err(Error::InvalidConfig(format!(
                "design has up to {nnz_bound} nonzeros (limit {max_entries})"
            )));
        }
        let mut written = 0;
        for s in 0..self.p {
            for n in 0..self.n {
                let row = s * self.n + n + 1;
                for t in 0..self.p {
                    if t != s && self.columns[t][n] != 0.0 {
                        let j = pair_index_unchecked(s, t) + 1;
                        writeln!(out, "{row} {j} {}", self.columns[t][n])?;
                        written += 1;
                    }
                }
                writeln!(out, "{row} {} 1", self.m + s + 1)?;
                written += 1;
            }
        }
        Ok(written)
    }
}

impl Design for StructuredDesign {
    fn n_rows(&self) -> usize {
        self.n * self.p
    }

    fn n_cols(&self) -> usize {
        self.m + self.p
    }

    fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        match self.column(j) {
            Column::Pair(s, t) => {
                dot(&self.columns[t], self.block(v, s)) + dot(&self.columns[s], self.block(v, t))
            }
            Column::Indicator(s) => sum(self.block(v, s)),
        }
    }

    fn col_axpy(&self, j: usize, a: f64, v: &mut [f64]) {
        let n = self.n;
        match self.column(j) {
            Column::Pair(s, t) => {
                axpy(a, &self.columns[t], &mut v[s * n..(s + 1) * n]);
                axpy(a, &self.columns[s], &mut v[t * n..(t + 1) * n]);
            }
            Column::Indicator(s) => v[s * n..(s + 1) * n].iter_mut().for_each(|x| *x += a),
        }
    }

    fn col_weighted_axpy(&self, j: usize, a: f64, w: &[f64], v: &mut [f64]) {
        let n = self.n;
        let mut go = |s: usize, col: Option<&[f64]>| {
            let (vb, wb) = (&mut v[s * n..(s + 1) * n], &w[s * n..(s + 1) * n]);
            match col {
                Some(c) => {
                    for ((vi, wi), xi) in vb.iter_mut().zip(wb).zip(c) {
                        *vi += a * wi * xi;
                    }
                }
                None => {
                    for (vi, wi) in vb.iter_mut().zip(wb) {
                        *vi += a * wi;
                    }
                }
            }
        };
        match self.column(j) {
            Column::Pair(s, t) => {
                go(s, Some(&self.columns[t]));
                go(t, Some(&self.columns[s]));
            }
            Column::Indicator(s) => go(s, None),
        }
    }

    fn col_weighted_sq_norm(&self, j: usize, w: &[f64]) -> f64 {
        // Entries are 0/1, so x² = x.
        self.col_dot(j, w)
    }

    fn col_sq_norm(&self, j: usize) -> f64 {
        match self.column(j) {
            Column::Pair(s, t) => self.columns[t].iter().sum::<f64>() + self.columns[s].iter().sum::<f64>(),
            Column::Indicator(_) => self.n as f64,
        }
    }

    fn matvec(&self, beta: &[f64], out: &mut [f64]) {
        let n = self.n;
        for s in 0..self.p {
            let block = &mut out[s * n..(s + 1) * n];
            block.iter_mut().for_each(|o| *o = beta[self.m + s]);
            for t in 0..self.p {
                if t == s {
                    continue;
                }
                let b = beta[pair_index_unchecked(s, t)];
                if b != 0.0 {
                    axpy(b, &self.columns[t], block);
                }
            }
        }
    }

    fn weighted_gram(&self, cols: &[usize], w: &[f64]) -> Vec<f64> {
        let k = cols.len();
        let mut gram = vec![0.0; k * k];
        let mut buf = vec![0.0; self.n];
        // Within block s, column j reads sample column t (pair (s, t)) or the
        // constant 1 (indicator s); `None` marks the constant.
        let mut present: Vec<(usize, Option<usize>)> = Vec::with_capacity(self.p);
        for s in 0..self.p {
            present.clear();
            for (a, &j) in cols.iter().enumerate() {
                match self.column(j) {
                    Column::Pair(u, v) if u == s => present.push((a, Some(v))),
                    Column::Pair(u, v) if v == s => present.push((a, Some(u))),
                    Column::Indicator(u) if u == s => present.push((a, None)),
                    _ => {}
                }
            }
            let wb = self.block(w, s);
            for (i, &(a, fa)) in present.iter().enumerate() {
                match fa {
                    Some(t) => buf.iter_mut().zip(wb).zip(&self.columns[t]).for_each(|((o, wi), x)| *o = wi * x),
                    None => buf.copy_from_slice(wb),
                }
                for &(b, fb) in &present[i..] {
                    let v = match fb {
                        Some(t) => dot(&buf, &self.columns[t]),
                        None => sum(&buf),
                    };
                    gram[a * k + b] += v;
                    if a != b {
                        gram[b * k + a] += v;
                    }
                }
            }
        }
        gram
    }
}

/// Four running sums so the loop vectorizes.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn sum(a: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.chunks_exact(4);
    let tail: f64 = chunks.remainder().iter().sum();
    for x in chunks {
        for l in 0..4 {
            acc[l] += x[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// The stacked logistic-regression form of a pseudo-likelihood problem.
#[derive(Debug, Clone)]
pub struct StackedProblem {
    pub design: StructuredDesign,
    pub response: Vec<f64>,
    /// 1 for pair coordinates, 0 for the diagonal.
    pub penalty_factors: Vec<f64>,
}

impl StackedProblem {
    pub fn n_obs(&self) -> usize {
        self.design.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.design.n_cols()
    }

    pub fn n_samples(&self) -> usize {
        self.design.n
    }

    pub fn p(&self) -> usize {
        self.design.p
    }

    pub fn as_logistic(&self) -> LogisticProblem<'_, &StructuredDesign> {
        LogisticProblem::new(&self.design, &self.response, &self.penalty_factors)
    }
}

pub fn build_stacked(x: &SampleMatrix) -> Result<StackedProblem> {
    if x.p() < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 vertices, got {}", x.p())));
    }
    let design = StructuredDesign::new(x);
    let response = design.columns.concat();
    let m = design.m;
    let mut penalty_factors = vec![1.0; m + x.p()];
    penalty_factors[m..].iter_mut().for_each(|w| *w = 0.0);
    Ok(StackedProblem {
        design,
        response,
        penalty_factors,
    })
}

/// Logistic objective of the stacked problem, maximization convention, with
/// penalty `N λ Σ_j w_j |θ̃_j|`.
pub fn converted_objective(
    sp: &StackedProblem,
    tv: &ThetaVector,
    lambda: f64,
    n_samples: usize,
) -> Result<ObjectiveValue> {
    if tv.p != sp.p() {
        return Err(Error::DimensionMismatch {
            what: "vertex count",
            expected: sp.p(),
            found: tv.p,
        });
    }
    if n_samples != sp.n_samples() {
        return Err(Error::DimensionMismatch {
            what: "sample count",
            expected: sp.n_samples(),
            found: n_samples,
        });
    }
    let mut eta = vec![0.0; sp.n_obs()];
    sp.design.matvec(&tv.values, &mut eta);
    let loglik: f64 = eta.iter().zip(&sp.response).map(|(&e, &y)| y * e - softplus(e)).sum();
    let l1: f64 = tv.values.iter().zip(&sp.penalty_factors).map(|(b, w)| w * b.abs()).sum();
    Ok(ObjectiveValue::new(loglik, n_samples as f64 * lambda * l1))
}
