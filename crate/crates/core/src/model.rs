//! Parameter and sample types, and exact evaluation of the network objectives.
//!
//! For a symmetric `Θ` over `p` binary vertices the joint mass function is
//!
//! ```text
//! P(x) = exp( Σ_s θ_ss x_s + Σ_{s<t} θ_st x_s x_t − Ψ(Θ) )
//! ```
//!
//! Objective values follow the maximization convention: `total =
//! loglik_part − penalty_part`. The L1 penalty always runs over unordered
//! pairs `s < t` once, never over the diagonal. That equals half the sum over
//! ordered pairs `s ≠ t` for a symmetric `Θ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{sigmoid, softplus, LogSumExp};

/// Largest `p` for which the log-partition function is enumerated.
pub const MAX_ENUMERATION_P: usize = 25;

/// Symmetric `p × p` parameter matrix. Diagonal entries are node potentials,
/// off-diagonal entries are edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMatrix {
    p: usize,
    values: Vec<f64>,
}

impl ThetaMatrix {
    pub fn zeros(p: usize) -> Self {
        Self {
            p,
            values: vec![0.0; p * p],
        }
    }

    /// Builds from a row-major dense matrix. Fails unless the input is
    /// exactly symmetric and finite.
    pub fn from_dense(p: usize, values: Vec<f64>) -> Result<Self> {
        if p == 0 {
            return Err(Error::Empty("theta matrix with p = 0".into()));
        }
        if values.len() != p * p {
            return Err(Error::DimensionMismatch {
                what: "dense theta entries",
                expected: p * p,
                found: values.len(),
            });
        }
        for s in 0..p {
            for t in 0..p {
                let v = values[s * p + t];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: s, col: t });
                }
                if v != values[t * p + s] {
                    return Err(Error::NotSymmetric { row: s, col: t });
                }
            }
        }
        Ok(Self { p, values })
    }

    /// Builds from a closure evaluated on the upper triangle `s <= t` and
    /// mirrored.
    pub fn from_upper(p: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(p);
        for t in 0..p {
            for s in 0..=t {
                m.set(s, t, f(s, t));
            }
        }
        m
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.values[s * self.p + t]
    }

    /// Sets `θ_st` and `θ_ts` together.
    ///
    /// # Panics
    /// Panics on a non-finite value or out-of-range index.
    #[inline]
    pub fn set(&mut self, s: usize, t: usize, v: f64) {
        assert!(v.is_finite(), "theta entries must be finite");
        self.values[s * self.p + t] = v;
        self.values[t * self.p + s] = v;
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.p..(s + 1) * self.p]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Number of nonzero off-diagonal entries with `s < t`.
    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Nonzero off-diagonal entries `(s, t, θ_st)` with `s < t`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.p).flat_map(move |s| {
            ((s + 1)..self.p).filter_map(move |t| {
                let v = self.get(s, t);
                (v != 0.0).then_some((s, t, v))
            })
        })
    }

    /// `Σ_{s<t} |θ_st|`.
    pub fn off_diagonal_l1(&self) -> f64 {
        let mut acc = 0.0;
        for s in 0..self.p {
            for t in (s + 1)..self.p {
                acc += self.get(s, t).abs();
            }
        }
        acc
    }

    /// Relabels vertices: entry `(s, t)` of the result is `θ_{perm[s] perm[t]}`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_upper(self.p, |s, t| self.get(perm[s], perm[t]))
    }

    /// Conditional log-odds `η_s = θ_ss + Σ_{t≠s} θ_st x_t`.
    #[inline]
    pub fn conditional_logit(&self, x: &[u8], s: usize) -> f64 {
        let row = self.row(s);
        let mut eta = row[s];
        for (t, (&xt, &w)) in x.iter().zip(row).enumerate() {
            if t != s && xt != 0 {
                eta += w;
            }
        }
        eta
    }

    /// Unnormalized log-mass `Σ_s θ_ss x_s + Σ_{s<t} θ_st x_s x_t`.
    pub fn energy(&self, x: &[u8]) -> f64 {
        let mut e = 0.0;
        for s in 0..self.p {
            if x[s] == 0 {
                continue;
            }
            let row = self.row(s);
            e += row[s];
            for t in (s + 1)..self.p {
                if x[t] != 0 {
                    e += row[t];
                }
            }
        }
        e
    }
}

/// `N × p` matrix of binary observations, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleMatrix {
    n: usize,
    p: usize,
    data: Vec<u8>,
}

impl SampleMatrix {
    pub fn new(n: usize, p: usize, data: Vec<u8>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::Empty(format!("sample matrix of shape {n}x{p}")));
        }
        if data.len() != n * p {
            return Err(Error::DimensionMismatch {
                what: "sample entries",
                expected: n * p,
                found: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|&v| v > 1) {
            return Err(Error::NotBinary {
                row: i / p + 1,
                col: i % p + 1,
                value: data[i].to_string(),
            });
        }
        Ok(Self { n, p, data })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                what: "sample row length",
                expected: p,
                found: bad.len(),
            });
        }
        Self::new(n, p, rows.concat())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, n: usize, s: usize) -> u8 {
        self.data[n * self.p + s]
    }

    #[inline]
    pub fn row(&self, n: usize) -> &[u8] {
        &self.data[n * self.p..(n + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.data.chunks_exact(self.p)
    }

    pub fn column(&self, s: usize) -> impl Iterator<Item = u8> + '_ {
        self.rows().map(move |r| r[s])
    }

    pub fn column_mean(&self, s: usize) -> f64 {
        self.column(s).map(f64::from).sum::<f64>() / self.n as f64
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    /// Rows selected by `indices`, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            if i >= self.n {
                return Err(Error::InvalidIndex(format!("row {i} of {}", self.n)));
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(indices.len(), self.p, data)
    }

    /// Column permutation: column `s` of the result is column `perm[s]`.
    pub fn permuted_columns(&self, perm: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for r in self.rows() {
            data.extend(perm.iter().map(|&s| r[s]));
        }
        Self {
            n: self.n,
            p: self.p,
            data,
        }
    }
}

/// An objective split into its likelihood and penalty parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub loglik_part: f64,
    pub penalty_part: f64,
    pub total: f64,
}

impl ObjectiveValue {
    pub fn new(loglik_part: f64, penalty_part: f64) -> Self {
        Self {
            loglik_part,
            penalty_part,
            total: loglik_part - penalty_part,
        }
    }
}

fn check_p(theta: &ThetaMatrix, x: &SampleMatrix) -> Result<()> {
    if theta.p() != x.p() {
        return Err(Error::DimensionMismatch {
            what: "vertex count",
            expected: theta.p(),
            found: x.p(),
        });
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    Ok(())
}

/// Log-partition function `Ψ(Θ)` by enumeration of all `2^p` states.
pub fn log_partition(theta: &ThetaMatrix) -> Result<f64> {
    let p = theta.p();
    if p > MAX_ENUMERATION_P {
        return Err(Error::DimensionTooLarge {
            p,
            max: MAX_ENUMERATION_P,
        });
    }
    let mut lse = LogSumExp::default();
    let mut x = vec![0u8; p];
    for code in 0u64..(1u64 << p) {
        for (s, xs) in x.iter_mut().enumerate() {
            *xs = ((code >> s) & 1) as u8;
        }
        lse.push(theta.energy(&x));
    }
    Ok(lse.value())
}

pub fn joint_pmf(theta: &ThetaMatrix, x: &[u8]) -> Result<f64> {
    if x.len() != theta.p() {
        return Err(Error::DimensionMismatch {
            what: "state length",
            expected: theta.p(),
            found: x.len(),
        });
    }
    Ok((theta.energy(x) - log_partition(theta)?).exp())
}

/// `Ψ_s(x, Θ) = log(1 + exp(θ_ss + Σ_{t≠s} x_t θ_st))`.
pub fn psi_s(theta: &ThetaMatrix, x: &[u8], s: usize) -> Result<f64> {
    if s >= theta.p() {
        return Err(Error::InvalidIndex(format!("vertex {s} of {}", theta.p())));
    }
    if x.len() != theta.p() {
        return Err(Error::DimensionMismatch {
            what: "state length",
            expected: theta.p(),
            found: x.len(),
        });
    }
    Ok(softplus(theta.conditional_logit(x, s)))
}

/// L1-penalized pseudo-likelihood of `Θ` on the samples.
pub fn pseudo_likelihood(theta: &ThetaMatrix, x: &SampleMatrix, lambda: f64) -> Result<ObjectiveValue> {
    check_p(theta, x)?;
    check_lambda(lambda)?;
    let p = theta.p();
    let mut loglik = 0.0;
    for row in x.rows() {
        for s in 0..p {
            let eta = theta.conditional_logit(row, s);
            if row[s] != 0 {
                loglik += eta;
            }
            loglik -= softplus(eta);
        }
    }
    let penalty = x.n() as f64 * lambda * theta.off_diagonal_l1();
    Ok(ObjectiveValue::new(loglik, penalty))
}

/// Accumulates `Σ_n Σ_s r_ns x̃_ns` back onto the symmetric parameter space,
/// where `x̃_ns` is the covariate vector of the conditional of vertex `s` in
/// sample `n`: indicator on `θ_ss`, `X_nt` on `θ_st`.
fn accumulate_conditionals(x: &SampleMatrix, residual: impl Fn(usize, usize) -> f64) -> ThetaMatrix {
    let p = x.p();
    let mut acc = vec![0.0; p * p];
    for (n, row) in x.rows().enumerate() {
        for s in 0..p {
            let r = residual(n, s);
            if r == 0.0 {
                continue;
            }
            acc[s * p + s] += r;
            for t in 0..p {
                if t != s && row[t] != 0 {
                    // θ_st enters the conditional of s with covariate X_nt.
                    let (a, b) = if s < t { (s, t) } else { (t, s) };
                    acc[a * p + b] += r;
                }
            }
        }
    }
    ThetaMatrix::from_upper(p, |s, t| acc[s * p + t])
}

/// Gradient of the unpenalized pseudo-likelihood with respect to the shared
/// parameters `θ_st = θ_ts` and `θ_ss`, returned as a symmetric matrix.
pub fn pseudo_likelihood_gradient(theta: &ThetaMatrix, x: &SampleMatrix) -> Result<ThetaMatrix> {
    check_p(theta, x)?;
    Ok(accumulate_conditionals(x, |n, s| {
        let row = x.row(n);
        f64::from(row[s]) - sigmoid(theta.conditional_logit(row, s))
    }))
}

/// Product of the pseudo-likelihood curvature at `Θ = 0` with a direction
/// `V`: `Σ_n Σ_s x̃_ns x̃_nsᵀ v / 4`. The logistic curvature never exceeds its
/// value at zero, so this operator bounds the Hessian of the negated
/// pseudo-likelihood everywhere.
pub fn curvature_bound_product(v: &ThetaMatrix, x: &SampleMatrix) -> Result<ThetaMatrix> {
    check_p(v, x)?;
    Ok(accumulate_conditionals(x, |n, s| {
        0.25 * v.conditional_logit(x.row(n), s)
    }))
}

/// Exact penalized log-likelihood (small `p` only).
pub fn penalized_log_likelihood(theta: &ThetaMatrix, x: &SampleMatrix, lambda: f64) -> Result<ObjectiveValue> {
    check_p(theta, x)?;
    check_lambda(lambda)?;
    let log_z = log_partition(theta)?;
    let p = theta.p();
    // Σ_{t≥s} θ_st (XᵀX)_st
    let mut linear = 0.0;
    for row in x.rows() {
        for s in 0..p {
            if row[s] == 0 {
                continue;
            }
            for t in s..p {
                if row[t] != 0 {
                    linear += theta.get(s, t);
                }
            }
        }
    }
    let n = x.n() as f64;
    Ok(ObjectiveValue::new(
        linear - n * log_z,
        n * lambda * theta.off_diagonal_l1(),
    ))
}
