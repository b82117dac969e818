//! Independent reference computations shared by the integration suites.
//!
//! Nothing here calls the crate's objective or solver code; every value is
//! recomputed from the definitions with plain loops or nalgebra.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use plgnet_core::{SampleMatrix, ThetaMatrix};
use rand::Rng;

pub fn softplus_ref(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn sigmoid_ref(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

pub fn random_theta(p: usize, scale: f64, rng: &mut impl Rng) -> ThetaMatrix {
    ThetaMatrix::from_upper(p, |_, _| rng.random_range(-scale..scale))
}

pub fn random_samples(n: usize, p: usize, rng: &mut impl Rng) -> SampleMatrix {
    SampleMatrix::new(n, p, (0..n * p).map(|_| rng.random_range(0..2u8)).collect()).unwrap()
}

/// Penalized log pseudo-likelihood straight from its definition.
pub fn pseudo_likelihood_ref(theta: &ThetaMatrix, x: &SampleMatrix, lambda: f64) -> f64 {
    let p = theta.p();
    let mut total = 0.0;
    for n in 0..x.n() {
        for s in 0..p {
            let mut eta = theta.get(s, s);
            for t in 0..p {
                if t != s {
                    eta += theta.get(s, t) * f64::from(x.get(n, t));
                }
            }
            total += f64::from(x.get(n, s)) * eta - softplus_ref(eta);
        }
    }
    let mut l1 = 0.0;
    for s in 0..p {
        for t in (s + 1)..p {
            l1 += theta.get(s, t).abs();
        }
    }
    total - x.n() as f64 * lambda * l1
}

/// Central differences of the unpenalized pseudo-likelihood in the shared
/// coordinates `(s, t)`, `s ≤ t`.
pub fn finite_difference_gradient(theta: &ThetaMatrix, x: &SampleMatrix, h: f64) -> ThetaMatrix {
    let p = theta.p();
    ThetaMatrix::from_upper(p, |s, t| {
        let mut plus = theta.clone();
        plus.set(s, t, theta.get(s, t) + h);
        let mut minus = theta.clone();
        minus.set(s, t, theta.get(s, t) - h);
        (pseudo_likelihood_ref(&plus, x, 0.0) - pseudo_likelihood_ref(&minus, x, 0.0)) / (2.0 * h)
    })
}

/// Exact joint distribution over all `2^p` states (state bit `i` is `x_i`).
pub fn enumerate_pmf(theta: &ThetaMatrix) -> Vec<f64> {
    let p = theta.p();
    let energies: Vec<f64> = (0..1u32 << p)
        .map(|code| {
            let mut e = 0.0;
            for s in 0..p {
                if code >> s & 1 == 1 {
                    e += theta.get(s, s);
                    for t in (s + 1)..p {
                        if code >> t & 1 == 1 {
                            e += theta.get(s, t);
                        }
                    }
                }
            }
            e
        })
        .collect();
    let max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = energies.iter().map(|e| (e - max).exp()).sum();
    energies.iter().map(|e| (e - max).exp() / z).collect()
}

pub fn empirical_pmf(x: &SampleMatrix) -> Vec<f64> {
    let p = x.p();
    let mut counts = vec![0.0; 1 << p];
    for row in x.rows() {
        let code: usize = row.iter().enumerate().map(|(i, &v)| usize::from(v) << i).sum();
        counts[code] += 1.0;
    }
    counts.iter().map(|c| c / x.n() as f64).collect()
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum::<f64>()
}

/// Row-major dense logistic problem for the oracles.
#[derive(Debug, Clone)]
pub struct DenseProblem {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub pf: Vec<f64>,
}

impl DenseProblem {
    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.x.ncols()).map(|j| self.x.column(j).iter().copied().collect()).collect()
    }

    /// `(1/n) Σ [softplus(η) − y η] + λ Σ w |β|`
    pub fn objective(&self, beta: &[f64], lambda: f64) -> f64 {
        let b = DVector::from_column_slice(beta);
        let eta = &self.x * b;
        let n = self.x.nrows() as f64;
        let loss: f64 = eta.iter().zip(self.y.iter()).map(|(&e, &y)| softplus_ref(e) - y * e).sum();
        loss / n + lambda * beta.iter().zip(&self.pf).map(|(b, w)| w * b.abs()).sum::<f64>()
    }

    fn gradient(&self, beta: &DVector<f64>) -> DVector<f64> {
        let eta = &self.x * beta;
        let resid = DVector::from_iterator(
            eta.len(),
            eta.iter().zip(self.y.iter()).map(|(&e, &y)| sigmoid_ref(e) - y),
        );
        self.x.transpose() * resid / self.x.nrows() as f64
    }
}

/// Unpenalized maximum likelihood by Newton's method with full Hessian
/// solves.
pub fn newton_oracle(prob: &DenseProblem) -> Vec<f64> {
    let n = prob.x.nrows() as f64;
    let mut beta = DVector::zeros(prob.x.ncols());
    for _ in 0..100 {
        let eta = &prob.x * &beta;
        let w: Vec<f64> = eta.iter().map(|&e| sigmoid_ref(e) * (1.0 - sigmoid_ref(e))).collect();
        let mut h = DMatrix::zeros(prob.x.ncols(), prob.x.ncols());
        for i in 0..prob.x.nrows() {
            let row = prob.x.row(i);
            h += row.transpose() * row * (w[i] / n);
        }
        let g = prob.gradient(&beta);
        let step = h.lu().solve(&g).expect("singular Hessian");
        beta -= &step;
        if step.amax() < 1e-14 {
            break;
        }
    }
    beta.iter().copied().collect()
}

/// Accelerated proximal gradient run far past practical convergence.
pub fn prox_gradient_oracle(prob: &DenseProblem, lambda: f64) -> Vec<f64> {
    let n = prob.x.nrows() as f64;
    let gram = prob.x.transpose() * &prob.x / n;
    let lipschitz = gram.symmetric_eigenvalues().max() / 4.0;
    let step = 1.0 / lipschitz;
    let prox = |v: &DVector<f64>| {
        DVector::from_iterator(
            v.len(),
            v.iter().zip(&prob.pf).map(|(&z, &w)| {
                let g = step * lambda * w;
                z.signum() * (z.abs() - g).max(0.0)
            }),
        )
    };
    let mut beta = DVector::zeros(prob.x.ncols());
    let mut y = beta.clone();
    let mut t = 1.0f64;
    for _ in 0..200_000 {
        let next = prox(&(&y - prob.gradient(&y) * step));
        if (&next - &y).amax() < 1e-15 {
            beta = next;
            break;
        }
        let restart = (&y - &next).dot(&(&next - &beta)) > 0.0;
        if restart {
            t = 1.0;
            y = next.clone();
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = &next + (&next - &beta) * ((t - 1.0) / t_next);
            t = t_next;
        }
        beta = next;
    }
    beta.iter().copied().collect()
}

/// Intercept plus `k` Gaussian-ish features, labels from a logistic model.
pub fn random_dense_problem(n: usize, k: usize, rng: &mut impl Rng) -> DenseProblem {
    let truth: Vec<f64> = (0..=k).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut data = Vec::with_capacity(n * (k + 1));
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = vec![1.0];
        row.extend((0..k).map(|_| rng.random_range(-1.5..1.5)));
        let eta: f64 = row.iter().zip(&truth).map(|(a, b)| a * b).sum();
        y.push(if rng.random::<f64>() < sigmoid_ref(eta) { 1.0 } else { 0.0 });
        data.extend(row);
    }
    let mut pf = vec![1.0; k + 1];
    pf[0] = 0.0;
    DenseProblem {
        x: DMatrix::from_row_slice(n, k + 1, &data),
        y: DVector::from_vec(y),
        pf,
    }
}

/// The stacked PLG problem materialized densely from its definition: block
/// `s` holds rows `N s .. N (s + 1)`, pair column `(s, t)` carries `X_nt` in
/// block `s` and `X_ns` in block `t`, and indicator column `m + s` is 1 in
/// block `s`.
pub fn stacked_reference(x: &SampleMatrix) -> DenseProblem {
    let (n, p) = (x.n(), x.p());
    let m = p * (p - 1) / 2;
    let mut mat = DMatrix::zeros(n * p, m + p);
    let mut y = DVector::zeros(n * p);
    let mut col = 0;
    for t in 1..p {
        for s in 0..t {
            for r in 0..n {
                mat[(n * s + r, col)] = f64::from(x.get(r, t));
                mat[(n * t + r, col)] = f64::from(x.get(r, s));
            }
            col += 1;
        }
    }
    for s in 0..p {
        for r in 0..n {
            mat[(n * s + r, m + s)] = 1.0;
            y[n * s + r] = f64::from(x.get(r, s));
        }
    }
    let mut pf = vec![1.0; m + p];
    for w in pf.iter_mut().skip(m) {
        *w = 0.0;
    }
    DenseProblem { x: mat, y, pf }
}
