//! Column-access interface the coordinate-descent solver works through.

/// A design matrix seen only through per-column kernels and full products.
///
/// Coordinate updates use the per-column kernels; the solver calls the full
/// products `matvec` / `rmatvec` a bounded number of times per IRLS round.
pub trait Design: Sync {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;

    /// `Σ_i x_ij v_i`
    fn col_dot(&self, j: usize, v: &[f64]) -> f64;

    /// `v_i += a · x_ij`
    fn col_axpy(&self, j: usize, a: f64, v: &mut [f64]);

    /// `v_i += a · w_i · x_ij`
    fn col_weighted_axpy(&self, j: usize, a: f64, w: &[f64], v: &mut [f64]);

    /// `Σ_i w_i x_ij²`
    fn col_weighted_sq_norm(&self, j: usize, w: &[f64]) -> f64;

    /// `Σ_i x_ij²`
    fn col_sq_norm(&self, j: usize) -> f64 {
        let ones = vec![1.0; self.n_rows()];
        self.col_weighted_sq_norm(j, &ones)
    }

    /// `out = X β`
    fn matvec(&self, beta: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                self.col_axpy(j, b, out);
            }
        }
    }

    /// `out = Xᵀ v`
    fn rmatvec(&self, v: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.col_dot(j, v);
        }
    }

    /// Row-major `k × k` matrix `Σ_i w_i x_{i,cols[a]} x_{i,cols[b]}`.
    fn weighted_gram(&self, cols: &[usize], w: &[f64]) -> Vec<f64> {
        let k = cols.len();
        let mut gram = vec![0.0; k * k];
        let mut buf = vec![0.0; self.n_rows()];
        for (a, &ja) in cols.iter().enumerate() {
            buf.iter_mut().for_each(|x| *x = 0.0);
            self.col_weighted_axpy(ja, 1.0, w, &mut buf);
            for (b, &jb) in cols.iter().enumerate().skip(a) {
                let v = self.col_dot(jb, &buf);
                gram[a * k + b] = v;
                gram[b * k + a] = v;
            }
        }
        gram
    }
}

impl<D: Design + ?Sized> Design for &D {
    fn n_rows(&self) -> usize {
        (**self).n_rows()
    }
    fn n_cols(&self) -> usize {
        (**self).n_cols()
    }
    fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        (**self).col_dot(j, v)
    }
    fn col_axpy(&self, j: usize, a: f64, v: &mut [f64]) {
        (**self).col_axpy(j, a, v)
    }
    fn col_weighted_axpy(&self, j: usize, a: f64, w: &[f64], v: &mut [f64]) {
        (**self).col_weighted_axpy(j, a, w, v)
    }
    fn col_weighted_sq_norm(&self, j: usize, w: &[f64]) -> f64 {
        (**self).col_weighted_sq_norm(j, w)
    }
    fn col_sq_norm(&self, j: usize) -> f64 {
        (**self).col_sq_norm(j)
    }
    fn matvec(&self, beta: &[f64], out: &mut [f64]) {
        (**self).matvec(beta, out)
    }
    fn rmatvec(&self, v: &[f64], out: &mut [f64]) {
        (**self).rmatvec(v, out)
    }
    fn weighted_gram(&self, cols: &[usize], w: &[f64]) -> Vec<f64> {
        (**self).weighted_gram(cols, w)
    }
}

/// A binary-response logistic regression problem with per-coefficient
/// penalty factors (0 marks an unpenalized coefficient).
#[derive(Debug, Clone, Copy)]
pub struct LogisticProblem<'a, D> {
    pub design: D,
    pub response: &'a [f64],
    pub penalty_factors: &'a [f64],
}

impl<'a, D: Design> LogisticProblem<'a, D> {
    pub fn new(design: D, response: &'a [f64], penalty_factors: &'a [f64]) -> Self {
        assert_eq!(design.n_rows(), response.len(), "response length");
        assert_eq!(design.n_cols(), penalty_factors.len(), "penalty factor length");
        Self {
            design,
            response,
            penalty_factors,
        }
    }

    pub fn n_obs(&self) -> usize {
        self.design.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.design.n_cols()
    }
}

/// Plain column-major dense design. Used for small problems and as a
/// reference implementation in tests.
#[derive(Debug, Clone)]
pub struct DenseDesign {
    n_rows: usize,
    columns: Vec<Vec<f64>>,
}

impl DenseDesign {
    pub fn from_columns(n_rows: usize, columns: Vec<Vec<f64>>) -> Self {
        assert!(columns.iter().all(|c| c.len() == n_rows));
        Self { n_rows, columns }
    }

    /// Row-major input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let columns = (0..n_cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Self { n_rows, columns }
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }
}

impl Design for DenseDesign {
    fn n_rows(&self) -> usize {
        self.n_rows
    }
    fn n_cols(&self) -> usize {
        self.columns.len()
    }
    fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        self.columns[j].iter().zip(v).map(|(a, b)| a * b).sum()
    }
    fn col_axpy(&self, j: usize, a: f64, v: &mut [f64]) {
        for (vi, x) in v.iter_mut().zip(&self.columns[j]) {
            *vi += a * x;
        }
    }
    fn col_weighted_axpy(&self, j: usize, a: f64, w: &[f64], v: &mut [f64]) {
        for ((vi, x), wi) in v.iter_mut().zip(&self.columns[j]).zip(w) {
            *vi += a * wi * x;
        }
    }
    fn col_weighted_sq_norm(&self, j: usize, w: &[f64]) -> f64 {
        self.columns[j].iter().zip(w).map(|(x, wi)| wi * x * x).sum()
    }
}
