//! Dense matrices, the ridge least-squares solver, the seeded random stream
//! and small statistics helpers.
//!
//! Everything here is 64-bit. The matrices involved are small (rules x rules
//! for the normal equations, samples x rules for designs), so a plain
//! row-major `Vec<f64>` is all the storage we need.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Matrix::from_vec(rows.len(), cols, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics, and a zero-column matrix has no meaningful rows
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.row_iter().map(<[f64]>::to_vec).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// New matrix made of the given rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// `self * v`
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matvec: {}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(self.row_iter().map(|r| dot(r, v)).collect())
    }

    /// `selfᵀ * v`
    pub fn t_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!(
                "t_matvec: ({}x{})ᵀ times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (r, &vi) in self.row_iter().zip(v) {
            for (o, &a) in out.iter_mut().zip(r) {
                *o += a * vi;
            }
        }
        Ok(out)
    }

    /// `selfᵀ * self`
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for r in self.row_iter() {
            for i in 0..n {
                let ri = r[i];
                if ri == 0.0 {
                    continue;
                }
                let gi = g.row_mut(i);
                for j in i..n {
                    gi[j] += ri * r[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g[(i, j)] = g[(j, i)];
            }
        }
        g
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `min ‖phi·w − y‖² + lambda‖w‖²` through the normal equations
/// `(phiᵀphi + lambda·I) w = phiᵀy`.
///
/// The system is factored with Cholesky. If rounding makes a pivot
/// non-positive while `lambda > 0`, the solve falls back to Gaussian
/// elimination with partial pivoting. One step of iterative refinement is
/// applied in both cases.
pub fn ridge_solve(phi: &Matrix, y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let (n, r) = phi.shape();
    if n == 0 || r == 0 {
        return Err(Error::Dimension(format!("ridge_solve on a {n}x{r} design")));
    }
    if y.len() != n {
        return Err(Error::Dimension(format!(
            "ridge_solve: design has {n} rows, target has {}",
            y.len()
        )));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Config(format!("lambda must be >= 0, got {lambda}")));
    }

    let mut a = phi.gram();
    for i in 0..r {
        a[(i, i)] += lambda;
    }
    let b = phi.t_matvec(y)?;

    let solver = match Cholesky::factor(&a) {
        Some(c) => Solver::Cholesky(c),
        None if lambda > 0.0 => Solver::Lu(PivotedLu::factor(&a).ok_or(Error::Singular)?),
        None => return Err(Error::Singular),
    };

    let mut w = solver.solve(&b);
    let aw = a.matvec(&w)?;
    let resid: Vec<f64> = b.iter().zip(&aw).map(|(bi, ai)| bi - ai).collect();
    let dw = solver.solve(&resid);
    for (wi, d) in w.iter_mut().zip(dw) {
        *wi += d;
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(w)
}

enum Solver {
    Cholesky(Cholesky),
    Lu(PivotedLu),
}

impl Solver {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            Solver::Cholesky(c) => c.solve(b),
            Solver::Lu(lu) => lu.solve(b),
        }
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    fn factor(a: &Matrix) -> Option<Self> {
        let n = a.rows();
        let mut l = Matrix::zeros(n, n);
        // relative pivot floor; below this the factor is numerically useless
        let scale = (0..n).fold(0.0f64, |m, i| m.max(a[(i, i)].abs()));
        let floor = scale * 1e-14;
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > floor) {
                return None;
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Some(Cholesky { l })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let l = &self.l;
        let mut z = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                z[i] -= l[(i, k)] * z[k];
            }
            z[i] /= l[(i, i)];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                z[i] -= l[(k, i)] * z[k];
            }
            z[i] /= l[(i, i)];
        }
        z
    }
}

struct PivotedLu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl PivotedLu {
    fn factor(a: &Matrix) -> Option<Self> {
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))?;
            if lu[(p, k)] == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / lu[(k, k)];
                lu[(i, k)] = f;
                for j in k + 1..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
            }
        }
        Some(PivotedLu { lu, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let lu = &self.lu;
        let mut z: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                z[i] -= lu[(i, k)] * z[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                z[i] -= lu[(i, k)] * z[k];
            }
            z[i] /= lu[(i, i)];
        }
        z
    }
}

pub fn clip_elementwise(v: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    debug_assert!(lo <= hi);
    v.iter().map(|&x| x.max(lo).min(hi)).collect()
}

/// Mean with a normal-approximation 95% interval:
/// `mean ± 1.96 · s / √n` where `s` is the sample (n − 1) standard deviation.
pub fn mean_ci95(samples: &[f64]) -> Result<(f64, f64, f64)> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "confidence interval needs at least 2 samples, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let half = 1.96 * var.sqrt() / nf.sqrt();
    Ok((mean, mean - half, mean + half))
}

/// SplitMix64 generator.
///
/// State advances by the golden-ratio increment `0x9E3779B97F4A7C15`; each
/// output is the state passed through the finalizer
/// `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31`.
///
/// Derived draws:
/// - `next_f64`: top 53 bits times 2⁻⁵³, in `[0, 1)`.
/// - `next_below(n)`: high 64 bits of the 128-bit product `u64 · n`.
/// - `normal`: Box-Muller cosine branch from `u1 = 1 − next_f64()`, `u2 = next_f64()`.
/// - `split`: a child stream seeded with the parent's next `u64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomStream {
    seed: u64,
    state: u64,
}

impl RandomStream {
    const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(seed: u64) -> Self {
        RandomStream { seed, state: seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn next_below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Fisher-Yates, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i + 1);
            items.swap(i, j);
        }
    }

    pub fn split(&mut self) -> RandomStream {
        RandomStream::new(self.next_u64())
    }
}
