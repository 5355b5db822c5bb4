//! Small dense real matrices for the conic solvers.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::eigen::{ascending_order, identity_flat, tql2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::identity(n);
        m.data.iter_mut().for_each(|x| *x *= s);
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let src = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    /// Frobenius inner product `⟨self, other⟩ = Tr(selfᵀ other)`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `(self + selfᵀ) / 2` in place.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    /// Lower Cholesky factor, or `None` when the matrix is not numerically
    /// positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut s = self[(j, j)];
            for k in 0..j {
                s -= l[(j, k)] * l[(j, k)];
            }
            if !(s.is_finite() && s > 0.0) {
                return None;
            }
            let d = s.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Some(l)
    }

    /// Solves `L Lᵀ x = b` given the lower factor `self`.
    pub fn cholesky_solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.rows;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self[(i, k)] * y[k];
            }
            y[i] = s / self[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self[(k, i)] * y[k];
            }
            y[i] = s / self[(i, i)];
        }
        y
    }

    /// Inverse of the lower-triangular `self`.
    pub fn lower_inverse(&self) -> Self {
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            inv[(j, j)] = 1.0 / self[(j, j)];
            for i in j + 1..n {
                let mut s = 0.0;
                for k in j..i {
                    s -= self[(i, k)] * inv[(k, j)];
                }
                inv[(i, j)] = s / self[(i, i)];
            }
        }
        inv
    }

    /// Inverse of an SPD matrix through its Cholesky factor.
    pub fn spd_inverse(&self) -> Option<Self> {
        let l = self.cholesky()?;
        let li = l.lower_inverse();
        let mut inv = li.transpose().matmul(&li);
        inv.symmetrize();
        Some(inv)
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Householder tridiagonalization (symmetric) returning `(d, e, Q)` with
/// `e[i]` coupling rows `i` and `i + 1`.
fn tridiagonalize(a: &RealMatrix, want_q: bool) -> (Vec<f64>, Vec<f64>, Option<Vec<f64>>) {
    let n = a.rows();
    let mut v: Vec<f64> = a.data().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let at = |v: &Vec<f64>, i: usize, j: usize| v[i * n + j];

    for j in 0..n {
        d[j] = at(&v, n - 1, j);
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = at(&v, i - 1, j);
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + at(&v, j, j) * f;
                for k in j + 1..i {
                    g += at(&v, k, j) * d[k];
                    e[k] += at(&v, k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = at(&v, i - 1, j);
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[(n - 1) * n + i] = at(&v, i, i);
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = at(&v, k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += at(&v, k, i + 1) * at(&v, k, j);
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = at(&v, n - 1, j);
        v[(n - 1) * n + j] = 0.0;
    }
    v[n * n - 1] = 1.0;
    // shift to the "e[i] couples i and i+1" convention
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    (d, e, if want_q { Some(v) } else { None })
}

/// Ascending eigenvalues of a symmetric matrix (the strict lower triangle is
/// ignored in favour of the symmetric average).
pub fn symmetric_eigenvalues(a: &RealMatrix) -> Vec<f64> {
    assert_eq!(a.rows(), a.cols());
    if a.rows() == 0 {
        return vec![];
    }
    let mut s = a.clone();
    s.symmetrize();
    let (mut d, mut e, _) = tridiagonalize(&s, false);
    tql2(&mut d, &mut e, None);
    d.sort_by(f64::total_cmp);
    d
}

/// Ascending eigenvalues and orthonormal eigenvectors (as columns).
pub fn symmetric_eigen(a: &RealMatrix) -> (Vec<f64>, RealMatrix) {
    let n = a.rows();
    if n == 0 {
        return (vec![], RealMatrix::zeros(0, 0));
    }
    let mut s = a.clone();
    s.symmetrize();
    let (mut d, mut e, q) = tridiagonalize(&s, true);
    let mut z = q.unwrap_or_else(|| identity_flat(n));
    tql2(&mut d, &mut e, Some(&mut z));
    let order = ascending_order(&d);
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vecs = RealMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vecs[(r, col)] = z[r * n + src];
        }
    }
    (values, vecs)
}
