//! Dense complex matrices and the handful of operations the rest of the crate
//! needs: Kronecker products, partial traces and Hermitian eigendecomposition.
//!
//! Matrices are stored row-major. Sizes in this crate stay small (side ≤ a few
//! hundred), so everything is dense and allocation-happy.

mod eigen;
mod real;

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use eigen::{eigh, eigvalsh, max_eigenvalue, min_eigenvalue, HermitianEigen};
pub use real::{symmetric_eigen, symmetric_eigenvalues, RealMatrix};

pub type C64 = Complex64;

/// Entrywise tolerance used to accept a matrix as Hermitian before an eigensolve.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Which tensor factor to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, re: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, re.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// |v⟩⟨w|
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    /// |v⟩⟨v|
    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`. Shapes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermiticity; `INFINITY` for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `Tr(self · other)`.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// ⟨v|self|v⟩
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let w = self.matvec(v);
        v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum()
    }

    /// Real part of each entry, row-major.
    pub fn real_parts(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.re).collect()
    }

    pub fn imag_parts(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.im).collect()
    }

    /// `(self + self†) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            let s = a[(i1, j1)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    out[(i1 * b.rows + i2, j1 * b.cols + j2)] = s * b[(i2, j2)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Traces out one factor of a bipartite operator on `C^dA ⊗ C^dB`.
pub fn partial_trace(
    m: &ComplexMatrix,
    (da, db): (usize, usize),
    traced: Subsystem,
) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows != da * db {
        return Err(Error::dim(format!(
            "partial trace of a {}x{} matrix with factors ({da}, {db})",
            m.rows, m.cols
        )));
    }
    Ok(match traced {
        Subsystem::A => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
    })
}

pub fn inner(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &mut [C64]) {
    let n = norm(v);
    if n > 0.0 {
        for a in v.iter_mut() {
            *a /= n;
        }
    }
}

pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    normalize(&mut v);
    v
}

/// Haar-ish random unitary from Gram-Schmidt on a complex Gaussian matrix.
/// Columns are the orthonormal vectors.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = random_state(dim, rng);
        for c in &cols {
            let p = inner(c, &v);
            for (a, b) in v.iter_mut().zip(c) {
                *a -= p * b;
            }
        }
        if norm(&v) < 1e-8 {
            continue;
        }
        normalize(&mut v);
        cols.push(v);
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Column `j` of `m` as a vector.
pub fn column(m: &ComplexMatrix, j: usize) -> Vec<C64> {
    (0..m.rows).map(|i| m[(i, j)]).collect()
}

#[derive(Serialize, Deserialize)]
struct ComplexMatrixRepr {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexMatrixRepr {
            rows: self.rows,
            cols: self.cols,
            re: self.real_parts(),
            im: self.imag_parts(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ComplexMatrixRepr::deserialize(d)?;
        if r.rows == 0 || r.cols == 0 {
            return Err(serde::de::Error::custom("matrix dimensions must be positive"));
        }
        if r.re.len() != r.rows * r.cols || r.im.len() != r.rows * r.cols {
            return Err(serde::de::Error::custom(format!(
                "expected {} entries in re and im",
                r.rows * r.cols
            )));
        }
        let data = r.re.iter().zip(&r.im).map(|(&a, &b)| C64::new(a, b)).collect();
        Ok(ComplexMatrix { rows: r.rows, cols: r.cols, data })
    }
}

/// Pauli matrices and a couple of kets used across tests and fixtures.
pub mod consts {
    use super::{ComplexMatrix, C64};

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> ComplexMatrix {
        let z = C64::new(0.0, 0.0);
        ComplexMatrix::from_vec(2, 2, vec![z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z]).unwrap()
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::diag(&[1.0, -1.0])
    }

    pub fn ket(dim: usize, i: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[i] = C64::new(1.0, 0.0);
        v
    }

    /// (|00⟩ + |11⟩)/√2
    pub fn phi_plus() -> Vec<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]
    }

    /// cos θ|0⟩ + sin θ|1⟩
    pub fn real_qubit(theta: f64) -> Vec<C64> {
        vec![C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)]
    }
}

#[cfg(test)]
mod tests {
    use super::consts::*;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
        let k = kron(&ComplexMatrix::diag(&[1.0, 2.0]), &ComplexMatrix::diag(&[3.0, 4.0]));
        assert_eq!(k, ComplexMatrix::diag(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn kron_of_basis_projectors() {
        let p0 = ComplexMatrix::projector(&ket(2, 0));
        let p1 = ComplexMatrix::projector(&ket(2, 1));
        let k = kron(&p0, &p1);
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (1, 1) { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)], C64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn partial_trace_examples() {
        let ra = ComplexMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]).unwrap();
        let rb = ComplexMatrix::from_real(2, 2, &[0.4, -0.2, -0.2, 0.6]).unwrap();
        let pt = partial_trace(&kron(&ra, &rb), (2, 2), Subsystem::A).unwrap();
        assert!(pt.max_abs_diff(&rb.scale(ra.trace())) < 1e-15);

        let phi = ComplexMatrix::projector(&phi_plus());
        let red = partial_trace(&phi, (2, 2), Subsystem::A).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        let id = partial_trace(&ComplexMatrix::identity(4), (2, 2), Subsystem::A).unwrap();
        assert!(id.max_abs_diff(&ComplexMatrix::identity(2).scale_real(2.0)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        assert!(partial_trace(&ComplexMatrix::identity(5), (2, 2), Subsystem::A).is_err());
    }

    #[test]
    fn partial_trace_uneven_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ra = ComplexMatrix::projector(&random_state(3, &mut rng));
        let rb = ComplexMatrix::projector(&random_state(2, &mut rng));
        let rho = kron(&ra, &rb);
        assert!(partial_trace(&rho, (3, 2), Subsystem::A).unwrap().max_abs_diff(&rb) < 1e-14);
        assert!(partial_trace(&rho, (3, 2), Subsystem::B).unwrap().max_abs_diff(&ra) < 1e-14);
    }

    #[test]
    fn kron_associative_and_trace_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_unitary(2, &mut rng);
        let b = random_unitary(3, &mut rng);
        let c = random_unitary(2, &mut rng);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        assert!(left.max_abs_diff(&right) < 1e-14);
        let t = kron(&a, &b).trace();
        assert!((t - a.trace() * b.trace()).norm() < 1e-13);
    }

    #[test]
    fn density_matrix_reductions_have_unit_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let psi = random_state(6, &mut rng);
            let rho = ComplexMatrix::projector(&psi);
            let rb = partial_trace(&rho, (3, 2), Subsystem::A).unwrap();
            let scalar = partial_trace(&rb, (1, 2), Subsystem::B).unwrap();
            assert!((scalar[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn json_roundtrip_layout() {
        let m = ComplexMatrix::from_vec(1, 2, vec![C64::new(1.0, 2.0), C64::new(3.0, -4.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"re":[1.0,3.0],"im":[2.0,-4.0]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"re":[1],"im":[0]}"#).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(5, &mut rng);
        let uu = &u.adjoint() * &u;
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-12);
    }
}
