//! Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit-shift QL iterations.

use super::{ComplexMatrix, C64, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Eigenvalues in ascending order; `vectors` holds the matching orthonormal
/// eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        super::column(&self.vectors, k)
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::dim(format!("eigensolve of a {}x{} matrix", m.rows(), m.cols())));
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

pub fn eigh(m: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    Ok(hermitian_eigen(m, true))
}

pub fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    Ok(hermitian_eigen(m, false).values)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigvalsh(m)?[0])
}

pub fn max_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(*eigvalsh(m)?.last().expect("non-empty matrix"))
}

fn hermitian_eigen(m: &ComplexMatrix, want_vectors: bool) -> HermitianEigen {
    let n = m.rows();
    if n == 0 {
        return HermitianEigen { values: vec![], vectors: ComplexMatrix::zeros(0, 0) };
    }
    // Work on the exact Hermitian part so round-off below the acceptance
    // tolerance does not leak into the reduction.
    let mut a = m.hermitian_part();
    let mut q = ComplexMatrix::identity(n);
    let zero = C64::new(0.0, 0.0);

    for k in 0..n.saturating_sub(2) {
        let alpha: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let mut u = vec![zero; n];
        for i in k + 1..n {
            u[i] = a[(i, k)];
        }
        u[k + 1] += phase * alpha;
        let un: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if un == 0.0 {
            continue;
        }
        for c in u.iter_mut() {
            *c /= un;
        }
        // A <- H A H with H = I - 2uu†
        let p = a.matvec(&u);
        let gamma: f64 = u.iter().zip(&p).map(|(x, y)| (x.conj() * y).re).sum();
        for i in 0..n {
            for j in 0..n {
                let upd = u[i] * p[j].conj() + p[i] * u[j].conj() - u[i] * u[j].conj() * (2.0 * gamma);
                a[(i, j)] -= upd * 2.0;
            }
        }
        // Q <- Q H
        let qu = q.matvec(&u);
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] -= qu[i] * u[j].conj() * 2.0;
            }
        }
    }

    // Phase-rotate the Hermitian tridiagonal into a real symmetric one.
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    let mut phases = vec![C64::new(1.0, 0.0); n];
    for i in 0..n - 1 {
        let beta = a[(i + 1, i)];
        let mag = beta.norm();
        e[i] = mag;
        phases[i + 1] = if mag > 0.0 { phases[i] * beta / mag } else { phases[i] };
    }

    let mut z = if want_vectors { Some(identity_flat(n)) } else { None };
    tql2(&mut d, &mut e, z.as_deref_mut());
    let order = ascending_order(&d);
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();

    let vectors = match z {
        Some(z) => {
            // V = Q · diag(phases) · Z
            let qd = ComplexMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j]);
            ComplexMatrix::from_fn(n, n, |i, col| {
                let src = order[col];
                (0..n).map(|k| qd[(i, k)] * z[k * n + src]).sum()
            })
        }
        None => ComplexMatrix::zeros(0, 0),
    };
    HermitianEigen { values, vectors }
}

pub(crate) fn identity_flat(n: usize) -> Vec<f64> {
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    z
}

pub(crate) fn ascending_order(d: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    order
}

/// Implicit QL on a symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i + 1`, `e[n-1]` unused).
/// On return `d` holds the (unsorted) eigenvalues. When `z` is given it is an
/// `n×n` row-major matrix whose columns are rotated along with the iteration.
pub(crate) fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    break;
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let h = z[k * n + i + 1];
                            z[k * n + i + 1] = s * z[k * n + i] + c * h;
                            z[k * n + i] = c * z[k * n + i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}
