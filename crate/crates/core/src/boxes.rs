//! Bipartite correlation boxes `P(ab|xy)`.
//!
//! Settings and outcomes are both 0-based throughout the crate.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{consts, kron, min_eigenvalue, ComplexMatrix, C64};

pub const NORMALIZATION_TOL: f64 = 1e-10;
const CLAMP_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationBox {
    m: usize,
    n: usize,
    p: Vec<f64>,
}

#[derive(Deserialize)]
struct BoxRepr {
    m: usize,
    n: usize,
    p: Vec<f64>,
}

impl<'de> Deserialize<'de> for CorrelationBox {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BoxRepr::deserialize(d)?;
        CorrelationBox::new(r.m, r.n, r.p).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignallingCheck {
    pub ok: bool,
    pub max_violation: f64,
}

impl CorrelationBox {
    /// Validates and takes ownership of a table in `(a, b, x, y)` row-major
    /// order. Entries in `(−1e-12, 0)` are clamped to zero.
    pub fn new(m: usize, n: usize, mut p: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("m and n must be positive"));
        }
        if p.len() != n * n * m * m {
            return Err(Error::dim(format!("{} entries for a box with m={m}, n={n}", p.len())));
        }
        for v in p.iter_mut() {
            if !v.is_finite() || *v < -CLAMP_TOL {
                return Err(Error::invalid(format!("probability {v} is negative or not finite")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let b = Self { m, n, p };
        for x in 0..m {
            for y in 0..m {
                let s: f64 = (0..n).flat_map(|a| (0..n).map(move |bb| (a, bb))).map(|(a, bb)| b.get(a, bb, x, y)).sum();
                if (s - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::invalid(format!("P(··|{x}{y}) sums to {s}")));
                }
            }
        }
        Ok(b)
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut p = Vec::with_capacity(n * n * m * m);
        for a in 0..n {
            for b in 0..n {
                for x in 0..m {
                    for y in 0..m {
                        p.push(f(a, b, x, y));
                    }
                }
            }
        }
        Self::new(m, n, p)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((a * self.n + b) * self.m + x) * self.m + y
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[self.index(a, b, x, y)]
    }

    /// `P(a|x)` computed with Bob's setting `y`.
    pub fn alice_marginal(&self, a: usize, x: usize, y: usize) -> f64 {
        (0..self.n).map(|b| self.get(a, b, x, y)).sum()
    }

    /// `P(b|y)` computed with Alice's setting `x`.
    pub fn bob_marginal(&self, b: usize, y: usize, x: usize) -> f64 {
        (0..self.n).map(|a| self.get(a, b, x, y)).sum()
    }

    pub fn is_nonsignalling(&self, tol: f64) -> SignallingCheck {
        let mut worst = 0.0_f64;
        for a in 0..self.n {
            for x in 0..self.m {
                let vals: Vec<f64> = (0..self.m).map(|y| self.alice_marginal(a, x, y)).collect();
                worst = worst.max(spread(&vals));
            }
        }
        for b in 0..self.n {
            for y in 0..self.m {
                let vals: Vec<f64> = (0..self.m).map(|x| self.bob_marginal(b, y, x)).collect();
                worst = worst.max(spread(&vals));
            }
        }
        SignallingCheck { ok: worst <= tol, max_violation: worst }
    }

    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::dim(format!(
                "boxes of shape (m={}, n={}) and (m={}, n={})",
                self.m, self.n, other.m, other.n
            )));
        }
        Ok(self.p.iter().zip(&other.p).map(|(a, b)| (a - b).abs()).sum())
    }

    /// The same numbers viewed as an element of `V ⊗ V`, indexed
    /// `[(a, x)][(b, y)]` with `a` and `b` outer.
    pub fn as_dual_tensor(&self) -> Result<DualTensor> {
        let check = self.is_nonsignalling(1e-8);
        if !check.ok {
            return Err(Error::invalid(format!("box is signalling (violation {:.3e})", check.max_violation)));
        }
        let (m, n) = (self.m, self.n);
        let mut t = vec![0.0; n * m * n * m];
        for a in 0..n {
            for b in 0..n {
                for x in 0..m {
                    for y in 0..m {
                        t[(a * m + x) * n * m + b * m + y] = self.get(a, b, x, y);
                    }
                }
            }
        }
        Ok(DualTensor { m, n, t })
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::dim("mixing boxes of different shapes"));
        }
        Self::new(self.m, self.n, self.p.iter().zip(&other.p).map(|(a, b)| w * a + (1.0 - w) * b).collect())
    }
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualTensor {
    pub m: usize,
    pub n: usize,
    pub t: Vec<f64>,
}

impl DualTensor {
    pub fn get(&self, a: usize, x: usize, b: usize, y: usize) -> f64 {
        self.t[(a * self.m + x) * self.n * self.m + b * self.m + y]
    }

    /// `Σ_a T[(a,x)][(b,y)]` for every `(b, y)` and `x`; setting independent
    /// when the box is non-signalling.
    pub fn alice_column_sums(&self) -> Vec<Vec<f64>> {
        (0..self.m)
            .map(|x| {
                let mut out = Vec::new();
                for b in 0..self.n {
                    for y in 0..self.m {
                        out.push((0..self.n).map(|a| self.get(a, x, b, y)).sum());
                    }
                }
                out
            })
            .collect()
    }

    pub fn to_box(&self) -> Result<CorrelationBox> {
        CorrelationBox::from_fn(self.m, self.n, |a, b, x, y| self.get(a, x, b, y))
    }
}

pub fn pr_box() -> CorrelationBox {
    CorrelationBox::from_fn(2, 2, |a, b, x, y| if (a ^ b) == (x & y) { 0.5 } else { 0.0 }).expect("valid")
}

pub fn uniform_box(m: usize, n: usize) -> Result<CorrelationBox> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("m and n must be positive"));
    }
    CorrelationBox::from_fn(m, n, |_, _, _, _| 1.0 / (n * n) as f64)
}

/// `v·PR + (1 − v)·uniform`.
pub fn isotropic_box(v: f64) -> Result<CorrelationBox> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!("visibility {v} outside [0, 1]")));
    }
    pr_box().mix(&uniform_box(2, 2)?, v)
}

/// Product of two local deterministic strategies.
pub fn deterministic_box(n: usize, g: &[usize], h: &[usize]) -> Result<CorrelationBox> {
    if g.len() != h.len() {
        return Err(Error::dim("strategies for different numbers of settings"));
    }
    CorrelationBox::from_fn(g.len(), n, |a, b, x, y| if g[x] == a && h[y] == b { 1.0 } else { 0.0 })
}

/// A state and local POVMs, `E[x][a]` on Alice's side and `F[y][b]` on Bob's.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuantumRealization {
    pub rho: ComplexMatrix,
    #[serde(rename = "E")]
    pub e: Vec<Vec<ComplexMatrix>>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<ComplexMatrix>>,
}

pub(crate) const REALIZATION_TOL: f64 = 1e-10;

/// Checks a POVM family and returns `(settings, outcomes, dimension)`.
pub(crate) fn check_povms(family: &[Vec<ComplexMatrix>], who: &str) -> Result<(usize, usize, usize)> {
    let m = family.len();
    if m == 0 || family[0].is_empty() {
        return Err(Error::invalid(format!("{who} has no measurements")));
    }
    let n = family[0].len();
    let d = family[0][0].rows();
    for (x, povm) in family.iter().enumerate() {
        if povm.len() != n {
            return Err(Error::invalid(format!("{who} setting {x} has {} outcomes, expected {n}", povm.len())));
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for (a, e) in povm.iter().enumerate() {
            if e.rows() != d || e.cols() != d {
                return Err(Error::dim(format!("{who} element ({x}, {a}) is not {d}x{d}")));
            }
            if min_eigenvalue(e)? < -REALIZATION_TOL {
                return Err(Error::invalid(format!("{who} element ({x}, {a}) is not PSD")));
            }
            sum = &sum + e;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(d)) > REALIZATION_TOL {
            return Err(Error::invalid(format!("{who} setting {x} does not sum to the identity")));
        }
    }
    Ok((m, n, d))
}

pub(crate) fn check_density(rho: &ComplexMatrix, dim: usize) -> Result<()> {
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::dim(format!("state is {}x{}, expected side {dim}", rho.rows(), rho.cols())));
    }
    if (rho.trace() - 1.0).norm() > REALIZATION_TOL {
        return Err(Error::invalid("state does not have unit trace"));
    }
    if min_eigenvalue(rho)? < -REALIZATION_TOL {
        return Err(Error::invalid("state is not PSD"));
    }
    Ok(())
}

impl QuantumRealization {
    pub fn validate(&self) -> Result<(usize, usize)> {
        let (m, n, da) = check_povms(&self.e, "Alice")?;
        let (mb, nb, db) = check_povms(&self.f, "Bob")?;
        if (m, n) != (mb, nb) {
            return Err(Error::invalid("both parties need the same numbers of settings and outcomes"));
        }
        check_density(&self.rho, da * db)?;
        Ok((m, n))
    }

    pub fn from_pure(psi: &[C64], e: Vec<Vec<ComplexMatrix>>, f: Vec<Vec<ComplexMatrix>>) -> Self {
        Self { rho: ComplexMatrix::projector(psi), e, f }
    }
}

pub fn box_from_quantum(r: &QuantumRealization) -> Result<CorrelationBox> {
    let (m, n) = r.validate()?;
    let mut p = vec![0.0; n * n * m * m];
    for a in 0..n {
        for b in 0..n {
            for x in 0..m {
                for y in 0..m {
                    let op = kron(&r.e[x][a], &r.f[y][b]);
                    p[((a * n + b) * m + x) * m + y] = r.rho.trace_product(&op).re;
                }
            }
        }
    }
    CorrelationBox::new(m, n, p)
}

/// Projective measurement in the orthonormal basis `{v_0, v_1, …}`.
pub fn basis_measurement(basis: &[Vec<C64>]) -> Vec<ComplexMatrix> {
    basis.iter().map(|v| ComplexMatrix::projector(v)).collect()
}

/// Maximally entangled state with Alice measuring Z, X and Bob measuring the
/// eigenbases of `(Z ± X)/√2`.
pub fn tsirelson_realization() -> QuantumRealization {
    let q = consts::real_qubit;
    let alice = vec![
        basis_measurement(&[q(0.0), q(std::f64::consts::FRAC_PI_2)]),
        basis_measurement(&[q(std::f64::consts::FRAC_PI_4), q(3.0 * std::f64::consts::FRAC_PI_4)]),
    ];
    let pi8 = std::f64::consts::PI / 8.0;
    let bob = vec![
        basis_measurement(&[q(pi8), q(pi8 + std::f64::consts::FRAC_PI_2)]),
        basis_measurement(&[q(-pi8), q(-pi8 + std::f64::consts::FRAC_PI_2)]),
    ];
    QuantumRealization::from_pure(&consts::phi_plus(), alice, bob)
}
